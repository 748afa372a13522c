//! Matrix-product extension: ensembles of iid nonnegative `d×d` factor
//! matrices, Monte Carlo estimation of the norm moment transform
//! `h(s) = lim (E‖Π'_n‖^s)^{1/n}`, the top Lyapunov exponent, the Cramér
//! root, and direct estimation of the directional tail sums
//! `p_u(x) = Σ_n P(|Π_nᵀu| > x)` and `p_{u,v}(x) = Σ_n P(vᵀΠ_nᵀu > x)`.
//!
//! No matrix-level exponential tilting is attempted: the tails are estimated
//! by plain Monte Carlo inside the feasible range, using one trajectory of
//! partial products per path (each partial has the right marginal law, and
//! per-path exceedance counts give unbiased sums with valid errors).

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use crate::error::{Error, Result};
use crate::factor::FactorModel;
use crate::stream::{split_paths, substream, Executor, Stream};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

/// Dense row-major `d×d` matrix with just the operations this module needs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    pub d: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(d: usize) -> Self {
        Matrix { d, data: vec![0.0; d * d] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidModel("matrix rows must form a square array".into()));
        }
        Ok(Matrix { d, data: rows.iter().flatten().copied().collect() })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.d + j] = v;
    }

    /// `out = selfᵀ · v`
    pub fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        let d = self.d;
        for j in 0..d {
            let mut s = 0.0;
            for i in 0..d {
                s += self.data[i * d + j] * v[i];
            }
            out[j] = s;
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        let d = self.d;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Operator norm induced by the Euclidean vector norm (largest singular
    /// value), by power iteration on `AᵀA` to 1e-10 relative accuracy.
    pub fn op_norm(&self) -> f64 {
        let d = self.d;
        let fro = self.frobenius();
        if fro == 0.0 {
            return 0.0;
        }
        // work on the scaled matrix so intermediate squares stay in range
        let inv = 1.0 / fro;
        let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 1e-3 * i as f64).collect();
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm0);
        let mut av = vec![0.0; d];
        let mut atav = vec![0.0; d];
        let mut lambda_prev = 0.0;
        for _ in 0..100_000 {
            // av = A v ; atav = Aᵀ (A v)
            for i in 0..d {
                av[i] = (0..d).map(|j| self.get(i, j) * inv * v[j]).sum();
            }
            for j in 0..d {
                atav[j] = (0..d).map(|i| self.get(i, j) * inv * av[i]).sum();
            }
            let lambda = atav.iter().map(|x| x * x).sum::<f64>().sqrt();
            if lambda == 0.0 {
                return 0.0;
            }
            for j in 0..d {
                v[j] = atav[j] / lambda;
            }
            if (lambda - lambda_prev).abs() <= 1e-10 * lambda {
                return fro * lambda.sqrt();
            }
            lambda_prev = lambda;
        }
        fro * lambda_prev.sqrt()
    }
}

/// One cell of an entrywise ensemble.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum MatrixEntry {
    Zero,
    Const { value: f64 },
    Model { model: FactorModel },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EnsembleKind {
    /// independent entries, one law per cell
    Entries(Vec<Vec<MatrixEntry>>),
    /// finite support: matrices with probabilities
    Atoms { matrices: Vec<Matrix>, probs: Vec<f64> },
}

/// A sampler of iid nonnegative `d×d` factor matrices.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatrixEnsemble {
    pub d: usize,
    pub kind: EnsembleKind,
    /// condition (dense log-eigenvalue subgroup) is assumed, not checked
    pub dense_subgroup_assumed: bool,
}

impl MatrixEnsemble {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidModel(format!(
                "ensemble dimension must be at least 2 (got {})",
                self.d
            )));
        }
        match &self.kind {
            EnsembleKind::Entries(rows) => {
                if rows.len() != self.d || rows.iter().any(|r| r.len() != self.d) {
                    return Err(Error::InvalidModel(format!(
                        "entries must form a {0}×{0} array",
                        self.d
                    )));
                }
                for (i, row) in rows.iter().enumerate() {
                    let mut has_positive = false;
                    for (j, e) in row.iter().enumerate() {
                        match e {
                            MatrixEntry::Zero => {}
                            MatrixEntry::Const { value } => {
                                if !(*value >= 0.0) || !value.is_finite() {
                                    return Err(Error::InvalidModel(format!(
                                        "entry ({i},{j}): constants must be finite and >= 0"
                                    )));
                                }
                                if *value > 0.0 {
                                    has_positive = true;
                                }
                            }
                            MatrixEntry::Model { model } => {
                                model.validate()?;
                                if model.prob_negative() > 0.0 {
                                    return Err(Error::InvalidModel(format!(
                                        "entry ({i},{j}): ensemble entries must be almost surely nonnegative"
                                    )));
                                }
                                has_positive = true;
                            }
                        }
                    }
                    if !has_positive {
                        return Err(Error::InvalidModel(format!(
                            "row {i} is almost surely zero"
                        )));
                    }
                }
            }
            EnsembleKind::Atoms { matrices, probs } => {
                if matrices.is_empty() || matrices.len() != probs.len() {
                    return Err(Error::InvalidModel(
                        "atoms need matching, nonempty matrix and probability lists".into(),
                    ));
                }
                let total: f64 = probs.iter().sum();
                if probs.iter().any(|p| !(*p > 0.0)) || (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidModel(format!(
                        "atom probabilities must be positive and sum to 1 (sum = {total})"
                    )));
                }
                for (k, m) in matrices.iter().enumerate() {
                    if m.d != self.d || m.data.len() != self.d * self.d {
                        return Err(Error::InvalidModel(format!("atom {k} has wrong shape")));
                    }
                    for (i, chunk) in m.data.chunks(self.d).enumerate() {
                        if chunk.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                            return Err(Error::InvalidModel(format!(
                                "atom {k}, row {i}: entries must be finite and >= 0"
                            )));
                        }
                        if chunk.iter().all(|v| *v == 0.0) {
                            return Err(Error::InvalidModel(format!(
                                "atom {k}, row {i} is zero"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Matrix) {
        match &self.kind {
            EnsembleKind::Entries(rows) => {
                for (i, row) in rows.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        let v = match e {
                            MatrixEntry::Zero => 0.0,
                            MatrixEntry::Const { value } => *value,
                            MatrixEntry::Model { model } => model.sample(rng),
                        };
                        out.set(i, j, v);
                    }
                }
            }
            EnsembleKind::Atoms { matrices, probs } => {
                let idx = if matrices.len() == 1 {
                    0
                } else {
                    let u: f64 = rng.random();
                    let mut cum = 0.0;
                    let mut pick = matrices.len() - 1;
                    for (k, p) in probs.iter().enumerate() {
                        cum += p;
                        if u < cum {
                            pick = k;
                            break;
                        }
                    }
                    pick
                };
                out.data.copy_from_slice(&matrices[idx].data);
            }
        }
    }
}

/// One point of the sampled `s ↦ ĥ(s)` curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HCurvePoint {
    pub s: f64,
    pub h: f64,
    pub std_error: f64,
}

/// Cramér data estimated for a matrix ensemble.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MultivariateCramer {
    pub alpha: f64,
    pub alpha_std_error: f64,
    /// bound on the finite-depth norm bias of alpha: ln(d)/(depth·m)
    pub alpha_bias_bound: f64,
    /// `m(α) = h'(α)` by centered difference of `log ĥ`
    pub m_alpha: f64,
    pub m_alpha_std_error: f64,
    pub h_curve: Vec<HCurvePoint>,
    /// depth used in the norm-moment limit
    pub n_products: u32,
    pub n_samples: u64,
}

/// Sampled `log ‖Π'_depth‖` values (operator norm), the raw material for
/// `ĥ(s)` with common random numbers across `s`.
pub fn sample_log_norms<E: Executor + ?Sized>(
    ens: &MatrixEnsemble,
    depth: u32,
    n_samples: u64,
    seed: u64,
    workers: u32,
    label: &str,
    exec: &E,
) -> Result<Vec<f64>> {
    ens.validate()?;
    let blocks = split_paths(n_samples, workers);
    let blocks_ref = &blocks;
    let label = String::from(label);
    let ens = ens.clone();
    let out = exec.run_blocks(blocks.len() as u32, &move |b| {
        let mut rng = substream(seed, &label, 0, b as u64);
        let mut x = Matrix::zeros(ens.d);
        let mut logs = Vec::with_capacity(blocks_ref[b as usize] as usize);
        for _ in 0..blocks_ref[b as usize] {
            let mut prod = Matrix::zeros(ens.d);
            for i in 0..ens.d {
                prod.set(i, i, 1.0);
            }
            let mut scale = 0.0f64;
            for _ in 0..depth {
                ens.sample_into(&mut rng, &mut x);
                prod = prod.matmul(&x);
                let f = prod.frobenius();
                scale += f.ln();
                let inv = 1.0 / f;
                prod.data.iter_mut().for_each(|v| *v *= inv);
            }
            logs.push(scale + prod.op_norm().ln());
        }
        logs
    });
    Ok(out.into_iter().flatten().collect())
}

/// `ĥ(s) = (mean e^{s·t})^{1/depth}` over a log-norm sample, with the
/// delta-method standard error.
fn h_from_sample(t: &[f64], s: f64, depth: u32) -> (f64, f64) {
    let n = t.len() as f64;
    let m = t.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(s * v));
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &v in t {
        let e = (s * v - m).exp();
        sum += e;
        sum_sq += e * e;
    }
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let se_mean = (var / n).sqrt();
    let ln_h = (m + mean.ln()) / depth as f64;
    let h = ln_h.exp();
    let se = h * se_mean / mean / depth as f64;
    (h, se)
}

/// Estimate `h(s)` at the given depth.
pub fn estimate_h<E: Executor + ?Sized>(
    ens: &MatrixEnsemble,
    s: f64,
    depth: u32,
    n_samples: u64,
    seed: u64,
    workers: u32,
    exec: &E,
) -> Result<(f64, f64)> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("h(s) estimation requires s >= 0 (got {s})")));
    }
    let t = sample_log_norms(ens, depth, n_samples, seed, workers, "mv-h", exec)?;
    let (h, se) = h_from_sample(&t, s, depth);
    if !h.is_finite() || (s > 0.0 && se / h > 0.5) {
        return Err(Error::UnstableEstimate { value: h, std_error: se });
    }
    Ok((h, se))
}

/// Estimate the top Lyapunov exponent, doubling the depth until the estimate
/// stabilizes within combined standard errors.
pub fn estimate_lyapunov<E: Executor + ?Sized>(
    ens: &MatrixEnsemble,
    depth: u32,
    n_samples: u64,
    seed: u64,
    workers: u32,
    exec: &E,
) -> Result<(f64, f64)> {
    let gamma_at = |d: u32, lane: u64| -> Result<(f64, f64)> {
        let t = sample_log_norms(ens, d, n_samples, seed ^ lane, workers, "mv-lyapunov", exec)?;
        let n = t.len() as f64;
        let mean = t.iter().sum::<f64>() / n;
        let var = t.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        Ok((mean / d as f64, (var / n).sqrt() / d as f64))
    };
    let mut d = depth.max(2);
    let (mut g, mut se) = gamma_at(d, 0)?;
    for lane in 1..=3u64 {
        let (g2, se2) = gamma_at(2 * d, lane)?;
        let combined = (se * se + se2 * se2).sqrt();
        let stable = (g - g2).abs() <= combined;
        d *= 2;
        g = g2;
        se = se2;
        if stable {
            break;
        }
    }
    if g - 3.0 * se > 0.0 {
        return Err(Error::PositiveLyapunov { gamma: g, std_error: se });
    }
    Ok((g, se))
}

/// Solve `ĥ(α) = 1` on a common-random-numbers curve.
pub fn solve_alpha_mv<E: Executor + ?Sized>(
    ens: &MatrixEnsemble,
    depth: u32,
    n_samples: u64,
    bracket: Option<(f64, f64)>,
    seed: u64,
    workers: u32,
    exec: &E,
) -> Result<MultivariateCramer> {
    let t = sample_log_norms(ens, depth, n_samples, seed, workers, "mv-alpha", exec)?;
    if t.len() < 1_000 {
        return Err(Error::TooFewSamples { given: t.len() as u64, minimum: 1_000 });
    }

    // drift must look negative before we hunt for a root
    let n = t.len() as f64;
    let mean = t.iter().sum::<f64>() / n;
    let var = t.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let gamma = mean / depth as f64;
    let gamma_se = (var / n).sqrt() / depth as f64;
    if gamma - 3.0 * gamma_se > 0.0 {
        return Err(Error::PositiveLyapunov { gamma, std_error: gamma_se });
    }

    let ln_h = |s: f64, slice: &[f64]| -> f64 { h_from_sample(slice, s, depth).0.ln() };

    let (lo0, hi0) = match bracket {
        Some((lo, hi)) => {
            if !(lo >= 0.0 && hi > lo) {
                return Err(Error::BracketFailure(format!(
                    "bracket must satisfy 0 <= lo < hi (got {lo}, {hi})"
                )));
            }
            (lo, hi)
        }
        None => {
            // grow until the empirical curve crosses 1 or turns unstable
            let mut lo = 1e-3;
            let mut s = 0.25;
            let mut found = None;
            for _ in 0..16 {
                let (h, se) = h_from_sample(&t, s, depth);
                if !h.is_finite() || se / h > 0.5 {
                    return Err(Error::BracketFailure(format!(
                        "ĥ became unstable at s = {s} before crossing 1; \
                         raise n_samples or lower depth"
                    )));
                }
                if h > 1.0 {
                    found = Some((lo, s));
                    break;
                }
                lo = s;
                s *= 2.0;
            }
            found.ok_or_else(|| {
                Error::BracketFailure("ĥ(s) stayed below 1 on the searchable range".into())
            })?
        }
    };
    if ln_h(lo0, &t) > 0.0 || ln_h(hi0, &t) <= 0.0 {
        return Err(Error::BracketFailure(format!(
            "log ĥ does not change sign on [{lo0}, {hi0}]"
        )));
    }

    let bisect = |slice: &[f64]| -> Option<f64> {
        let (mut lo, mut hi) = (lo0, hi0);
        if ln_h(lo, slice) > 0.0 || ln_h(hi, slice) <= 0.0 {
            return None;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ln_h(mid, slice) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(0.5 * (lo + hi))
    };

    let alpha = bisect(&t)
        .ok_or_else(|| Error::BracketFailure("empirical root lost during bisection".into()))?;

    // group-splitting errors for alpha and m
    const GROUPS: usize = 8;
    let group_len = t.len() / GROUPS;
    let mut alpha_groups = Vec::new();
    let mut m_groups = Vec::new();
    let delta = 0.05;
    for g in 0..GROUPS {
        let slice = &t[g * group_len..(g + 1) * group_len];
        if let Some(a) = bisect(slice) {
            alpha_groups.push(a);
        }
        let md = (ln_h(alpha + delta, slice) - ln_h(alpha - delta, slice)) / (2.0 * delta);
        if md.is_finite() {
            m_groups.push(md);
        }
    }
    if alpha_groups.len() < GROUPS / 2 {
        return Err(Error::UnstableEstimate { value: alpha, std_error: f64::NAN });
    }
    let spread = |xs: &[f64]| -> f64 {
        let k = xs.len() as f64;
        let mu = xs.iter().sum::<f64>() / k;
        let v = xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (k - 1.0);
        (v / k).sqrt()
    };
    let alpha_se = spread(&alpha_groups);
    let m_alpha = (ln_h(alpha + delta, &t) - ln_h(alpha - delta, &t)) / (2.0 * delta);
    if !(m_alpha > 0.0) {
        return Err(Error::UnstableEstimate { value: m_alpha, std_error: f64::NAN });
    }
    let m_se = spread(&m_groups);

    let mut h_curve = Vec::new();
    for frac in [0.6, 0.8, 0.9, 1.0, 1.1, 1.2] {
        let s = alpha * frac;
        let (h, se) = h_from_sample(&t, s, depth);
        if h.is_finite() {
            h_curve.push(HCurvePoint { s, h, std_error: se });
        }
    }

    Ok(MultivariateCramer {
        alpha,
        alpha_std_error: alpha_se,
        alpha_bias_bound: (ens.d as f64).ln() / (depth as f64 * m_alpha),
        m_alpha,
        m_alpha_std_error: m_se,
        h_curve,
        n_products: depth,
        n_samples: t.len() as u64,
    })
}

/// One grid point of the directional tail estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MvTailPoint {
    pub log_x: f64,
    pub p_u: f64,
    pub p_u_se: f64,
    pub p_uv: f64,
    pub p_uv_se: f64,
    /// `p_{u,v}/p_u` with the delta-method standard error
    pub ratio: f64,
    pub ratio_se: f64,
    pub hits_u: u64,
    pub hits_uv: u64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MvTailReport {
    pub points: Vec<MvTailPoint>,
    pub horizon_xi: f64,
    pub n_samples: u64,
}

#[derive(Clone, Default)]
struct TailAcc {
    n: u64,
    c_sum: u64,
    d_sum: u64,
    c_sq: f64,
    d_sq: f64,
    cd: f64,
}

/// Direct Monte Carlo of the directional tail sums on a `log x` grid.
///
/// Each path follows one trajectory of partial products `Π_nᵀu` and counts
/// threshold crossings up to the per-point horizon `⌈(1+ξ) log x / m̂⌉`.
#[allow(clippy::too_many_arguments)]
pub fn mv_tail_estimates<E: Executor + ?Sized>(
    ens: &MatrixEnsemble,
    mv: &MultivariateCramer,
    u: &[f64],
    v: &[f64],
    log_x_grid: &[f64],
    n_samples: u64,
    xi: f64,
    seed: u64,
    workers: u32,
    exec: &E,
) -> Result<MvTailReport> {
    ens.validate()?;
    if u.len() != ens.d || v.len() != ens.d {
        return Err(Error::Domain(format!(
            "direction vectors must have dimension {}",
            ens.d
        )));
    }
    for w in [u, v] {
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 || w.iter().any(|x| *x < 0.0) {
            return Err(Error::Domain(
                "direction vectors must be unit length with nonnegative entries".into(),
            ));
        }
    }
    if log_x_grid.is_empty() || log_x_grid.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Domain("log x grid must be nonempty and positive".into()));
    }
    if !(xi > -1.0) {
        return Err(Error::Domain(format!("horizon stretch must exceed -1 (got {xi})")));
    }

    let horizons: Vec<u64> = log_x_grid
        .iter()
        .map(|l| ((1.0 + xi) * l / mv.m_alpha).ceil().max(1.0) as u64)
        .collect();
    let n_max = *horizons.iter().max().unwrap();
    let blocks = split_paths(n_samples, workers);
    let blocks_ref = &blocks;
    let grid: Vec<f64> = log_x_grid.to_vec();
    let horizons_ref = &horizons;
    let ens = ens.clone();
    let u = u.to_vec();
    let v = v.to_vec();
    let results = exec.run_blocks(blocks.len() as u32, &move |b| -> Vec<TailAcc> {
        let mut rng: Stream = substream(seed, "mv-tail", 0, b as u64);
        let mut accs = vec![TailAcc::default(); grid.len()];
        let mut x = Matrix::zeros(ens.d);
        let mut w = vec![0.0; ens.d];
        let mut w_next = vec![0.0; ens.d];
        let mut c = vec![0u32; grid.len()];
        let mut dcnt = vec![0u32; grid.len()];
        for _ in 0..blocks_ref[b as usize] {
            w.copy_from_slice(&u);
            let mut log_scale = 0.0f64;
            c.iter_mut().for_each(|z| *z = 0);
            dcnt.iter_mut().for_each(|z| *z = 0);
            for n in 1..=n_max {
                ens.sample_into(&mut rng, &mut x);
                x.apply_transpose(&w, &mut w_next);
                core::mem::swap(&mut w, &mut w_next);
                let norm = w.iter().map(|y| y * y).sum::<f64>().sqrt();
                if norm == 0.0 {
                    break; // absorbed at zero; no further exceedances possible
                }
                log_scale += norm.ln();
                let inv = 1.0 / norm;
                w.iter_mut().for_each(|y| *y *= inv);
                let vw: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                let log_v = log_scale + vw.ln();
                for (g, &l) in grid.iter().enumerate() {
                    if n <= horizons_ref[g] {
                        if log_scale > l {
                            c[g] += 1;
                        }
                        if log_v > l {
                            dcnt[g] += 1;
                        }
                    }
                }
            }
            for g in 0..grid.len() {
                let (cf, df) = (c[g] as f64, dcnt[g] as f64);
                let a = &mut accs[g];
                a.n += 1;
                a.c_sum += c[g] as u64;
                a.d_sum += dcnt[g] as u64;
                a.c_sq += cf * cf;
                a.d_sq += df * df;
                a.cd += cf * df;
            }
        }
        accs
    });

    let mut merged = vec![TailAcc::default(); log_x_grid.len()];
    for block in results {
        for (m, a) in merged.iter_mut().zip(block) {
            m.n += a.n;
            m.c_sum += a.c_sum;
            m.d_sum += a.d_sum;
            m.c_sq += a.c_sq;
            m.d_sq += a.d_sq;
            m.cd += a.cd;
        }
    }

    let mut points = Vec::with_capacity(merged.len());
    for (g, acc) in merged.iter().enumerate() {
        let n = acc.n as f64;
        let cm = acc.c_sum as f64 / n;
        let dm = acc.d_sum as f64 / n;
        let c_var = (acc.c_sq / n - cm * cm).max(0.0);
        let d_var = (acc.d_sq / n - dm * dm).max(0.0);
        let cov = acc.cd / n - cm * dm;
        let p_u_se = (c_var / n).sqrt();
        let p_uv_se = (d_var / n).sqrt();
        let (ratio, ratio_se) = if acc.c_sum > 0 {
            let r = dm / cm;
            let var_r =
                (d_var - 2.0 * r * cov + r * r * c_var).max(0.0) / (cm * cm) / n;
            (r, var_r.sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };
        points.push(MvTailPoint {
            log_x: log_x_grid[g],
            p_u: cm,
            p_u_se,
            p_uv: dm,
            p_uv_se,
            ratio,
            ratio_se,
            hits_u: acc.c_sum,
            hits_uv: acc.d_sum,
            feasible: acc.c_sum >= 10 && acc.d_sum >= 10,
        });
    }

    if points.iter().all(|p| !p.feasible) {
        // predict the feasible range from the leading power law
        let best = points
            .iter()
            .filter(|p| p.hits_u > 0)
            .max_by(|a, b| a.hits_u.cmp(&b.hits_u));
        let feasible_log_x_max = match best {
            Some(p) => {
                p.log_x + ((p.p_u * n_samples as f64 / 10.0).max(1.0)).ln() / mv.alpha
            }
            None => 0.0,
        };
        return Err(Error::InfeasibleX { feasible_log_x_max });
    }

    Ok(MvTailReport {
        points,
        horizon_xi: xi,
        n_samples,
    })
}
