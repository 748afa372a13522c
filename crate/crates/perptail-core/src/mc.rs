//! Monte Carlo and importance-sampling machinery: direct simulation of the
//! perpetuity `Y`, exponentially tilted estimation of the row-tail sum
//! `p(x) = Σ_n P(Π_n > x)`, the signed stopped-product chain, first-passage
//! ruin estimates, the Lindley recursion, extreme-value normalizers, and the
//! fixed-point-constant estimator.
//!
//! Estimation identity: with `h(α) = 1` the per-row tilt is normalized, so
//! `P(Π_n > x) = E^α[e^{-α S_n} 1(S_n > log x)]` with `S_n` sampled under the
//! tilted law, where rare exceedances become typical.

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use crate::cramer::CramerSolution;
use crate::error::{Error, Result};
use crate::factor::FactorModel;
use crate::special::ln_gamma;
use crate::stream::{split_paths, substream, Executor, MeanAcc};
use crate::tail::horizon_at_log;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;

/// Guards almost-surely-finite loops (stopped blocks, ruin first passage).
const STEP_GUARD: u64 = 1_000_000;

/// Burn-in length for the fixed-point recursion `Y'_t = X_t Y'_{t-1} + 1`.
const FIXED_POINT_BURN_IN: u32 = 1_000;

/// How the series `Y = Σ_{n≤N} Π_n` is truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Truncation {
    Fixed(u32),
    /// Choose `N` so the Markov bound `h(γ)^{N+1}/(1-h(γ)) < eps` holds.
    Adaptive { eps: f64, gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimulationConfig {
    pub n_paths: u64,
    pub seed: u64,
    pub truncation: Truncation,
    pub workers: u32,
}

impl SimulationConfig {
    pub fn new(n_paths: u64, seed: u64) -> Self {
        SimulationConfig {
            n_paths,
            seed,
            truncation: Truncation::Adaptive { eps: 1e-9, gamma: f64::NAN },
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: u32) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }
}

/// An importance-sampling estimate with its standard error.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TiltedEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    /// analytic bound on mass dropped by horizon truncation (0 when exact)
    pub remainder_bound: f64,
    pub per_n: Option<Vec<PerN>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PerN {
    pub n: u64,
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

/// One block of the signed stopped-product chain: `w = log X̃` summed over a
/// block that ends when the running product sign returns to positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppedChainSample {
    pub w: f64,
    pub n1: u64,
}

/// Per-n sample allocation for the horizon sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SampleAllocation {
    /// `n_samples_per_n` samples at every n.
    Uniform,
    /// Total budget shared proportionally to the Φ-weights of the
    /// normal-approximation sum, floored at 1000 samples per n.
    #[default]
    PhiWeighted,
}

/// Options for [`is_tail_p`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TailSumOptions {
    /// override the default horizon `g_{0.5}(x)`
    pub n_max: Option<u64>,
    pub allocation: SampleAllocation,
}

/// Resolve the truncation depth for a model.
pub fn resolve_truncation(model: &FactorModel, truncation: Truncation) -> Result<u32> {
    match truncation {
        Truncation::Fixed(n) => {
            if n == 0 {
                return Err(Error::Domain("fixed truncation depth must be positive".into()));
            }
            Ok(n)
        }
        Truncation::Adaptive { eps, gamma } => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::Domain(format!(
                    "adaptive truncation tolerance must lie in (0,1) (got {eps})"
                )));
            }
            // NaN gamma means "pick for me": scan for a strongly contracting tilt
            let g = if gamma.is_nan() {
                best_contraction_tilt(model)?
            } else {
                gamma
            };
            let h = model.h(g)?;
            if !(h < 1.0) {
                return Err(Error::Domain(format!(
                    "adaptive truncation needs h(γ) < 1; h({g}) = {h}"
                )));
            }
            let t = (eps * (1.0 - h)).ln() / h.ln();
            Ok((t.floor().max(1.0) as u32).clamp(1, 100_000))
        }
    }
}

fn best_contraction_tilt(model: &FactorModel) -> Result<f64> {
    // minimize h over a coarse grid inside the finiteness interval
    let (_, hi) = model.finiteness_interval();
    let top = if hi.is_finite() { hi * 0.999 } else { 8.0 };
    let mut best = (f64::INFINITY, 0.5);
    for j in 1..=64 {
        let s = top * j as f64 / 64.0;
        if let Ok(h) = model.h(s) {
            if h < best.0 {
                best = (h, s);
            }
        }
    }
    if best.0 < 1.0 {
        Ok(best.1)
    } else {
        Err(Error::Domain(
            "no contracting tilt found: h(s) >= 1 on the whole grid".into(),
        ))
    }
}

/// Draw `n_paths` samples of the truncated series `Σ_{n≤N} Π_n` with fresh
/// factors in every row. Rows whose magnitude underflows contribute zero.
pub fn simulate_y<E: Executor + ?Sized>(
    model: &FactorModel,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<Vec<f64>> {
    model.validate()?;
    let depth = resolve_truncation(model, cfg.truncation)? as u64;
    let blocks = split_paths(cfg.n_paths, cfg.workers);
    let model = model.clone();
    let seed = cfg.seed;
    let blocks_ref = &blocks;
    let out = exec.run_blocks(blocks.len() as u32, &move |b| {
        let mut rng = substream(seed, "simulate-y", 0, b as u64);
        let rows: Vec<_> = (1..=depth).map(|n| model.row_sampler(n)).collect();
        let mut ys = Vec::with_capacity(blocks_ref[b as usize] as usize);
        for _ in 0..blocks_ref[b as usize] {
            let mut y = 0.0;
            for row in &rows {
                let d = row.sample(&mut rng);
                let mag = d.log_mag.exp();
                y += if d.negative { -mag } else { mag };
            }
            ys.push(y);
        }
        ys
    });
    Ok(out.into_iter().flatten().collect())
}

/// Share of samples `(Y > x, Y < -x)` in a sample set.
pub fn tail_shares(samples: &[f64], x: f64) -> (f64, f64, u64, u64) {
    let mut up = 0u64;
    let mut down = 0u64;
    for &y in samples {
        if y > x {
            up += 1;
        } else if y < -x {
            down += 1;
        }
    }
    let n = samples.len().max(1) as f64;
    (up as f64 / n, down as f64 / n, up, down)
}

/// Unbiased tilted estimate of `P(Π_n > x)`.
///
/// For signed models `n` counts blocks of the stopped-product chain, for
/// which the same identity holds (`E[X̃^α] = 1` by optional stopping).
pub fn is_tail_pn<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    n: u64,
    x: f64,
    n_samples: u64,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<TiltedEstimate> {
    is_tail_pn_at_log(model, sol, n, x.ln(), n_samples, cfg, exec)
}

pub fn is_tail_pn_at_log<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    n: u64,
    log_x: f64,
    n_samples: u64,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<TiltedEstimate> {
    if n_samples < 100 {
        return Err(Error::TooFewSamples { given: n_samples, minimum: 100 });
    }
    if n == 0 {
        return Err(Error::Domain("row index n must be positive".into()));
    }
    let acc = run_weight_blocks(model, sol, n, log_x, n_samples, cfg, "is-tail-pn", exec)?;
    let scale = (-sol.alpha * log_x).exp();
    Ok(TiltedEstimate {
        value: scale * acc.mean(),
        std_error: scale * acc.std_error(),
        n_samples: acc.n,
        remainder_bound: 0.0,
        per_n: None,
    })
}

fn run_weight_blocks<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    n: u64,
    log_x: f64,
    n_samples: u64,
    cfg: &SimulationConfig,
    label: &str,
    exec: &E,
) -> Result<MeanAcc> {
    let blocks = split_paths(n_samples, cfg.workers);
    let signed = model.is_signed();
    let alpha = sol.alpha;
    let model = model.clone();
    let seed = cfg.seed;
    let blocks_ref = &blocks;
    let label = String::from(label);
    let results = exec.run_blocks(blocks.len() as u32, &move |b| -> Result<MeanAcc> {
        let mut rng = substream(seed, &label, n, b as u64);
        let row = if signed { None } else { Some(model.row_sampler_tilted(n, alpha)?) };
        let mut acc = MeanAcc::default();
        for _ in 0..blocks_ref[b as usize] {
            let s = match &row {
                Some(sampler) => sampler.sample(&mut rng).log_mag,
                None => {
                    let mut t = 0.0;
                    for _ in 0..n {
                        t += sample_stopped_chain_tilted(&model, alpha, &mut rng)?.w;
                    }
                    t
                }
            };
            acc.push(if s > log_x { (-alpha * (s - log_x)).exp() } else { 0.0 });
        }
        Ok(acc)
    });
    let mut merged = MeanAcc::default();
    for r in results {
        merged = merged.merge(r?);
    }
    Ok(merged)
}

/// Horizon sum `Σ_{n≤N} P(Π_n > x)` by per-n tilted estimation, with the
/// Markov remainder bound added to the reported error budget.
pub fn is_tail_p<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    x: f64,
    n_samples_per_n: u64,
    opts: &TailSumOptions,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<TiltedEstimate> {
    is_tail_p_at_log(model, sol, x.ln(), n_samples_per_n, opts, cfg, exec)
}

pub fn is_tail_p_at_log<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    log_x: f64,
    n_samples_per_n: u64,
    opts: &TailSumOptions,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<TiltedEstimate> {
    if n_samples_per_n < 100 {
        return Err(Error::TooFewSamples { given: n_samples_per_n, minimum: 100 });
    }
    let n_max = opts
        .n_max
        .unwrap_or_else(|| horizon_at_log(sol, log_x, 0.5).n_max)
        .max(1);

    // per-n budgets
    let budgets: Vec<u64> = match opts.allocation {
        SampleAllocation::Uniform => (0..n_max).map(|_| n_samples_per_n).collect(),
        SampleAllocation::PhiWeighted => {
            let total = n_samples_per_n.saturating_mul(n_max);
            let sd = sol.sigma2_tilde.max(1e-12).sqrt();
            let weights: Vec<f64> = (1..=n_max)
                .map(|n| {
                    let nf = n as f64;
                    crate::special::normal_cdf((log_x - nf * sol.m_tilde) / (sd * nf.sqrt()))
                })
                .collect();
            let wsum: f64 = weights.iter().sum();
            weights
                .iter()
                .map(|w| ((total as f64 * w / wsum.max(1e-300)) as u64).max(1_000))
                .collect()
        }
    };

    let scale = (-sol.alpha * log_x).exp();
    let mut value = 0.0;
    let mut var = 0.0;
    let mut total_samples = 0u64;
    let mut per_n = Vec::with_capacity(n_max as usize);
    for (i, &budget) in budgets.iter().enumerate() {
        let n = i as u64 + 1;
        let acc = run_weight_blocks(model, sol, n, log_x, budget, cfg, "is-tail-p", exec)?;
        let v = scale * acc.mean();
        let se = scale * acc.std_error();
        value += v;
        var += se * se;
        total_samples += acc.n;
        per_n.push(PerN { n, value: v, std_error: se, n_samples: acc.n });
    }
    let remainder = crate::tail::markov_remainder_bound(model, sol.alpha, log_x, n_max)?;
    Ok(TiltedEstimate {
        value,
        std_error: var.sqrt(),
        n_samples: total_samples,
        remainder_bound: remainder,
        per_n: Some(per_n),
    })
}

/// Exact `Σ_{n≤n_max} P(Π_n > x)` for a two-point factor, by binomial
/// enumeration over sign/magnitude outcomes with Kahan summation.
pub fn brute_force_p(model: &FactorModel, x: f64, n_max: u64) -> Result<f64> {
    brute_force_p_at_log(model, x.ln(), n_max)
}

pub fn brute_force_p_at_log(model: &FactorModel, log_x: f64, n_max: u64) -> Result<f64> {
    if n_max > 10_000 {
        return Err(Error::Domain(format!(
            "brute force refuses n_max > 10000 (got {n_max})"
        )));
    }
    let table = LnFactorials::up_to(n_max as usize);
    let mut sum = Kahan::default();
    for n in 1..=n_max {
        sum.add(brute_force_pn_with_table(model, n, log_x, &table)?);
    }
    Ok(sum.value())
}

/// Exact `P(Π_n > x)` for a two-point factor.
pub fn brute_force_pn(model: &FactorModel, n: u64, x: f64) -> Result<f64> {
    brute_force_pn_at_log(model, n, x.ln())
}

pub fn brute_force_pn_at_log(model: &FactorModel, n: u64, log_x: f64) -> Result<f64> {
    let table = LnFactorials::up_to(n as usize);
    brute_force_pn_with_table(model, n, log_x, &table)
}

fn brute_force_pn_with_table(
    model: &FactorModel,
    n: u64,
    log_x: f64,
    table: &LnFactorials,
) -> Result<f64> {
    let FactorModel::TwoPoint { a, b, p_a } = model else {
        return Err(Error::Unsupported(
            "brute-force enumeration requires a two-point factor".into(),
        ));
    };
    let (la, lb) = (a.abs().ln(), b.abs().ln());
    let reciprocal = a.abs() * b.abs() == 1.0;
    let (ln_pa, ln_pb) = (p_a.ln(), (1.0 - p_a).ln());
    let mut sum = Kahan::default();
    for k in 0..=n {
        if (k > 0 && *p_a == 0.0) || (k < n && *p_a == 1.0) {
            continue;
        }
        let log_mag = if reciprocal {
            (2.0 * k as f64 - n as f64) * la
        } else {
            k as f64 * la + (n - k) as f64 * lb
        };
        let neg = (*a < 0.0 && k % 2 == 1) ^ (*b < 0.0 && (n - k) % 2 == 1);
        if neg || !(log_mag > log_x) {
            continue;
        }
        let mut ln_term = table.ln_choose(n, k);
        if k > 0 {
            ln_term += k as f64 * ln_pa;
        }
        if k < n {
            ln_term += (n - k) as f64 * ln_pb;
        }
        sum.add(ln_term.exp());
    }
    Ok(sum.value())
}

struct LnFactorials(Vec<f64>);

impl LnFactorials {
    fn up_to(n: usize) -> Self {
        LnFactorials((0..=n).map(|k| ln_gamma(k as f64 + 1.0)).collect())
    }

    #[inline]
    fn ln_choose(&self, n: u64, k: u64) -> f64 {
        self.0[n as usize] - self.0[k as usize] - self.0[(n - k) as usize]
    }
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// One plain-measure block of the stopped-product chain: simulate signed
/// factors until the running product sign returns to positive.
pub fn sample_stopped_chain<R: Rng + ?Sized>(
    model: &FactorModel,
    _sol: &CramerSolution,
    rng: &mut R,
) -> Result<StoppedChainSample> {
    stopped_block(rng, |r| Ok(model.sample_log(r)))
}

/// Tilted block: magnitudes drawn under `P^α`, sign chain untouched.
pub fn sample_stopped_chain_tilted<R: Rng + ?Sized>(
    model: &FactorModel,
    alpha: f64,
    rng: &mut R,
) -> Result<StoppedChainSample> {
    stopped_block(rng, |r| model.sample_log_tilted(alpha, r))
}

fn stopped_block<R: Rng + ?Sized>(
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> Result<crate::factor::LogDraw>,
) -> Result<StoppedChainSample> {
    let mut w = 0.0;
    let mut negative = false;
    for n1 in 1..=STEP_GUARD {
        let d = draw(rng)?;
        w += d.log_mag;
        negative ^= d.negative;
        if !negative {
            return Ok(StoppedChainSample { w, n1 });
        }
    }
    Err(Error::GuardExceeded { steps: STEP_GUARD, context: "stopped-product block".into() })
}

/// First-passage estimate of `P(max_n Π'_n > x)` by tilted sequential
/// simulation: run the walk under `P^α` until it crosses `log x` and average
/// the overshoot weights `e^{-α S_τ} x^α`.
pub fn simulate_ruin<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    x: f64,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<TiltedEstimate> {
    simulate_ruin_at_log(model, sol, x.ln(), cfg, exec)
}

pub fn simulate_ruin_at_log<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    log_x: f64,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<TiltedEstimate> {
    ruin_impl(model, sol, log_x, cfg, exec, false)
}

/// Same first-passage estimate for `P(max_n |Π'_n| > x)` (signs ignored).
pub fn simulate_ruin_abs<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    x: f64,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<TiltedEstimate> {
    ruin_impl(model, sol, x.ln(), cfg, exec, true)
}

fn ruin_impl<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    log_x: f64,
    cfg: &SimulationConfig,
    exec: &E,
    magnitude_only: bool,
) -> Result<TiltedEstimate> {
    if !(log_x > 0.0) {
        return Err(Error::Domain(format!("ruin level requires log x > 0 (got {log_x})")));
    }
    // bounded support below the level: the maximum can never reach x
    if let Some(bound) = model.log_mag_upper_bound() {
        if bound <= 0.0 {
            return Ok(TiltedEstimate {
                value: 0.0,
                std_error: 0.0,
                n_samples: cfg.n_paths,
                remainder_bound: 0.0,
                per_n: None,
            });
        }
    }
    let signed_blocks = model.is_signed() && !magnitude_only;
    let alpha = sol.alpha;
    let blocks = split_paths(cfg.n_paths, cfg.workers);
    let model = model.clone();
    let seed = cfg.seed;
    let blocks_ref = &blocks;
    let label = if magnitude_only { "ruin-abs" } else { "ruin" };
    let results = exec.run_blocks(blocks.len() as u32, &move |b| -> Result<MeanAcc> {
        let mut rng = substream(seed, label, 0, b as u64);
        let mut acc = MeanAcc::default();
        for _ in 0..blocks_ref[b as usize] {
            let overshoot = if signed_blocks {
                let mut s = 0.0;
                let mut steps = 0u64;
                loop {
                    s += sample_stopped_chain_tilted(&model, alpha, &mut rng)?.w;
                    if s > log_x {
                        break s - log_x;
                    }
                    steps += 1;
                    if steps >= STEP_GUARD {
                        return Err(Error::GuardExceeded {
                            steps: STEP_GUARD,
                            context: "ruin first passage (signed blocks)".into(),
                        });
                    }
                }
            } else {
                ruin_walk(&model, alpha, log_x, &mut rng)?
            };
            acc.push((-alpha * overshoot).exp());
        }
        Ok(acc)
    });
    let mut merged = MeanAcc::default();
    for r in results {
        merged = merged.merge(r?);
    }
    let scale = (-alpha * log_x).exp();
    Ok(TiltedEstimate {
        value: scale * merged.mean(),
        std_error: scale * merged.std_error(),
        n_samples: merged.n,
        remainder_bound: 0.0,
        per_n: None,
    })
}

/// Tilted magnitude walk until it exceeds `log_x`; returns the overshoot.
/// Two-point walks track integer atom counts so lattice levels are exact.
fn ruin_walk<R: Rng + ?Sized>(
    model: &FactorModel,
    alpha: f64,
    log_x: f64,
    rng: &mut R,
) -> Result<f64> {
    match model {
        FactorModel::TwoPoint { a, b, p_a } => {
            let h = model.h(alpha)?;
            let pa_tilted = p_a * (alpha * a.abs().ln()).exp() / h;
            let (la, lb) = (a.abs().ln(), b.abs().ln());
            let reciprocal = a.abs() * b.abs() == 1.0;
            let mut k = 0u64;
            for n in 1..=STEP_GUARD {
                if rng.random::<f64>() < pa_tilted {
                    k += 1;
                }
                let s = if reciprocal {
                    (2.0 * k as f64 - n as f64) * la
                } else {
                    k as f64 * la + (n - k) as f64 * lb
                };
                if s > log_x {
                    return Ok(s - log_x);
                }
            }
        }
        _ => {
            let mut s = 0.0;
            for _ in 0..STEP_GUARD {
                s += model.sample_log_tilted(alpha, rng)?.log_mag;
                if s > log_x {
                    return Ok(s - log_x);
                }
            }
        }
    }
    Err(Error::GuardExceeded { steps: STEP_GUARD, context: "ruin first passage".into() })
}

/// Path statistics of the reflected walk `S_t⁺ = max(S_{t-1}⁺ + log|X_t|, 0)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LindleyStats {
    pub n_steps: u64,
    pub u: Vec<f64>,
    /// `#{t <= n_steps : S_t⁺ > u}` per threshold
    pub exceed_counts: Vec<u64>,
    /// number of maximal runs of consecutive exceedances per threshold
    pub cluster_counts: Vec<u64>,
    /// visits to the atom at zero
    pub zero_hits: u64,
    pub max_s: f64,
}

impl LindleyStats {
    /// Average run length of consecutive exceedances of `u[i]`.
    pub fn mean_cluster_size(&self, i: usize) -> f64 {
        if self.cluster_counts[i] == 0 {
            0.0
        } else {
            self.exceed_counts[i] as f64 / self.cluster_counts[i] as f64
        }
    }
}

/// Run the Lindley recursion from `S₀⁺ = 0` for `n_steps` steps.
pub fn simulate_lindley(
    model: &FactorModel,
    n_steps: u64,
    u_grid: &[f64],
    cfg: &SimulationConfig,
) -> Result<LindleyStats> {
    model.validate()?;
    let mut rng = substream(cfg.seed, "lindley", 0, 0);
    let mut s = 0.0f64;
    let mut exceed = alloc::vec![0u64; u_grid.len()];
    let mut clusters = alloc::vec![0u64; u_grid.len()];
    let mut above = alloc::vec![false; u_grid.len()];
    let mut zero_hits = 0u64;
    let mut max_s = 0.0f64;
    for _ in 0..n_steps {
        s = (s + model.sample_log(&mut rng).log_mag).max(0.0);
        if s == 0.0 {
            zero_hits += 1;
        }
        if s > max_s {
            max_s = s;
        }
        for (i, &u) in u_grid.iter().enumerate() {
            let now = s > u;
            if now && !above[i] {
                clusters[i] += 1;
            }
            if now {
                exceed[i] += 1;
            }
            above[i] = now;
        }
    }
    Ok(LindleyStats {
        n_steps,
        u: u_grid.to_vec(),
        exceed_counts: exceed,
        cluster_counts: clusters,
        zero_hits,
        max_s,
    })
}

/// Extreme-value normalizer `a_n = (2 n log n / (α m(α)))^{1/α}`, `n ≥ 2`,
/// unsigned regime.
pub fn ev_normalizer(sol: &CramerSolution, n: f64) -> Result<f64> {
    if sol.signed {
        return Err(Error::Unsupported(
            "extreme-value normalizer is defined for the unsigned regime".into(),
        ));
    }
    if !(n >= 2.0) {
        return Err(Error::Domain(format!("normalizer requires n >= 2 (got {n})")));
    }
    Ok((2.0 * n * n.ln() / (sol.alpha * sol.m_alpha)).powf(1.0 / sol.alpha))
}

/// Estimate the fixed-point tail constant `E[(X Y' + 1)^α − (X Y')^α]`,
/// with `Y'` drawn by burn-in of `Y'_t = X_t Y'_{t-1} + 1` fresh per path.
pub fn goldie_constant<E: Executor + ?Sized>(
    model: &FactorModel,
    sol: &CramerSolution,
    cfg: &SimulationConfig,
    exec: &E,
) -> Result<TiltedEstimate> {
    model.validate()?;
    if model.is_signed() {
        return Err(Error::Unsupported(
            "fixed-point constant estimator covers the unsigned branch only".into(),
        ));
    }
    let alpha = sol.alpha;
    let blocks = split_paths(cfg.n_paths, cfg.workers);
    let model = model.clone();
    let seed = cfg.seed;
    let blocks_ref = &blocks;
    let results = exec.run_blocks(blocks.len() as u32, &move |b| -> Result<MeanAcc> {
        let mut rng = substream(seed, "goldie", 0, b as u64);
        let mut acc = MeanAcc::default();
        for _ in 0..blocks_ref[b as usize] {
            let mut y = 0.0f64;
            for _ in 0..FIXED_POINT_BURN_IN {
                y = model.sample(&mut rng) * y + 1.0;
            }
            if !y.is_finite() {
                return Err(Error::Convergence(
                    "fixed-point burn-in diverged; drift is not negative enough".into(),
                ));
            }
            let xy = model.sample(&mut rng) * y;
            acc.push((xy + 1.0).powf(alpha) - xy.powf(alpha));
        }
        Ok(acc)
    });
    let mut merged = MeanAcc::default();
    for r in results {
        merged = merged.merge(r?);
    }
    Ok(TiltedEstimate {
        value: merged.mean(),
        std_error: merged.std_error(),
        n_samples: merged.n,
        remainder_bound: 0.0,
        per_n: None,
    })
}
