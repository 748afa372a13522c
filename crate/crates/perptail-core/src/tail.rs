//! Analytic and semi-analytic tail evaluations: the leading-order formula,
//! the normal-approximation sum, the exact incomplete-gamma series for
//! log-gamma factors, truncation horizons, and the Kesten comparison ratio.
//!
//! Everything is offered both at `x` and at `log x`; the log forms avoid the
//! float range limit and keep lattice thresholds exact.

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use crate::cramer::CramerSolution;
use crate::error::{Error, Result};
use crate::factor::FactorModel;
use crate::special::{ln_gamma_q, normal_cdf};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Truncation horizon `n_max = ⌊(1+ξ)·log x / m̃(α)⌋`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TruncationHorizon {
    pub xi: f64,
    pub n_max: u64,
}

/// Result of the exact truncated series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TiltedExact {
    pub value: f64,
    pub n_terms: u64,
    /// Markov remainder bound on the dropped terms (γ optimized over (0, α)).
    pub remainder_bound: f64,
}

/// `leading_constant · log x / x^α` for `x > 1`.
pub fn leading_tail(sol: &CramerSolution, x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("leading tail requires x > 1 (got {x})")));
    }
    leading_tail_at_log(sol, x.ln())
}

/// Same with `L = log x` supplied directly.
pub fn leading_tail_at_log(sol: &CramerSolution, log_x: f64) -> Result<f64> {
    if !(log_x > 0.0) {
        return Err(Error::Domain(format!(
            "leading tail requires log x > 0 (got {log_x})"
        )));
    }
    Ok(sol.leading_constant * log_x * (-sol.alpha * log_x).exp())
}

/// Normal-approximation sum
/// `2·x^{-α}·Σ_{n=1}^{⌊L/m̃⌋} Φ((L − n·m̃)/√(σ̃²·n))`,
/// over the stopped-product chain for signed models.
pub fn normal_approx_tail(sol: &CramerSolution, x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("normal approximation requires x > 1 (got {x})")));
    }
    normal_approx_tail_at_log(sol, x.ln())
}

pub fn normal_approx_tail_at_log(sol: &CramerSolution, log_x: f64) -> Result<f64> {
    if !(sol.sigma2_tilde > 0.0) {
        return Err(Error::Unsupported(
            "degenerate σ² = 0: the chain lives on a single point; use the exact lattice computation (brute_force_p)".into(),
        ));
    }
    if !(log_x >= sol.m_tilde) {
        return Err(Error::Domain(format!(
            "normal approximation needs at least one summand: log x >= m̃ = {} (got {log_x})",
            sol.m_tilde
        )));
    }
    let n_max = (log_x / sol.m_tilde).floor() as u64;
    let sd = sol.sigma2_tilde.sqrt();
    let mut sum = 0.0;
    for n in 1..=n_max {
        let nf = n as f64;
        sum += normal_cdf((log_x - nf * sol.m_tilde) / (sd * nf.sqrt()));
    }
    Ok(2.0 * (-sol.alpha * log_x).exp() * sum)
}

/// `⌊(1+ξ)·log x/m̃⌋`, the working horizon for tail sums and simulators.
pub fn horizon(sol: &CramerSolution, x: f64, xi: f64) -> Result<TruncationHorizon> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("horizon requires x > 1 (got {x})")));
    }
    Ok(horizon_at_log(sol, x.ln(), xi))
}

pub fn horizon_at_log(sol: &CramerSolution, log_x: f64, xi: f64) -> TruncationHorizon {
    let raw = (1.0 + xi) * log_x / sol.m_tilde;
    TruncationHorizon {
        xi,
        n_max: if raw.is_finite() && raw > 0.0 { raw.floor() as u64 } else { 0 },
    }
}

/// Exact truncated evaluation of `p(x) = Σ_n P(Π_n > x)` for log-gamma
/// factors: `Σ_{n=1}^{N} Q(nγ, β(log x + nμ))` with `Q` the regularized upper
/// incomplete gamma (the n-fold row sum of `Z` is `Gamma(nγ, β)`).
///
/// With `n_terms = None` the series is extended adaptively past
/// `g_{0.5}(x)` until additional terms stop mattering; an explicit `n_terms`
/// is honored and rejected with a truncation error if the remainder bound
/// exceeds 1% of the sum.
pub fn tilted_exact_tail(
    model: &FactorModel,
    sol: &CramerSolution,
    x: f64,
    n_terms: Option<u64>,
) -> Result<TiltedExact> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("exact tail requires x > 1 (got {x})")));
    }
    tilted_exact_tail_at_log(model, sol, x.ln(), n_terms)
}

pub fn tilted_exact_tail_at_log(
    model: &FactorModel,
    sol: &CramerSolution,
    log_x: f64,
    n_terms: Option<u64>,
) -> Result<TiltedExact> {
    let FactorModel::LogGamma { gamma, beta, mu } = model else {
        return Err(Error::Unsupported(
            "exact series evaluation needs a log-gamma factor (each row sum of logs is then a gamma law); \
             other families go through the tilted Monte Carlo estimator"
                .into(),
        ));
    };
    if !(log_x > 0.0) {
        return Err(Error::Domain(format!("exact tail requires log x > 0 (got {log_x})")));
    }

    let term = |n: u64| -> Result<f64> {
        let nf = n as f64;
        let lnq = ln_gamma_q(gamma * nf, beta * (log_x + nf * mu))?;
        Ok(if lnq < -745.0 { 0.0 } else { lnq.exp() })
    };

    let g0 = horizon_at_log(sol, log_x, 0.0).n_max.max(1);
    let g_half = horizon_at_log(sol, log_x, 0.5).n_max.max(1);

    let (sum, used) = match n_terms {
        Some(n_explicit) => {
            let mut sum = 0.0;
            for n in 1..=n_explicit {
                sum += term(n)?;
            }
            (sum, n_explicit)
        }
        None => {
            // extend past g_{0.5} until three consecutive terms are negligible
            let cap = (40 * g0).max(200);
            let mut sum = 0.0;
            let mut small_run = 0u32;
            let mut used = 0;
            for n in 1..=cap {
                let t = term(n)?;
                sum += t;
                used = n;
                if n >= g_half {
                    if t < 1e-6 * sum {
                        small_run += 1;
                        if small_run >= 3 {
                            break;
                        }
                    } else {
                        small_run = 0;
                    }
                }
            }
            (sum, used)
        }
    };

    let bound = markov_remainder_bound(model, sol.alpha, log_x, used)?;
    if n_terms.is_some() && !(bound <= 0.01 * sum) {
        return Err(Error::Truncation {
            bound,
            message: format!(
                "n_terms = {used} leaves a remainder bound above 1% of the sum {sum:.6e}; \
                 extend the series (g_0.5 = {g_half})"
            ),
        });
    }
    Ok(TiltedExact {
        value: sum,
        n_terms: used,
        remainder_bound: bound,
    })
}

/// Markov bound on `Σ_{n>N} P(Π_n > x)`: `min_γ e^{-γL} h(γ)^{N+1}/(1-h(γ))`
/// over a grid of tilts `γ ∈ (0, α)`.
pub fn markov_remainder_bound(
    model: &FactorModel,
    alpha: f64,
    log_x: f64,
    n_used: u64,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    const GRID: u32 = 48;
    for j in 1..=GRID {
        let g = alpha * j as f64 / (GRID + 1) as f64;
        let h = model.h(g)?;
        if h >= 1.0 {
            continue;
        }
        let ln_bound = -g * log_x + (n_used as f64 + 1.0) * h.ln() - (1.0 - h).ln();
        let b = if ln_bound < -745.0 { 0.0 } else { ln_bound.exp() };
        if b < best {
            best = b;
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Domain(
            "no tilt with h(γ) < 1 available for the remainder bound".into(),
        ))
    }
}

/// `2α·log x / kesten_constant`, the predicted ratio `P(Y>x)/P(Y'>x)`.
pub fn kesten_ratio(sol: &CramerSolution, kesten_constant_estimate: f64, x: f64) -> Result<f64> {
    if !(kesten_constant_estimate > 0.0) {
        return Err(Error::Domain(format!(
            "Kesten constant must be positive (got {kesten_constant_estimate})"
        )));
    }
    Ok(2.0 * sol.alpha * x.ln() / kesten_constant_estimate)
}

/// A grid of tail evaluations; the CSV/plot layer consumes this directly.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TailCurve {
    pub log_x: Vec<f64>,
    pub leading: Vec<f64>,
    pub normal_approx: Vec<f64>,
    pub tilted_exact: Option<Vec<f64>>,
    /// provenance of each column, in column order
    pub labels: Vec<String>,
}

impl TailCurve {
    pub fn is_empty(&self) -> bool {
        self.log_x.is_empty()
    }

    pub fn ratio_normal(&self) -> Vec<f64> {
        self.normal_approx
            .iter()
            .zip(&self.leading)
            .map(|(n, l)| n / l)
            .collect()
    }

    pub fn ratio_tilted(&self) -> Option<Vec<f64>> {
        self.tilted_exact
            .as_ref()
            .map(|t| t.iter().zip(&self.leading).map(|(v, l)| v / l).collect())
    }
}

/// Log-uniform grid in `log x` (`points_per_decade` per factor of 10),
/// with the three standard columns. The exact series column is filled only
/// for log-gamma factors when `include_tilted` is set.
pub fn tail_curve(
    model: &FactorModel,
    sol: &CramerSolution,
    log_x_min: f64,
    log_x_max: f64,
    points_per_decade: u32,
    include_tilted: bool,
) -> Result<TailCurve> {
    if !(log_x_min > 0.0 && log_x_max >= log_x_min) {
        return Err(Error::Domain(format!(
            "need 0 < logx_min <= logx_max (got {log_x_min}, {log_x_max})"
        )));
    }
    let ppd = points_per_decade.max(1) as f64;
    let mut grid = Vec::new();
    let decades = (log_x_max / log_x_min).ln() / core::f64::consts::LN_10;
    let steps = (decades * ppd).ceil() as u32;
    for k in 0..=steps {
        let l = log_x_min * 10f64.powf(k as f64 / ppd);
        grid.push(l.min(log_x_max));
    }
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut leading = Vec::with_capacity(grid.len());
    let mut normal = Vec::with_capacity(grid.len());
    let mut tilted: Option<Vec<f64>> = if include_tilted && matches!(model, FactorModel::LogGamma { .. })
    {
        Some(Vec::with_capacity(grid.len()))
    } else {
        None
    };
    for &l in &grid {
        leading.push(leading_tail_at_log(sol, l)?);
        normal.push(normal_approx_tail_at_log(sol, l)?);
        if let Some(t) = tilted.as_mut() {
            t.push(tilted_exact_tail_at_log(model, sol, l, None)?.value);
        }
    }
    let mut labels = alloc::vec![
        String::from("leading: leading_constant · log x · x^-alpha"),
        String::from("normal_approx: 2 x^-alpha Σ Φ((log x − n m̃)/√(σ̃² n)), n ≤ ⌊log x/m̃⌋"),
    ];
    if tilted.is_some() {
        labels.push(String::from(
            "tilted_exact: Σ Q(nγ, β(log x + nμ)) over the adaptive horizon",
        ));
    }
    Ok(TailCurve {
        log_x: grid,
        leading,
        normal_approx: normal,
        tilted_exact: tilted,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cramer::solve_alpha;
    use crate::factor::two_point_fixture;

    fn lognormal_sol() -> CramerSolution {
        solve_alpha(&FactorModel::LogNormal { mu: -1.0, sigma: 1.0 }, None).unwrap()
    }

    fn loggamma() -> (FactorModel, CramerSolution) {
        let m = FactorModel::LogGamma { gamma: 4.0, beta: 1.0, mu: 5.0 };
        let sol = solve_alpha(&m, None).unwrap();
        (m, sol)
    }

    #[test]
    fn leading_values() {
        let sol = lognormal_sol();
        // x = e^10: 2·10/e^20
        let want = 20.0 * (-20.0f64).exp();
        assert!((leading_tail_at_log(&sol, 10.0).unwrap() - want).abs() < 1e-15 * want);
        // log x = 1: leading_constant · e^{-alpha}
        let at_e = leading_tail(&sol, core::f64::consts::E).unwrap();
        assert!((at_e - 2.0 * (-2.0f64).exp()).abs() < 1e-12);
        assert!(leading_tail(&sol, 1.0).is_err());
        assert!(leading_tail(&sol, 0.5).is_err());
    }

    #[test]
    fn signed_leading_halves() {
        let signed = solve_alpha(
            &FactorModel::SignedMixture {
                base: alloc::boxed::Box::new(FactorModel::LogNormal { mu: -1.0, sigma: 1.0 }),
                q: 0.3,
            },
            None,
        )
        .unwrap();
        let unsigned = lognormal_sol();
        let r = leading_tail_at_log(&signed, 9.0).unwrap() / leading_tail_at_log(&unsigned, 9.0).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn normal_approx_frozen_sum() {
        // LogNormal(-1): x = e^20 → 2 e^{-40} Σ_{n≤20} Φ((20−n)/√n); the Φ-sum
        // is 18.186403892534639 (frozen from 50-digit evaluation)
        let sol = lognormal_sol();
        let v = normal_approx_tail_at_log(&sol, 20.0).unwrap();
        let want = 2.0 * (-40.0f64).exp() * 18.186_403_892_534_64;
        assert!(((v - want) / want).abs() < 1e-12, "normal approx {v:e} vs {want:e}");
        // ratio to leading frozen as well
        let ratio = v / leading_tail_at_log(&sol, 20.0).unwrap();
        assert!((ratio - 0.909_320_194_626_732).abs() < 1e-12);
    }

    #[test]
    fn normal_approx_single_term() {
        // just above e^{m̃}: one summand 2 x^{-α} Φ((L−m̃)/σ̃)
        let sol = lognormal_sol();
        let l = 1.9; // m̃ = 1
        let v = normal_approx_tail_at_log(&sol, l).unwrap();
        let want = 2.0 * (-2.0 * l).exp() * crate::special::normal_cdf(0.9);
        assert!(((v - want) / want).abs() < 1e-13);
        assert!(normal_approx_tail_at_log(&sol, 0.99).is_err());
    }

    #[test]
    fn normal_approx_rejects_degenerate_variance() {
        let mut sol = lognormal_sol();
        sol.sigma2_tilde = 0.0;
        assert!(matches!(
            normal_approx_tail_at_log(&sol, 5.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn horizon_values() {
        let mut sol = lognormal_sol(); // m̃ = 1
        assert_eq!(horizon_at_log(&sol, 10.0, 0.0).n_max, 10);
        assert_eq!(horizon_at_log(&sol, 10.0, 0.2).n_max, 12);
        assert_eq!(horizon_at_log(&sol, 20.0, 0.0).n_max, 20);
        sol.m_tilde = 2.0;
        assert_eq!(horizon_at_log(&sol, 10.0, 0.0).n_max, 5);
        assert!(horizon(&sol, 0.5, 0.0).is_err());
    }

    #[test]
    fn exact_series_regression_values() {
        // frozen 50-digit reference sums at L=50: N=55 and N=73 terms
        let (m, sol) = loggamma();
        let t55 = tilted_exact_tail_at_log(&m, &sol, 50.0, Some(55));
        // explicit small horizon → remainder above 1% → truncation error
        assert!(matches!(t55, Err(Error::Truncation { .. })));
        // adaptive horizon reproduces a full-precision reference
        let adaptive = tilted_exact_tail_at_log(&m, &sol, 50.0, None).unwrap();
        let renewal = 1.0 / (sol.alpha * sol.m_alpha);
        let scaled = adaptive.value * (sol.alpha * 50.0).exp();
        assert!(
            ((scaled - renewal) / renewal).abs() < 1e-3,
            "x^a p = {scaled} vs renewal constant {renewal}"
        );
    }

    #[test]
    fn exact_series_partial_sums_match_reference() {
        // raw partial sums (no bound check) against frozen references
        let (_m, sol) = loggamma();
        let partial = |nmax: u64| -> f64 {
            let mut s = 0.0;
            for n in 1..=nmax {
                let lnq =
                    ln_gamma_q(4.0 * n as f64, 1.0 * (50.0 + 5.0 * n as f64)).unwrap();
                s += lnq.exp();
            }
            s
        };
        let p55 = partial(55);
        let p73 = partial(73);
        assert!(((p55 - 1.341_067_203_870_843_5e-8) / p55).abs() < 1e-9, "{p55:e}");
        assert!(((p73 - 1.614_681_584_976_099_3e-8) / p73).abs() < 1e-9, "{p73:e}");
        let _ = sol;
    }

    #[test]
    fn exact_series_self_consistency() {
        // adaptive horizon vs twice the horizon: below 0.1% relative
        let (m, sol) = loggamma();
        for l in [30.0, 60.0] {
            let a = tilted_exact_tail_at_log(&m, &sol, l, None).unwrap();
            let mut wide = 0.0;
            for n in 1..=(2 * a.n_terms) {
                wide += ln_gamma_q(4.0 * n as f64, l + 5.0 * n as f64).unwrap().exp();
            }
            assert!(
                ((wide - a.value) / wide).abs() < 1e-3,
                "L={l}: adaptive {} vs doubled {}",
                a.value,
                wide
            );
        }
    }

    #[test]
    fn exact_series_renewal_constant() {
        // x^α p(x) → 1/(α m) — the tail law the estimators are tested against
        let (m, sol) = loggamma();
        let renewal = 1.0 / (sol.alpha * sol.m_alpha);
        for l in [20.0, 50.0, 100.0] {
            let v = tilted_exact_tail_at_log(&m, &sol, l, None).unwrap();
            let scaled = v.value * (sol.alpha * l).exp();
            assert!(
                ((scaled - renewal) / renewal).abs() < 1e-3,
                "L={l}: {scaled} vs {renewal}"
            );
        }
    }

    #[test]
    fn exact_series_zero_terms_errors() {
        let (m, sol) = loggamma();
        assert!(matches!(
            tilted_exact_tail_at_log(&m, &sol, 30.0, Some(0)),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn exact_series_unsupported_family() {
        let sol = lognormal_sol();
        let gamma_model = FactorModel::GammaFactor { gamma: 4.0, beta: 9.0 };
        assert!(matches!(
            tilted_exact_tail_at_log(&gamma_model, &sol, 10.0, None),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn kesten_ratio_identities() {
        let sol = lognormal_sol();
        // log x = 1 → 2α/constant
        let v = kesten_ratio(&sol, 3.0, core::f64::consts::E).unwrap();
        assert!((v - 2.0 * 2.0 / 3.0).abs() < 1e-12);
        // value(x²)/value(x) = 2 exactly
        let x = 37.0;
        let r = kesten_ratio(&sol, 3.0, x * x).unwrap() / kesten_ratio(&sol, 3.0, x).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        assert!(kesten_ratio(&sol, -1.0, 10.0).is_err());
    }

    #[test]
    fn curve_columns_and_bounds() {
        let (m, sol) = loggamma();
        let curve = tail_curve(&m, &sol, 20.0, 100.0, 10, true).unwrap();
        assert!(!curve.is_empty());
        assert_eq!(curve.log_x.first().copied(), Some(20.0));
        assert!((curve.log_x.last().copied().unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(curve.labels.len(), 3);
        let tilted = curve.tilted_exact.as_ref().unwrap();
        assert_eq!(tilted.len(), curve.log_x.len());
        // all values nonnegative; leading eventually decreasing (x > e^{1/alpha})
        for i in 0..curve.log_x.len() {
            assert!(curve.leading[i] >= 0.0 && curve.normal_approx[i] >= 0.0 && tilted[i] >= 0.0);
            if i > 0 {
                assert!(curve.leading[i] < curve.leading[i - 1]);
            }
        }
        // per-term bound: normal_approx · x^α ≤ 2·g_0(x)
        for (i, &l) in curve.log_x.iter().enumerate() {
            let g0 = horizon_at_log(&sol, l, 0.0).n_max as f64;
            assert!(curve.normal_approx[i] * (sol.alpha * l).exp() <= 2.0 * g0 + 1e-12);
        }
        // normal_approx/leading approaches 1 from below as x grows
        let ratios = curve.ratio_normal();
        let first_dev = (ratios.first().unwrap() - 1.0).abs();
        let last_dev = (ratios.last().unwrap() - 1.0).abs();
        assert!(last_dev < first_dev, "trend: {first_dev} → {last_dev}");
    }

    #[test]
    fn two_point_curve_has_no_exact_column() {
        let m = two_point_fixture();
        let sol = solve_alpha(&m, None).unwrap();
        let curve = tail_curve(&m, &sol, 5.0, 20.0, 8, true).unwrap();
        assert!(curve.tilted_exact.is_none());
    }
}
