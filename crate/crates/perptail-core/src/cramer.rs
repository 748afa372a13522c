//! Solving `h(α) = E|X|^α = 1` for the Cramér exponent and packaging the
//! tail parameters derived from it.

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use crate::error::{Error, Result};
use crate::factor::FactorModel;
use alloc::format;

/// The Cramér exponent together with every derived tail parameter.
///
/// For signed factors the stopped-product chain replaces the factor chain:
/// blocks end when the running product sign returns to positive, which
/// doubles the drift (`m̃ = 2m`) and inflates the variance by the block-length
/// spread (`σ̃² = 2σ² + 2(p/q)m²`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CramerSolution {
    pub alpha: f64,
    /// `m(α) = E[|X|^α log|X|]`, in nats
    pub m_alpha: f64,
    /// variance of `log|X|` under the α-tilted law
    pub sigma2_alpha: f64,
    /// `E[log|X|]`
    pub drift: f64,
    /// `P(X < 0) > 0`
    pub signed: bool,
    /// drift of the stopped-product chain under the tilted law
    pub m_tilde: f64,
    /// variance of the stopped-product chain under the tilted law
    pub sigma2_tilde: f64,
    /// `2/m(α)` unsigned, `1/m(α)` signed
    pub leading_constant: f64,
    /// `P(X < 0)`
    pub prob_negative: f64,
}

/// Diagnostic flags for the classical tail-theorem hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConditionReport {
    /// `E[|X|^α (log|X|)²] < ∞` (always true for the built-in families inside
    /// their finiteness interval)
    pub second_log_moment_finite: bool,
    /// `log|X|` supported on a lattice `a·Z`
    pub arithmetic: bool,
    /// lattice span when arithmetic
    pub lattice_span: Option<f64>,
    /// `X` a.s. constant or `|X| ≡ 1`: the fixed-point equation degenerates
    pub degenerate_fixed_point: bool,
    pub signed: bool,
}

const H_TOL: f64 = 1e-12;

fn ln_h(model: &FactorModel, s: f64) -> Result<f64> {
    Ok(model.h(s)?.ln())
}

/// Solve `h(α) = 1` for the positive Cramér root.
///
/// Brackets by doubling `s` from 1e-3 (capped geometrically at the domain
/// boundary) until `log h > 0`, bisects `log h` on the bracket, then polishes
/// with one secant step. `bracket_hint` overrides auto-bracketing, which is
/// useful next to a finiteness-boundary pole.
pub fn solve_alpha(
    model: &FactorModel,
    bracket_hint: Option<(f64, f64)>,
) -> Result<CramerSolution> {
    model.validate()?;
    let (_, hi_bound) = model.finiteness_interval();

    let (mut lo, mut hi) = match bracket_hint {
        Some((lo, hi)) => {
            if !(lo >= 0.0 && hi > lo) {
                return Err(Error::BracketFailure(format!(
                    "bracket hint must satisfy 0 <= lo < hi (got {lo}, {hi})"
                )));
            }
            if ln_h(model, lo)? > 0.0 || ln_h(model, hi)? <= 0.0 {
                return Err(Error::BracketFailure(format!(
                    "log h does not change sign on the hinted bracket [{lo}, {hi}]"
                )));
            }
            (lo, hi)
        }
        None => auto_bracket(model, hi_bound)?,
    };

    // bisection on the log-convex log h: single sign change right of the minimizer
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ln_h(model, mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // one secant polish across the residual bracket
    let (fl, fh) = (ln_h(model, lo)?, ln_h(model, hi)?);
    let mut alpha = if fh != fl {
        lo - fl * (hi - lo) / (fh - fl)
    } else {
        0.5 * (lo + hi)
    };
    if !alpha.is_finite() || alpha <= 0.0 {
        alpha = 0.5 * (lo + hi);
    }

    let h_res = model.h(alpha)?;
    if (h_res - 1.0).abs() > H_TOL {
        return Err(Error::Convergence(format!(
            "|h(alpha) - 1| = {:.3e} exceeds {H_TOL:.0e} at alpha = {alpha}",
            (h_res - 1.0).abs()
        )));
    }

    let m_alpha = model.m(alpha)?;
    if !(m_alpha > 0.0) {
        return Err(Error::Convergence(format!(
            "m(alpha) = {m_alpha} not positive at the root; bracket landed left of the minimizer"
        )));
    }
    let sigma2_alpha = model.sigma2(alpha)?;
    let drift = model.drift();
    let q = model.prob_negative();
    let signed = q > 0.0;
    let p = 1.0 - q;
    let (m_tilde, sigma2_tilde, leading_constant) = if signed {
        (
            2.0 * m_alpha,
            2.0 * sigma2_alpha + 2.0 * (p / q) * m_alpha * m_alpha,
            1.0 / m_alpha,
        )
    } else {
        (m_alpha, sigma2_alpha, 2.0 / m_alpha)
    };

    Ok(CramerSolution {
        alpha,
        m_alpha,
        sigma2_alpha,
        drift,
        signed,
        m_tilde,
        sigma2_tilde,
        leading_constant,
        prob_negative: q,
    })
}

fn auto_bracket(model: &FactorModel, hi_bound: f64) -> Result<(f64, f64)> {
    let mut s = 1e-3;
    let mut prev = 0.0;
    // log h(0+) < 0 because the drift is negative
    for _ in 0..4000 {
        let next = if s * 2.0 < hi_bound {
            s * 2.0
        } else {
            // approach a finite boundary geometrically
            let step = 0.5 * (hi_bound - s);
            if step <= hi_bound * 1e-12 {
                return Err(Error::BoundaryRoot(format!(
                    "log h is still nonpositive within {:.1e} of the finiteness boundary {hi_bound}",
                    hi_bound - s
                )));
            }
            s + step
        };
        prev = s;
        s = next;
        if ln_h(model, s)? > 0.0 {
            return Ok((prev, s));
        }
        if s > 1e9 {
            return Err(Error::NoCramerRoot(format!(
                "log h stays nonpositive up to s = {s:.3e}; |X| <= 1 a.s. or too light-tailed"
            )));
        }
    }
    Err(Error::NoCramerRoot(format!(
        "no sign change of h - 1 found (last bracket [{prev}, {s}])"
    )))
}

/// Report the classical tail-theorem hypotheses for a solved model.
pub fn check_conditions(model: &FactorModel, sol: &CramerSolution) -> ConditionReport {
    let (arithmetic, lattice_span) = lattice_structure(model);
    ConditionReport {
        second_log_moment_finite: true,
        arithmetic,
        lattice_span,
        degenerate_fixed_point: degenerate(model),
        signed: sol.signed,
    }
}

fn magnitude_atoms(model: &FactorModel) -> Option<(f64, f64)> {
    match model {
        FactorModel::TwoPoint { a, b, .. } => Some((a.abs(), b.abs())),
        FactorModel::SignedMixture { base, .. } => magnitude_atoms(base),
        _ => None,
    }
}

fn lattice_structure(model: &FactorModel) -> (bool, Option<f64>) {
    let Some((ma, mb)) = magnitude_atoms(model) else {
        return (false, None); // continuous log-support
    };
    let (la, lb) = (ma.ln(), mb.ln());
    if la == 0.0 && lb == 0.0 {
        return (true, None); // |X| ≡ 1: support {0}, span undefined
    }
    if la == 0.0 {
        return (true, Some(lb.abs()));
    }
    if lb == 0.0 {
        return (true, Some(la.abs()));
    }
    // span d with la = p·d, lb = q·d requires la/lb rational; demand a
    // near-machine-precision hit at small denominator, otherwise any
    // irrational ratio would pass via its continued-fraction convergents
    if let Some((p, _q)) = rational_approx(la / lb, 10_000, 1e-12) {
        if p != 0 {
            return (true, Some((la / p as f64).abs()));
        }
    }
    (false, None)
}

/// Continued-fraction rational approximation of `x` with bounded denominator.
fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let mut a = x.floor();
    let (mut h0, mut h1) = (1i64, a as i64);
    let (mut k0, mut k1) = (0i64, 1i64);
    let mut frac = x - a;
    for _ in 0..64 {
        if (x - h1 as f64 / k1 as f64).abs() <= tol * x.abs().max(1.0) {
            return Some((h1, k1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        a = inv.floor();
        frac = inv - a;
        let h2 = (a as i64).checked_mul(h1)?.checked_add(h0)?;
        let k2 = (a as i64).checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    if (x - h1 as f64 / k1 as f64).abs() <= tol * x.abs().max(1.0) {
        Some((h1, k1))
    } else {
        None
    }
}

fn degenerate(model: &FactorModel) -> bool {
    match model {
        FactorModel::TwoPoint { a, b, p_a } => {
            a == b || *p_a == 0.0 || *p_a == 1.0 || (a.abs() == 1.0 && b.abs() == 1.0)
        }
        FactorModel::SignedMixture { base, .. } => degenerate(base),
        _ => false,
    }
}
