//! Factor distributions: the law of a single discount factor `X`, its moment
//! transform `h(s) = E|X|^s`, the derived quantities `m(s)`, `σ²(s)`, and
//! plain/tilted sampling.
//!
//! Tilting by `e^{s·log|X|}` has a closed form in every built-in family:
//! log-normal shifts its mean, a gamma factor shifts its shape, a log-gamma
//! factor shifts the rate of its log, and a two-point law reweights atoms.

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use crate::error::{Error, Result};
use crate::special::{digamma, trigamma};
use alloc::boxed::Box;
use alloc::format;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma as GammaDist, StandardNormal};

/// A single factor law. All moment quantities refer to `|X|`; sign structure
/// is carried separately so signed models reuse the magnitude closed forms.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum FactorModel {
    /// `log X ~ N(mu, sigma²)`, `X > 0`.
    LogNormal {
        mu: f64,
        #[cfg_attr(feature = "serde", serde(alias = "s"))]
        sigma: f64,
    },
    /// `X ~ Gamma(shape gamma, rate beta)`, density `β^γ x^{γ-1} e^{-βx}/Γ(γ)`.
    GammaFactor { gamma: f64, beta: f64 },
    /// `X = e^{Z - mu}` with `Z ~ Gamma(gamma, beta)`.
    LogGamma { gamma: f64, beta: f64, mu: f64 },
    /// Flip the sign of a base draw with probability `q`.
    SignedMixture { base: Box<FactorModel>, q: f64 },
    /// `X = a` with probability `p_a`, else `X = b`.
    TwoPoint { a: f64, b: f64, p_a: f64 },
}

/// One sampled factor (or factor product) in log-magnitude/sign form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDraw {
    pub log_mag: f64,
    pub negative: bool,
}

impl LogDraw {
    #[inline]
    pub fn value(self) -> f64 {
        let v = self.log_mag.exp();
        if self.negative {
            -v
        } else {
            v
        }
    }
}

/// Moment transform snapshot at one exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MomentReport {
    pub s: f64,
    /// `h(s) = E|X|^s`
    pub h: f64,
    /// `m(s) = E[|X|^s log|X|]` (unnormalized derivative of `h`)
    pub m: f64,
    /// variance of `log|X|` under the `s`-tilted law
    pub sigma2: f64,
}

impl FactorModel {
    /// Checks the construction invariants: parameter ranges and negative drift.
    pub fn validate(&self) -> Result<()> {
        match self {
            FactorModel::LogNormal { sigma, .. } => {
                if !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "log-normal sigma must be positive (got {sigma})"
                    )));
                }
            }
            FactorModel::GammaFactor { gamma, beta } => {
                if !(gamma.is_finite() && beta.is_finite()) || *gamma <= 0.0 || *beta <= 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "gamma factor requires gamma > 0 and beta > 0 (got {gamma}, {beta})"
                    )));
                }
            }
            FactorModel::LogGamma { gamma, beta, mu } => {
                if !(gamma.is_finite() && beta.is_finite() && mu.is_finite())
                    || *gamma <= 0.0
                    || *beta <= 0.0
                    || *mu <= 0.0
                {
                    return Err(Error::InvalidModel(format!(
                        "log-gamma requires gamma, beta, mu > 0 (got {gamma}, {beta}, {mu})"
                    )));
                }
            }
            FactorModel::SignedMixture { base, q } => {
                if !(*q > 0.0 && *q < 1.0) {
                    return Err(Error::InvalidModel(format!(
                        "sign-flip probability must lie strictly in (0,1) (got {q})"
                    )));
                }
                base.validate()?;
            }
            FactorModel::TwoPoint { a, b, p_a } => {
                if *a == 0.0 || *b == 0.0 || !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "two-point atoms must be nonzero finite reals (got {a}, {b})"
                    )));
                }
                if !(*p_a >= 0.0 && *p_a <= 1.0) {
                    return Err(Error::InvalidModel(format!(
                        "atom probability must lie in [0,1] (got {p_a})"
                    )));
                }
            }
        }
        let drift = self.drift();
        if !(drift < 0.0) {
            return Err(Error::NonNegativeDrift { drift });
        }
        Ok(())
    }

    /// Open interval of exponents on which `h(s)` is finite.
    pub fn finiteness_interval(&self) -> (f64, f64) {
        match self {
            FactorModel::LogNormal { .. } | FactorModel::TwoPoint { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            FactorModel::GammaFactor { gamma, .. } => (-gamma, f64::INFINITY),
            FactorModel::LogGamma { beta, .. } => (f64::NEG_INFINITY, *beta),
            FactorModel::SignedMixture { base, .. } => base.finiteness_interval(),
        }
    }

    fn check_s(&self, s: f64) -> Result<()> {
        let (lo, hi) = self.finiteness_interval();
        if s <= lo {
            return Err(Error::Domain(format!(
                "h(s) diverges for s <= {lo} (requested s = {s})"
            )));
        }
        if s >= hi {
            return Err(Error::Domain(format!(
                "h(s) diverges for s >= {hi} (requested s = {s})"
            )));
        }
        Ok(())
    }

    /// Moment transform `h(s) = E|X|^s`, closed form per family.
    pub fn h(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        Ok(match self {
            FactorModel::LogNormal { mu, sigma } => (mu * s + 0.5 * s * s * sigma * sigma).exp(),
            FactorModel::GammaFactor { gamma, beta } => {
                (crate::special::ln_gamma(gamma + s) - crate::special::ln_gamma(*gamma)
                    - s * beta.ln())
                .exp()
            }
            FactorModel::LogGamma { gamma, beta, mu } => {
                (-s * mu - gamma * ((beta - s) / beta).ln()).exp()
            }
            FactorModel::SignedMixture { base, .. } => base.h(s)?,
            FactorModel::TwoPoint { a, b, p_a } => {
                p_a * (s * a.abs().ln()).exp() + (1.0 - p_a) * (s * b.abs().ln()).exp()
            }
        })
    }

    /// `m(s) = E[|X|^s log|X|] = h'(s)`, closed form per family.
    pub fn m(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        Ok(match self {
            FactorModel::LogNormal { mu, sigma } => self.h(s)? * (mu + s * sigma * sigma),
            FactorModel::GammaFactor { gamma, beta } => {
                self.h(s)? * (digamma(gamma + s) - beta.ln())
            }
            FactorModel::LogGamma { gamma, beta, mu } => self.h(s)? * (gamma / (beta - s) - mu),
            FactorModel::SignedMixture { base, .. } => base.m(s)?,
            FactorModel::TwoPoint { a, b, p_a } => {
                let (la, lb) = (a.abs().ln(), b.abs().ln());
                p_a * (s * la).exp() * la + (1.0 - p_a) * (s * lb).exp() * lb
            }
        })
    }

    /// Variance of `log|X|` under the `s`-tilted law; at the Cramér root
    /// (`h(α) = 1`) this equals `E[|X|^α (log|X|)²] − m(α)²`.
    pub fn sigma2(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        Ok(match self {
            FactorModel::LogNormal { sigma, .. } => sigma * sigma,
            FactorModel::GammaFactor { gamma, .. } => trigamma(gamma + s),
            FactorModel::LogGamma { gamma, beta, .. } => gamma / ((beta - s) * (beta - s)),
            FactorModel::SignedMixture { base, .. } => base.sigma2(s)?,
            FactorModel::TwoPoint { a, b, p_a } => {
                let (la, lb) = (a.abs().ln(), b.abs().ln());
                let h = self.h(s)?;
                let m = self.m(s)?;
                let e2 = p_a * (s * la).exp() * la * la + (1.0 - p_a) * (s * lb).exp() * lb * lb;
                (e2 / h - (m / h) * (m / h)).max(0.0)
            }
        })
    }

    /// `E[log|X|]`; negative for every valid model.
    pub fn drift(&self) -> f64 {
        match self {
            FactorModel::LogNormal { mu, .. } => *mu,
            FactorModel::GammaFactor { gamma, beta } => digamma(*gamma) - beta.ln(),
            FactorModel::LogGamma { gamma, beta, mu } => gamma / beta - mu,
            FactorModel::SignedMixture { base, .. } => base.drift(),
            FactorModel::TwoPoint { a, b, p_a } => {
                p_a * a.abs().ln() + (1.0 - p_a) * b.abs().ln()
            }
        }
    }

    pub fn moment_report(&self, s: f64) -> Result<MomentReport> {
        Ok(MomentReport {
            s,
            h: self.h(s)?,
            m: self.m(s)?,
            sigma2: self.sigma2(s)?,
        })
    }

    /// `P(X < 0)`.
    pub fn prob_negative(&self) -> f64 {
        match self {
            FactorModel::LogNormal { .. }
            | FactorModel::GammaFactor { .. }
            | FactorModel::LogGamma { .. } => 0.0,
            FactorModel::SignedMixture { base, q } => {
                let bn = base.prob_negative();
                q * (1.0 - bn) + (1.0 - q) * bn
            }
            FactorModel::TwoPoint { a, b, p_a } => {
                let mut p = 0.0;
                if *a < 0.0 {
                    p += p_a;
                }
                if *b < 0.0 {
                    p += 1.0 - p_a;
                }
                p
            }
        }
    }

    pub fn is_signed(&self) -> bool {
        self.prob_negative() > 0.0
    }

    /// Essential sup of `log|X|` when the support is bounded above.
    pub fn log_mag_upper_bound(&self) -> Option<f64> {
        match self {
            FactorModel::TwoPoint { a, b, p_a } => {
                let (la, lb) = (a.abs().ln(), b.abs().ln());
                if *p_a >= 1.0 {
                    Some(la)
                } else if *p_a <= 0.0 {
                    Some(lb)
                } else {
                    Some(la.max(lb))
                }
            }
            FactorModel::SignedMixture { base, .. } => base.log_mag_upper_bound(),
            _ => None,
        }
    }

    /// One draw of `X`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_log(rng).value()
    }

    /// One draw in log-magnitude/sign form.
    pub fn sample_log<R: Rng + ?Sized>(&self, rng: &mut R) -> LogDraw {
        match self {
            FactorModel::LogNormal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                LogDraw {
                    log_mag: mu + sigma * z,
                    negative: false,
                }
            }
            FactorModel::GammaFactor { gamma, beta } => {
                let g = GammaDist::new(*gamma, 1.0 / beta).expect("validated shape/scale");
                LogDraw {
                    log_mag: g.sample(rng).ln(),
                    negative: false,
                }
            }
            FactorModel::LogGamma { gamma, beta, mu } => {
                let g = GammaDist::new(*gamma, 1.0 / beta).expect("validated shape/scale");
                LogDraw {
                    log_mag: g.sample(rng) - mu,
                    negative: false,
                }
            }
            FactorModel::SignedMixture { base, q } => {
                let mut d = base.sample_log(rng);
                if rng.random::<f64>() < *q {
                    d.negative = !d.negative;
                }
                d
            }
            FactorModel::TwoPoint { a, b, p_a } => {
                let atom = if rng.random::<f64>() < *p_a { *a } else { *b };
                LogDraw {
                    log_mag: atom.abs().ln(),
                    negative: atom < 0.0,
                }
            }
        }
    }

    /// One draw of `X` under the exponentially tilted law
    /// `dP^α(log|X| ≤ y) ∝ e^{αy} dP(log|X| ≤ y)` (signs untouched).
    pub fn sample_tilted<R: Rng + ?Sized>(&self, alpha: f64, rng: &mut R) -> Result<f64> {
        Ok(self.sample_log_tilted(alpha, rng)?.value())
    }

    /// Tilted draw in log-magnitude/sign form. `alpha = 0` reproduces
    /// [`FactorModel::sample_log`] in distribution.
    pub fn sample_log_tilted<R: Rng + ?Sized>(&self, alpha: f64, rng: &mut R) -> Result<LogDraw> {
        self.check_s(alpha)?;
        Ok(match self {
            FactorModel::LogNormal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                LogDraw {
                    log_mag: mu + alpha * sigma * sigma + sigma * z,
                    negative: false,
                }
            }
            FactorModel::GammaFactor { gamma, beta } => {
                let g = GammaDist::new(gamma + alpha, 1.0 / beta)
                    .map_err(|_| Error::Domain(format!("tilted shape {} <= 0", gamma + alpha)))?;
                LogDraw {
                    log_mag: g.sample(rng).ln(),
                    negative: false,
                }
            }
            FactorModel::LogGamma { gamma, beta, mu } => {
                let g = GammaDist::new(*gamma, 1.0 / (beta - alpha))
                    .expect("rate positive inside finiteness interval");
                LogDraw {
                    log_mag: g.sample(rng) - mu,
                    negative: false,
                }
            }
            FactorModel::SignedMixture { base, q } => {
                // |X| ⟂ sign, so the tilt only moves the magnitude law
                let mut d = base.sample_log_tilted(alpha, rng)?;
                if rng.random::<f64>() < *q {
                    d.negative = !d.negative;
                }
                d
            }
            FactorModel::TwoPoint { a, b, p_a } => {
                let h = self.h(alpha)?;
                let pa_tilted = p_a * (alpha * a.abs().ln()).exp() / h;
                let atom = if rng.random::<f64>() < pa_tilted { *a } else { *b };
                LogDraw {
                    log_mag: atom.abs().ln(),
                    negative: atom < 0.0,
                }
            }
        })
    }

    /// Draw the log-magnitude/sign of a product of `n` fresh iid factors.
    ///
    /// Uses the exact row law where the n-fold convolution is closed
    /// (log-normal, log-gamma, two-point, and sign parity for mixtures);
    /// otherwise falls back to `n` per-factor draws. Distribution is
    /// identical either way. Hot loops should build a [`RowSampler`] once
    /// instead of calling this repeatedly.
    pub fn log_product_n<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> LogDraw {
        self.row_sampler(n).sample(rng)
    }

    /// Tilted analog of [`FactorModel::log_product_n`]: every factor tilted by `α`.
    pub fn log_product_n_tilted<R: Rng + ?Sized>(
        &self,
        n: u64,
        alpha: f64,
        rng: &mut R,
    ) -> Result<LogDraw> {
        Ok(self.row_sampler_tilted(n, alpha)?.sample(rng))
    }
}

/// A reusable sampler for the log-magnitude/sign of an `n`-factor row
/// product. Building one hoists the distribution setup (binomial tables,
/// gamma constants) out of hot Monte Carlo loops; the law is identical to
/// the corresponding [`FactorModel::log_product_n`] call.
#[derive(Debug, Clone)]
pub struct RowSampler {
    kind: RowKind,
}

#[derive(Debug, Clone)]
enum RowKind {
    Normal { mean: f64, sd: f64 },
    GammaShift { dist: GammaDist<f64>, shift: f64 },
    Binom { dist: Binomial, a: f64, b: f64, n: u64 },
    LnGammaSum { dist: GammaDist<f64>, n: u64 },
    Signed { mag: Box<RowSampler>, p_odd: f64 },
}

impl RowSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LogDraw {
        match &self.kind {
            RowKind::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                LogDraw { log_mag: mean + sd * z, negative: false }
            }
            RowKind::GammaShift { dist, shift } => LogDraw {
                log_mag: dist.sample(rng) - shift,
                negative: false,
            },
            RowKind::Binom { dist, a, b, n } => {
                let k = dist.sample(rng);
                two_point_product(*a, *b, k, *n)
            }
            RowKind::LnGammaSum { dist, n } => {
                let mut s = 0.0;
                for _ in 0..*n {
                    s += dist.sample(rng).ln();
                }
                LogDraw { log_mag: s, negative: false }
            }
            RowKind::Signed { mag, p_odd } => {
                let d = mag.sample(rng);
                LogDraw {
                    log_mag: d.log_mag,
                    negative: d.negative ^ (rng.random::<f64>() < *p_odd),
                }
            }
        }
    }
}

impl FactorModel {
    /// Build a reusable sampler for plain `n`-factor row products.
    pub fn row_sampler(&self, n: u64) -> RowSampler {
        self.row_sampler_tilted(n, 0.0).expect("alpha = 0 is always in domain")
    }

    /// Build a reusable sampler for `α`-tilted `n`-factor row products.
    pub fn row_sampler_tilted(&self, n: u64, alpha: f64) -> Result<RowSampler> {
        self.check_s(alpha)?;
        let kind = match self {
            FactorModel::LogNormal { mu, sigma } => {
                let nf = n as f64;
                RowKind::Normal {
                    mean: nf * (mu + alpha * sigma * sigma),
                    sd: sigma * nf.sqrt(),
                }
            }
            FactorModel::LogGamma { gamma, beta, mu } => RowKind::GammaShift {
                dist: GammaDist::new(gamma * n as f64, 1.0 / (beta - alpha))
                    .expect("rate positive inside finiteness interval"),
                shift: mu * n as f64,
            },
            FactorModel::TwoPoint { a, b, p_a } => {
                let h = self.h(alpha)?;
                let pa_tilted = (p_a * (alpha * a.abs().ln()).exp() / h).clamp(0.0, 1.0);
                RowKind::Binom {
                    dist: Binomial::new(n, pa_tilted).expect("probability in range"),
                    a: *a,
                    b: *b,
                    n,
                }
            }
            FactorModel::SignedMixture { base, q } => RowKind::Signed {
                mag: Box::new(base.row_sampler_tilted(n, alpha)?),
                p_odd: 0.5 * (1.0 - (1.0 - 2.0 * q).powi(n as i32)),
            },
            FactorModel::GammaFactor { gamma, beta } => RowKind::LnGammaSum {
                dist: GammaDist::new(gamma + alpha, 1.0 / beta)
                    .map_err(|_| Error::Domain(format!("tilted shape {} <= 0", gamma + alpha)))?,
                n,
            },
        };
        Ok(RowSampler { kind })
    }
}

/// Log-magnitude/sign of `a^k b^{n-k}`, computed from the integer counts so
/// lattice models land on exact multiples of the span.
#[inline]
fn two_point_product(a: f64, b: f64, k: u64, n: u64) -> LogDraw {
    let (la, lb) = (a.abs().ln(), b.abs().ln());
    // reciprocal atoms (|a||b| = 1): single rounding onto the lattice
    let log_mag = if a.abs() * b.abs() == 1.0 {
        (2.0 * k as f64 - n as f64) * la
    } else {
        k as f64 * la + (n - k) as f64 * lb
    };
    let neg_a = a < 0.0 && k % 2 == 1;
    let neg_b = b < 0.0 && (n - k) % 2 == 1;
    LogDraw {
        log_mag,
        negative: neg_a ^ neg_b,
    }
}

/// The standing two-point test fixture `(a=2, b=1/2, p_a=1/3)` with `α = 1`.
pub fn two_point_fixture() -> FactorModel {
    FactorModel::TwoPoint {
        a: 2.0,
        b: 0.5,
        p_a: 1.0 / 3.0,
    }
}
