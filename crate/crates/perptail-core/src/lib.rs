//! Tail analysis and rare-event estimation for stochastic perpetuities with
//! row-independent discount factors.
//!
//! The series under study is `Y = Σ_n Π_n` where row `n` multiplies `n` fresh
//! iid factors, `Π_n = X_{n1}·…·X_{nn}`. Under the Cramér condition
//! `E|X|^α = 1` the tail of `Y` is governed by the row-tail sum
//! `p(x) = Σ_n P(Π_n > x)`, which this crate computes analytically (closed
//! moment transforms, normal-approximation sums, exact incomplete-gamma sums
//! for log-gamma factors) and estimates by exponentially tilted Monte Carlo.
//! A matrix-product extension handles nonnegative `d×d` factor ensembles.
//!
//! The crate is `no_std`-compatible (with `alloc`); everything that needs an
//! operating system — threads, files, the CLI — lives in the companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > a)` guards are deliberate: they reject NaN, which `x <= a` lets through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// frozen reference constants keep their full published digits
#![allow(clippy::excessive_precision)]
// index loops read naturally in the small matrix kernels
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod cramer;
pub mod error;
pub mod factor;
pub mod mc;
mod math;
pub mod mv;
pub mod special;
pub mod stream;
pub mod tail;

pub use cramer::{check_conditions, solve_alpha, ConditionReport, CramerSolution};
pub use error::{Error, Result};
pub use factor::{FactorModel, LogDraw, MomentReport};
pub use mc::{SimulationConfig, TiltedEstimate, Truncation};
pub use mv::{EnsembleKind, Matrix, MatrixEnsemble, MatrixEntry, MultivariateCramer};
pub use stream::{substream, Executor, Serial};
pub use tail::{TailCurve, TruncationHorizon};
