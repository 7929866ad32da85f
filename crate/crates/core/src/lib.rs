//! The Wright-type Poisson distribution.
//!
//! A count distribution with `P(X = r) ∝ m^r / Γ(αr + β)`, normalized by the
//! Prabhakar function `E^1_{α,β}(m)` (equivalently the Wright function
//! `1Ψ1[m | (1,1); (β,α)]`). At `α = β = 1` it is the classical Poisson law.
//!
//! - [`special`]: gamma helpers, Wright and Mittag-Leffler series
//! - [`distribution`]: pmf/cdf/quantile, moments by several routes, MGF, sampling
//! - [`estimation`]: count-data loading and maximum-likelihood fitting

pub mod distribution;
pub mod error;
pub mod estimation;
pub mod special;

pub use distribution::{MomentReport, SampleBatch, WrightPoisson};
pub use error::{Error, Result};
pub use estimation::{CountData, FitProfile, FitResult};

pub use special::{SeriesControl, SeriesResult};
