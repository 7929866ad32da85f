//! Special functions: gamma helpers, the generalized Wright function and the
//! Mittag-Leffler family.
//!
//! Every series is summed from log-space terms (see [`sum_log_terms`]), so gamma
//! poles in a denominator contribute exact zeros and large arguments do not overflow.

mod gamma;
pub mod mittag_leffler;
mod quadrature;
mod series;
mod wright;

pub use gamma::{log_gamma, log_gamma_ratio, log_gamma_signed, log_pochhammer, pochhammer, reciprocal_gamma, LogGamma, POLE_TOLERANCE};
pub use mittag_leffler::{mittag_leffler, mittag_leffler2, mittag_leffler3};
pub use series::{sum_log_terms, Evaluation, SeriesControl, SeriesResult, Term};
pub use wright::{wright_convergence_index, wright_series, GammaPair, WrightSpec};
