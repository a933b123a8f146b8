//! Special functions: the gamma family and generalized hypergeometric series.

mod gamma;
mod hypergeometric;

pub use gamma::{gamma, ln_gamma, pochhammer, rgamma, LnGamma};
pub use hypergeometric::{
    hyp_pfq, hyp_pfq_derivative, CompensatedSum, HypArgs, MonomialSeries, SeriesControl,
    SeriesResult, DEFAULT_TERM_BUDGET, DEFAULT_TOL, UNRELIABLE_CANCELLATION_DIGITS,
};
pub(crate) use hypergeometric::cancellation_digits;
