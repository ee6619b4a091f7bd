use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// R = sqrt(G^2 + Delta^2) vanishes, so the analytic formulas are undefined.
    #[error("degenerate parameters: G = 0 and zero detuning give R = 0")]
    DegenerateParams,

    #[error("Bessel order {0} exceeds the supported maximum of {max}", max = crate::special::MAX_BESSEL_ORDER)]
    OrderTooLarge(u32),

    #[error("Bessel argument {0} is outside |x| <= {max}", max = crate::special::MAX_BESSEL_ARGUMENT)]
    ArgumentOutOfRange(f64),

    #[error("step size {step:e} fell below the minimum at t = {t}")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("non-finite state encountered at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    TooManySteps(usize),

    #[error("sample times must be finite, ascending and within [{t0}, {t1}]")]
    InvalidSampleTimes { t0: f64, t1: f64 },

    #[error("invalid time series: {0}")]
    InvalidTimeSeries(String),

    #[error("method not applicable: {0}")]
    NotApplicable(String),

    #[error("coefficient series not converged at n_max = {n_max}")]
    SeriesNotConverged { n_max: usize },

    #[error("resonance condition 4(omega K - delta)^2 > G^2 violated for K = {k}")]
    NoResonance { k: u32 },

    #[error("self-consistent resonance frequency did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("Fock window too small: boundary weight {weight:e} at t = {t}")]
    WindowLeak { t: f64, weight: f64 },

    #[error("Fock windows differ: [{0}, {1}] vs [{2}, {3}]")]
    WindowMismatch(usize, usize, usize, usize),
}
