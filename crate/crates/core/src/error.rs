use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate interval: a = b = {0}")]
    DegenerateInterval(f64),

    #[error("quadrature rule needs at least 2 nodes, got {0}")]
    QuadratureDegree(usize),

    #[error("step size underflow at x = {last_x}, step {step:e}")]
    StepUnderflow { last_x: f64, step: f64 },

    #[error("non-finite right-hand side at x = {0}")]
    NonFiniteRhs(f64),

    #[error("root bracket [{a}, {b}] has no sign change: f(a) = {fa:e}, f(b) = {fb:e}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("band edges must contain an odd number (2N+1) of values, got {0}")]
    EvenEdgeCount(usize),

    #[error("band edges must be strictly increasing (violated at index {0})")]
    NonMonotoneEdges(usize),

    #[error("lowest band edge must be nonnegative, got {0}")]
    NegativeGroundEdge(f64),

    #[error("divisor point {mu} lies outside gap {gap} = [{lo}, {hi}]")]
    DivisorOutsideGap { gap: usize, mu: f64, lo: f64, hi: f64 },

    #[error("divisor has {got} entries but the band structure has {expected} gaps")]
    DivisorLength { got: usize, expected: usize },

    #[error("Dubrovin flow tolerance failure near gap {gap} at x = {x}")]
    FlowTolerance { gap: usize, x: f64 },

    #[error("spectral point {0} lies off the spectrum but a side tag was required")]
    OffSpectrum(f64),

    #[error("evaluation hit divisor pole mu_{gap} = {mu}")]
    DivisorPole { gap: usize, mu: f64 },

    #[error("potential samples must have strictly increasing abscissae (index {0})")]
    NonMonotoneSamples(usize),

    #[error("at least {need} potential samples required, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("{0} is not an eigenvalue: regularized Jost solution does not decay")]
    NotAnEigenvalue(f64),

    #[error("GLM direct solve singular at x = {0} and damped iteration diverged")]
    GlmDiverged(f64),

    #[error("GLM iteration exceeded {max_iter} iterations at x = {x} (ratio {ratio})")]
    GlmStalled { x: f64, max_iter: usize, ratio: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
