use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid or inconsistent input parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate state: 1 + ε·sin2θ·cosφ = {0:e} is not positive")]
    DegenerateState(f64),

    #[error(
        "wave packets overlap too strongly (ε = {epsilon}); the antisymmetric \
         doublet state is undefined, increase the well separation"
    )]
    DegenerateOverlap { epsilon: f64 },

    #[error("doublet basis is degenerate at ε = {epsilon} but the state has antisymmetric content")]
    DegenerateBasis { epsilon: f64 },

    #[error("far-detuned model requires a nonzero detuning")]
    ZeroDetuning,

    #[error("quadrature error: {0}")]
    Quadrature(String),

    #[error("time-integral check refused: {steps} time steps exceeds the cap of {cap}")]
    CostGuard { steps: usize, cap: usize },

    #[error("visibility is undefined for an all-zero signal")]
    UndefinedVisibility,

    #[error("fitted fringe model is unphysical: {0}")]
    ModelViolation(String),

    #[error("fringe fit is rank deficient; the sampled Δk·d span is too narrow")]
    InsufficientSpan,

    #[error("only {0:.2} samples per fringe period; at least 8 are required")]
    InsufficientSampling(f64),
}

impl Error {
    /// True for errors caused by malformed input rather than by physics limits.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
