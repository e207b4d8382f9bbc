use thiserror::Error;

/// Errors raised by the kernel, quadrature and certification routines.
#[derive(Debug, Error)]
pub enum BergmanError {
    #[error("point ({re}, {im}) is outside the domain: {reason}")]
    OutsideDomain { re: f64, im: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("element has a pole inside the integration region (hole {hole})")]
    PoleInRegion { hole: usize },

    #[error("backends disagree: spectral = {spectral}, quad2d = {quad2d} (relative {relative:.3e})")]
    BackendDisagreement {
        spectral: String,
        quad2d: String,
        relative: f64,
    },

    #[error("gram matrix is indefinite: pivot {pivot:.3e} relative to scale {scale:.3e}")]
    Indefinite { pivot: f64, scale: f64 },

    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),

    #[error("reconstruction residual {residual:.3e} exceeds threshold {threshold:.3e}")]
    Residual { residual: f64, threshold: f64 },

    #[error("degenerate point: kernel value {0:e} too small for the metric")]
    Degenerate(f64),

    #[error("path leaves the domain on segment {segment}")]
    PathExitsDomain { segment: usize },

    #[error("mesh is disconnected at level {level}; refine the mesh")]
    Disconnected { level: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, BergmanError>;
