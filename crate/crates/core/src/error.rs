use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    #[error("eigenvalue iteration did not converge after {iterations} sweeps (condition estimate {condition:.3e})")]
    NoConvergence { iterations: usize, condition: f64 },

    #[error("singular propagator: eigenvalue modulus {modulus:.3e} below 1e-300")]
    SingularPropagator { modulus: f64 },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("ill-conditioned metric: condition number {0:.3e} exceeds 1e12")]
    IllConditioned(f64),

    #[error("eigenvalue on the logarithm branch cut at k = {k}")]
    BranchCut { k: f64 },

    #[error("gapless at k = {k}: |q| = {modulus:.3e}, winding undefined")]
    Gapless { k: f64, modulus: f64 },

    #[error("cutoff M = {cutoff} exceeds available harmonics P = {available}")]
    InsufficientHarmonics { cutoff: usize, available: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: column {0} has zero norm")]
    InvalidState(usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad input or configuration rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::InvalidInput(_)
                | Error::Config(_)
                | Error::UnsupportedParameters(_)
                | Error::InsufficientHarmonics { .. }
                | Error::Domain(_)
                | Error::Json(_)
                | Error::Io(_)
        )
    }
}
