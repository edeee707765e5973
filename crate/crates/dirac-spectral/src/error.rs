use thiserror::Error;

/// Library-wide error type. Configuration problems are kept separate from
/// numerical failures so a driver can map them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: operands live on different grids")]
    DistinctGrids,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("spectral parameter Im λ = {tau} outside the {half_plane} half-plane band")]
    HalfPlaneDomain { tau: f64, half_plane: &'static str },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {last_update:.3e})")]
    PicardDivergence { iterations: usize, last_update: f64 },

    #[error("pairing mismatch: {0}")]
    PairingMismatch(String),

    #[error("sweep input invalid: {0}")]
    InvalidSweep(String),

    #[error("boundary conditions are rank-deficient (σ_min = {sigma_min:.3e})")]
    RankDeficientBc { sigma_min: f64 },

    #[error("winding number unstable on contour: {total:.4} is not near an integer")]
    ContourUnstable { total: f64 },

    #[error("contour passes too close to a zero after {attempts} nudge attempts")]
    ContourNearZero { attempts: usize },

    #[error("eigenvalue λ = {lambda} is degenerate (multiplicity {multiplicity}); associated functions are out of scope")]
    DegenerateEigenvalue { lambda: crate::Complex, multiplicity: u32 },

    #[error("λ = {lambda} is not an eigenvalue: boundary singular value ratio {ratio:.3e}")]
    NotAnEigenvalue { lambda: crate::Complex, ratio: f64 },

    #[error("near-degenerate pairing: |⟨y,z⟩| = {ratio:.3e} of ‖y‖‖z‖; possible associated functions")]
    NearDegeneratePairing { ratio: f64 },

    #[error("record for λ = {lambda} is not biorthogonally normalized")]
    NotNormalized { lambda: crate::Complex },

    #[error("pair cannot be normalized: ⟨y,z⟩ = 0")]
    NonNormalizablePair,

    #[error("overflow: magnitude exp({log_value:.1}) is not representable in linear scale")]
    Unrepresentable { log_value: f64 },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}:{line}: {message}")]
    CsvFormat { path: String, line: u64, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by bad input files or parameters, as opposed to
    /// numerical breakdown at runtime.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::CsvFormat { .. }
                | Error::InvalidGrid(_)
                | Error::RankDeficientBc { .. }
                | Error::InvalidSweep(_)
        )
    }
}
