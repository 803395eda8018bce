use std::path::PathBuf;

use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("expected {expected} S-matrix values but the file holds {found}")]
    Truncated { expected: usize, found: usize },

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular point at J = {at}: {message}")]
    Singularity { at: f64, message: String },

    #[error(
        "interpolation system is numerically singular (condition estimate {estimate:.3e}); \
         retry with multi_precision = true"
    )]
    Conditioning { estimate: f64 },

    #[error("root finder did not converge for a polynomial of degree {degree}")]
    RootFinding { degree: usize },

    #[error("evaluation point lies {distance:.3e} from a pole")]
    Proximity { distance: f64 },

    #[error("pole {index} is within {distance:.3e} of another pole; residue undefined")]
    Degeneracy { index: usize, distance: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("decomposition undefined at the endpoint theta = {theta}")]
    Endpoint { theta: f64 },

    #[error(
        "|S(lambda)| does not decay below {tail_eps:e} up to lambda = {cap}; \
         the data lacks a reactive cutoff"
    )]
    Decay { tail_eps: f64, cap: f64 },

    #[error("resonance denominator vanishes at lambda = {lambda}")]
    ResonanceDenominator { lambda: Complex64 },

    #[error("{message}")]
    Selection {
        message: String,
        candidates: Vec<Complex64>,
    },

    #[error("no candidate poles at energy {energy} meV")]
    NoCandidates { energy: f64 },

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Truncated { .. }
                | Error::Validation(_)
                | Error::Config(_)
                | Error::Selection { .. }
                | Error::NoCandidates { .. }
                | Error::Conflict(_)
                | Error::Io { .. }
        )
    }

    /// Short machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Truncated { .. } => "truncated",
            Error::Validation(_) => "validation",
            Error::Config(_) => "config",
            Error::Singularity { .. } => "singularity",
            Error::Conditioning { .. } => "conditioning",
            Error::RootFinding { .. } => "root_finding",
            Error::Proximity { .. } => "proximity",
            Error::Degeneracy { .. } => "degeneracy",
            Error::Domain(_) => "domain",
            Error::Endpoint { .. } => "endpoint",
            Error::Decay { .. } => "decay",
            Error::ResonanceDenominator { .. } => "resonance_denominator",
            Error::Selection { .. } => "selection",
            Error::NoCandidates { .. } => "no_candidates",
            Error::Conflict(_) => "conflict",
            Error::Io { .. } => "io",
        }
    }
}
