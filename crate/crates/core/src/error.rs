use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("radii must be strictly increasing and positive, got {0:?}")]
    InvalidRadii([f64; 4]),

    #[error("refinement level {requested} exceeds the maximum of {max}")]
    TooManyLevels { requested: u32, max: u32 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("tet {tet}: vertex index {index} out of range (mesh has {count} vertices)")]
    IndexOutOfRange { tet: usize, index: usize, count: usize },

    #[error("tet {tet}: region tag out of range ({tag}, expected 1..4)")]
    RegionOutOfRange { tet: usize, tag: i64 },

    #[error("tet {tet}: repeated vertex index")]
    RepeatedVertex { tet: usize },

    #[error("tet {tet}: vertex radii do not fit the band of region {region}")]
    RegionBand { tet: usize, region: u8 },

    #[error("degenerate tetrahedron (signed volume {volume:e})")]
    DegenerateTet { volume: f64 },

    #[error("non-manifold connectivity: face {face:?} is shared by {count} tets")]
    NonManifold { face: [usize; 3], count: usize },

    #[error("magnetic diffusivity must be positive, got {0}")]
    NonPositiveBeta(f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),

    #[error("missing boundary values: expected {expected}, got {found}")]
    MissingBoundaryValues { expected: usize, found: usize },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("non-finite magnetic energy at step {step} (t = {time})")]
    NonFiniteEnergy { step: usize, time: f64 },

    #[error("missing config key `{0}`")]
    MissingKey(String),

    #[error("config key `{key}`: {message}")]
    InvalidValue { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input (flags, config files).
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidRadii(_)
                | Error::Parse { .. }
                | Error::TooManyLevels { .. }
                | Error::MissingKey(_)
                | Error::InvalidValue { .. }
                | Error::NonPositiveBeta(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
