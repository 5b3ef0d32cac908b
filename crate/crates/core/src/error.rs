use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator count {m} outside supported range 1..={max}")]
    ModeCount { m: usize, max: usize },

    #[error("index {index} out of range 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("generator counts differ: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("density is not normalized (trace integral {0})")]
    UnnormalizedDensity(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("probe tensor is not totally antisymmetric (max deviation {0:e})")]
    NotAntisymmetric(f64),

    #[error("condition order {0} not supported (expected 1 or 2)")]
    UnsupportedOrder(usize),

    #[error("particle-number sector N={n} is empty for m={m}")]
    EmptySector { n: usize, m: usize },

    #[error("contraction relation needs N >= 2, got N={0}")]
    ContractionUndefined(usize),

    #[error("state has weight {0:e} outside the N-particle sector")]
    NotInSector(f64),

    #[error("1-pdm spectrum outside [0, 1]: eigenvalue {0}")]
    SpectrumOutOfRange(f64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
