use thiserror::Error;

/// Errors produced by every layer of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("matrix shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("operands belong to different groups")]
    GroupMismatch,

    #[error("{what} needs {needed} cells, over the cap of {cap} (raise --max-cells or SCENERY_MAX_CELLS)")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u64,
    },

    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("invalid representation data: {0}")]
    InvalidRepresentation(String),

    #[error("group {0:?} has no built-in representations; supply a representation file")]
    MissingRepresentations(String),

    #[error("invalid step distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid scenery: {0}")]
    InvalidScenery(String),

    #[error("tensor is not the multispectrum of any scenery: {0}")]
    InconsistentTensor(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
