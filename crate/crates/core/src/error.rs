use thiserror::Error;

pub type Result<T> = std::result::Result<T, PslError>;

#[derive(Debug, Error)]
pub enum PslError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("points {0} and {1} are closer than the minimum separation ({2:e} A)")]
    OverlappingPoints(usize, usize, f64),
    #[error("non-finite coordinate on point {0}")]
    NonFiniteCoordinate(usize),
    #[error("duplicate point id {0}")]
    DuplicateId(usize),
    #[error("invalid bipartite partition: {0}")]
    InvalidPartition(String),
    #[error("{face:?} is not a face of {coface:?}")]
    NotAFace { face: Vec<usize>, coface: Vec<usize> },
    #[error("weighting function vanishes on simplex {0:?}")]
    ZeroF(Vec<usize>),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not symmetric (asymmetry {0:e})")]
    NonSymmetric(f64),
    #[error("instance too large for the dense oracle ({0} simplices, limit {1})")]
    InstanceTooLarge(usize, usize),
    #[error("malformed record on line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("residue {chain}:{seq} not found")]
    ResidueNotFound { chain: String, seq: i64 },
    #[error("residue {chain}:{seq} is {found} in the {which} structure, expected {expected}")]
    ResidueIdentityMismatch {
        which: &'static str,
        chain: String,
        seq: i64,
        expected: char,
        found: String,
    },
    #[error("expected {expected} grid points, got {got}")]
    GridMismatch { expected: usize, got: usize },
    #[error("invalid mutation '{0}': expected CHAIN:POS:WT:MT")]
    InvalidMutation(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PslError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            PslError::ZeroF(_) | PslError::NonSymmetric(_) | PslError::Numerical(_) => 3,
            PslError::ResidueIdentityMismatch { .. } | PslError::ResidueNotFound { .. } => 4,
            _ => 2,
        }
    }
}
