use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("total weight is zero")]
    ZeroWeight,

    #[error("vector {index} is zero or linearly dependent on the previous ones")]
    DependentVector { index: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid effect: {0}")]
    InvalidEffect(String),

    #[error("malformed POM: {0}")]
    MalformedPom(String),

    #[error("POM has no effects")]
    EmptyPom,

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("W_{block}({point}) is not an isometry (defect {defect:.3e})")]
    NotAnIsometry { block: usize, point: usize, defect: f64 },

    #[error("operator is not unitary (defect {defect:.3e}): {context}")]
    NotUnitary { context: String, defect: f64 },

    #[error("density alpha_{block} vanishes at dual point {point} where the block has weight")]
    VanishingDensity { block: usize, point: usize },

    #[error("function is not H-equivariant (defect {0:.3e})")]
    NotEquivariant(f64),

    #[error("cell labels are not closed under the group action (element {element}, cell {cell})")]
    ActionNotClosed { element: usize, cell: usize },

    #[error("degenerate interval [{0}, {1})")]
    DegenerateInterval(f64, f64),

    #[error("partition is trivial: {0}")]
    TrivialPartition(String),

    #[error("partition cells overlap: {0}")]
    OverlappingCells(String),

    #[error("set lies outside the grid window: {0}")]
    OutsideGrid(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("window leakage {leakage:.3e} exceeds {limit:.1e}")]
    WindowLeakage { leakage: f64, limit: f64 },

    #[error("quadrature order must be at least 2, got {0}")]
    QuadratureOrder(usize),

    #[error("trace defect {0:.3e} exceeds tolerance")]
    TraceDefect(f64),

    #[error("invalid probability measure: {0}")]
    InvalidMeasure(String),

    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("support threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),

    #[error("second moments are not finite on the window (leakage {0:.3e})")]
    NonFiniteMoments(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
