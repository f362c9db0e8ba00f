use thiserror::Error;

use crate::layout::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // field
    #[error("extension degree {0} out of range (1..=16)")]
    FieldDegree(u32),
    #[error("{0} is not a supported prime modulus (must be prime, 2 < p <= 65537)")]
    PrimeModulus(u32),
    #[error("field table check failed: {0}")]
    FieldTable(String),
    #[error("value {value} is not an element of a field of size {q}")]
    NotInField { value: u32, q: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("zero raised to negative power {0}")]
    ZeroNegativePower(i64),
    #[error("no element of order {u}: {u} does not divide q-1 = {q_minus_1}")]
    OrderNotDivisor { u: u32, q_minus_1: u32 },

    // linear algebra
    #[error("interpolation points are not pairwise distinct")]
    DuplicatePoints,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,

    // parameters
    #[error("rack size u = {0} must be at least 2")]
    RackSize(usize),
    #[error("rack size u = {u} does not divide n = {n}")]
    RackDivisibility { n: usize, u: usize },
    #[error("k = {k} must satisfy u <= k < n (u = {u}, n = {n})")]
    ThresholdRange { n: usize, k: usize, u: usize },
    #[error("helper racks d = {d} below k_bar = {k_bar}")]
    HelperRacksTooFew { d: usize, k_bar: usize },
    #[error("helper racks d = {d} exceeds n_bar - 1 = {max}")]
    HelperRacksTooMany { d: usize, max: usize },
    #[error("field of size {q} unsuitable: need u = {u} | q-1 and q > n = {n}")]
    FieldUnsuitable { q: u32, u: usize, n: usize },
    #[error("no supported field satisfies u = {u} | q-1 and q > n = {n}")]
    NoField { n: usize, u: usize },

    // geometry
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("rack {0} out of range")]
    RackOutOfRange(usize),
    #[error("row {0} out of range")]
    RowOutOfRange(usize),
    #[error("wrong data length: expected {expected} symbols, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("message matrix structure violated at row {row}, column {col}")]
    MessageStructure { row: usize, col: usize },

    // reconstruction
    #[error("expected {expected} columns, got {got}")]
    ColumnCount { expected: usize, got: usize },
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("column of node {0} has wrong symbol count")]
    SymbolCount(NodeId),
    #[error("integrity check failed: observed symbols are not a codeword")]
    Integrity,

    // repair
    #[error("helper rack {0} is the target rack")]
    HelperIsTarget(usize),
    #[error("duplicate helper rack {0}")]
    DuplicateHelper(usize),
    #[error("expected {expected} helper racks, got {got}")]
    HelperCount { expected: usize, got: usize },
    #[error("rack {rack} is missing column of node {missing}")]
    MissingRackColumn { rack: usize, missing: NodeId },
    #[error("leading vector belongs to rack {got}, expected rack {expected}")]
    RackMismatch { expected: usize, got: usize },
    #[error("rack {rack} has more than one failed node")]
    MultipleFailuresInRack { rack: usize },
    #[error("helper rack {0} is not fully healthy")]
    HelperRackUnhealthy(usize),
    #[error("repair consumed {got} cross-rack symbols, expected {expected}")]
    Bandwidth { expected: usize, got: usize },

    // cluster
    #[error("node {0} is unavailable")]
    NodeUnavailable(NodeId),
    #[error("node {0} has already failed")]
    AlreadyFailed(NodeId),
    #[error("node {0} is not failed")]
    NotFailed(NodeId),
    #[error("insufficient survivors: {healthy} healthy nodes, need {k}")]
    InsufficientSurvivors { healthy: usize, k: usize },
}
