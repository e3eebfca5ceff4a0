use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A query violated its preconditions (bad parameter range, malformed set).
    #[error("invalid query: {0}")]
    InvalidQuery(String),

    /// Input data failed validation (bad distribution, malformed hypergraph).
    #[error("validation error: {0}")]
    Validation(String),

    /// Malformed input file or serialization payload.
    #[error("format error: {0}")]
    Format(String),

    /// The computation would exceed a configured resource cap.
    #[error("resource limit exceeded: required {required}, cap {cap}")]
    ResourceLimit { required: u128, cap: u128 },

    /// Internal LP solver failure. Must never occur on valid input.
    #[error("solver error: {0}")]
    Solver(String),

    /// A computed value exceeded a proved bound. Signals an implementation bug.
    #[error("falsifies proven bound — implementation bug: {0}")]
    ProvenBoundViolated(String),
}
