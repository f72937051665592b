use thiserror::Error;

use crate::search::SearchTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("degenerate alphabet: cannot scale an all-zero signal set to power {0}")]
    DegenerateAlphabet(f64),

    #[error("degenerate quantizer extent {0}: extent must be positive and finite")]
    DegenerateExtent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for {len} cells")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("p search did not stop after {} coarse iterations (last p = {})", .trace.records.len(), .trace.p_tilde)]
    SearchDivergence { trace: Box<SearchTrace> },
}
