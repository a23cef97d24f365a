use thiserror::Error;

use crate::diagrams::Site;
use crate::magic::Family;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is singular (|N| = {norm:e})")]
    SingularMatrix { norm: f64 },

    #[error("invalid matrix-coefficient index: {0}")]
    InvalidIndex(String),

    #[error("{what} = {value} exceeds the supported maximum {max}")]
    SizeLimit {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("{what} = {value} is out of range: {reason}")]
    OutOfRange {
        what: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("partial order contains a cycle through {0}")]
    CyclicOrder(String),

    #[error("invalid box diagram: {0}")]
    InvalidDiagram(String),

    #[error("operation not supported for {0}")]
    UnsupportedSpace(String),

    #[error("no direct peel reduction for a slingshot at {site} with generator family {family}")]
    UnsupportedPeel { site: Site, family: Family },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("ladder image for n = {n}, k = {k} differs between the table and the recursion")]
    InconsistentLadder { n: usize, k: usize },

    #[error("argument {0} lies on the branch cut [1, inf)")]
    BranchCut(String),

    #[error("({x}, {y}) is outside the region where the ladder functions are real")]
    RegionViolation { x: f64, y: f64 },

    #[error("point violates the domain requirement: {0}")]
    DomainViolation(String),

    #[error("integrand is not finite at chart parameters {params:?}")]
    NonFinite { params: [f64; 4] },
}
