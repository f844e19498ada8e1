use thiserror::Error;

use crate::group::GroupElement;
use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A violated value axiom together with the elements that witness it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `p(0) != 0`.
    NonzeroAtZero(Rational),
    /// `p(x) = 0` for some `x != 0`.
    ZeroOffIdentity(GroupElement),
    Negative(GroupElement, Rational),
    /// `p(-x) != p(x)`.
    Symmetry(GroupElement, GroupElement),
    /// `p(x + y) > p(x) + p(y)`.
    Triangle(GroupElement, GroupElement),
    /// `p(x) > 1` in a class with cap 1.
    Cap(GroupElement, Rational),
    /// `N x != 0` in a class of exponent `N`.
    Exponent(GroupElement, u64),
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomViolation::NonzeroAtZero(v) => write!(f, "(V1) p(0) = {v}"),
            AxiomViolation::ZeroOffIdentity(x) => write!(f, "(V1) p({x}) = 0 at a nonzero element"),
            AxiomViolation::Negative(x, v) => write!(f, "p({x}) = {v} is negative"),
            AxiomViolation::Symmetry(x, y) => write!(f, "(V2) p({x}) != p({y})"),
            AxiomViolation::Triangle(x, y) => write!(f, "(V3) p({x} + {y}) > p({x}) + p({y})"),
            AxiomViolation::Cap(x, v) => write!(f, "cap 1 exceeded: p({x}) = {v}"),
            AxiomViolation::Exponent(x, n) => write!(f, "{n}·{x} != 0"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed element: {0}")]
    MalformedElement(String),
    #[error("malformed group: {0}")]
    MalformedGroup(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("budget exceeded: {what} (limit {limit}, partial count {partial})")]
    Budget { what: String, limit: u64, partial: u64 },
    #[error("value axiom violated: {0}")]
    Axiom(AxiomViolation),
    #[error("invalid cost function: {0}")]
    InvalidCost(String),
    #[error("{count} element(s) unreachable from 0, first {first}")]
    Unreachable { count: usize, first: GroupElement },
    #[error("homomorphism is not surjective")]
    NotSurjective,
    #[error("not isometric: {0}")]
    NotIsometric(String),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("modulus not subadditive: w({x} + {y}) > w({x}) + w({y})")]
    NotSubadditive { x: Box<Rational>, y: Box<Rational> },
    #[error("not a Katetov map: {0}")]
    NotKatetov(String),
    #[error("Katetov map violates trv-{n} at tuple {witness:?}")]
    Admissibility { n: u64, witness: Vec<GroupElement> },
    #[error("min f(A) = 0; the map is realized only in the completion (try find_realizer)")]
    ZeroMinimum,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("exponent mismatch: {0}")]
    ExponentMismatch(String),
    #[error("step functions over different hosts")]
    HostMismatch,
    #[error("not a norming function: {0}")]
    Norming(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
