use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("subgroup order t={t} does not divide v={v}")]
    SubgroupOrder { v: u64, t: u64 },
    #[error("modulus v={v} inconsistent with 2nk/lambda + t = {expected}")]
    ModulusMismatch { v: u64, expected: u64 },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("permutations act on different ground sets")]
    GroundSetMismatch,
    #[error("array is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("not diagonal-structured: diagonal D_{0} is partially filled")]
    NotDiagonal(usize),
    #[error("cell ({0},{1}) is not filled")]
    EmptyCell(usize, usize),
    #[error("skeleton has no filled cell")]
    EmptySkeleton,
    #[error("orientation vector has length {got}, expected {expected}")]
    OrientationLength { expected: usize, got: usize },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("search budget exceeded: {needed} candidates > budget {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("orderings not compatible: {0}")]
    NotCompatible(String),
    #[error("array entries repeat; value-labelled orderings are undefined")]
    RepeatedValues,
    #[error("value {0} lies in the forbidden subgroup J")]
    ValueInSubgroup(u32),
    #[error("embeddings live over different moduli ({0} vs {1})")]
    ModulusDiffers(u32, u32),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
