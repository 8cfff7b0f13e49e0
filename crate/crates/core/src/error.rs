use thiserror::Error;

use crate::modclass::ModClass;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulation {0} is not supported by this generator")]
    UnsupportedModulation(ModClass),
    #[error("{n_symbols} symbols at {sps} samples/symbol cannot fill a {needed}-sample frame")]
    InsufficientLength {
        n_symbols: usize,
        sps: usize,
        needed: usize,
    },
    #[error("invalid frame: {0}")]
    InvalidFrame(&'static str),
    #[error("invalid channel parameters: {0}")]
    InvalidParams(&'static str),
    #[error("configuration is empty: {0}")]
    EmptyConfig(&'static str),
    #[error("sparsity {k} exceeds atom count {n_atoms}")]
    InvalidSparsity { k: usize, n_atoms: usize },
    #[error("need at least {needed} training windows, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("dictionary and pyramid configuration disagree: {0}")]
    ConfigMismatch(&'static str),
    #[error("feature block {block} has {got} dims, layout expects {expected}")]
    LayoutViolation {
        block: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("labels are degenerate: {0}")]
    DegenerateLabels(&'static str),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeError { expected: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
