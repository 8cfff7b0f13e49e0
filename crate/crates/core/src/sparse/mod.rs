//! Sparse-coding representation: OMP encoding, dictionary learning and the
//! inverse-pyramid multi-resolution features.

mod dictionary;
mod omp;
mod pyramid;

pub use dictionary::{learn_dictionary, Dictionary, LearnedDictionary};
pub use omp::{omp_encode, omp_path, SparseCode, RESIDUAL_TOL};
pub use pyramid::{
    build_pyramid, interleave, learn_pyramid_dictionaries, max_abs_pool, sparse_features, Pyramid,
    PyramidConfig, PyramidDictionaries, ResidualLevel, SPARSE_DIMS,
};
