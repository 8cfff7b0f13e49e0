//! Green automatic modulation classification core.
//!
//! Everything in this crate is a pure function of its inputs and only needs
//! `alloc`: signal synthesis, inverse-pyramid sparse coding, the 1730-dim
//! engineered feature vector, discriminant feature selection, boosted trees
//! and the coarse/refinement hierarchy. File formats, configuration and the
//! command line live in the `gamc` crate.

#![no_std]

extern crate alloc;

mod prelude {
    pub use alloc::vec;
    pub use alloc::vec::Vec;
    // float math for no_std builds; resolves to the inherent methods when std is linked
    pub use num_traits::Float;

    pub use crate::Cplx;
}

pub mod error;
pub mod fft;
pub mod features;
pub mod gbt;
pub mod hier;
pub mod matrix;
pub mod modclass;
pub mod rng;
pub mod select;
pub mod siggen;
pub mod sparse;

pub use error::{Error, Result};
pub use modclass::ModClass;
pub use matrix::Matrix;
pub use siggen::IqFrame;

/// Number of complex samples in every frame.
pub const FRAME_LEN: usize = 1024;

/// Complex baseband sample type used throughout the pipeline.
pub type Cplx = num_complex::Complex<f64>;
