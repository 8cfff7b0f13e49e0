use crate::prelude::*;

use super::{learn_dictionary, omp_path, Dictionary};
use crate::error::{Error, Result};
use crate::siggen::IqFrame;
use crate::FRAME_LEN;

/// Dimensions contributed by sparse coding with the default configuration
/// (384 residual + 320 global).
pub const SPARSE_DIMS: usize = 704;

/// Inverse-pyramid layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidConfig {
    /// Length of the decimated signal coded as one global window.
    pub global_length: usize,
    /// `(level length, window size)` for each residual level.
    pub residual_levels: Vec<(usize, usize)>,
    pub sparsity_set_global: Vec<usize>,
    pub sparsity_set_residual: Vec<usize>,
    pub atom_count: usize,
    /// Decimation factor between a residual level and its coarse approximation.
    pub ratio: usize,
}

impl Default for PyramidConfig {
    fn default() -> Self {
        Self {
            global_length: 64,
            residual_levels: vec![(256, 16), (64, 16)],
            sparsity_set_global: vec![1, 2, 3, 4, 5],
            sparsity_set_residual: vec![1, 2, 3],
            atom_count: 64,
            ratio: 4,
        }
    }
}

impl PyramidConfig {
    pub fn validate(&self) -> Result<()> {
        if self.atom_count == 0 || self.ratio < 2 {
            return Err(Error::InvalidConfig("atom_count >= 1 and ratio >= 2 required"));
        }
        if self.global_length == 0 || FRAME_LEN % self.global_length != 0 {
            return Err(Error::InvalidConfig("global_length must divide the frame length"));
        }
        for &(len, win) in &self.residual_levels {
            if len == 0 || win == 0 || FRAME_LEN % len != 0 || len % win != 0 || len % self.ratio != 0 {
                return Err(Error::InvalidConfig(
                    "residual level lengths must divide the frame, be divisible by the ratio, and be split evenly into windows",
                ));
            }
        }
        let ok = |set: &[usize]| !set.is_empty() && set.iter().all(|&k| k >= 1 && k <= self.atom_count);
        if !ok(&self.sparsity_set_global) || (!self.residual_levels.is_empty() && !ok(&self.sparsity_set_residual)) {
            return Err(Error::InvalidConfig("sparsity sets must be non-empty with 1 <= k <= atom_count"));
        }
        Ok(())
    }

    pub fn residual_dims(&self) -> usize {
        self.residual_levels.len() * self.sparsity_set_residual.len() * self.atom_count
    }

    pub fn global_dims(&self) -> usize {
        self.sparsity_set_global.len() * self.atom_count
    }

    pub fn feature_dims(&self) -> usize {
        self.residual_dims() + self.global_dims()
    }
}

/// One residual level: the finer signal minus the upsampled coarse approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualLevel {
    pub length: usize,
    pub window: usize,
    /// Level signal (block average of the frame down to `length`).
    pub signal: Vec<Cplx>,
    /// Zero-order-hold upsampling of the coarse (length / ratio) signal.
    pub coarse_up: Vec<Cplx>,
    pub residual: Vec<Cplx>,
}

impl ResidualLevel {
    /// Non-overlapping residual windows mapped to interleaved real vectors.
    pub fn windows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.residual.chunks(self.window).map(interleave)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    pub global: Vec<Cplx>,
    pub levels: Vec<ResidualLevel>,
}

/// Block-average low-pass + decimation.
fn decimate(x: &[Cplx], len: usize) -> Vec<Cplx> {
    let f = x.len() / len;
    x.chunks(f).map(|c| c.iter().sum::<Cplx>() / f as f64).collect()
}

fn upsample(x: &[Cplx], factor: usize) -> Vec<Cplx> {
    x.iter().flat_map(|&c| core::iter::repeat_n(c, factor)).collect()
}

/// I/Q interleaving: w complex samples become a 2w real vector.
pub fn interleave(x: &[Cplx]) -> Vec<f64> {
    x.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn build_pyramid(frame: &IqFrame, cfg: &PyramidConfig) -> Result<Pyramid> {
    cfg.validate()?;
    if frame.samples.len() != FRAME_LEN {
        return Err(Error::InvalidFrame("frame must hold exactly 1024 samples"));
    }
    let global = decimate(&frame.samples, cfg.global_length);
    let levels = cfg
        .residual_levels
        .iter()
        .map(|&(length, window)| {
            let signal = decimate(&frame.samples, length);
            let coarse = decimate(&signal, length / cfg.ratio);
            let coarse_up = upsample(&coarse, cfg.ratio);
            let residual = signal.iter().zip(&coarse_up).map(|(a, b)| a - b).collect();
            ResidualLevel { length, window, signal, coarse_up, residual }
        })
        .collect();
    Ok(Pyramid { global, levels })
}

/// Dictionaries for the global code and each residual level.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidDictionaries {
    pub global: Dictionary,
    pub residual: Vec<Dictionary>,
}

impl PyramidDictionaries {
    pub fn check(&self, cfg: &PyramidConfig) -> Result<()> {
        if self.global.dim() != 2 * cfg.global_length {
            return Err(Error::ConfigMismatch("global dictionary dimension"));
        }
        if self.residual.len() != cfg.residual_levels.len() {
            return Err(Error::ConfigMismatch("number of residual dictionaries"));
        }
        if self.residual.iter().zip(&cfg.residual_levels).any(|(d, &(_, w))| d.dim() != 2 * w) {
            return Err(Error::ConfigMismatch("residual dictionary dimension"));
        }
        if core::iter::once(&self.global)
            .chain(&self.residual)
            .any(|d| d.n_atoms() != cfg.atom_count)
        {
            return Err(Error::ConfigMismatch("atom count"));
        }
        Ok(())
    }
}

/// Per-atom maximum absolute coefficient across window codes.
pub fn max_abs_pool<'a, I: IntoIterator<Item = &'a [f64]>>(codes: I, n_atoms: usize) -> Vec<f64> {
    let mut pooled = vec![0.0f64; n_atoms];
    for code in codes {
        for (p, c) in pooled.iter_mut().zip(code) {
            *p = p.max(c.abs());
        }
    }
    pooled
}

/// Sparse-coding block of the feature vector.
///
/// Layout: for each residual level, for each k in the residual sparsity
/// set, the max-abs-pooled window codes (atom_count dims); then for each k in
/// the global sparsity set, the signed code of the global window.
pub fn sparse_features(frame: &IqFrame, dicts: &PyramidDictionaries, cfg: &PyramidConfig) -> Result<Vec<f64>> {
    dicts.check(cfg)?;
    let pyr = build_pyramid(frame, cfg)?;
    let n = cfg.atom_count;
    let mut out = Vec::with_capacity(cfg.feature_dims());

    let k_res_max = cfg.sparsity_set_residual.iter().copied().max().unwrap_or(1);
    for (level, dict) in pyr.levels.iter().zip(&dicts.residual) {
        let paths: Vec<_> = level
            .windows()
            .map(|w| omp_path(&w, dict, k_res_max))
            .collect::<Result<_>>()?;
        for &k in &cfg.sparsity_set_residual {
            out.extend(max_abs_pool(paths.iter().map(|p| p[k - 1].coefficients.as_slice()), n));
        }
    }

    let k_glob_max = cfg.sparsity_set_global.iter().copied().max().unwrap_or(1);
    let path = omp_path(&interleave(&pyr.global), &dicts.global, k_glob_max)?;
    for &k in &cfg.sparsity_set_global {
        out.extend_from_slice(&path[k - 1].coefficients);
    }
    Ok(out)
}

/// Learns one dictionary per pyramid level from training frames. Each level
/// is trained at the largest sparsity of its set.
pub fn learn_pyramid_dictionaries(
    frames: &[IqFrame],
    cfg: &PyramidConfig,
    iterations: usize,
    seed: u64,
) -> Result<PyramidDictionaries> {
    cfg.validate()?;
    let pyramids: Vec<Pyramid> = frames.iter().map(|f| build_pyramid(f, cfg)).collect::<Result<_>>()?;
    let k_glob = cfg.sparsity_set_global.iter().copied().max().unwrap_or(1);
    let k_res = cfg.sparsity_set_residual.iter().copied().max().unwrap_or(1);

    let global_windows: Vec<Vec<f64>> = pyramids.iter().map(|p| interleave(&p.global)).collect();
    let global = learn_dictionary(&global_windows, cfg.atom_count, k_glob, iterations, seed)?.dictionary;

    let residual = (0..cfg.residual_levels.len())
        .map(|li| {
            let windows: Vec<Vec<f64>> = pyramids.iter().flat_map(|p| p.levels[li].windows()).collect();
            learn_dictionary(&windows, cfg.atom_count, k_res, iterations, seed.wrapping_add(li as u64 + 1))
                .map(|l| l.dictionary)
        })
        .collect::<Result<_>>()?;
    Ok(PyramidDictionaries { global, residual })
}
