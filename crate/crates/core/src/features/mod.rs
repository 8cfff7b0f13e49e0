//! The 1730-dimensional engineered feature vector.
//!
//! | block                          | dims | range       |
//! |--------------------------------|------|-------------|
//! | amplitude + phase histograms   | 248  | 0..248      |
//! | refinement amplitude histogram | 130  | 248..378    |
//! | phase-difference histograms    | 124  | 378..502    |
//! | FFT histograms                 | 248  | 502..750    |
//! | histogram statistics           | 40   | 750..790    |
//! | circular statistics            | 3    | 790..793    |
//! | high-order cumulants           | 40   | 793..833    |
//! | rotational moments             | 18   | 833..851    |
//! | eigen structure                | 2    | 851..853    |
//! | bispectrum                     | 4    | 853..857    |
//! | cyclostationary                | 16   | 857..873    |
//! | wavelet energy                 | 16   | 873..889    |
//! | amplitude CDF                  | 9    | 889..898    |
//! | phase-difference FFT           | 128  | 898..1026   |
//! | sparse coding residual         | 384  | 1026..1410  |
//! | sparse coding global           | 320  | 1410..1730  |

pub mod cumulants;
pub mod geometric;
pub mod histogram;
pub mod spectral;
pub mod stats;

use crate::prelude::*;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::siggen::{normalize_power, IqFrame};
use crate::sparse::{sparse_features, PyramidConfig, PyramidDictionaries};
use crate::FRAME_LEN;

pub use cumulants::high_order_cumulants;
pub use geometric::geometric_features;
pub use histogram::{histogram_features, HistogramSet, Sequences};
pub use stats::histogram_stats;

pub const FEATURE_DIMS: usize = 1730;

/// Named blocks in vector order with their dimensions.
pub const LAYOUT: [(&str, usize); 16] = [
    ("amplitude_phase_histogram", 248),
    ("refinement_amplitude_histogram", 130),
    ("phase_difference_histogram", 124),
    ("fft_histogram", 248),
    ("histogram_statistics", 40),
    ("circular_statistics", 3),
    ("high_order_cumulants", 40),
    ("rotational_moments", 18),
    ("eigen_structure", 2),
    ("bispectrum", 4),
    ("cyclostationary", 16),
    ("wavelet_energy", 16),
    ("amplitude_cdf", 9),
    ("phase_difference_fft", 128),
    ("sparse_coding_residual", 384),
    ("sparse_coding_global", 320),
];

/// Index range of a named block.
pub fn block_range(name: &str) -> Option<Range<usize>> {
    let mut start = 0;
    for (n, d) in LAYOUT {
        if n == name {
            return Some(start..start + d);
        }
        start += d;
    }
    None
}

/// `(name, range)` for every block.
pub fn layout_ranges() -> Vec<(&'static str, Range<usize>)> {
    let mut start = 0;
    LAYOUT
        .iter()
        .map(|&(n, d)| {
            let r = start..start + d;
            start += d;
            (n, r)
        })
        .collect()
}

/// FNV-1a over the block table and the pyramid configuration. Models store
/// it so inference can refuse vectors built under a different layout.
pub fn layout_hash(cfg: &PyramidConfig) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(b"gamc-layout-v1");
    for (name, dims) in LAYOUT {
        eat(name.as_bytes());
        eat(&(dims as u64).to_le_bytes());
    }
    let nums = [cfg.global_length, cfg.atom_count, cfg.ratio]
        .into_iter()
        .chain(cfg.residual_levels.iter().flat_map(|&(l, w)| [l, w]))
        .chain([usize::MAX])
        .chain(cfg.sparsity_set_global.iter().copied())
        .chain([usize::MAX])
        .chain(cfg.sparsity_set_residual.iter().copied());
    for v in nums {
        eat(&(v as u64).to_le_bytes());
    }
    h
}

fn fft_flops(n: usize) -> usize {
    5 * n * n.trailing_zeros() as usize
}

/// OMP over a `dim`-sample window to sparsity `k`: correlation against all
/// atoms, then an incremental QR step and residual update per atom.
fn omp_flops(dim: usize, n_atoms: usize, k: usize) -> usize {
    (1..=k).map(|s| 2 * dim * n_atoms + n_atoms + 4 * dim * s + 2 * s * s).sum()
}

/// Approximate floating-point operation count of one feature extraction
/// under `cfg`. Transcendentals count as one operation each, so this is an
/// order-of-magnitude figure.
pub fn extraction_flops(cfg: &PyramidConfig) -> usize {
    let n = FRAME_LEN;
    let mut f = 3 * n; // power normalization
    f += 8 * n + fft_flops(n); // amplitude, phase, phase difference, spectrum
    f += 10 * 2 * n + 128 * 4; // histograms and their statistics
    f += 40 * n; // moments up to order 8
    f += 3 * 4 * n + n * n.trailing_zeros() as usize + 8 * n; // rotation, sort for CDF, covariance
    let seg = spectral::BISPEC_SEGMENT;
    f += (n / seg) * (fft_flops(seg) + 8 * spectral::BISPEC_GRID * spectral::BISPEC_GRID);
    f += spectral::CYCLIC_FREQS * 8 * n;
    f += 2 * n * spectral::WAVELET_LEVELS as usize * 2;
    f += fft_flops(n) + 2 * n;

    // pyramid construction and sparse codes
    f += 4 * n;
    for &(len, win) in &cfg.residual_levels {
        let windows = len / win;
        let k = cfg.sparsity_set_residual.iter().copied().max().unwrap_or(0);
        f += 3 * len + windows * omp_flops(2 * win, cfg.atom_count, k);
    }
    let k = cfg.sparsity_set_global.iter().copied().max().unwrap_or(0);
    f += omp_flops(2 * cfg.global_length, cfg.atom_count, k);
    f
}

/// Full feature vector of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn block(&self, name: &str) -> Option<&[f64]> {
        block_range(name).map(|r| &self.values[r])
    }
}

/// Feature extractor holding the FFT plans and trained dictionaries.
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    plan1024: FftPlan,
    plan128: FftPlan,
    dicts: PyramidDictionaries,
    cfg: PyramidConfig,
}

impl FeatureExtractor {
    pub fn new(dicts: PyramidDictionaries, cfg: PyramidConfig) -> Result<Self> {
        cfg.validate()?;
        dicts.check(&cfg)?;
        if cfg.residual_dims() != 384 || cfg.global_dims() != 320 {
            return Err(Error::LayoutViolation {
                block: "sparse_coding",
                expected: 704,
                got: cfg.feature_dims(),
            });
        }
        Ok(Self {
            plan1024: FftPlan::new(FRAME_LEN),
            plan128: FftPlan::new(spectral::BISPEC_SEGMENT),
            dicts,
            cfg,
        })
    }

    pub fn config(&self) -> &PyramidConfig {
        &self.cfg
    }

    pub fn dictionaries(&self) -> &PyramidDictionaries {
        &self.dicts
    }

    /// Extracts every block in layout order. The frame is rescaled to unit
    /// mean power first (zero frames are left as they are).
    pub fn extract(&self, frame: &IqFrame) -> Result<FeatureVector> {
        if frame.samples.len() != FRAME_LEN {
            return Err(Error::InvalidFrame("frame must hold exactly 1024 samples"));
        }
        let mut norm = frame.clone();
        normalize_power(&mut norm.samples);
        let x = &norm.samples;

        let seq = Sequences::new(x, &self.plan1024);
        let hist = HistogramSet::new(&seq);
        let [amp_phase, refine, pdiff, fft_hist] = hist.blocks();
        let stats = histogram_stats(&hist, &seq.phase);
        let cumul = high_order_cumulants(x);
        let geo = geometric_features(x, &seq.amplitude);
        let bispec = spectral::bispectrum(x, &self.plan128);
        let cyclo = spectral::cyclic_autocorrelation(x);
        let wavelet = spectral::wavelet_energy(x);
        let pd_fft = spectral::phase_diff_spectrum(&seq.phase_diff, &self.plan1024);
        let sparse = sparse_features(&norm, &self.dicts, &self.cfg)?;
        let (sc_res, sc_glob) = sparse.split_at(self.cfg.residual_dims());

        let parts: [&[f64]; 16] = [
            &amp_phase,
            &refine,
            &pdiff,
            &fft_hist,
            &stats[..40],
            &stats[40..],
            &cumul,
            &geo[..18],
            &geo[18..20],
            &bispec,
            &cyclo,
            &wavelet,
            &geo[20..],
            &pd_fft,
            sc_res,
            sc_glob,
        ];
        let mut values = Vec::with_capacity(FEATURE_DIMS);
        for ((block, expected), part) in LAYOUT.iter().zip(parts) {
            if part.len() != *expected {
                return Err(Error::LayoutViolation { block, expected: *expected, got: part.len() });
            }
            values.extend_from_slice(part);
        }
        if values.len() != FEATURE_DIMS {
            return Err(Error::LayoutViolation { block: "total", expected: FEATURE_DIMS, got: values.len() });
        }
        // degenerate inputs must never leak NaN/Inf into a model
        for v in values.iter_mut() {
            if !v.is_finite() {
                *v = 0.0;
            }
        }
        Ok(FeatureVector { values })
    }
}

/// Convenience wrapper building a one-shot extractor.
pub fn extract_all(frame: &IqFrame, dicts: &PyramidDictionaries, cfg: &PyramidConfig) -> Result<FeatureVector> {
    FeatureExtractor::new(dicts.clone(), cfg.clone())?.extract(frame)
}
