use crate::prelude::*;
use core::f64::consts::TAU;

use rand::Rng;

use super::{apply_channel, modulate, ChannelParams, IqFrame};
use crate::error::{Error, Result};
use crate::rng;
use crate::ModClass;

/// Randomization ranges for per-frame impairments.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub sps: usize,
    pub n_symbols: usize,
    /// Roll-off drawn uniformly from `[lo, hi]`.
    pub rolloff: (f64, f64),
    /// CFO drawn uniformly from `[-cfo_max, cfo_max]` (fraction of sample rate).
    pub cfo_max: f64,
    pub fading: bool,
    pub pulse_shaping: bool,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            sps: 8,
            n_symbols: 128,
            rolloff: (0.1, 0.4),
            cfo_max: 1e-4,
            fading: false,
            pulse_shaping: true,
        }
    }
}

/// Coordinates of one frame in the (class, SNR, index) grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameKey {
    pub class: ModClass,
    pub snr_index: usize,
    pub index: usize,
}

/// Generates the frame at `key`. Each frame owns a counter-derived RNG
/// stream, so frames can be produced in any order or in parallel.
pub fn generate_frame(cfg: &DatasetConfig, key: FrameKey, snr_db: f64, master_seed: u64) -> Result<IqFrame> {
    let coords = [key.class.id() as u64, key.snr_index as u64, key.index as u64];
    let mut rng = rng::stream(master_seed, &coords);
    let (lo, hi) = cfg.rolloff;
    let rolloff = if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let cfo_norm = if cfg.cfo_max > 0.0 {
        rng.random_range(-cfg.cfo_max..=cfg.cfo_max)
    } else {
        0.0
    };
    let params = ChannelParams {
        snr_db,
        cfo_norm,
        phase_offset: rng.random_range(0.0..TAU),
        rolloff,
        sps: cfg.sps,
        fading: cfg.fading,
        seed: rng.random::<u64>(),
        pulse_shaping: cfg.pulse_shaping,
    };
    let clean = modulate(key.class, cfg.n_symbols, &params, rng.random::<u64>())?;
    apply_channel(&clean, &params)
}

/// All frame keys of a dataset in generation order (class-major, then SNR).
pub fn frame_keys(classes: &[ModClass], n_snr: usize, frames_per_cell: usize) -> Vec<FrameKey> {
    let mut keys = Vec::with_capacity(classes.len() * n_snr * frames_per_cell);
    for &class in classes {
        for snr_index in 0..n_snr {
            for index in 0..frames_per_cell {
                keys.push(FrameKey { class, snr_index, index });
            }
        }
    }
    keys
}

/// Generates `|classes| x |snr_grid| x frames_per_cell` labeled frames.
pub fn generate_dataset(
    classes: &[ModClass],
    snr_grid: &[f64],
    frames_per_cell: usize,
    master_seed: u64,
    cfg: &DatasetConfig,
) -> Result<Vec<IqFrame>> {
    if classes.is_empty() {
        return Err(Error::EmptyConfig("class list"));
    }
    if snr_grid.is_empty() {
        return Err(Error::EmptyConfig("SNR grid"));
    }
    if frames_per_cell == 0 {
        return Err(Error::EmptyConfig("frames_per_cell must be at least 1"));
    }
    frame_keys(classes, snr_grid.len(), frames_per_cell)
        .into_iter()
        .map(|k| generate_frame(cfg, k, snr_grid[k.snr_index], master_seed))
        .collect()
}
