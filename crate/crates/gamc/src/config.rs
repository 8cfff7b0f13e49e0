//! Run configuration, read from TOML and overridable from the command line.

use gamc_core::gbt::BoostParams;
use gamc_core::siggen::{DatasetConfig, SNR_GRID};
use gamc_core::sparse::PyramidConfig;
use gamc_core::{select, ModClass};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{GamcError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Frame file to train on; synthetic frames are generated when absent.
    pub train: Option<String>,
    /// Separate test frame file. When absent the training set is split.
    pub test: Option<String>,
    pub classes: Vec<String>,
    pub snr_grid: Vec<f64>,
    pub frames_per_cell: usize,
    pub seed: u64,
    pub train_fraction: f64,
    pub split_seed: u64,
    pub sps: usize,
    pub n_symbols: usize,
    pub rolloff: [f64; 2],
    pub cfo_max: f64,
    pub fading: bool,
    pub pulse_shaping: bool,
}

impl Default for DataConfig {
    fn default() -> Self {
        let d = DatasetConfig::default();
        Self {
            train: None,
            test: None,
            classes: ModClass::ALL.iter().map(|c| c.name().to_string()).collect(),
            snr_grid: SNR_GRID.to_vec(),
            frames_per_cell: 500,
            seed: 1,
            train_fraction: 0.8,
            split_seed: 7,
            sps: d.sps,
            n_symbols: d.n_symbols,
            rolloff: [d.rolloff.0, d.rolloff.1],
            cfo_max: d.cfo_max,
            fading: d.fading,
            pulse_shaping: d.pulse_shaping,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PyramidSection {
    pub global_length: usize,
    pub residual_levels: Vec<[usize; 2]>,
    pub sparsity_set_global: Vec<usize>,
    pub sparsity_set_residual: Vec<usize>,
    pub atom_count: usize,
    pub ratio: usize,
}

impl Default for PyramidSection {
    fn default() -> Self {
        let p = PyramidConfig::default();
        Self {
            global_length: p.global_length,
            residual_levels: p.residual_levels.iter().map(|&(l, w)| [l, w]).collect(),
            sparsity_set_global: p.sparsity_set_global,
            sparsity_set_residual: p.sparsity_set_residual,
            atom_count: p.atom_count,
            ratio: p.ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DictionaryConfig {
    /// Training frames used to learn the dictionaries.
    pub frames: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        Self { frames: 256, iterations: 10, seed: 11 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub top_k: usize,
    pub n_bins: usize,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self { top_k: select::DEFAULT_TOP_K, n_bins: select::DEFAULT_BINS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostConfig {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub n_rounds: usize,
    pub min_child_weight: f64,
    pub l2_reg: f64,
    pub seed: u64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        let p = BoostParams::default();
        Self {
            learning_rate: p.learning_rate,
            max_depth: p.max_depth,
            n_rounds: p.n_rounds,
            min_child_weight: p.min_child_weight,
            l2_reg: p.l2_reg,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    pub pyramid: PyramidSection,
    pub dictionary: DictionaryConfig,
    pub select: SelectConfig,
    pub boost: BoostConfig,
}

/// Hex SHA-256 of a text blob.
pub fn hash_text(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| GamcError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => GamcError::MissingInput(path.display().to_string()),
            _ => GamcError::Io(e),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn hash(&self) -> String {
        hash_text(&self.to_toml())
    }

    pub fn classes(&self) -> Result<Vec<ModClass>> {
        let mut out = Vec::with_capacity(self.data.classes.len());
        for name in &self.data.classes {
            let c = ModClass::from_name(name).ok_or_else(|| GamcError::Config(format!("unknown class '{name}'")))?;
            if out.contains(&c) {
                return Err(GamcError::Config(format!("class '{name}' listed twice")));
            }
            out.push(c);
        }
        Ok(out)
    }

    pub fn pyramid(&self) -> PyramidConfig {
        let p = &self.pyramid;
        PyramidConfig {
            global_length: p.global_length,
            residual_levels: p.residual_levels.iter().map(|&[l, w]| (l, w)).collect(),
            sparsity_set_global: p.sparsity_set_global.clone(),
            sparsity_set_residual: p.sparsity_set_residual.clone(),
            atom_count: p.atom_count,
            ratio: p.ratio,
        }
    }

    pub fn boost(&self) -> BoostParams {
        let b = &self.boost;
        BoostParams {
            learning_rate: b.learning_rate,
            max_depth: b.max_depth,
            n_rounds: b.n_rounds,
            min_child_weight: b.min_child_weight,
            l2_reg: b.l2_reg,
        }
    }

    pub fn dataset(&self) -> DatasetConfig {
        let d = &self.data;
        DatasetConfig {
            sps: d.sps,
            n_symbols: d.n_symbols,
            rolloff: (d.rolloff[0], d.rolloff[1]),
            cfo_max: d.cfo_max,
            fading: d.fading,
            pulse_shaping: d.pulse_shaping,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let conflict = |m: &str| Err(GamcError::Config(m.to_string()));
        if self.classes()?.is_empty() {
            return conflict("class list is empty");
        }
        if self.data.snr_grid.is_empty() || self.data.snr_grid.iter().any(|s| s.is_nan()) {
            return conflict("SNR grid must be non-empty and free of NaN");
        }
        if self.data.frames_per_cell == 0 {
            return conflict("frames_per_cell must be at least 1");
        }
        if !(self.data.train_fraction > 0.0 && self.data.train_fraction < 1.0) {
            return conflict("train_fraction must be in (0, 1)");
        }
        if self.select.top_k == 0 || self.select.top_k > gamc_core::features::FEATURE_DIMS {
            return conflict("select.top_k must be in 1..=1730");
        }
        if self.select.n_bins < 2 {
            return conflict("select.n_bins must be at least 2");
        }
        if self.dictionary.frames == 0 || self.dictionary.iterations == 0 {
            return conflict("dictionary.frames and dictionary.iterations must be positive");
        }
        self.pyramid().validate()?;
        self.boost().validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = RunConfig::from_toml("[select]\ntop_k = 12\n[data]\nclasses = [\"bpsk\", \"16QAM\"]\n").unwrap();
        assert_eq!(c.select.top_k, 12);
        assert_eq!(c.classes().unwrap(), vec![ModClass::Bpsk, ModClass::Qam16]);
        assert_eq!(c.boost, BoostConfig::default());
    }

    #[test]
    fn rejects_unknown_keys_and_classes() {
        assert!(RunConfig::from_toml("[select]\ntopk = 3\n").is_err());
        let mut c = RunConfig::default();
        c.data.classes = vec!["QAM1024".into()];
        assert!(c.validate().is_err());
        c = RunConfig::default();
        c.data.train_fraction = 1.0;
        assert!(c.validate().is_err());
    }
}
