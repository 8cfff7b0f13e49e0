//! End-to-end training and evaluation: frames → dictionaries → features →
//! selection → hierarchy.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use gamc_core::features::{layout_hash, FeatureExtractor, FEATURE_DIMS};
use gamc_core::hier::{self, EvalReport, Group, GroupMap};
use gamc_core::select::select_features;
use gamc_core::siggen::{frame_keys, generate_frame, normalize_power, DatasetConfig, FrameKey};
use gamc_core::sparse::learn_pyramid_dictionaries;
use gamc_core::{IqFrame, Matrix, ModClass};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{GamcError, Result};
use crate::io::{self, FrameReader, ModelFile};

/// Frames processed per extraction batch.
const CHUNK: usize = 256;

/// Indexed frame source: a frame file or a deterministic synthetic grid.
pub enum Dataset {
    Synthetic { keys: Vec<FrameKey>, grid: Vec<f64>, seed: u64, cfg: DatasetConfig },
    File(FrameReader<BufReader<File>>),
}

impl Dataset {
    pub fn synthetic(cfg: &RunConfig) -> Result<Self> {
        let classes = cfg.classes()?;
        if classes.is_empty() {
            return Err(GamcError::Config("class list is empty".into()));
        }
        Ok(Dataset::Synthetic {
            keys: frame_keys(&classes, cfg.data.snr_grid.len(), cfg.data.frames_per_cell),
            grid: cfg.data.snr_grid.clone(),
            seed: cfg.data.seed,
            cfg: cfg.dataset(),
        })
    }

    pub fn open(path: &Path) -> Result<Self> {
        Ok(Dataset::File(FrameReader::open(path)?))
    }

    /// Training source named by the configuration.
    pub fn for_training(cfg: &RunConfig) -> Result<Self> {
        match &cfg.data.train {
            Some(p) => Self::open(Path::new(p)),
            None => Self::synthetic(cfg),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Dataset::Synthetic { keys, .. } => keys.len(),
            Dataset::File(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(label, SNR)` of every frame, SNR rounded as stored on disk.
    pub fn tags(&mut self) -> Result<Vec<(ModClass, f64)>> {
        match self {
            Dataset::Synthetic { keys, grid, .. } => {
                Ok(keys.iter().map(|k| (k.class, grid[k.snr_index] as f32 as f64)).collect())
            }
            Dataset::File(r) => r.metadata(),
        }
    }

    /// Frames at `idx`. Synthetic frames are rounded to f32 so that they
    /// match what a frame file would hold.
    pub fn fetch(&mut self, idx: &[usize]) -> Result<Vec<IqFrame>> {
        match self {
            Dataset::Synthetic { keys, grid, seed, cfg } => idx
                .par_iter()
                .map(|&i| {
                    let k = *keys.get(i).ok_or_else(|| GamcError::Internal(format!("frame index {i} out of range")))?;
                    Ok(io::quantize(&generate_frame(cfg, k, grid[k.snr_index], *seed)?))
                })
                .collect(),
            Dataset::File(r) => idx.iter().map(|&i| r.read_frame(i)).collect(),
        }
    }
}

/// Row-aligned features with their tags.
pub struct Extracted {
    pub x: Matrix,
    pub labels: Vec<ModClass>,
    pub snr_db: Vec<f64>,
}

/// Extracts frames `idx`, keeping `columns` of each vector (all when `None`).
pub fn extract_rows(ext: &FeatureExtractor, ds: &mut Dataset, idx: &[usize], columns: Option<&[usize]>) -> Result<Extracted> {
    let width = columns.map_or(FEATURE_DIMS, <[usize]>::len);
    let mut data = Vec::with_capacity(idx.len() * width);
    let mut labels = Vec::with_capacity(idx.len());
    let mut snr_db = Vec::with_capacity(idx.len());
    let start = Instant::now();
    for (c, chunk) in idx.chunks(CHUNK).enumerate() {
        let frames = ds.fetch(chunk)?;
        let rows: Vec<Vec<f32>> = frames
            .par_iter()
            .map(|f| {
                let v = ext.extract(f)?.values;
                Ok(match columns {
                    Some(cols) => cols.iter().map(|&j| v[j] as f32).collect(),
                    None => v.iter().map(|&x| x as f32).collect(),
                })
            })
            .collect::<Result<_>>()?;
        for (f, r) in frames.iter().zip(rows) {
            data.extend_from_slice(&r);
            labels.push(f.label);
            snr_db.push(f.snr_db);
        }
        if c % 40 == 39 {
            log::info!("extracted {}/{} frames ({:.1} s)", labels.len(), idx.len(), start.elapsed().as_secs_f64());
        }
    }
    Ok(Extracted { x: Matrix::new(idx.len(), width, data)?, labels, snr_db })
}

/// Evenly spaced picks from `idx` (which is in file order, so class-major).
fn spread(idx: &[usize], n: usize) -> Vec<usize> {
    let n = n.min(idx.len());
    (0..n).map(|i| idx[i * idx.len() / n]).collect()
}

/// Learns the pyramid dictionaries from a spread subset of `idx`, on
/// power-normalized frames (the extractor normalizes before coding).
pub fn learn_dictionaries(cfg: &RunConfig, ds: &mut Dataset, idx: &[usize]) -> Result<gamc_core::sparse::PyramidDictionaries> {
    let mut frames = ds.fetch(&spread(idx, cfg.dictionary.frames))?;
    frames.iter_mut().for_each(|f| normalize_power(&mut f.samples));
    Ok(learn_pyramid_dictionaries(&frames, &cfg.pyramid(), cfg.dictionary.iterations, cfg.dictionary.seed)?)
}

pub struct TrainOutcome {
    pub model: ModelFile,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

/// Train/test partition of a dataset under `cfg`: a stratified split, or
/// everything for training when a separate test file is configured.
pub fn partition(cfg: &RunConfig, ds: &mut Dataset) -> Result<(Vec<usize>, Vec<usize>)> {
    if cfg.data.test.is_some() {
        return Ok(((0..ds.len()).collect(), Vec::new()));
    }
    let tags = ds.tags()?;
    io::split_indices(&tags, cfg.data.train_fraction, cfg.data.split_seed)
}

pub fn train(cfg: &RunConfig, ds: &mut Dataset) -> Result<TrainOutcome> {
    cfg.validate()?;
    if ds.is_empty() {
        return Err(GamcError::MissingInput("training set holds no frames".into()));
    }
    let (train_idx, test_idx) = partition(cfg, ds)?;
    log::info!("{} training frames, {} held out", train_idx.len(), test_idx.len());

    let t = Instant::now();
    let dictionaries = learn_dictionaries(cfg, ds, &train_idx)?;
    log::info!("dictionaries learned in {:.1} s", t.elapsed().as_secs_f64());

    let pyramid = cfg.pyramid();
    let ext = FeatureExtractor::new(dictionaries, pyramid.clone())?;
    let t = Instant::now();
    let full = extract_rows(&ext, ds, &train_idx, None)?;
    log::info!("features extracted in {:.1} s", t.elapsed().as_secs_f64());

    let ids: Vec<usize> = full.labels.iter().map(|c| c.id() as usize).collect();
    let top_k = cfg.select.top_k.min(FEATURE_DIMS);
    let t = Instant::now();
    let selected = select_features(&full.x, &ids, top_k, cfg.select.n_bins)?;
    let x = full.x.select_columns(&selected)?;
    drop(full.x);
    log::info!("selected {} features in {:.1} s", selected.len(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let model = hier::train_hierarchy(&x, &full.labels, &cfg.boost(), &GroupMap::default())?;
    log::info!("hierarchy trained in {:.1} s", t.elapsed().as_secs_f64());

    let model = ModelFile {
        config_toml: cfg.to_toml(),
        layout_hash: layout_hash(&pyramid),
        pyramid,
        dictionaries: ext.dictionaries().clone(),
        selected_features: selected,
        model,
    };
    Ok(TrainOutcome { model, train_idx, test_idx })
}

pub fn extractor(m: &ModelFile) -> Result<FeatureExtractor> {
    Ok(FeatureExtractor::new(m.dictionaries.clone(), m.pyramid.clone())?)
}

/// Evaluates `m` on frames `idx` of `ds` and checks routing soundness.
pub fn evaluate(m: &ModelFile, ds: &mut Dataset, idx: &[usize]) -> Result<EvalReport> {
    if idx.is_empty() {
        return Err(GamcError::MissingInput("no test frames to evaluate".into()));
    }
    let ext = extractor(m)?;
    let data = extract_rows(&ext, ds, idx, Some(&m.selected_features))?;
    let report = hier::evaluate(&m.model, &data.x, &data.labels, &data.snr_db)?;
    for row in &report.rows {
        if row.overall_acc > row.coarse_acc {
            return Err(GamcError::Internal(format!(
                "overall accuracy {:.2} exceeds coarse accuracy {:.2} at {} dB",
                row.overall_acc, row.coarse_acc, row.snr_db
            )));
        }
    }
    Ok(report)
}

/// Coarse group and final class of each frame.
pub fn classify(m: &ModelFile, frames: &[IqFrame]) -> Result<Vec<(Group, ModClass)>> {
    let ext = extractor(m)?;
    frames
        .par_iter()
        .map(|f| {
            let v = ext.extract(f)?.values;
            let x: Vec<f32> = m.selected_features.iter().map(|&j| v[j] as f32).collect();
            Ok(hier::predict_detail(&m.model, &x)?)
        })
        .collect()
}

/// Classifies rows of a full-width feature matrix.
pub fn classify_features(m: &ModelFile, x: &Matrix) -> Result<Vec<(Group, ModClass)>> {
    if x.cols() != FEATURE_DIMS {
        return Err(GamcError::Format(format!("feature rows have {} columns, expected {FEATURE_DIMS}", x.cols())));
    }
    (0..x.rows())
        .map(|i| {
            let row = x.row(i);
            let sel: Vec<f32> = m.selected_features.iter().map(|&j| row[j]).collect();
            Ok(hier::predict_detail(&m.model, &sel)?)
        })
        .collect()
}
