use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gamc_core::features::{layout_hash, layout_ranges, FeatureExtractor};
use gamc_core::select::rank_features;

use crate::config::RunConfig;
use crate::error::{GamcError, Result};
use crate::io::{self, FeatureTable, FrameWriter};
use crate::pipeline::{self, Dataset};
use crate::report::{self, ReportMeta};

#[derive(Debug, Parser)]
#[command(name = "gamc", version, about = "Green automatic modulation classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic frame file.
    Gen {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train dictionaries, select features and fit the hierarchy.
    Train {
        #[command(flatten)]
        run: RunArgs,
        /// Frame file to train on (default: synthetic frames from the config).
        #[arg(long)]
        frames: Option<PathBuf>,
        /// Separate test file; disables the internal split.
        #[arg(long)]
        test_frames: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also evaluate on the held-out split and write reports here.
        #[arg(long)]
        report_dir: Option<PathBuf>,
    },
    /// Evaluate a model per SNR.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Frames to evaluate (default: the source recorded in the model).
        #[arg(long)]
        frames: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Part::Auto)]
        part: Part,
        /// Directory for report.txt, report.csv and confusion matrices.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print the predicted class of every frame (or feature row).
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, conflicts_with = "features", required_unless_present = "features")]
        frames: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Report parameter counts and per-inference FLOPs of a model.
    Flops {
        #[arg(long)]
        model: PathBuf,
    },
    /// Write full 1730-dim feature vectors, or print the block layout.
    DumpFeatures {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, required_unless_present = "dump_layout")]
        frames: Option<PathBuf>,
        /// Take dictionaries from this model instead of learning them.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, required_unless_present = "dump_layout")]
        out: Option<PathBuf>,
        /// Print the block to index-range table.
        #[arg(long)]
        dump_layout: bool,
    },
    /// Rank the columns of a feature file by DFT loss.
    Select {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long, default_value_t = gamc_core::select::DEFAULT_BINS)]
        bins: usize,
    },
}

/// Which frames of the evaluation source to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Part {
    /// Held-out split of the training source, or all of a separate test file.
    Auto,
    Test,
    Train,
    All,
}

/// Config file plus command-line overrides.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated class names.
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<String>>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snrs: Option<Vec<f64>>,
    #[arg(long)]
    pub frames_per_cell: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub fading: Option<bool>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub dict_frames: Option<usize>,
    #[arg(long)]
    pub dict_iterations: Option<usize>,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.classes {
            c.data.classes = v.clone();
        }
        if let Some(v) = &self.snrs {
            c.data.snr_grid = v.clone();
        }
        if let Some(v) = self.frames_per_cell {
            c.data.frames_per_cell = v;
        }
        if let Some(v) = self.seed {
            c.data.seed = v;
        }
        if let Some(v) = self.fading {
            c.data.fading = v;
        }
        if let Some(v) = self.train_fraction {
            c.data.train_fraction = v;
        }
        if let Some(v) = self.top_k {
            c.select.top_k = v;
        }
        if let Some(v) = self.rounds {
            c.boost.n_rounds = v;
        }
        if let Some(v) = self.dict_frames {
            c.dictionary.frames = v;
        }
        if let Some(v) = self.dict_iterations {
            c.dictionary.iterations = v;
        }
        c.validate()?;
        Ok(c)
    }
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(GamcError::MissingInput(path.display().to_string()))
    }
}

/// Honors `GAMC_THREADS` for the global worker pool.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GAMC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| GamcError::Config(format!("GAMC_THREADS must be a positive integer, got '{v}'")))?;
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Gen { run, out: path } => {
            let cfg = run.resolve()?;
            let mut ds = Dataset::synthetic(&cfg)?;
            let mut w = FrameWriter::create(&path)?;
            let all: Vec<usize> = (0..ds.len()).collect();
            for chunk in all.chunks(1024) {
                for f in ds.fetch(chunk)? {
                    w.write(&f)?;
                }
            }
            let n = w.count();
            w.finish()?;
            writeln!(out, "wrote {n} frames to {}", path.display())?;
        }
        Command::Train { run, frames, test_frames, out: path, report_dir } => {
            let mut cfg = run.resolve()?;
            if let Some(f) = &frames {
                require(f)?;
                cfg.data.train = Some(f.display().to_string());
            }
            if let Some(f) = &test_frames {
                require(f)?;
                cfg.data.test = Some(f.display().to_string());
            }
            let mut ds = Dataset::for_training(&cfg)?;
            let outcome = pipeline::train(&cfg, &mut ds)?;
            io::write_model(&path, &outcome.model)?;
            writeln!(out, "model written to {} (config hash {})", path.display(), outcome.model.config_hash())?;
            if let Some(dir) = report_dir {
                let report = match &cfg.data.test {
                    Some(t) => {
                        let mut test = Dataset::open(Path::new(t))?;
                        let idx: Vec<usize> = (0..test.len()).collect();
                        pipeline::evaluate(&outcome.model, &mut test, &idx)?
                    }
                    None => pipeline::evaluate(&outcome.model, &mut ds, &outcome.test_idx)?,
                };
                write_reports(&dir, &report, &ReportMeta::of(&outcome.model))?;
                write!(out, "{}", report::render_text(&report, &ReportMeta::of(&outcome.model)))?;
            }
        }
        Command::Eval { model, frames, part, out_dir } => {
            let m = io::read_model(&model)?;
            let cfg = m.config()?;
            let (mut ds, separate) = match (&frames, &cfg.data.test, &cfg.data.train) {
                (Some(f), _, _) => {
                    let separate = cfg.data.train.as_deref() != Some(&f.display().to_string());
                    (Dataset::open(f)?, separate)
                }
                (None, Some(t), _) => (Dataset::open(Path::new(t))?, true),
                (None, None, Some(t)) => (Dataset::open(Path::new(t))?, false),
                (None, None, None) => (Dataset::synthetic(&cfg)?, false),
            };
            let idx = match (part, separate) {
                (Part::All, _) | (Part::Auto, true) => (0..ds.len()).collect(),
                (Part::Test, _) | (Part::Auto, false) => {
                    io::split_indices(&ds.tags()?, cfg.data.train_fraction, cfg.data.split_seed)?.1
                }
                (Part::Train, _) => io::split_indices(&ds.tags()?, cfg.data.train_fraction, cfg.data.split_seed)?.0,
            };
            let report = pipeline::evaluate(&m, &mut ds, &idx)?;
            let meta = ReportMeta::of(&m);
            if let Some(dir) = out_dir {
                write_reports(&dir, &report, &meta)?;
            }
            write!(out, "{}", report::render_text(&report, &meta))?;
        }
        Command::Classify { model, frames, features } => {
            let m = io::read_model(&model)?;
            let (preds, truth) = match (frames, features) {
                (Some(f), _) => {
                    let frames = io::read_frames(&f)?;
                    (pipeline::classify(&m, &frames)?, frames.iter().map(|f| f.label).collect::<Vec<_>>())
                }
                (None, Some(f)) => {
                    let t = io::read_features(&f)?;
                    if t.layout_hash != m.layout_hash {
                        return Err(GamcError::LayoutMismatch { expected: m.layout_hash, got: t.layout_hash });
                    }
                    (pipeline::classify_features(&m, &t.x)?, t.labels)
                }
                (None, None) => return Err(GamcError::Config("either --frames or --features is required".into())),
            };
            writeln!(out, "index,true,group,predicted")?;
            for (i, ((g, p), t)) in preds.iter().zip(&truth).enumerate() {
                writeln!(out, "{i},{},{},{}", t.name(), g.name(), p.name())?;
            }
        }
        Command::Flops { model } => {
            let m = io::read_model(&model)?;
            write!(out, "{}", report::render_complexity(&report::complexity(&m), &ReportMeta::of(&m)))?;
        }
        Command::DumpFeatures { run, frames, model, out: path, dump_layout } => {
            if dump_layout {
                writeln!(out, "block,start,end,dims")?;
                for (name, r) in layout_ranges() {
                    writeln!(out, "{name},{},{},{}", r.start, r.end, r.len())?;
                }
            }
            if let (Some(frames), Some(path)) = (frames, path) {
                let mut ds = Dataset::open(&frames)?;
                let idx: Vec<usize> = (0..ds.len()).collect();
                let ext = match model {
                    Some(mp) => pipeline::extractor(&io::read_model(&mp)?)?,
                    None => {
                        let cfg = run.resolve()?;
                        FeatureExtractor::new(pipeline::learn_dictionaries(&cfg, &mut ds, &idx)?, cfg.pyramid())?
                    }
                };
                let data = pipeline::extract_rows(&ext, &mut ds, &idx, None)?;
                let table = FeatureTable {
                    layout_hash: layout_hash(ext.config()),
                    x: data.x,
                    labels: data.labels,
                    snr_db: data.snr_db,
                };
                io::write_features(&path, &table)?;
                writeln!(out, "wrote {} feature rows to {}", table.x.rows(), path.display())?;
            }
        }
        Command::Select { features, top_k, bins } => {
            let t = io::read_features(&features)?;
            let scores = rank_features(&t.x, &t.label_ids(), bins)?;
            let k = top_k.unwrap_or(scores.len()).min(scores.len());
            let ranges = layout_ranges();
            writeln!(out, "rank,feature,block,loss_bits")?;
            for s in &scores[..k] {
                let block = ranges.iter().find(|(_, r)| r.contains(&s.feature_index)).map_or("-", |b| b.0);
                writeln!(out, "{},{},{},{:.6}", s.rank, s.feature_index, block, s.loss)?;
            }
        }
    }
    Ok(())
}

/// Writes report.txt, report.csv and one confusion CSV per SNR level.
pub fn write_reports(dir: &Path, r: &gamc_core::hier::EvalReport, meta: &ReportMeta) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.txt"), report::render_text(r, meta))?;
    fs::write(dir.join("report.csv"), report::render_csv(r, meta))?;
    for row in &r.rows {
        fs::write(dir.join(format!("confusion_snr_{}.csv", row.snr_db)), report::render_confusion_csv(row))?;
    }
    Ok(())
}
