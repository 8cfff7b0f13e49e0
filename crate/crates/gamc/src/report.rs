//! Text and CSV renderings of evaluation and complexity results.

use std::fmt::Write;

use gamc_core::features::extraction_flops;
use gamc_core::gbt::Complexity;
use gamc_core::hier::{count_hierarchy_complexity, EvalReport, EvalRow, Refinement};
use gamc_core::ModClass;

use crate::io::{ModelFile, MODEL_VERSION};

/// Overall accuracy (%) by SNR published for G-AMC on RadioML 2018.01A.
/// Reference constants only; synthetic runs are not expected to match.
pub const REFERENCE_OVERALL: [(f64, f64); 16] = [
    (-10.0, 8.69),
    (-8.0, 16.24),
    (-6.0, 23.37),
    (-4.0, 29.36),
    (-2.0, 35.29),
    (0.0, 44.73),
    (2.0, 56.42),
    (4.0, 64.95),
    (6.0, 71.97),
    (8.0, 76.55),
    (10.0, 79.51),
    (12.0, 81.32),
    (14.0, 82.14),
    (16.0, 82.61),
    (18.0, 83.15),
    (20.0, 83.27),
];

/// Published classifier-only FLOPs and parameter count for G-AMC.
pub const REFERENCE_FLOPS: usize = 8_100;
pub const REFERENCE_PARAMS: usize = 27_000;

pub fn reference_overall(snr_db: f64) -> Option<f64> {
    REFERENCE_OVERALL.iter().find(|r| r.0 == snr_db).map(|r| r.1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportMeta {
    pub model_version: u32,
    pub config_hash: String,
    pub layout_hash: u64,
}

impl ReportMeta {
    pub fn of(m: &ModelFile) -> Self {
        Self { model_version: MODEL_VERSION, config_hash: m.config_hash(), layout_hash: m.layout_hash }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

/// Per-SNR table: SNR, Coarse, R0, R1, R2, Overall, then the published
/// overall accuracy for comparison and the sample count.
pub fn render_text(r: &EvalReport, meta: &ReportMeta) -> String {
    let mut s = String::new();
    let n: usize = r.rows.iter().map(|x| x.n).sum();
    writeln!(s, "G-AMC evaluation").unwrap();
    writeln!(s, "model version  {}", meta.model_version).unwrap();
    writeln!(s, "config hash    {}", meta.config_hash).unwrap();
    writeln!(s, "layout hash    {:016x}", meta.layout_hash).unwrap();
    writeln!(s, "test frames    {n}").unwrap();
    writeln!(s).unwrap();
    writeln!(
        s,
        "{:>6} {:>9} {:>7} {:>7} {:>7} {:>10} {:>14} {:>7}",
        "SNR", "Coarse %", "R0 %", "R1 %", "R2 %", "Overall %", "RadioML ref %", "N"
    )
    .unwrap();
    for row in &r.rows {
        writeln!(
            s,
            "{:>6} {:>9.2} {:>7} {:>7} {:>7} {:>10.2} {:>14} {:>7}",
            row.snr_db,
            row.coarse_acc,
            opt(row.refine_acc[0]),
            opt(row.refine_acc[1]),
            opt(row.refine_acc[2]),
            row.overall_acc,
            opt(reference_overall(row.snr_db)),
            row.n
        )
        .unwrap();
    }
    writeln!(s, "{:>6} {:>9} {:>7} {:>7} {:>7} {:>10.2} {:>14} {:>7}", "all", "", "", "", "", r.mean_overall(), "", n).unwrap();
    s
}

pub fn render_csv(r: &EvalReport, meta: &ReportMeta) -> String {
    let mut s = String::new();
    writeln!(s, "# model_version={} config_hash={} layout_hash={:016x}", meta.model_version, meta.config_hash, meta.layout_hash)
        .unwrap();
    writeln!(s, "snr_db,coarse_pct,r0_pct,r1_pct,r2_pct,overall_pct,n").unwrap();
    let cell = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.4}"));
    for row in &r.rows {
        writeln!(
            s,
            "{},{:.4},{},{},{},{:.4},{}",
            row.snr_db,
            row.coarse_acc,
            cell(row.refine_acc[0]),
            cell(row.refine_acc[1]),
            cell(row.refine_acc[2]),
            row.overall_acc,
            row.n
        )
        .unwrap();
    }
    s
}

/// 24×24 counts, rows are true classes, columns predicted.
pub fn render_confusion_csv(row: &EvalRow) -> String {
    let mut s = String::from("true\\pred");
    for c in ModClass::ALL {
        s.push(',');
        s.push_str(c.name());
    }
    s.push('\n');
    for t in ModClass::ALL {
        s.push_str(t.name());
        for p in ModClass::ALL {
            write!(s, ",{}", row.confusion_at(t, p)).unwrap();
        }
        s.push('\n');
    }
    s
}

/// Summary for `gamc flops`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityReport {
    pub stages: Vec<(&'static str, usize, usize, Complexity)>,
    pub param_count: usize,
    pub classifier_flops: usize,
    pub extraction_flops: usize,
}

impl ComplexityReport {
    pub fn pipeline_flops(&self) -> usize {
        self.classifier_flops + self.extraction_flops
    }
}

pub fn complexity(m: &ModelFile) -> ComplexityReport {
    let h = count_hierarchy_complexity(&m.model);
    let mut stages = vec![("coarse", m.model.coarse.n_classes, m.model.coarse.trees.len(), h.stages[0])];
    for (i, (name, r)) in ["R0", "R1", "R2"].into_iter().zip(&m.model.refinements).enumerate() {
        let (k, t) = match r {
            Refinement::Ensemble(e) => (e.n_classes, e.trees.len()),
            Refinement::Single(_) => (1, 0),
            Refinement::Skipped => (0, 0),
        };
        stages.push((name, k, t, h.stages[i + 1]));
    }
    ComplexityReport {
        stages,
        param_count: h.param_count,
        classifier_flops: h.classifier_flops,
        extraction_flops: extraction_flops(&m.pyramid),
    }
}

pub fn render_complexity(c: &ComplexityReport, meta: &ReportMeta) -> String {
    let mut s = String::new();
    writeln!(s, "G-AMC model complexity").unwrap();
    writeln!(s, "model version  {}", meta.model_version).unwrap();
    writeln!(s, "config hash    {}", meta.config_hash).unwrap();
    writeln!(s).unwrap();
    writeln!(s, "{:<8} {:>7} {:>7} {:>9} {:>9}", "stage", "classes", "trees", "params", "FLOPs").unwrap();
    for (name, k, t, cx) in &c.stages {
        writeln!(s, "{:<8} {:>7} {:>7} {:>9} {:>9}", name, k, t, cx.param_count, cx.flops_per_inference).unwrap();
    }
    writeln!(s).unwrap();
    writeln!(s, "parameters (all stages)           {:>10}   reference {REFERENCE_PARAMS}", c.param_count).unwrap();
    writeln!(s, "classifier-only FLOPs (worst path) {:>9}   reference {REFERENCE_FLOPS}", c.classifier_flops).unwrap();
    writeln!(s, "feature extraction FLOPs (approx.) {:>9}", c.extraction_flops).unwrap();
    writeln!(s, "pipeline total FLOPs               {:>9}", c.pipeline_flops()).unwrap();
    s
}
