//! Coarse four-group classifier with per-group refinement ensembles, and the
//! per-SNR evaluation protocol.

use crate::prelude::*;
use alloc::string::String;

use crate::error::{Error, Result};
use crate::gbt::{count_complexity, train_ensemble, BoostParams, Complexity, TreeEnsemble};
use crate::matrix::Matrix;
use crate::modclass::ModClass;

fn ix(c: ModClass) -> usize {
    c.id() as usize
}

/// Coarse modulation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Group {
    Amp = 0,
    Freq = 1,
    Phase = 2,
    Mixed = 3,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::Amp, Group::Freq, Group::Phase, Group::Mixed];
    /// Groups with a refinement stage, in R0, R1, R2 order.
    pub const REFINED: [Group; 3] = [Group::Amp, Group::Phase, Group::Mixed];

    pub fn id(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Option<Group> {
        Group::ALL.get(id).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Amp => "AMP",
            Group::Freq => "FREQ",
            Group::Phase => "PHASE",
            Group::Mixed => "MIXED",
        }
    }

    /// Index into the refinement slots, `None` for the terminal group.
    pub fn refinement_slot(self) -> Option<usize> {
        Group::REFINED.iter().position(|&g| g == self)
    }
}

/// Total mapping from modulation class to coarse group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    groups: [Group; ModClass::COUNT],
}

impl Default for GroupMap {
    fn default() -> Self {
        use ModClass::*;
        let mut groups = [Group::Mixed; ModClass::COUNT];
        for c in [Ook, Ask4, Ask8, AmSsbWc, AmSsbSc, AmDsbWc, AmDsbSc] {
            groups[ix(c)] = Group::Amp;
        }
        groups[ix(Fm)] = Group::Freq;
        for c in [Bpsk, Qpsk, Oqpsk, Psk8, Psk16, Psk32, Gmsk] {
            groups[ix(c)] = Group::Phase;
        }
        Self { groups }
    }
}

impl GroupMap {
    /// Builds a map from explicit per-class groups (indexed by class id).
    /// The terminal group must hold exactly one class.
    pub fn from_groups(groups: [Group; ModClass::COUNT]) -> Result<Self> {
        let map = Self { groups };
        if map.members(Group::Freq).len() != 1 {
            return Err(Error::InvalidConfig("the FREQ group must contain exactly one class"));
        }
        Ok(map)
    }

    pub fn group_of(&self, class: ModClass) -> Group {
        self.groups[ix(class)]
    }

    pub fn members(&self, group: Group) -> Vec<ModClass> {
        ModClass::ALL.iter().copied().filter(|&c| self.group_of(c) == group).collect()
    }

    pub fn as_array(&self) -> &[Group; ModClass::COUNT] {
        &self.groups
    }
}

/// Second-stage classifier of one group.
#[derive(Debug, Clone, PartialEq)]
pub enum Refinement {
    Ensemble(TreeEnsemble),
    /// Only one class of the group was seen in training.
    Single(ModClass),
    /// No training sample belonged to the group.
    Skipped,
}

impl Refinement {
    pub fn ensemble(&self) -> Option<&TreeEnsemble> {
        match self {
            Refinement::Ensemble(e) => Some(e),
            _ => None,
        }
    }

    fn predict<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<Option<ModClass>> {
        match self {
            Refinement::Ensemble(e) => {
                let id = e.predict_class(x)?;
                Ok(ModClass::from_id(id as u16))
            }
            Refinement::Single(c) => Ok(Some(*c)),
            Refinement::Skipped => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalModel {
    /// Predicts group ids.
    pub coarse: TreeEnsemble,
    /// R0 (AMP), R1 (PHASE), R2 (MIXED).
    pub refinements: [Refinement; 3],
    pub group_map: GroupMap,
    /// Warnings raised while training, kept with the model.
    pub notes: Vec<String>,
}

impl HierarchicalModel {
    pub fn n_features(&self) -> usize {
        self.coarse.n_features
    }

    pub fn refinement(&self, group: Group) -> Option<&Refinement> {
        group.refinement_slot().map(|s| &self.refinements[s])
    }

    /// Class seen by the terminal group during training, if any.
    pub fn terminal_class(&self) -> Option<ModClass> {
        self.group_map.members(Group::Freq).first().copied()
    }
}

/// Trains the coarse ensemble on group labels over all samples and each
/// refinement on the samples whose true group matches it.
pub fn train_hierarchy(x: &Matrix, labels: &[ModClass], params: &BoostParams, group_map: &GroupMap) -> Result<HierarchicalModel> {
    if x.rows() == 0 {
        return Err(Error::EmptyInput("no training samples"));
    }
    if labels.len() != x.rows() {
        return Err(Error::ShapeError { expected: x.rows(), got: labels.len() });
    }
    let groups: Vec<usize> = labels.iter().map(|&c| group_map.group_of(c).id()).collect();
    let coarse = train_ensemble(x, &groups, params, 0)?;
    let mut notes = Vec::new();
    for g in Group::ALL {
        if !groups.contains(&g.id()) {
            let msg = alloc::format!("group {} has no training samples", g.name());
            log::warn!("{msg}");
            notes.push(msg);
        }
    }

    let mut refinements = [Refinement::Skipped, Refinement::Skipped, Refinement::Skipped];
    for (slot, &g) in Group::REFINED.iter().enumerate() {
        let rows: Vec<usize> = (0..x.rows()).filter(|&i| groups[i] == g.id()).collect();
        let mut classes: Vec<ModClass> = rows.iter().map(|&i| labels[i]).collect();
        classes.sort();
        classes.dedup();
        refinements[slot] = match classes.len() {
            0 => {
                let msg = alloc::format!("refinement for {} skipped: no samples", g.name());
                log::warn!("{msg}");
                notes.push(msg);
                Refinement::Skipped
            }
            1 => {
                let msg = alloc::format!("refinement for {} holds the single class {}", g.name(), classes[0]);
                log::warn!("{msg}");
                notes.push(msg);
                Refinement::Single(classes[0])
            }
            _ => {
                let sub = x.select_rows(&rows);
                let y: Vec<usize> = rows.iter().map(|&i| ix(labels[i])).collect();
                Refinement::Ensemble(train_ensemble(&sub, &y, params, 0)?)
            }
        };
    }
    Ok(HierarchicalModel { coarse, refinements, group_map: group_map.clone(), notes })
}

/// Coarse group and final class of one (already feature-selected) vector.
pub fn predict_detail<T: Copy + Into<f64>>(model: &HierarchicalModel, x: &[T]) -> Result<(Group, ModClass)> {
    let gid = model.coarse.predict_class(x)?;
    let group = Group::from_id(gid).ok_or(Error::InvalidConfig("coarse ensemble predicts an unknown group"))?;
    let class = match model.refinement(group) {
        None => model.terminal_class().ok_or(Error::InvalidConfig("terminal group is empty"))?,
        Some(r) => r.predict(x)?.ok_or(Error::InvalidConfig("coarse stage routed to a skipped refinement"))?,
    };
    Ok((group, class))
}

pub fn predict_hierarchy<T: Copy + Into<f64>>(model: &HierarchicalModel, x: &[T]) -> Result<ModClass> {
    predict_detail(model, x).map(|(_, c)| c)
}

/// One SNR level of an evaluation. Accuracies are percentages.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub snr_db: f64,
    pub n: usize,
    pub coarse_acc: f64,
    /// R0, R1, R2 accuracy on samples whose true group matches; `None`
    /// when the level holds no such sample or the stage was skipped.
    pub refine_acc: [Option<f64>; 3],
    pub overall_acc: f64,
    /// `confusion[true * 24 + predicted]` counts.
    pub confusion: Vec<u64>,
}

impl EvalRow {
    pub fn confusion_at(&self, truth: ModClass, predicted: ModClass) -> u64 {
        self.confusion[ix(truth) * ModClass::COUNT + ix(predicted)]
    }

    /// Test samples of `truth` at this level.
    pub fn class_count(&self, truth: ModClass) -> u64 {
        let r = ix(truth) * ModClass::COUNT;
        self.confusion[r..r + ModClass::COUNT].iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    /// Ascending SNR.
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn row(&self, snr_db: f64) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.snr_db == snr_db)
    }

    /// Sample-weighted overall accuracy across every row.
    pub fn mean_overall(&self) -> f64 {
        let n: usize = self.rows.iter().map(|r| r.n).sum();
        if n == 0 {
            return 0.0;
        }
        self.rows.iter().map(|r| r.overall_acc * r.n as f64).sum::<f64>() / n as f64
    }
}

fn pct(hit: usize, n: usize) -> f64 {
    100.0 * hit as f64 / n as f64
}

/// Per-SNR accuracies and confusion matrices. Rows of `x` must already be
/// restricted to the model's selected features.
pub fn evaluate(model: &HierarchicalModel, x: &Matrix, labels: &[ModClass], snr_db: &[f64]) -> Result<EvalReport> {
    if labels.len() != x.rows() || snr_db.len() != x.rows() {
        return Err(Error::ShapeError { expected: x.rows(), got: labels.len().min(snr_db.len()) });
    }
    let mut levels: Vec<f64> = snr_db.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let mut rows = Vec::with_capacity(levels.len());
    for &snr in &levels {
        let idx: Vec<usize> = (0..x.rows()).filter(|&i| snr_db[i] == snr).collect();
        let mut coarse_hit = 0;
        let mut overall_hit = 0;
        let mut r_hit = [0usize; 3];
        let mut r_n = [0usize; 3];
        let mut confusion = vec![0u64; ModClass::COUNT * ModClass::COUNT];
        for &i in &idx {
            let row = x.row(i);
            let truth = labels[i];
            let true_group = model.group_map.group_of(truth);
            let (group, pred) = predict_detail(model, row)?;
            coarse_hit += (group == true_group) as usize;
            overall_hit += (pred == truth) as usize;
            confusion[ix(truth) * ModClass::COUNT + ix(pred)] += 1;
            if let Some(slot) = true_group.refinement_slot() {
                if let Some(p) = model.refinements[slot].predict(row)? {
                    r_n[slot] += 1;
                    r_hit[slot] += (p == truth) as usize;
                }
            }
        }
        let n = idx.len();
        let mut refine_acc = [None; 3];
        for s in 0..3 {
            if r_n[s] > 0 {
                refine_acc[s] = Some(pct(r_hit[s], r_n[s]));
            }
        }
        rows.push(EvalRow {
            snr_db: snr,
            n,
            coarse_acc: pct(coarse_hit, n),
            refine_acc,
            overall_acc: pct(overall_hit, n),
            confusion,
        });
    }
    Ok(EvalReport { rows })
}

/// Size and cost of the whole hierarchy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyComplexity {
    /// Coarse, then R0, R1, R2 (zero for non-ensemble stages).
    pub stages: [Complexity; 4],
    pub param_count: usize,
    /// Coarse stage plus the most expensive refinement: the worst-case
    /// classifier path of one inference.
    pub classifier_flops: usize,
}

pub fn count_hierarchy_complexity(model: &HierarchicalModel) -> HierarchyComplexity {
    let mut stages = [Complexity::default(); 4];
    stages[0] = count_complexity(&model.coarse);
    for (s, r) in model.refinements.iter().enumerate() {
        if let Some(e) = r.ensemble() {
            stages[s + 1] = count_complexity(e);
        }
    }
    let param_count = stages.iter().map(|c| c.param_count).sum();
    let worst = stages[1..].iter().map(|c| c.flops_per_inference).max().unwrap_or(0);
    HierarchyComplexity { stages, param_count, classifier_flops: stages[0].flops_per_inference + worst }
}

/// Average ranks (1-based), ties share the mean of their positions.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            r[t] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// Returns 0 when either input is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return 0.0;
    }
    let (rx, ry) = (ranks(&x[..n]), ranks(&y[..n]));
    let mean = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (a, b) = (rx[i] - mean, ry[i] - mean);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}
