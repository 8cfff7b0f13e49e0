//! Exact greedy second-order boosting with level-wise tree growth.
//!
//! All trees of one round are grown together, so every presorted column is
//! scanned once per level regardless of the class count.

use crate::prelude::*;

use super::tree::{Node, RegressionTree};
use super::{BoostParams, TreeEnsemble};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Node id of a sample that already reached a leaf in this tree.
const INACTIVE: u16 = u16::MAX;

/// Splits must improve the objective by more than this.
pub const MIN_SPLIT_GAIN: f64 = 1e-12;
/// Relative margin a later candidate's split score needs to displace the
/// current best. Candidates within it count as ties and keep the lower
/// (feature, threshold).
pub const GAIN_TIE_TOL: f64 = 1e-12;

/// `0.5·(G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ))`.
#[inline]
pub fn split_gain(gl: f64, hl: f64, g: f64, h: f64, lambda: f64) -> f64 {
    let gr = g - gl;
    let hr = h - hl;
    0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda))
}

/// `−G/(H+λ)`, with an empty denominator mapped to zero.
#[inline]
pub fn leaf_weight(g: f64, h: f64, lambda: f64) -> f64 {
    let d = h + lambda;
    if d > 0.0 {
        -g / d
    } else {
        0.0
    }
}

/// Row indices of every column sorted by `(value, row)`.
pub(crate) fn presort(x: &Matrix) -> Vec<Vec<(f32, u32)>> {
    let sort_col = |j: usize| {
        let mut col: Vec<(f32, u32)> = (0..x.rows()).map(|i| (x.get(i, j), i as u32)).collect();
        col.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        col
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..x.cols()).into_par_iter().map(sort_col).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..x.cols()).map(sort_col).collect()
    }
}

/// Best split seen so far for one node, by split score
/// `G_L²/(H_L+λ) + G_R²/(H_R+λ)`. The no-split baseline is the parent's own
/// score `G²/(H+λ)`.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    score: f64,
    feature: u32,
    lo: f32,
    hi: f32,
}

impl Candidate {
    fn parent(g: f64, h: f64, lambda: f64) -> Self {
        let d = h + lambda;
        let score = if d > 0.0 { g * g / d } else { 0.0 };
        Candidate { score, feature: u32::MAX, lo: 0.0, hi: 0.0 }
    }

    fn threshold(&self) -> f64 {
        0.5 * (self.lo as f64 + self.hi as f64)
    }
}

#[inline]
fn beats(score: f64, best: f64) -> bool {
    score > best * (1.0 + GAIN_TIE_TOL)
}

/// Running state of one node during a column scan.
#[derive(Clone, Copy)]
struct Slot {
    gl: f64,
    hl: f64,
    g: f64,
    h: f64,
    last: f32,
    best: f64,
    /// Score a later candidate must exceed to replace `best`.
    bar: f64,
    lo: f32,
    hi: f32,
    found: bool,
}

impl Slot {
    #[inline(always)]
    fn visit(&mut self, v: f32, g: f32, h: f32, lambda: f64, mcw: f64) {
        let hr = self.h - self.hl;
        // sorted input makes both tests predictable: ties are runs, and the
        // child-weight test flips at most twice per scan
        if v > self.last && self.hl.min(hr) >= mcw {
            let gr = self.g - self.gl;
            let (dl, dr) = (self.hl + lambda, hr + lambda);
            // `score > bar` without dividing: both denominators are positive
            if self.gl * self.gl * dr + gr * gr * dl > self.bar * (dl * dr) {
                let score = self.gl * self.gl / dl + gr * gr / dr;
                self.best = score;
                self.bar = score * (1.0 + GAIN_TIE_TOL);
                self.lo = self.last;
                self.hi = v;
                self.found = true;
            }
        }
        self.gl += g as f64;
        self.hl += h as f64;
        self.last = v;
    }
}

struct Level<'a> {
    k: usize,
    slots_per_tree: usize,
    node_of: &'a [u16],
    /// `(g, h)` per `(sample, class)`.
    gh: &'a [(f32, f32)],
    /// Every sample sits in node 0 of every tree.
    single_root: bool,
    totals: &'a [(f64, f64)],
    params: &'a BoostParams,
}

impl Level<'_> {
    fn baseline(&self) -> Vec<Candidate> {
        self.totals.iter().map(|&(g, h)| Candidate::parent(g, h, self.params.l2_reg)).collect()
    }

    /// Best split of every slot along one presorted column.
    fn scan(&self, feature: u32, col: &[(f32, u32)]) -> Vec<Candidate> {
        let (lambda, mcw) = (self.params.l2_reg, self.params.min_child_weight);
        let mut slots: Vec<Slot> = self
            .totals
            .iter()
            .map(|&(g, h)| Slot {
                gl: 0.0,
                hl: 0.0,
                g,
                h,
                // NaN: the first sample of a node never opens a candidate
                last: f32::NAN,
                best: Candidate::parent(g, h, lambda).score,
                bar: Candidate::parent(g, h, lambda).score * (1.0 + GAIN_TIE_TOL),
                lo: 0.0,
                hi: 0.0,
                found: false,
            })
            .collect();
        let k = self.k;
        let spt = self.slots_per_tree;
        if self.single_root {
            for &(v, i) in col {
                let base = i as usize * k;
                for (st, &(g, h)) in slots.iter_mut().zip(&self.gh[base..base + k]) {
                    st.visit(v, g, h, lambda, mcw);
                }
            }
        } else {
            for &(v, i) in col {
                let base = i as usize * k;
                let nodes = &self.node_of[base..base + k];
                let gh = &self.gh[base..base + k];
                for c in 0..k {
                    let nd = nodes[c];
                    if nd != INACTIVE {
                        slots[c * spt + nd as usize].visit(v, gh[c].0, gh[c].1, lambda, mcw);
                    }
                }
            }
        }
        slots
            .iter()
            .zip(self.baseline())
            .map(|(st, base)| {
                if st.found {
                    Candidate { score: st.best, feature, lo: st.lo, hi: st.hi }
                } else {
                    base
                }
            })
            .collect()
    }

    fn best_splits(&self, sorted: &[Vec<(f32, u32)>]) -> Vec<Candidate> {
        let per_feature = |(j, col): (usize, &Vec<(f32, u32)>)| self.scan(j as u32, col);
        #[cfg(feature = "parallel")]
        let all: Vec<Vec<Candidate>> = {
            use rayon::prelude::*;
            sorted.par_iter().enumerate().map(per_feature).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let all: Vec<Vec<Candidate>> = sorted.iter().enumerate().map(per_feature).collect();

        // fixed feature order keeps the result independent of the schedule
        let mut best = self.baseline();
        for cands in all {
            for (b, c) in best.iter_mut().zip(cands) {
                if c.feature != u32::MAX && beats(c.score, b.score) {
                    *b = c;
                }
            }
        }
        best
    }
}

/// Softmax of each row of `margins` (row length `k`) into `out`.
pub(crate) fn softmax_rows(margins: &[f64], k: usize, out: &mut [f64]) {
    for (m, p) in margins.chunks_exact(k).zip(out.chunks_exact_mut(k)) {
        softmax_into(m, p);
    }
}

pub(crate) fn softmax_into(m: &[f64], p: &mut [f64]) {
    let mx = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for (pi, &mi) in p.iter_mut().zip(m) {
        *pi = (mi - mx).exp();
        z += *pi;
    }
    for pi in p.iter_mut() {
        *pi /= z;
    }
}

/// Mean multiclass log-loss of `margins` against internal class indices.
pub(crate) fn log_loss(margins: &[f64], y: &[usize], k: usize) -> f64 {
    let mut total = 0.0;
    for (m, &yi) in margins.chunks_exact(k).zip(y) {
        let mx = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = mx + m.iter().map(|&v| (v - mx).exp()).sum::<f64>().ln();
        total += lse - m[yi];
    }
    total / y.len() as f64
}

/// Grows one round of `k` trees from the current gradients and adds their
/// outputs to `margins`.
fn grow_round(
    x: &Matrix,
    sorted: &[Vec<(f32, u32)>],
    gh: &[(f32, f32)],
    node_of: &mut [u16],
    margins: &mut [f64],
    k: usize,
    params: &BoostParams,
) -> Vec<RegressionTree> {
    let n = x.rows();
    let mut trees: Vec<Vec<Node>> = (0..k).map(|_| vec![Node::Leaf { value: 0.0 }]).collect();
    // node-array position of each active node at the current level, per tree
    let mut frontier: Vec<Vec<usize>> = vec![vec![0]; k];
    let lambda = params.l2_reg;

    for depth in 0..=params.max_depth {
        let spt = frontier.iter().map(Vec::len).max().unwrap_or(0);
        if spt == 0 {
            break;
        }
        let n_slots = k * spt;
        let mut totals = vec![(0.0f64, 0.0f64); n_slots];
        for i in 0..n {
            for c in 0..k {
                let nd = node_of[i * k + c];
                if nd != INACTIVE {
                    let t = &mut totals[c * spt + nd as usize];
                    t.0 += gh[i * k + c].0 as f64;
                    t.1 += gh[i * k + c].1 as f64;
                }
            }
        }

        // nodes that cannot split become leaves before the scan
        let mut splittable = vec![false; n_slots];
        let mut any = false;
        if depth < params.max_depth {
            for c in 0..k {
                for local in 0..frontier[c].len() {
                    let s = c * spt + local;
                    splittable[s] = totals[s].1 >= 2.0 * params.min_child_weight;
                    any |= splittable[s];
                }
            }
        }
        if any {
            for i in 0..n {
                for c in 0..k {
                    let nd = node_of[i * k + c];
                    if nd != INACTIVE && !splittable[c * spt + nd as usize] {
                        node_of[i * k + c] = INACTIVE;
                        margins[i * k + c] += params.learning_rate * leaf_weight_of(&totals, c * spt + nd as usize, lambda);
                    }
                }
            }
        }
        let single_root = spt == 1 && splittable.iter().all(|&b| b);
        let level = Level { k, slots_per_tree: spt, node_of: &*node_of, gh, single_root, totals: &totals, params };
        let best = if any { level.best_splits(sorted) } else { level.baseline() };
        // (feature, threshold) of every slot that splits
        let split: Vec<Option<(u32, f64)>> = best
            .iter()
            .zip(&totals)
            .zip(&splittable)
            .map(|((cand, &(g, h)), &ok)| {
                let gain = 0.5 * (cand.score - Candidate::parent(g, h, lambda).score);
                (ok && cand.feature != u32::MAX && gain > MIN_SPLIT_GAIN).then(|| (cand.feature, cand.threshold()))
            })
            .collect();

        let mut next: Vec<Vec<usize>> = vec![Vec::new(); k];
        // local child ids of each slot that splits: (left, right)
        let mut child = vec![(INACTIVE, INACTIVE); n_slots];
        for c in 0..k {
            for (local, &pos) in frontier[c].iter().enumerate() {
                let s = c * spt + local;
                if let Some((feature, threshold)) = split[s] {
                    let l = trees[c].len();
                    trees[c].push(Node::Leaf { value: 0.0 });
                    trees[c].push(Node::Leaf { value: 0.0 });
                    trees[c][pos] = Node::Split { feature, threshold, left: l as u32, right: l as u32 + 1 };
                    child[s] = (next[c].len() as u16, next[c].len() as u16 + 1);
                    next[c].push(l);
                    next[c].push(l + 1);
                } else {
                    let w = params.learning_rate * leaf_weight_of(&totals, s, lambda);
                    trees[c][pos] = Node::Leaf { value: w };
                }
            }
        }
        for i in 0..n {
            for c in 0..k {
                let nd = node_of[i * k + c];
                if nd == INACTIVE {
                    continue;
                }
                let s = c * spt + nd as usize;
                let (l, r) = child[s];
                if l == INACTIVE {
                    node_of[i * k + c] = INACTIVE;
                    margins[i * k + c] += params.learning_rate * leaf_weight_of(&totals, s, lambda);
                } else {
                    let (feature, threshold) = split[s].unwrap_or((0, 0.0));
                    let v = x.get(i, feature as usize) as f64;
                    node_of[i * k + c] = if v < threshold { l } else { r };
                }
            }
        }
        frontier = next;
    }
    trees.into_iter().map(|nodes| RegressionTree { nodes }).collect()
}

#[inline]
fn leaf_weight_of(totals: &[(f64, f64)], s: usize, lambda: f64) -> f64 {
    leaf_weight(totals[s].0, totals[s].1, lambda)
}

/// Trains a softmax boosted-tree ensemble.
///
/// `y` holds arbitrary class ids; the sorted distinct ids become the
/// ensemble's class labels. Training draws no random numbers, `seed` is
/// accepted for interface stability and recorded nowhere.
pub fn train_ensemble(x: &Matrix, y: &[usize], params: &BoostParams, seed: u64) -> Result<TreeEnsemble> {
    let _ = seed;
    params.validate()?;
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::EmptyInput("training matrix is empty"));
    }
    if y.len() != x.rows() {
        return Err(Error::ShapeError { expected: x.rows(), got: y.len() });
    }
    if x.as_slice().iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("training matrix contains NaN"));
    }
    let mut class_labels: Vec<usize> = y.to_vec();
    class_labels.sort_unstable();
    class_labels.dedup();
    if class_labels.len() < 2 {
        return Err(Error::DegenerateLabels("boosting needs at least two classes"));
    }
    let k = class_labels.len();
    let yi: Vec<usize> = y.iter().map(|v| class_labels.binary_search(v).unwrap_or(0)).collect();

    let sorted = presort(x);
    let n = x.rows();
    let mut margins = vec![0.0f64; n * k];
    let mut prob = vec![0.0f64; n * k];
    // single-precision gradient pairs halve the randomly accessed footprint;
    // all sums are accumulated in f64
    let mut gh = vec![(0.0f32, 0.0f32); n * k];
    let mut node_of = vec![0u16; n * k];
    let mut trees = Vec::with_capacity(params.n_rounds * k);
    let mut train_loss = Vec::with_capacity(params.n_rounds + 1);
    train_loss.push(log_loss(&margins, &yi, k));

    for round in 0..params.n_rounds {
        softmax_rows(&margins, k, &mut prob);
        for i in 0..n {
            for c in 0..k {
                let p = prob[i * k + c];
                let t = if yi[i] == c { 1.0 } else { 0.0 };
                gh[i * k + c] = ((p - t) as f32, (p * (1.0 - p)) as f32);
            }
        }
        node_of.fill(0);
        trees.extend(grow_round(x, &sorted, &gh, &mut node_of, &mut margins, k, params));
        let loss = log_loss(&margins, &yi, k);
        log::debug!("round {round}: train mlogloss {loss:.6}");
        train_loss.push(loss);
    }

    Ok(TreeEnsemble { trees, n_classes: k, n_features: x.cols(), params: params.clone(), class_labels, train_loss })
}
