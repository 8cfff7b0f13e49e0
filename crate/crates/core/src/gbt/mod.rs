//! Multiclass gradient-boosted regression trees (softmax objective).

mod train;
pub mod tree;

use crate::prelude::*;

use crate::error::{Error, Result};

pub use train::{leaf_weight, split_gain, train_ensemble, GAIN_TIE_TOL, MIN_SPLIT_GAIN};
pub use tree::{Node, RegressionTree};

#[derive(Debug, Clone, PartialEq)]
pub struct BoostParams {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub n_rounds: usize,
    /// Minimum hessian sum in each child of a split.
    pub min_child_weight: f64,
    /// L2 penalty on leaf weights.
    pub l2_reg: f64,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self { learning_rate: 0.3, max_depth: 2, n_rounds: 100, min_child_weight: 1.0, l2_reg: 1.0 }
    }
}

impl BoostParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive"));
        }
        if !(1..=15).contains(&self.max_depth) {
            return Err(Error::InvalidConfig("max_depth must be in 1..=15"));
        }
        if self.n_rounds == 0 {
            return Err(Error::InvalidConfig("n_rounds must be at least 1"));
        }
        if !(self.min_child_weight >= 0.0 && self.min_child_weight.is_finite()) {
            return Err(Error::InvalidConfig("min_child_weight must be non-negative"));
        }
        if !(self.l2_reg >= 0.0 && self.l2_reg.is_finite()) {
            return Err(Error::InvalidConfig("l2_reg must be non-negative"));
        }
        if self.l2_reg == 0.0 && self.min_child_weight == 0.0 {
            return Err(Error::InvalidConfig("l2_reg and min_child_weight cannot both be zero"));
        }
        Ok(())
    }
}

/// `n_rounds × n_classes` trees stored round-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeEnsemble {
    pub trees: Vec<RegressionTree>,
    pub n_classes: usize,
    pub n_features: usize,
    pub params: BoostParams,
    /// Original class id of each margin slot, ascending.
    pub class_labels: Vec<usize>,
    /// Training log-loss before the first round and after each round.
    pub train_loss: Vec<f64>,
}

impl TreeEnsemble {
    /// Ensemble with no trees: every input gets zero margins.
    pub fn untrained(class_labels: Vec<usize>, n_features: usize, params: BoostParams) -> Self {
        let n_classes = class_labels.len();
        let ln_k = if n_classes > 0 { (n_classes as f64).ln() } else { 0.0 };
        Self { trees: Vec::new(), n_classes, n_features, params, class_labels, train_loss: vec![ln_k] }
    }

    pub fn n_rounds(&self) -> usize {
        if self.n_classes == 0 {
            0
        } else {
            self.trees.len() / self.n_classes
        }
    }

    pub fn tree(&self, round: usize, class: usize) -> &RegressionTree {
        &self.trees[round * self.n_classes + class]
    }

    pub fn predict_margins<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<Vec<f64>> {
        if x.len() != self.n_features {
            return Err(Error::ShapeError { expected: self.n_features, got: x.len() });
        }
        let mut m = vec![0.0; self.n_classes];
        for round in self.trees.chunks_exact(self.n_classes.max(1)) {
            for (mc, t) in m.iter_mut().zip(round) {
                *mc += t.predict(x);
            }
        }
        Ok(m)
    }

    pub fn predict_proba<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<Vec<f64>> {
        let m = self.predict_margins(x)?;
        let mut p = vec![0.0; m.len()];
        train::softmax_into(&m, &mut p);
        Ok(p)
    }

    /// Class id with the largest margin; ties go to the lower slot.
    pub fn predict_class<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<usize> {
        let m = self.predict_margins(x)?;
        let mut best = 0;
        for (c, &v) in m.iter().enumerate() {
            if v > m[best] {
                best = c;
            }
        }
        Ok(self.class_labels[best])
    }

    pub fn max_depth(&self) -> usize {
        self.trees.iter().map(RegressionTree::depth).max().unwrap_or(0)
    }
}

/// Softmax probabilities of one input.
pub fn predict_proba<T: Copy + Into<f64>>(ens: &TreeEnsemble, x: &[T]) -> Result<Vec<f64>> {
    ens.predict_proba(x)
}

/// Model size and per-inference cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Complexity {
    pub param_count: usize,
    pub flops_per_inference: usize,
}

impl core::ops::Add for Complexity {
    type Output = Complexity;
    fn add(self, o: Complexity) -> Complexity {
        Complexity {
            param_count: self.param_count + o.param_count,
            flops_per_inference: self.flops_per_inference + o.flops_per_inference,
        }
    }
}

/// Max-shift, exp and normalisation over `k` margins:
/// `k` compares, `k` subtractions, `k` exps, `k − 1` adds, `k` divisions.
pub fn softmax_flops(k: usize) -> usize {
    if k == 0 {
        0
    } else {
        5 * k - 1
    }
}

/// Parameters: 3 per split plus 1 per leaf. FLOPs: one comparison per level
/// of each tree, one add per tree to accumulate its margin, then softmax.
pub fn count_complexity(ens: &TreeEnsemble) -> Complexity {
    let param_count = ens.trees.iter().map(RegressionTree::param_count).sum();
    let compares: usize = ens.trees.iter().map(RegressionTree::depth).sum();
    Complexity { param_count, flops_per_inference: compares + ens.trees.len() + softmax_flops(ens.n_classes) }
}
