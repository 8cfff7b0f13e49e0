//! Discriminant feature test: ranks columns by the weighted class entropy
//! of their best binary split over a uniform threshold grid.

use crate::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_BINS: usize = 16;
pub const DEFAULT_TOP_K: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DftScore {
    pub feature_index: usize,
    /// Weighted entropy in bits of the best split; lower is more discriminant.
    pub loss: f64,
    pub rank: usize,
}

/// Shannon entropy in bits of a label histogram.
pub fn entropy_bits(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// `(|L|/N)·H(L) + (|R|/N)·H(R)`.
pub fn split_loss(left: &[usize], right: &[usize]) -> f64 {
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    let n = (nl + nr) as f64;
    if n == 0.0 {
        return 0.0;
    }
    (nl as f64 / n) * entropy_bits(left) + (nr as f64 / n) * entropy_bits(right)
}

/// DFT loss of one column.
///
/// The candidate thresholds are the `n_bins − 1` interior points of a
/// uniform partition of `[min, max]`; a sample goes left when `x ≤ t`.
pub fn dft_score(column: &[f64], labels: &[usize], n_bins: usize) -> Result<f64> {
    score_iter(column.iter().copied(), labels, n_bins)
}

fn score_iter<I>(column: I, labels: &[usize], n_bins: usize) -> Result<f64>
where
    I: Iterator<Item = f64> + Clone,
{
    if labels.is_empty() {
        return Err(Error::EmptyInput("feature column has no samples"));
    }
    let len = column.clone().count();
    if len != labels.len() {
        return Err(Error::ShapeError { expected: labels.len(), got: len });
    }
    if n_bins < 2 {
        return Err(Error::InvalidConfig("n_bins must be at least 2"));
    }
    let n_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut total = vec![0usize; n_classes];
    for &y in labels {
        total[y] += 1;
    }
    if total.iter().filter(|&&c| c > 0).count() < 2 {
        return Ok(0.0);
    }
    let parent = entropy_bits(&total);

    let (lo, hi) = column.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(hi > lo) || !(hi - lo).is_finite() {
        return Ok(parent);
    }
    let step = (hi - lo) / n_bins as f64;
    let thresholds: Vec<f64> = (1..n_bins).map(|j| lo + j as f64 * step).collect();

    // bin b holds samples with t[b-1] < x <= t[b]
    let mut bins = vec![0usize; n_bins * n_classes];
    for (v, &y) in column.zip(labels) {
        let mut b = (((v - lo) / step) as usize).min(n_bins - 1);
        while b > 0 && v <= thresholds[b - 1] {
            b -= 1;
        }
        while b < n_bins - 1 && v > thresholds[b] {
            b += 1;
        }
        bins[b * n_classes + y] += 1;
    }

    let mut left = vec![0usize; n_classes];
    let mut right = total.clone();
    let mut best = parent;
    for b in 0..n_bins - 1 {
        for c in 0..n_classes {
            let m = bins[b * n_classes + c];
            left[c] += m;
            right[c] -= m;
        }
        let loss = split_loss(&left, &right);
        if loss < best {
            best = loss;
        }
    }
    Ok(best)
}

fn column_iter(x: &Matrix, j: usize) -> impl Iterator<Item = f64> + Clone + '_ {
    x.as_slice().iter().skip(j).step_by(x.cols().max(1)).map(|&v| v as f64)
}

/// Scores every column and returns all of them sorted by `(loss, index)`
/// with ranks filled in.
pub fn rank_features(x: &Matrix, labels: &[usize], n_bins: usize) -> Result<Vec<DftScore>> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::EmptyInput("feature matrix is empty"));
    }
    if x.rows() != labels.len() {
        return Err(Error::ShapeError { expected: x.rows(), got: labels.len() });
    }
    let score = |j: usize| score_iter(column_iter(x, j), labels, n_bins);

    #[cfg(feature = "parallel")]
    let losses: Vec<f64> = {
        use rayon::prelude::*;
        (0..x.cols()).into_par_iter().map(score).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let losses: Vec<f64> = (0..x.cols()).map(score).collect::<Result<_>>()?;

    let mut scores: Vec<DftScore> = losses
        .into_iter()
        .enumerate()
        .map(|(feature_index, loss)| DftScore { feature_index, loss, rank: 0 })
        .collect();
    scores.sort_by(|a, b| a.loss.total_cmp(&b.loss).then(a.feature_index.cmp(&b.feature_index)));
    for (r, s) in scores.iter_mut().enumerate() {
        s.rank = r;
    }
    Ok(scores)
}

/// Indices of the `top_k` most discriminant columns, best first.
pub fn select_features(x: &Matrix, labels: &[usize], top_k: usize, n_bins: usize) -> Result<Vec<usize>> {
    if top_k == 0 {
        return Err(Error::InvalidConfig("top_k must be positive"));
    }
    if top_k > x.cols() {
        return Err(Error::InvalidConfig("top_k exceeds the number of features"));
    }
    let scores = rank_features(x, labels, n_bins)?;
    Ok(scores.into_iter().take(top_k).map(|s| s.feature_index).collect())
}
