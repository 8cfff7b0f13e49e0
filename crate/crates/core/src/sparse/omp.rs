use crate::prelude::*;

use super::Dictionary;
use crate::error::{Error, Result};

/// Absolute residual norm below which pursuit stops early.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// k-sparse code of one window against a dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCode {
    /// One coefficient per atom; zero off the support.
    pub coefficients: Vec<f64>,
    /// Selected atoms in selection order.
    pub support: Vec<usize>,
    pub residual_norm: f64,
}

impl SparseCode {
    fn zero(n_atoms: usize) -> Self {
        Self {
            coefficients: vec![0.0; n_atoms],
            support: Vec::new(),
            residual_norm: 0.0,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonal matching pursuit returning the code after every selected atom.
///
/// Entry `i` of the result is the `(i+1)`-sparse code. Greedy selection is
/// nested, so this is the same as running [`omp_encode`] for each budget. If
/// pursuit stops early the last code is repeated up to `k_max` entries.
pub fn omp_path(window: &[f64], dict: &Dictionary, k_max: usize) -> Result<Vec<SparseCode>> {
    let n = dict.n_atoms();
    let d = dict.dim();
    if k_max == 0 || k_max > n {
        return Err(Error::InvalidSparsity { k: k_max, n_atoms: n });
    }
    if window.len() != d {
        return Err(Error::ShapeError { expected: d, got: window.len() });
    }
    let x_norm = norm(window);
    if x_norm == 0.0 {
        return Ok(vec![SparseCode::zero(n); k_max]);
    }

    let atom_norms: Vec<f64> = (0..n).map(|j| norm(dict.atom(j))).collect();
    let mut residual = window.to_vec();
    // orthonormal basis of the selected atoms and the R factor (column-major, upper)
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    let mut r: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    let mut qtx: Vec<f64> = Vec::with_capacity(k_max);
    let mut support: Vec<usize> = Vec::with_capacity(k_max);
    let mut path = Vec::with_capacity(k_max);
    let mut res_norm = x_norm;

    while support.len() < k_max && res_norm >= RESIDUAL_TOL {
        let mut best = None;
        let mut best_score = 0.0;
        for j in 0..n {
            if atom_norms[j] == 0.0 || support.contains(&j) {
                continue;
            }
            let score = dot(&residual, dict.atom(j)).abs() / atom_norms[j];
            if score > best_score {
                best_score = score;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };

        // Gram-Schmidt with one re-orthogonalization pass
        let atom = dict.atom(j);
        let mut v = atom.to_vec();
        let mut rcol = vec![0.0; support.len() + 1];
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = dot(qi, &v);
                rcol[i] += c;
                v.iter_mut().zip(qi).for_each(|(a, b)| *a -= c * b);
            }
        }
        let vn = norm(&v);
        if vn <= 1e-12 * atom_norms[j] {
            break;
        }
        v.iter_mut().for_each(|a| *a /= vn);
        rcol[support.len()] = vn;
        let c = dot(&v, window);
        residual.iter_mut().zip(&v).for_each(|(a, b)| *a -= c * b);
        q.push(v);
        r.push(rcol);
        qtx.push(c);
        support.push(j);
        res_norm = norm(&residual);

        // back-substitute R c = Q^T x
        let m = support.len();
        let mut coef = vec![0.0; m];
        for i in (0..m).rev() {
            let mut s = qtx[i];
            for (l, c) in coef.iter().enumerate().skip(i + 1) {
                s -= r[l][i] * c;
            }
            coef[i] = s / r[i][i];
        }
        let mut coefficients = vec![0.0; n];
        for (&atom_idx, &c) in support.iter().zip(&coef) {
            coefficients[atom_idx] = c;
        }
        path.push(SparseCode {
            coefficients,
            support: support.clone(),
            residual_norm: res_norm,
        });
    }

    let last = path.last().cloned().unwrap_or_else(|| SparseCode {
        residual_norm: x_norm,
        ..SparseCode::zero(n)
    });
    path.resize(k_max, last);
    Ok(path)
}

/// Greedy k-sparse code of `window` (orthogonal matching pursuit).
///
/// Stops after `k` atoms or once the residual norm falls below
/// [`RESIDUAL_TOL`]. Ties in atom selection go to the lowest index.
pub fn omp_encode(window: &[f64], dict: &Dictionary, k: usize) -> Result<SparseCode> {
    let mut path = omp_path(window, dict, k)?;
    Ok(path.pop().expect("path has k entries"))
}
