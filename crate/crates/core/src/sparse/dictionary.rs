use crate::prelude::*;

use rand::Rng;

use super::omp::omp_encode;
use crate::error::{Error, Result};
use crate::rng;

/// Column-major `dim x n_atoms` atom matrix. Every column has L2 norm <= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    dim: usize,
    n_atoms: usize,
    atoms: Vec<f64>,
}

impl Dictionary {
    /// Builds a dictionary from column-major data, rejecting columns with norm above 1.
    pub fn from_columns(dim: usize, n_atoms: usize, atoms: Vec<f64>) -> Result<Self> {
        if atoms.len() != dim * n_atoms {
            return Err(Error::ShapeError { expected: dim * n_atoms, got: atoms.len() });
        }
        if dim == 0 || n_atoms == 0 {
            return Err(Error::EmptyInput("dictionary shape"));
        }
        let dict = Self { dim, n_atoms, atoms };
        if (0..n_atoms).any(|j| dict.atom_norm(j) > 1.0 + 1e-9) {
            return Err(Error::InvalidConfig("dictionary columns must have norm <= 1"));
        }
        if dict.atoms.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("dictionary contains non-finite values"));
        }
        Ok(dict)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn atom(&self, j: usize) -> &[f64] {
        &self.atoms[j * self.dim..(j + 1) * self.dim]
    }

    fn atom_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.atoms[j * self.dim..(j + 1) * self.dim]
    }

    pub fn atom_norm(&self, j: usize) -> f64 {
        self.atom(j).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Column-major raw data.
    pub fn as_slice(&self) -> &[f64] {
        &self.atoms
    }

    /// D r for a dense coefficient vector.
    pub fn reconstruct(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (j, &c) in coefficients.iter().enumerate() {
            if c != 0.0 {
                out.iter_mut().zip(self.atom(j)).for_each(|(o, a)| *o += c * a);
            }
        }
        out
    }
}

/// Trained dictionary plus the total reconstruction error after
/// initialization (entry 0) and after each iteration.
#[derive(Debug, Clone)]
pub struct LearnedDictionary {
    pub dictionary: Dictionary,
    pub error_trace: Vec<f64>,
}

fn sq_norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

/// Alternating-minimization dictionary learning.
///
/// Each iteration updates atoms one at a time by least squares with the
/// other atoms fixed, renormalizes the atom to unit norm (rescaling its
/// coefficients so the product is unchanged), reseeds unused atoms from the
/// worst-reconstructed windows, then re-encodes every window with OMP. A new
/// code replaces the old one only if it does not increase that window's
/// error, which makes the total error trace non-increasing.
pub fn learn_dictionary(
    windows: &[Vec<f64>],
    n_atoms: usize,
    k: usize,
    iterations: usize,
    seed: u64,
) -> Result<LearnedDictionary> {
    if windows.len() < n_atoms {
        return Err(Error::InsufficientData { needed: n_atoms, got: windows.len() });
    }
    if iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be at least 1"));
    }
    if k == 0 || k > n_atoms {
        return Err(Error::InvalidSparsity { k, n_atoms });
    }
    let dim = windows[0].len();
    if dim == 0 {
        return Err(Error::EmptyInput("window dimension"));
    }
    if let Some(w) = windows.iter().find(|w| w.len() != dim) {
        return Err(Error::ShapeError { expected: dim, got: w.len() });
    }

    let mut rng = rng::stream(seed, &[0x4449_4354]);
    let mut dict = init_atoms(windows, n_atoms, dim, &mut rng);

    let mut codes: Vec<Vec<f64>> = Vec::with_capacity(windows.len());
    let mut residuals: Vec<Vec<f64>> = Vec::with_capacity(windows.len());
    for w in windows {
        let c = omp_encode(w, &dict, k)?.coefficients;
        let rec = dict.reconstruct(&c);
        residuals.push(w.iter().zip(&rec).map(|(a, b)| a - b).collect());
        codes.push(c);
    }
    let mut trace = vec![residuals.iter().map(|r| sq_norm(r)).sum::<f64>()];

    for _ in 0..iterations {
        let mut unused = Vec::new();
        for j in 0..n_atoms {
            let users: Vec<usize> = (0..windows.len()).filter(|&i| codes[i][j] != 0.0).collect();
            if users.is_empty() {
                unused.push(j);
                continue;
            }
            // least-squares atom given the other atoms: d = sum_i e_i r_ij / sum_i r_ij^2
            let mut num = vec![0.0; dim];
            let mut den = 0.0;
            for &i in &users {
                let c = codes[i][j];
                let old = dict.atom(j);
                for ((n, e), a) in num.iter_mut().zip(&residuals[i]).zip(old) {
                    *n += (e + c * a) * c;
                }
                den += c * c;
            }
            num.iter_mut().for_each(|v| *v /= den);
            let s = sq_norm(&num).sqrt();
            if s <= 0.0 || !s.is_finite() {
                continue;
            }
            num.iter_mut().for_each(|v| *v /= s);
            for &i in &users {
                let c_old = codes[i][j];
                let c_new = c_old * s;
                let old = dict.atom(j);
                for ((e, a_old), a_new) in residuals[i].iter_mut().zip(old).zip(&num) {
                    *e += c_old * a_old - c_new * a_new;
                }
                codes[i][j] = c_new;
            }
            dict.atom_mut(j).copy_from_slice(&num);
        }

        reseed(&mut dict, &unused, &residuals, &mut rng);

        for (i, w) in windows.iter().enumerate() {
            let candidate = omp_encode(w, &dict, k)?;
            let rec = dict.reconstruct(&candidate.coefficients);
            let cand_res: Vec<f64> = w.iter().zip(&rec).map(|(a, b)| a - b).collect();
            if sq_norm(&cand_res) <= sq_norm(&residuals[i]) {
                residuals[i] = cand_res;
                codes[i] = candidate.coefficients;
            }
        }
        trace.push(residuals.iter().map(|r| sq_norm(r)).sum());
    }

    Ok(LearnedDictionary { dictionary: dict, error_trace: trace })
}

fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng::normal(rng)).collect();
        let n = sq_norm(&v).sqrt();
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Atoms start as distinct random training windows, normalized; zero
/// windows are skipped and shortfalls are filled with random directions.
fn init_atoms<R: Rng + ?Sized>(windows: &[Vec<f64>], n_atoms: usize, dim: usize, rng: &mut R) -> Dictionary {
    let mut order: Vec<usize> = (0..windows.len()).collect();
    let mut atoms = Vec::with_capacity(n_atoms * dim);
    let mut taken = 0;
    let mut pos = 0;
    while taken < n_atoms && pos < order.len() {
        let pick = rng.random_range(pos..order.len());
        order.swap(pos, pick);
        let w = &windows[order[pos]];
        pos += 1;
        let n = sq_norm(w).sqrt();
        if n > 0.0 {
            atoms.extend(w.iter().map(|v| v / n));
            taken += 1;
        }
    }
    while taken < n_atoms {
        atoms.extend(random_unit(dim, rng));
        taken += 1;
    }
    Dictionary { dim, n_atoms, atoms }
}

fn reseed<R: Rng + ?Sized>(dict: &mut Dictionary, unused: &[usize], residuals: &[Vec<f64>], rng: &mut R) {
    if unused.is_empty() {
        return;
    }
    let mut by_error: Vec<(f64, usize)> = residuals.iter().map(|r| sq_norm(r)).zip(0..).collect();
    by_error.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut worst = by_error.into_iter().filter(|(e, _)| *e > 0.0);
    for &j in unused {
        let atom = match worst.next() {
            Some((e, i)) => {
                let n = e.sqrt();
                residuals[i].iter().map(|v| v / n).collect()
            }
            None => random_unit(dict.dim, rng),
        };
        dict.atom_mut(j).copy_from_slice(&atom);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlong_columns() {
        assert!(Dictionary::from_columns(2, 1, vec![1.0, 1.0]).is_err());
        assert!(Dictionary::from_columns(2, 1, vec![0.6, 0.8]).is_ok());
        assert!(matches!(Dictionary::from_columns(2, 2, vec![0.0; 3]), Err(Error::ShapeError { .. })));
    }

    #[test]
    fn orthonormal_training_set_is_learned_exactly() {
        let d = 8;
        let windows: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut w = vec![0.0; d];
                w[i] = 1.0;
                w
            })
            .collect();
        let out = learn_dictionary(&windows, d, 1, 3, 5).unwrap();
        assert!(*out.error_trace.last().unwrap() < 1e-8);
    }

    #[test]
    fn too_few_windows() {
        let windows = vec![vec![1.0, 0.0]; 3];
        assert_eq!(
            learn_dictionary(&windows, 4, 1, 1, 0).unwrap_err(),
            Error::InsufficientData { needed: 4, got: 3 }
        );
    }
}
