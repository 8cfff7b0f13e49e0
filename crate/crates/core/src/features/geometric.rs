//! Rotational moments, I/Q eigen structure and the amplitude CDF.

use crate::prelude::*;


pub const ROTATION_ORDERS: [u32; 3] = [8, 16, 32];
pub const CDF_LEVELS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Per M: `E[e^{jM phi}]` and `E[x^M] / E[|x|^M]`, each as (re, im, |.|).
pub fn rotational_moments(x: &[Cplx]) -> Vec<f64> {
    let mut out = Vec::with_capacity(18);
    let n = x.len().max(1) as f64;
    let power: f64 = x.iter().map(|c| c.norm_sqr()).sum();
    for &m in &ROTATION_ORDERS {
        if power == 0.0 {
            out.extend([0.0; 6]);
            continue;
        }
        let mut unit_sum = Cplx::new(0.0, 0.0);
        let mut pow_sum = Cplx::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for &c in x {
            let a = c.norm();
            // zero samples carry phase 0, i.e. e^{j M 0} = 1
            let u = if a > 0.0 { c / a } else { Cplx::new(1.0, 0.0) };
            unit_sum += u.powu(m);
            pow_sum += c.powu(m);
            abs_sum += a.powi(m as i32);
        }
        let e1 = unit_sum / n;
        let e2 = if abs_sum > 0.0 { pow_sum / abs_sum } else { Cplx::new(0.0, 0.0) };
        out.extend([e1.re, e1.im, e1.norm(), e2.re, e2.im, e2.norm()]);
    }
    out
}

/// Eigenvalues of the 2x2 I/Q covariance, descending, normalized to sum 1.
/// A zero-variance frame yields (0, 0).
pub fn eigen_structure(x: &[Cplx]) -> [f64; 2] {
    let n = x.len().max(1) as f64;
    let mean = x.iter().sum::<Cplx>() / n;
    let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
    for c in x {
        let v = c - mean;
        a += v.re * v.re;
        b += v.re * v.im;
        d += v.im * v.im;
    }
    let (a, b, d) = (a / n, b / n, d / n);
    let tr = a + d;
    if tr <= 0.0 {
        return [0.0, 0.0];
    }
    let disc = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    let l1 = tr / 2.0 + disc;
    let l2 = (tr / 2.0 - disc).max(0.0);
    [l1 / tr, l2 / tr]
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let t = pos - lo as f64;
    sorted[lo] * (1.0 - t) + sorted[hi] * t
}

pub fn amplitude_cdf(amplitude: &[f64]) -> Vec<f64> {
    let mut s = amplitude.to_vec();
    s.sort_by(f64::total_cmp);
    CDF_LEVELS.iter().map(|&q| quantile(&s, q)).collect()
}

/// 29-dim block: 18 rotational moments, 2 eigenvalues, 9 amplitude quantiles.
pub fn geometric_features(x: &[Cplx], amplitude: &[f64]) -> Vec<f64> {
    let mut out = rotational_moments(x);
    out.extend(eigen_structure(x));
    out.extend(amplitude_cdf(amplitude));
    out
}
