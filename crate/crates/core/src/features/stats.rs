//! Statistics of histogram bin masses and circular statistics of the phase.

use crate::prelude::*;

use super::histogram::HistogramSet;

const VAR_EPS: f64 = 1e-24;

/// `[skewness, kurtosis, entropy, variance]` of a histogram's bin masses.
///
/// Skewness and kurtosis are the standardized third and fourth central
/// moments of the mass values (both 0 when the masses are all equal);
/// entropy is `-sum p ln p` with `0 ln 0 = 0`.
pub fn mass_stats(h: &[f64]) -> [f64; 4] {
    if h.is_empty() {
        return [0.0; 4];
    }
    let n = h.len() as f64;
    let mean = h.iter().sum::<f64>() / n;
    let central = |p: i32| h.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
    let m2 = central(2);
    let (skew, kurt) = if m2 > VAR_EPS {
        (central(3) / m2.powf(1.5), central(4) / (m2 * m2))
    } else {
        (0.0, 0.0)
    };
    let entropy = -h.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>();
    [skew, kurt, entropy, m2]
}

/// `[mean resultant length, circular variance, circular skewness]`.
pub fn circular_stats(phase: &[f64]) -> [f64; 3] {
    if phase.is_empty() {
        return [0.0; 3];
    }
    let n = phase.len() as f64;
    let (mut c1, mut s1, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
    for &p in phase {
        c1 += p.cos();
        s1 += p.sin();
        c2 += (2.0 * p).cos();
        s2 += (2.0 * p).sin();
    }
    let (c1, s1, c2, s2) = (c1 / n, s1 / n, c2 / n, s2 / n);
    let r1 = c1.hypot(s1).min(1.0);
    let theta1 = s1.atan2(c1);
    let r2 = c2.hypot(s2);
    let theta2 = s2.atan2(c2);
    let spread = 1.0 - r1;
    let skew = if spread > 1e-9 {
        r2 * (theta2 - 2.0 * theta1).sin() / spread.powf(1.5)
    } else {
        0.0
    };
    [r1, spread, skew]
}

/// 43-dim block: 4 statistics x 10 designated histograms, then circular statistics.
pub fn histogram_stats(set: &HistogramSet, phase: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = set.designated().iter().flat_map(|h| mass_stats(h)).collect();
    out.extend(circular_stats(phase));
    out
}
