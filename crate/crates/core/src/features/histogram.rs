//! Multi-resolution histograms of amplitude, phase, phase increments and the spectrum.

use crate::prelude::*;
use core::f64::consts::{PI, TAU};

use crate::fft::FftPlan;

/// Bin counts of every multi-resolution histogram family.
pub const BIN_COUNTS: [usize; 5] = [4, 8, 16, 32, 64];
/// Upper edge of the amplitude range for unit-power frames.
pub const AMP_MAX: f64 = 4.0;
pub const REFINE_BINS: usize = 128;

/// Mass-normalized histogram over `[lo, hi)`; out-of-range values are
/// clamped into the edge bins. A degenerate range puts all mass in bin 0.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut h = alloc::vec![0.0; bins];
    if values.is_empty() || bins == 0 {
        return h;
    }
    let width = hi - lo;
    for &v in values {
        let b = if width > 0.0 {
            let t = ((v - lo) / width * bins as f64).floor();
            if t.is_nan() { 0 } else { (t.max(0.0) as usize).min(bins - 1) }
        } else {
            0
        };
        h[b] += 1.0;
    }
    let inv = 1.0 / values.len() as f64;
    h.iter_mut().for_each(|v| *v *= inv);
    h
}

fn multi(values: &[f64], lo: f64, hi: f64) -> Vec<Vec<f64>> {
    BIN_COUNTS.iter().map(|&b| histogram(values, lo, hi, b)).collect()
}

/// Sample phase with the zero-amplitude convention (phase 0).
pub fn phase(c: Cplx) -> f64 {
    if c.re == 0.0 && c.im == 0.0 { 0.0 } else { c.im.atan2(c.re) }
}

/// Wraps an angle to [-pi, pi).
pub fn wrap(d: f64) -> f64 {
    let w = d - TAU * ((d + PI) / TAU).floor();
    if w >= PI { w - TAU } else { w }
}

/// Per-frame raw sequences shared by several feature blocks.
#[derive(Debug, Clone)]
pub struct Sequences {
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
    /// Wrapped consecutive phase increments (length N - 1).
    pub phase_diff: Vec<f64>,
    pub fft_mag: Vec<f64>,
    pub fft_phase: Vec<f64>,
}

impl Sequences {
    pub fn new(x: &[Cplx], plan: &FftPlan) -> Self {
        let amplitude = x.iter().map(|c| c.norm()).collect();
        let phase: Vec<f64> = x.iter().map(|&c| self::phase(c)).collect();
        let phase_diff = phase.windows(2).map(|w| wrap(w[1] - w[0])).collect();
        let mut spec = x.to_vec();
        plan.forward(&mut spec);
        let fft_mag = spec.iter().map(|c| c.norm()).collect();
        let fft_phase = spec.iter().map(|&c| self::phase(c)).collect();
        Self { amplitude, phase, phase_diff, fft_mag, fft_phase }
    }
}

/// The five histogram families, each at every bin count in [`BIN_COUNTS`].
#[derive(Debug, Clone)]
pub struct HistogramSet {
    pub amplitude: Vec<Vec<f64>>,
    pub phase: Vec<Vec<f64>>,
    pub phase_diff: Vec<Vec<f64>>,
    pub fft_mag: Vec<Vec<f64>>,
    pub fft_phase: Vec<Vec<f64>>,
    pub refine_amplitude: Vec<f64>,
    pub amp_mean: f64,
    pub amp_std: f64,
}

impl HistogramSet {
    pub fn new(seq: &Sequences) -> Self {
        let n = seq.amplitude.len().max(1) as f64;
        let amp_mean = seq.amplitude.iter().sum::<f64>() / n;
        let amp_std = (seq.amplitude.iter().map(|a| (a - amp_mean).powi(2)).sum::<f64>() / n).sqrt();
        let mag_mean = seq.fft_mag.iter().sum::<f64>() / seq.fft_mag.len().max(1) as f64;
        Self {
            amplitude: multi(&seq.amplitude, 0.0, AMP_MAX),
            phase: multi(&seq.phase, -PI, PI),
            phase_diff: multi(&seq.phase_diff, -PI, PI),
            fft_mag: multi(&seq.fft_mag, 0.0, 4.0 * mag_mean),
            fft_phase: multi(&seq.fft_phase, -PI, PI),
            refine_amplitude: histogram(&seq.amplitude, 0.0, AMP_MAX, REFINE_BINS),
            amp_mean,
            amp_std,
        }
    }

    /// Rows 1-4 of the layout: 248 + 130 + 124 + 248 dims.
    pub fn blocks(&self) -> [Vec<f64>; 4] {
        let flat = |families: &[&Vec<Vec<f64>>]| -> Vec<f64> {
            families.iter().flat_map(|f| f.iter().flatten().copied()).collect()
        };
        let mut refine = self.refine_amplitude.clone();
        refine.push(self.amp_mean);
        refine.push(self.amp_std);
        [
            flat(&[&self.amplitude, &self.phase]),
            refine,
            flat(&[&self.phase_diff]),
            flat(&[&self.fft_mag, &self.fft_phase]),
        ]
    }

    /// The ten histograms feeding the derived statistics: the 64-bin then the
    /// 32-bin variant of amplitude, phase, phase-difference, FFT magnitude, FFT phase.
    pub fn designated(&self) -> [&[f64]; 10] {
        let fams = [&self.amplitude, &self.phase, &self.phase_diff, &self.fft_mag, &self.fft_phase];
        let i64 = BIN_COUNTS.iter().position(|&b| b == 64).unwrap();
        let i32 = BIN_COUNTS.iter().position(|&b| b == 32).unwrap();
        [
            &fams[0][i64], &fams[1][i64], &fams[2][i64], &fams[3][i64], &fams[4][i64],
            &fams[0][i32], &fams[1][i32], &fams[2][i32], &fams[3][i32], &fams[4][i32],
        ]
    }
}

/// 750-dim histogram block (248 + 130 + 124 + 248) of one frame.
pub fn histogram_features(x: &[Cplx], plan: &FftPlan) -> Vec<f64> {
    HistogramSet::new(&Sequences::new(x, plan)).blocks().concat()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_normalizes_and_clamps() {
        let h = histogram(&[-1.0, 0.1, 0.6, 5.0], 0.0, 1.0, 2);
        assert_eq!(h, alloc::vec![0.5, 0.5]);
        let h = histogram(&[], 0.0, 1.0, 4);
        assert_eq!(h.iter().sum::<f64>(), 0.0);
        let h = histogram(&[0.0, 0.0], 0.0, 0.0, 4);
        assert_eq!(h[0], 1.0);
    }

    #[test]
    fn wrap_range() {
        for d in [-7.0, -PI, -1.0, 0.0, 3.0, PI, 6.5, 20.0] {
            let w = wrap(d);
            assert!((-PI..PI).contains(&w), "{d} -> {w}");
            assert!(((d - w) / TAU - ((d - w) / TAU).round()).abs() < 1e-12);
        }
    }

    #[test]
    fn block_sizes() {
        let x: Vec<Cplx> = (0..1024).map(|i| Cplx::from_polar(1.0, i as f64 * 0.1)).collect();
        let set = HistogramSet::new(&Sequences::new(&x, &FftPlan::new(1024)));
        let b = set.blocks();
        assert_eq!([b[0].len(), b[1].len(), b[2].len(), b[3].len()], [248, 130, 124, 248]);
    }
}
