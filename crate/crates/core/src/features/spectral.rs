//! Bispectrum, cyclic autocorrelation, Haar packet energies and the
//! spectrum of the phase-difference sequence.

use crate::prelude::*;
use core::f64::consts::TAU;

use crate::fft::FftPlan;

pub const BISPEC_SEGMENT: usize = 128;
pub const BISPEC_GRID: usize = 16;
pub const CYCLIC_FREQS: usize = 16;
pub const WAVELET_LEVELS: u32 = 4;
pub const PHASE_DIFF_BINS: usize = 128;

/// `[mean, max, variance, entropy]` of |B(f1, f2)| on a 16 x 16 grid,
/// estimated by averaging triple products over 128-sample segments.
pub fn bispectrum(x: &[Cplx], plan128: &FftPlan) -> [f64; 4] {
    let seg = BISPEC_SEGMENT;
    let n_seg = x.len() / seg;
    if n_seg == 0 {
        return [0.0; 4];
    }
    let stride = seg / BISPEC_GRID;
    let mut acc = vec![Cplx::new(0.0, 0.0); BISPEC_GRID * BISPEC_GRID];
    let mut buf = vec![Cplx::new(0.0, 0.0); seg];
    for s in 0..n_seg {
        buf.copy_from_slice(&x[s * seg..(s + 1) * seg]);
        plan128.forward(&mut buf);
        for i in 0..BISPEC_GRID {
            for j in 0..BISPEC_GRID {
                let (f1, f2) = (i * stride, j * stride);
                acc[i * BISPEC_GRID + j] += buf[f1] * buf[f2] * buf[(f1 + f2) % seg].conj();
            }
        }
    }
    let scale = 1.0 / (n_seg as f64 * (seg as f64).powf(1.5));
    let mags: Vec<f64> = acc.iter().map(|c| c.norm() * scale).collect();
    let n = mags.len() as f64;
    let mean = mags.iter().sum::<f64>() / n;
    let max = mags.iter().copied().fold(0.0, f64::max);
    let var = mags.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n;
    let total: f64 = mags.iter().sum();
    let entropy = if total > 0.0 {
        -mags
            .iter()
            .filter(|&&m| m > 0.0)
            .map(|&m| {
                let p = m / total;
                p * p.ln()
            })
            .sum::<f64>()
    } else {
        0.0
    };
    [mean, max, var, entropy]
}

/// |R(alpha)| of |x|^2 at alpha = k/256, k = 1..=16.
pub fn cyclic_autocorrelation(x: &[Cplx]) -> Vec<f64> {
    let n = x.len().max(1) as f64;
    (1..=CYCLIC_FREQS)
        .map(|k| {
            let alpha = k as f64 / 256.0;
            let step = Cplx::from_polar(1.0, -TAU * alpha);
            let mut rot = Cplx::new(1.0, 0.0);
            let mut acc = Cplx::new(0.0, 0.0);
            for (i, c) in x.iter().enumerate() {
                if i % 64 == 0 {
                    // re-anchor the phasor to bound drift
                    rot = Cplx::from_polar(1.0, -TAU * alpha * i as f64);
                }
                acc += rot * c.norm_sqr();
                rot *= step;
            }
            acc.norm() / n
        })
        .collect()
}

/// Normalized leaf energies of a full orthonormal Haar packet tree,
/// leaves in natural (low-first) order. Zero input gives all zeros.
pub fn wavelet_energy(x: &[Cplx]) -> Vec<f64> {
    let mut nodes: Vec<Vec<Cplx>> = vec![x.to_vec()];
    let s = core::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..WAVELET_LEVELS {
        nodes = nodes
            .iter()
            .flat_map(|node| {
                let low = node.chunks_exact(2).map(|p| (p[0] + p[1]) * s).collect();
                let high = node.chunks_exact(2).map(|p| (p[0] - p[1]) * s).collect();
                [low, high]
            })
            .collect();
    }
    let energies: Vec<f64> = nodes.iter().map(|n| n.iter().map(|c| c.norm_sqr()).sum()).collect();
    let total: f64 = energies.iter().sum();
    if total > 0.0 {
        energies.iter().map(|e| e / total).collect()
    } else {
        energies
    }
}

/// First 128 FFT magnitude bins of the wrapped phase-difference sequence,
/// scaled by 1/N. The sequence is padded to N by repeating its last value.
pub fn phase_diff_spectrum(phase_diff: &[f64], plan: &FftPlan) -> Vec<f64> {
    let n = plan.len();
    let last = phase_diff.last().copied().unwrap_or(0.0);
    let mut buf: Vec<Cplx> = (0..n)
        .map(|i| Cplx::new(phase_diff.get(i).copied().unwrap_or(last), 0.0))
        .collect();
    plan.forward(&mut buf);
    buf[..PHASE_DIFF_BINS].iter().map(|c| c.norm() / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_energy_conserved() {
        let x: Vec<Cplx> = (0..1024)
            .map(|i| Cplx::new((i as f64 * 0.3).sin(), (i as f64 * 0.07).cos()))
            .collect();
        let e = wavelet_energy(&x);
        assert_eq!(e.len(), 16);
        assert!((e.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dc_signal_energy_in_first_leaf() {
        let e = wavelet_energy(&[Cplx::new(1.0, 1.0); 1024]);
        assert!((e[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_sequence_spectrum_is_dc() {
        let pd = [0.25; 1023];
        let s = phase_diff_spectrum(&pd, &FftPlan::new(1024));
        assert!((s[0] - 0.25).abs() < 1e-12);
        assert!(s[1..].iter().all(|&v| v < 1e-12));
    }

    #[test]
    fn cyclic_of_constant_envelope_vanishes() {
        let x: Vec<Cplx> = (0..1024).map(|i| Cplx::from_polar(1.0, i as f64)).collect();
        assert!(cyclic_autocorrelation(&x).iter().all(|&v| v < 1e-12));
    }
}
