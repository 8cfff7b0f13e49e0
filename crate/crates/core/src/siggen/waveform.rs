//! Pulse shaping and the non-linear (GMSK, analog) waveform families.

use crate::prelude::*;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use crate::ModClass;

/// Root-raised-cosine span in symbols.
pub const RRC_SPAN: usize = 8;
/// GMSK bandwidth-time product.
pub const GMSK_BT: f64 = 0.3;

/// Unit-energy root-raised-cosine taps spanning `span` symbols.
pub fn rrc_taps(rolloff: f64, sps: usize, span: usize) -> Vec<f64> {
    let n = span * sps + 1;
    let mid = (n / 2) as f64;
    let beta = rolloff;
    let mut taps: Vec<f64> = (0..n)
        .map(|i| {
            let t = (i as f64 - mid) / sps as f64;
            if t.abs() < 1e-12 {
                1.0 - beta + 4.0 * beta / PI
            } else if ((4.0 * beta * t).abs() - 1.0).abs() < 1e-9 {
                beta / 2f64.sqrt()
                    * ((1.0 + 2.0 / PI) * (PI / (4.0 * beta)).sin()
                        + (1.0 - 2.0 / PI) * (PI / (4.0 * beta)).cos())
            } else {
                let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
                let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
                num / den
            }
        })
        .collect();
    let e = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|v| *v /= e);
    taps
}

/// Upsamples `symbols` by `sps` and filters with `taps`; returns `out_len`
/// samples starting after the filter delay plus `skip` samples.
pub fn shape(symbols: &[Cplx], taps: &[f64], sps: usize, skip: usize, out_len: usize) -> Vec<Cplx> {
    let delay = taps.len() / 2;
    (0..out_len)
        .map(|i| {
            let n = i + skip + delay;
            // y[n] = sum_k s[k] h[n - k*sps]
            let k_hi = n / sps;
            let k_lo = (n + 1).saturating_sub(taps.len()).div_ceil(sps);
            let mut acc = Cplx::new(0.0, 0.0);
            for k in k_lo..=k_hi.min(symbols.len().saturating_sub(1)) {
                acc += symbols[k] * taps[n - k * sps];
            }
            acc
        })
        .collect()
}

/// Holds each symbol for `sps` samples (no pulse shaping).
pub fn hold(symbols: &[Cplx], sps: usize, skip: usize, out_len: usize) -> Vec<Cplx> {
    (0..out_len)
        .map(|i| symbols[((i + skip) / sps).min(symbols.len() - 1)])
        .collect()
}

/// Gaussian-filtered MSK phase trajectory (modulation index 1/2).
pub fn gmsk(bits: &[bool], sps: usize, skip: usize, out_len: usize) -> Vec<Cplx> {
    let sigma = sps as f64 * 2f64.ln().sqrt() / (TAU * GMSK_BT);
    let half = 2 * sps;
    let mut g: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let t = i as f64 - half as f64;
            (-t * t / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let gs: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= gs);

    let nrz: Vec<f64> = bits
        .iter()
        .flat_map(|&b| core::iter::repeat_n(if b { 1.0 } else { -1.0 }, sps))
        .collect();
    let total = skip + out_len;
    let mut phase = 0.0;
    let mut out = Vec::with_capacity(out_len);
    for n in 0..total {
        let mut f = 0.0;
        for (i, &gi) in g.iter().enumerate() {
            // centered convolution, edges clamped to the first/last symbol
            let idx = (n + i).saturating_sub(half).min(nrz.len() - 1);
            f += gi * nrz[idx];
        }
        phase += FRAC_PI_2 * f / sps as f64;
        if n >= skip {
            out.push(Cplx::from_polar(1.0, phase));
        }
    }
    out
}

/// Band-limited random message: three random-phase tones below 0.1 of the
/// sample rate, scaled so |m| <= 1. Returns (m, Hilbert transform of m).
pub fn message<R: Rng + ?Sized>(rng: &mut R, len: usize) -> (Vec<f64>, Vec<f64>) {
    let tones: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            let f = rng.random_range(0.005..0.1);
            let a = rng.random_range(0.5..1.0);
            let ph = rng.random_range(0.0..TAU);
            (f, a, ph)
        })
        .collect();
    let norm: f64 = tones.iter().map(|t| t.1).sum();
    let mut m = vec![0.0; len];
    let mut mh = vec![0.0; len];
    for (n, (mv, hv)) in m.iter_mut().zip(mh.iter_mut()).enumerate() {
        for &(f, a, ph) in &tones {
            let arg = TAU * f * n as f64 + ph;
            *mv += a * arg.cos() / norm;
            *hv += a * arg.sin() / norm;
        }
    }
    (m, mh)
}

/// Analog waveform for the AM/FM family.
pub fn analog<R: Rng + ?Sized>(scheme: ModClass, rng: &mut R, len: usize) -> Vec<Cplx> {
    let (m, mh) = message(rng, len);
    match scheme {
        ModClass::AmDsbSc => m.iter().map(|&v| Cplx::new(v, 0.0)).collect(),
        ModClass::AmDsbWc => {
            let mu = rng.random_range(0.5..0.9);
            m.iter().map(|&v| Cplx::new(1.0 + mu * v, 0.0)).collect()
        }
        ModClass::AmSsbSc => m.iter().zip(&mh).map(|(&a, &b)| Cplx::new(a, b)).collect(),
        ModClass::AmSsbWc => {
            let mu = rng.random_range(0.5..0.9);
            m.iter().zip(&mh).map(|(&a, &b)| Cplx::new(1.0 + mu * a, mu * b)).collect()
        }
        ModClass::Fm => {
            let deviation = rng.random_range(0.02..0.06);
            let mut theta = 0.0;
            m.iter()
                .map(|&v| {
                    theta += TAU * deviation * v;
                    Cplx::from_polar(1.0, theta)
                })
                .collect()
        }
        _ => unreachable!("analog() called with a digital scheme"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rrc_is_symmetric_unit_energy() {
        let h = rrc_taps(0.25, 8, RRC_SPAN);
        assert_eq!(h.len(), 65);
        let e: f64 = h.iter().map(|v| v * v).sum();
        assert!((e - 1.0).abs() < 1e-12);
        for i in 0..h.len() {
            assert!((h[i] - h[h.len() - 1 - i]).abs() < 1e-12);
        }
        assert!(h.iter().all(|v| v.is_finite()));
        // rolloff hitting the t = 1/(4 beta) singularity exactly
        assert!(rrc_taps(0.25, 4, 4).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn rrc_cascade_is_nyquist() {
        let sps = 8;
        let h = rrc_taps(0.35, sps, 16);
        let n = h.len();
        let rc: Vec<f64> = (0..2 * n - 1)
            .map(|k| {
                (0..n)
                    .filter(|&i| k >= i && k - i < n)
                    .map(|i| h[i] * h[k - i])
                    .sum()
            })
            .collect();
        let mid = n - 1;
        for m in 1..6 {
            assert!(rc[mid + m * sps].abs() < 0.02 * rc[mid], "ISI at {m}");
        }
    }

    #[test]
    fn gmsk_quarter_turn_per_symbol_far_from_transitions() {
        let bits = [true; 20];
        let s = gmsk(&bits, 8, 0, 120);
        assert!(s.iter().all(|c| (c.norm() - 1.0).abs() < 1e-12));
        let step = (s[80] * s[72].conj()).arg();
        assert!((step - FRAC_PI_2).abs() < 1e-6, "{step}");
    }
}
