//! Labeled I/Q frame synthesis: constellations, waveforms, channel, dataset grid.

mod channel;
pub mod constellation;
mod dataset;
pub mod waveform;

use crate::prelude::*;

use rand::Rng;

pub use channel::apply_channel;
pub use dataset::{frame_keys, generate_dataset, generate_frame, DatasetConfig, FrameKey};

use crate::error::{Error, Result};
use crate::rng;
use crate::{ModClass, FRAME_LEN};

/// The benchmark SNR grid: -10 dB to 20 dB in 2 dB steps.
pub const SNR_GRID: [f64; 16] = [
    -10.0, -8.0, -6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0,
];

/// One labeled frame of complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub samples: Vec<Cplx>,
    pub label: ModClass,
    pub snr_db: f64,
}

impl IqFrame {
    pub fn new(samples: Vec<Cplx>, label: ModClass, snr_db: f64) -> Result<Self> {
        if samples.len() != FRAME_LEN {
            return Err(Error::InvalidFrame("frame must hold exactly 1024 samples"));
        }
        if !samples.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidFrame("non-finite sample"));
        }
        Ok(Self { samples, label, snr_db })
    }

    pub fn zeros(label: ModClass) -> Self {
        Self {
            samples: alloc::vec![Cplx::new(0.0, 0.0); FRAME_LEN],
            label,
            snr_db: f64::INFINITY,
        }
    }

    pub fn power(&self) -> f64 {
        mean_power(&self.samples)
    }
}

pub fn mean_power(x: &[Cplx]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|c| c.norm_sqr()).sum::<f64>() / x.len() as f64
}

/// Scales samples in place to unit mean power. All-zero input is left alone.
pub fn normalize_power(x: &mut [Cplx]) {
    let p = mean_power(x);
    if p > 0.0 {
        let s = 1.0 / p.sqrt();
        x.iter_mut().for_each(|c| *c *= s);
    }
}

/// Channel and waveform parameters for one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// `f64::INFINITY` disables the noise stage.
    pub snr_db: f64,
    /// Carrier frequency offset as a fraction of the sample rate.
    pub cfo_norm: f64,
    pub phase_offset: f64,
    /// Root-raised-cosine roll-off.
    pub rolloff: f64,
    pub sps: usize,
    /// Flat Rayleigh block fading.
    pub fading: bool,
    /// Seed for the channel's own randomness (fading gain, noise).
    pub seed: u64,
    /// When false, digital symbols are held rectangularly instead of RRC-shaped.
    pub pulse_shaping: bool,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            snr_db: f64::INFINITY,
            cfo_norm: 0.0,
            phase_offset: 0.0,
            rolloff: 0.25,
            sps: 8,
            fading: false,
            seed: 0,
            pulse_shaping: true,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.sps < 2 {
            return Err(Error::InvalidParams("sps must be at least 2"));
        }
        if !(-0.05..=0.05).contains(&self.cfo_norm) {
            return Err(Error::InvalidParams("cfo_norm must lie in [-0.05, 0.05]"));
        }
        if !(self.rolloff > 0.0 && self.rolloff <= 1.0) {
            return Err(Error::InvalidParams("rolloff must lie in (0, 1]"));
        }
        if self.snr_db.is_nan() || !self.phase_offset.is_finite() {
            return Err(Error::InvalidParams("snr_db and phase_offset must be numbers"));
        }
        Ok(())
    }
}

fn check_length(n_symbols: usize, sps: usize) -> Result<()> {
    if n_symbols.saturating_mul(sps) < FRAME_LEN {
        return Err(Error::InsufficientLength {
            n_symbols,
            sps,
            needed: FRAME_LEN,
        });
    }
    Ok(())
}

/// Maps an explicit symbol-index stream through the scheme's constellation
/// and returns one clean, unit-power frame. Only linear digital schemes and
/// GMSK (indices interpreted as bits, nonzero = 1) are accepted.
pub fn modulate_symbols(scheme: ModClass, symbols: &[usize], params: &ChannelParams) -> Result<IqFrame> {
    params.validate()?;
    check_length(symbols.len(), params.sps)?;
    let sps = params.sps;
    let mut samples = if scheme == ModClass::Gmsk {
        let bits: Vec<bool> = symbols.iter().map(|&s| s != 0).collect();
        waveform::gmsk(&bits, sps, 0, FRAME_LEN)
    } else {
        let points = constellation::constellation(scheme).ok_or(Error::UnsupportedModulation(scheme))?;
        let syms: Vec<Cplx> = symbols.iter().map(|&s| points[s % points.len()]).collect();
        linear_waveform(scheme, &syms, params, 0)
    };
    normalize_power(&mut samples);
    IqFrame::new(samples, scheme, params.snr_db)
}

fn linear_waveform(scheme: ModClass, syms: &[Cplx], params: &ChannelParams, skip: usize) -> Vec<Cplx> {
    let sps = params.sps;
    let render = |s: &[Cplx], extra_skip: usize| {
        if params.pulse_shaping {
            let taps = waveform::rrc_taps(params.rolloff, sps, waveform::RRC_SPAN);
            waveform::shape(s, &taps, sps, skip + extra_skip, FRAME_LEN)
        } else {
            waveform::hold(s, sps, skip + extra_skip, FRAME_LEN)
        }
    };
    if scheme == ModClass::Oqpsk {
        // in-phase rail leads the quadrature rail by half a symbol
        let i_rail: Vec<Cplx> = syms.iter().map(|c| Cplx::new(c.re, 0.0)).collect();
        let q_rail: Vec<Cplx> = syms.iter().map(|c| Cplx::new(0.0, c.im)).collect();
        let i_part = render(&i_rail, sps / 2);
        let q_part = render(&q_rail, 0);
        i_part.iter().zip(&q_part).map(|(a, b)| a + b).collect()
    } else {
        render(syms, 0)
    }
}

/// Synthesizes one clean (pre-channel) unit-power frame of `scheme`.
///
/// Digital schemes draw `n_symbols` uniform symbols (plus filter padding);
/// analog schemes modulate a band-limited random message and ignore the
/// symbol count beyond the length check.
pub fn modulate(scheme: ModClass, n_symbols: usize, params: &ChannelParams, rng_seed: u64) -> Result<IqFrame> {
    params.validate()?;
    check_length(n_symbols, params.sps)?;
    let mut rng = rng::stream(rng_seed, &[0x5359_4d42]);
    let sps = params.sps;
    let pad = waveform::RRC_SPAN;
    let mut samples = if scheme.is_analog() {
        waveform::analog(scheme, &mut rng, FRAME_LEN)
    } else if scheme == ModClass::Gmsk {
        let bits: Vec<bool> = (0..n_symbols + 2 * pad).map(|_| rng.random::<bool>()).collect();
        waveform::gmsk(&bits, sps, pad * sps, FRAME_LEN)
    } else {
        let points = constellation::constellation(scheme).ok_or(Error::UnsupportedModulation(scheme))?;
        let syms: Vec<Cplx> = (0..n_symbols + 2 * pad)
            .map(|_| points[rng.random_range(0..points.len())])
            .collect();
        linear_waveform(scheme, &syms, params, pad * sps / 2)
    };
    normalize_power(&mut samples);
    IqFrame::new(samples, scheme, params.snr_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unshaped() -> ChannelParams {
        ChannelParams {
            pulse_shaping: false,
            ..ChannelParams::default()
        }
    }

    #[test]
    fn rejects_short_streams() {
        let err = modulate(ModClass::Bpsk, 100, &ChannelParams::default(), 1).unwrap_err();
        assert!(matches!(err, Error::InsufficientLength { .. }));
        let p = ChannelParams { sps: 1, ..ChannelParams::default() };
        assert!(matches!(modulate(ModClass::Bpsk, 2048, &p, 1), Err(Error::InvalidParams(_))));
        let p = ChannelParams { cfo_norm: 0.06, ..ChannelParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn unsupported_symbol_stream_scheme() {
        let syms = vec![0usize; 128];
        let err = modulate_symbols(ModClass::Fm, &syms, &unshaped()).unwrap_err();
        assert_eq!(err, Error::UnsupportedModulation(ModClass::Fm));
    }

    #[test]
    fn bpsk_all_ones_is_constant_envelope() {
        let frame = modulate_symbols(ModClass::Bpsk, &vec![1usize; 128], &unshaped()).unwrap();
        let amps: Vec<f64> = frame.samples.iter().map(|c| c.norm()).collect();
        let mean = amps.iter().sum::<f64>() / amps.len() as f64;
        let var = amps.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / amps.len() as f64;
        assert_eq!(var, 0.0);
    }

    #[test]
    fn every_scheme_produces_unit_power_frames() {
        for m in ModClass::ALL {
            let f = modulate(m, 128, &ChannelParams::default(), 42).unwrap();
            assert_eq!(f.samples.len(), FRAME_LEN);
            assert!((f.power() - 1.0).abs() < 1e-9, "{m}: {}", f.power());
            assert_eq!(f.label, m);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = ChannelParams::default();
        let a = modulate(ModClass::Qam64, 128, &p, 9).unwrap();
        let b = modulate(ModClass::Qam64, 128, &p, 9).unwrap();
        let c = modulate(ModClass::Qam64, 128, &p, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn frame_constructor_checks_shape() {
        assert!(IqFrame::new(vec![Cplx::new(0.0, 0.0); 10], ModClass::Fm, 0.0).is_err());
        let mut s = vec![Cplx::new(0.0, 0.0); FRAME_LEN];
        s[3].re = f64::NAN;
        assert!(IqFrame::new(s, ModClass::Fm, 0.0).is_err());
    }
}
