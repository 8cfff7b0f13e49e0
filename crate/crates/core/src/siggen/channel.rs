use core::f64::consts::TAU;


use super::{mean_power, ChannelParams, IqFrame};
use crate::error::{Error, Result};
use crate::rng;
use crate::prelude::*;

/// Applies flat Rayleigh gain (optional), carrier frequency offset, phase
/// offset and complex AWGN, in that order.
///
/// The noise realization is rescaled so that its empirical power over the
/// frame hits the requested SNR against the empirical signal power.
pub fn apply_channel(frame: &IqFrame, params: &ChannelParams) -> Result<IqFrame> {
    params.validate()?;
    if !frame.samples.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::InvalidFrame("non-finite sample"));
    }
    let mut rng = rng::stream(params.seed, &[0x4348_414e]);
    let mut out = frame.samples.clone();

    if params.fading {
        let h = rng::complex_normal(&mut rng);
        out.iter_mut().for_each(|c| *c *= h);
    }
    if params.cfo_norm != 0.0 || params.phase_offset != 0.0 {
        for (n, c) in out.iter_mut().enumerate() {
            let arg = TAU * params.cfo_norm * n as f64 + params.phase_offset;
            *c *= Cplx::from_polar(1.0, arg);
        }
    }
    if params.snr_db.is_finite() {
        let ps = mean_power(&out);
        let mut noise: alloc::vec::Vec<Cplx> = (0..out.len()).map(|_| rng::complex_normal(&mut rng)).collect();
        let pn = mean_power(&noise);
        let target = ps / 10f64.powf(params.snr_db / 10.0);
        let scale = if pn > 0.0 { (target / pn).sqrt() } else { 0.0 };
        for (c, n) in out.iter_mut().zip(noise.iter_mut()) {
            *c += *n * scale;
        }
    }
    Ok(IqFrame {
        samples: out,
        label: frame.label,
        snr_db: params.snr_db,
    })
}
