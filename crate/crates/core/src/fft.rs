//! Radix-2 decimation-in-time FFT.

use crate::prelude::*;
use core::f64::consts::TAU;


/// Precomputed twiddles and bit-reversal permutation for one power-of-two size.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<Cplx>,
    rev: Vec<u32>,
}

impl FftPlan {
    /// # Panics
    /// If `len` is not a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length must be a power of two");
        let bits = len.trailing_zeros();
        let rev = (0..len as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        let twiddles = (0..len / 2)
            .map(|k| Cplx::from_polar(1.0, -TAU * k as f64 / len as f64))
            .collect();
        Self { len, twiddles, rev }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Forward transform in place, unnormalized: X[k] = sum x[n] e^{-j2pi kn/N}.
    pub fn forward(&self, buf: &mut [Cplx]) {
        assert_eq!(buf.len(), self.len);
        for i in 0..self.len {
            let j = self.rev[i] as usize;
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.len {
            let step = self.len / (2 * half);
            for start in (0..self.len).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive_dft(x: &[Cplx]) -> Vec<Cplx> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(t, &v)| v * Cplx::from_polar(1.0, -TAU * (k * t) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for &n in &[1usize, 2, 8, 64] {
            let x: Vec<Cplx> = (0..n)
                .map(|i| Cplx::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos() - 0.2))
                .collect();
            let mut y = x.clone();
            FftPlan::new(n).forward(&mut y);
            for (a, b) in y.iter().zip(naive_dft(&x)) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn impulse_is_flat() {
        let mut x = vec![Cplx::new(0.0, 0.0); 16];
        x[0] = Cplx::new(1.0, 0.0);
        FftPlan::new(16).forward(&mut x);
        assert!(x.iter().all(|v| (v - Cplx::new(1.0, 0.0)).norm() < 1e-12));
    }
}
