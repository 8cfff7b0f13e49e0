//! Higher-order cumulants of the complex envelope.
//!
//! Cumulants are computed from raw mixed moments with the general
//! moment-to-cumulant formula over set partitions, so they are the cumulants
//! of the mean-removed signal.

use crate::prelude::*;


/// `(p, q)` of the emitted cumulants C_pq, in output order.
pub const CUMULANTS: [(usize, usize); 10] = [
    (2, 0),
    (2, 1),
    (4, 0),
    (4, 1),
    (4, 2),
    (6, 0),
    (6, 1),
    (6, 2),
    (6, 3),
    (8, 0),
];

const MAX_ORDER: usize = 8;

/// Raw mixed moments `M[a][b] = E[x^a conj(x)^b]` for `a + b <= 8`.
#[derive(Debug, Clone)]
pub struct Moments {
    m: [[Cplx; MAX_ORDER + 1]; MAX_ORDER + 1],
}

impl Moments {
    pub fn new(x: &[Cplx]) -> Self {
        let zero = Cplx::new(0.0, 0.0);
        let mut m = [[zero; MAX_ORDER + 1]; MAX_ORDER + 1];
        let mut pow = [zero; MAX_ORDER + 1];
        let mut cpow = [zero; MAX_ORDER + 1];
        for &v in x {
            pow[0] = Cplx::new(1.0, 0.0);
            cpow[0] = pow[0];
            for i in 1..=MAX_ORDER {
                pow[i] = pow[i - 1] * v;
                cpow[i] = cpow[i - 1] * v.conj();
            }
            for a in 0..=MAX_ORDER {
                for b in 0..=MAX_ORDER - a {
                    m[a][b] += pow[a] * cpow[b];
                }
            }
        }
        let n = x.len().max(1) as f64;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v /= n;
            }
        }
        Self { m }
    }

    /// `E[x^a conj(x)^b]`.
    pub fn get(&self, a: usize, b: usize) -> Cplx {
        self.m[a][b]
    }

    /// Joint cumulant of `p - q` copies of x and `q` copies of conj(x).
    pub fn cumulant(&self, p: usize, q: usize) -> Cplx {
        assert!(p <= MAX_ORDER && q <= p && p >= 1);
        // element i < p - q is x, the rest conj(x)
        let mut total = Cplx::new(0.0, 0.0);
        let mut labels = [0usize; MAX_ORDER];
        self.partitions(p, q, 1, 1, &mut labels, &mut total);
        total
    }

    /// Enumerates set partitions of {0..p} as restricted growth strings.
    fn partitions(&self, p: usize, q: usize, pos: usize, blocks: usize, labels: &mut [usize; MAX_ORDER], total: &mut Cplx) {
        if pos == p {
            let mut counts = [(0usize, 0usize); MAX_ORDER];
            for (i, &l) in labels[..p].iter().enumerate() {
                if i < p - q {
                    counts[l].0 += 1;
                } else {
                    counts[l].1 += 1;
                }
            }
            let mut prod = Cplx::new(1.0, 0.0);
            for &(a, b) in &counts[..blocks] {
                prod *= self.m[a][b];
            }
            // (-1)^(m-1) (m-1)!
            let fact: f64 = (1..blocks).map(|v| v as f64).product();
            let sign = if blocks % 2 == 1 { 1.0 } else { -1.0 };
            *total += prod * (sign * fact);
            return;
        }
        for l in 0..=blocks {
            if l == MAX_ORDER {
                break;
            }
            labels[pos] = l;
            let nb = if l == blocks { blocks + 1 } else { blocks };
            self.partitions(p, q, pos + 1, nb, labels, total);
        }
    }
}

/// 40-dim block: per cumulant, real part, imaginary part, magnitude, and
/// magnitude normalized by C21^(p/2).
pub fn high_order_cumulants(x: &[Cplx]) -> Vec<f64> {
    let moments = Moments::new(x);
    let c21 = moments.cumulant(2, 1).re;
    let mut out = Vec::with_capacity(40);
    for &(p, q) in &CUMULANTS {
        let c = moments.cumulant(p, q);
        let mag = c.norm();
        let norm = if c21 > 1e-12 { mag / c21.powi(p as i32 / 2) } else { 0.0 };
        out.extend([c.re, c.im, mag, norm]);
    }
    out
}
