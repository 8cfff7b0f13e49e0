//! Unit-average-power symbol alphabets.

use crate::prelude::*;
use core::f64::consts::{FRAC_PI_4, PI, TAU};


use crate::ModClass;

/// Ring layout of an APSK constellation: (points on ring, relative radius, phase offset).
type Ring = (usize, f64, f64);

// DVB-S2 / S2X ring tables (one code-rate representative per order).
const APSK16: [Ring; 2] = [(4, 1.0, FRAC_PI_4), (12, 2.57, PI / 12.0)];
const APSK32: [Ring; 3] = [(4, 1.0, FRAC_PI_4), (12, 2.53, PI / 12.0), (16, 4.30, 0.0)];
const APSK64: [Ring; 4] = [
    (4, 1.0, FRAC_PI_4),
    (12, 2.4, PI / 12.0),
    (20, 4.3, PI / 20.0),
    (28, 7.0, PI / 28.0),
];
const APSK128: [Ring; 6] = [
    (16, 1.0, PI / 16.0),
    (16, 1.715, PI / 16.0),
    (16, 2.118, PI / 16.0),
    (16, 2.681, PI / 16.0),
    (16, 2.75, PI / 16.0),
    (48, 3.603, PI / 48.0),
];

fn normalize(points: &mut [Cplx]) {
    let p = points.iter().map(|c| c.norm_sqr()).sum::<f64>() / points.len() as f64;
    if p > 0.0 {
        let s = 1.0 / p.sqrt();
        points.iter_mut().for_each(|c| *c *= s);
    }
}

fn psk(m: usize, offset: f64) -> Vec<Cplx> {
    (0..m)
        .map(|k| Cplx::from_polar(1.0, offset + TAU * k as f64 / m as f64))
        .collect()
}

fn ask(m: usize) -> Vec<Cplx> {
    (0..m).map(|k| Cplx::new(k as f64, 0.0)).collect()
}

fn apsk(rings: &[Ring]) -> Vec<Cplx> {
    rings
        .iter()
        .flat_map(|&(n, r, off)| psk(n, off).into_iter().map(move |c| c * r))
        .collect()
}

/// Square grid of side `side`, optionally with `corner` x `corner` blocks cut
/// from each corner (cross constellations for odd bit counts).
fn qam_grid(side: usize, corner: usize) -> Vec<Cplx> {
    let mut pts = Vec::with_capacity(side * side);
    let half = (side as f64 - 1.0) / 2.0;
    for i in 0..side {
        for q in 0..side {
            let in_corner = |v: usize| v < corner || v >= side - corner;
            if corner > 0 && in_corner(i) && in_corner(q) {
                continue;
            }
            pts.push(Cplx::new(2.0 * (i as f64 - half), 2.0 * (q as f64 - half)));
        }
    }
    pts
}

/// Constellation points for a digital linear scheme, normalized to unit mean
/// power. Returns `None` for schemes that are not memoryless point maps
/// (GMSK and the analog family).
pub fn constellation(scheme: ModClass) -> Option<Vec<Cplx>> {
    let mut pts = match scheme {
        ModClass::Ook => ask(2),
        ModClass::Ask4 => ask(4),
        ModClass::Ask8 => ask(8),
        ModClass::Bpsk => psk(2, 0.0),
        ModClass::Qpsk | ModClass::Oqpsk => psk(4, FRAC_PI_4),
        ModClass::Psk8 => psk(8, 0.0),
        ModClass::Psk16 => psk(16, 0.0),
        ModClass::Psk32 => psk(32, 0.0),
        ModClass::Apsk16 => apsk(&APSK16),
        ModClass::Apsk32 => apsk(&APSK32),
        ModClass::Apsk64 => apsk(&APSK64),
        ModClass::Apsk128 => apsk(&APSK128),
        ModClass::Qam16 => qam_grid(4, 0),
        ModClass::Qam32 => qam_grid(6, 1),
        ModClass::Qam64 => qam_grid(8, 0),
        ModClass::Qam128 => qam_grid(12, 2),
        ModClass::Qam256 => qam_grid(16, 0),
        _ => return None,
    };
    normalize(&mut pts);
    Some(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_order() {
        let cases = [
            (ModClass::Ook, 2),
            (ModClass::Ask8, 8),
            (ModClass::Psk32, 32),
            (ModClass::Apsk16, 16),
            (ModClass::Apsk32, 32),
            (ModClass::Apsk64, 64),
            (ModClass::Apsk128, 128),
            (ModClass::Qam32, 32),
            (ModClass::Qam128, 128),
            (ModClass::Qam256, 256),
        ];
        for (m, n) in cases {
            assert_eq!(constellation(m).unwrap().len(), n, "{m}");
        }
        assert!(constellation(ModClass::Gmsk).is_none());
        assert!(constellation(ModClass::Fm).is_none());
    }

    #[test]
    fn unit_average_power() {
        for m in ModClass::ALL {
            if let Some(pts) = constellation(m) {
                let p = pts.iter().map(|c| c.norm_sqr()).sum::<f64>() / pts.len() as f64;
                assert!((p - 1.0).abs() < 1e-12, "{m}: {p}");
            }
        }
    }

    #[test]
    fn ook_levels() {
        let pts = constellation(ModClass::Ook).unwrap();
        assert!(pts[0].norm() < 1e-15);
        assert!((pts[1].re - 2f64.sqrt()).abs() < 1e-12);
    }
}
