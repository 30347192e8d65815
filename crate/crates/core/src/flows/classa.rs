use num_complex::Complex64;

use super::{BlockSums, FlowError, SkewKind, SkewProduct};
use crate::heisenberg::PhasePoint;
use crate::num::{self, frac_mul};

/// `sum_{|l| <= trunc} exp(-pi (w + l)^2) e(l s)`, re-centred at the integer
/// nearest to `w` so that large `w` keeps full accuracy.
fn theta_sum(w: f64, s: f64, trunc: i64) -> Complex64 {
    let r = w.round();
    let w0 = w - r;
    let s = num::frac(s);
    let mut acc = Complex64::new(0.0, 0.0);
    for l in -trunc..=trunc {
        let g = (-std::f64::consts::PI * (w0 + l as f64).powi(2)).exp();
        acc += g * num::e(frac_mul(l - r as i64, s));
    }
    acc
}

/// `omega(u, v) = sum_l exp(-pi (v + y0 + l)^2) e(l (u + x0))`.
///
/// Periodic in `u`; in `v` it picks up a phase,
/// `omega(u, v + 1) = e(-(u + x0)) omega(u, v)`, so only `|omega|` is doubly
/// periodic.
pub fn omega_kernel(u: f64, v: f64, x0: f64, y0: f64, trunc: i64) -> Complex64 {
    theta_sum(v + y0, u + x0, trunc)
}

/// The typical observable `e(t + x + y + z) sum_l exp(-pi (y + l)^2) e(l x)`
/// at raw coordinates.
pub fn typical_value(t: f64, x: f64, y: f64, z: f64, trunc: i64) -> Complex64 {
    num::e(num::frac(t) + num::frac(x) + num::frac(y) + num::frac(z)) * theta_sum(y, x, trunc)
}

/// The typical observable at `S^n(start)` from the orbit sums:
/// `rho omega(S1, S2) e(n alpha + (y0 + 1) S1 + S2 + S3 + S4)`.
pub fn closed_form_class_a(
    map: &SkewProduct,
    blocks: &BlockSums,
    n: u64,
    start: &PhasePoint,
    trunc: i64,
) -> Result<Complex64, FlowError> {
    if !matches!(map.kind(), SkewKind::S { .. }) {
        return Err(FlowError::WrongKind("the class-A closed form", "S"));
    }
    if map.rotation().rational_parts().is_none() {
        return Err(FlowError::NotRational("the class-A closed form"));
    }
    let [t0, x0, y0, z0] = start.coords();
    let s = blocks.eval(n);
    let rho = num::e(t0 + x0 + y0 + z0);
    let phase = map.rotation().frac_mul(n as i128)
        + num::frac((y0 + 1.0) * s.s1)
        + num::frac(s.s2)
        + num::frac(s.s3)
        + num::frac(s.s4);
    Ok(rho * omega_kernel(s.s1, s.s2, x0, y0, trunc) * num::e(phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::AlphaSpec;
    use crate::flows::SkewProductSpec;
    use crate::periodic::PeriodicFunction;

    #[test]
    fn typical_at_identity() {
        let v = typical_value(0.0, 0.0, 0.0, 0.0, 12);
        assert!((v.re - 1.0864348).abs() < 1e-6);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn omega_periodicity() {
        for &(u, v) in &[(0.1, 0.2), (3.7, -1.2), (-0.45, 12.3)] {
            let w = omega_kernel(u, v, 0.3, 0.6, 12);
            assert!((omega_kernel(u + 1.0, v, 0.3, 0.6, 12) - w).norm() < 1e-10);
            let shifted = omega_kernel(u, v + 1.0, 0.3, 0.6, 12);
            assert!((shifted - num::e(-(u + 0.3)) * w).norm() < 1e-10);
            assert!((shifted.norm() - w.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_matches_orbit() {
        let map = SkewProduct::new(SkewProductSpec {
            alpha: AlphaSpec::rational(3, 7),
            kind: SkewKind::S {
                phi1: PeriodicFunction::cos(),
                phi2: PeriodicFunction::sin_mode(2, 0.7).add(&PeriodicFunction::constant(0.1)),
                psi: PeriodicFunction::cos_mode(3, 0.4),
            },
        })
        .unwrap();
        let start = PhasePoint::new(0.15, 0.4, 0.8, 0.33);
        let blocks = BlockSums::new(&map, start.t).unwrap();
        let orbit = map.orbit(start, 1000, 1);
        for n in [0u64, 1, 5, 999, 1000] {
            let p = orbit[n as usize];
            let [t, x, y, z] = p.coords();
            let direct = typical_value(t, x, y, z, 12);
            let closed = closed_form_class_a(&map, &blocks, n, &start, 12).unwrap();
            assert!(
                (direct - closed).norm() < 1e-8,
                "n={n}: {direct} vs {closed}"
            );
        }
    }
}
