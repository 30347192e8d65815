use num_complex::Complex64;
use serde::Serialize;

use crate::arith::Rotation;
use crate::num::{self, CompensatedComplex, CompensatedSum};
use crate::periodic::PeriodicFunction;

/// `||m alpha||` below this sends [`geometric_mode_sum`] to direct summation.
const GEOMETRIC_FLOOR: f64 = 1e-12;

/// Ergodic sums of the resonant parts along `t, t + alpha, ..., t + (n-1) alpha`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ResonantSums {
    pub phi: f64,
    pub eta: f64,
    pub psi: f64,
}

pub fn resonant_sums(
    phi1: &PeriodicFunction,
    eta1: &PeriodicFunction,
    psi1: &PeriodicFunction,
    rot: &Rotation,
    n: u64,
    t: f64,
) -> ResonantSums {
    let (mut a, mut b, mut c) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for l in 0..n {
        let s = rot.phase(t, l);
        a.add(phi1.eval_real(s));
        b.add(eta1.eval_real(s));
        c.add(psi1.eval_real(s));
    }
    ResonantSums {
        phi: a.value(),
        eta: b.value(),
        psi: c.value(),
    }
}

/// `sum_{l < n} e(m l alpha)`, by the geometric series when `m alpha` is not
/// too close to an integer.
pub fn geometric_mode_sum(m: i64, rot: &Rotation, n: u64) -> Complex64 {
    if rot.dist_to_integer(m as i128) > GEOMETRIC_FLOOR {
        let num = rot.e_minus_one(m as i128 * n as i128);
        num / rot.e_minus_one(m as i128)
    } else {
        direct_mode_sum(m, rot, n)
    }
}

pub(crate) fn direct_mode_sum(m: i64, rot: &Rotation, n: u64) -> Complex64 {
    let mut acc = CompensatedComplex::new();
    for l in 0..n {
        acc.add(num::e(rot.frac_mul(m as i128 * l as i128)));
    }
    acc.value()
}

/// `sum_{l < n} f(t + l alpha)` assembled from per-mode sums.
pub fn mode_sum_series(f: &PeriodicFunction, mode_sums: &[(i64, Complex64)], t: f64) -> Complex64 {
    mode_sums
        .iter()
        .map(|&(m, g)| f.coeff(m) * g * num::e(num::frac_mul(m, t)))
        .sum()
}

/// `sup_t |sum_{l < q} f(t + l alpha) - q c_0|` over `grid` equispaced points.
pub fn lemma43_sup(f: &PeriodicFunction, rot: &Rotation, q: u64, grid: usize) -> f64 {
    let sums: Vec<(i64, Complex64)> = f
        .modes()
        .filter(|&m| m != 0)
        .map(|m| (m, direct_mode_sum(m, rot, q)))
        .collect();
    (0..grid)
        .map(|i| mode_sum_series(f, &sums, i as f64 / grid as f64).norm())
        .fold(0.0, f64::max)
}
