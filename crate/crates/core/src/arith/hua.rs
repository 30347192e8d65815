//! Mobius-twisted polynomial exponential sums `sum mu(n) e(f(n))` over an
//! arithmetic progression.
//!
//! Phases are carried as 128-bit fixed-point fractions of a turn and advanced
//! by forward differences. The difference table is rebuilt exactly from the
//! coefficients every [`RESEED_INTERVAL`] steps, so rounding never accumulates
//! beyond one interval. `e(theta)` is read from two 4096-entry tables plus a
//! short Taylor correction.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_complex::Complex64;

use super::{ArithError, MobiusTable};
use crate::num::CompensatedComplex;

pub const MAX_DEGREE: usize = 4;
pub const RESEED_INTERVAL: u64 = 1 << 16;

/// Successive phases `f(n0), f(n0 + step), f(n0 + 2 step), ...` as fixed-point
/// fractions of a turn (`2^128` is one full turn).
#[derive(Clone, Debug)]
pub struct PolyPhase {
    /// Ascending coefficients `c_0, ..., c_d`.
    coeffs: Vec<f64>,
    n0: u64,
    step: u64,
    j: u64,
    diffs: [u128; MAX_DEGREE + 1],
    reseed_at: u64,
}

impl PolyPhase {
    /// `coeffs_desc` lists `alpha_d, ..., alpha_0` (highest degree first).
    pub fn new(coeffs_desc: &[f64], n0: u64, step: u64) -> Result<Self, ArithError> {
        if let Some(&c) = coeffs_desc.iter().find(|c| !c.is_finite()) {
            return Err(ArithError::NonFiniteCoefficient(c));
        }
        let mut coeffs: Vec<f64> = coeffs_desc.iter().rev().copied().collect();
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(ArithError::UnsupportedDegree(coeffs.len() - 1));
        }
        let mut p = PolyPhase {
            coeffs,
            n0,
            step,
            j: 0,
            diffs: [0; MAX_DEGREE + 1],
            reseed_at: 0,
        };
        p.reseed();
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The current argument `n0 + j * step`.
    pub fn n(&self) -> u64 {
        self.n0 + self.j * self.step
    }

    /// `f(n) mod 1` for the current `n`, scaled by `2^128`.
    #[inline]
    pub fn phase(&self) -> u128 {
        self.diffs[0]
    }

    #[inline]
    pub fn advance(&mut self) {
        let d = self.degree();
        for i in 0..d {
            self.diffs[i] = self.diffs[i].wrapping_add(self.diffs[i + 1]);
        }
        self.j += 1;
        if self.j == self.reseed_at {
            self.reseed();
        }
    }

    /// Exact value of `f` at `n0 + (j + i) step`, modulo one.
    fn exact_at(&self, i: u64) -> u128 {
        let n = BigUint::from(self.n0) + BigUint::from(self.step) * BigUint::from(self.j + i);
        let mut acc = 0u128;
        let mut pow = BigUint::from(1u32);
        for &c in &self.coeffs {
            acc = acc.wrapping_add(fixed_product(c, &pow));
            pow *= &n;
        }
        acc
    }

    fn reseed(&mut self) {
        let d = self.degree();
        let vals: Vec<u128> = (0..=d as u64).map(|i| self.exact_at(i)).collect();
        for i in 0..=d {
            // forward difference of order i from binomial weights
            let mut acc = 0u128;
            let mut binom = 1u128;
            for k in 0..=i {
                let term = vals[k].wrapping_mul(binom);
                if (i - k) % 2 == 0 {
                    acc = acc.wrapping_add(term);
                } else {
                    acc = acc.wrapping_sub(term);
                }
                binom = binom * (i - k) as u128 / (k + 1) as u128;
            }
            self.diffs[i] = acc;
        }
        self.reseed_at = self.j + RESEED_INTERVAL;
    }
}

/// `c * n mod 1` scaled by `2^128`, exact up to truncation below `2^-128`.
fn fixed_product(c: f64, n: &BigUint) -> u128 {
    if c == 0.0 {
        return 0;
    }
    let bits = c.abs().to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if biased == 0 {
        (frac_bits, -1074)
    } else {
        (frac_bits | (1u64 << 52), biased - 1075)
    };
    let v = BigUint::from(mantissa) * n;
    let shift = exp + 128;
    let v = if shift >= 0 {
        v << shift as u64
    } else {
        v >> (-shift) as u64
    };
    let mut digits = v.iter_u64_digits();
    let lo = digits.next().unwrap_or(0) as u128;
    let hi = digits.next().unwrap_or(0) as u128;
    let x = lo | (hi << 64);
    if c < 0.0 {
        x.wrapping_neg()
    } else {
        x
    }
}

struct Tables {
    coarse: Vec<Complex64>,
    fine: Vec<Complex64>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let make = |scale: f64| -> Vec<Complex64> {
            (0..4096)
                .map(|i| {
                    let (s, c) = (TAU * i as f64 * scale).sin_cos();
                    Complex64::new(c, s)
                })
                .collect()
        };
        Tables {
            coarse: make(1.0 / 4096.0),
            fine: make(1.0 / (1u64 << 24) as f64),
        }
    })
}

/// `e(theta / 2^128)`.
#[inline]
pub fn e_fixed(theta: u128) -> Complex64 {
    let t = tables();
    let top = (theta >> 64) as u64;
    let a = (top >> 52) as usize;
    let b = ((top >> 40) & 0xfff) as usize;
    let rest = (top & ((1u64 << 40) - 1)) as f64 * 2f64.powi(-64)
        + (theta as u64) as f64 * 2f64.powi(-128);
    let x = TAU * rest;
    let x2 = x * x;
    let tail = Complex64::new(1.0 - 0.5 * x2, x * (1.0 - x2 / 6.0));
    t.coarse[a] * t.fine[b] * tail
}

/// `sum_{n <= N, n = a mod q} mu(n) e(f(n))` with `f` given highest degree first.
pub fn hua_sum(
    coeffs_desc: &[f64],
    a: u64,
    q: u64,
    n: u64,
    table: &MobiusTable,
) -> Result<Complex64, ArithError> {
    Ok(hua_sums_at(coeffs_desc, a, q, &[n], table)?[0])
}

/// Partial sums of [`hua_sum`] at each of the sorted `checkpoints`, in one pass.
pub fn hua_sums_at(
    coeffs_desc: &[f64],
    a: u64,
    q: u64,
    checkpoints: &[u64],
    table: &MobiusTable,
) -> Result<Vec<Complex64>, ArithError> {
    if q == 0 || a >= q {
        return Err(ArithError::InvalidProgression { a, q });
    }
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    if last > table.limit() {
        return Err(ArithError::OutOfRange {
            n: last,
            limit: table.limit(),
        });
    }
    let n0 = if a == 0 { q } else { a };
    let mut phase = PolyPhase::new(coeffs_desc, n0, q)?;
    let mut order: Vec<usize> = (0..checkpoints.len()).collect();
    order.sort_by_key(|&i| checkpoints[i]);
    let mut out = vec![Complex64::new(0.0, 0.0); checkpoints.len()];

    let mut total = CompensatedComplex::new();
    let mut block = Complex64::new(0.0, 0.0);
    let mut in_block = 0u32;
    let mut n = n0;
    for &idx in &order {
        let stop = checkpoints[idx];
        while n <= stop {
            let mu = table.mu(n);
            if mu != 0 {
                let z = e_fixed(phase.phase());
                if mu > 0 {
                    block += z;
                } else {
                    block -= z;
                }
            }
            in_block += 1;
            if in_block == 1 << 12 {
                total.add(block);
                block = Complex64::new(0.0, 0.0);
                in_block = 0;
            }
            phase.advance();
            n += q;
        }
        let mut snapshot = total;
        snapshot.add(block);
        out[idx] = snapshot.value();
    }
    Ok(out)
}
