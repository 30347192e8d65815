//! Small floating-point helpers shared by every module.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Error-free product: `a * b == p + e` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Error-free sum: `a + b == s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `frac(m * t)` for an integer mode `m`, exact up to one rounding of the result.
#[inline]
pub fn frac_mul(m: i64, t: f64) -> f64 {
    let (p, e) = two_prod(m as f64, t);
    frac(frac(p) + e)
}

/// `e(x) = exp(2 pi i x)`, reduced to `[-1/2, 1/2)` before the trigonometric call.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let mut r = frac(x);
    if r >= 0.5 {
        r -= 1.0;
    }
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// `e(x) - 1` without cancellation near integers.
#[inline]
pub fn e_minus_one(x: f64) -> Complex64 {
    let mut r = frac(x);
    if r >= 0.5 {
        r -= 1.0;
    }
    let half = std::f64::consts::PI * r;
    let s = half.sin();
    Complex64::new(-2.0 * s * s, (TAU * r).sin())
}

/// Distance to the nearest integer, `||x||`.
#[inline]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Complex counterpart of [`CompensatedSum`].
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_stays_in_unit_interval() {
        assert_eq!(frac(-1e-20), 0.0);
        assert_eq!(frac(2.25), 0.25);
        assert_eq!(frac(-0.25), 0.75);
    }

    #[test]
    fn circle_distance_wraps() {
        assert!((circle_dist(0.9, 0.05) - 0.15).abs() < 1e-15);
        assert!((circle_dist(0.0, 0.4) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn e_minus_one_small_argument() {
        let z = e_minus_one(1e-14);
        assert!((z.im - TAU * 1e-14).abs() < 1e-28);
        assert!(z.re.abs() < 1e-26);
    }

    #[test]
    fn frac_mul_large_mode() {
        // 3 * (1/3 rounded) differs from 1 by less than an ulp
        let r = frac_mul(3, 1.0 / 3.0);
        assert!(r < 1e-15 || r > 1.0 - 1e-15);
    }
}
