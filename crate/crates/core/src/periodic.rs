//! Trigonometric polynomials on the circle: evaluation, coefficient
//! extraction, products, the resonant split and the coboundary solver.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{
    classify_denominators, AlphaSpec, ArithError, ContinuedFraction, DenominatorClassification,
    Rotation,
};
use crate::num::{self, frac_mul};

/// Largest mode allowed in a product unless a bound is given explicitly.
pub const DEFAULT_MAX_MODE: i64 = 1 << 20;
/// `|e(m alpha) - 1|` below this is treated as a vanishing divisor.
pub const SMALL_DIVISOR_FLOOR: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Error)]
pub enum PeriodicError {
    #[error("sample count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("need at least 8 samples, got {0}")]
    TooFewSamples(usize),
    #[error("product support reaches mode {required}, above the limit {max}; raise the mode limit to at least {required}")]
    SupportOverflow { required: i64, max: i64 },
    #[error("mode 0 has coefficient {0}; a function with nonzero mean is not a coboundary")]
    ConstantObstruction(Complex64),
    #[error("small divisor at m = {m}: ||m alpha|| = {dist:e}")]
    SmallDivisor { m: i64, dist: f64 },
    #[error("coefficients at modes {0} and -{0} are not conjugate")]
    NotReal(i64),
    #[error("unknown periodic function preset `{0}` (expected cos, sin or cos2)")]
    UnknownPreset(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `f(t) = sum_m c_m e(m t)` with finitely many nonzero `c_m`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PeriodicFunction {
    coeffs: BTreeMap<i64, Complex64>,
    real: bool,
}

impl PeriodicFunction {
    pub fn zero() -> Self {
        PeriodicFunction {
            coeffs: BTreeMap::new(),
            real: true,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_real_modes([(0, c)])
    }

    /// `cos(2 pi t)`.
    pub fn cos() -> Self {
        Self::cos_mode(1, 1.0)
    }

    /// `sin(2 pi t)`.
    pub fn sin() -> Self {
        Self::sin_mode(1, 1.0)
    }

    /// `cos^2(2 pi t)`.
    pub fn cos2() -> Self {
        let mut f = Self::constant(0.5);
        f.coeffs.insert(2, Complex64::new(0.25, 0.0));
        f.coeffs.insert(-2, Complex64::new(0.25, 0.0));
        f
    }

    /// `amp * cos(2 pi m t)`.
    pub fn cos_mode(m: i64, amp: f64) -> Self {
        if m == 0 {
            return Self::constant(amp);
        }
        let c = Complex64::new(amp / 2.0, 0.0);
        let coeffs = BTreeMap::from([(-m.abs(), c), (m.abs(), c)]);
        PeriodicFunction { coeffs, real: true }
    }

    /// `amp * sin(2 pi m t)`.
    pub fn sin_mode(m: i64, amp: f64) -> Self {
        if m == 0 {
            return Self::zero();
        }
        let c = Complex64::new(0.0, -amp / 2.0);
        let coeffs = BTreeMap::from([(m, c), (-m, c.conj())]);
        PeriodicFunction { coeffs, real: true }
    }

    pub fn preset(name: &str) -> Result<Self, PeriodicError> {
        match name {
            "cos" => Ok(Self::cos()),
            "sin" => Ok(Self::sin()),
            "cos2" => Ok(Self::cos2()),
            "zero" => Ok(Self::zero()),
            _ => Err(PeriodicError::UnknownPreset(name.to_string())),
        }
    }

    /// Real function with the given real coefficients on `m` and `-m`.
    pub fn from_real_modes(modes: impl IntoIterator<Item = (i64, f64)>) -> Self {
        let mut f = Self::zero();
        for (m, c) in modes {
            if c != 0.0 {
                let c = Complex64::new(c, 0.0);
                *f.coeffs.entry(m).or_insert(ZERO) += c;
                if m != 0 {
                    *f.coeffs.entry(-m).or_insert(ZERO) += c;
                }
            }
        }
        f.coeffs.retain(|_, c| *c != ZERO);
        f
    }

    /// Builds from an explicit table; `real` requires conjugate symmetry.
    pub fn from_coeffs(
        coeffs: impl IntoIterator<Item = (i64, Complex64)>,
        real: bool,
    ) -> Result<Self, PeriodicError> {
        let mut map = BTreeMap::new();
        for (m, c) in coeffs {
            *map.entry(m).or_insert(ZERO) += c;
        }
        map.retain(|_, c| *c != ZERO);
        let f = PeriodicFunction { coeffs: map, real };
        if real {
            for (&m, &c) in &f.coeffs {
                let partner = f.coeff(-m);
                let tol = 1e-12 * c.norm().max(1e-300);
                if (partner - c.conj()).norm() > tol || (m == 0 && c.im.abs() > tol) {
                    return Err(PeriodicError::NotReal(m.abs()));
                }
            }
        }
        Ok(f)
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeff(&self, m: i64) -> Complex64 {
        self.coeffs.get(&m).copied().unwrap_or(ZERO)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|m|` in the support, 0 for constants.
    pub fn max_mode(&self) -> i64 {
        self.coeffs.keys().map(|m| m.abs()).max().unwrap_or(0)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Complex64 {
        if self.real {
            return Complex64::new(self.eval_real(t), 0.0);
        }
        self.coeffs
            .iter()
            .map(|(&m, &c)| c * num::e(frac_mul(m, t)))
            .sum()
    }

    /// Real part of `f(t)`; for real functions the pairs `m, -m` are combined.
    #[inline]
    pub fn eval_real(&self, t: f64) -> f64 {
        if !self.real {
            return self.eval(t).re;
        }
        let mut acc = 0.0;
        for (&m, &c) in self.coeffs.range(0..) {
            if m == 0 {
                acc += c.re;
            } else {
                acc += 2.0 * (c * num::e(frac_mul(m, t))).re;
            }
        }
        acc
    }

    /// The mean `c_0`.
    pub fn mean(&self) -> f64 {
        self.coeff(0).re
    }

    /// `2 pi sum |m| |c_m|`.
    pub fn lipschitz_bound(&self) -> f64 {
        TAU * self
            .coeffs
            .iter()
            .map(|(&m, c)| m.unsigned_abs() as f64 * c.norm())
            .sum::<f64>()
    }

    /// `sum |c_m|`, a bound on `sup |f|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        out.coeffs.retain(|_, c| *c != ZERO);
        out
    }

    pub fn add(&self, other: &PeriodicFunction) -> Self {
        let mut out = self.clone();
        for (&m, &c) in &other.coeffs {
            *out.coeffs.entry(m).or_insert(ZERO) += c;
        }
        out.coeffs.retain(|_, c| *c != ZERO);
        out.real = self.real && other.real;
        out
    }

    pub fn sub(&self, other: &PeriodicFunction) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// `f * g` by coefficient convolution, with modes bounded by `max_mode`.
    pub fn product_with_limit(
        &self,
        other: &PeriodicFunction,
        max_mode: i64,
    ) -> Result<Self, PeriodicError> {
        let required = self.max_mode() + other.max_mode();
        if required > max_mode {
            return Err(PeriodicError::SupportOverflow {
                required,
                max: max_mode,
            });
        }
        let mut coeffs = BTreeMap::new();
        for (&m, &a) in &self.coeffs {
            for (&n, &b) in &other.coeffs {
                *coeffs.entry(m + n).or_insert(ZERO) += a * b;
            }
        }
        coeffs.retain(|_, c: &mut Complex64| *c != ZERO);
        let real = self.real && other.real;
        let mut out = PeriodicFunction { coeffs, real };
        if real {
            out.symmetrize();
        }
        Ok(out)
    }

    pub fn product(&self, other: &PeriodicFunction) -> Result<Self, PeriodicError> {
        self.product_with_limit(other, DEFAULT_MAX_MODE)
    }

    /// Forces exact conjugate symmetry from the nonnegative modes.
    fn symmetrize(&mut self) {
        let pos: Vec<(i64, Complex64)> = self.coeffs.range(0..).map(|(&m, &c)| (m, c)).collect();
        self.coeffs.retain(|&m, _| m >= 0);
        for (m, c) in pos {
            if m == 0 {
                self.coeffs.insert(0, Complex64::new(c.re, 0.0));
            } else {
                self.coeffs.insert(-m, c.conj());
            }
        }
        self.coeffs.retain(|_, c| *c != ZERO);
    }

    /// Coefficients `|m| < 2^(k-1)` from `2^k` equispaced real samples.
    pub fn from_samples(values: &[f64]) -> Result<Self, PeriodicError> {
        let data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut f = Self::from_complex_samples(&data)?;
        f.real = true;
        f.symmetrize();
        Ok(f)
    }

    pub fn from_complex_samples(values: &[Complex64]) -> Result<Self, PeriodicError> {
        let n = values.len();
        if !n.is_power_of_two() {
            return Err(PeriodicError::NotPowerOfTwo(n));
        }
        if n < 8 {
            return Err(PeriodicError::TooFewSamples(n));
        }
        let mut buf = values.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let half = (n / 2) as i64;
        let mut coeffs = BTreeMap::new();
        for m in -(half - 1)..half {
            let c = buf[m.rem_euclid(n as i64) as usize] / n as f64;
            if c.norm() >= 1e-15 {
                coeffs.insert(m, c);
            }
        }
        Ok(PeriodicFunction {
            coeffs,
            real: false,
        })
    }

    /// `sup |f|` over `n` equispaced points.
    pub fn max_abs_on_grid(&self, n: usize) -> f64 {
        (0..n)
            .map(|i| self.eval(i as f64 / n as f64).norm())
            .fold(0.0, f64::max)
    }

    /// Keeps the modes for which `keep` holds.
    pub fn filter_modes(&self, mut keep: impl FnMut(i64) -> bool) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&m, _)| keep(m))
            .map(|(&m, &c)| (m, c))
            .collect();
        PeriodicFunction {
            coeffs,
            real: self.real,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Table {
    real: bool,
    coeffs: Vec<(i64, f64, f64)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Preset(String),
    Table(Table),
}

impl Serialize for PeriodicFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Table {
            real: self.real,
            coeffs: self.coeffs.iter().map(|(&m, c)| (m, c.re, c.im)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PeriodicFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Preset(name) => Self::preset(&name).map_err(serde::de::Error::custom),
            Repr::Table(t) => Self::from_coeffs(
                t.coeffs
                    .into_iter()
                    .map(|(m, re, im)| (m, Complex64::new(re, im))),
                t.real,
            )
            .map_err(serde::de::Error::custom),
        }
    }
}

/// `f = part1 + part2` with `part1` on the resonant modes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonantSplit {
    pub b: f64,
    pub part1: PeriodicFunction,
    pub part2: PeriodicFunction,
}

/// Splits `f` by membership of its modes in the resonant set.
pub fn split_resonant(
    f: &PeriodicFunction,
    cf: &ContinuedFraction,
    b: f64,
) -> Result<ResonantSplit, PeriodicError> {
    let class = classify_denominators(cf, b)?;
    split_with(f, &class)
}

pub fn split_with(
    f: &PeriodicFunction,
    class: &DenominatorClassification,
) -> Result<ResonantSplit, PeriodicError> {
    let mut part1 = BTreeMap::new();
    let mut part2 = BTreeMap::new();
    for (&m, &c) in &f.coeffs {
        if class.in_m1(m as i128)? {
            part1.insert(m, c);
        } else {
            part2.insert(m, c);
        }
    }
    Ok(ResonantSplit {
        b: class.b,
        part1: PeriodicFunction {
            coeffs: part1,
            real: f.real,
        },
        part2: PeriodicFunction {
            coeffs: part2,
            real: f.real,
        },
    })
}

/// Solves `g(t + alpha) - g(t) = f(t)` mode by mode.
pub fn solve_coboundary(
    f: &PeriodicFunction,
    alpha: &AlphaSpec,
) -> Result<PeriodicFunction, PeriodicError> {
    solve_coboundary_rot(f, &alpha.rotation()?)
}

pub fn solve_coboundary_rot(
    f: &PeriodicFunction,
    rot: &Rotation,
) -> Result<PeriodicFunction, PeriodicError> {
    let c0 = f.coeff(0);
    if c0 != ZERO {
        return Err(PeriodicError::ConstantObstruction(c0));
    }
    let mut coeffs = BTreeMap::new();
    for (&m, &c) in &f.coeffs {
        if f.real && m < 0 {
            continue;
        }
        let divisor = rot.e_minus_one(m as i128);
        if divisor.norm() < SMALL_DIVISOR_FLOOR {
            return Err(PeriodicError::SmallDivisor {
                m,
                dist: rot.dist_to_integer(m as i128),
            });
        }
        let g = c / divisor;
        coeffs.insert(m, g);
        if f.real {
            coeffs.insert(-m, g.conj());
        }
    }
    Ok(PeriodicFunction {
        coeffs,
        real: f.real,
    })
}

/// `sup |g(t + alpha) - g(t) - f(t)|` over `n` equispaced points.
pub fn coboundary_residual(
    g: &PeriodicFunction,
    f: &PeriodicFunction,
    rot: &Rotation,
    n: usize,
) -> f64 {
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let shifted = num::frac(t + rot.frac_mul(1));
            (g.eval(shifted) - g.eval(t) - f.eval(t)).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{cf_expand, CfStop};
    use proptest::prelude::{prop_assert, proptest};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(PeriodicFunction::constant(1.0).eval_real(0.37), 1.0);
        let cos = PeriodicFunction::cos();
        assert!((cos.eval_real(0.0) - 1.0).abs() < 1e-15);
        assert!(cos.eval_real(0.25).abs() < 1e-15);
        let sin = PeriodicFunction::sin();
        assert!((sin.eval_real(0.25) - 1.0).abs() < 1e-15);
        assert!((sin.eval_real(0.1) - (TAU * 0.1).sin()).abs() < 1e-15);
    }

    #[test]
    fn samples_to_coefficients() {
        let ones = vec![1.0; 8];
        let f = PeriodicFunction::from_samples(&ones).unwrap();
        assert_eq!(f.coeffs().collect::<Vec<_>>(), vec![(0, c(1.0, 0.0))]);

        let cos: Vec<f64> = (0..16).map(|i| (TAU * i as f64 / 16.0).cos()).collect();
        let f = PeriodicFunction::from_samples(&cos).unwrap();
        assert!((f.coeff(1) - c(0.5, 0.0)).norm() < 1e-12);
        assert!((f.coeff(-1) - c(0.5, 0.0)).norm() < 1e-12);
        assert!(f.coeffs().all(|(m, _)| m.abs() == 1));

        let cos2: Vec<f64> = (0..16)
            .map(|i| (TAU * i as f64 / 16.0).cos().powi(2))
            .collect();
        let f = PeriodicFunction::from_samples(&cos2).unwrap();
        assert!((f.coeff(0) - c(0.5, 0.0)).norm() < 1e-12);
        assert!((f.coeff(2) - c(0.25, 0.0)).norm() < 1e-12);
        assert!((f.coeff(-2) - c(0.25, 0.0)).norm() < 1e-12);

        assert!(matches!(
            PeriodicFunction::from_samples(&[0.0; 12]),
            Err(PeriodicError::NotPowerOfTwo(12))
        ));
        assert!(PeriodicFunction::from_samples(&[0.0; 4]).is_err());
    }

    #[test]
    fn sample_round_trip() {
        let vals: Vec<f64> = (0..64)
            .map(|i| {
                let t = i as f64 / 64.0;
                (TAU * 3.0 * t).sin() + 0.2 * (TAU * 7.0 * t).cos() - 0.1
            })
            .collect();
        let f = PeriodicFunction::from_samples(&vals).unwrap();
        for (i, &v) in vals.iter().enumerate() {
            assert!((f.eval_real(i as f64 / 64.0) - v).abs() < 1e-10);
        }
    }

    #[test]
    fn products() {
        let g = PeriodicFunction::sin();
        assert_eq!(PeriodicFunction::constant(1.0).product(&g).unwrap(), g);
        let cos = PeriodicFunction::cos();
        let sq = cos.product(&cos).unwrap();
        assert_eq!(sq, PeriodicFunction::cos2());
        assert!(matches!(
            cos.product_with_limit(&cos, 1),
            Err(PeriodicError::SupportOverflow {
                required: 2,
                max: 1
            })
        ));
        // the mean of a product pairs m with -m
        let p = cos.product(&g).unwrap();
        let pairing: Complex64 = cos.coeffs().map(|(m, a)| a * g.coeff(-m)).sum();
        assert!((p.coeff(0) - pairing).norm() < 1e-15);
    }

    #[test]
    fn means_and_lipschitz() {
        assert_eq!(PeriodicFunction::constant(1.0).mean(), 1.0);
        assert_eq!(PeriodicFunction::cos().mean(), 0.0);
        assert_eq!(PeriodicFunction::cos2().mean(), 0.5);
        assert_eq!(PeriodicFunction::constant(3.0).lipschitz_bound(), 0.0);
        assert!((PeriodicFunction::cos().lipschitz_bound() - TAU).abs() < 1e-15);
        let f = PeriodicFunction::from_real_modes([(2, 0.25)]);
        assert!((f.lipschitz_bound() - TAU).abs() < 1e-15);
    }

    #[test]
    fn json_forms() {
        let f: PeriodicFunction =
            serde_json::from_str(r#"{"real": true, "coeffs": [[1, 0.5, 0.0], [-1, 0.5, 0.0]]}"#)
                .unwrap();
        assert_eq!(f, PeriodicFunction::cos());
        let g: PeriodicFunction = serde_json::from_str(r#""cos2""#).unwrap();
        assert_eq!(g, PeriodicFunction::cos2());
        let back: PeriodicFunction =
            serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<PeriodicFunction>(
            r#"{"real": true, "coeffs": [[1, 0.5, 0.0]]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<PeriodicFunction>(r#""tan""#).is_err());
    }

    #[test]
    fn split_examples() {
        let golden = cf_expand(&AlphaSpec::golden(), CfStop::MaxQ(1000)).unwrap();
        let f = PeriodicFunction::cos().add(&PeriodicFunction::constant(0.3));
        let s = split_resonant(&f, &golden, 3.0).unwrap();
        assert_eq!(s.part1, PeriodicFunction::constant(0.3));
        assert_eq!(s.part2, PeriodicFunction::cos());

        let liouville = AlphaSpec::PartialQuotients {
            a: vec![1, 2, 10, 1000, 1_000_000_000, 1],
        };
        let cf = cf_expand(&liouville, CfStop::MaxTerms(10)).unwrap();
        let f = PeriodicFunction::cos_mode(3, 1.0);
        let s = split_resonant(&f, &cf, 3.0).unwrap();
        assert_eq!(s.part1, f);
        assert!(s.part2.is_zero());

        let short = cf_expand(&AlphaSpec::golden(), CfStop::MaxTerms(3)).unwrap();
        assert!(split_resonant(&PeriodicFunction::cos_mode(50, 1.0), &short, 3.0).is_err());
    }

    #[test]
    fn coboundary_examples() {
        let third = AlphaSpec::rational(1, 3);
        let f = PeriodicFunction::from_coeffs([(1, c(1.0, 0.0))], false).unwrap();
        let g = solve_coboundary(&f, &third).unwrap();
        let want = c(1.0, 0.0) / (num::e(1.0 / 3.0) - 1.0);
        assert!((g.coeff(1) - want).norm() < 1e-15);
        assert!(solve_coboundary(&PeriodicFunction::zero(), &third)
            .unwrap()
            .is_zero());

        let golden = AlphaSpec::golden();
        let rot = golden.rotation().unwrap();
        let g = solve_coboundary(&PeriodicFunction::cos(), &golden).unwrap();
        assert_eq!(g.modes().collect::<Vec<_>>(), vec![-1, 1]);
        assert!(coboundary_residual(&g, &PeriodicFunction::cos(), &rot, 1024) < 1e-12);

        assert!(matches!(
            solve_coboundary(&PeriodicFunction::cos2(), &golden),
            Err(PeriodicError::ConstantObstruction(_))
        ));
        assert!(matches!(
            solve_coboundary(&PeriodicFunction::cos_mode(3, 1.0), &third),
            Err(PeriodicError::SmallDivisor { m: -3, .. })
                | Err(PeriodicError::SmallDivisor { m: 3, .. })
        ));
    }

    proptest! {
        #[test]
        fn real_functions_evaluate_real(amps in proptest::collection::vec(-1.0..1.0f64, 1..6), phase in 0.0..1.0f64, t in 0.0..1.0f64) {
            let mut f = PeriodicFunction::zero();
            for (i, &a) in amps.iter().enumerate() {
                f = f.add(&PeriodicFunction::cos_mode(i as i64 + 1, a)).add(&PeriodicFunction::sin_mode(i as i64 + 1, phase * a));
            }
            let z = PeriodicFunction { real: false, ..f.clone() }.eval(t);
            prop_assert!(z.im.abs() < 1e-12);
            prop_assert!((z.re - f.eval_real(t)).abs() < 1e-12);
        }

        #[test]
        fn product_is_pointwise(a in -1.0..1.0f64, b in -1.0..1.0f64, t in 0.0..1.0f64) {
            let f = PeriodicFunction::cos_mode(2, a).add(&PeriodicFunction::sin());
            let g = PeriodicFunction::sin_mode(3, b).add(&PeriodicFunction::constant(0.5));
            let p = f.product(&g).unwrap();
            prop_assert!((p.eval_real(t) - f.eval_real(t) * g.eval_real(t)).abs() < 1e-10);
        }

        #[test]
        fn lipschitz_bounds_difference_quotients(a in -1.0..1.0f64, b in -1.0..1.0f64, t1 in 0.0..1.0f64, t2 in 0.0..1.0f64) {
            let f = PeriodicFunction::cos_mode(2, a).add(&PeriodicFunction::sin_mode(5, b));
            let d = num::circle_dist(t1, t2);
            prop_assert!((f.eval_real(t1) - f.eval_real(t2)).abs() <= f.lipschitz_bound() * d + 1e-12);
        }
    }
}
