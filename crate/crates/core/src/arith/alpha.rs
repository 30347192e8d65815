//! Rotation numbers: their exact descriptions and a numeric form that keeps
//! `frac(n * alpha)` accurate for large `n`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ArithError;
use crate::num::{self, two_prod, two_sum};

/// An exactly described rotation number in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", try_from = "AlphaRepr")]
pub enum AlphaSpec {
    /// `p / q` in lowest terms.
    Rational { p: u64, q: u64 },
    /// `(sqrt(d) + p) / q` with `d` not a perfect square.
    Quadratic { d: u64, p: i64, q: i64 },
    /// `[0; a_1, a_2, ...]`, a finite prefix of the expansion.
    PartialQuotients { a: Vec<u64> },
    /// A decimal reading, trusted only to within `precision`.
    Decimal { value: String, precision: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum AlphaDef {
    Rational { p: u64, q: u64 },
    Quadratic { d: u64, p: i64, q: i64 },
    PartialQuotients { a: Vec<u64> },
    Decimal { value: String, precision: f64 },
}

/// JSON accepts the tagged object or the shorthand string of [`AlphaSpec::parse`].
#[derive(Deserialize)]
#[serde(untagged)]
enum AlphaRepr {
    Short(String),
    Tagged(AlphaDef),
}

impl TryFrom<AlphaRepr> for AlphaSpec {
    type Error = ArithError;

    fn try_from(r: AlphaRepr) -> Result<Self, ArithError> {
        let spec = match r {
            AlphaRepr::Short(s) => return AlphaSpec::parse(&s),
            AlphaRepr::Tagged(AlphaDef::Rational { p, q }) => AlphaSpec::Rational { p, q },
            AlphaRepr::Tagged(AlphaDef::Quadratic { d, p, q }) => AlphaSpec::Quadratic { d, p, q },
            AlphaRepr::Tagged(AlphaDef::PartialQuotients { a }) => {
                AlphaSpec::PartialQuotients { a }
            }
            AlphaRepr::Tagged(AlphaDef::Decimal { value, precision }) => {
                AlphaSpec::Decimal { value, precision }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl AlphaSpec {
    /// `(sqrt 5 - 1) / 2`, all partial quotients equal to one.
    pub fn golden() -> Self {
        AlphaSpec::Quadratic { d: 5, p: -1, q: 2 }
    }

    pub fn rational(p: u64, q: u64) -> Self {
        AlphaSpec::Rational { p, q }
    }

    /// Parses the command-line shorthand: `golden`, `3/7`, `quad:5:-1:2`,
    /// `cf:1,2,10` or a plain decimal such as `0.4142`.
    pub fn parse(s: &str) -> Result<Self, ArithError> {
        let s = s.trim();
        let bad = || ArithError::InvalidAlpha(format!("cannot parse rotation number `{s}`"));
        let spec = if s == "golden" {
            Self::golden()
        } else if let Some(rest) = s.strip_prefix("quad:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            AlphaSpec::Quadratic {
                d: parts[0].parse().map_err(|_| bad())?,
                p: parts[1].parse().map_err(|_| bad())?,
                q: parts[2].parse().map_err(|_| bad())?,
            }
        } else if let Some(rest) = s.strip_prefix("cf:") {
            let a = rest
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|x| x.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            AlphaSpec::PartialQuotients { a }
        } else if let Some((p, q)) = s.split_once('/') {
            AlphaSpec::Rational {
                p: p.trim().parse().map_err(|_| bad())?,
                q: q.trim().parse().map_err(|_| bad())?,
            }
        } else {
            let digits = s.split_once('.').map(|(_, f)| f.len()).unwrap_or(0);
            AlphaSpec::Decimal {
                value: s.to_string(),
                precision: 0.5 * 10f64.powi(-(digits as i32)),
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ArithError> {
        match self {
            AlphaSpec::Rational { p, q } => {
                if *q == 0 || p >= q {
                    return Err(ArithError::InvalidAlpha(format!(
                        "rational {p}/{q} must satisfy 0 <= p < q"
                    )));
                }
                if gcd(*p, *q) != 1 {
                    return Err(ArithError::InvalidAlpha(format!(
                        "rational {p}/{q} is not in lowest terms"
                    )));
                }
            }
            AlphaSpec::Quadratic { d, p, q } => {
                let s = d.isqrt();
                if s * s == *d {
                    return Err(ArithError::InvalidAlpha(format!("{d} is a perfect square")));
                }
                if *q == 0 {
                    return Err(ArithError::InvalidAlpha("zero denominator".into()));
                }
                let v = ((*d as f64).sqrt() + *p as f64) / *q as f64;
                if !(v > 0.0 && v < 1.0) {
                    return Err(ArithError::InvalidAlpha(format!(
                        "(sqrt({d}) + {p}) / {q} = {v} is outside (0, 1)"
                    )));
                }
            }
            AlphaSpec::PartialQuotients { a } => {
                if a.contains(&0) {
                    return Err(ArithError::InvalidAlpha(
                        "partial quotients must be positive".into(),
                    ));
                }
            }
            AlphaSpec::Decimal { value, precision } => {
                parse_decimal(value)?;
                if !(*precision > 0.0 && *precision < 1.0) {
                    return Err(ArithError::InvalidAlpha(format!(
                        "declared precision {precision} must lie in (0, 1)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The numeric form used by every orbit and Fourier computation.
    pub fn rotation(&self) -> Result<Rotation, ArithError> {
        self.validate()?;
        Ok(match self {
            AlphaSpec::Rational { p, q } => Rotation::Rational { p: *p, q: *q },
            AlphaSpec::Quadratic { d, p, q } => {
                let s = (*d as f64).sqrt();
                // s^2 + r == d exactly
                let (sq, sq_err) = two_prod(s, s);
                let r = (*d as f64 - sq) - sq_err;
                let root = Dd::new(s, r / (2.0 * s));
                Rotation::Real(root.add_f64(*p as f64).div_f64(*q as f64))
            }
            AlphaSpec::PartialQuotients { a } => {
                if a.is_empty() {
                    return Ok(Rotation::Rational { p: 0, q: 1 });
                }
                let mut x = Dd::from_f64(*a.last().unwrap() as f64);
                for &ai in a.iter().rev().skip(1) {
                    x = x.recip().add_f64(ai as f64);
                }
                Rotation::Real(x.recip())
            }
            AlphaSpec::Decimal { value, .. } => {
                let (num, den) = parse_decimal(value)?;
                Rotation::Real(Dd::from_u128(num).div(Dd::from_u128(den)))
            }
        })
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Rational { p, q } => write!(f, "{p}/{q}"),
            AlphaSpec::Quadratic { d, p, q } => write!(f, "(sqrt({d}) + {p})/{q}"),
            AlphaSpec::PartialQuotients { a } => write!(f, "[0; {a:?}]"),
            AlphaSpec::Decimal { value, precision } => write!(f, "{value} (+/- {precision:e})"),
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact value of a decimal string in `[0, 1)` as `num / den`, `den = 10^k`.
pub(crate) fn parse_decimal(s: &str) -> Result<(u128, u128), ArithError> {
    let bad = || ArithError::InvalidAlpha(format!("`{s}` is not a decimal in [0, 1)"));
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if !(int.is_empty() || int.chars().all(|c| c == '0')) {
        return Err(bad());
    }
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 38 {
        return Err(ArithError::InvalidAlpha(format!(
            "decimal `{s}` has more than 38 fractional digits"
        )));
    }
    let num = if frac.is_empty() {
        0
    } else {
        frac.parse::<u128>().map_err(|_| bad())?
    };
    Ok((num, 10u128.pow(frac.len() as u32)))
}

/// Double-double real `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_u128(x: u128) -> Self {
        let hi = x as f64;
        // hi is within 2^75 of x, so the residual fits comfortably in an i128
        let rem = if (hi as u128) >= x {
            -(((hi as u128) - x) as f64)
        } else {
            (x - hi as u128) as f64
        };
        Dd::new(hi, rem)
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::new(s, e + self.lo + o.lo)
    }

    pub fn add_f64(self, x: f64) -> Dd {
        self.add(Dd::from_f64(x))
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::new(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::from_f64(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::from_f64(-q2)));
        let q3 = r.hi / o.hi;
        Dd::new(q1, q2).add_f64(q3)
    }

    pub fn div_f64(self, x: f64) -> Dd {
        self.div(Dd::from_f64(x))
    }

    pub fn recip(self) -> Dd {
        Dd::from_f64(1.0).div(self)
    }

    /// `frac(n * self)` for an integer `n` with `|n| < 2^53`.
    fn frac_mul_small(self, n: f64) -> f64 {
        let (p, e) = two_prod(n, self.hi);
        let head = p - p.floor();
        num::frac(head + (e + n * self.lo))
    }

    fn scale_pow2(self, k: i32) -> Dd {
        let s = 2f64.powi(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }
}

/// The rotation `t -> t + alpha` in the form used numerically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rotation {
    /// `p / q` handled in exact integer arithmetic.
    Rational { p: u64, q: u64 },
    /// Any other rotation number, carried to double-double precision.
    Real(Dd),
}

impl Rotation {
    pub fn value(&self) -> f64 {
        match *self {
            Rotation::Rational { p, q } => p as f64 / q as f64,
            Rotation::Real(d) => d.value(),
        }
    }

    /// `frac(n * alpha)` in `[0, 1)`.
    pub fn frac_mul(&self, n: i128) -> f64 {
        match *self {
            Rotation::Rational { p, q } => {
                let r = (n.rem_euclid(q as i128) as u128 * p as u128) % q as u128;
                r as f64 / q as f64
            }
            Rotation::Real(d) => {
                const SPLIT: i128 = 1 << 32;
                if n.unsigned_abs() < (1u128 << 52) {
                    d.frac_mul_small(n as f64)
                } else {
                    // n = h * 2^32 + l, both halves well inside the f64 integer range
                    let h = n.div_euclid(SPLIT);
                    let l = n.rem_euclid(SPLIT);
                    let scaled = d.scale_pow2(32);
                    let big = Dd::new(num::frac(scaled.hi), scaled.lo);
                    let lo_part = d.frac_mul_small(l as f64);
                    let hi_part = if h.unsigned_abs() < (1u128 << 52) {
                        big.frac_mul_small(h as f64)
                    } else {
                        // beyond 2^84 the answer is noise; stay deterministic
                        num::frac(h as f64 * big.hi)
                    };
                    num::frac(hi_part + lo_part)
                }
            }
        }
    }

    /// `||n alpha||`, the distance from `n alpha` to the nearest integer.
    pub fn dist_to_integer(&self, n: i128) -> f64 {
        let r = self.frac_mul(n);
        r.min(1.0 - r)
    }

    /// `e(n alpha) - 1` computed from the reduced phase.
    pub fn e_minus_one(&self, n: i128) -> Complex64 {
        num::e_minus_one(self.frac_mul(n))
    }

    /// `t + n alpha` reduced to `[0, 1)`, with `n alpha` reduced first.
    pub fn phase(&self, t: f64, n: u64) -> f64 {
        num::frac(t + self.frac_mul(n as i128))
    }

    pub fn rational_parts(&self) -> Option<(u64, u64)> {
        match *self {
            Rotation::Rational { p, q } => Some((p, q)),
            Rotation::Real(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_to_double_double() {
        let r = AlphaSpec::golden().rotation().unwrap();
        let Rotation::Real(d) = r else { panic!() };
        // phi^2 + phi - 1 = 0 to double-double accuracy
        let resid = d.mul(d).add(d).add_f64(-1.0);
        assert!(resid.value().abs() < 1e-30, "{resid:?}");
    }

    #[test]
    fn large_multiples_of_golden_are_accurate() {
        let r = AlphaSpec::golden().rotation().unwrap();
        // F_30 = 832040, F_31 = 1346269: ||F_30 alpha|| = 1/(F_31 + F_30 alpha) roughly
        let d = r.dist_to_integer(832_040);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let expected = phi.powi(30);
        assert!((d - expected).abs() < 1e-15 * 1e3, "{d} vs {expected}");
        assert!((d / expected - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rational_is_exact() {
        let r = AlphaSpec::rational(3, 7).rotation().unwrap();
        assert_eq!(r.frac_mul(7), 0.0);
        assert_eq!(r.frac_mul(-1), 4.0 / 7.0);
        assert_eq!(r.phase(0.0, 14), 0.0);
    }

    #[test]
    fn partial_quotient_value() {
        let r = AlphaSpec::PartialQuotients { a: vec![2, 3, 2] }
            .rotation()
            .unwrap();
        assert!((r.value() - 7.0 / 16.0).abs() < 1e-17);
    }

    #[test]
    fn decimal_value_and_validation() {
        let r = AlphaSpec::parse("0.4375").unwrap().rotation().unwrap();
        assert_eq!(r.value(), 0.4375);
        assert!(AlphaSpec::parse("1.5").is_err());
        assert!(AlphaSpec::Rational { p: 2, q: 4 }.validate().is_err());
        assert!(AlphaSpec::Quadratic { d: 4, p: 0, q: 3 }
            .validate()
            .is_err());
    }

    #[test]
    fn split_multiplication_agrees_with_direct() {
        let r = AlphaSpec::golden().rotation().unwrap();
        let n: i128 = (1 << 52) + 12345;
        let a = r.frac_mul(n);
        let b = num::frac(r.frac_mul(1 << 52) + r.frac_mul(12345));
        assert!(num::circle_dist(a, b) < 1e-12);
    }

    #[test]
    fn json_forms() {
        let a: AlphaSpec = serde_json::from_str(r#""golden""#).unwrap();
        assert_eq!(a, AlphaSpec::golden());
        let a: AlphaSpec = serde_json::from_str(r#"{"type": "rational", "p": 3, "q": 7}"#).unwrap();
        assert_eq!(a, AlphaSpec::rational(3, 7));
        assert_eq!(
            serde_json::from_str::<AlphaSpec>(&serde_json::to_string(&a).unwrap()).unwrap(),
            a
        );
        assert!(
            serde_json::from_str::<AlphaSpec>(r#"{"type": "rational", "p": 3, "q": 0}"#).is_err()
        );
        assert!(serde_json::from_str::<AlphaSpec>(r#""nonsense""#).is_err());
    }
}
