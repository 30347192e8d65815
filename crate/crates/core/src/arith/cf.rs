//! Continued-fraction expansion of the rotation number and the
//! sharp/flat classification of its convergent denominators.

use std::collections::HashMap;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use super::alpha::{parse_decimal, AlphaSpec};
use super::ArithError;

/// Where an expansion should stop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfStop {
    /// At most this many partial quotients.
    MaxTerms(usize),
    /// Stop after the first denominator exceeding this bound, so that every
    /// `|m| <= bound` falls inside a known interval `[q_i, q_{i+1})`.
    MaxQ(u128),
}

/// Why an expansion ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The represented number is rational and its expansion is complete.
    Exact,
    MaxTerms,
    MaxQ,
    /// A prefix of partial quotients ran out.
    ListEnd,
    /// Further terms of a decimal reading would not be trustworthy.
    PrecisionExhausted,
    /// The next convergent would not fit in 128 bits.
    Overflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub l: u128,
    pub q: u128,
}

/// Eventual period of a quadratic irrational's expansion: `a_{start + j}`
/// repeats with period `len` (indices are 1-based like the quotients).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub start: usize,
    pub len: usize,
}

/// `[0; a_1, ..., a_I]` with convergents `l_i / q_i`, `i = 1..=I`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ContinuedFraction {
    #[serde(rename = "a")]
    partial_quotients: Vec<u128>,
    #[serde(deserialize_with = "de_convergents")]
    convergents: Vec<Convergent>,
    #[serde(default = "default_termination")]
    termination: Termination,
    #[serde(default)]
    period: Option<Period>,
}

fn default_termination() -> Termination {
    Termination::ListEnd
}

fn de_convergents<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Convergent>, D::Error> {
    let pairs: Vec<(u128, u128)> = Vec::deserialize(d)?;
    Ok(pairs
        .into_iter()
        .map(|(l, q)| Convergent { l, q })
        .collect())
}

impl Serialize for ContinuedFraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(u128, u128)> = self.convergents.iter().map(|c| (c.l, c.q)).collect();
        let mut st = s.serialize_struct("ContinuedFraction", 4)?;
        st.serialize_field("a", &self.partial_quotients)?;
        st.serialize_field("convergents", &pairs)?;
        st.serialize_field("termination", &self.termination)?;
        st.serialize_field("period", &self.period)?;
        st.end()
    }
}

impl ContinuedFraction {
    /// Builds the convergents of a finite list of partial quotients.
    pub fn from_partial_quotients(a: &[u128], termination: Termination) -> Self {
        let mut b = Builder::new();
        for &ai in a {
            if !b.push(ai) {
                return b.finish(Termination::Overflow, None);
            }
        }
        b.finish(termination, None)
    }

    pub fn partial_quotients(&self) -> &[u128] {
        &self.partial_quotients
    }

    pub fn convergents(&self) -> &[Convergent] {
        &self.convergents
    }

    pub fn denominators(&self) -> impl Iterator<Item = u128> + '_ {
        self.convergents.iter().map(|c| c.q)
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn period(&self) -> Option<Period> {
        self.period
    }

    /// True when the expansion of the represented number is complete.
    pub fn is_exact(&self) -> bool {
        self.termination == Termination::Exact
    }

    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }

    /// The `i`-th convergent, 1-based.
    pub fn convergent(&self, i: usize) -> Option<Convergent> {
        i.checked_sub(1)
            .and_then(|k| self.convergents.get(k).copied())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("continued fraction serializes")
    }
}

struct Builder {
    a: Vec<u128>,
    conv: Vec<Convergent>,
    // (l_{i-1}, q_{i-1}), (l_i, q_i), seeded with l_{-1}/q_{-1} = 1/0, l_0/q_0 = 0/1
    prev: (u128, u128),
    cur: (u128, u128),
}

impl Builder {
    fn new() -> Self {
        Builder {
            a: Vec::new(),
            conv: Vec::new(),
            prev: (1, 0),
            cur: (0, 1),
        }
    }

    fn next_q(&self, ai: u128) -> Option<u128> {
        ai.checked_mul(self.cur.1)?.checked_add(self.prev.1)
    }

    fn push(&mut self, ai: u128) -> bool {
        let l = ai
            .checked_mul(self.cur.0)
            .and_then(|v| v.checked_add(self.prev.0));
        let q = self.next_q(ai);
        match (l, q) {
            (Some(l), Some(q)) => {
                self.a.push(ai);
                self.prev = self.cur;
                self.cur = (l, q);
                self.conv.push(Convergent { l, q });
                true
            }
            _ => false,
        }
    }

    fn last_q(&self) -> u128 {
        self.cur.1
    }

    fn finish(self, termination: Termination, period: Option<Period>) -> ContinuedFraction {
        ContinuedFraction {
            partial_quotients: self.a,
            convergents: self.conv,
            termination,
            period,
        }
    }
}

enum Step {
    Continue,
    Stop(Termination),
}

fn check_stop(b: &Builder, stop: CfStop) -> Step {
    match stop {
        CfStop::MaxTerms(n) if b.a.len() >= n => Step::Stop(Termination::MaxTerms),
        CfStop::MaxQ(m) if b.last_q() > m => Step::Stop(Termination::MaxQ),
        _ => Step::Continue,
    }
}

/// Expands `alpha` until `stop` (or until the expansion ends).
pub fn cf_expand(alpha: &AlphaSpec, stop: CfStop) -> Result<ContinuedFraction, ArithError> {
    alpha.validate()?;
    match alpha {
        AlphaSpec::Rational { p, q } => Ok(expand_rational(*p as u128, *q as u128, stop, None)),
        AlphaSpec::Decimal { value, precision } => {
            let (num, den) = parse_decimal(value)?;
            Ok(expand_rational(num, den, stop, Some(*precision)))
        }
        AlphaSpec::PartialQuotients { a } => {
            let mut b = Builder::new();
            for &ai in a {
                if let Step::Stop(t) = check_stop(&b, stop) {
                    return Ok(b.finish(t, None));
                }
                if !b.push(ai as u128) {
                    return Ok(b.finish(Termination::Overflow, None));
                }
            }
            let t = match check_stop(&b, stop) {
                Step::Stop(t) => t,
                Step::Continue => Termination::ListEnd,
            };
            Ok(b.finish(t, None))
        }
        AlphaSpec::Quadratic { d, p, q } => Ok(expand_quadratic(*d, *p, *q, stop)),
    }
}

fn expand_rational(
    mut num: u128,
    mut den: u128,
    stop: CfStop,
    precision: Option<f64>,
) -> ContinuedFraction {
    // alpha = num / den in [0, 1); a_0 = 0 is skipped
    let mut b = Builder::new();
    let trust = precision.map(|p| 1.0 / p);
    loop {
        if num == 0 {
            return b.finish(Termination::Exact, None);
        }
        if let Step::Stop(t) = check_stop(&b, stop) {
            return b.finish(t, None);
        }
        let ai = den / num;
        if let (Some(limit), Some(q)) = (trust, b.next_q(ai)) {
            if (q as f64) * (q as f64) > limit {
                return b.finish(Termination::PrecisionExhausted, None);
            }
        }
        if !b.push(ai) {
            return b.finish(Termination::Overflow, None);
        }
        (num, den) = (den - ai * num, num);
    }
}

/// Exact expansion of `(sqrt(d) + p) / q` on integer representatives
/// `(P + sqrt(D)) / Q` with `Q | D - P^2`.
fn expand_quadratic(d: u64, p: i64, q: i64, stop: CfStop) -> ContinuedFraction {
    let (mut big_p, mut big_q, big_d) = {
        let (d, p, q) = (d as i128, p as i128, q as i128);
        if (d - p * p) % q == 0 {
            (p, q, d)
        } else {
            (p * q.abs(), q * q.abs(), d * q * q)
        }
    };
    let s = (big_d as u128).isqrt() as i128;
    let floor_quot = |pp: i128, qq: i128| -> i128 {
        if qq > 0 {
            (pp + s).div_euclid(qq)
        } else {
            -((pp + s).div_euclid(-qq) + 1)
        }
    };

    let mut b = Builder::new();
    let mut seen: HashMap<(i128, i128), usize> = HashMap::new();
    let mut period = None;
    // x_0 = alpha has a_0 = 0; advance to x_1
    let a0 = floor_quot(big_p, big_q);
    let np = a0 * big_q - big_p;
    big_q = (big_d - np * np) / big_q;
    big_p = np;
    loop {
        if period.is_none() {
            let idx = b.a.len() + 1;
            if let Some(&start) = seen.get(&(big_p, big_q)) {
                period = Some(Period {
                    start,
                    len: idx - start,
                });
            } else {
                seen.insert((big_p, big_q), idx);
            }
        }
        if let Step::Stop(t) = check_stop(&b, stop) {
            return b.finish(t, period);
        }
        let ai = floor_quot(big_p, big_q);
        if !b.push(ai as u128) {
            return b.finish(Termination::Overflow, period);
        }
        let np = ai * big_q - big_p;
        big_q = (big_d - np * np) / big_q;
        big_p = np;
    }
}

/// Sharp/flat split of the convergent denominators for an exponent `B > 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenominatorClassification {
    pub b: f64,
    /// `q_i` with `q_{i+1} > q_i^B > 1`.
    pub sharp: Vec<u128>,
    /// Remaining classified `q_i`, together with `1`.
    pub flat: Vec<u128>,
    /// Denominators whose comparison fell inside the rounding interval of a
    /// non-integral `B`; they are counted as flat.
    pub ties: Vec<u128>,
    /// Last denominator of a truncated expansion; its successor is unknown.
    pub unresolved: Option<u128>,
    #[serde(skip)]
    denominators: Vec<u128>,
    #[serde(skip)]
    sharp_flags: Vec<bool>,
    #[serde(skip)]
    complete: bool,
}

enum Compare {
    Greater,
    NotGreater,
    Tie,
}

/// Decides `next > q^b`.
fn exceeds_power(next: u128, q: u128, b: f64) -> Compare {
    if b.fract() == 0.0 && b <= 128.0 {
        return match q.checked_pow(b as u32) {
            Some(pow) if next > pow => Compare::Greater,
            _ => Compare::NotGreater,
        };
    }
    const SLACK: f64 = 1e-12;
    let rhs = b * (q as f64).ln();
    let lhs = (next as f64).ln();
    if lhs > rhs * (1.0 + SLACK) {
        Compare::Greater
    } else if lhs < rhs * (1.0 - SLACK) {
        Compare::NotGreater
    } else {
        Compare::Tie
    }
}

/// Splits the denominators of `cf` into the sharp and flat classes.
pub fn classify_denominators(
    cf: &ContinuedFraction,
    b: f64,
) -> Result<DenominatorClassification, ArithError> {
    if !(b > 2.0) || !b.is_finite() {
        return Err(ArithError::InvalidExponent(b));
    }
    if cf.convergents.len() < 2 && !cf.is_exact() {
        return Err(ArithError::InsufficientTerms {
            have: cf.convergents.len(),
            need: 2,
        });
    }
    let qs: Vec<u128> = cf.denominators().collect();
    let mut sharp = Vec::new();
    let mut flat = vec![1u128];
    let mut ties = Vec::new();
    let mut flags = vec![false; qs.len()];
    let mut unresolved = None;
    for (i, &q) in qs.iter().enumerate() {
        match qs.get(i + 1) {
            Some(&next) => {
                let is_sharp = q > 1
                    && match exceeds_power(next, q, b) {
                        Compare::Greater => true,
                        Compare::NotGreater => false,
                        Compare::Tie => {
                            ties.push(q);
                            false
                        }
                    };
                if is_sharp {
                    sharp.push(q);
                    flags[i] = true;
                } else if !flat.contains(&q) {
                    flat.push(q);
                }
            }
            None if cf.is_exact() => {
                if !flat.contains(&q) {
                    flat.push(q);
                }
            }
            None => unresolved = Some(q),
        }
    }
    Ok(DenominatorClassification {
        b,
        sharp,
        flat,
        ties,
        unresolved,
        denominators: qs,
        sharp_flags: flags,
        complete: cf.is_exact(),
    })
}

impl DenominatorClassification {
    /// True when no sharp denominator was found among the computed ones.
    pub fn sharp_is_empty(&self) -> bool {
        self.sharp.is_empty()
    }

    pub fn is_sharp(&self, q: u128) -> bool {
        self.sharp.contains(&q)
    }

    /// The denominator following `q` in the expansion, if known.
    pub fn successor(&self, q: u128) -> Option<u128> {
        let i = self.denominators.iter().position(|&x| x == q)?;
        self.denominators.get(i + 1).copied()
    }

    /// Membership of `m` in the resonant set `M_1(B)`.
    pub fn in_m1(&self, m: i128) -> Result<bool, ArithError> {
        if m == 0 {
            return Ok(true);
        }
        let a = m.unsigned_abs();
        let qs = &self.denominators;
        let Some(&last) = qs.last() else {
            // alpha = 0: no denominators at all
            return Ok(false);
        };
        if a >= last {
            return if self.complete {
                Ok(false)
            } else {
                Err(ArithError::UndeterminedMembership { m, largest_q: last })
            };
        }
        // index of the last q_i <= a
        let k = qs.partition_point(|&q| q <= a);
        if k == 0 {
            return Ok(false);
        }
        let i = k - 1;
        Ok(self.sharp_flags[i] && a % qs[i] == 0)
    }
}

/// Convenience form of [`DenominatorClassification::in_m1`].
pub fn in_m1(m: i128, cf: &ContinuedFraction, b: f64) -> Result<bool, ArithError> {
    classify_denominators(cf, b)?.in_m1(m)
}
