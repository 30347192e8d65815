//! The Heisenberg group, its integer lattice and the quotient metrics.
//!
//! `(x, y, z)` stands for the matrix `[[1, y, z], [0, 1, x], [0, 0, 1]]`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::num::{circle_dist, frac};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HeisenbergElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisenbergElement {
    pub const IDENTITY: HeisenbergElement = HeisenbergElement {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        HeisenbergElement { x, y, z }
    }

    /// Matrix product `self * other`.
    #[inline]
    pub fn mul(self, o: HeisenbergElement) -> HeisenbergElement {
        HeisenbergElement {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z + self.y * o.x,
        }
    }

    #[inline]
    pub fn inv(self) -> HeisenbergElement {
        HeisenbergElement {
            x: -self.x,
            y: -self.y,
            z: -self.z + self.x * self.y,
        }
    }

    /// Mal'cev coordinates `(x, y, z - x y)`.
    #[inline]
    pub fn kappa(self) -> [f64; 3] {
        [self.x, self.y, self.z - self.x * self.y]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn is_integral(self) -> bool {
        self.x.fract() == 0.0 && self.y.fract() == 0.0 && self.z.fract() == 0.0
    }

    /// Largest coordinate difference in absolute value.
    pub fn max_abs_diff(self, o: HeisenbergElement) -> f64 {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }
}

impl fmt::Display for HeisenbergElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A coset `Gamma g` held by its representative in `[0, 1)^3`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NilmanifoldPoint {
    rep: HeisenbergElement,
}

impl NilmanifoldPoint {
    /// The coset of `g`.
    pub fn from_element(g: HeisenbergElement) -> Self {
        canonical_rep(g).0
    }

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self::from_element(HeisenbergElement::new(x, y, z))
    }

    pub fn rep(&self) -> HeisenbergElement {
        self.rep
    }
}

/// Reduces `g` to the fundamental domain: returns the representative and the
/// lattice element `gamma` with `rep = gamma * g`.
pub fn canonical_rep(g: HeisenbergElement) -> (NilmanifoldPoint, HeisenbergElement) {
    let mut a = -g.x.floor();
    let mut x = g.x + a;
    if x >= 1.0 {
        a -= 1.0;
        x = 0.0;
    }
    let mut b = -g.y.floor();
    let mut y = g.y + b;
    if y >= 1.0 {
        b -= 1.0;
        y = 0.0;
    }
    let w = g.z + b * g.x;
    let mut c = -w.floor();
    let mut z = w + c;
    if z >= 1.0 {
        c -= 1.0;
        z = 0.0;
    }
    let rep = HeisenbergElement { x, y, z };
    (NilmanifoldPoint { rep }, HeisenbergElement::new(a, b, c))
}

/// `min(|kappa(g1^-1 g2)|, |kappa(g2^-1 g1)|)` in the max norm: the one-hop
/// upper bound on the left-invariant metric.
#[inline]
pub fn dg_upper(g1: HeisenbergElement, g2: HeisenbergElement) -> f64 {
    let dx = g2.x - g1.x;
    let dy = g2.y - g1.y;
    let dz = g2.z - g1.z - g1.y * dx;
    // kappa(h) = (dx, dy, dz - dx dy) and kappa(h^-1) = (-dx, -dy, -dz)
    let vertical = dz.abs().min((dz - dx * dy).abs());
    dx.abs().max(dy.abs()).max(vertical)
}

/// Distance from `x` to the nearest integer.
#[inline]
fn int_dist(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Integer shifts `a` with `|a + d| <= 1/2` for `d` in `(-1, 1)`.
#[inline]
fn nearest_shifts(d: f64) -> ([f64; 2], usize) {
    let a = -d.round();
    let r = d + a;
    if (r.abs() - 0.5).abs() < 1e-12 {
        let other = if r > 0.0 { a - 1.0 } else { a + 1.0 };
        ([a, other], 2)
    } else {
        ([a, 0.0], 1)
    }
}

/// `inf over gamma of dg_upper(p1, gamma p2)`.
///
/// The horizontal shifts can be taken nearest to zero and the central shift
/// only enters through a distance to the nearest integer, so the infimum is
/// attained among at most four candidates.
pub fn quotient_dist(p1: &NilmanifoldPoint, p2: &NilmanifoldPoint) -> f64 {
    let (g1, g2) = (p1.rep, p2.rep);
    let (xa, na) = nearest_shifts(g2.x - g1.x);
    let (yb, nb) = nearest_shifts(g2.y - g1.y);
    let mut best = f64::INFINITY;
    for &a in &xa[..na] {
        let dx = a + g2.x - g1.x;
        for &b in &yb[..nb] {
            let dy = b + g2.y - g1.y;
            let d = g2.z + b * g2.x - g1.z - g1.y * dx;
            let vertical = int_dist(d).min(int_dist(d - dx * dy));
            best = best.min(dx.abs().max(dy.abs()).max(vertical));
        }
    }
    best
}

/// Window search for [`quotient_dist`]: `gamma = (a, b, c)` with
/// `|a|, |b| <= ab` and `|c| <= c_max`.
pub fn quotient_dist_window(
    p1: &NilmanifoldPoint,
    p2: &NilmanifoldPoint,
    ab: i64,
    c_max: i64,
) -> f64 {
    let mut best = f64::INFINITY;
    for a in -ab..=ab {
        for b in -ab..=ab {
            for c in -c_max..=c_max {
                let gamma = HeisenbergElement::new(a as f64, b as f64, c as f64);
                best = best.min(dg_upper(p1.rep, gamma.mul(p2.rep)));
            }
        }
    }
    best
}

/// A point `(t, Gamma g)` of the product phase space.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhasePoint {
    pub t: f64,
    pub coset: NilmanifoldPoint,
}

impl PhasePoint {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        PhasePoint {
            t: frac(t),
            coset: NilmanifoldPoint::new(x, y, z),
        }
    }

    pub fn from_parts(t: f64, g: HeisenbergElement) -> Self {
        PhasePoint {
            t: frac(t),
            coset: NilmanifoldPoint::from_element(g),
        }
    }

    pub fn rep(&self) -> HeisenbergElement {
        self.coset.rep
    }

    pub fn coords(&self) -> [f64; 4] {
        let g = self.coset.rep;
        [self.t, g.x, g.y, g.z]
    }
}

/// `max(||t1 - t2||, quotient distance of the cosets)`.
#[inline]
pub fn phase_dist(p1: &PhasePoint, p2: &PhasePoint) -> f64 {
    circle_dist(p1.t, p2.t).max(quotient_dist(&p1.coset, &p2.coset))
}

/// A point drawn from the product of Lebesgue measure on the circle and Haar
/// measure on the nilmanifold.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> PhasePoint {
    let t = rng.random::<f64>();
    let g = HeisenbergElement::new(rng.random(), rng.random(), rng.random());
    PhasePoint {
        t,
        coset: NilmanifoldPoint { rep: g },
    }
}

#[derive(Serialize, Deserialize)]
struct PhasePointJson {
    t: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Serialize for PhasePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let [t, x, y, z] = self.coords();
        PhasePointJson { t, x, y, z }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhasePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = PhasePointJson::deserialize(d)?;
        if ![p.t, p.x, p.y, p.z].iter().all(|v| v.is_finite()) {
            return Err(serde::de::Error::custom(
                "phase point coordinates must be finite",
            ));
        }
        Ok(PhasePoint::new(p.t, p.x, p.y, p.z))
    }
}
