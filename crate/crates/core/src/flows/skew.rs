use serde::{Deserialize, Serialize};

use super::FlowError;
use crate::arith::{AlphaSpec, Rotation};
use crate::heisenberg::{HeisenbergElement, PhasePoint};
use crate::periodic::PeriodicFunction;

/// Mean-zero tolerance for the hypothesis flag on `T`.
const MEAN_TOL: f64 = 1e-14;

/// The fiber datum of a skew product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SkewKind {
    /// Fiber matrix with `x = phi1`, `y = phi2`, `z = psi`.
    S {
        phi1: PeriodicFunction,
        phi2: PeriodicFunction,
        psi: PeriodicFunction,
    },
    /// Fiber matrix with `x = phi`, `y = k phi`, `z = psi`.
    T {
        k: f64,
        phi: PeriodicFunction,
        psi: PeriodicFunction,
        #[serde(default)]
        theorem2: bool,
    },
    /// Fiber matrix with `x = phi1`, `y = k phi1`,
    /// `z = k phi1^2 / 2 - k eta1 / 2 + psi1`.
    T1 {
        k: f64,
        phi1: PeriodicFunction,
        eta1: PeriodicFunction,
        psi1: PeriodicFunction,
    },
    /// The central translation by `c`.
    #[serde(rename = "T1tilde")]
    T1Tilde { c: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewProductSpec {
    pub alpha: AlphaSpec,
    #[serde(flatten)]
    pub kind: SkewKind,
}

/// A validated skew product `(t, Gamma g) -> (t + alpha, Gamma g M(t))`.
#[derive(Clone, Debug)]
pub struct SkewProduct {
    spec: SkewProductSpec,
    rot: Rotation,
}

impl SkewProduct {
    pub fn new(spec: SkewProductSpec) -> Result<Self, FlowError> {
        let rot = spec.alpha.rotation()?;
        if let SkewKind::T {
            phi,
            theorem2: true,
            ..
        } = &spec.kind
        {
            if phi.mean().abs() > MEAN_TOL {
                return Err(FlowError::NonZeroMean(phi.mean()));
            }
        }
        Ok(SkewProduct { spec, rot })
    }

    pub fn spec(&self) -> &SkewProductSpec {
        &self.spec
    }

    pub fn kind(&self) -> &SkewKind {
        &self.spec.kind
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rot
    }

    /// The fiber matrix `M(t)`.
    #[inline]
    pub fn fiber(&self, t: f64) -> HeisenbergElement {
        match &self.spec.kind {
            SkewKind::S { phi1, phi2, psi } => {
                HeisenbergElement::new(phi1.eval_real(t), phi2.eval_real(t), psi.eval_real(t))
            }
            SkewKind::T { k, phi, psi, .. } => {
                let p = phi.eval_real(t);
                HeisenbergElement::new(p, k * p, psi.eval_real(t))
            }
            SkewKind::T1 {
                k,
                phi1,
                eta1,
                psi1,
            } => {
                let p = phi1.eval_real(t);
                let z = 0.5 * k * p * p - 0.5 * k * eta1.eval_real(t) + psi1.eval_real(t);
                HeisenbergElement::new(p, k * p, z)
            }
            SkewKind::T1Tilde { c } => HeisenbergElement::new(0.0, 0.0, *c),
        }
    }

    pub fn step(&self, p: &PhasePoint) -> PhasePoint {
        let t = self.rot.phase(p.t, 1);
        PhasePoint::from_parts(t, p.rep().mul(self.fiber(p.t)))
    }

    /// Successive iterates with phases `t0 + j alpha` reduced exactly.
    pub fn iter_from(&self, p0: PhasePoint) -> OrbitIter<'_> {
        OrbitIter {
            map: self,
            t0: p0.t,
            j: 0,
            current: p0,
        }
    }

    /// `P0, T^s P0, T^2s P0, ...` up to `T^n P0`.
    pub fn orbit(&self, p0: PhasePoint, n: u64, stride: u64) -> Vec<PhasePoint> {
        let stride = stride.max(1);
        self.iter_from(p0)
            .take(n as usize + 1)
            .step_by(stride as usize)
            .collect()
    }
}

/// Iterator over an orbit; the first item is the starting point.
pub struct OrbitIter<'a> {
    map: &'a SkewProduct,
    t0: f64,
    j: u64,
    current: PhasePoint,
}

impl Iterator for OrbitIter<'_> {
    type Item = PhasePoint;

    #[inline]
    fn next(&mut self) -> Option<PhasePoint> {
        let out = self.current;
        let g = out.rep().mul(self.map.fiber(out.t));
        self.j += 1;
        self.current = PhasePoint::from_parts(self.map.rot.phase(self.t0, self.j), g);
        Some(out)
    }
}
