use serde::Serialize;

use super::{FlowError, SkewKind, SkewProduct, SkewProductSpec};
use crate::arith::{
    cf_expand, classify_denominators, AlphaSpec, CfStop, DenominatorClassification, Rotation,
};
use crate::heisenberg::{phase_dist, HeisenbergElement, PhasePoint};
use crate::num;
use crate::periodic::{
    coboundary_residual, solve_coboundary_rot, split_with, PeriodicFunction, ResonantSplit,
};

/// The fiber shear `(t, Gamma g) -> (t, Gamma g M(t))` with
/// `M(t) = (g_phi, k g_phi, k g_phi^2 / 2 - k g_eta / 2 + g_psi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conjugator {
    pub k: f64,
    pub g_phi: PeriodicFunction,
    pub g_eta: PeriodicFunction,
    pub g_psi: PeriodicFunction,
}

impl Conjugator {
    pub fn new(
        k: f64,
        g_phi: PeriodicFunction,
        g_eta: PeriodicFunction,
        g_psi: PeriodicFunction,
    ) -> Self {
        Conjugator {
            k,
            g_phi,
            g_eta,
            g_psi,
        }
    }

    pub fn identity() -> Self {
        let z = PeriodicFunction::zero();
        Conjugator::new(0.0, z.clone(), z.clone(), z)
    }

    pub fn matrix(&self, t: f64) -> HeisenbergElement {
        let g = self.g_phi.eval_real(t);
        let k = self.k;
        HeisenbergElement::new(
            g,
            k * g,
            0.5 * k * g * g - 0.5 * k * self.g_eta.eval_real(t) + self.g_psi.eval_real(t),
        )
    }

    pub fn apply(&self, p: &PhasePoint) -> PhasePoint {
        PhasePoint::from_parts(p.t, p.rep().mul(self.matrix(p.t)))
    }

    pub fn apply_inverse(&self, p: &PhasePoint) -> PhasePoint {
        PhasePoint::from_parts(p.t, p.rep().mul(self.matrix(p.t).inv()))
    }
}

/// `max over samples of d(T1 P, R^-1 T R P)`.
pub fn conjugation_residual(
    t: &SkewProduct,
    r: &Conjugator,
    t1: &SkewProduct,
    samples: &[PhasePoint],
) -> f64 {
    samples
        .iter()
        .map(|p| phase_dist(&t1.step(p), &r.apply_inverse(&t.step(&r.apply(p)))))
        .fold(0.0, f64::max)
}

/// The split of `phi`, `eta = phi^2` and `psi` for a skew product of type `T`,
/// with the coboundary solutions of the non-resonant parts.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugacySetup {
    pub alpha: AlphaSpec,
    pub k: f64,
    pub b: f64,
    pub phi: PeriodicFunction,
    pub eta: PeriodicFunction,
    pub psi: PeriodicFunction,
    pub phi_split: ResonantSplit,
    pub eta_split: ResonantSplit,
    pub psi_split: ResonantSplit,
    pub g_phi: PeriodicFunction,
    pub g_eta: PeriodicFunction,
    pub g_psi: PeriodicFunction,
    pub classification: DenominatorClassification,
    #[serde(skip)]
    rot: Rotation,
}

impl ConjugacySetup {
    pub fn new(
        alpha: AlphaSpec,
        k: f64,
        phi: PeriodicFunction,
        psi: PeriodicFunction,
        b: f64,
    ) -> Result<Self, FlowError> {
        let rot = alpha.rotation()?;
        let eta = phi.product(&phi)?;
        let top = eta.max_mode().max(psi.max_mode()).max(2) as u128;
        let cf = cf_expand(&alpha, CfStop::MaxQ(top))?;
        let classification = classify_denominators(&cf, b)?;
        let phi_split = split_with(&phi, &classification)?;
        let eta_split = split_with(&eta, &classification)?;
        let psi_split = split_with(&psi, &classification)?;
        let g_phi = solve_coboundary_rot(&phi_split.part2, &rot)?;
        let g_eta = solve_coboundary_rot(&eta_split.part2, &rot)?;
        let g_psi = solve_coboundary_rot(&psi_split.part2, &rot)?;
        Ok(ConjugacySetup {
            alpha,
            k,
            b,
            phi,
            eta,
            psi,
            phi_split,
            eta_split,
            psi_split,
            g_phi,
            g_eta,
            g_psi,
            classification,
            rot,
        })
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rot
    }

    /// No sharp denominator among the computed ones: the resonant parts are
    /// the means and the conjugated map is a central translation.
    pub fn is_finite_branch(&self) -> bool {
        self.classification.sharp_is_empty()
    }

    pub fn t_spec(&self) -> SkewProductSpec {
        SkewProductSpec {
            alpha: self.alpha.clone(),
            kind: SkewKind::T {
                k: self.k,
                phi: self.phi.clone(),
                psi: self.psi.clone(),
                theorem2: false,
            },
        }
    }

    pub fn t1_spec(&self) -> SkewProductSpec {
        SkewProductSpec {
            alpha: self.alpha.clone(),
            kind: SkewKind::T1 {
                k: self.k,
                phi1: self.phi_split.part1.clone(),
                eta1: self.eta_split.part1.clone(),
                psi1: self.psi_split.part1.clone(),
            },
        }
    }

    /// The central translation `c = -k eta(0) / 2 + psi(0)`.
    pub fn t1_tilde_spec(&self) -> SkewProductSpec {
        SkewProductSpec {
            alpha: self.alpha.clone(),
            kind: SkewKind::T1Tilde {
                c: -0.5 * self.k * self.eta.mean() + self.psi.mean(),
            },
        }
    }

    pub fn conjugator(&self) -> Conjugator {
        Conjugator::new(
            self.k,
            self.g_phi.clone(),
            self.g_eta.clone(),
            self.g_psi.clone(),
        )
    }

    /// Residuals of the three coboundary equations on a grid.
    pub fn coboundary_residuals(&self, grid: usize) -> [f64; 3] {
        [
            coboundary_residual(&self.g_phi, &self.phi_split.part2, &self.rot, grid),
            coboundary_residual(&self.g_eta, &self.eta_split.part2, &self.rot, grid),
            coboundary_residual(&self.g_psi, &self.psi_split.part2, &self.rot, grid),
        ]
    }

    /// The central entry of `M_R(t) M_T(t) M_R(t + alpha)^-1` written out term
    /// by term, against its reduced form `k phi1^2 / 2 - k eta1 / 2 + psi1`.
    pub fn omega_residual(&self, grid: usize) -> f64 {
        let k = self.k;
        let step = self.rot.frac_mul(1);
        (0..grid)
            .map(|i| {
                let t = i as f64 / grid as f64;
                let s = num::frac(t + step);
                let (gp, gp_s) = (self.g_phi.eval_real(t), self.g_phi.eval_real(s));
                let (ge, ge_s) = (self.g_eta.eval_real(t), self.g_eta.eval_real(s));
                let (gs, gs_s) = (self.g_psi.eval_real(t), self.g_psi.eval_real(s));
                let phi = self.phi.eval_real(t);
                let psi = self.psi.eval_real(t);
                let long = 0.5 * k * gp_s * gp_s + 0.5 * k * gp * gp - k * gp * gp_s
                    + 0.5 * k * ge_s
                    - gs_s
                    - k * phi * gp_s
                    + psi
                    + k * phi * gp
                    - 0.5 * k * ge
                    + gs;
                let p1 = self.phi_split.part1.eval_real(t);
                let short = 0.5 * k * p1 * p1 - 0.5 * k * self.eta_split.part1.eval_real(t)
                    + self.psi_split.part1.eval_real(t);
                (long - short).abs()
            })
            .fold(0.0, f64::max)
    }
}
