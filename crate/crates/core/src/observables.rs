//! Observables on the phase space: the theta-type families on the
//! nilmanifold, their class-A phase twists, class-B products and the typical
//! observable used in the correlation experiments.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heisenberg::{HeisenbergElement, PhasePoint};
use crate::num::{self, frac_mul};
use crate::periodic::PeriodicFunction;

pub const DEFAULT_TRUNC: i64 = 12;

/// `sum_b exp(-pi b^2)`, the supremum over `w` of `sum_b exp(-pi (w + b)^2)`;
/// it bounds every theta-type value below.
pub const THETA_SUP: f64 = 1.086_434_811_213_308;

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error("need 0 <= j < m, got m = {m}, j = {j}")]
    BadIndex { m: i64, j: i64 },
    #[error("unknown observable preset `{0}` (expected typical, psi_10 or classB_cos_cos)")]
    UnknownPreset(String),
}

/// Reported bound on the Gaussian tail dropped by truncating at `|b| <= trunc`.
pub fn tail_bound(trunc: i64) -> f64 {
    2.0 * (-PI * ((trunc - 2) as f64).powi(2)).exp()
}

/// `sum_{|b| <= trunc} exp(-pi (w + b)^2) e(b s + c (w + b))` re-centred at the
/// integer nearest to `w`; `c` is `0` or `1/2`.
fn gaussian_series(w: f64, m: i64, x: f64, half_phase: bool, trunc: i64) -> Complex64 {
    let r = w.round();
    let w0 = w - r;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in -trunc..=trunc {
        let b = l - r as i64;
        let g = (-PI * (w0 + l as f64).powi(2)).exp();
        let mut ph = frac_mul(m * b, x);
        if half_phase {
            // e((w + b) / 2) with w + b = w0 + l
            ph += 0.5 * (w0 + l as f64);
        }
        acc += g * num::e(ph);
    }
    acc
}

fn check_index(m: i64, j: i64) -> Result<(), ObservableError> {
    if m < 1 || j < 0 || j >= m {
        return Err(ObservableError::BadIndex { m, j });
    }
    Ok(())
}

/// `psi_mj(g) = e(m z + j x) sum_b exp(-pi (y + b + j/m)^2) e(m b x)`.
pub fn eval_psi(
    m: i64,
    j: i64,
    g: HeisenbergElement,
    trunc: i64,
) -> Result<Complex64, ObservableError> {
    check_index(m, j)?;
    let front = num::e(frac_mul(m, g.z) + frac_mul(j, g.x));
    Ok(front * gaussian_series(g.y + j as f64 / m as f64, m, g.x, false, trunc))
}

/// `psi*_mj(g) = i e(m z + j x) sum_b exp(-pi (y + b + j/m + 1/2)^2)
/// e((y + b + j/m) / 2 + m b x)`.
pub fn eval_psi_star(
    m: i64,
    j: i64,
    g: HeisenbergElement,
    trunc: i64,
) -> Result<Complex64, ObservableError> {
    check_index(m, j)?;
    let w = g.y + j as f64 / m as f64 + 0.5;
    let front = num::e(frac_mul(m, g.z) + frac_mul(j, g.x) - 0.25);
    Ok(Complex64::i() * front * gaussian_series(w, m, g.x, true, trunc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiFamily {
    Psi,
    PsiBar,
    PsiStar,
    PsiStarBar,
}

/// `f2(x, y) = sum c_ab e(a x + b y)` on the two-torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusFunction {
    /// Entries `[a, b, re, im]`.
    pub coeffs: Vec<(i64, i64, f64, f64)>,
}

impl TorusFunction {
    pub fn constant(c: f64) -> Self {
        TorusFunction {
            coeffs: vec![(0, 0, c, 0.0)],
        }
    }

    /// `cos(2 pi x) cos(2 pi y)`.
    pub fn cos_cos() -> Self {
        let coeffs = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            .map(|(a, b)| (a, b, 0.25, 0.0))
            .to_vec();
        TorusFunction { coeffs }
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|&(a, b, re, im)| Complex64::new(re, im) * num::e(frac_mul(a, x) + frac_mul(b, y)))
            .sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|&(_, _, re, im)| re.hypot(im)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", try_from = "Repr")]
pub enum ObservableSpec {
    /// `e(xi1 t + xi2 x + xi3 y)` times a theta-type function.
    ClassA {
        xi1: i64,
        xi2: i64,
        xi3: i64,
        m: i64,
        j: i64,
        family: PsiFamily,
    },
    /// `f1(t) f2(x, y)`, independent of `z`.
    ClassB {
        f1: PeriodicFunction,
        f2: TorusFunction,
    },
    /// `e(t + x + y + z) sum_l exp(-pi (y + l)^2) e(l x)`.
    Typical,
}

impl ObservableSpec {
    pub fn preset(name: &str) -> Result<Self, ObservableError> {
        match name {
            "typical" => Ok(ObservableSpec::Typical),
            "psi_10" => Ok(ObservableSpec::ClassA {
                xi1: 0,
                xi2: 0,
                xi3: 0,
                m: 1,
                j: 0,
                family: PsiFamily::Psi,
            }),
            "classB_cos_cos" => Ok(ObservableSpec::ClassB {
                f1: PeriodicFunction::cos(),
                f2: TorusFunction::cos_cos(),
            }),
            _ => Err(ObservableError::UnknownPreset(name.to_string())),
        }
    }

    pub fn validate(&self) -> Result<(), ObservableError> {
        if let ObservableSpec::ClassA { m, j, .. } = self {
            check_index(*m, *j)?;
        }
        Ok(())
    }

    /// Bound on the truncation error of [`eval_observable`] at `trunc`.
    pub fn truncation_error(&self, trunc: i64) -> f64 {
        match self {
            ObservableSpec::ClassB { .. } => 0.0,
            _ => tail_bound(trunc),
        }
    }

    /// An upper bound on `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            ObservableSpec::ClassB { f1, f2 } => f1.l1_norm() * f2.l1_norm(),
            _ => THETA_SUP,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Preset(String),
    Spec(ObservableSpecDef),
}

#[derive(Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
enum ObservableSpecDef {
    ClassA {
        xi1: i64,
        xi2: i64,
        xi3: i64,
        m: i64,
        j: i64,
        family: PsiFamily,
    },
    ClassB {
        f1: PeriodicFunction,
        f2: TorusFunction,
    },
    Typical,
}

impl TryFrom<Repr> for ObservableSpec {
    type Error = ObservableError;

    fn try_from(r: Repr) -> Result<Self, ObservableError> {
        let spec = match r {
            Repr::Preset(name) => ObservableSpec::preset(&name)?,
            Repr::Spec(ObservableSpecDef::ClassA {
                xi1,
                xi2,
                xi3,
                m,
                j,
                family,
            }) => ObservableSpec::ClassA {
                xi1,
                xi2,
                xi3,
                m,
                j,
                family,
            },
            Repr::Spec(ObservableSpecDef::ClassB { f1, f2 }) => ObservableSpec::ClassB { f1, f2 },
            Repr::Spec(ObservableSpecDef::Typical) => ObservableSpec::Typical,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `f(P)`.
pub fn eval_observable(
    spec: &ObservableSpec,
    p: &PhasePoint,
    trunc: i64,
) -> Result<Complex64, ObservableError> {
    let g = p.rep();
    match spec {
        ObservableSpec::ClassA {
            xi1,
            xi2,
            xi3,
            m,
            j,
            family,
        } => {
            let twist = num::e(frac_mul(*xi1, p.t) + frac_mul(*xi2, g.x) + frac_mul(*xi3, g.y));
            let base = match family {
                PsiFamily::Psi => eval_psi(*m, *j, g, trunc)?,
                PsiFamily::PsiBar => eval_psi(*m, *j, g, trunc)?.conj(),
                PsiFamily::PsiStar => eval_psi_star(*m, *j, g, trunc)?,
                PsiFamily::PsiStarBar => eval_psi_star(*m, *j, g, trunc)?.conj(),
            };
            Ok(twist * base)
        }
        ObservableSpec::ClassB { f1, f2 } => Ok(f1.eval(p.t) * f2.eval(g.x, g.y)),
        ObservableSpec::Typical => Ok(num::e(p.t + g.x + g.y) * eval_psi(1, 0, g, trunc)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{haar_sample, NilmanifoldPoint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type H = HeisenbergElement;

    const GENERATORS: [H; 3] = [
        H::new(1.0, 0.0, 0.0),
        H::new(0.0, 1.0, 0.0),
        H::new(0.0, 0.0, 1.0),
    ];

    #[test]
    fn theta_constant() {
        let direct: f64 = (-10i32..=10).map(|b| (-PI * (b * b) as f64).exp()).sum();
        assert!((direct - THETA_SUP).abs() < 1e-15);
        let v = eval_psi(1, 0, H::IDENTITY, 12).unwrap();
        assert!((v.re - 1.0864348).abs() < 1e-6);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn index_checks() {
        assert!(eval_psi(2, 2, H::IDENTITY, 12).is_err());
        assert!(eval_psi_star(0, 0, H::IDENTITY, 12).is_err());
    }

    #[test]
    fn central_shift_multiplies_by_character() {
        let g = H::new(0.3, 0.6, 0.1);
        let delta = 0.17;
        let moved = H::new(g.x, g.y, g.z + delta);
        for (m, j) in [(1, 0), (3, 2)] {
            let f = num::e(m as f64 * delta);
            assert!(
                (eval_psi(m, j, moved, 12).unwrap() - f * eval_psi(m, j, g, 12).unwrap()).norm()
                    < 1e-12
            );
            assert!(
                (eval_psi_star(m, j, moved, 12).unwrap() - f * eval_psi_star(m, j, g, 12).unwrap())
                    .norm()
                    < 1e-12
            );
        }
    }

    #[test]
    fn lattice_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let g = haar_sample(&mut rng).rep();
            for (m, j) in [(1, 0), (2, 1), (3, 2)] {
                for gamma in GENERATORS {
                    let h = gamma.mul(g);
                    assert!(
                        (eval_psi(m, j, h, 12).unwrap() - eval_psi(m, j, g, 12).unwrap()).norm()
                            < 1e-10
                    );
                    assert!(
                        (eval_psi_star(m, j, h, 12).unwrap() - eval_psi_star(m, j, g, 12).unwrap())
                            .norm()
                            < 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn star_family_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let g = haar_sample(&mut rng).rep();
            assert!(eval_psi_star(2, 1, g, 12).unwrap().norm() <= THETA_SUP + 1e-12);
        }
    }

    #[test]
    fn truncation_changes_less_than_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let g = haar_sample(&mut rng).rep();
            let d = (eval_psi(2, 1, g, 20).unwrap() - eval_psi(2, 1, g, 12).unwrap()).norm();
            assert!(d <= tail_bound(12));
        }
    }

    #[test]
    fn observable_examples() {
        let b = ObservableSpec::ClassB {
            f1: PeriodicFunction::constant(1.0),
            f2: TorusFunction::constant(1.0),
        };
        let p = PhasePoint::new(0.3, 0.4, 0.5, 0.6);
        assert!((eval_observable(&b, &p, 12).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let v = eval_observable(&ObservableSpec::Typical, &PhasePoint::default(), 12).unwrap();
        assert!((v.re - 1.0864348).abs() < 1e-6);
        let typical = crate::flows::typical_value(0.3, 0.4, 0.5, 0.6, 12);
        assert!(
            (eval_observable(&ObservableSpec::Typical, &p, 12).unwrap() - typical).norm() < 1e-12
        );
    }

    #[test]
    fn class_a_is_well_defined_on_cosets() {
        let spec = ObservableSpec::ClassA {
            xi1: 2,
            xi2: -1,
            xi3: 3,
            m: 2,
            j: 1,
            family: PsiFamily::PsiStarBar,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let p = haar_sample(&mut rng);
            let gamma = H::new(2.0, -1.0, 3.0);
            let q = PhasePoint {
                t: p.t,
                coset: NilmanifoldPoint::from_element(gamma.mul(p.rep())),
            };
            let d = (eval_observable(&spec, &p, 12).unwrap()
                - eval_observable(&spec, &q, 12).unwrap())
            .norm();
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn json_forms() {
        #[derive(Deserialize)]
        struct W {
            obs: ObservableSpec,
        }
        let w: W = serde_json::from_str(r#"{"obs": "psi_10"}"#).unwrap();
        assert!(matches!(w.obs, ObservableSpec::ClassA { m: 1, j: 0, .. }));
        let w: W = serde_json::from_str(r#"{"obs": {"variant": "class_a", "xi1": 1, "xi2": 0, "xi3": 0, "m": 3, "j": 2, "family": "psi_star"}}"#).unwrap();
        assert!(matches!(
            w.obs,
            ObservableSpec::ClassA {
                family: PsiFamily::PsiStar,
                ..
            }
        ));
        let w: W = serde_json::from_str(r#"{"obs": {"variant": "typical"}}"#).unwrap();
        assert_eq!(w.obs, ObservableSpec::Typical);
        assert!(serde_json::from_str::<W>(r#"{"obs": {"variant": "class_a", "xi1": 0, "xi2": 0, "xi3": 0, "m": 2, "j": 5, "family": "psi"}}"#).is_err());
        let text =
            serde_json::to_string(&ObservableSpec::preset("classB_cos_cos").unwrap()).unwrap();
        let w: W = serde_json::from_str(&format!(r#"{{"obs": {text}}}"#)).unwrap();
        assert!(matches!(w.obs, ObservableSpec::ClassB { .. }));
    }
}
