use serde::Serialize;

use super::{FlowError, SkewProduct};
use crate::heisenberg::HeisenbergElement;
use crate::num::CompensatedSum;

/// The four cocycle sums along `t, t + alpha, ..., t + (n - 1) alpha`, where the
/// fiber matrix has entries `x_l`, `y_l`, `z_l`:
/// `S1 = sum x_l`, `S2 = sum y_l`, `S3 = sum z_l` and `S4 = sum_{l < j} y_l x_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BirkhoffSums {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
}

impl BirkhoffSums {
    pub fn max_abs_diff(&self, o: &BirkhoffSums) -> f64 {
        [
            self.s1 - o.s1,
            self.s2 - o.s2,
            self.s3 - o.s3,
            self.s4 - o.s4,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
    }

    /// The fiber product over the first `n` steps, `(S1, S2, S3 + S4)`.
    pub fn as_element(&self) -> HeisenbergElement {
        HeisenbergElement::new(self.s1, self.s2, self.s3 + self.s4)
    }
}

/// Sums for every `n` in `0..=n_max`, in one O(n) pass.
pub fn birkhoff_series(map: &SkewProduct, n_max: u64, t0: f64) -> Vec<BirkhoffSums> {
    let rot = map.rotation();
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let (mut s1, mut s2, mut s3, mut s4) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    out.push(BirkhoffSums::default());
    for j in 0..n_max {
        let m = map.fiber(rot.phase(t0, j));
        // s2 still holds sum_{l < j} y_l here
        s4.add(s2.value() * m.x);
        s1.add(m.x);
        s2.add(m.y);
        s3.add(m.z);
        out.push(BirkhoffSums {
            s1: s1.value(),
            s2: s2.value(),
            s3: s3.value(),
            s4: s4.value(),
        });
    }
    out
}

pub fn birkhoff_sums(map: &SkewProduct, n: u64, t0: f64) -> BirkhoffSums {
    *birkhoff_series(map, n, t0).last().unwrap()
}

/// `g0 (S1, S2, S3 + S4)`, the fiber coordinate after `n` steps.
pub fn state_from_sums(g0: HeisenbergElement, sums: &BirkhoffSums) -> HeisenbergElement {
    g0.mul(sums.as_element())
}

/// Polynomial models of the four sums on each residue class `n = b mod q`
/// for a rational rotation `a / q`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockSums {
    pub q: u64,
    pub t0: f64,
    /// `gamma(h, q)` for `h` the three fiber entries.
    pub gamma_full: [f64; 3],
    /// `gamma(h) = gamma(h, q) / q`.
    pub gamma_mean: [f64; 3],
    /// `gamma(h, b)` for `b` in `0..q`.
    pub gamma_partial: Vec<[f64; 3]>,
    /// Per class: `S4(b + j q) = c0 + c1 j + c2 j^2`.
    s4_by_block: Vec<[f64; 3]>,
}

impl BlockSums {
    /// Fits the models from exact sums at `n < 4q`, checking the quadratic
    /// `S4` model at the fourth block.
    pub fn new(map: &SkewProduct, t0: f64) -> Result<Self, FlowError> {
        let (_, q) = map
            .rotation()
            .rational_parts()
            .ok_or(FlowError::NotRational("block sums"))?;
        let series = birkhoff_series(map, 4 * q, t0);
        let at = |n: u64| series[n as usize];
        let full = at(q);
        let gamma_full = [full.s1, full.s2, full.s3];
        let gamma_mean = gamma_full.map(|g| g / q as f64);
        let mut gamma_partial = Vec::with_capacity(q as usize);
        let mut s4_by_block = Vec::with_capacity(q as usize);
        for b in 0..q {
            let s = at(b);
            gamma_partial.push([s.s1, s.s2, s.s3]);
            let v: Vec<f64> = (0..4).map(|j| at(b + j * q).s4).collect();
            let c2 = (v[2] - 2.0 * v[1] + v[0]) / 2.0;
            let c1 = v[1] - v[0] - c2;
            let coeffs = [v[0], c1, c2];
            let predicted = eval_quadratic(&coeffs, 3.0);
            let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            let deviation = (predicted - v[3]).abs();
            if deviation > 1e-9 * scale {
                return Err(FlowError::BlockModel { b, deviation });
            }
            s4_by_block.push(coeffs);
        }
        Ok(BlockSums {
            q,
            t0,
            gamma_full,
            gamma_mean,
            gamma_partial,
            s4_by_block,
        })
    }

    pub fn eval(&self, n: u64) -> BirkhoffSums {
        let b = n % self.q;
        let j = (n / self.q) as f64;
        let p = &self.gamma_partial[b as usize];
        BirkhoffSums {
            s1: p[0] + j * self.gamma_full[0],
            s2: p[1] + j * self.gamma_full[1],
            s3: p[2] + j * self.gamma_full[2],
            s4: eval_quadratic(&self.s4_by_block[b as usize], j),
        }
    }

    /// `S4` on class `b` as `c0 + c1 n + c2 n^2`.
    pub fn s4_polynomial(&self, b: u64) -> [f64; 3] {
        let [v0, d1, a] = self.s4_by_block[b as usize];
        let (q, b) = (self.q as f64, b as f64);
        [
            v0 - d1 * b / q + a * b * b / (q * q),
            d1 / q - 2.0 * a * b / (q * q),
            a / (q * q),
        ]
    }

    /// `S_i` on class `b` as `intercept + slope n`, for `i` in `0..3`.
    pub fn affine(&self, i: usize, b: u64) -> (f64, f64) {
        let slope = self.gamma_mean[i];
        (self.gamma_partial[b as usize][i] - slope * b as f64, slope)
    }
}

fn eval_quadratic(c: &[f64; 3], j: f64) -> f64 {
    c[0] + j * (c[1] + j * c[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::AlphaSpec;
    use crate::flows::{SkewKind, SkewProductSpec};
    use crate::heisenberg::PhasePoint;
    use crate::periodic::PeriodicFunction;

    fn s_map(
        alpha: AlphaSpec,
        phi1: PeriodicFunction,
        phi2: PeriodicFunction,
        psi: PeriodicFunction,
    ) -> SkewProduct {
        SkewProduct::new(SkewProductSpec {
            alpha,
            kind: SkewKind::S { phi1, phi2, psi },
        })
        .unwrap()
    }

    #[test]
    fn boundary_values() {
        let map = s_map(
            AlphaSpec::golden(),
            PeriodicFunction::cos(),
            PeriodicFunction::sin(),
            PeriodicFunction::cos2(),
        );
        assert_eq!(birkhoff_sums(&map, 0, 0.3), BirkhoffSums::default());
        let one = birkhoff_sums(&map, 1, 0.3);
        assert_eq!(one.s1, PeriodicFunction::cos().eval_real(0.3));
        assert_eq!(one.s4, 0.0);
    }

    #[test]
    fn constant_cocycle_counts_pairs() {
        let one = PeriodicFunction::constant(1.0);
        let map = s_map(AlphaSpec::golden(), one.clone(), one.clone(), one);
        for n in [2u64, 5, 100] {
            let s = birkhoff_sums(&map, n, 0.1);
            assert_eq!(s.s4, (n * (n - 1) / 2) as f64);
            assert_eq!(s.s1, n as f64);
        }
    }

    #[test]
    fn sums_reproduce_iteration() {
        let map = s_map(
            AlphaSpec::rational(3, 7),
            PeriodicFunction::cos(),
            PeriodicFunction::sin_mode(2, 0.5),
            PeriodicFunction::cos_mode(3, 0.2),
        );
        let p0 = PhasePoint::new(0.1, 0.2, 0.3, 0.4);
        let series = birkhoff_series(&map, 1000, p0.t);
        let orbit = map.orbit(p0, 1000, 1);
        for n in [0usize, 1, 17, 1000] {
            let g = state_from_sums(p0.rep(), &series[n]);
            let want = orbit[n];
            let got = PhasePoint::from_parts(want.t, g);
            assert!(crate::heisenberg::phase_dist(&got, &want) < 1e-8);
            // z_n = z0 + y0 S1 + S3 + S4
            let s = series[n];
            assert!((g.z - (p0.rep().z + p0.rep().y * s.s1 + s.s3 + s.s4)).abs() < 1e-12);
        }
    }

    #[test]
    fn block_models_trivial_cases() {
        let one = PeriodicFunction::constant(1.0);
        let map = s_map(AlphaSpec::rational(2, 5), one.clone(), one.clone(), one);
        let blocks = BlockSums::new(&map, 0.0).unwrap();
        for n in [0u64, 1, 7, 123] {
            let s = blocks.eval(n);
            assert!((s.s4 - (n * n.saturating_sub(1) / 2) as f64).abs() < 1e-9);
        }
        let map = s_map(
            AlphaSpec::rational(0, 1),
            PeriodicFunction::cos(),
            PeriodicFunction::sin(),
            PeriodicFunction::zero(),
        );
        let blocks = BlockSums::new(&map, 0.2).unwrap();
        let phi = PeriodicFunction::cos().eval_real(0.2);
        assert!((blocks.eval(40).s1 - 40.0 * phi).abs() < 1e-12);
    }

    #[test]
    fn n_form_coefficients_agree() {
        let map = s_map(
            AlphaSpec::rational(3, 7),
            PeriodicFunction::cos(),
            PeriodicFunction::sin(),
            PeriodicFunction::zero(),
        );
        let blocks = BlockSums::new(&map, 0.05).unwrap();
        for n in [3u64, 52, 1001] {
            let b = n % 7;
            let [c0, c1, c2] = blocks.s4_polynomial(b);
            let nf = n as f64;
            assert!((c0 + c1 * nf + c2 * nf * nf - blocks.eval(n).s4).abs() < 1e-8);
            let (i0, sl) = blocks.affine(0, b);
            assert!((i0 + sl * nf - blocks.eval(n).s1).abs() < 1e-10);
        }
    }

    #[test]
    fn irrational_rotation_has_no_blocks() {
        let map = s_map(
            AlphaSpec::golden(),
            PeriodicFunction::cos(),
            PeriodicFunction::cos(),
            PeriodicFunction::cos(),
        );
        assert!(matches!(
            BlockSums::new(&map, 0.0),
            Err(FlowError::NotRational(_))
        ));
    }
}
