//! Averaged orbit metrics, covering numbers of empirical clouds, the explicit
//! grids used for covering arguments, and growth-rate fits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flows::{lemma43_sup, ConjugacySetup, FlowError, SkewProduct};
use crate::heisenberg::{haar_sample, phase_dist, NilmanifoldPoint, PhasePoint};
use crate::num::circle_dist;

pub const DEFAULT_GRID_CAP: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum ComplexityError {
    #[error("orbit cache holds {have} steps, {need} requested")]
    CacheTooShort { have: usize, need: usize },
    #[error("grid would hold {size} points, above the cap {cap}")]
    GridTooLarge { size: u128, cap: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("finite branch: no sharp denominator available (requested q = {q})")]
    FiniteBranch { q: u64 },
    #[error("q = {q} is not a sharp denominator at B = {b}")]
    NotSharp { q: u64, b: f64 },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CloudSource {
    /// `T^(i * gap)(start)` for `i < size`.
    OrbitOf {
        start: PhasePoint,
        gap: u64,
    },
    HaarUniform {
        seed: u64,
    },
}

/// Sample points with their forward orbits cached to `n_max` steps.
#[derive(Clone, Debug)]
pub struct SampleCloud {
    source: CloudSource,
    n_max: usize,
    // row i holds T^j(P_i) for j = 0..=n_max
    orbits: Vec<PhasePoint>,
}

impl SampleCloud {
    pub fn new(map: &SkewProduct, source: CloudSource, size: usize, n_max: usize) -> Self {
        let points: Vec<PhasePoint> = match &source {
            CloudSource::HaarUniform { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..size).map(|_| haar_sample(&mut rng)).collect()
            }
            CloudSource::OrbitOf { start, gap: 0 } => vec![*start; size],
            CloudSource::OrbitOf { start, gap } => map
                .iter_from(*start)
                .step_by(*gap as usize)
                .take(size)
                .collect(),
        };
        let orbits = points
            .par_iter()
            .flat_map_iter(|&p| map.iter_from(p).take(n_max + 1).collect::<Vec<_>>())
            .collect();
        SampleCloud {
            source,
            n_max,
            orbits,
        }
    }

    pub fn len(&self) -> usize {
        self.orbits.len() / (self.n_max + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn source(&self) -> &CloudSource {
        &self.source
    }

    pub fn point(&self, i: usize) -> PhasePoint {
        self.orbits[i * (self.n_max + 1)]
    }

    /// `T^j(P_i)` for `j <= n_max`.
    pub fn orbit(&self, i: usize) -> &[PhasePoint] {
        let w = self.n_max + 1;
        &self.orbits[i * w..(i + 1) * w]
    }

    fn check(&self, n: usize) -> Result<(), ComplexityError> {
        if n == 0 {
            return Err(ComplexityError::InvalidParameter(
                "n must be at least 1".into(),
            ));
        }
        if n > self.n_max {
            return Err(ComplexityError::CacheTooShort {
                have: self.n_max,
                need: n,
            });
        }
        Ok(())
    }

    /// `(1/n) sum_{j < n} d(T^j P_a, T^j P_b)`.
    pub fn bar_d_n(&self, a: usize, b: usize, n: usize) -> Result<f64, ComplexityError> {
        self.check(n)?;
        Ok(mean_dist(&self.orbit(a)[..n], &self.orbit(b)[..n]))
    }

    /// Whether `bar_d_n(a, b) <= eps`, stopping once the partial sum already
    /// exceeds `eps n`. Every term is at least the base distance, which the
    /// rotation preserves.
    fn within(&self, a: usize, b: usize, n: usize, eps: f64) -> bool {
        let (oa, ob) = (self.orbit(a), self.orbit(b));
        let base = circle_dist(oa[0].t, ob[0].t);
        if base > eps {
            return false;
        }
        let budget = eps * n as f64;
        let mut sum = 0.0;
        for j in 0..n {
            sum += phase_dist(&oa[j], &ob[j]);
            if sum + (n - j - 1) as f64 * base > budget {
                return false;
            }
        }
        sum / n as f64 <= eps
    }
}

fn mean_dist(o1: &[PhasePoint], o2: &[PhasePoint]) -> f64 {
    let s: f64 = o1.iter().zip(o2).map(|(p, q)| phase_dist(p, q)).sum();
    s / o1.len() as f64
}

/// `bar_d_n` along freshly computed orbits.
pub fn bar_d_n(
    map: &SkewProduct,
    p1: PhasePoint,
    p2: PhasePoint,
    n: usize,
) -> Result<f64, ComplexityError> {
    if n == 0 {
        return Err(ComplexityError::InvalidParameter(
            "n must be at least 1".into(),
        ));
    }
    let o1: Vec<_> = map.iter_from(p1).take(n).collect();
    let o2: Vec<_> = map.iter_from(p2).take(n).collect();
    Ok(mean_dist(&o1, &o2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringReport {
    pub n: usize,
    pub epsilon: f64,
    pub s_n: usize,
    pub centers: Vec<usize>,
    pub covered_mass: f64,
}

struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }
}

fn incidence(cloud: &SampleCloud, n: usize, eps: f64) -> BitRows {
    let m = cloud.len();
    let words = m.div_ceil(64);
    // upper triangle, row by row; mirrored afterwards
    let upper: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..m)
                .filter(|&j| cloud.within(i, j, n, eps))
                .collect()
        })
        .collect();
    let mut bits = vec![0u64; m * words];
    for (i, js) in upper.iter().enumerate() {
        bits[i * words + i / 64] |= 1 << (i % 64);
        for &j in js {
            bits[i * words + j / 64] |= 1 << (j % 64);
            bits[j * words + i / 64] |= 1 << (i % 64);
        }
    }
    BitRows { words, bits }
}

/// Greedy cover of the cloud by `bar_d_n`-balls of radius `eps` centred at
/// cloud points, until more than `1 - eps` of the cloud is covered.
pub fn covering_number(
    cloud: &SampleCloud,
    n: usize,
    eps: f64,
) -> Result<CoveringReport, ComplexityError> {
    cloud.check(n)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ComplexityError::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {eps}"
        )));
    }
    let m = cloud.len();
    if m == 0 {
        return Err(ComplexityError::InvalidParameter("empty cloud".into()));
    }
    let rows = incidence(cloud, n, eps);
    let mut uncovered = vec![0u64; rows.words];
    for i in 0..m {
        uncovered[i / 64] |= 1 << (i % 64);
    }
    let mut covered = 0usize;
    let mut centers = Vec::new();
    while covered as f64 / m as f64 <= 1.0 - eps {
        let gain = |i: usize| -> u32 {
            rows.row(i)
                .iter()
                .zip(&uncovered)
                .map(|(r, u)| (r & u).count_ones())
                .sum()
        };
        let (best, g) = (0..m).into_par_iter().map(|i| (i, gain(i))).reduce(
            || (usize::MAX, 0),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
        if g == 0 {
            break;
        }
        for (u, r) in uncovered.iter_mut().zip(rows.row(best)) {
            *u &= !r;
        }
        covered += g as usize;
        centers.push(best);
    }
    Ok(CoveringReport {
        n,
        epsilon: eps,
        s_n: centers.len(),
        centers,
        covered_mass: covered as f64 / m as f64,
    })
}

/// Fraction of the cloud within `eps` of some reported center, with the
/// distances recomputed from the cached orbits.
pub fn recount(cloud: &SampleCloud, report: &CoveringReport) -> Result<f64, ComplexityError> {
    let mut hit = 0usize;
    for i in 0..cloud.len() {
        for &c in &report.centers {
            if cloud.bar_d_n(i, c, report.n)? <= report.epsilon {
                hit += 1;
                break;
            }
        }
    }
    Ok(hit as f64 / cloud.len() as f64)
}

/// Least-squares fit of `log s_n` against `log n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub rows: Vec<CoveringReport>,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

pub fn loglog_fit(points: &[(f64, f64)]) -> (f64, f64, Vec<f64>) {
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residuals = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    (slope, intercept, residuals)
}

pub fn complexity_scan(
    cloud: &SampleCloud,
    ns: &[usize],
    eps: f64,
) -> Result<ScanReport, ComplexityError> {
    if ns.is_empty() {
        return Err(ComplexityError::InvalidParameter("empty n list".into()));
    }
    let rows = ns
        .iter()
        .map(|&n| covering_number(cloud, n, eps))
        .collect::<Result<Vec<_>, _>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, r.s_n.max(1) as f64))
        .collect();
    let (slope, intercept, residuals) = loglog_fit(&pts);
    Ok(ScanReport {
        rows,
        slope,
        intercept,
        residuals,
    })
}

/// Parameters of the grid `F(i)`: base spacing `1 / (eps_inv L q)`, fiber
/// spacing `1 / (q^2 L)` in each coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridParams {
    pub q: u64,
    pub eps_inv: u64,
    pub l: u64,
}

impl GridParams {
    pub fn base_count(&self) -> u128 {
        self.eps_inv as u128 * self.l as u128 * self.q as u128
    }

    pub fn fiber_count(&self) -> u128 {
        self.q as u128 * self.q as u128 * self.l as u128
    }

    /// `eps^-1 L^4 q^7`.
    pub fn cardinality(&self) -> u128 {
        self.base_count() * self.fiber_count().pow(3)
    }

    fn validate(&self) -> Result<(), ComplexityError> {
        if self.q == 0 || self.eps_inv == 0 || self.l == 0 {
            return Err(ComplexityError::InvalidParameter(
                "q, 1/epsilon and L must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The grid point with indices `(j, j1, j2, j3)`, the fiber part being the
    /// matrix with `x = j1 h`, `y = j2 h`, `z = j3 h`.
    pub fn point(&self, j: u128, j1: u128, j2: u128, j3: u128) -> PhasePoint {
        let h = 1.0 / self.fiber_count() as f64;
        PhasePoint {
            t: j as f64 / self.base_count() as f64,
            coset: NilmanifoldPoint::new(j1 as f64 * h, j2 as f64 * h, j3 as f64 * h),
        }
    }
}

pub fn build_grid_f(params: GridParams, cap: u128) -> Result<Vec<PhasePoint>, ComplexityError> {
    params.validate()?;
    let size = params.cardinality();
    if size > cap {
        return Err(ComplexityError::GridTooLarge { size, cap });
    }
    let (nb, nf) = (params.base_count(), params.fiber_count());
    let mut out = Vec::with_capacity(size as usize);
    for j in 0..nb {
        for j1 in 0..nf {
            for j2 in 0..nf {
                for j3 in 0..nf {
                    out.push(params.point(j, j1, j2, j3));
                }
            }
        }
    }
    Ok(out)
}

/// Grid points whose indices bracket `p` in every coordinate (16 of them).
pub fn bracketing_grid_points(params: GridParams, p: &PhasePoint) -> Vec<PhasePoint> {
    let (nb, nf) = (params.base_count(), params.fiber_count());
    let idx = |v: f64, n: u128| -> [u128; 2] {
        let lo = ((v * n as f64).floor() as u128).min(n - 1);
        [lo, (lo + 1) % n]
    };
    let [t, x, y, z] = p.coords();
    let mut out = Vec::with_capacity(16);
    for j in idx(t, nb) {
        for j1 in idx(x, nf) {
            for j2 in idx(y, nf) {
                for j3 in idx(z, nf) {
                    out.push(params.point(j, j1, j2, j3));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowingReport {
    pub q: u64,
    pub b: f64,
    pub n_i: usize,
    pub epsilon: f64,
    pub l: u64,
    pub k: f64,
    pub grid_cardinality: u128,
    /// `max over samples of min over grid of bar_d_{n_i}`.
    pub worst: f64,
    /// `14 max(|k|, 1) + 6`.
    pub bound_constant: f64,
    pub bound: f64,
    pub c1: f64,
    pub c2: f64,
    /// `(C1 + C2) / q < eps`.
    pub c_condition: bool,
    pub lipschitz: f64,
}

impl ShadowingReport {
    pub fn passes(&self) -> bool {
        self.worst <= self.bound
    }
}

/// For each sample point, the best `bar_d_{n_i}`-shadow among the grid points
/// of `F(i)` bracketing it, under the conjugated map `T1`.
pub fn grid_shadowing_check(
    setup: &ConjugacySetup,
    params: GridParams,
    samples: &[PhasePoint],
) -> Result<ShadowingReport, ComplexityError> {
    params.validate()?;
    let class = &setup.classification;
    let q = params.q;
    if class.sharp_is_empty() {
        return Err(ComplexityError::FiniteBranch { q });
    }
    if !class.is_sharp(q as u128) {
        return Err(ComplexityError::NotSharp { q, b: setup.b });
    }
    let eps = 1.0 / params.eps_inv as f64;
    let parts = [
        &setup.phi_split.part1,
        &setup.eta_split.part1,
        &setup.psi_split.part1,
    ];
    let lipschitz = parts
        .iter()
        .map(|f| f.lipschitz_bound())
        .fold(0.0, f64::max);
    if (params.l as f64) < lipschitz {
        return Err(ComplexityError::InvalidParameter(format!(
            "L = {} is below the Lipschitz bound {lipschitz} of the resonant parts",
            params.l
        )));
    }
    if params.l <= params.eps_inv {
        return Err(ComplexityError::InvalidParameter(format!(
            "L = {} must exceed 1/epsilon = {}",
            params.l, params.eps_inv
        )));
    }
    let n_i = (q as f64).powf(setup.b - 1.0).floor() as usize;
    let rot = setup.rotation();
    let grid = 1 << 10;
    let scale = (q as f64).powf(setup.b - 1.0);
    let c1 = parts
        .iter()
        .map(|f| lemma43_sup(f, rot, q, grid) * scale)
        .fold(0.0, f64::max);
    let c2 = parts
        .iter()
        .map(|f| f.max_abs_on_grid(grid))
        .fold(0.0, f64::max);
    let t1 = SkewProduct::new(setup.t1_spec())?;
    let worst = samples
        .par_iter()
        .map(|p| {
            let own: Vec<_> = t1.iter_from(*p).take(n_i).collect();
            bracketing_grid_points(params, p)
                .into_iter()
                .map(|g| {
                    let other: Vec<_> = t1.iter_from(g).take(n_i).collect();
                    mean_dist(&own, &other)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    let bound_constant = 14.0 * setup.k.abs().max(1.0) + 6.0;
    Ok(ShadowingReport {
        q,
        b: setup.b,
        n_i,
        epsilon: eps,
        l: params.l,
        k: setup.k,
        grid_cardinality: params.cardinality(),
        worst,
        bound_constant,
        bound: bound_constant * eps,
        c1,
        c2,
        c_condition: (c1 + c2) / (q as f64) < eps,
        lipschitz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::AlphaSpec;
    use crate::flows::{SkewKind, SkewProductSpec};
    use crate::periodic::PeriodicFunction;

    fn tilde(c: f64) -> SkewProduct {
        SkewProduct::new(SkewProductSpec {
            alpha: AlphaSpec::golden(),
            kind: SkewKind::T1Tilde { c },
        })
        .unwrap()
    }

    fn twisted() -> SkewProduct {
        SkewProduct::new(SkewProductSpec {
            alpha: AlphaSpec::golden(),
            kind: SkewKind::T {
                k: 2.0,
                phi: PeriodicFunction::cos(),
                psi: PeriodicFunction::sin(),
                theorem2: true,
            },
        })
        .unwrap()
    }

    #[test]
    fn cloud_caches_orbits() {
        let map = twisted();
        let cloud = SampleCloud::new(&map, CloudSource::HaarUniform { seed: 3 }, 12, 40);
        assert_eq!(cloud.len(), 12);
        for i in [0, 11] {
            let p = cloud.point(i);
            assert_eq!(cloud.orbit(i)[1], map.step(&p));
            let mut q = p;
            for _ in 0..40 {
                q = map.step(&q);
            }
            assert!(phase_dist(&cloud.orbit(i)[40], &q) < 1e-9);
        }
        let from = SampleCloud::new(
            &map,
            CloudSource::OrbitOf {
                start: PhasePoint::default(),
                gap: 5,
            },
            4,
            2,
        );
        assert_eq!(from.point(1), map.orbit(PhasePoint::default(), 5, 1)[5]);
    }

    #[test]
    fn bar_d_basics() {
        let map = twisted();
        let cloud = SampleCloud::new(&map, CloudSource::HaarUniform { seed: 4 }, 10, 20);
        let d1 = cloud.bar_d_n(2, 5, 1).unwrap();
        assert_eq!(d1, phase_dist(&cloud.point(2), &cloud.point(5)));
        assert_eq!(cloud.bar_d_n(3, 3, 20).unwrap(), 0.0);
        assert!(matches!(
            cloud.bar_d_n(0, 1, 21),
            Err(ComplexityError::CacheTooShort { .. })
        ));
        let direct = bar_d_n(&map, cloud.point(2), cloud.point(5), 20).unwrap();
        assert!((direct - cloud.bar_d_n(2, 5, 20).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn isometry_law() {
        let map = tilde(0.3);
        let cloud = SampleCloud::new(&map, CloudSource::HaarUniform { seed: 5 }, 20, 100);
        for a in 0..10 {
            for b in 10..20 {
                let d1 = cloud.bar_d_n(a, b, 1).unwrap();
                for n in [2, 10, 100] {
                    assert!((cloud.bar_d_n(a, b, n).unwrap() - d1).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn covering_examples() {
        let map = tilde(0.1);
        let cloud = SampleCloud::new(&map, CloudSource::HaarUniform { seed: 6 }, 200, 10);
        let r1 = covering_number(&cloud, 1, 0.2).unwrap();
        let r10 = covering_number(&cloud, 10, 0.2).unwrap();
        assert_eq!(r1.s_n, r10.s_n);
        assert_eq!(r1.centers, r10.centers);
        assert!(r1.covered_mass > 0.8);
        assert!(recount(&cloud, &r10).unwrap() > 0.8);
        let wide = covering_number(&cloud, 1, 0.99).unwrap();
        assert_eq!(wide.s_n, 1);
        let r2 = covering_number(&cloud, 1, 0.4).unwrap();
        assert!(r2.s_n <= r1.s_n);

        let same = SampleCloud::new(
            &map,
            CloudSource::OrbitOf {
                start: PhasePoint::default(),
                gap: 0,
            },
            2,
            1,
        );
        assert_eq!(covering_number(&same, 1, 0.01).unwrap().s_n, 1);
        assert!(covering_number(&cloud, 1, 1.0).is_err());
    }

    #[test]
    fn rotation_cover_is_bounded() {
        let rot = SkewProduct::new(SkewProductSpec {
            alpha: AlphaSpec::golden(),
            kind: SkewKind::T {
                k: 0.0,
                phi: PeriodicFunction::zero(),
                psi: PeriodicFunction::zero(),
                theorem2: false,
            },
        })
        .unwrap();
        let start = PhasePoint::default();
        let cloud = SampleCloud::new(&rot, CloudSource::OrbitOf { start, gap: 7 }, 100, 50);
        let eps = 0.2;
        for n in [1, 10, 50] {
            let r = covering_number(&cloud, n, eps).unwrap();
            assert!(r.s_n as f64 <= (1.0 / (2.0 * eps)).ceil() + 1.0);
        }
    }

    #[test]
    fn scan_slope_for_isometry() {
        let map = tilde(0.2);
        let cloud = SampleCloud::new(&map, CloudSource::HaarUniform { seed: 8 }, 100, 50);
        let scan = complexity_scan(&cloud, &[1, 5, 50], 0.3).unwrap();
        assert_eq!(scan.slope, 0.0);
        assert!(scan.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn fit_recovers_power() {
        let pts: Vec<_> = [1.0f64, 10.0, 100.0]
            .iter()
            .map(|&n| (n, 3.0 * n.powf(0.7)))
            .collect();
        let (s, c, _) = loglog_fit(&pts);
        assert!((s - 0.7).abs() < 1e-12);
        assert!((c - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn grid_cardinalities() {
        let g = GridParams {
            q: 1,
            eps_inv: 2,
            l: 1,
        };
        assert_eq!(g.cardinality(), 2);
        assert_eq!(build_grid_f(g, 100).unwrap().len(), 2);
        let g = GridParams {
            q: 2,
            eps_inv: 10,
            l: 2,
        };
        assert_eq!(g.cardinality(), 20480);
        let pts = build_grid_f(g, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(pts.len(), 20480);
        assert!(pts
            .iter()
            .all(|p| p.coords().iter().all(|&c| (0.0..1.0).contains(&c))));
        assert!(matches!(
            build_grid_f(g, 1000),
            Err(ComplexityError::GridTooLarge { .. })
        ));
    }

    #[test]
    fn bracketing_points_are_close() {
        let g = GridParams {
            q: 2,
            eps_inv: 10,
            l: 11,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let p = haar_sample(&mut rng);
            let pts = bracketing_grid_points(g, &p);
            assert_eq!(pts.len(), 16);
            let best = pts
                .iter()
                .map(|g| phase_dist(&p, g))
                .fold(f64::INFINITY, f64::min);
            // one fiber step moves the representative by at most 2h in kappa
            assert!(best <= 2.0 / g.fiber_count() as f64 + 1e-12);
        }
    }

    fn sharp_two() -> AlphaSpec {
        AlphaSpec::PartialQuotients {
            a: vec![2, 5, 1, 1, 1, 1, 1, 1],
        }
    }

    #[test]
    fn shadowing_zero_cocycle() {
        let setup = ConjugacySetup::new(
            sharp_two(),
            0.0,
            PeriodicFunction::zero(),
            PeriodicFunction::zero(),
            3.0,
        )
        .unwrap();
        let params = GridParams {
            q: 2,
            eps_inv: 10,
            l: 11,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples: Vec<_> = (0..50).map(|_| haar_sample(&mut rng)).collect();
        let r = grid_shadowing_check(&setup, params, &samples).unwrap();
        assert_eq!(r.n_i, 4);
        assert_eq!(r.bound_constant, 20.0);
        assert!(r.worst <= 0.1);
        assert!(r.c_condition);
    }

    #[test]
    fn shadowing_errors() {
        let params = GridParams {
            q: 2,
            eps_inv: 10,
            l: 11,
        };
        let golden = ConjugacySetup::new(
            AlphaSpec::golden(),
            2.0,
            PeriodicFunction::cos(),
            PeriodicFunction::sin(),
            3.0,
        )
        .unwrap();
        assert!(matches!(
            grid_shadowing_check(&golden, params, &[]),
            Err(ComplexityError::FiniteBranch { .. })
        ));
        let setup = ConjugacySetup::new(
            sharp_two(),
            2.0,
            PeriodicFunction::cos_mode(2, 0.05),
            PeriodicFunction::zero(),
            3.0,
        )
        .unwrap();
        let bad = GridParams { q: 11, ..params };
        assert!(matches!(
            grid_shadowing_check(&setup, bad, &[]),
            Err(ComplexityError::NotSharp { .. })
        ));
        let low = GridParams { l: 10, ..params };
        assert!(grid_shadowing_check(&setup, low, &[]).is_err());
        let r =
            grid_shadowing_check(&setup, params, &[PhasePoint::new(0.3, 0.2, 0.1, 0.7)]).unwrap();
        assert_eq!(r.bound_constant, 34.0);
        assert!(r.passes());
    }
}
