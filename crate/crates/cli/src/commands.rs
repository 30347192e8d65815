use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use nilskew::arith::{
    cf_expand, classify_denominators, hua_sums_at, mertens, mobius_sieve, AlphaSpec, CfStop,
    MobiusTable,
};
use nilskew::complexity::{
    complexity_scan, grid_shadowing_check, recount, CloudSource, GridParams, SampleCloud,
};
use nilskew::flows::{
    birkhoff_series, conjugation_residual, lemma43_sup, state_from_sums, BlockSums, ConjugacySetup,
    SkewKind, SkewProduct, SkewProductSpec,
};
use nilskew::heisenberg::{haar_sample, phase_dist, HeisenbergElement, PhasePoint};
use nilskew::observables::ObservableSpec;
use nilskew::periodic::{coboundary_residual, solve_coboundary_rot, split_with, PeriodicFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::correlate::{correlate, Weights};
use crate::output::{render, svg_loglog, Cell, Series, Staged, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Mobius table to a binary file
    Sieve,
    /// Continued fraction expansion and convergents
    Cf,
    /// Sharp/flat classification of the convergent denominators
    Classify,
    /// Resonant/non-resonant split of a trigonometric polynomial
    Split,
    /// Solve g(t + alpha) - g(t) = f(t)
    Coboundary,
    /// Check the conjugacy T1 = R^-1 T R on random points
    ConjCheck,
    /// Check the reduced central entry of the conjugated fiber map
    OmegaCheck,
    /// Compare orbit sums with direct iteration
    OrbitOracle,
    /// Mobius-weighted polynomial exponential sums
    Hua,
    /// Mobius correlations along an orbit
    Correlate,
    /// Decay of ergodic sums at sharp denominators
    Lemma43,
    /// Shadowing of random points by the explicit grid
    GridShadow,
    /// Covering numbers of an empirical cloud against n
    ComplexityScan,
    /// Closest approach of two orbits
    DistalProbe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sieve => "sieve",
            Command::Cf => "cf",
            Command::Classify => "classify",
            Command::Split => "split",
            Command::Coboundary => "coboundary",
            Command::ConjCheck => "conj-check",
            Command::OmegaCheck => "omega-check",
            Command::OrbitOracle => "orbit-oracle",
            Command::Hua => "hua",
            Command::Correlate => "correlate",
            Command::Lemma43 => "lemma43",
            Command::GridShadow => "grid-shadow",
            Command::ComplexityScan => "complexity-scan",
            Command::DistalProbe => "distal-probe",
        }
    }
}

/// The outcome of a command before anything is written.
#[derive(Clone, Debug)]
pub struct Report {
    pub summary: Vec<String>,
    pub table: Table,
    pub json: Value,
    pub series: Option<Series>,
    /// False when a check command found a residual above its tolerance.
    pub passed: bool,
    /// Replaces the table as the `--out` artifact.
    pub binary: Option<Vec<u8>>,
}

impl Report {
    fn new(table: Table, json: Value) -> Self {
        Report {
            summary: Vec::new(),
            table,
            json,
            series: None,
            passed: true,
            binary: None,
        }
    }
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = match cmd {
        Command::Sieve => sieve(cfg),
        Command::Cf => cf(cfg),
        Command::Classify => classify(cfg),
        Command::Split => split(cfg),
        Command::Coboundary => coboundary(cfg),
        Command::ConjCheck => conj_check(cfg),
        Command::OmegaCheck => omega_check(cfg),
        Command::OrbitOracle => orbit_oracle(cfg),
        Command::Hua => hua(cfg),
        Command::Correlate => run_correlate(cfg),
        Command::Lemma43 => lemma43(cfg),
        Command::GridShadow => grid_shadow(cfg),
        Command::ComplexityScan => scan(cfg),
        Command::DistalProbe => distal_probe(cfg),
    }?;
    if let Value::Object(map) = &mut r.json {
        map.insert("command".into(), json!(cmd.name()));
        map.insert("passed".into(), json!(r.passed));
    }
    Ok(r)
}

/// Runs `cmd`, writes its artifacts and prints the summary. Returns the exit
/// status: 0, or 2 when a check did not pass.
pub fn execute(cmd: Command, cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<i32> {
    let report = run(cmd, cfg)?;
    let mut staged = Staged::default();
    let main = match &report.binary {
        Some(b) => b.clone(),
        None => render(&report.table, &report.json, cfg.format)?,
    };
    match &cfg.out {
        Some(path) => staged.add(path, &main)?,
        None if report.binary.is_some() => bail!("{} needs --out", cmd.name()),
        None => stdout.write_all(&main)?,
    }
    if let Some(path) = &cfg.svg {
        let Some(series) = &report.series else {
            bail!("{} has no chart output", cmd.name())
        };
        staged.add(path, svg_loglog(series).as_bytes())?;
    }
    staged.commit()?;
    for line in &report.summary {
        if cfg.out.is_some() {
            writeln!(stdout, "{line}")?;
        } else {
            eprintln!("{line}");
        }
    }
    Ok(if report.passed { 0 } else { 2 })
}

fn c<T: Into<Cell>>(v: T) -> Cell {
    v.into()
}

fn golden() -> AlphaSpec {
    AlphaSpec::golden()
}

fn load_or_sieve(cfg: &ExperimentConfig, n: u64) -> Result<MobiusTable> {
    match &cfg.table {
        Some(p) => {
            let t = MobiusTable::load(p).with_context(|| format!("loading {}", p.display()))?;
            if t.limit() < n {
                bail!("table {} covers N = {}, {n} needed", p.display(), t.limit());
            }
            Ok(t)
        }
        None => Ok(mobius_sieve(n)?),
    }
}

fn sieve(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n.unwrap_or(1_000_000);
    let table = mobius_sieve(n)?;
    let mut bytes = Vec::new();
    table.write_to(&mut bytes)?;
    let m = mertens(&table, n)?;
    let mut t = Table::new(&["N", "mertens"]);
    t.push(vec![c(n), c(m)]);
    let mut r = Report::new(t, json!({ "N": n, "mertens": m }));
    r.summary.push(format!("sieve N={n} M(N)={m}"));
    r.binary = Some(bytes);
    Ok(r)
}

fn cf_stop(cfg: &ExperimentConfig, default_terms: usize) -> CfStop {
    match (cfg.max_q, cfg.max_terms) {
        (Some(q), _) => CfStop::MaxQ(q),
        (None, t) => CfStop::MaxTerms(t.unwrap_or(default_terms)),
    }
}

fn cf(cfg: &ExperimentConfig) -> Result<Report> {
    let alpha = cfg.alpha_or(golden());
    let cf = cf_expand(&alpha, cf_stop(cfg, 30))?;
    let mut t = Table::new(&["i", "a_i", "l_i", "q_i"]);
    for (i, (a, cv)) in cf
        .partial_quotients()
        .iter()
        .zip(cf.convergents())
        .enumerate()
    {
        t.push(vec![c(i + 1), c(*a), c(cv.l), c(cv.q)]);
    }
    let json = json!({ "alpha": alpha, "expansion": serde_json::to_value(&cf)? });
    let mut r = Report::new(t, json);
    r.summary.push(format!(
        "cf {} terms, termination {:?}",
        cf.len(),
        cf.termination()
    ));
    Ok(r)
}

fn classify(cfg: &ExperimentConfig) -> Result<Report> {
    let alpha = cfg.alpha_or(golden());
    let b = cfg.b();
    let cf = cf_expand(&alpha, cf_stop(cfg, 30))?;
    let class = classify_denominators(&cf, b)?;
    let mut t = Table::new(&["i", "q_i", "class"]);
    for (i, q) in cf.denominators().enumerate() {
        let label = if class.is_sharp(q) {
            "sharp"
        } else if class.unresolved == Some(q) {
            "unresolved"
        } else if class.ties.contains(&q) {
            "tie"
        } else {
            "flat"
        };
        t.push(vec![c(i + 1), c(q), c(label)]);
    }
    let mut r = Report::new(t, json!({ "alpha": alpha, "classification": class }));
    r.summary
        .push(format!("classify B={b} sharp={:?}", class.sharp));
    Ok(r)
}

fn coeff_table(parts: &[(&str, &PeriodicFunction)]) -> Table {
    let mut t = Table::new(&["part", "m", "re", "im"]);
    for (name, f) in parts {
        for (m, z) in f.coeffs() {
            t.push(vec![c(*name), c(m), c(z.re), c(z.im)]);
        }
    }
    t
}

fn split(cfg: &ExperimentConfig) -> Result<Report> {
    let alpha = cfg.alpha_or(golden());
    let b = cfg.b();
    let f = cfg.f.clone().unwrap_or_else(|| cfg.phi());
    let cf = cf_expand(&alpha, CfStop::MaxQ(f.max_mode().max(2) as u128))?;
    let class = classify_denominators(&cf, b)?;
    let s = split_with(&f, &class)?;
    let t = coeff_table(&[("resonant", &s.part1), ("non_resonant", &s.part2)]);
    let mut r = Report::new(
        t,
        json!({ "alpha": alpha, "B": b, "split": s, "sharp": class.sharp }),
    );
    r.summary.push(format!(
        "split: {} resonant modes, {} non-resonant modes",
        s.part1.modes().count(),
        s.part2.modes().count()
    ));
    Ok(r)
}

fn coboundary(cfg: &ExperimentConfig) -> Result<Report> {
    let alpha = cfg.alpha_or(golden());
    let rot = alpha.rotation()?;
    let f = cfg.f.clone().unwrap_or_else(|| cfg.phi());
    let g = solve_coboundary_rot(&f, &rot)?;
    let grid = cfg.grid.unwrap_or(1 << 10);
    let residual = coboundary_residual(&g, &f, &rot, grid);
    let tol = cfg.tolerance.unwrap_or(1e-9);
    let mut r = Report::new(
        coeff_table(&[("g", &g)]),
        json!({ "alpha": alpha, "g": g, "residual": residual, "grid": grid }),
    );
    r.passed = residual < tol;
    r.summary.push(format!(
        "coboundary residual {residual:.3e} (tolerance {tol:.0e})"
    ));
    Ok(r)
}

fn conj_setup(cfg: &ExperimentConfig, default_alpha: AlphaSpec) -> Result<ConjugacySetup> {
    Ok(ConjugacySetup::new(
        cfg.alpha_or(default_alpha),
        cfg.k(),
        cfg.phi(),
        cfg.psi(),
        cfg.b(),
    )?)
}

fn haar_points(seed: u64, n: usize) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| haar_sample(&mut rng)).collect()
}

fn conj_check(cfg: &ExperimentConfig) -> Result<Report> {
    let setup = conj_setup(cfg, golden())?;
    let samples = haar_points(cfg.seed, cfg.samples.unwrap_or(1000));
    let t = SkewProduct::new(setup.t_spec())?;
    let t1 = SkewProduct::new(setup.t1_spec())?;
    let residual = conjugation_residual(&t, &setup.conjugator(), &t1, &samples);
    let tol = cfg.tolerance.unwrap_or(1e-9);
    let mut table = Table::new(&["metric", "value"]);
    table.push(vec![c("conjugation_residual"), c(residual)]);
    let mut json = json!({
        "alpha": setup.alpha, "k": setup.k, "B": setup.b, "samples": samples.len(),
        "residual": residual, "finite_branch": setup.is_finite_branch(), "sharp": setup.classification.sharp,
    });
    if setup.is_finite_branch() {
        let tilde = SkewProduct::new(setup.t1_tilde_spec())?;
        let d = samples
            .iter()
            .map(|p| phase_dist(&t1.step(p), &tilde.step(p)))
            .fold(0.0, f64::max);
        table.push(vec![c("t1_vs_central_translation"), c(d)]);
        json["t1_vs_central_translation"] = json!(d);
    }
    let mut r = Report::new(table, json);
    r.passed = residual < tol;
    r.summary.push(format!(
        "conjugation residual {residual:.3e} over {} points (tolerance {tol:.0e})",
        samples.len()
    ));
    Ok(r)
}

fn omega_check(cfg: &ExperimentConfig) -> Result<Report> {
    let setup = conj_setup(cfg, golden())?;
    let grid = cfg.grid.unwrap_or(1 << 10);
    let omega = setup.omega_residual(grid);
    let cob = setup.coboundary_residuals(grid);
    let tol = cfg.tolerance.unwrap_or(1e-10);
    let mut table = Table::new(&["metric", "value"]);
    table.push(vec![c("omega_residual"), c(omega)]);
    for (name, v) in ["coboundary_phi", "coboundary_eta", "coboundary_psi"]
        .iter()
        .zip(cob)
    {
        table.push(vec![c(*name), c(v)]);
    }
    let mut r = Report::new(
        table,
        json!({ "grid": grid, "omega_residual": omega, "coboundary_residuals": cob }),
    );
    r.passed = omega < tol && cob.iter().all(|&v| v < 1e-9);
    r.summary.push(format!(
        "omega residual {omega:.3e}, coboundary residuals {:.3e} {:.3e} {:.3e}",
        cob[0], cob[1], cob[2]
    ));
    Ok(r)
}

/// Real trigonometric polynomial with random cosine and sine parts on modes
/// `1..=max_mode`, amplitudes decaying like `1/m`.
pub fn random_trig(rng: &mut impl Rng, max_mode: i64) -> PeriodicFunction {
    let mut f = PeriodicFunction::zero();
    for m in 1..=max_mode {
        let a = rng.random_range(-1.0..1.0) / m as f64;
        let b = rng.random_range(-1.0..1.0) / m as f64;
        f = f
            .add(&PeriodicFunction::cos_mode(m, a))
            .add(&PeriodicFunction::sin_mode(m, b));
    }
    f
}

pub fn random_s_spec(alpha: AlphaSpec, seed: u64, max_mode: i64) -> SkewProductSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi1 = random_trig(&mut rng, max_mode);
    let phi2 = random_trig(&mut rng, max_mode);
    let psi = random_trig(&mut rng, max_mode);
    SkewProductSpec {
        alpha,
        kind: SkewKind::S { phi1, phi2, psi },
    }
}

fn orbit_oracle(cfg: &ExperimentConfig) -> Result<Report> {
    let spec = match &cfg.spec {
        Some(s) => s.clone(),
        None => random_s_spec(
            cfg.alpha_or(AlphaSpec::rational(3, 7)),
            cfg.seed,
            cfg.max_mode.unwrap_or(8),
        ),
    };
    let map = SkewProduct::new(spec)?;
    let n = cfg.n.unwrap_or(10_000);
    let start = cfg
        .start
        .unwrap_or_else(|| PhasePoint::new(0.15, 0.4, 0.8, 0.33));
    let cps = cfg.checkpoints(n)?;
    let series = birkhoff_series(&map, n, start.t);
    let blocks = match map.rotation().rational_parts() {
        Some(_) => Some(BlockSums::new(&map, start.t)?),
        None => None,
    };
    let g0: HeisenbergElement = start.rep();
    let mut table = Table::new(&["N", "orbit_deviation", "block_deviation"]);
    let (mut worst_orbit, mut worst_block) = (0.0f64, 0.0f64);
    let mut next = 0;
    for (j, p) in map.iter_from(start).take(n as usize + 1).enumerate() {
        let sums = &series[j];
        let from_sums = PhasePoint::from_parts(p.t, state_from_sums(g0, sums));
        worst_orbit = worst_orbit.max(phase_dist(&from_sums, &p));
        if let Some(b) = &blocks {
            worst_block = worst_block.max(b.eval(j as u64).max_abs_diff(sums));
        }
        if next < cps.len() && j as u64 == cps[next] {
            let block = if blocks.is_some() {
                c(worst_block)
            } else {
                Cell::Empty
            };
            table.push(vec![c(j as u64), c(worst_orbit), block]);
            next += 1;
        }
    }
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let mut r = Report::new(
        table,
        json!({ "N": n, "orbit_deviation": worst_orbit, "block_deviation": blocks.as_ref().map(|_| worst_block) }),
    );
    r.passed = worst_orbit <= tol && worst_block <= tol;
    r.summary.push(format!(
        "orbit oracle N={n}: orbit deviation {worst_orbit:.3e}, block deviation {worst_block:.3e}"
    ));
    Ok(r)
}

fn hua(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n.unwrap_or(1_000_000);
    let cps = cfg.checkpoints(n)?;
    let coeffs = cfg
        .coeffs
        .clone()
        .unwrap_or_else(|| vec![std::f64::consts::SQRT_2, 0.0, 0.0]);
    let (a, q) = (cfg.residue.unwrap_or(0), cfg.modulus.unwrap_or(1));
    let table = load_or_sieve(cfg, n)?;
    let sums = hua_sums_at(&coeffs, a, q, &cps, &table)?;
    let mut t = Table::new(&["N", "re", "im", "abs", "abs_over_N"]);
    let mut pts = Vec::new();
    for (s, &nk) in sums.iter().zip(&cps) {
        let ratio = s.norm() / nk as f64;
        t.push(vec![c(nk), c(s.re), c(s.im), c(s.norm()), c(ratio)]);
        pts.push((nk as f64, ratio));
    }
    let json = json!({
        "coeffs": coeffs, "residue": a, "modulus": q, "checkpoints": cps,
        "sums": sums.iter().map(|s| [s.re, s.im]).collect::<Vec<_>>(),
    });
    let mut r = Report::new(t, json);
    r.summary.push(format!(
        "hua |S(N)|/N at N={n}: {:.6e}",
        pts.last().unwrap().1
    ));
    r.series = Some(Series {
        title: "Mobius exponential sum".into(),
        x_label: "N".into(),
        y_label: "|S(N)|/N".into(),
        points: pts,
    });
    Ok(r)
}

fn run_correlate(cfg: &ExperimentConfig) -> Result<Report> {
    let map = SkewProduct::new(cfg.skew_spec(golden()))?;
    let obs = cfg.observable.clone().unwrap_or(ObservableSpec::Typical);
    let n = cfg.n.unwrap_or(1_000_000);
    let cps = cfg.checkpoints(n)?;
    let weights = cfg.weights.unwrap_or_default();
    let table = match weights {
        Weights::Mobius => Some(load_or_sieve(cfg, n)?),
        Weights::Ones => None,
    };
    let start = cfg.start.unwrap_or_default();
    let rep = correlate(
        &map,
        &obs,
        start,
        &cps,
        table.as_ref(),
        weights,
        cfg.trunc(),
    )?;
    let mut t = Table::new(&["N", "re", "im", "abs", "sum_re", "sum_im"]);
    for k in 0..cps.len() {
        let (a, s) = (rep.averages[k], rep.sums[k]);
        t.push(vec![
            c(cps[k]),
            c(a.re),
            c(a.im),
            c(rep.magnitudes[k]),
            c(s.re),
            c(s.im),
        ]);
    }
    let pts = cps
        .iter()
        .map(|&n| n as f64)
        .zip(rep.magnitudes.iter().copied())
        .collect();
    let mut r = Report::new(
        t,
        json!({ "spec": map.spec(), "observable": obs, "start": start, "report": rep }),
    );
    if let Some(w) = &rep.warning {
        r.summary.push(format!("warning: {w}"));
    }
    r.summary.push(format!(
        "correlate |A(N)| at N={n}: {:.6e}",
        rep.magnitudes.last().unwrap()
    ));
    r.series = Some(Series {
        title: "Correlation average".into(),
        x_label: "N".into(),
        y_label: "|A(N)|".into(),
        points: pts,
    });
    Ok(r)
}

/// `[0; 1, 2, 10, 1000, 10^9, 1]`: the denominators 3, 31 and 31003 are sharp
/// at `B = 3`.
pub fn lemma43_alpha() -> AlphaSpec {
    AlphaSpec::PartialQuotients {
        a: vec![1, 2, 10, 1000, 1_000_000_000, 1],
    }
}

fn lemma43(cfg: &ExperimentConfig) -> Result<Report> {
    let alpha = cfg.alpha_or(lemma43_alpha());
    let b = cfg.b();
    let f = cfg
        .f
        .clone()
        .unwrap_or_else(|| PeriodicFunction::cos().add(&PeriodicFunction::sin_mode(2, 0.5)));
    let grid = cfg.grid.unwrap_or(1 << 10);
    let cf = cf_expand(&alpha, cf_stop(cfg, 64))?;
    let class = classify_denominators(&cf, b)?;
    let rot = alpha.rotation()?;
    let qs: Vec<u64> = class
        .sharp
        .iter()
        .copied()
        .filter(|&q| q > f.max_mode() as u128 && q <= u64::MAX as u128)
        .map(|q| q as u64)
        .collect();
    let Some(&q0) = qs.first() else {
        bail!("finite branch: no sharp denominator above the top mode of f")
    };
    let sups: Vec<f64> = qs.iter().map(|&q| lemma43_sup(&f, &rot, q, grid)).collect();
    let fitted = sups[0] * (q0 as f64).powf(b - 1.0);
    let slack = 2.0;
    let mut t = Table::new(&["q", "sup", "fitted_bound", "ratio"]);
    let mut ratios = Vec::new();
    for (&q, &s) in qs.iter().zip(&sups) {
        let bound = fitted * (q as f64).powf(1.0 - b);
        let ratio = s / bound;
        ratios.push(ratio);
        t.push(vec![c(q), c(s), c(bound), c(ratio)]);
    }
    let mut r = Report::new(
        t,
        json!({ "alpha": alpha, "B": b, "q": qs, "sup": sups, "C": fitted, "ratios": ratios }),
    );
    r.passed = ratios.iter().all(|&x| x <= slack);
    r.summary.push(format!(
        "lemma43 C={fitted:.4e} fitted at q={q0}; ratios {ratios:.3?} (slack {slack})"
    ));
    Ok(r)
}

/// `[0; 2, 5, 1, ...]`: `q = 2` is sharp at `B = 3`.
pub fn grid_shadow_alpha() -> AlphaSpec {
    AlphaSpec::PartialQuotients {
        a: vec![2, 5, 1, 1, 1, 1, 1, 1],
    }
}

fn grid_shadow(cfg: &ExperimentConfig) -> Result<Report> {
    let setup = conj_setup(cfg, grid_shadow_alpha())?;
    let eps = cfg.epsilon.unwrap_or(0.1);
    let eps_inv = (1.0 / eps).round();
    if !(eps > 0.0) || (eps_inv * eps - 1.0).abs() > 1e-9 {
        bail!("epsilon must be the reciprocal of a positive integer, got {eps}");
    }
    let eps_inv = eps_inv as u64;
    let q = match cfg.q {
        Some(q) => q,
        None => *setup
            .classification
            .sharp
            .first()
            .ok_or_else(|| anyhow::anyhow!("finite branch: no sharp denominator"))?
            as u64,
    };
    let lip = [
        &setup.phi_split.part1,
        &setup.eta_split.part1,
        &setup.psi_split.part1,
    ]
    .iter()
    .map(|f| f.lipschitz_bound())
    .fold(0.0, f64::max);
    let l = cfg
        .l
        .unwrap_or_else(|| (lip.ceil() as u64).max(eps_inv + 1));
    let params = GridParams { q, eps_inv, l };
    let samples = haar_points(cfg.seed, cfg.samples.unwrap_or(200));
    let rep = grid_shadowing_check(&setup, params, &samples)?;
    let mut t = Table::new(&[
        "q",
        "B",
        "n_i",
        "epsilon",
        "L",
        "k",
        "grid_cardinality",
        "worst",
        "bound",
        "c1",
        "c2",
        "c_condition",
    ]);
    t.push(vec![
        c(rep.q),
        c(rep.b),
        c(rep.n_i),
        c(rep.epsilon),
        c(rep.l),
        c(rep.k),
        c(rep.grid_cardinality),
        c(rep.worst),
        c(rep.bound),
        c(rep.c1),
        c(rep.c2),
        c(rep.c_condition),
    ]);
    let mut r = Report::new(t, json!({ "samples": samples.len(), "report": rep }));
    r.passed = rep.passes();
    r.summary.push(format!(
        "grid-shadow q={q} n_i={} worst {:.4e} vs bound {:.4e} (#F = {})",
        rep.n_i, rep.worst, rep.bound, rep.grid_cardinality
    ));
    if !rep.c_condition {
        r.summary.push(format!(
            "note: (C1 + C2)/q = {:.3e} is not below epsilon",
            (rep.c1 + rep.c2) / q as f64
        ));
    }
    Ok(r)
}

fn scan(cfg: &ExperimentConfig) -> Result<Report> {
    let map = SkewProduct::new(cfg.skew_spec(golden()))?;
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![1, 10, 100]);
    let eps = cfg.epsilon.unwrap_or(0.25);
    let size = cfg.cloud_size.unwrap_or(2000);
    let source = cfg
        .cloud
        .clone()
        .unwrap_or(CloudSource::HaarUniform { seed: cfg.seed });
    let n_max = ns.iter().copied().max().unwrap_or(1);
    let cloud = SampleCloud::new(&map, source.clone(), size, n_max);
    let mut rows = Vec::new();
    let mut seconds = Vec::new();
    for &n in &ns {
        let clock = Instant::now();
        let rep = complexity_scan(&cloud, &[n], eps)?.rows.remove(0);
        seconds.push(clock.elapsed().as_secs_f64());
        let mass = recount(&cloud, &rep)?;
        if mass <= 1.0 - eps {
            bail!("recount of the cover at n = {n} found mass {mass}");
        }
        rows.push(rep);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.s_n as f64)).collect();
    let (slope, intercept, residuals) = nilskew::complexity::loglog_fit(&pts);
    let mut t = Table::new(&["n", "epsilon", "s_n", "covered_mass", "seconds"]);
    for (row, secs) in rows.iter().zip(&seconds) {
        let secs = if cfg.timing { c(*secs) } else { Cell::Empty };
        t.push(vec![
            c(row.n),
            c(row.epsilon),
            c(row.s_n),
            c(row.covered_mass),
            secs,
        ]);
    }
    let json = json!({
        "spec": map.spec(), "cloud": source, "cloud_size": size, "epsilon": eps,
        "rows": rows.iter().map(|r| json!({ "n": r.n, "s_n": r.s_n, "covered_mass": r.covered_mass })).collect::<Vec<_>>(),
        "slope": slope, "intercept": intercept, "residuals": residuals,
    });
    let mut r = Report::new(t, json);
    r.summary.push(format!(
        "complexity-scan s_n {:?} over n {:?}; log-log slope {slope:.4}",
        rows.iter().map(|r| r.s_n).collect::<Vec<_>>(),
        ns
    ));
    r.series = Some(Series {
        title: "Covering numbers".into(),
        x_label: "n".into(),
        y_label: "s_n".into(),
        points: pts,
    });
    Ok(r)
}

fn distal_probe(cfg: &ExperimentConfig) -> Result<Report> {
    let map = SkewProduct::new(cfg.skew_spec(golden()))?;
    let n = cfg.n.unwrap_or(10_000);
    let cps = cfg.checkpoints(n)?;
    let p1 = cfg
        .start
        .unwrap_or_else(|| PhasePoint::new(0.1, 0.2, 0.3, 0.4));
    let p2 = cfg.partner.unwrap_or_else(|| {
        let g = p1.rep();
        PhasePoint::new(p1.t, g.x, g.y, g.z + 0.25)
    });
    let mut best = f64::INFINITY;
    let mut at = 0u64;
    let mut t = Table::new(&["N", "min_dist", "argmin"]);
    let mut next = 0;
    for (j, (a, b)) in map
        .iter_from(p1)
        .zip(map.iter_from(p2))
        .take(n as usize + 1)
        .enumerate()
    {
        let d = phase_dist(&a, &b);
        if d < best {
            best = d;
            at = j as u64;
        }
        if next < cps.len() && j as u64 == cps[next] {
            t.push(vec![c(j as u64), c(best), c(at)]);
            next += 1;
        }
    }
    let mut r = Report::new(
        t,
        json!({ "N": n, "p1": p1, "p2": p2, "min_dist": best, "argmin": at }),
    );
    r.passed = best > 0.0;
    r.summary.push(format!(
        "distal-probe min over n <= {n} of d(T^n P1, T^n P2) = {best:.6e} at n = {at}"
    ));
    Ok(r)
}
