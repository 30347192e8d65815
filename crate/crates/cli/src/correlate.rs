use anyhow::{bail, Result};
use nilskew::arith::MobiusTable;
use nilskew::flows::SkewProduct;
use nilskew::heisenberg::PhasePoint;
use nilskew::num::CompensatedComplex;
use nilskew::observables::{eval_observable, ObservableSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Truncation error above which a report carries a warning.
pub const TRUNCATION_WARN: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weights {
    #[default]
    Mobius,
    /// All weights one: a plain ergodic average, for comparison.
    Ones,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub weights: Weights,
    pub checkpoints: Vec<u64>,
    /// `sum_{n <= N_k} w(n) f(T^n P0)`.
    pub sums: Vec<Complex64>,
    /// `sums[k] / N_k`.
    pub averages: Vec<Complex64>,
    pub magnitudes: Vec<f64>,
    pub sup_bound: f64,
    pub truncation_error: f64,
    pub warning: Option<String>,
}

/// One pass along `T^n(P0)`, `n = 1..=N`, accumulating `w(n) f(T^n P0)`.
pub fn correlate(
    map: &SkewProduct,
    obs: &ObservableSpec,
    p0: PhasePoint,
    checkpoints: &[u64],
    table: Option<&MobiusTable>,
    weights: Weights,
    trunc: i64,
) -> Result<CorrelationReport> {
    let Some(&n_max) = checkpoints.last() else {
        bail!("no checkpoints")
    };
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints[0] == 0 {
        bail!("checkpoints must be positive and strictly increasing");
    }
    if weights == Weights::Mobius {
        match table {
            None => bail!("Mobius weights need a table"),
            Some(t) if t.limit() < n_max => {
                bail!("N = {n_max} exceeds the table limit {}", t.limit())
            }
            _ => {}
        }
    }
    obs.validate()?;
    let mut acc = CompensatedComplex::new();
    let mut sums = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    for (n, p) in map.iter_from(p0).enumerate().skip(1).take(n_max as usize) {
        let n = n as u64;
        let w = match weights {
            Weights::Mobius => table.unwrap().mu(n) as f64,
            Weights::Ones => 1.0,
        };
        if w != 0.0 {
            acc.add(w * eval_observable(obs, &p, trunc)?);
        }
        if n == checkpoints[next] {
            sums.push(acc.value());
            next += 1;
        }
    }
    let averages: Vec<Complex64> = sums
        .iter()
        .zip(checkpoints)
        .map(|(s, &n)| s / n as f64)
        .collect();
    let truncation_error = obs.truncation_error(trunc);
    let warning = (truncation_error > TRUNCATION_WARN).then(|| {
        format!("observable truncation error {truncation_error:.3e} exceeds {TRUNCATION_WARN:e}")
    });
    Ok(CorrelationReport {
        weights,
        checkpoints: checkpoints.to_vec(),
        magnitudes: averages.iter().map(|a| a.norm()).collect(),
        sums,
        averages,
        sup_bound: obs.sup_bound(),
        truncation_error,
        warning,
    })
}
