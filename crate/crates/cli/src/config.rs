use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nilskew::arith::AlphaSpec;
use nilskew::complexity::CloudSource;
use nilskew::flows::{SkewKind, SkewProductSpec};
use nilskew::heisenberg::PhasePoint;
use nilskew::observables::ObservableSpec;
use nilskew::periodic::PeriodicFunction;
use serde::{Deserialize, Serialize};

use crate::correlate::Weights;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Parameters for every subcommand; each command reads the keys it needs and
/// falls back to its own defaults for the rest.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: Format,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    #[serde(default)]
    pub timing: bool,

    /// A full skew product; when absent one of kind `T` is assembled from
    /// `alpha`, `k`, `phi` and `psi`.
    pub spec: Option<SkewProductSpec>,
    pub alpha: Option<AlphaSpec>,
    pub k: Option<f64>,
    pub phi: Option<PeriodicFunction>,
    pub psi: Option<PeriodicFunction>,
    /// The function acted on by `split`, `coboundary` and `lemma43`.
    pub f: Option<PeriodicFunction>,
    pub observable: Option<ObservableSpec>,
    pub start: Option<PhasePoint>,
    pub partner: Option<PhasePoint>,

    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub checkpoints: Option<Vec<u64>>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub epsilon: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<u64>,
    pub q: Option<u64>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub trunc: Option<i64>,
    pub tolerance: Option<f64>,
    pub max_terms: Option<usize>,
    pub max_q: Option<u128>,
    pub max_mode: Option<i64>,

    pub table: Option<PathBuf>,
    pub weights: Option<Weights>,
    /// Polynomial phase, highest degree first.
    pub coeffs: Option<Vec<f64>>,
    pub residue: Option<u64>,
    pub modulus: Option<u64>,

    pub cloud: Option<CloudSource>,
    pub cloud_size: Option<usize>,
    pub ns: Option<Vec<usize>>,
}

/// Command-line values that replace the corresponding config keys.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub svg: Option<PathBuf>,
    pub n: Option<u64>,
    pub alpha: Option<String>,
    pub b: Option<f64>,
    pub epsilon: Option<f64>,
    pub k: Option<f64>,
    pub table: Option<PathBuf>,
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn apply(&mut self, o: Overrides) -> Result<()> {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.out {
            self.out = Some(v);
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        if let Some(v) = o.svg {
            self.svg = Some(v);
        }
        if let Some(v) = o.n {
            self.n = Some(v);
        }
        if let Some(s) = o.alpha {
            let a = AlphaSpec::parse(&s)?;
            if let Some(spec) = &mut self.spec {
                spec.alpha = a.clone();
            }
            self.alpha = Some(a);
        }
        if let Some(v) = o.b {
            self.b = Some(v);
        }
        if let Some(v) = o.epsilon {
            self.epsilon = Some(v);
        }
        if let Some(v) = o.k {
            self.k = Some(v);
            if let Some(SkewProductSpec {
                kind: SkewKind::T { k, .. } | SkewKind::T1 { k, .. },
                ..
            }) = &mut self.spec
            {
                *k = v;
            }
        }
        if let Some(v) = o.table {
            self.table = Some(v);
        }
        self.timing |= o.timing;
        Ok(())
    }

    pub fn alpha_or(&self, default: AlphaSpec) -> AlphaSpec {
        self.alpha.clone().unwrap_or(default)
    }

    pub fn phi(&self) -> PeriodicFunction {
        self.phi.clone().unwrap_or_else(PeriodicFunction::cos)
    }

    pub fn psi(&self) -> PeriodicFunction {
        self.psi.clone().unwrap_or_else(PeriodicFunction::sin)
    }

    pub fn k(&self) -> f64 {
        self.k.unwrap_or(1.0)
    }

    pub fn b(&self) -> f64 {
        self.b.unwrap_or(3.0)
    }

    pub fn trunc(&self) -> i64 {
        self.trunc.unwrap_or(nilskew::observables::DEFAULT_TRUNC)
    }

    /// `spec`, or the map of kind `T` built from the scalar keys.
    pub fn skew_spec(&self, default_alpha: AlphaSpec) -> SkewProductSpec {
        match &self.spec {
            Some(s) => s.clone(),
            None => SkewProductSpec {
                alpha: self.alpha_or(default_alpha),
                kind: SkewKind::T {
                    k: self.k(),
                    phi: self.phi(),
                    psi: self.psi(),
                    theorem2: false,
                },
            },
        }
    }

    /// Sorted checkpoints not above `n`; by default the decades from `10^3`.
    pub fn checkpoints(&self, n: u64) -> Result<Vec<u64>> {
        let mut cps = match &self.checkpoints {
            Some(c) => c.clone(),
            None => {
                let mut v: Vec<u64> = (3..=18)
                    .map(|e| 10u64.pow(e))
                    .take_while(|&c| c < n)
                    .collect();
                v.push(n);
                v
            }
        };
        if cps.is_empty() {
            bail!("no checkpoints");
        }
        if cps.windows(2).any(|w| w[0] >= w[1]) {
            bail!("checkpoints must be strictly increasing");
        }
        if cps[0] == 0 {
            bail!("checkpoints must be positive");
        }
        if *cps.last().unwrap() > n {
            bail!("checkpoint {} exceeds N = {n}", cps.last().unwrap());
        }
        cps.dedup();
        Ok(cps)
    }
}
