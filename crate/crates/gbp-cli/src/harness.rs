//! Experiment orchestration: grid sweeps over (algorithm, beta, green, tau),
//! empirical competitive ratios against the offline lower bound, and the
//! closed-form bound sweep behind the heatmaps.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gbp_core::algorithms::{pack, AlgorithmKind, ThresholdPolicy};
use gbp_core::bounds::{bound_report, nextfit_tau_optimal, taf_optimized_tau};
use gbp_core::cost::{opt_lower_bound, CostParams};
use gbp_core::instance::{packing_cost, Instance};
use gbp_core::sample::{derive_seed, sample, shuffle, Distribution, GeneratorSpec};

use crate::formats::read_bpplib;

/// How a run picks its threshold for each parameter point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauRule {
    /// `tau = 1 - G` (classic behavior).
    #[default]
    Full,
    /// The per-algorithm optimized threshold from the closed-form bounds.
    Theory,
    /// Thresholds that perform best empirically: 0 for FirstFit/BestFit,
    /// `1/(2 beta)` for WorstFit, `1/beta` for NextFit and Harmonic, all
    /// clamped to `[0, 1-G]`.
    Empirical,
    /// A caller-chosen constant.
    Fixed(f64),
}

/// Resolves a rule to a concrete threshold for one algorithm at `(beta, G)`.
pub fn resolve_tau(rule: TauRule, kind: AlgorithmKind, params: CostParams) -> Result<f64> {
    let beta = params.beta();
    let green = params.green();
    let full = 1.0 - green;
    let tau = match rule {
        TauRule::Full => full,
        TauRule::Fixed(t) => t,
        TauRule::Theory => {
            if params.beta_green() <= 1.0 {
                full
            } else {
                match kind {
                    AlgorithmKind::NextFit => {
                        nextfit_tau_optimal(beta, green)
                            .map_err(|e| anyhow::anyhow!("{e}"))?
                            .tau
                    }
                    AlgorithmKind::WorstFit => (1.0 / beta).min(full),
                    _ => taf_optimized_tau(beta, green)
                        .map_err(|e| anyhow::anyhow!("{e}"))?
                        .tau,
                }
            }
        }
        TauRule::Empirical => match kind {
            AlgorithmKind::FirstFit | AlgorithmKind::BestFit => 0.0,
            AlgorithmKind::WorstFit => (0.5 / beta).clamp(0.0, full),
            AlgorithmKind::NextFit | AlgorithmKind::Harmonic(_) => {
                (1.0 / beta).clamp(0.0, full)
            }
        },
    };
    if !(0.0..=full + 1e-12).contains(&tau) {
        bail!("resolved tau {tau} outside [0, {full}]");
    }
    Ok(tau)
}

/// One algorithm entry in a config: a name, the class count for `harmonic`,
/// and an optional per-algorithm threshold rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgSpec {
    pub alg: String,
    #[serde(default)]
    pub k: Option<u32>,
    #[serde(default)]
    pub tau_rule: Option<TauRule>,
}

impl AlgSpec {
    pub fn kind(&self) -> Result<AlgorithmKind> {
        parse_algorithm(&self.alg, self.k)
    }
}

pub fn parse_algorithm(name: &str, k: Option<u32>) -> Result<AlgorithmKind> {
    Ok(match name {
        "nextfit" => AlgorithmKind::NextFit,
        "worstfit" => AlgorithmKind::WorstFit,
        "firstfit" => AlgorithmKind::FirstFit,
        "bestfit" => AlgorithmKind::BestFit,
        "harmonic" => AlgorithmKind::Harmonic(k.unwrap_or(10)),
        other => bail!("unknown algorithm {other:?}"),
    })
}

/// Parameter values given either explicitly or as an evenly spaced range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Linspace { start, stop, count } => linspace(*start, *stop, *count),
        }
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Input source for experiment trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistSpec {
    Weibull { shape: f64 },
    Uniform {},
    Bpplib { path: String, #[serde(default)] shuffle: bool },
}

fn default_n() -> usize {
    3000
}

fn default_trials() -> usize {
    20
}

/// The experiment grid: algorithms x betas x greens x trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithms: Vec<AlgSpec>,
    pub betas: GridSpec,
    pub greens: GridSpec,
    pub distribution: DistSpec,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Default threshold rule for algorithms that do not set their own.
    #[serde(default)]
    pub tau_rule: TauRule,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing experiment config")
    }
}

/// One (algorithm, beta, green, tau, trial) outcome. `error` rows keep the
/// numeric fields as NaN.
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub algorithm: String,
    pub beta: f64,
    pub green: f64,
    pub tau: f64,
    pub trial: usize,
    pub seed: u64,
    pub cost: f64,
    pub opt_lb: f64,
    pub empirical_cr: f64,
    pub error: Option<String>,
}

/// Runs the full grid. Instances are generated per (beta, green, trial) cell
/// (shared across algorithms so comparisons are paired), with seeds derived
/// only from the base seed and the cell and trial indices, so output is
/// independent of scheduling. Records come back sorted by
/// (algorithm, beta, green, tau, trial).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let betas = config.betas.values();
    let greens = config.greens.values();
    if betas.is_empty() || greens.is_empty() || config.algorithms.is_empty() {
        bail!("empty grid");
    }
    let kinds: Vec<(AlgorithmKind, TauRule)> = config
        .algorithms
        .iter()
        .map(|spec| Ok((spec.kind()?, spec.tau_rule.unwrap_or(config.tau_rule))))
        .collect::<Result<_>>()?;

    // Benchmark files are fixed across trials (up to the optional shuffle).
    let base_file: Option<Instance> = match &config.distribution {
        DistSpec::Bpplib { path, .. } => Some(read_bpplib(Path::new(path))?),
        _ => None,
    };

    let mut cells: Vec<(usize, usize, usize)> = Vec::new(); // (beta idx, green idx, trial)
    for bi in 0..betas.len() {
        for gi in 0..greens.len() {
            for trial in 0..config.trials {
                cells.push((bi, gi, trial));
            }
        }
    }

    let mut records: Vec<ExperimentRecord> = cells
        .par_iter()
        .map(|&(bi, gi, trial)| {
            let beta = betas[bi];
            let green = greens[gi];
            let cell = (bi * greens.len() + gi) as u64;
            let seed = derive_seed(config.seed, cell, trial as u64);
            run_cell(
                config,
                &kinds,
                base_file.as_ref(),
                beta,
                green,
                trial,
                seed,
            )
        })
        .collect::<Result<Vec<Vec<ExperimentRecord>>>>()?
        .into_iter()
        .flatten()
        .collect();

    records.sort_by(|a, b| {
        a.algorithm
            .cmp(&b.algorithm)
            .then(a.beta.total_cmp(&b.beta))
            .then(a.green.total_cmp(&b.green))
            .then(a.tau.total_cmp(&b.tau))
            .then(a.trial.cmp(&b.trial))
    });
    Ok(records)
}

fn run_cell(
    config: &ExperimentConfig,
    kinds: &[(AlgorithmKind, TauRule)],
    base_file: Option<&Instance>,
    beta: f64,
    green: f64,
    trial: usize,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let params = match CostParams::new(beta, green) {
        Ok(p) => p,
        Err(e) => {
            return Ok(kinds
                .iter()
                .map(|(kind, _)| error_record(kind.tag(), beta, green, trial, seed, format!("{e}")))
                .collect())
        }
    };
    let instance = match &config.distribution {
        DistSpec::Weibull { shape } => sample(&GeneratorSpec {
            kind: Distribution::Weibull { shape: *shape },
            n: config.n,
            seed,
        })
        .map_err(|e| anyhow::anyhow!("{e}"))?,
        DistSpec::Uniform {} => sample(&GeneratorSpec {
            kind: Distribution::Uniform,
            n: config.n,
            seed,
        })
        .map_err(|e| anyhow::anyhow!("{e}"))?,
        DistSpec::Bpplib { shuffle: do_shuffle, .. } => {
            let base = base_file.expect("benchmark file loaded");
            let mut items = base.items().to_vec();
            if *do_shuffle {
                shuffle(&mut items, seed);
            }
            Instance::new(items).map_err(|e| anyhow::anyhow!("{e}"))?
        }
    };
    let opt_lb = opt_lower_bound(instance.total_size(), params)
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut out = Vec::with_capacity(kinds.len());
    for &(kind, rule) in kinds {
        let tag = kind.tag();
        let tau = match resolve_tau(rule, kind, params) {
            Ok(t) => t,
            Err(e) => {
                out.push(error_record(tag, beta, green, trial, seed, e.to_string()));
                continue;
            }
        };
        let policy = match ThresholdPolicy::new(tau, green) {
            Ok(p) => p,
            Err(e) => {
                out.push(error_record(tag, beta, green, trial, seed, format!("{e}")));
                continue;
            }
        };
        match pack(kind, policy, &instance, params) {
            Ok(packing) => {
                let cost = packing_cost(&packing);
                out.push(ExperimentRecord {
                    algorithm: tag,
                    beta,
                    green,
                    tau,
                    trial,
                    seed,
                    cost,
                    opt_lb,
                    empirical_cr: cost / opt_lb,
                    error: None,
                });
            }
            Err(e) => out.push(error_record(tag, beta, green, trial, seed, format!("{e}"))),
        }
    }
    Ok(out)
}

fn error_record(
    algorithm: String,
    beta: f64,
    green: f64,
    trial: usize,
    seed: u64,
    error: String,
) -> ExperimentRecord {
    ExperimentRecord {
        algorithm,
        beta,
        green,
        tau: f64::NAN,
        trial,
        seed,
        cost: f64::NAN,
        opt_lb: f64::NAN,
        empirical_cr: f64::NAN,
        error: Some(error),
    }
}

/// Mean empirical ratio per (algorithm, beta, green), preserving sort order.
pub fn mean_ratios(records: &[ExperimentRecord]) -> Vec<(String, f64, f64, f64)> {
    let mut out: Vec<(String, f64, f64, f64)> = Vec::new();
    let mut acc: Option<(String, f64, f64, f64, usize)> = None;
    for r in records.iter().filter(|r| r.error.is_none()) {
        match &mut acc {
            Some((alg, beta, green, sum, count))
                if *alg == r.algorithm && *beta == r.beta && *green == r.green =>
            {
                *sum += r.empirical_cr;
                *count += 1;
            }
            _ => {
                if let Some((alg, beta, green, sum, count)) = acc.take() {
                    out.push((alg, beta, green, sum / count as f64));
                }
                acc = Some((r.algorithm.clone(), r.beta, r.green, r.empirical_cr, 1));
            }
        }
    }
    if let Some((alg, beta, green, sum, count)) = acc {
        out.push((alg, beta, green, sum / count as f64));
    }
    out
}

/// One cell of the closed-form bound sweep.
#[derive(Debug, Clone)]
pub struct BoundsCell {
    pub beta: f64,
    pub green: f64,
    pub algorithm: String,
    pub lower: f64,
    pub upper: f64,
    pub tau_opt: f64,
}

/// Evaluates the bound formulas for all five algorithms over a
/// `beta in [0, 20] x green in [0, 1]` grid at the per-algorithm optimized
/// threshold.
pub fn sweep_bounds(beta_steps: usize, green_steps: usize) -> Vec<BoundsCell> {
    let betas = linspace(0.0, 20.0, beta_steps);
    let greens = linspace(0.0, 1.0, green_steps);
    let mut out = Vec::new();
    for &beta in &betas {
        for &green in &greens {
            for kind in AlgorithmKind::all_default() {
                let Ok(report) = bound_report(kind, beta, green, None) else {
                    continue;
                };
                out.push(BoundsCell {
                    beta,
                    green,
                    algorithm: report.algorithm,
                    lower: report.lower,
                    upper: report.upper,
                    tau_opt: report.tau_optimal.unwrap_or(1.0 - green),
                });
            }
        }
    }
    out
}
