//! The `gbp` command: pack instances, evaluate competitive-ratio bounds,
//! generate adversarial inputs, run offline baselines, and drive experiments.

use gbp_cli::{formats, harness, output};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use gbp_core::adversary::{self, AdversaryInstance};
use gbp_core::algorithms::{pack_logged, ThresholdPolicy};
use gbp_core::bounds::bound_report;
use gbp_core::cost::{opt_lower_bound, CostParams};
use gbp_core::instance::{packing_cost, validate};
use gbp_core::offline::{aptas, exact_opt_capped, DEFAULT_EXACT_CAP};

use harness::{parse_algorithm, resolve_tau, ExperimentConfig, TauRule};
use output::Series;

#[derive(Parser)]
#[command(name = "gbp", about = "Green bin packing: algorithms, bounds, experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an online algorithm over an instance file.
    Pack {
        /// nextfit | worstfit | firstfit | bestfit | harmonic
        #[arg(long)]
        alg: String,
        /// Class count for harmonic (default 10).
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        green: f64,
        /// Fixed threshold; exclusive with --tau-rule.
        #[arg(long, conflicts_with = "tau_rule")]
        tau: Option<f64>,
        /// full | theory | empirical (default full).
        #[arg(long)]
        tau_rule: Option<String>,
        /// Plain-text instance file (one size per line, # comments).
        #[arg(long)]
        input: PathBuf,
        /// Write the packing as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-item decision log as CSV here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Evaluate closed-form bounds for one algorithm at (beta, green).
    Bounds {
        #[arg(long)]
        alg: String,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        green: f64,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Evaluate the bound formulas over a (beta, green) grid as CSV.
    SweepBounds {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 81)]
        beta_steps: usize,
        #[arg(long, default_value_t = 41)]
        green_steps: usize,
        /// Also render one heatmap SVG per algorithm next to the CSV.
        #[arg(long)]
        svg: bool,
    },
    /// Generate a worst-case input family; writes the instance plus a
    /// sidecar JSON with its certified offline cost and target ratio.
    Adversary {
        /// nf-pairs | wf-pairs | nftau-pairs | aaf7142 | sand | taf-case2 |
        /// nftau-mixed | sylvester | genlb-large | partition
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        green: f64,
        #[arg(long)]
        tau: Option<f64>,
        /// Phase count for the sylvester family (default 4).
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated integer weights for the partition family.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Provably optimal packing of a small instance by branch and bound.
    Exact {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        green: f64,
        /// Item cap (default 14).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Approximation-scheme packing with guarantee (1+eps) OPT + O(1).
    Aptas {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        green: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Run an experiment grid from a JSON config; emits the record CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Optional line chart of mean empirical ratios.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Pack { alg, k, beta, green, tau, tau_rule, input, out, log } => {
            let params = CostParams::new(beta, green).map_err(err)?;
            let kind = parse_algorithm(&alg, k)?;
            let rule = match (tau, tau_rule.as_deref()) {
                (Some(t), _) => TauRule::Fixed(t),
                (None, Some("full") | None) => TauRule::Full,
                (None, Some("theory")) => TauRule::Theory,
                (None, Some("empirical")) => TauRule::Empirical,
                (None, Some(other)) => bail!("unknown tau rule {other:?}"),
            };
            let tau = resolve_tau(rule, kind, params)?;
            let instance = formats::read_instance(&input)?;
            let policy = ThresholdPolicy::new(tau, green).map_err(err)?;
            let (packing, decisions) = pack_logged(kind, policy, &instance, params).map_err(err)?;
            debug_assert!(validate(&instance, &packing).is_ok());
            let cost = packing_cost(&packing);
            let lb = opt_lower_bound(instance.total_size(), params).map_err(err)?;
            println!(
                "{} tau={} bins={} cost={} opt_lb={} empirical_cr={}",
                kind.tag(),
                output::format_sig(tau),
                packing.num_bins(),
                output::format_sig(cost),
                output::format_sig(lb),
                output::format_sig(cost / lb)
            );
            if let Some(path) = out {
                fs::write(&path, formats::packing_to_json(&packing))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = log {
                fs::write(&path, formats::decision_log_csv(&decisions))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Bounds { alg, k, beta, green, tau } => {
            let kind = parse_algorithm(&alg, k.or(Some(10)))?;
            let report = bound_report(kind, beta, green, tau).map_err(err)?;
            let pieces: Vec<_> = report
                .pieces
                .iter()
                .map(|(label, value)| json!({ "condition": label, "value": value }))
                .collect();
            let doc = json!({
                "algorithm": report.algorithm,
                "regime": report.regime.as_str(),
                "lower": report.lower,
                "upper": report.upper,
                "tau_used": report.tau_used,
                "tau_optimal": report.tau_optimal,
                "pieces": pieces,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Command::SweepBounds { out, beta_steps, green_steps, svg } => {
            let cells = harness::sweep_bounds(beta_steps, green_steps);
            fs::write(&out, output::bounds_csv(&cells))
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} cells to {}", cells.len(), out.display());
            if svg {
                let betas = harness::linspace(0.0, 20.0, beta_steps);
                let greens = harness::linspace(0.0, 1.0, green_steps);
                let mut by_alg: BTreeMap<String, BTreeMap<(u64, u64), f64>> = BTreeMap::new();
                for cell in &cells {
                    by_alg.entry(cell.algorithm.clone()).or_default().insert(
                        (cell.beta.to_bits(), cell.green.to_bits()),
                        cell.upper,
                    );
                }
                for (alg, grid) in by_alg {
                    let values: Vec<f64> = greens
                        .iter()
                        .flat_map(|g| {
                            betas
                                .iter()
                                .map(|b| {
                                    grid.get(&(b.to_bits(), g.to_bits()))
                                        .copied()
                                        .unwrap_or(f64::NAN)
                                })
                                .collect::<Vec<_>>()
                        })
                        .collect();
                    let path = out.with_file_name(format!(
                        "{}-{alg}.svg",
                        out.file_stem().and_then(|s| s.to_str()).unwrap_or("bounds")
                    ));
                    let chart = output::emit_svg_heatmap(
                        &betas,
                        &greens,
                        &values,
                        &format!("{alg} ratio upper bound (x: beta, y: green)"),
                    );
                    fs::write(&path, chart)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("wrote {}", path.display());
                }
            }
        }
        Command::Adversary { family, n, eps, beta, green, tau, k, weights, out } => {
            let params = CostParams::new(beta, green).map_err(err)?;
            let eps_or = |d: f64| eps.unwrap_or(d);
            match family.as_str() {
                "partition" => {
                    let weights: Vec<u64> = weights
                        .context("partition family needs --weights")?
                        .split(',')
                        .map(|w| w.trim().parse().context("weight"))
                        .collect::<Result<_>>()?;
                    let red = adversary::gen_partition_reduction(
                        &weights,
                        eps_or(0.01),
                        params,
                    )
                    .map_err(err)?;
                    fs::write(&out, formats::write_instance_text(&red.instance))?;
                    let meta = json!({
                        "family": "partition",
                        "yes_cost": red.yes_cost,
                        "no_cost_lb": red.no_cost_lb,
                    });
                    fs::write(sidecar(&out), serde_json::to_string_pretty(&meta)?)?;
                    println!("wrote {} (+ sidecar)", out.display());
                }
                "genlb-large" => {
                    let stages =
                        adversary::gen_general_lb_large(n, eps, params).map_err(err)?;
                    for (i, adv) in stages.iter().enumerate() {
                        let path = out.with_file_name(format!(
                            "{}.stage{}",
                            out.file_name().and_then(|s| s.to_str()).unwrap_or("adv"),
                            i + 1
                        ));
                        write_adversary(&path, adv)?;
                        println!("wrote {} (+ sidecar)", path.display());
                    }
                }
                _ => {
                    let e = eps_or(adversary::DEFAULT_EPS);
                    let adv = match family.as_str() {
                        "nf-pairs" => adversary::gen_nextfit_pairs(n, e, params),
                        "wf-pairs" => adversary::gen_worstfit_pairs(n, e, params),
                        "nftau-pairs" => adversary::gen_nextfit_tau_pairs(
                            n,
                            e,
                            params,
                            tau.unwrap_or(0.0),
                        ),
                        "aaf7142" => adversary::gen_aaf_7142(n, e, params),
                        // n grains of size eps.
                        "sand" => adversary::gen_sand(n as f64 * e, e, params, tau),
                        "taf-case2" => adversary::gen_taf_case2(
                            n,
                            e,
                            params,
                            tau.context("taf-case2 needs --tau")?,
                        ),
                        "nftau-mixed" => adversary::gen_nextfit_tau_mixed(
                            n,
                            e,
                            params,
                            tau.context("nftau-mixed needs --tau")?,
                        ),
                        "sylvester" => adversary::gen_sylvester(k.unwrap_or(4), n, e, params),
                        other => bail!("unknown family {other:?}"),
                    }
                    .map_err(err)?;
                    write_adversary(&out, &adv)?;
                    println!(
                        "wrote {} (+ sidecar): {} items, known_opt={}, target={}",
                        out.display(),
                        adv.instance.len(),
                        output::format_sig(adv.known_opt_cost),
                        output::format_sig(adv.target_ratio)
                    );
                }
            }
        }
        Command::Exact { input, beta, green, cap } => {
            let params = CostParams::new(beta, green).map_err(err)?;
            let instance = formats::read_instance(&input)?;
            let result =
                exact_opt_capped(&instance, params, cap.unwrap_or(DEFAULT_EXACT_CAP)).map_err(err)?;
            println!(
                "cost={} bins={} nodes={} proven_optimal={}",
                output::format_sig(result.cost),
                result.packing.num_bins(),
                result.nodes_explored,
                result.proven_optimal
            );
            println!("{}", formats::packing_to_json(&result.packing));
        }
        Command::Aptas { input, beta, green, eps } => {
            let params = CostParams::new(beta, green).map_err(err)?;
            let instance = formats::read_instance(&input)?;
            let packing = aptas(&instance, params, eps).map_err(err)?;
            debug_assert!(validate(&instance, &packing).is_ok());
            println!(
                "cost={} bins={}",
                output::format_sig(packing_cost(&packing)),
                packing.num_bins()
            );
            println!("{}", formats::packing_to_json(&packing));
        }
        Command::Experiment { config, out, svg } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut config = ExperimentConfig::from_json(&text)?;
            if let Ok(seed) = std::env::var("GBP_SEED") {
                config.seed = seed.parse().context("GBP_SEED must be an integer")?;
            }
            let records = harness::run_experiment(&config)?;
            let errors = records.iter().filter(|r| r.error.is_some()).count();
            fs::write(&out, output::experiment_csv(&records))
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "wrote {} records ({errors} error rows) to {}",
                records.len(),
                out.display()
            );
            if let Some(path) = svg {
                let means = harness::mean_ratios(&records);
                let mut by_alg: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
                for (alg, beta, green, mean) in means {
                    by_alg.entry(alg).or_default().push((beta * green, mean));
                }
                let series: Vec<Series> = by_alg
                    .into_iter()
                    .map(|(name, points)| Series { name, points })
                    .collect();
                let chart = output::emit_svg_lines(
                    &series,
                    "mean empirical competitive ratio",
                    "beta * green",
                    "ratio",
                );
                fs::write(&path, chart).with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out").to_string();
    name.push_str(".meta.json");
    path.with_file_name(name)
}

fn write_adversary(path: &Path, adv: &AdversaryInstance) -> Result<()> {
    fs::write(path, formats::write_instance_text(&adv.instance))
        .with_context(|| format!("writing {}", path.display()))?;
    let meta = json!({
        "family": adv.family.tag(),
        "known_opt_cost": adv.known_opt_cost,
        "target_ratio": adv.target_ratio,
        "beta": adv.params.beta(),
        "green": adv.params.green(),
        "items": adv.instance.len(),
    });
    fs::write(sidecar(path), serde_json::to_string_pretty(&meta)?)
        .with_context(|| format!("writing sidecar for {}", path.display()))?;
    Ok(())
}

fn err(e: gbp_core::Error) -> anyhow::Error {
    anyhow::anyhow!("{e}")
}
