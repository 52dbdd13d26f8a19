use std::path::{Path, PathBuf};

use ctxcent::cascade::{estimate_payoff, estimate_payoffs_all_seeds, simulate_ic};
use ctxcent::centrality::{
    adjusted_with, cc_approx_with, contextual_homogeneous, degree_centrality, diffusion_centrality, eigenvector_from,
    katz_centrality, katz_default_alpha, katz_with, CentralityResult,
};
use ctxcent::metrics::{check_cc_bound, correlation, perturbation_bound, CorrelationKind};
use ctxcent::netgen::{generate, generate_overlay, sample_contributions, ContributionSpec, GenSpec, GraphModel};
use ctxcent::regression::{ols_fit, read_regression_csv};
use ctxcent::rng::derive_seed;
use ctxcent::{leading_eigenpair_default, ContributionVector, EdgeProbabilities, Graph};
use ctxcent_experiments::correlation::{curve_to_csv, run_payoff_correlation, CorrelationConfig};
use ctxcent_experiments::homophily::{run_homophily_regression, HomophilyConfig};
use ctxcent_experiments::strategies::{run_strategy_comparison, strategies_to_csv, StrategyConfig};
use ctxcent_experiments::sweep::{run_relative_change_sweep, SweepGrid};
use ctxcent_experiments::theory::{run_er_expectation_check, run_viral_threshold_scan, ErCheckConfig, ThresholdConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{
    AnalyzeCommand, CentralityArgs, Command, CorrelationArg, GenerateArgs, KindArg, SimulateArgs, SweepArgs,
};
use crate::files::{read_contributions, read_graph, read_input, read_vector, to_json, write_output};
use crate::{CliResult, Failure};

pub fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Generate(a) => generate_cmd(a),
        Command::Centrality(a) => centrality_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Analyze { sub } => analyze_cmd(sub),
    }
}

fn require_seed(seed: Option<u64>, what: &str) -> CliResult<u64> {
    seed.ok_or_else(|| Failure::usage(format!("{what} is stochastic; pass --seed")))
}

fn parse_json<T: DeserializeOwned>(value: Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> CliResult<Value> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
struct GenerateConfig {
    #[serde(flatten)]
    model: GraphModel,
    #[serde(default)]
    contributions: Option<ContributionSpec>,
    #[serde(default)]
    vote_probs: Option<Vec<f64>>,
}

fn generate_cmd(a: GenerateArgs) -> CliResult<()> {
    let seed = require_seed(a.seed, "generate")?;
    let cfg: GenerateConfig = parse_json(read_json(&a.config)?, &a.config)?;
    let spec = GenSpec {
        model: cfg.model,
        rng_seed: seed,
    };
    let (g, y) = match (cfg.vote_probs, cfg.contributions) {
        (Some(_), Some(_)) => {
            return Err(Failure::usage("give either vote_probs or contributions, not both"));
        }
        (Some(probs), None) => {
            let (g, y) = generate_overlay(&spec, &probs)?;
            (g, Some(y))
        }
        (None, Some(c)) => {
            let g = generate(&spec)?;
            let u1 = if c.adversarial_redistribute {
                Some(leading_eigenpair_default(&g)?.u1)
            } else {
                None
            };
            let y = sample_contributions(g.n(), &c, derive_seed(seed, 1), u1.as_deref())?;
            (g, Some(y))
        }
        (None, None) => (generate(&spec)?, None),
    };
    log::info!("generated {} nodes, {} edges", g.n(), g.num_edges());
    match (&y, &a.y_out) {
        (Some(y), Some(path)) => write_output(Some(path), &y.to_csv())?,
        (None, Some(_)) => {
            return Err(Failure::usage("--y-out needs contributions or vote_probs in the config"));
        }
        (Some(_), None) => log::warn!("contributions were sampled but --y-out was not given"),
        (None, None) => {}
    }
    write_output(a.out.as_deref(), &g.to_edge_list())
}

fn need<T>(v: Option<T>, flag: &str, kind: KindArg) -> CliResult<T> {
    v.ok_or_else(|| Failure::usage(format!("--kind {kind:?} needs {flag}").to_lowercase()))
}

fn scores_csv(scores: &[f64]) -> String {
    let mut out = String::from("node,score\n");
    for (i, s) in scores.iter().enumerate() {
        out.push_str(&format!("{i},{s}\n"));
    }
    out
}

fn centrality_cmd(a: CentralityArgs) -> CliResult<()> {
    let g = read_graph(&a.graph)?;
    let y = match &a.y {
        Some(path) => Some(read_contributions(path, g.n())?),
        None => None,
    };
    let kind = a.kind;
    let y_vals = || need(y.as_ref().map(|y| y.values()), "--y", kind);
    let p = || need(a.p, "--p", kind);
    let katz = |spec: Option<&ctxcent::SpectralInfo>| -> CliResult<CentralityResult> {
        Ok(match (a.alpha, spec) {
            (Some(alpha), _) => katz_centrality(&g, alpha)?,
            (None, Some(s)) => katz_with(&g, katz_default_alpha(s.lambda1), s.lambda1)?,
            (None, None) => {
                let s = leading_eigenpair_default(&g)?;
                katz_with(&g, katz_default_alpha(s.lambda1), s.lambda1)?
            }
        })
    };
    let diffusion = || -> CliResult<CentralityResult> { Ok(diffusion_centrality(&g, p()?, a.horizon, !a.exclude_t0)?) };
    let result = match kind {
        KindArg::Degree => degree_centrality(&g)?,
        KindArg::Eigenvector => eigenvector_from(&leading_eigenpair_default(&g)?),
        KindArg::Katz => katz(None)?,
        KindArg::Diffusion => diffusion()?,
        KindArg::Contextual => {
            let p = p()?;
            contextual_homogeneous(&g, p, a.horizon, y_vals()?)?
        }
        KindArg::CcApprox => {
            let (p, y) = (p()?, y_vals()?);
            cc_approx_with(&leading_eigenpair_default(&g)?, p, a.horizon, y)?
        }
        KindArg::DegreeAdjusted | KindArg::EigenvectorAdjusted | KindArg::KatzAdjusted | KindArg::DiffusionAdjusted => {
            let y = y_vals()?;
            let spec = leading_eigenpair_default(&g)?;
            let base = match kind {
                KindArg::DegreeAdjusted => degree_centrality(&g)?,
                KindArg::EigenvectorAdjusted => eigenvector_from(&spec),
                KindArg::KatzAdjusted => katz(Some(&spec))?,
                _ => diffusion()?,
            };
            adjusted_with(&base, &spec, y)?
        }
    };
    write_output(a.out.as_deref(), &scores_csv(&result.scores))
}

fn simulate_cmd(a: SimulateArgs) -> CliResult<()> {
    let seed = require_seed(a.seed, "simulate")?;
    let g = read_graph(&a.graph)?;
    let y = read_contributions(&a.y, g.n())?;
    let probs = EdgeProbabilities::homogeneous(a.p)?;
    let out = match a.node {
        Some(node) if node >= g.n() => {
            return Err(Failure::usage(format!("--node {node} out of range for {} nodes", g.n())));
        }
        Some(node) if a.runs == 1 => to_json(&simulate_ic(&g, node, &probs, y.values(), seed)?),
        Some(node) => {
            let est = estimate_payoff(&g, node, &probs, y.values(), a.runs, seed)?;
            to_json(&json!({
                "node": node,
                "p": a.p,
                "master_seed": seed,
                "mean": est.mean,
                "std_error": est.std_error,
                "runs": est.runs,
            }))
        }
        None => {
            let est = estimate_payoffs_all_seeds(&g, &probs, y.values(), a.runs, seed)?;
            let mut out = String::from("node,mean,std_error\n");
            for (i, e) in est.iter().enumerate() {
                out.push_str(&format!("{i},{},{}\n", e.mean, e.std_error));
            }
            out
        }
    };
    write_output(a.out.as_deref(), &out)
}

/// Deserializes a study config and overrides its `master_seed`.
fn study_config<T: DeserializeOwned>(mut value: Value, path: &Path, seed: u64) -> CliResult<T> {
    if let Some(obj) = value.as_object_mut() {
        if let Some(old) = obj.get("master_seed").and_then(Value::as_u64) {
            if old != seed {
                log::warn!("--seed {seed} overrides master_seed {old} from {}", path.display());
            }
        }
        obj.insert("master_seed".into(), seed.into());
    }
    parse_json(value, path)
}

fn summary_path(out: &Path) -> CliResult<PathBuf> {
    if out.extension().is_some_and(|e| e == "json") {
        return Err(Failure::usage("--out must not end in .json; the summary is written there"));
    }
    Ok(out.with_extension("json"))
}

fn sweep_cmd(a: SweepArgs) -> CliResult<()> {
    let seed = require_seed(a.seed, "sweep")?;
    let summary = summary_path(&a.out)?;
    let mut value = read_json(&a.config)?;
    let experiment = match value.as_object_mut().and_then(|o| o.remove("experiment")) {
        None => "relative_change".to_owned(),
        Some(Value::String(s)) => s,
        Some(other) => return Err(Failure::usage(format!("experiment must be a string, got {other}"))),
    };
    let path = a.config.as_path();
    let (csv, json) = match experiment.as_str() {
        "relative_change" => {
            let grid: SweepGrid = study_config(value, path, seed)?;
            let res = run_relative_change_sweep(&grid)?;
            (res.to_csv(), to_json(&res.summary()))
        }
        "payoff_correlation" => {
            let cfg: CorrelationConfig = study_config(value, path, seed)?;
            let curve = run_payoff_correlation(&cfg)?;
            (curve_to_csv(&curve), to_json(&json!({ "config": cfg, "curve": curve })))
        }
        "strategy_comparison" => {
            let cfg: StrategyConfig = study_config(value, path, seed)?;
            let curve = run_strategy_comparison(&cfg)?;
            (strategies_to_csv(&curve), to_json(&json!({ "config": cfg, "curve": curve })))
        }
        "er_expectation" => {
            let cfg: ErCheckConfig = study_config(value, path, seed)?;
            let r = run_er_expectation_check(&cfg)?;
            let csv = format!(
                "npq,walk_factor,y_mean,expected_mean,empirical_mean,relative_deviation\n{},{},{},{},{},{}\n",
                r.npq, r.walk_factor, r.y_mean, r.expected_mean, r.empirical_mean, r.relative_deviation
            );
            (csv, to_json(&r))
        }
        "homophily" => {
            let cfg: HomophilyConfig = study_config(value, path, seed)?;
            let splits = run_homophily_regression(&cfg)?;
            let mut csv = String::from("model,sign,homophily_coefficient,ci_low,ci_high,r_squared,observations\n");
            for s in &splits {
                let sign = serde_json::to_value(s.sign).expect("sign serializes");
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    s.model.name(),
                    sign.as_str().unwrap_or_default(),
                    s.homophily_coefficient,
                    s.homophily_ci.0,
                    s.homophily_ci.1,
                    s.fit.r_squared,
                    s.fit.observations
                ));
            }
            (csv, to_json(&json!({ "config": cfg, "splits": splits })))
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown experiment {other:?}; expected relative_change, payoff_correlation, \
                 strategy_comparison, er_expectation or homophily"
            )));
        }
    };
    write_output(Some(&a.out), &csv)?;
    write_output(Some(&summary), &json)?;
    log::info!("wrote {} and {}", a.out.display(), summary.display());
    Ok(())
}

#[derive(Serialize)]
struct Inputs<'a> {
    graph: &'a Path,
    y: &'a Path,
    p: f64,
    horizon: usize,
}

fn load_pair(graph: &Path, y: &Path) -> CliResult<(Graph, ContributionVector)> {
    let g = read_graph(graph)?;
    let y = read_contributions(y, g.n())?;
    Ok((g, y))
}

fn analyze_cmd(sub: AnalyzeCommand) -> CliResult<()> {
    match sub {
        AnalyzeCommand::Bound {
            graph,
            y,
            p,
            horizon,
            out,
        } => {
            let (g, yv) = load_pair(&graph, &y)?;
            let report = check_cc_bound(&g, p, horizon, yv.values())?;
            let inputs = Inputs {
                graph: &graph,
                y: &y,
                p,
                horizon,
            };
            write_output(out.as_deref(), &to_json(&json!({ "inputs": inputs, "report": report })))
        }
        AnalyzeCommand::Perturb {
            graph,
            y,
            delta,
            p,
            horizon,
            out,
        } => {
            let (g, yv) = load_pair(&graph, &y)?;
            let dy = read_contributions(&delta, g.n())?;
            let shifted: Vec<f64> = yv.values().iter().zip(dy.values()).map(|(a, b)| a + b).collect();
            let before = contextual_homogeneous(&g, p, horizon, yv.values())?.scores;
            let after = contextual_homogeneous(&g, p, horizon, &shifted)?.scores;
            let change = before.iter().zip(&after).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt();
            let bound = perturbation_bound(&g, p, horizon, dy.values())?;
            let inputs = Inputs {
                graph: &graph,
                y: &y,
                p,
                horizon,
            };
            let report = json!({
                "inputs": inputs,
                "delta": delta,
                "cc_change_norm": change,
                "bound": bound,
                "satisfied": change <= bound * (1.0 + 1e-9) + 1e-12,
            });
            write_output(out.as_deref(), &to_json(&report))
        }
        AnalyzeCommand::Correlation { x, y, kind, out } => {
            let xs = read_vector(&x)?;
            let ys = read_vector(&y)?;
            let (k, name) = match kind {
                CorrelationArg::Pearson => (CorrelationKind::Pearson, "pearson"),
                CorrelationArg::Spearman => (CorrelationKind::Spearman, "spearman"),
            };
            let value = correlation(&xs, &ys, k)?;
            let report = json!({ "x": x, "y": y, "kind": name, "n": xs.len(), "correlation": value });
            write_output(out.as_deref(), &to_json(&report))
        }
        AnalyzeCommand::Regression {
            data,
            dependent,
            runs,
            seed,
            out,
        } => {
            let seed = if runs > 0 {
                require_seed(seed, "a bootstrapped regression")?
            } else {
                seed.unwrap_or(0)
            };
            let table = read_regression_csv(read_input(&data)?.as_bytes(), &dependent)?;
            let fit = ols_fit(&table.x, &table.y, runs, seed)?;
            let report = json!({
                "data": data,
                "dependent": dependent,
                "seed": seed,
                "regressors": table.names,
                "fit": fit,
            });
            write_output(out.as_deref(), &to_json(&report))
        }
        AnalyzeCommand::Threshold { config, seed, out } => {
            let seed = require_seed(seed, "threshold")?;
            let cfg: ThresholdConfig = study_config(read_json(&config)?, &config, seed)?;
            write_output(out.as_deref(), &to_json(&run_viral_threshold_scan(&cfg)?))
        }
    }
}
