//! Correlation across nodes between contextual centrality and the Monte
//! Carlo cascade payoff of seeding each node, as a function of
//! spreadability.

use ctxcent::cascade::estimate_payoffs_all_seeds;
use ctxcent::centrality::{contextual_homogeneous, DEFAULT_HORIZON};
use ctxcent::metrics::{correlation, CorrelationKind};
use ctxcent::netgen::{sample_contributions, ContributionSpec, GraphModel};
use ctxcent::{EdgeProbabilities, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::common::{draw_model, seed_path};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationConfig {
    /// Template network; each graph is a fresh draw with a derived seed.
    pub graph: GraphModel,
    pub graphs: usize,
    pub spreadability_values: Vec<f64>,
    #[serde(default = "ContributionSpec::standard_normal")]
    pub contributions: ContributionSpec,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Percolation samples per (graph, spreadability).
    pub mc_runs: usize,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

impl CorrelationConfig {
    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        let mut problems = Vec::new();
        if self.graphs == 0 {
            problems.push("graphs: must be at least 1");
        }
        if self.mc_runs == 0 {
            problems.push("mc_runs: must be at least 1");
        }
        if self.spreadability_values.is_empty()
            || self.spreadability_values.iter().any(|s| !(s.is_finite() && *s >= 0.0))
        {
            problems.push("spreadability_values: must be a non-empty list of non-negative numbers");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(format!("invalid correlation config: {}", problems.join("; "))))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub spreadability: f64,
    /// Averages over the graphs where the correlation was defined.
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub graphs: usize,
    /// Graphs skipped because `p > 1` or a vector had zero variance.
    pub missing: usize,
}

pub fn run_payoff_correlation(cfg: &CorrelationConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let ns = cfg.spreadability_values.len();
    let per_graph: Vec<Vec<Option<(f64, f64)>>> = (0..cfg.graphs)
        .into_par_iter()
        .map(|gi| {
            let draw = draw_model(cfg.graph.clone(), seed_path(cfg.master_seed, &[1, gi as u64]))?;
            let g = &draw.graph;
            let y = sample_contributions(
                g.n(),
                &cfg.contributions,
                seed_path(cfg.master_seed, &[2, gi as u64]),
                Some(&draw.spectral.u1),
            )?;
            let lambda1 = draw.spectral.lambda1;
            let mut out = Vec::with_capacity(ns);
            for (si, &s) in cfg.spreadability_values.iter().enumerate() {
                let p = if s == 0.0 { 0.0 } else { s / lambda1 };
                if !(p <= 1.0) {
                    out.push(None);
                    continue;
                }
                let cc = contextual_homogeneous(g, p, cfg.horizon, y.values())?.scores;
                let payoff: Vec<f64> = estimate_payoffs_all_seeds(
                    g,
                    &EdgeProbabilities::Homogeneous(p),
                    y.values(),
                    cfg.mc_runs,
                    seed_path(cfg.master_seed, &[3, gi as u64, si as u64]),
                )?
                .iter()
                .map(|e| e.mean)
                .collect();
                let pair = correlation(&cc, &payoff, CorrelationKind::Pearson)
                    .and_then(|r| Ok((r, correlation(&cc, &payoff, CorrelationKind::Spearman)?)));
                match pair {
                    Ok(v) => out.push(Some(v)),
                    Err(Error::Degenerate(_)) => out.push(None),
                    Err(e) => return Err(e),
                }
            }
            log::info!("correlation: graph {}/{} done", gi + 1, cfg.graphs);
            Ok(out)
        })
        .collect::<Result<_>>()?;

    Ok(cfg
        .spreadability_values
        .iter()
        .enumerate()
        .map(|(si, &s)| {
            let vals: Vec<(f64, f64)> = per_graph.iter().filter_map(|v| v[si]).collect();
            let k = vals.len();
            let avg = |f: fn(&(f64, f64)) -> f64| (k > 0).then(|| vals.iter().map(f).sum::<f64>() / k as f64);
            CurvePoint {
                spreadability: s,
                pearson: avg(|v| v.0),
                spearman: avg(|v| v.1),
                graphs: k,
                missing: cfg.graphs - k,
            }
        })
        .collect())
}

/// Index of an interior local minimum of `values` (strictly below both
/// neighbours' minimum over plateaus), if any.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .collect()
}

pub fn curve_to_csv(curve: &[CurvePoint]) -> String {
    let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("spreadability,pearson,spearman,graphs,missing\n");
    for c in curve {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.spreadability,
            f(c.pearson),
            f(c.spearman),
            c.graphs,
            c.missing
        ));
    }
    out
}
