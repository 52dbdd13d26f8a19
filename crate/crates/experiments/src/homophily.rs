//! Regression of the maximum contextual centrality on homophily strength,
//! split by graph model and the sign of ȳ/σ, below the epidemic threshold.

use ctxcent::centrality::{contextual_homogeneous, DEFAULT_HORIZON};
use ctxcent::metrics::homophily_strength;
use ctxcent::netgen::ModelKind;
use ctxcent::regression::{ols_fit, RegressionResult, DEFAULT_BOOTSTRAP_RUNS};
use ctxcent::{ContributionVector, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::common::{draw_graph, seed_path, standardized_normal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomophilyConfig {
    pub graph_models: Vec<ModelKind>,
    /// All below 1.
    pub spreadability_values: Vec<f64>,
    pub std_avg_contribution_values: Vec<f64>,
    pub runs_per_cell: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_runs: usize,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}
fn default_bootstrap() -> usize {
    DEFAULT_BOOTSTRAP_RUNS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of(v: f64) -> Self {
        if v < 0.0 {
            Self::Negative
        } else if v > 0.0 {
            Self::Positive
        } else {
            Self::Zero
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomophilySplit {
    pub model: ModelKind,
    pub sign: Sign,
    /// Regressor names, aligned with the fit's coefficients. Controls that
    /// are constant within the split are dropped.
    pub regressors: Vec<String>,
    pub fit: RegressionResult,
    pub homophily_coefficient: f64,
    pub homophily_ci: (f64, f64),
}

struct Row {
    max_cc: f64,
    homophily: f64,
    std_avg: f64,
    spreadability: f64,
}

pub fn run_homophily_regression(cfg: &HomophilyConfig) -> Result<Vec<HomophilySplit>> {
    if cfg.spreadability_values.iter().any(|s| !(*s >= 0.0 && *s < 1.0)) {
        return Err(Error::Validation("homophily regression needs every spreadability in [0, 1)".into()));
    }
    if cfg.graph_models.is_empty()
        || cfg.spreadability_values.is_empty()
        || cfg.std_avg_contribution_values.is_empty()
        || cfg.runs_per_cell == 0
    {
        return Err(Error::Validation(
            "homophily regression needs models, both grids and runs_per_cell ≥ 1".into(),
        ));
    }
    let ns = cfg.spreadability_values.len();
    let nt = cfg.std_avg_contribution_values.len();
    let items: Vec<(usize, usize, usize, usize)> = (0..cfg.graph_models.len())
        .flat_map(|m| (0..ns).flat_map(move |s| (0..nt).flat_map(move |t| (0..cfg.runs_per_cell).map(move |r| (m, s, t, r)))))
        .collect();
    let rows: Vec<Row> = items
        .par_iter()
        .map(|&(m, si, ti, r)| {
            let key = [m as u64, si as u64, ti as u64, r as u64];
            let draw = draw_graph(cfg.graph_models[m], seed_path(cfg.master_seed, &[&[1], &key[..]].concat()))?;
            let g = &draw.graph;
            let s = cfg.spreadability_values[si];
            let target = cfg.std_avg_contribution_values[ti];
            let p = if s == 0.0 { 0.0 } else { s / draw.spectral.lambda1 };
            let z = standardized_normal(g.n(), seed_path(cfg.master_seed, &[&[2], &key[..]].concat()));
            let y = ContributionVector::new(z.iter().map(|v| v + target).collect())?;
            let cc = contextual_homogeneous(g, p, cfg.horizon, y.values())?.scores;
            Ok(Row {
                max_cc: cc.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                homophily: homophily_strength(g, &y)?,
                std_avg: target,
                spreadability: s,
            })
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    for (m, &model) in cfg.graph_models.iter().enumerate() {
        for sign in [Sign::Negative, Sign::Zero, Sign::Positive] {
            let split: Vec<&Row> = items
                .iter()
                .zip(&rows)
                .filter(|((mi, ..), row)| *mi == m && Sign::of(row.std_avg) == sign)
                .map(|(_, row)| row)
                .collect();
            if split.is_empty() {
                continue;
            }
            let varies = |f: fn(&Row) -> f64| split.iter().any(|r| f(r) != f(split[0]));
            let mut regressors = vec!["intercept".to_owned(), "homophily".to_owned()];
            let with_std_avg = varies(|r| r.std_avg);
            let with_spread = varies(|r| r.spreadability);
            if with_std_avg {
                regressors.push("std_avg_contribution".into());
            }
            if with_spread {
                regressors.push("spreadability".into());
            }
            let x: Vec<Vec<f64>> = split
                .iter()
                .map(|r| {
                    let mut row = vec![1.0, r.homophily];
                    if with_std_avg {
                        row.push(r.std_avg);
                    }
                    if with_spread {
                        row.push(r.spreadability);
                    }
                    row
                })
                .collect();
            if x.len() <= regressors.len() {
                return Err(Error::Validation(format!(
                    "{} / {sign:?} split has {} rows for {} regressors",
                    model.name(),
                    x.len(),
                    regressors.len()
                )));
            }
            let ydep: Vec<f64> = split.iter().map(|r| r.max_cc).collect();
            let fit = ols_fit(&x, &ydep, cfg.bootstrap_runs, seed_path(cfg.master_seed, &[3, m as u64, sign as u64]))?;
            out.push(HomophilySplit {
                model,
                sign,
                regressors,
                homophily_coefficient: fit.coefficients[1],
                homophily_ci: fit.coefficient_ci(1),
                fit,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> HomophilyConfig {
        HomophilyConfig {
            graph_models: vec![ModelKind::ErdosRenyi, ModelKind::WattsStrogatz],
            spreadability_values: vec![0.25, 0.75],
            std_avg_contribution_values: vec![-1.0, 0.0, 1.0],
            runs_per_cell: 4,
            horizon: 16,
            bootstrap_runs: 50,
            master_seed: 8,
        }
    }

    #[test]
    fn splits_and_dropped_controls() {
        let res = run_homophily_regression(&cfg()).unwrap();
        assert_eq!(res.len(), 6);
        for s in &res {
            assert_eq!(s.regressors, ["intercept", "homophily", "spreadability"]);
            assert_eq!(s.fit.observations, 8);
            assert!(s.homophily_ci.0 <= s.homophily_coefficient && s.homophily_coefficient <= s.homophily_ci.1);
        }
    }

    #[test]
    fn rejects_supercritical_and_tiny_splits() {
        let mut c = cfg();
        c.spreadability_values = vec![1.5];
        assert!(run_homophily_regression(&c).is_err());
        let mut c = cfg();
        c.runs_per_cell = 1;
        c.spreadability_values = vec![0.5];
        assert!(run_homophily_regression(&c).is_err());
    }
}
