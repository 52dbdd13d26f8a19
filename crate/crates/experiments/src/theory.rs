//! Desk checks on Erdős-Rényi graphs: the expected contextual centrality
//! at short horizons and the growth of |CC| across the viral threshold
//! `T* = ln n / ln(npq)`.

use ctxcent::centrality::{contextual_homogeneous, geometric_sum};
use ctxcent::metrics::{correlation, CorrelationKind};
use ctxcent::netgen::{generate, sample_contributions, ContributionSpec, GenSpec, GraphModel};
use ctxcent::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::common::seed_path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErCheckConfig {
    pub n: usize,
    pub q: f64,
    pub p: f64,
    pub horizon: usize,
    pub contributions: ContributionSpec,
    pub samples: usize,
    #[serde(default)]
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErCheckReport {
    pub config: ErCheckConfig,
    pub npq: f64,
    /// `Σ_{t=0}^{T} (npq)^t`.
    pub walk_factor: f64,
    pub y_mean: f64,
    pub expected_mean: f64,
    pub empirical_mean: f64,
    pub relative_deviation: f64,
    /// Pearson correlation across nodes of the sample-averaged CC with `y`.
    pub correlation_with_y: Option<f64>,
    pub warnings: Vec<String>,
}

fn er(n: usize, q: f64, seed: u64) -> Result<ctxcent::Graph> {
    generate(&GenSpec {
        model: GraphModel::ErdosRenyi { n, q },
        rng_seed: seed,
    })
}

/// Averages CC over ER draws with one fixed contribution vector and
/// compares the node-average against `ȳ·Σ_t (npq)^t`.
pub fn run_er_expectation_check(cfg: &ErCheckConfig) -> Result<ErCheckReport> {
    let nq = cfg.n as f64 * cfg.q;
    if cfg.samples == 0 {
        return Err(Error::Validation("samples must be at least 1".into()));
    }
    if cfg.horizon as f64 > 0.1 * nq {
        return Err(Error::Validation(format!(
            "horizon {} exceeds 0.1·nq = {:.3}; the expectation formula needs T ≪ nq",
            cfg.horizon,
            0.1 * nq
        )));
    }
    let mut warnings = Vec::new();
    let ln_n = (cfg.n as f64).ln();
    if !(ln_n <= nq && nq <= (cfg.n as f64).sqrt()) {
        let w = format!("nq = {nq:.3} is outside [ln n, √n] = [{ln_n:.3}, {:.3}]", (cfg.n as f64).sqrt());
        log::warn!("{w}");
        warnings.push(w);
    }
    let y = sample_contributions(cfg.n, &cfg.contributions, seed_path(cfg.master_seed, &[1]), None)?;
    let sums: Vec<Vec<f64>> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let g = er(cfg.n, cfg.q, seed_path(cfg.master_seed, &[2, s as u64]))?;
            Ok(contextual_homogeneous(&g, cfg.p, cfg.horizon, y.values())?.scores)
        })
        .collect::<Result<_>>()?;
    let mut node_mean = vec![0.0; cfg.n];
    for cc in &sums {
        for (m, v) in node_mean.iter_mut().zip(cc) {
            *m += v;
        }
    }
    node_mean.iter_mut().for_each(|m| *m /= cfg.samples as f64);
    let empirical_mean = node_mean.iter().sum::<f64>() / cfg.n as f64;
    let npq = nq * cfg.p;
    let walk_factor = geometric_sum(npq, cfg.horizon)?;
    let expected_mean = y.mean() * walk_factor;
    let relative_deviation = if expected_mean == 0.0 {
        empirical_mean.abs()
    } else {
        (empirical_mean - expected_mean).abs() / expected_mean.abs()
    };
    Ok(ErCheckReport {
        config: cfg.clone(),
        npq,
        walk_factor,
        y_mean: y.mean(),
        expected_mean,
        empirical_mean,
        relative_deviation,
        correlation_with_y: correlation(&node_mean, y.values(), CorrelationKind::Pearson).ok(),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub n: usize,
    pub q: f64,
    pub p: f64,
    pub horizons: Vec<usize>,
    pub contributions: ContributionSpec,
    pub samples: usize,
    #[serde(default)]
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub horizon: usize,
    pub mean_abs_cc: f64,
    pub mean_abs_cc_over_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub config: ThresholdConfig,
    pub npq: f64,
    pub t_star: f64,
    pub points: Vec<ThresholdPoint>,
    /// Largest grid horizon ≤ T*/2.
    pub t_low: Option<usize>,
    /// Smallest grid horizon ≥ 1.5·T*.
    pub t_high: Option<usize>,
    /// Mean |CC| at `t_high` over mean |CC| at `t_low`.
    pub growth_ratio: Option<f64>,
}

pub fn run_viral_threshold_scan(cfg: &ThresholdConfig) -> Result<ThresholdReport> {
    let npq = cfg.n as f64 * cfg.p * cfg.q;
    if npq < 1.1 {
        return Err(Error::Validation(format!("viral scan needs npq ≥ 1.1, got {npq:.3}")));
    }
    if cfg.samples == 0 || cfg.horizons.is_empty() {
        return Err(Error::Validation("viral scan needs samples ≥ 1 and a horizon grid".into()));
    }
    if cfg.horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("horizons must be strictly increasing".into()));
    }
    let per_sample: Vec<Vec<f64>> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let g = er(cfg.n, cfg.q, seed_path(cfg.master_seed, &[1, s as u64]))?;
            let y = sample_contributions(cfg.n, &cfg.contributions, seed_path(cfg.master_seed, &[2, s as u64]), None)?;
            if y.mean() == 0.0 {
                return Err(Error::Validation("viral scan needs contributions with non-zero mean".into()));
            }
            cfg.horizons
                .iter()
                .map(|&t| {
                    let cc = contextual_homogeneous(&g, cfg.p, t, y.values())?.scores;
                    Ok(cc.iter().map(|v| v.abs()).sum::<f64>() / cfg.n as f64)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let points: Vec<ThresholdPoint> = cfg
        .horizons
        .iter()
        .enumerate()
        .map(|(i, &horizon)| {
            let mean_abs_cc = per_sample.iter().map(|v| v[i]).sum::<f64>() / cfg.samples as f64;
            ThresholdPoint {
                horizon,
                mean_abs_cc,
                mean_abs_cc_over_n: mean_abs_cc / cfg.n as f64,
            }
        })
        .collect();
    let t_star = (cfg.n as f64).ln() / npq.ln();
    let t_low = cfg.horizons.iter().copied().filter(|&t| t as f64 <= t_star / 2.0).max();
    let t_high = cfg.horizons.iter().copied().find(|&t| t as f64 >= 1.5 * t_star);
    let at = |t: usize| points.iter().find(|pt| pt.horizon == t).unwrap().mean_abs_cc;
    let growth_ratio = t_low.zip(t_high).map(|(lo, hi)| at(hi) / at(lo));
    Ok(ThresholdReport {
        config: cfg.clone(),
        npq,
        t_star,
        points,
        t_low,
        t_high,
        growth_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ctxcent::netgen::ContributionDistribution;

    fn normal(mean: f64) -> ContributionSpec {
        ContributionSpec {
            distribution: ContributionDistribution::Normal { mean, std: 1.0 },
            adversarial_redistribute: false,
        }
    }

    #[test]
    fn zero_rate_is_identity() {
        let cfg = ErCheckConfig {
            n: 100,
            q: 0.2,
            p: 0.0,
            horizon: 2,
            contributions: normal(0.7),
            samples: 5,
            master_seed: 1,
        };
        let r = run_er_expectation_check(&cfg).unwrap();
        assert_eq!(r.walk_factor, 1.0);
        assert!((r.empirical_mean - r.y_mean).abs() < 1e-12);
        assert!((r.correlation_with_y.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn horizon_guard_and_warning() {
        let mut cfg = ErCheckConfig {
            n: 400,
            q: 0.05,
            p: 0.02,
            horizon: 3,
            contributions: normal(1.0),
            samples: 2,
            master_seed: 1,
        };
        assert!(run_er_expectation_check(&cfg).is_err());
        cfg.horizon = 2;
        assert!(run_er_expectation_check(&cfg).unwrap().warnings.is_empty());
        cfg.q = 0.2;
        cfg.horizon = 1;
        assert_eq!(run_er_expectation_check(&cfg).unwrap().warnings.len(), 1);
    }

    #[test]
    fn threshold_grid_selection() {
        let cfg = ThresholdConfig {
            n: 200,
            q: 0.05,
            p: 0.4,
            horizons: vec![1, 2, 3, 4, 6, 8],
            contributions: normal(1.0),
            samples: 3,
            master_seed: 2,
        };
        let r = run_viral_threshold_scan(&cfg).unwrap();
        // npq = 4, T* = ln 200 / ln 4 ≈ 3.82.
        assert!((r.t_star - 200f64.ln() / 4f64.ln()).abs() < 1e-12);
        assert_eq!(r.t_low, Some(1));
        assert_eq!(r.t_high, Some(6));
        assert!(r.points.windows(2).all(|w| w[0].mean_abs_cc < w[1].mean_abs_cc));
        let bad = ThresholdConfig { p: 0.01, ..cfg };
        assert!(run_viral_threshold_scan(&bad).is_err());
    }
}
