//! Scalar diagnostics, norm bounds and correlation utilities.

use serde::{Deserialize, Serialize};

use crate::centrality::{contextual_homogeneous, geometric_sum};
use crate::contribution::ContributionVector;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{dot, leading_eigenpair_default};

/// Largest graph for which `cc_noise_std` materializes the walk matrix.
pub const NOISE_MAX_NODES: usize = 2000;

const BOUND_TOL: f64 = 1e-9;

/// `(a − b)/max(|a|, |b|)`, defined as 0 when both are 0.
pub fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b) / scale
    }
}

/// `Σ_{i,j} A_ij (y_i − y_j)²` over ordered pairs.
pub fn homophily_strength(g: &Graph, y: &ContributionVector) -> Result<f64> {
    g.check_len(y.len())?;
    let y = y.values();
    Ok(2.0 * g.edges().map(|(u, v)| (y[u] - y[v]).powi(2)).sum::<f64>())
}

/// `ȳ/σ(y)` with the population standard deviation.
pub fn standardized_avg_contribution(y: &ContributionVector) -> Result<f64> {
    if y.std() == 0.0 {
        return Err(Error::Degenerate("contribution vector has zero variance".into()));
    }
    Ok(y.mean() / y.std())
}

/// `u1ᵀy`.
pub fn primary_contribution(u1: &[f64], y: &ContributionVector) -> Result<f64> {
    if u1.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: u1.len(),
        });
    }
    Ok(dot(u1, y.values()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub max_cc: f64,
    pub norm_cc: f64,
    pub series_bound: f64,
    pub infinite_bound: Option<f64>,
    pub satisfied: bool,
}

fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `Σ_{t=0}^{T} (pλ1)^t`.
fn series_factor(g: &Graph, p: f64, horizon: usize) -> Result<f64> {
    let lambda1 = leading_eigenpair_default(g)?.lambda1;
    geometric_sum(p * lambda1, horizon)
}

/// Compares `max CC` and `||CC||₂` against `(Σ_t (pλ1)^t)·||y||₂`.
pub fn check_cc_bound(g: &Graph, p: f64, horizon: usize, y: &[f64]) -> Result<BoundReport> {
    let cc = contextual_homogeneous(g, p, horizon, y)?.scores;
    let lambda1 = leading_eigenpair_default(g)?.lambda1;
    let ratio = p * lambda1;
    let y_norm = l2(y);
    let max_cc = cc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm_cc = l2(&cc);
    let series_bound = geometric_sum(ratio, horizon)? * y_norm;
    let infinite_bound = (ratio < 1.0).then(|| y_norm / (1.0 - ratio));
    let satisfied = max_cc <= norm_cc + BOUND_TOL && norm_cc <= series_bound * (1.0 + BOUND_TOL);
    Ok(BoundReport {
        max_cc,
        norm_cc,
        series_bound,
        infinite_bound,
        satisfied,
    })
}

/// `(Σ_t (pλ1)^t)·||Δy||₂`, an upper bound on `||CC(y + Δy) − CC(y)||₂`.
pub fn perturbation_bound(g: &Graph, p: f64, horizon: usize, delta_y: &[f64]) -> Result<f64> {
    g.check_len(delta_y.len())?;
    Ok(series_factor(g, p, horizon)? * l2(delta_y))
}

/// Per-node standard deviation of CC when `y` is iid noise with standard
/// deviation `sigma`: `σ·||B e_i||₂` with `B = Σ_{t=0}^{T} (pA)^t`.
pub fn cc_noise_std(g: &Graph, p: f64, horizon: usize, sigma: f64) -> Result<Vec<f64>> {
    if g.n() > NOISE_MAX_NODES {
        return Err(Error::TooLarge(format!(
            "noise analysis is capped at {NOISE_MAX_NODES} nodes, graph has {}",
            g.n()
        )));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Validation(format!("sigma must be non-negative, got {sigma}")));
    }
    let mut e = vec![0.0; g.n()];
    (0..g.n())
        .map(|i| {
            e[i] = 1.0;
            let col = contextual_homogeneous(g, p, horizon, &e)?.scores;
            e[i] = 0.0;
            Ok(sigma * l2(&col))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Pearson,
    Spearman,
}

pub fn correlation(x: &[f64], y: &[f64], kind: CorrelationKind) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::Validation(format!("correlation needs at least 3 points, got {}", x.len())));
    }
    if let Some(i) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("non-finite value at position {}", i % x.len())));
    }
    for (name, v) in [("x", x), ("y", y)] {
        if v.iter().all(|&a| a == v[0]) {
            return Err(Error::Degenerate(format!("undefined correlation: {name} has zero variance")));
        }
    }
    Ok(match kind {
        CorrelationKind::Pearson => pearson(x, y),
        CorrelationKind::Spearman => pearson(&average_ranks(x), &average_ranks(y)),
    })
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}
