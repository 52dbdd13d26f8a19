//! Node rankings: degree, eigenvector, Katz, diffusion and contextual
//! centrality, plus the leading-eigenvector approximation of contextual
//! centrality, its mean/spread decomposition, primary-contribution adjusted
//! variants, the generic linear recurrence and the network-game equilibrium.
//!
//! Every walk-counting series is accumulated by repeated sparse products, so
//! a horizon-`T` score costs `O(|edges|·T)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::contribution::ContributionVector;
use crate::error::{Error, Result};
use crate::graph::{EdgeProbabilities, Graph};
use crate::spectral::{dot, leading_eigenpair_default, SpectralInfo};

/// Sup-norm increment at which the Katz and equilibrium fixed points stop.
pub const FIXED_POINT_TOL: f64 = 1e-10;
const FIXED_POINT_MAX_ITER: usize = 1_000_000;

/// Decay used for Katz when none is given, relative to `1/λ1`.
pub const KATZ_DEFAULT_FRACTION: f64 = 0.9;

/// Communication horizon used by diffusion and contextual centrality unless
/// overridden.
pub const DEFAULT_HORIZON: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Degree,
    Eigenvector,
    Katz,
    Diffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralityKind {
    Degree,
    Eigenvector,
    Katz,
    Diffusion,
    Contextual,
    CcApprox,
    Adjusted(BaseKind),
    Recurrence,
}

impl From<BaseKind> for CentralityKind {
    fn from(b: BaseKind) -> Self {
        match b {
            BaseKind::Degree => Self::Degree,
            BaseKind::Eigenvector => Self::Eigenvector,
            BaseKind::Katz => Self::Katz,
            BaseKind::Diffusion => Self::Diffusion,
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Degree => "degree",
            Self::Eigenvector => "eigenvector",
            Self::Katz => "katz",
            Self::Diffusion => "diffusion",
        })
    }
}

impl fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Degree => f.write_str("degree"),
            Self::Eigenvector => f.write_str("eigenvector"),
            Self::Katz => f.write_str("katz"),
            Self::Diffusion => f.write_str("diffusion"),
            Self::Contextual => f.write_str("contextual"),
            Self::CcApprox => f.write_str("cc_approx"),
            Self::Adjusted(b) => write!(f, "{b}_adjusted"),
            Self::Recurrence => f.write_str("recurrence"),
        }
    }
}

/// Parameters that produced a score vector; unused ones stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CentralityParams {
    pub p: Option<f64>,
    pub horizon: Option<usize>,
    pub alpha: Option<f64>,
    pub includes_t0: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityResult {
    pub kind: CentralityKind,
    pub scores: Vec<f64>,
    pub params: CentralityParams,
}

impl CentralityResult {
    fn new(kind: CentralityKind, scores: Vec<f64>, params: CentralityParams) -> Self {
        debug_assert!(scores.iter().all(|s| s.is_finite()));
        Self {
            kind,
            scores,
            params,
        }
    }

    /// Highest-scoring node, lowest index on ties.
    pub fn top_node(&self) -> Option<usize> {
        argmax(&self.scores)
    }
}

/// Index of the maximum, lowest index on ties. `None` for an empty slice.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        match best {
            Some(b) if s <= scores[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

/// `d/(n−1)`.
pub fn degree_centrality(g: &Graph) -> Result<CentralityResult> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Validation(format!(
            "degree centrality needs at least 2 nodes, got {n}"
        )));
    }
    let denom = (n - 1) as f64;
    let scores = g.degrees().into_iter().map(|d| d as f64 / denom).collect();
    Ok(CentralityResult::new(
        CentralityKind::Degree,
        scores,
        CentralityParams::default(),
    ))
}

pub fn eigenvector_centrality(g: &Graph) -> Result<CentralityResult> {
    if g.num_edges() == 0 {
        return Err(Error::Edgeless("eigenvector centrality"));
    }
    Ok(eigenvector_from(&leading_eigenpair_default(g)?))
}

pub fn eigenvector_from(spec: &SpectralInfo) -> CentralityResult {
    CentralityResult::new(
        CentralityKind::Eigenvector,
        spec.u1.clone(),
        CentralityParams::default(),
    )
}

/// `0.9/λ1`; zero for an edgeless graph where any decay gives all-ones.
pub fn katz_default_alpha(lambda1: f64) -> f64 {
    if lambda1 > 0.0 {
        KATZ_DEFAULT_FRACTION / lambda1
    } else {
        0.0
    }
}

/// `Σ_{t≥0} (αA)^t·1`. Computes `λ1` to check convergence first.
pub fn katz_centrality(g: &Graph, alpha: f64) -> Result<CentralityResult> {
    let spec = leading_eigenpair_default(g)?;
    katz_with(g, alpha, spec.lambda1)
}

/// Katz centrality given a precomputed `λ1`.
pub fn katz_with(g: &Graph, alpha: f64, lambda1: f64) -> Result<CentralityResult> {
    if alpha < 0.0 {
        return Err(Error::Validation(format!("Katz decay must be nonnegative, got {alpha}")));
    }
    if alpha * lambda1 >= 1.0 {
        return Err(Error::Divergence(format!(
            "Katz decay {alpha} with λ1 = {lambda1} gives αλ1 ≥ 1"
        )));
    }
    let ones = vec![1.0; g.n()];
    let scores = fixed_point(g, alpha, &ones)?;
    Ok(CentralityResult::new(
        CentralityKind::Katz,
        scores,
        CentralityParams {
            alpha: Some(alpha),
            ..Default::default()
        },
    ))
}

/// Iterates `x ← αA·x + b` from `x = b` until the sup-norm step is tiny.
fn fixed_point(g: &Graph, alpha: f64, b: &[f64]) -> Result<Vec<f64>> {
    let n = g.n();
    let mut x = b.to_vec();
    let mut ax = vec![0.0; n];
    for iter in 1..=FIXED_POINT_MAX_ITER {
        g.matvec_into(&x, &mut ax);
        let mut step = 0.0f64;
        for i in 0..n {
            let next = alpha * ax[i] + b[i];
            step = step.max((next - x[i]).abs());
            x[i] = next;
        }
        if !step.is_finite() {
            return Err(Error::Overflow { step: iter });
        }
        if step <= FIXED_POINT_TOL {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        iterations: FIXED_POINT_MAX_ITER,
        residual: f64::NAN,
    })
}

/// Accumulates `Σ_{t=from}^{horizon} M^t·start` where `step(x, out)` writes
/// `M·x`. Any non-finite partial sum is an overflow error.
fn walk_series<F>(start: &[f64], from: usize, horizon: usize, mut step: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = start.len();
    let mut term = start.to_vec();
    let mut next = vec![0.0; n];
    let mut acc = if from == 0 { start.to_vec() } else { vec![0.0; n] };
    for t in 1..=horizon {
        step(&term, &mut next);
        std::mem::swap(&mut term, &mut next);
        if t >= from {
            for (a, v) in acc.iter_mut().zip(&term) {
                *a += v;
            }
        }
        if acc.iter().any(|a| !a.is_finite()) {
            return Err(Error::Overflow { step: t });
        }
    }
    Ok(acc)
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("diffusion probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// `Σ_{t=t₀}^{T} (pA)^t·1` with `t₀ = 0` when `includes_t0`, else 1.
pub fn diffusion_centrality(
    g: &Graph,
    p: f64,
    horizon: usize,
    includes_t0: bool,
) -> Result<CentralityResult> {
    check_p(p)?;
    if horizon == 0 {
        return Err(Error::Validation("diffusion centrality needs T ≥ 1".into()));
    }
    let ones = vec![1.0; g.n()];
    let from = if includes_t0 { 0 } else { 1 };
    let scores = walk_series(&ones, from, horizon, |x, out| {
        g.matvec_into(x, out);
        out.iter_mut().for_each(|v| *v *= p);
    })?;
    Ok(CentralityResult::new(
        CentralityKind::Diffusion,
        scores,
        CentralityParams {
            p: Some(p),
            horizon: Some(horizon),
            includes_t0: Some(includes_t0),
            ..Default::default()
        },
    ))
}

/// `Σ_{t=0}^{T} (P∘A)^t·y`.
pub fn contextual_centrality(
    g: &Graph,
    probs: &EdgeProbabilities,
    horizon: usize,
    y: &[f64],
) -> Result<CentralityResult> {
    g.check_len(y.len())?;
    probs.check(g)?;
    if let EdgeProbabilities::Homogeneous(p) = probs {
        check_p(*p)?;
    }
    let scores = walk_series(y, 0, horizon, |x, out| probs.weighted_matvec_into(g, x, out))?;
    let p = match probs {
        EdgeProbabilities::Homogeneous(p) => Some(*p),
        EdgeProbabilities::PerEdge(_) => None,
    };
    Ok(CentralityResult::new(
        CentralityKind::Contextual,
        scores,
        CentralityParams {
            p,
            horizon: Some(horizon),
            includes_t0: Some(true),
            ..Default::default()
        },
    ))
}

/// Contextual centrality with a homogeneous diffusion rate.
pub fn contextual_homogeneous(g: &Graph, p: f64, horizon: usize, y: &[f64]) -> Result<CentralityResult> {
    contextual_centrality(g, &EdgeProbabilities::Homogeneous(p), horizon, y)
}

/// `Σ_{t=0}^{T} r^t`, with an overflow check.
pub fn geometric_sum(ratio: f64, horizon: usize) -> Result<f64> {
    let mut term = 1.0;
    let mut acc = 1.0;
    for t in 1..=horizon {
        term *= ratio;
        acc += term;
        if !acc.is_finite() {
            return Err(Error::Overflow { step: t });
        }
    }
    Ok(acc)
}

/// `(Σ_{t=0}^{T} (pλ1)^t · u1ᵀy)·u1`.
pub fn cc_approx(g: &Graph, p: f64, horizon: usize, y: &[f64]) -> Result<CentralityResult> {
    if g.num_edges() == 0 {
        return Err(Error::Edgeless("CC approximation"));
    }
    g.check_len(y.len())?;
    cc_approx_with(&leading_eigenpair_default(g)?, p, horizon, y)
}

pub fn cc_approx_with(spec: &SpectralInfo, p: f64, horizon: usize, y: &[f64]) -> Result<CentralityResult> {
    check_p(p)?;
    if spec.u1.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.u1.len(),
            got: y.len(),
        });
    }
    let scale = geometric_sum(p * spec.lambda1, horizon)? * dot(&spec.u1, y);
    let scores: Vec<f64> = spec.u1.iter().map(|u| scale * u).collect();
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Overflow { step: horizon });
    }
    Ok(CentralityResult::new(
        CentralityKind::CcApprox,
        scores,
        CentralityParams {
            p: Some(p),
            horizon: Some(horizon),
            includes_t0: Some(true),
            ..Default::default()
        },
    ))
}

/// Contextual centrality split into a structural part `ȳ·DC` (with the
/// `t = 0` term) and a contextual part `σ(y)·CC(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcDecomposition {
    pub structural: Vec<f64>,
    pub contextual: Vec<f64>,
}

impl CcDecomposition {
    pub fn total(&self) -> Vec<f64> {
        self.structural
            .iter()
            .zip(&self.contextual)
            .map(|(a, b)| a + b)
            .collect()
    }
}

pub fn decompose_cc(g: &Graph, p: f64, horizon: usize, y: &ContributionVector) -> Result<CcDecomposition> {
    g.check_len(y.len())?;
    check_p(p)?;
    let ones = vec![1.0; g.n()];
    let step = |x: &[f64], out: &mut [f64]| {
        g.matvec_into(x, out);
        out.iter_mut().for_each(|v| *v *= p);
    };
    let dc = walk_series(&ones, 0, horizon, step)?;
    let cz = walk_series(y.zscores(), 0, horizon, step)?;
    Ok(CcDecomposition {
        structural: dc.iter().map(|v| y.mean() * v).collect(),
        contextual: cz.iter().map(|v| y.std() * v).collect(),
    })
}

/// Scales a baseline ranking by the primary contribution `u1ᵀy`.
pub fn adjusted_centrality(base: &CentralityResult, g: &Graph, y: &[f64]) -> Result<CentralityResult> {
    g.check_len(y.len())?;
    let spec = leading_eigenpair_default(g)?;
    adjusted_with(base, &spec, y)
}

pub fn adjusted_with(base: &CentralityResult, spec: &SpectralInfo, y: &[f64]) -> Result<CentralityResult> {
    let kind = match base.kind {
        CentralityKind::Degree => BaseKind::Degree,
        CentralityKind::Eigenvector => BaseKind::Eigenvector,
        CentralityKind::Katz => BaseKind::Katz,
        CentralityKind::Diffusion => BaseKind::Diffusion,
        other => {
            return Err(Error::Validation(format!("cannot adjust a {other} ranking")));
        }
    };
    if spec.u1.len() != y.len() || base.scores.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: base.scores.len(),
            got: y.len(),
        });
    }
    let primary = dot(&spec.u1, y);
    Ok(CentralityResult::new(
        CentralityKind::Adjusted(kind),
        base.scores.iter().map(|s| s * primary).collect(),
        base.params,
    ))
}

/// `c_t` for `c_s = αA·c_{s−1} + β` from the given `c_0`.
pub fn recurrence_centrality(g: &Graph, alpha: f64, beta: &[f64], c0: &[f64], t: usize) -> Result<Vec<f64>> {
    g.check_len(beta.len())?;
    g.check_len(c0.len())?;
    let n = g.n();
    let mut c = c0.to_vec();
    let mut ac = vec![0.0; n];
    for step in 1..=t {
        g.matvec_into(&c, &mut ac);
        for i in 0..n {
            c[i] = alpha * ac[i] + beta[i];
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { step });
        }
    }
    Ok(c)
}

/// Equilibrium actions `(I − βA)^{-1}·y` of the linear-quadratic network
/// game with heterogeneous marginal benefits `y`.
pub fn equilibrium_actions(g: &Graph, beta: f64, y: &[f64]) -> Result<Vec<f64>> {
    g.check_len(y.len())?;
    let lambda1 = leading_eigenpair_default(g)?.lambda1;
    if beta < 0.0 {
        return Err(Error::Validation(format!("interaction strength must be nonnegative, got {beta}")));
    }
    if beta * lambda1 >= 1.0 {
        return Err(Error::Divergence(format!(
            "interaction strength {beta} with λ1 = {lambda1} gives βλ1 ≥ 1"
        )));
    }
    fixed_point(g, beta, y)
}
