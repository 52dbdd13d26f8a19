//! Independent-cascade diffusion from a single seed.
//!
//! Three routes to the expected cascade payoff `Σ_i r_i(seed)·y_i`:
//! step-by-step IC simulation, Monte Carlo bond percolation (one sample scores
//! every seed at once), and exhaustive enumeration of edge subsets for small
//! graphs.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{argmax, CentralityResult};
use crate::error::{Error, Result};
use crate::graph::{EdgeProbabilities, Graph};
use crate::rng::{derive_seed, seeded};

/// Largest edge count `exact_payoff` will enumerate.
pub const EXACT_MAX_EDGES: usize = 24;

/// Runs handled by one work item. Fixed so the reduction order, and hence
/// every floating-point result, does not depend on the thread count.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeOutcome {
    pub seed: usize,
    /// Activated nodes in ascending order; always contains `seed`.
    pub activated: Vec<usize>,
    pub payoff: f64,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√runs`.
    pub std_error: f64,
    pub runs: usize,
}

/// Streaming mean and variance (Welford), mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanVar {
    count: usize,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanVar) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2 + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn estimate(&self) -> PayoffEstimate {
        PayoffEstimate {
            mean: self.mean,
            std_error: (self.sample_variance() / self.count.max(1) as f64).sqrt(),
            runs: self.count,
        }
    }
}

/// Reusable buffers for repeated IC runs on one graph.
pub struct IcSimulator<'g> {
    g: &'g Graph,
    probs: &'g EdgeProbabilities,
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
}

impl<'g> IcSimulator<'g> {
    pub fn new(g: &'g Graph, probs: &'g EdgeProbabilities) -> Result<Self> {
        probs.check(g)?;
        if let EdgeProbabilities::Homogeneous(p) = probs {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Validation(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(Self {
            g,
            probs,
            stamp: vec![0; g.n()],
            epoch: 0,
            queue: Vec::with_capacity(g.n()),
        })
    }

    /// Runs one cascade and returns the activated nodes in activation order.
    /// Breadth-first; each newly active node tries its inactive neighbors in
    /// ascending id order.
    pub fn run(&mut self, seed: usize, rng_seed: u64) -> Result<&[u32]> {
        let g = self.g;
        if seed >= g.n() {
            return Err(Error::Validation(format!(
                "seed {seed} out of range for {} nodes",
                g.n()
            )));
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        let mut rng = seeded(rng_seed);
        self.queue.clear();
        self.queue.push(seed as u32);
        self.stamp[seed] = epoch;
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head] as usize;
            head += 1;
            for pos in g.row_range(u) {
                let v = g.targets()[pos] as usize;
                if self.stamp[v] == epoch {
                    continue;
                }
                let p = self.probs.at(pos);
                if p > 0.0 && rng.random::<f64>() < p {
                    self.stamp[v] = epoch;
                    self.queue.push(v as u32);
                }
            }
        }
        Ok(&self.queue)
    }

    pub fn run_payoff(&mut self, seed: usize, y: &[f64], rng_seed: u64) -> Result<f64> {
        let active = self.run(seed, rng_seed)?;
        Ok(active.iter().map(|&i| y[i as usize]).sum())
    }
}

/// One independent-cascade run from `seed`.
pub fn simulate_ic(
    g: &Graph,
    seed: usize,
    probs: &EdgeProbabilities,
    y: &[f64],
    rng_seed: u64,
) -> Result<CascadeOutcome> {
    g.check_len(y.len())?;
    let mut sim = IcSimulator::new(g, probs)?;
    let mut activated: Vec<usize> = sim.run(seed, rng_seed)?.iter().map(|&i| i as usize).collect();
    activated.sort_unstable();
    let payoff = activated.iter().map(|&i| y[i]).sum();
    Ok(CascadeOutcome {
        seed,
        activated,
        payoff,
        rng_seed,
    })
}

/// Seed of run `index` under `master_seed`.
pub fn run_seed(master_seed: u64, index: usize) -> u64 {
    derive_seed(master_seed, index as u64)
}

/// Monte Carlo mean and standard error of the cascade payoff from `seed`.
pub fn estimate_payoff(
    g: &Graph,
    seed: usize,
    probs: &EdgeProbabilities,
    y: &[f64],
    runs: usize,
    master_seed: u64,
) -> Result<PayoffEstimate> {
    if runs == 0 {
        return Err(Error::Validation("runs must be at least 1".into()));
    }
    g.check_len(y.len())?;
    if seed >= g.n() {
        return Err(Error::Validation(format!("seed {seed} out of range for {} nodes", g.n())));
    }
    IcSimulator::new(g, probs)?;
    let chunks: Vec<MeanVar> = (0..runs.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sim = IcSimulator::new(g, probs).expect("validated above");
            let mut acc = MeanVar::default();
            for r in c * CHUNK..((c + 1) * CHUNK).min(runs) {
                acc.push(sim.run_payoff(seed, y, run_seed(master_seed, r)).expect("validated above"));
            }
            acc
        })
        .collect();
    let mut total = MeanVar::default();
    for c in &chunks {
        total.merge(c);
    }
    Ok(total.estimate())
}

fn edge_probabilities(g: &Graph, probs: &EdgeProbabilities) -> Result<Vec<f64>> {
    probs.check(g)?;
    Ok(g.edges()
        .map(|(u, v)| match probs {
            EdgeProbabilities::Homogeneous(p) => *p,
            EdgeProbabilities::PerEdge(w) => {
                let pos = g.row_range(u).start + g.neighbors(u).binary_search(&(v as u32)).unwrap();
                w[pos]
            }
        })
        .collect())
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n as u32);
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let up = self.parent[self.parent[x] as usize];
            self.parent[x] = up;
            x = up as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}

/// Monte Carlo cascade payoff for every seed at once via bond percolation:
/// each run keeps edge `{u, v}` with probability `P_uv`, and the payoff of
/// seeding `i` is the sum of `y` over `i`'s component.
pub fn estimate_payoffs_all_seeds(
    g: &Graph,
    probs: &EdgeProbabilities,
    y: &[f64],
    runs: usize,
    master_seed: u64,
) -> Result<Vec<PayoffEstimate>> {
    if runs == 0 {
        return Err(Error::Validation("runs must be at least 1".into()));
    }
    g.check_len(y.len())?;
    let n = g.n();
    let edge_p = edge_probabilities(g, probs)?;
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let chunks: Vec<Vec<MeanVar>> = (0..runs.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![MeanVar::default(); n];
            let mut uf = UnionFind { parent: Vec::with_capacity(n) };
            let mut comp = vec![0.0; n];
            for r in c * CHUNK..((c + 1) * CHUNK).min(runs) {
                let mut rng = seeded(run_seed(master_seed, r));
                uf.reset(n);
                for (&(u, v), &p) in edges.iter().zip(&edge_p) {
                    if p > 0.0 && rng.random::<f64>() < p {
                        uf.union(u, v);
                    }
                }
                comp.iter_mut().for_each(|s| *s = 0.0);
                for (i, &yi) in y.iter().enumerate() {
                    let root = uf.find(i);
                    comp[root] += yi;
                }
                for (i, a) in acc.iter_mut().enumerate() {
                    let root = uf.find(i);
                    a.push(comp[root]);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![MeanVar::default(); n];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.merge(c);
        }
    }
    Ok(total.iter().map(MeanVar::estimate).collect())
}

/// Activation probabilities `r_i(seed)` by enumerating all `2^|E|` edge
/// subsets (bond percolation).
pub fn exact_reach_probabilities(g: &Graph, seed: usize, p: f64) -> Result<Vec<f64>> {
    Ok(exact_reach_matrix(g, p)?.swap_remove(seed_checked(g, seed)?))
}

fn seed_checked(g: &Graph, seed: usize) -> Result<usize> {
    if seed >= g.n() {
        return Err(Error::Validation(format!("seed {seed} out of range for {} nodes", g.n())));
    }
    Ok(seed)
}

/// `r[s][i]`: probability that `i` is activated when `s` is seeded.
pub fn exact_reach_matrix(g: &Graph, p: f64) -> Result<Vec<Vec<f64>>> {
    let m = g.num_edges();
    if m > EXACT_MAX_EDGES {
        return Err(Error::TooLarge(format!(
            "exact enumeration needs at most {EXACT_MAX_EDGES} edges, graph has {m}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("probability {p} outside [0, 1]")));
    }
    let n = g.n();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let weight_by_size: Vec<f64> = (0..=m)
        .map(|k| p.powi(k as i32) * (1.0 - p).powi((m - k) as i32))
        .collect();
    let mut reach = vec![vec![0.0; n]; n];
    let mut uf = UnionFind { parent: Vec::with_capacity(n) };
    let mut roots = vec![0usize; n];
    for mask in 0u32..(1u32 << m) {
        let w = weight_by_size[mask.count_ones() as usize];
        if w == 0.0 {
            continue;
        }
        uf.reset(n);
        for (k, &(u, v)) in edges.iter().enumerate() {
            if mask & (1 << k) != 0 {
                uf.union(u, v);
            }
        }
        for (i, r) in roots.iter_mut().enumerate() {
            *r = uf.find(i);
        }
        for s in 0..n {
            for i in 0..n {
                if roots[s] == roots[i] {
                    reach[s][i] += w;
                }
            }
        }
    }
    Ok(reach)
}

/// Expected cascade payoff `Σ_i r_i(seed)·y_i`, computed exactly.
pub fn exact_payoff(g: &Graph, seed: usize, p: f64, y: &[f64]) -> Result<f64> {
    g.check_len(y.len())?;
    let r = exact_reach_probabilities(g, seed, p)?;
    Ok(r.iter().zip(y).map(|(a, b)| a * b).sum())
}

/// Exact expected payoff of every seed.
pub fn exact_payoffs(g: &Graph, p: f64, y: &[f64]) -> Result<Vec<f64>> {
    g.check_len(y.len())?;
    Ok(exact_reach_matrix(g, p)?
        .iter()
        .map(|r| r.iter().zip(y).map(|(a, b)| a * b).sum())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    SeedAlways,
    SeedNonnegative,
}

/// Top-ranked node, or `None` when the policy abstains.
pub fn select_seed(scores: &CentralityResult, policy: SeedPolicy) -> Option<usize> {
    select_seed_from(&scores.scores, policy)
}

pub fn select_seed_from(scores: &[f64], policy: SeedPolicy) -> Option<usize> {
    let top = argmax(scores)?;
    match policy {
        SeedPolicy::SeedAlways => Some(top),
        SeedPolicy::SeedNonnegative if scores[top] >= 0.0 => Some(top),
        SeedPolicy::SeedNonnegative => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use std::collections::BTreeMap;

    fn hom(p: f64) -> EdgeProbabilities {
        EdgeProbabilities::Homogeneous(p)
    }

    #[test]
    fn zero_probability_activates_only_seed() {
        let g = complete(5);
        let out = simulate_ic(&g, 3, &hom(0.0), &[1.0; 5], 9).unwrap();
        assert_eq!(out.activated, vec![3]);
        assert_eq!(out.payoff, 1.0);
    }

    #[test]
    fn certain_transmission_floods_component() {
        let g = star(6);
        let out = simulate_ic(&g, 4, &hom(1.0), &[1.0; 6], 1).unwrap();
        assert_eq!(out.activated, (0..6).collect::<Vec<_>>());
        let est = estimate_payoff(&g, 4, &hom(1.0), &[1.0; 6], 50, 3).unwrap();
        assert_eq!(est.mean, 6.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn seed_out_of_range() {
        assert!(simulate_ic(&path3(), 3, &hom(0.5), &[1.0; 3], 0).is_err());
        assert!(estimate_payoff(&path3(), 7, &hom(0.5), &[1.0; 3], 10, 0).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let g = complete(8);
        let y: Vec<f64> = (0..8).map(|i| i as f64 - 3.0).collect();
        let a = simulate_ic(&g, 0, &hom(0.3), &y, 42).unwrap();
        let b = simulate_ic(&g, 0, &hom(0.3), &y, 42).unwrap();
        assert_eq!(a, b);
        let e1 = estimate_payoff(&g, 0, &hom(0.3), &y, 3000, 5).unwrap();
        let e2 = estimate_payoff(&g, 0, &hom(0.3), &y, 3000, 5).unwrap();
        assert_eq!(e1, e2);
    }

    #[test]
    fn path_center_outcome_distribution() {
        // Seeding the middle of P3 with p = 1/2: each leaf independently
        // joins, so the four activated sets are equally likely.
        let g = path3();
        let runs = 40_000;
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for r in 0..runs {
            let out = simulate_ic(&g, 1, &hom(0.5), &[1.0; 3], run_seed(11, r)).unwrap();
            *counts.entry(out.activated).or_default() += 1;
        }
        assert_eq!(counts.len(), 4);
        let expected = [vec![1], vec![0, 1], vec![1, 2], vec![0, 1, 2]];
        for set in expected {
            let freq = counts[&set] as f64 / runs as f64;
            // 4σ of a Bernoulli(1/4) frequency over 40k runs is ~0.0087.
            assert!((freq - 0.25).abs() < 0.009, "{set:?}: {freq}");
        }
    }

    #[test]
    fn degenerate_estimates() {
        let g = star(4);
        let y = [2.0, -1.0, 0.5, 3.0];
        let est = estimate_payoff(&g, 2, &hom(0.0), &y, 100, 1).unwrap();
        assert_eq!(est.mean, 0.5);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.runs, 100);
        assert!(estimate_payoff(&g, 2, &hom(0.0), &y, 0, 1).is_err());
    }

    #[test]
    fn path_center_mean_payoff() {
        let est = estimate_payoff(&path3(), 1, &hom(0.5), &[1.0; 3], 100_000, 2024).unwrap();
        assert!((est.mean - 2.0).abs() <= 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_payoff(&path3(), 1, 0.5, &[1.0; 3]).unwrap(), 2.0);
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert!((exact_payoff(&edge, 0, 0.3, &[1.0, 1.0]).unwrap() - 1.3).abs() < 1e-15);
        assert_eq!(exact_payoff(&complete(5), 2, 0.7, &[0.0; 5]).unwrap(), 0.0);
        // Endpoint of P3: 1 + p + p².
        assert!((exact_payoff(&path3(), 0, 0.5, &[1.0; 3]).unwrap() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn exact_rejects_large_graphs() {
        let g = complete(8); // 28 edges
        assert!(matches!(exact_payoff(&g, 0, 0.5, &[1.0; 8]), Err(Error::TooLarge(_))));
    }

    #[test]
    fn percolation_matches_exact() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let y = [1.0, -2.0, 0.5, 3.0, -1.0];
        let exact = exact_payoffs(&g, 0.4, &y).unwrap();
        let mc = estimate_payoffs_all_seeds(&g, &hom(0.4), &y, 60_000, 8).unwrap();
        for (e, m) in exact.iter().zip(&mc) {
            assert!((e - m.mean).abs() <= 4.0 * m.std_error, "{e} vs {m:?}");
        }
    }

    #[test]
    fn per_edge_probabilities_drive_simulation() {
        let g = path3();
        let probs = EdgeProbabilities::per_edge(&g, &[(0, 1, 1.0), (1, 2, 0.0)]).unwrap();
        let out = simulate_ic(&g, 0, &probs, &[1.0; 3], 4).unwrap();
        assert_eq!(out.activated, vec![0, 1]);
        let all = estimate_payoffs_all_seeds(&g, &probs, &[1.0; 3], 10, 4).unwrap();
        assert_eq!(all.iter().map(|e| e.mean).collect::<Vec<_>>(), vec![2.0, 2.0, 1.0]);
    }

    #[test]
    fn seed_selection() {
        let neg = [-1.0, -2.0, -3.0];
        assert_eq!(select_seed_from(&neg, SeedPolicy::SeedNonnegative), None);
        assert_eq!(select_seed_from(&neg, SeedPolicy::SeedAlways), Some(0));
        for policy in [SeedPolicy::SeedAlways, SeedPolicy::SeedNonnegative] {
            assert_eq!(select_seed_from(&[2.0, 5.0, 5.0], policy), Some(1));
        }
        assert_eq!(select_seed_from(&[0.0, -1.0], SeedPolicy::SeedNonnegative), Some(0));
    }

    #[test]
    fn meanvar_merge_matches_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 - 4.5).collect();
        let mut all = MeanVar::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (MeanVar::default(), MeanVar::default());
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count(), all.count());
        assert!((a.mean() - all.mean()).abs() < 1e-12);
        assert!((a.sample_variance() - all.sample_variance()).abs() < 1e-10);
    }

    #[test]
    fn outcome_json_fields() {
        let out = simulate_ic(&path3(), 1, &hom(1.0), &[1.0, 2.0, 3.0], 77).unwrap();
        let v: serde_json::Value = serde_json::to_value(&out).unwrap();
        assert_eq!(v["seed"], 1);
        assert_eq!(v["activated"], serde_json::json!([0, 1, 2]));
        assert_eq!(v["payoff"], 6.0);
        assert_eq!(v["rng_seed"], 77);
    }
}
