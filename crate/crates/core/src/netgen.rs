//! Random networks (Barabási-Albert, Erdős-Rényi, Watts-Strogatz and a
//! home/work overlay of Watts-Strogatz groups) and contribution samplers.

use std::collections::HashSet;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::contribution::ContributionVector;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{derive_seed, seeded, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GraphModel {
    BarabasiAlbert {
        n: usize,
        m: usize,
    },
    ErdosRenyi {
        n: usize,
        q: f64,
    },
    WattsStrogatz {
        n: usize,
        k: usize,
        rewire_p: f64,
    },
    /// Watts-Strogatz inside every home group and every work group, edges
    /// unioned. Groups are node lists; home groups partition `0..n`, work
    /// groups are disjoint but need not cover every node.
    OverlayWs {
        n: usize,
        home_groups: Vec<Vec<usize>>,
        work_groups: Vec<Vec<usize>>,
        k_max: usize,
        rewire_p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub model: GraphModel,
    pub rng_seed: u64,
}

impl GraphModel {
    pub fn n(&self) -> usize {
        match self {
            Self::BarabasiAlbert { n, .. }
            | Self::ErdosRenyi { n, .. }
            | Self::WattsStrogatz { n, .. }
            | Self::OverlayWs { n, .. } => *n,
        }
    }

    pub fn kind(&self) -> Option<ModelKind> {
        match self {
            Self::BarabasiAlbert { .. } => Some(ModelKind::BarabasiAlbert),
            Self::ErdosRenyi { .. } => Some(ModelKind::ErdosRenyi),
            Self::WattsStrogatz { .. } => Some(ModelKind::WattsStrogatz),
            Self::OverlayWs { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(invalid(format!("n must be at least 2, got {n}")));
        }
        match self {
            Self::BarabasiAlbert { m, .. } => {
                if *m < 1 || *m >= n {
                    return Err(invalid(format!("BA needs 1 ≤ m < n, got m = {m}, n = {n}")));
                }
            }
            Self::ErdosRenyi { q, .. } => check_unit("q", *q)?,
            Self::WattsStrogatz { k, rewire_p, .. } => {
                if *k < 2 || *k >= n {
                    return Err(invalid(format!("WS needs 2 ≤ k < n, got k = {k}, n = {n}")));
                }
                check_unit("rewire_p", *rewire_p)?;
            }
            Self::OverlayWs {
                home_groups,
                work_groups,
                rewire_p,
                ..
            } => {
                check_unit("rewire_p", *rewire_p)?;
                let mut seen = vec![false; n];
                for node in home_groups.iter().flatten() {
                    match seen.get_mut(*node) {
                        Some(s) if !*s => *s = true,
                        Some(_) => return Err(invalid(format!("node {node} in two home groups"))),
                        None => return Err(invalid(format!("home group node {node} ≥ n = {n}"))),
                    }
                }
                if let Some(missing) = seen.iter().position(|s| !s) {
                    return Err(invalid(format!("node {missing} has no home group")));
                }
                let mut seen = vec![false; n];
                for node in work_groups.iter().flatten() {
                    match seen.get_mut(*node) {
                        Some(s) if !*s => *s = true,
                        Some(_) => return Err(invalid(format!("node {node} in two work groups"))),
                        None => return Err(invalid(format!("work group node {node} ≥ n = {n}"))),
                    }
                }
            }
        }
        Ok(())
    }
}

fn invalid(msg: String) -> Error {
    Error::Validation(msg)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(invalid(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// Largest even integer ≤ `k`.
fn even_floor(k: usize) -> usize {
    k - k % 2
}

pub fn generate(spec: &GenSpec) -> Result<Graph> {
    spec.model.validate()?;
    let mut rng = seeded(spec.rng_seed);
    match &spec.model {
        GraphModel::BarabasiAlbert { n, m } => barabasi_albert(*n, *m, &mut rng),
        GraphModel::ErdosRenyi { n, q } => erdos_renyi(*n, *q, &mut rng),
        GraphModel::WattsStrogatz { n, k, rewire_p } => {
            let nodes: Vec<usize> = (0..*n).collect();
            let mut edges = HashSet::new();
            watts_strogatz_into(&nodes, even_floor(*k), *rewire_p, &mut rng, &mut edges);
            Graph::from_edges(*n, edges)
        }
        GraphModel::OverlayWs {
            n,
            home_groups,
            work_groups,
            k_max,
            rewire_p,
        } => {
            let mut edges = HashSet::new();
            for (g, group) in home_groups.iter().chain(work_groups).enumerate() {
                let k = even_floor((*k_max).min(group.len().saturating_sub(1)));
                if k >= 2 {
                    let mut grng = seeded(derive_seed(spec.rng_seed, g as u64));
                    watts_strogatz_into(group, k, *rewire_p, &mut grng, &mut edges);
                }
            }
            Graph::from_edges(*n, edges)
        }
    }
}

/// Preferential attachment from an `m`-clique nucleus (a single edge when
/// `m = 1`). Each later node picks `m` distinct targets with probability
/// proportional to degree, redrawing repeats.
fn barabasi_albert(n: usize, m: usize, rng: &mut Rng) -> Result<Graph> {
    let core = m.max(2);
    let mut edges = Vec::with_capacity(core * (core - 1) / 2 + (n - core) * m);
    // Each node appears once per incident edge.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * edges.capacity());
    for u in 0..core {
        for v in u + 1..core {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for v in core..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

/// `G(n, q)` by geometric skipping over the lower-triangular pairs, so sparse
/// graphs cost `O(n + |edges|)`.
fn erdos_renyi(n: usize, q: f64, rng: &mut Rng) -> Result<Graph> {
    if q <= 0.0 {
        return Ok(Graph::empty(n));
    }
    if q >= 1.0 {
        return Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))));
    }
    let log_miss = (1.0 - q).ln();
    let mut edges = Vec::new();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_miss).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Graph::from_edges(n, edges)
}

/// Ring lattice over `nodes` (each joined to `k/2` successors), then every
/// lattice edge `(u, u+j)` is rewired with probability `rewire_p` to a
/// uniformly chosen endpoint, avoiding self-loops and duplicates. Lattice
/// offsets are processed in rounds `j = 1..=k/2`.
fn watts_strogatz_into(
    nodes: &[usize],
    k: usize,
    rewire_p: f64,
    rng: &mut Rng,
    edges: &mut HashSet<(usize, usize)>,
) {
    let s = nodes.len();
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let mut local: HashSet<(usize, usize)> = HashSet::new();
    let mut degree = vec![0usize; s];
    for j in 1..=k / 2 {
        for i in 0..s {
            if local.insert(key(i, (i + j) % s)) {
                degree[i] += 1;
                degree[(i + j) % s] += 1;
            }
        }
    }
    if rewire_p > 0.0 {
        for j in 1..=k / 2 {
            for i in 0..s {
                let v = (i + j) % s;
                if rng.random::<f64>() >= rewire_p || !local.contains(&key(i, v)) {
                    continue;
                }
                if degree[i] >= s - 1 {
                    continue;
                }
                let w = loop {
                    let w = rng.random_range(0..s);
                    if w != i && !local.contains(&key(i, w)) {
                        break w;
                    }
                };
                local.remove(&key(i, v));
                degree[v] -= 1;
                local.insert(key(i, w));
                degree[w] += 1;
            }
        }
    }
    edges.extend(local.into_iter().map(|(a, b)| key(nodes[a], nodes[b])));
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContributionDistribution {
    Normal {
        mean: f64,
        #[serde(default = "unit")]
        std: f64,
    },
    /// `y_i = +1` with probability `probs[group_of[i]]`, else `−1`.
    DiscreteVotes { group_of: Vec<usize>, probs: Vec<f64> },
    Constant { value: f64 },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionSpec {
    pub distribution: ContributionDistribution,
    #[serde(default)]
    pub adversarial_redistribute: bool,
}

impl ContributionSpec {
    pub fn standard_normal() -> Self {
        Self {
            distribution: ContributionDistribution::Normal { mean: 0.0, std: 1.0 },
            adversarial_redistribute: false,
        }
    }
}

/// Draws `n` contributions. With `adversarial_redistribute` set, the draw is
/// permuted against `u1` (which must then be given).
pub fn sample_contributions(
    n: usize,
    spec: &ContributionSpec,
    rng_seed: u64,
    u1: Option<&[f64]>,
) -> Result<ContributionVector> {
    if n == 0 {
        return Err(invalid("cannot sample an empty contribution vector".into()));
    }
    let mut rng = seeded(rng_seed);
    let y: Vec<f64> = match &spec.distribution {
        ContributionDistribution::Normal { mean, std } => {
            if !(*std > 0.0) {
                return Err(invalid(format!("normal std must be positive, got {std}")));
            }
            let dist = Normal::new(*mean, *std).map_err(|e| invalid(e.to_string()))?;
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        }
        ContributionDistribution::Constant { value } => vec![*value; n],
        ContributionDistribution::DiscreteVotes { group_of, probs } => {
            if group_of.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: group_of.len(),
                });
            }
            for &p in probs {
                check_unit("vote probability", p)?;
            }
            group_of
                .iter()
                .map(|&g| {
                    let p = *probs
                        .get(g)
                        .ok_or_else(|| invalid(format!("group {g} has no vote probability")))?;
                    Ok(if rng.random::<f64>() < p { 1.0 } else { -1.0 })
                })
                .collect::<Result<_>>()?
        }
    };
    let y = ContributionVector::new(y)?;
    if spec.adversarial_redistribute {
        let u1 = u1.ok_or_else(|| invalid("adversarial redistribution needs u1".into()))?;
        return redistribute_adversarial(&y, u1);
    }
    Ok(y)
}

/// Permutes `y` so that, where possible, the primary contribution `u1ᵀy`
/// takes the sign opposite to `ȳ`: for `ȳ < 0` the node with the largest
/// `u1` entry receives the largest value, the next node the next largest,
/// and so on; for `ȳ > 0` the pairing is reversed. `ȳ = 0` is left as is.
pub fn redistribute_adversarial(y: &ContributionVector, u1: &[f64]) -> Result<ContributionVector> {
    if u1.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: u1.len(),
        });
    }
    if y.mean() == 0.0 {
        return Ok(y.clone());
    }
    let mut values = y.values().to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    if y.mean() > 0.0 {
        values.reverse();
    }
    let mut order: Vec<usize> = (0..u1.len()).collect();
    order.sort_by(|&a, &b| u1[b].total_cmp(&u1[a]).then(a.cmp(&b)));
    let mut out = vec![0.0; u1.len()];
    for (node, v) in order.into_iter().zip(values) {
        out[node] = v;
    }
    ContributionVector::new(out)
}

/// Overlay network plus `±1` votes drawn with each node's home-group
/// probability.
pub fn generate_overlay(spec: &GenSpec, vote_probs: &[f64]) -> Result<(Graph, ContributionVector)> {
    let GraphModel::OverlayWs { n, home_groups, .. } = &spec.model else {
        return Err(invalid("generate_overlay needs an overlay_ws spec".into()));
    };
    if vote_probs.len() != home_groups.len() {
        return Err(Error::DimensionMismatch {
            expected: home_groups.len(),
            got: vote_probs.len(),
        });
    }
    let g = generate(spec)?;
    let mut group_of = vec![0; *n];
    for (gi, group) in home_groups.iter().enumerate() {
        for &node in group {
            group_of[node] = gi;
        }
    }
    let votes = ContributionSpec {
        distribution: ContributionDistribution::DiscreteVotes {
            group_of,
            probs: vote_probs.to_vec(),
        },
        adversarial_redistribute: false,
    };
    let y = sample_contributions(*n, &votes, derive_seed(spec.rng_seed, u64::MAX), None)?;
    Ok((g, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    BarabasiAlbert,
    ErdosRenyi,
    WattsStrogatz,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [Self::BarabasiAlbert, Self::ErdosRenyi, Self::WattsStrogatz];

    pub fn name(self) -> &'static str {
        match self {
            Self::BarabasiAlbert => "barabasi_albert",
            Self::ErdosRenyi => "erdos_renyi",
            Self::WattsStrogatz => "watts_strogatz",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

pub const SWEEP_MIN_NODES: usize = 30;
pub const SWEEP_MAX_NODES: usize = 300;

/// Draws model parameters from the synthetic-study ranges: `n ∈ [30, 300]`,
/// BA `m ∈ [1, n)`, ER `q ∈ (0, 1]`, WS `k ∈ [max(2, even(ln n)), n)` with
/// `rewire_p ∈ [0, 1]`.
pub fn sample_model(kind: ModelKind, rng: &mut Rng) -> GraphModel {
    let n = rng.random_range(SWEEP_MIN_NODES..=SWEEP_MAX_NODES);
    sample_model_sized(kind, n, rng)
}

/// As [`sample_model`] with the node count fixed. Needs `n ≥ 3`.
pub fn sample_model_sized(kind: ModelKind, n: usize, rng: &mut Rng) -> GraphModel {
    match kind {
        ModelKind::BarabasiAlbert => GraphModel::BarabasiAlbert {
            n,
            m: rng.random_range(1..n),
        },
        ModelKind::ErdosRenyi => GraphModel::ErdosRenyi {
            n,
            q: 1.0 - rng.random::<f64>(),
        },
        ModelKind::WattsStrogatz => {
            let k_min = even_floor((n as f64).ln() as usize).max(2);
            let k = even_floor(rng.random_range(k_min..n)).max(2);
            GraphModel::WattsStrogatz {
                n,
                k,
                rewire_p: rng.random::<f64>(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(model: GraphModel, seed: u64) -> Graph {
        generate(&GenSpec { model, rng_seed: seed }).unwrap()
    }

    #[test]
    fn er_extremes() {
        assert_eq!(gen(GraphModel::ErdosRenyi { n: 10, q: 0.0 }, 1).num_edges(), 0);
        assert_eq!(gen(GraphModel::ErdosRenyi { n: 10, q: 1.0 }, 1).num_edges(), 45);
    }

    #[test]
    fn ws_ring_lattice() {
        let g = gen(GraphModel::WattsStrogatz { n: 10, k: 4, rewire_p: 0.0 }, 3);
        assert_eq!(g.num_edges(), 20);
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert!(g.has_edge(0, 9) && g.has_edge(0, 8) && !g.has_edge(0, 7));
    }

    #[test]
    fn ws_odd_k_rounds_down() {
        let g = gen(GraphModel::WattsStrogatz { n: 10, k: 5, rewire_p: 0.0 }, 3);
        assert!(g.degrees().iter().all(|&d| d == 4));
    }

    #[test]
    fn ws_rewiring_keeps_edge_count() {
        for seed in 0..20 {
            let g = gen(GraphModel::WattsStrogatz { n: 50, k: 6, rewire_p: 0.5 }, seed);
            assert_eq!(g.num_edges(), 150);
        }
        let full = gen(GraphModel::WattsStrogatz { n: 6, k: 4, rewire_p: 1.0 }, 0);
        assert_eq!(full.num_edges(), 12);
    }

    #[test]
    fn ba_tree_and_counts() {
        for seed in 0..30 {
            let g = gen(GraphModel::BarabasiAlbert { n: 60, m: 1 }, seed);
            assert_eq!(g.num_edges(), 59);
            assert!(g.is_connected());
        }
        let g = gen(GraphModel::BarabasiAlbert { n: 40, m: 3 }, 5);
        assert_eq!(g.num_edges(), 3 + 37 * 3);
        let complete = gen(GraphModel::BarabasiAlbert { n: 12, m: 11 }, 5);
        assert_eq!(complete.num_edges(), 66);
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad = [
            GraphModel::BarabasiAlbert { n: 5, m: 0 },
            GraphModel::BarabasiAlbert { n: 5, m: 5 },
            GraphModel::ErdosRenyi { n: 5, q: 1.5 },
            GraphModel::ErdosRenyi { n: 1, q: 0.5 },
            GraphModel::WattsStrogatz { n: 5, k: 1, rewire_p: 0.0 },
            GraphModel::WattsStrogatz { n: 5, k: 5, rewire_p: 0.0 },
            GraphModel::WattsStrogatz { n: 5, k: 2, rewire_p: -0.1 },
        ];
        for model in bad {
            assert!(generate(&GenSpec { model: model.clone(), rng_seed: 0 }).is_err(), "{model:?}");
        }
    }

    #[test]
    fn reproducible() {
        for model in [
            GraphModel::BarabasiAlbert { n: 80, m: 2 },
            GraphModel::ErdosRenyi { n: 80, q: 0.1 },
            GraphModel::WattsStrogatz { n: 80, k: 6, rewire_p: 0.3 },
        ] {
            assert_eq!(gen(model.clone(), 17), gen(model.clone(), 17));
            assert_ne!(gen(model.clone(), 17), gen(model, 18));
        }
    }

    #[test]
    fn er_mean_edge_count() {
        for q in [0.1, 0.3, 0.7] {
            let total: usize = (0..200)
                .map(|s| gen(GraphModel::ErdosRenyi { n: 100, q }, s).num_edges())
                .sum();
            let mean = total as f64 / 200.0;
            let want = q * 4950.0;
            assert!((mean - want).abs() <= 0.05 * want, "q={q}: {mean} vs {want}");
        }
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = GenSpec {
            model: GraphModel::WattsStrogatz { n: 20, k: 4, rewire_p: 0.1 },
            rng_seed: 9,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"model\":\"watts_strogatz\""), "{text}");
        assert_eq!(serde_json::from_str::<GenSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn normal_sample_moments() {
        let y = sample_contributions(100_000, &ContributionSpec::standard_normal(), 4, None).unwrap();
        assert!(y.mean().abs() < 0.02, "{}", y.mean());
        assert!((y.std() - 1.0).abs() < 0.02, "{}", y.std());
    }

    #[test]
    fn certain_votes() {
        let spec = |p: f64| ContributionSpec {
            distribution: ContributionDistribution::DiscreteVotes {
                group_of: vec![0, 1, 1, 0],
                probs: vec![p, p],
            },
            adversarial_redistribute: false,
        };
        assert_eq!(sample_contributions(4, &spec(1.0), 1, None).unwrap().values(), &[1.0; 4]);
        assert_eq!(sample_contributions(4, &spec(0.0), 1, None).unwrap().values(), &[-1.0; 4]);
        assert!(sample_contributions(4, &spec(1.2), 1, None).is_err());
        let constant = ContributionSpec {
            distribution: ContributionDistribution::Constant { value: 1.5 },
            adversarial_redistribute: false,
        };
        assert_eq!(sample_contributions(3, &constant, 1, None).unwrap().values(), &[1.5; 3]);
    }

    #[test]
    fn adversarial_pairing() {
        let y = ContributionVector::new(vec![-3.0, 1.0, 1.0]).unwrap();
        let out = redistribute_adversarial(&y, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(out.values(), &[-3.0, 1.0, 1.0]);

        let y = ContributionVector::new(vec![1.0, -3.0, 1.0]).unwrap();
        let out = redistribute_adversarial(&y, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(out.values(), &[-3.0, 1.0, 1.0]);

        let y = ContributionVector::new(vec![3.0, -1.0, -1.0]).unwrap();
        let out = redistribute_adversarial(&y, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(out.values(), &[3.0, -1.0, -1.0]);

        let constant = ContributionVector::constant(3, 2.0).unwrap();
        assert_eq!(redistribute_adversarial(&constant, &[0.3, 0.2, 0.1]).unwrap(), constant);
        assert!(redistribute_adversarial(&constant, &[0.3]).is_err());
    }

    #[test]
    fn overlay_degenerate_cases() {
        let n = 12;
        let all: Vec<usize> = (0..n).collect();
        let overlay = |work: Vec<Vec<usize>>| GenSpec {
            model: GraphModel::OverlayWs {
                n,
                home_groups: vec![all.clone()],
                work_groups: work,
                k_max: 4,
                rewire_p: 0.0,
            },
            rng_seed: 2,
        };
        let plain = gen(GraphModel::WattsStrogatz { n, k: 4, rewire_p: 0.0 }, 0);
        assert_eq!(generate(&overlay(vec![])).unwrap(), plain);
        assert_eq!(generate(&overlay(vec![all.clone()])).unwrap(), plain);
    }

    #[test]
    fn overlay_small_groups_and_votes() {
        let spec = GenSpec {
            model: GraphModel::OverlayWs {
                n: 7,
                home_groups: vec![vec![0], vec![1, 2, 3, 4, 5, 6]],
                work_groups: vec![vec![0, 1, 2]],
                k_max: 10,
                rewire_p: 0.0,
            },
            rng_seed: 1,
        };
        let (g, y) = generate_overlay(&spec, &[1.0, 0.0]).unwrap();
        // Home group of 6 gets k = 4; the singleton gets nothing; the work
        // triangle adds (0,1), (0,2) and the already present (1,2).
        assert_eq!(g.num_edges(), 12 + 2);
        assert_eq!(y.values(), &[1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0]);
        assert!(generate_overlay(&spec, &[1.0]).is_err());
    }

    #[test]
    fn overlay_votes_concentrate() {
        let n = 10_000;
        let groups: Vec<Vec<usize>> = (0..n).collect::<Vec<_>>().chunks(100).map(|c| c.to_vec()).collect();
        let spec = GenSpec {
            model: GraphModel::OverlayWs {
                n,
                home_groups: groups.clone(),
                work_groups: vec![],
                k_max: 10,
                rewire_p: 0.1,
            },
            rng_seed: 6,
        };
        let (_, y) = generate_overlay(&spec, &vec![0.5; groups.len()]).unwrap();
        assert!(y.mean().abs() < 0.03, "{}", y.mean());
    }

    #[test]
    fn overlay_validation() {
        let spec = GenSpec {
            model: GraphModel::OverlayWs {
                n: 4,
                home_groups: vec![vec![0, 1], vec![1, 2, 3]],
                work_groups: vec![],
                k_max: 4,
                rewire_p: 0.0,
            },
            rng_seed: 1,
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn sampler_ranges() {
        let mut rng = seeded(99);
        for _ in 0..2000 {
            for kind in ModelKind::ALL {
                let model = sample_model(kind, &mut rng);
                model.validate().unwrap();
                let n = model.n();
                assert!((SWEEP_MIN_NODES..=SWEEP_MAX_NODES).contains(&n));
                match model {
                    GraphModel::BarabasiAlbert { m, .. } => assert!((1..n).contains(&m)),
                    GraphModel::ErdosRenyi { q, .. } => assert!(q > 0.0 && q <= 1.0),
                    GraphModel::WattsStrogatz { k, rewire_p, .. } => {
                        assert!(k % 2 == 0 && k >= 2 && k < n);
                        assert!(k + 1 >= (n as f64).ln() as usize);
                        assert!((0.0..=1.0).contains(&rewire_p));
                    }
                    GraphModel::OverlayWs { .. } => unreachable!(),
                }
            }
        }
    }
}
