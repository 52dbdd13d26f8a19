//! Relative-change sweep: for every (spreadability, ȳ/σ) cell, seed the
//! top node of each ranking on freshly sampled networks, simulate one
//! independent cascade per strategy and compare average payoffs.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use ctxcent::cascade::{IcSimulator, MeanVar};
use ctxcent::centrality::{
    argmax, contextual_homogeneous, degree_centrality, diffusion_centrality, eigenvector_from,
    katz_default_alpha, katz_with, DEFAULT_HORIZON,
};
use ctxcent::metrics::relative_change;
use ctxcent::netgen::ModelKind;
use ctxcent::rng::seeded;
use ctxcent::{EdgeProbabilities, Error, Result};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::common::{draw_graph, seed_path, standardized_normal, GraphDraw};

pub const DEFAULT_SPREADABILITY: [f64; 10] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0];
pub const DEFAULT_STD_AVG_CONTRIBUTION: [f64; 9] = [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0];
pub const DEFAULT_RUNS_PER_CELL: usize = 100;
pub const DEFAULT_MAX_RETRIES: usize = 100;
/// Label of the cells that pool every model.
pub const POOLED: &str = "all";

const TAG_GRAPH: u64 = 1;
const TAG_Y: u64 = 2;
const TAG_RANDOM: u64 = 3;
const TAG_CASCADE: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Degree,
    Eigenvector,
    Katz,
    Diffusion,
    Contextual,
    Random,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Self::Degree,
        Self::Eigenvector,
        Self::Katz,
        Self::Diffusion,
        Self::Contextual,
        Self::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Degree => "degree",
            Self::Eigenvector => "eigenvector",
            Self::Katz => "katz",
            Self::Diffusion => "diffusion",
            Self::Contextual => "contextual",
            Self::Random => "random",
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|s| *s == self).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default = "default_spreadability")]
    pub spreadability_values: Vec<f64>,
    #[serde(default = "default_std_avg")]
    pub std_avg_contribution_values: Vec<f64>,
    #[serde(default = "default_runs")]
    pub runs_per_cell: usize,
    #[serde(default = "default_models")]
    pub graph_models: Vec<ModelKind>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_focal")]
    pub focal: Strategy,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
}

fn default_spreadability() -> Vec<f64> {
    DEFAULT_SPREADABILITY.to_vec()
}
fn default_std_avg() -> Vec<f64> {
    DEFAULT_STD_AVG_CONTRIBUTION.to_vec()
}
fn default_runs() -> usize {
    DEFAULT_RUNS_PER_CELL
}
fn default_models() -> Vec<ModelKind> {
    ModelKind::ALL.to_vec()
}
fn default_horizon() -> usize {
    DEFAULT_HORIZON
}
fn default_focal() -> Strategy {
    Strategy::Contextual
}
fn default_retries() -> usize {
    DEFAULT_MAX_RETRIES
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            spreadability_values: default_spreadability(),
            std_avg_contribution_values: default_std_avg(),
            runs_per_cell: DEFAULT_RUNS_PER_CELL,
            graph_models: default_models(),
            master_seed: 0,
            horizon: DEFAULT_HORIZON,
            focal: Strategy::Contextual,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

fn sorted_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] <= w[1])
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.spreadability_values.is_empty() || !sorted_finite(&self.spreadability_values) {
            problems.push("spreadability_values: must be a non-empty sorted list of finite numbers");
        }
        if self.spreadability_values.iter().any(|s| *s < 0.0) {
            problems.push("spreadability_values: must be non-negative");
        }
        if self.std_avg_contribution_values.is_empty() || !sorted_finite(&self.std_avg_contribution_values) {
            problems.push("std_avg_contribution_values: must be a non-empty sorted list of finite numbers");
        }
        if self.runs_per_cell == 0 {
            problems.push("runs_per_cell: must be at least 1");
        }
        if self.graph_models.is_empty() {
            problems.push("graph_models: must name at least one model");
        }
        if self.horizon == 0 {
            problems.push("horizon: must be at least 1");
        }
        if self.focal == Strategy::Random {
            problems.push("focal: random seeding is a baseline, not a centrality");
        }
        if self.max_retries == 0 {
            problems.push("max_retries: must be at least 1");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(format!("invalid sweep grid: {}", problems.join("; "))))
        }
    }

    fn cells(&self) -> usize {
        self.spreadability_values.len() * self.std_avg_contribution_values.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyStats {
    pub strategy: Strategy,
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub model: String,
    pub spreadability: f64,
    pub std_avg_contribution: f64,
    /// In `Strategy::ALL` order.
    pub strategies: Vec<StrategyStats>,
    pub focal: Strategy,
    /// Best non-focal centrality by mean payoff; random seeding is excluded.
    pub best_other: Option<Strategy>,
    /// `None` when every sampled graph was infeasible.
    pub relative_change: Option<f64>,
    pub samples: usize,
    /// Graph draws rejected because `spreadability/λ1 > 1`.
    pub infeasible: usize,
}

impl CellStats {
    pub fn mean_of(&self, s: Strategy) -> f64 {
        self.strategies[s.index()].mean
    }

    fn from_acc(model: String, s: f64, t: f64, focal: Strategy, acc: &[MeanVar; 6], infeasible: usize) -> Self {
        let strategies: Vec<StrategyStats> = Strategy::ALL
            .iter()
            .zip(acc)
            .map(|(&strategy, mv)| {
                let e = mv.estimate();
                StrategyStats {
                    strategy,
                    mean: if e.runs == 0 { 0.0 } else { e.mean },
                    std_error: e.std_error,
                    samples: e.runs,
                }
            })
            .collect();
        let samples = acc[0].count();
        let mut cell = Self {
            model,
            spreadability: s,
            std_avg_contribution: t,
            strategies,
            focal,
            best_other: None,
            relative_change: None,
            samples,
            infeasible,
        };
        if samples > 0 {
            let (best, rc) = cell.recompute_relative_change();
            cell.best_other = Some(best);
            cell.relative_change = Some(rc);
        }
        cell
    }

    /// Best other centrality and the focal strategy's relative change
    /// against it, from the stored means.
    pub fn recompute_relative_change(&self) -> (Strategy, f64) {
        let best = Strategy::ALL
            .into_iter()
            .filter(|s| *s != self.focal && *s != Strategy::Random)
            .fold(None, |best: Option<Strategy>, s| match best {
                Some(b) if self.mean_of(b) >= self.mean_of(s) => Some(b),
                _ => Some(s),
            })
            .expect("at least one other centrality");
        (best, relative_change(self.mean_of(self.focal), self.mean_of(best)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: SweepGrid,
    /// Per model in grid order, then the pooled cells when there is more
    /// than one model; within a model, spreadability-major.
    pub cells: Vec<CellStats>,
}

/// Payoffs of the six strategies for one (cell, run), or `None` when no
/// feasible graph was found.
type RunPayoffs = Vec<Option<[f64; 6]>>;

struct Prepared {
    draw: GraphDraw,
    z: Vec<f64>,
    tops: [usize; 3],
    random: usize,
}

fn prepare(grid: &SweepGrid, model: usize, run: usize, attempt: usize) -> Result<Prepared> {
    let key = [model as u64, run as u64, attempt as u64];
    let master = grid.master_seed;
    let draw = draw_graph(grid.graph_models[model], seed_path(master, &[&[TAG_GRAPH], &key[..]].concat()))?;
    let g = &draw.graph;
    let n = g.n();
    let z = standardized_normal(n, seed_path(master, &[&[TAG_Y], &key[..]].concat()));
    let lambda1 = draw.spectral.lambda1;
    let degree = degree_centrality(g)?;
    let eigen = eigenvector_from(&draw.spectral);
    let katz = katz_with(g, katz_default_alpha(lambda1), lambda1)?;
    let random = seeded(seed_path(master, &[&[TAG_RANDOM], &key[..]].concat())).random_range(0..n);
    let top = |s: &[f64]| argmax(s).expect("non-empty graph");
    Ok(Prepared {
        tops: [top(&degree.scores), top(&eigen.scores), top(&katz.scores)],
        draw,
        z,
        random,
    })
}

/// Every cell for one (model, run) pair. The sampled graph, its structural
/// rankings and the base contribution draw are shared by all cells, and all
/// strategies in a cell share the cascade random stream.
fn run_item(grid: &SweepGrid, model: usize, run: usize) -> Result<(RunPayoffs, Vec<usize>)> {
    let ny = grid.std_avg_contribution_values.len();
    let mut attempts: Vec<Prepared> = Vec::new();
    let mut payoffs = vec![None; grid.cells()];
    let mut infeasible = vec![0; grid.cells()];
    for (si, &s) in grid.spreadability_values.iter().enumerate() {
        let mut chosen = None;
        for a in 0..grid.max_retries {
            if attempts.len() <= a {
                attempts.push(prepare(grid, model, run, a)?);
            }
            let lambda1 = attempts[a].draw.spectral.lambda1;
            if s == 0.0 {
                chosen = Some((a, 0.0));
            } else if lambda1 > 0.0 && s / lambda1 <= 1.0 {
                chosen = Some((a, s / lambda1));
            }
            if chosen.is_some() {
                break;
            }
        }
        let Some((a, p)) = chosen else {
            for yi in 0..ny {
                infeasible[si * ny + yi] = grid.max_retries;
            }
            continue;
        };
        let prep = &attempts[a];
        let g = &prep.draw.graph;
        let diffusion = diffusion_centrality(g, p, grid.horizon, false)?;
        let diffusion_top = argmax(&diffusion.scores).expect("non-empty graph");
        let probs = EdgeProbabilities::Homogeneous(p);
        let mut sim = IcSimulator::new(g, &probs)?;
        for (yi, &target) in grid.std_avg_contribution_values.iter().enumerate() {
            let y: Vec<f64> = prep.z.iter().map(|v| v + target).collect();
            let cc = contextual_homogeneous(g, p, grid.horizon, &y)?;
            let cc_top = argmax(&cc.scores).expect("non-empty graph");
            let seeds = [prep.tops[0], prep.tops[1], prep.tops[2], diffusion_top, cc_top, prep.random];
            let rng_seed = seed_path(grid.master_seed, &[TAG_CASCADE, model as u64, run as u64, si as u64, yi as u64]);
            let mut out = [0.0; 6];
            for (o, &seed) in out.iter_mut().zip(&seeds) {
                *o = sim.run_payoff(seed, &y, rng_seed)?;
            }
            payoffs[si * ny + yi] = Some(out);
            infeasible[si * ny + yi] = a;
        }
    }
    Ok((payoffs, infeasible))
}

pub fn run_relative_change_sweep(grid: &SweepGrid) -> Result<SweepResult> {
    grid.validate()?;
    let items: Vec<(usize, usize)> = (0..grid.graph_models.len())
        .flat_map(|m| (0..grid.runs_per_cell).map(move |r| (m, r)))
        .collect();
    let done = AtomicUsize::new(0);
    let step = (items.len() / 10).max(1);
    let results: Vec<(RunPayoffs, Vec<usize>)> = items
        .par_iter()
        .map(|&(m, r)| {
            let out = run_item(grid, m, r);
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if k.is_multiple_of(step) || k == items.len() {
                log::info!("sweep: {k}/{} graph draws", items.len());
            }
            out
        })
        .collect::<Result<_>>()?;

    let nc = grid.cells();
    let mut acc = vec![vec![[MeanVar::default(); 6]; nc]; grid.graph_models.len()];
    let mut infeasible = vec![vec![0usize; nc]; grid.graph_models.len()];
    for (&(m, _), (payoffs, rejected)) in items.iter().zip(&results) {
        for c in 0..nc {
            infeasible[m][c] += rejected[c];
            if let Some(vals) = payoffs[c] {
                for (mv, v) in acc[m][c].iter_mut().zip(vals) {
                    mv.push(v);
                }
            }
        }
    }

    let ny = grid.std_avg_contribution_values.len();
    let coords = |c: usize| (grid.spreadability_values[c / ny], grid.std_avg_contribution_values[c % ny]);
    let mut cells = Vec::new();
    for (m, kind) in grid.graph_models.iter().enumerate() {
        for c in 0..nc {
            let (s, t) = coords(c);
            cells.push(CellStats::from_acc(kind.name().into(), s, t, grid.focal, &acc[m][c], infeasible[m][c]));
        }
    }
    if grid.graph_models.len() > 1 {
        for c in 0..nc {
            let mut pooled = [MeanVar::default(); 6];
            for model_acc in &acc {
                for (p, mv) in pooled.iter_mut().zip(&model_acc[c]) {
                    p.merge(mv);
                }
            }
            let rejected = infeasible.iter().map(|v| v[c]).sum();
            let (s, t) = coords(c);
            cells.push(CellStats::from_acc(POOLED.into(), s, t, grid.focal, &pooled, rejected));
        }
    }
    Ok(SweepResult {
        grid: grid.clone(),
        cells,
    })
}

pub const CSV_HEADER: &str = "model,spreadability,std_avg_contribution,centrality,mean_payoff,std_error,samples,infeasible,focal,best_other,relative_change";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: String,
    pub cells: usize,
    pub empty_cells: usize,
    /// Among cells with ȳ/σ ≤ −0.5 and samples: fraction with relative change > 0.
    pub negative_mean_positive_fraction: Option<f64>,
    pub cells_above_one: usize,
    pub max_relative_change: Option<f64>,
    pub infeasible_draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub grid: SweepGrid,
    pub models: Vec<ModelSummary>,
}

impl SweepResult {
    /// Long format: one row per cell per strategy.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            for s in &c.strategies {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    c.model,
                    c.spreadability,
                    c.std_avg_contribution,
                    s.strategy.name(),
                    s.mean,
                    s.std_error,
                    s.samples,
                    c.infeasible,
                    c.focal.name(),
                    opt(c.best_other.map(Strategy::name)),
                    opt(c.relative_change),
                )
                .unwrap();
            }
        }
        out
    }

    pub fn cells_for<'a>(&'a self, model: &'a str) -> impl Iterator<Item = &'a CellStats> + 'a {
        self.cells.iter().filter(move |c| c.model == model)
    }

    pub fn summary(&self) -> SweepSummary {
        let mut names: Vec<String> = self.grid.graph_models.iter().map(|m| m.name().to_owned()).collect();
        if names.len() > 1 {
            names.push(POOLED.into());
        }
        let models = names
            .into_iter()
            .map(|model| {
                let cells: Vec<&CellStats> = self.cells_for(&model).collect();
                let negative: Vec<f64> = cells
                    .iter()
                    .filter(|c| c.std_avg_contribution <= -0.5)
                    .filter_map(|c| c.relative_change)
                    .collect();
                let rcs = cells.iter().filter_map(|c| c.relative_change);
                ModelSummary {
                    cells: cells.len(),
                    empty_cells: cells.iter().filter(|c| c.samples == 0).count(),
                    negative_mean_positive_fraction: (!negative.is_empty())
                        .then(|| negative.iter().filter(|r| **r > 0.0).count() as f64 / negative.len() as f64),
                    cells_above_one: rcs.clone().filter(|r| *r > 1.0).count(),
                    max_relative_change: rcs.reduce(f64::max),
                    infeasible_draws: cells.iter().map(|c| c.infeasible).sum(),
                    model,
                }
            })
            .collect();
        SweepSummary {
            grid: self.grid.clone(),
            models,
        }
    }
}
