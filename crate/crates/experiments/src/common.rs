use ctxcent::netgen::{generate, sample_model, GenSpec, GraphModel, ModelKind};
use ctxcent::rng::{derive_seed, derive_seed_path, seeded};
use ctxcent::{leading_eigenpair_default, Graph, Result, SpectralInfo};
use rand_distr::{Distribution, StandardNormal};

/// A sampled network together with its leading eigenpair.
#[derive(Debug, Clone)]
pub struct GraphDraw {
    pub model: GraphModel,
    pub graph: Graph,
    pub spectral: SpectralInfo,
}

/// Samples model parameters from the synthetic ranges, then the graph.
pub fn draw_graph(kind: ModelKind, seed: u64) -> Result<GraphDraw> {
    let mut rng = seeded(derive_seed(seed, 0));
    let model = sample_model(kind, &mut rng);
    draw_model(model, derive_seed(seed, 1))
}

pub fn draw_model(model: GraphModel, seed: u64) -> Result<GraphDraw> {
    let graph = generate(&GenSpec {
        model: model.clone(),
        rng_seed: seed,
    })?;
    let spectral = leading_eigenpair_default(&graph)?;
    Ok(GraphDraw { model, graph, spectral })
}

/// A normal sample shifted and scaled to mean exactly 0 and population
/// standard deviation exactly 1 (up to rounding).
pub fn standardized_normal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    let mut z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mean = z.iter().sum::<f64>() / n as f64;
    let std = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    if std > 0.0 {
        z.iter_mut().for_each(|v| *v = (*v - mean) / std);
    }
    z
}

pub(crate) fn seed_path(master: u64, path: &[u64]) -> u64 {
    derive_seed_path(master, path)
}
