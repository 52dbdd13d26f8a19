//! Leading eigenpair of the adjacency matrix.
//!
//! Shifted power iteration from the uniform start vector. When the residual
//! stops shrinking the iterate is replaced by the top Ritz vector of a small
//! Krylov subspace built from it, which handles near-degenerate spectra
//! (ring-like Watts-Strogatz graphs) without giving up determinism.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

const STALL_WINDOW: usize = 50;
const KRYLOV_DIM: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralInfo {
    pub lambda1: f64,
    /// Unit-norm, entrywise nonnegative leading eigenvector.
    pub u1: Vec<f64>,
    /// Number of adjacency products performed.
    pub iterations: usize,
    /// `‖A·u1 − λ1·u1‖₂` of the returned pair.
    pub residual: f64,
}

impl SpectralInfo {
    pub fn spreadability(&self, p: f64) -> f64 {
        p * self.lambda1
    }
}

/// Leading eigenpair with the default tolerance and iteration cap.
pub fn leading_eigenpair_default(g: &Graph) -> Result<SpectralInfo> {
    leading_eigenpair(g, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Computes `(λ1, u1)` of `A`.
///
/// An edgeless graph yields `λ1 = 0` and the uniform vector. On a
/// disconnected graph the result is the eigenpair of the dominant component;
/// entries elsewhere may be ~0.
pub fn leading_eigenpair(g: &Graph, tol: f64, max_iter: usize) -> Result<SpectralInfo> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Validation("eigenpair of an empty graph".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    let uniform = 1.0 / (n as f64).sqrt();
    if g.num_edges() == 0 {
        return Ok(SpectralInfo {
            lambda1: 0.0,
            u1: vec![uniform; n],
            iterations: 0,
            residual: 0.0,
        });
    }

    // The shift keeps -λ1 (bipartite graphs) from competing with λ1.
    let shift = g.num_edges() as f64 / n as f64;

    let mut x = vec![uniform; n];
    let mut ax = vec![0.0; n];
    let mut iterations = 0;
    let mut last_check = f64::INFINITY;
    let mut residual = f64::INFINITY;

    while iterations < max_iter {
        g.matvec_into(&x, &mut ax);
        iterations += 1;
        let lambda = dot(&x, &ax);
        residual = residual_norm(&ax, &x, lambda);
        if residual <= tol {
            return Ok(finish(g, x, iterations));
        }
        if iterations % STALL_WINDOW == 0 {
            if residual > 0.5 * last_check {
                let (refined, used) = krylov_restart(g, &x);
                iterations += used;
                x = refined;
                last_check = f64::INFINITY;
                continue;
            }
            last_check = residual;
        }
        for (xi, &ai) in x.iter_mut().zip(&ax) {
            *xi = ai + shift * *xi;
        }
        normalize(&mut x);
    }
    Err(Error::NonConvergence {
        iterations,
        residual,
    })
}

/// `p·λ1`.
pub fn spreadability(g: &Graph, p: f64) -> Result<f64> {
    Ok(leading_eigenpair_default(g)?.spreadability(p))
}

fn finish(g: &Graph, mut x: Vec<f64>, iterations: usize) -> SpectralInfo {
    // Orient so the largest-magnitude entry is positive, then clamp the
    // numerical noise below zero.
    let pivot = x
        .iter()
        .copied()
        .fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
    if pivot < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    normalize(&mut x);
    let mut ax = vec![0.0; x.len()];
    g.matvec_into(&x, &mut ax);
    let lambda1 = dot(&x, &ax);
    let residual = residual_norm(&ax, &x, lambda1);
    SpectralInfo {
        lambda1,
        u1: x,
        iterations,
        residual,
    }
}

/// Rayleigh-Ritz on the Krylov space `span{x, Ax, A²x, ...}` with full
/// reorthogonalization. Returns the top Ritz vector and the number of
/// products used.
fn krylov_restart(g: &Graph, x: &[f64]) -> (Vec<f64>, usize) {
    let n = g.n();
    let dim = KRYLOV_DIM.min(n);
    let mut start = x.to_vec();
    normalize(&mut start);

    let mut basis: Vec<Vec<f64>> = vec![start];
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut used = 0;
    while images.len() < basis.len() {
        let mut w = vec![0.0; n];
        g.matvec_into(basis.last().unwrap(), &mut w);
        used += 1;
        images.push(w.clone());
        if basis.len() == dim {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm < 1e-12 {
            break;
        }
        w.iter_mut().for_each(|v| *v /= norm);
        basis.push(w);
    }
    let k = images.len();
    let h = DMatrix::from_fn(k, k, |a, b| 0.5 * (dot(&basis[a], &images[b]) + dot(&basis[b], &images[a])));
    let eig = SymmetricEigen::new(h);
    let top = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > eig.eigenvalues[best] { i } else { best });
    let mut out = vec![0.0; n];
    for (j, b) in basis.iter().take(k).enumerate() {
        let c = eig.eigenvectors[(j, top)];
        out.iter_mut().zip(b).for_each(|(o, bi)| *o += c * bi);
    }
    normalize(&mut out);
    (out, used)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

fn residual_norm(ax: &[f64], x: &[f64], lambda: f64) -> f64 {
    ax.iter()
        .zip(x)
        .map(|(a, v)| (a - lambda * v).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::dense;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;

    fn check_invariants(g: &Graph, s: &SpectralInfo) {
        let norm = dot(&s.u1, &s.u1).sqrt();
        assert!((norm - 1.0).abs() <= 1e-10, "norm {norm}");
        assert!(s.u1.iter().all(|&v| v >= -1e-10));
        let au = g.matvec(&s.u1).unwrap();
        assert!(residual_norm(&au, &s.u1, s.lambda1) <= 1e-9);
    }

    #[test]
    fn triangle() {
        let g = super::super::graph::fixtures::triangle();
        let s = leading_eigenpair_default(&g).unwrap();
        assert!((s.lambda1 - 2.0).abs() < 1e-12);
        for v in &s.u1 {
            assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
        check_invariants(&g, &s);
    }

    #[test]
    fn path_is_bipartite_but_converges() {
        let g = path3();
        let s = leading_eigenpair_default(&g).unwrap();
        assert!((s.lambda1 - 2f64.sqrt()).abs() < 1e-10);
        let want = [0.5, 0.5f64.sqrt(), 0.5];
        for (a, b) in s.u1.iter().zip(want) {
            assert!((a - b).abs() < 1e-9);
        }
        check_invariants(&g, &s);
    }

    #[test]
    fn edgeless_convention() {
        let s = leading_eigenpair_default(&Graph::empty(4)).unwrap();
        assert_eq!(s.lambda1, 0.0);
        assert_eq!(s.u1, vec![0.5; 4]);
        assert!(leading_eigenpair_default(&Graph::empty(0)).is_err());
        assert!(leading_eigenpair(&path3(), 0.0, 10).is_err());
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let g = star(40);
        match leading_eigenpair(&g, 1e-14, 1) {
            Err(Error::NonConvergence { iterations, residual }) => {
                assert_eq!(iterations, 1);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn star_spectrum() {
        let g = star(10);
        let s = leading_eigenpair_default(&g).unwrap();
        assert!((s.lambda1 - 3.0).abs() < 1e-10);
        check_invariants(&g, &s);
    }

    #[test]
    fn disconnected_picks_dominant_component() {
        // K4 (λ = 3) plus a disjoint edge (λ = 1).
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5)]).unwrap();
        let s = leading_eigenpair_default(&g).unwrap();
        assert!((s.lambda1 - 3.0).abs() < 1e-10);
        assert!(s.u1[4] < 1e-8 && s.u1[5] < 1e-8);
        check_invariants(&g, &s);
    }

    #[test]
    fn ring_lattice_with_one_shortcut() {
        // Nearly regular and nearly degenerate: exercises the Krylov restart.
        let n = 300;
        let mut edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| [(i, (i + 1) % n), (i, (i + 2) % n)])
            .collect();
        edges.push((0, 150));
        let g = Graph::from_edges(n, edges).unwrap();
        let s = leading_eigenpair_default(&g).unwrap();
        check_invariants(&g, &s);
        assert!(s.lambda1 > 4.0);
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        (2usize..=8).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
                let edges = pairs.iter().zip(mask).filter(|(_, keep)| *keep).map(|(e, _)| *e);
                Graph::from_edges(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn matches_dense_oracle(g in small_graph()) {
            let s = leading_eigenpair_default(&g).unwrap();
            let (lambda, v) = dense::top_eigenpair(&g);
            prop_assert!((s.lambda1 - lambda).abs() <= 1e-8);
            if g.num_edges() > 0 {
                check_invariants(&g, &s);
            }
            // The dense eigenvector is only unique on connected graphs.
            if g.is_connected() {
                let cos = dot(&s.u1, &v).abs();
                prop_assert!(cos >= 1.0 - 1e-8, "cos {}", cos);
            }
        }

        #[test]
        fn rayleigh_bound(g in small_graph(), raw in proptest::collection::vec(-1.0f64..1.0, 8)) {
            let mut x = raw[..g.n()].to_vec();
            let norm = dot(&x, &x).sqrt();
            prop_assume!(norm > 1e-6);
            x.iter_mut().for_each(|v| *v /= norm);
            let s = leading_eigenpair_default(&g).unwrap();
            prop_assert!(g.quadratic_form(&x).unwrap() <= s.lambda1 + 1e-8);
        }

        #[test]
        fn ones_give_degrees(g in small_graph()) {
            let d: Vec<f64> = g.degrees().iter().map(|&d| d as f64).collect();
            prop_assert_eq!(g.matvec(&vec![1.0; g.n()]).unwrap(), d);
        }

        #[test]
        fn edge_list_roundtrip(g in small_graph()) {
            let back = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
            prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn spreadability_examples() {
        let k3 = super::super::graph::fixtures::triangle();
        assert!((spreadability(&k3, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(spreadability(&k3, 0.0).unwrap(), 0.0);
        assert!((spreadability(&path3(), 0.5).unwrap() - 0.707107).abs() < 1e-6);
    }
}
