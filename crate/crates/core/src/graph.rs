//! Undirected simple graphs in compressed sparse row form.
//!
//! Node ids are dense `0..n`. Every undirected edge `{u, v}` is stored twice in
//! the adjacency (once in each endpoint's row) and once in the canonical edge
//! list as `(min, max)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Sorted unique `(u, v)` pairs with `u < v`.
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    /// Row-wise sorted neighbor lists.
    targets: Vec<u32>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Duplicate pairs (in either orientation)
    /// collapse to one edge; self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::TooLarge(format!("{n} nodes exceeds u32 id space")));
        }
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::Validation(format!("self-loop on node {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            canon.push((a as u32, b as u32));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Self::from_canonical(n, canon))
    }

    fn from_canonical(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        // Edges are sorted by (u, v), so filling rows in this order leaves
        // every row sorted: for row w, entries pointing to smaller ids come
        // from pairs (x, w) which sort before pairs (w, y).
        for &(u, v) in &edges {
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for &(u, v) in &edges {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
        }
        Self {
            n,
            edges,
            offsets,
            targets,
        }
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Range of positions in the adjacency storage belonging to row `i`.
    /// Per-edge probabilities are aligned with these positions.
    pub(crate) fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub(crate) fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// `A·x`, in `O(|edges|)`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut out = vec![0.0; self.n];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    /// `out = A·x`. Lengths must already match `n`.
    pub(crate) fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &j in self.neighbors(i) {
                acc += x[j as usize];
            }
            *o = acc;
        }
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got,
            });
        }
        Ok(())
    }

    /// `xᵀAx` summed over stored edges.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self
            .edges
            .iter()
            .map(|&(u, v)| 2.0 * x[u as usize] * x[v as usize])
            .sum())
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u) {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Parses the whitespace-separated `u v` edge-list format. Blank lines and
    /// lines starting with `#` are skipped. The node count is `max_id + 1`.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut max_id: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let mut tokens = line.split_whitespace();
            let mut next_id = |what: &str| -> Result<usize> {
                let tok = tokens.next().ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("missing {what} node id"),
                })?;
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid node id {tok:?}"),
                })
            };
            let u = next_id("first")?;
            let v = next_id("second")?;
            if let Some(extra) = tokens.next() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unexpected trailing token {extra:?}"),
                });
            }
            if u == v {
                return Err(Error::Validation(format!(
                    "line {lineno}: self-loop on node {u}"
                )));
            }
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            pairs.push((u, v));
        }
        let n = max_id.map_or(0, |m| m + 1);
        Self::from_edges(n, pairs)
    }

    /// Serializes as sorted unique `u v` lines with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 8);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Per-edge transmission probabilities: either one `p` for every edge, or a
/// value for each stored adjacency entry (`P∘A`).
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeProbabilities {
    Homogeneous(f64),
    PerEdge(Vec<f64>),
}

impl EdgeProbabilities {
    pub fn homogeneous(p: f64) -> Result<Self> {
        check_prob(p)?;
        Ok(Self::Homogeneous(p))
    }

    /// Builds `P∘A` from `(u, v, p)` triples. Each pair must be an edge of
    /// `g`; unlisted edges get probability 0. The result is symmetric.
    pub fn per_edge(g: &Graph, triples: &[(usize, usize, f64)]) -> Result<Self> {
        let mut values = vec![0.0; g.targets.len()];
        for &(u, v, p) in triples {
            check_prob(p)?;
            if !g.has_edge(u, v) {
                return Err(Error::Validation(format!("({u}, {v}) is not an edge")));
            }
            for (a, b) in [(u, v), (v, u)] {
                let pos = g.offsets[a] + g.neighbors(a).binary_search(&(b as u32)).unwrap();
                values[pos] = p;
            }
        }
        Ok(Self::PerEdge(values))
    }

    /// Probability of the adjacency entry at storage position `pos`.
    #[inline]
    pub(crate) fn at(&self, pos: usize) -> f64 {
        match self {
            Self::Homogeneous(p) => *p,
            Self::PerEdge(v) => v[pos],
        }
    }

    pub(crate) fn check(&self, g: &Graph) -> Result<()> {
        if let Self::PerEdge(v) = self {
            if v.len() != g.targets.len() {
                return Err(Error::DimensionMismatch {
                    expected: g.targets.len(),
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    /// `out = (P∘A)·x`.
    pub(crate) fn weighted_matvec_into(&self, g: &Graph, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Homogeneous(p) => {
                g.matvec_into(x, out);
                for o in out.iter_mut() {
                    *o *= p;
                }
            }
            Self::PerEdge(w) => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for pos in g.row_range(i) {
                        acc += w[pos] * x[g.targets[pos] as usize];
                    }
                    *o = acc;
                }
            }
        }
    }
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Graph;

    pub fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    pub fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).unwrap()
    }

    pub fn star(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (0, v))).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn parse_path() {
        let g = Graph::parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g, path3());
    }

    #[test]
    fn parse_dedups_symmetric_duplicates() {
        let g = Graph::parse_edge_list("0 1\n1 0\n0 1").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn parse_rejects_self_loop() {
        let err = Graph::parse_edge_list("0 0").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn parse_reports_line_number() {
        let err = Graph::parse_edge_list("# header\n0 1\n\n1 x\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other}"),
        }
        assert!(Graph::parse_edge_list("0 -1").is_err());
        assert!(Graph::parse_edge_list("0").is_err());
        assert!(Graph::parse_edge_list("0 1 2").is_err());
    }

    #[test]
    fn parse_tolerates_whitespace_and_comments() {
        let g = Graph::parse_edge_list("  # c\n\t3   1  \n\n# 9 9\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 3)]);
    }

    #[test]
    fn rows_are_sorted() {
        let g = Graph::from_edges(5, [(4, 0), (2, 0), (0, 1), (3, 2), (1, 2)]).unwrap();
        for i in 0..g.n() {
            let row = g.neighbors(i);
            assert!(row.windows(2).all(|w| w[0] < w[1]), "row {i}: {row:?}");
        }
        assert_eq!(g.neighbors(0), &[1, 2, 4]);
        assert_eq!(g.neighbors(2), &[0, 1, 3]);
    }

    #[test]
    fn matvec_examples() {
        assert_eq!(path3().matvec(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 2.0, 1.0]);
        assert_eq!(triangle().matvec(&[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 1.0, 1.0]);
        assert_eq!(path3().matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![2.0, 4.0, 2.0]);
        assert!(matches!(
            path3().matvec(&[1.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn degrees_sum_to_twice_edges() {
        let g = star(5);
        assert_eq!(g.degrees(), vec![4, 1, 1, 1, 1]);
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.num_edges());
    }

    #[test]
    fn per_edge_probabilities_are_symmetric() {
        let g = path3();
        let probs = EdgeProbabilities::per_edge(&g, &[(1, 0, 0.25)]).unwrap();
        let mut out = vec![0.0; 3];
        probs.weighted_matvec_into(&g, &[1.0, 1.0, 1.0], &mut out);
        assert_eq!(out, vec![0.25, 0.25, 0.0]);
        assert!(EdgeProbabilities::per_edge(&g, &[(0, 2, 0.5)]).is_err());
        assert!(EdgeProbabilities::per_edge(&g, &[(0, 1, 1.5)]).is_err());
        assert!(EdgeProbabilities::homogeneous(-0.1).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(path3().is_connected());
        assert!(!Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap().is_connected());
    }
}
