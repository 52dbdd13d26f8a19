use std::io::Read;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Per-node payoff contributions `y` together with their summary statistics.
///
/// The standard deviation uses the population convention (divide by `n`), so
/// `y = std·z + mean·1` holds exactly up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionVector {
    y: Vec<f64>,
    mean: f64,
    std: f64,
    zscores: Vec<f64>,
}

impl ContributionVector {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Validation("contribution vector is empty".into()));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("contribution of node {i} is not finite")));
        }
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        let zscores = if std > 0.0 {
            y.iter().map(|v| (v - mean) / std).collect()
        } else {
            vec![0.0; y.len()]
        };
        Ok(Self {
            y,
            mean,
            std,
            zscores,
        })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(n, 1.0).expect("n >= 1")
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn into_values(self) -> Vec<f64> {
        self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    /// `(y − ȳ)/σ(y)`; all zeros when `σ(y) = 0`.
    pub fn zscores(&self) -> &[f64] {
        &self.zscores
    }

    pub fn l2_norm(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Reads a `node,y` CSV. Every node in `0..n` must appear exactly once.
    pub fn from_csv<R: Read>(reader: R, n: usize) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            node: usize,
            y: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "node" || &headers[1] != "y" {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header \"node,y\", got {:?}", headers.iter().collect::<Vec<_>>()),
            });
        }
        let mut values: Vec<Option<f64>> = vec![None; n];
        for (i, rec) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let row = rec.map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            let slot = values.get_mut(row.node).ok_or_else(|| Error::Parse {
                line,
                msg: format!("node {} out of range for {n} nodes", row.node),
            })?;
            if slot.replace(row.y).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate node {}", row.node),
                });
            }
        }
        let y = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Validation(format!("missing contribution for node {i}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(y)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,y\n");
        for (i, v) in self.y.iter().enumerate() {
            out.push_str(&format!("{i},{v}\n"));
        }
        out
    }
}
