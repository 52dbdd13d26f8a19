//! Ordinary least squares with a percentile bootstrap interval for R².

use std::io::Read;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

pub const DEFAULT_BOOTSTRAP_RUNS: usize = 1000;

/// Pivots below this fraction of the largest one count as rank deficiency.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub r_squared: f64,
    pub r2_ci_low: f64,
    pub r2_ci_high: f64,
    pub observations: usize,
    pub bootstrap_runs: usize,
}

impl RegressionResult {
    /// Coefficient ± 1.96 standard errors.
    pub fn coefficient_ci(&self, j: usize) -> (f64, f64) {
        let half = 1.96 * self.std_errors[j];
        (self.coefficients[j] - half, self.coefficients[j] + half)
    }

    /// `term,coefficient,std_error` rows followed by the R² summary rows.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("term,coefficient,std_error\n");
        for (j, (c, s)) in self.coefficients.iter().zip(&self.std_errors).enumerate() {
            let name = names.get(j).cloned().unwrap_or_else(|| format!("x{j}"));
            out.push_str(&format!("{name},{c},{s}\n"));
        }
        out.push_str(&format!("r_squared,{},\n", self.r_squared));
        out.push_str(&format!("r2_ci_low,{},\n", self.r2_ci_low));
        out.push_str(&format!("r2_ci_high,{},\n", self.r2_ci_high));
        out
    }
}

struct Fit {
    coefficients: DVector<f64>,
    std_errors: Vec<f64>,
    r_squared: f64,
}

fn fit(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<Fit> {
    let (n, k) = x.shape();
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if scale == 0.0 || r.diagonal().iter().any(|d| d.abs() <= RANK_TOL * scale) {
        return Err(Error::RankDeficient);
    }
    let qty = qr.q().transpose() * y;
    let coefficients = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;
    let resid = y - x * &coefficients;
    let rss = resid.norm_squared();
    let mean = y.mean();
    let tss = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let r_squared = if tss == 0.0 { 0.0 } else { (1.0 - rss / tss).clamp(0.0, 1.0) };
    let sigma2 = rss / (n - k) as f64;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::RankDeficient)?;
    let std_errors = (0..k)
        .map(|j| (sigma2 * r_inv.row(j).norm_squared()).sqrt())
        .collect();
    Ok(Fit {
        coefficients,
        std_errors,
        r_squared,
    })
}

/// Least squares of `y_dep` on the rows of `x` (include an intercept column
/// yourself). The R² interval comes from `bootstrap_runs` row resamples;
/// resamples that lose full rank are skipped.
pub fn ols_fit(x: &[Vec<f64>], y_dep: &[f64], bootstrap_runs: usize, rng_seed: u64) -> Result<RegressionResult> {
    let n = x.len();
    if y_dep.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y_dep.len(),
        });
    }
    let k = x.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::Validation("regression needs at least one regressor".into()));
    }
    if let Some(i) = x.iter().position(|row| row.len() != k) {
        return Err(Error::Validation(format!("row {i} has {} columns, expected {k}", x[i].len())));
    }
    if n <= k {
        return Err(Error::Validation(format!("need more rows than columns, got {n} × {k}")));
    }
    if x.iter().flatten().chain(y_dep).any(|v| !v.is_finite()) {
        return Err(Error::Validation("regression inputs must be finite".into()));
    }
    let xm = DMatrix::from_fn(n, k, |i, j| x[i][j]);
    let yv = DVector::from_column_slice(y_dep);
    let point = fit(&xm, &yv)?;

    let (r2_ci_low, r2_ci_high) = if bootstrap_runs == 0 {
        (point.r_squared, point.r_squared)
    } else {
        let mut samples: Vec<f64> = (0..bootstrap_runs)
            .into_par_iter()
            .filter_map(|b| {
                let mut rng = seeded(derive_seed(rng_seed, b as u64));
                let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let xb = DMatrix::from_fn(n, k, |i, j| x[rows[i]][j]);
                let yb = DVector::from_fn(n, |i, _| y_dep[rows[i]]);
                fit(&xb, &yb).ok().map(|f| f.r_squared)
            })
            .collect();
        if samples.len() * 2 < bootstrap_runs {
            return Err(Error::Degenerate(format!(
                "only {} of {bootstrap_runs} bootstrap resamples had full rank",
                samples.len()
            )));
        }
        samples.sort_by(f64::total_cmp);
        (quantile(&samples, 0.025), quantile(&samples, 0.975))
    };

    Ok(RegressionResult {
        coefficients: point.coefficients.iter().copied().collect(),
        std_errors: point.std_errors,
        r_squared: point.r_squared,
        r2_ci_low,
        r2_ci_high,
        observations: n,
        bootstrap_runs,
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// A regression table read from CSV: the dependent column plus every other
/// column as a regressor, with an intercept prepended.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub names: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

pub fn read_regression_csv<R: Read>(reader: R, dependent: &str) -> Result<RegressionData> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let dep = headers.iter().position(|h| h == dependent).ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("no column named {dependent:?}"),
    })?;
    let mut names = vec!["intercept".to_owned()];
    names.extend(headers.iter().enumerate().filter(|&(j, _)| j != dep).map(|(_, h)| h.clone()));
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let vals = rec
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("not a number: {s:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut row = vec![1.0];
        row.extend(vals.iter().enumerate().filter(|&(j, _)| j != dep).map(|(_, v)| *v));
        y.push(vals[dep]);
        x.push(row);
    }
    Ok(RegressionData { names, x, y })
}
