//! Report rows and convergence-rate tables.

use serde::{Deserialize, Serialize};

use crate::dfn::DfnReport;
use crate::error::{Error, Result};

/// One solve, as written by the `solve`, `dfn-solve` and `convergence` commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub mesh: String,
    pub lambda: f64,
    pub k: usize,
    pub cells: usize,
    pub dofs: usize,
    pub energy_before: i64,
    pub energy_after: i64,
    pub h: f64,
    pub err_l2: Option<f64>,
    pub err_h1: Option<f64>,
    pub nnz: usize,
    pub cond: Option<f64>,
    pub max_pi_nabla: f64,
    pub max_pi_0: f64,
    pub wall_seconds: f64,
}

impl ReportRow {
    pub fn from_dfn(mesh: &str, r: &DfnReport) -> Self {
        ReportRow {
            mesh: mesh.to_string(),
            lambda: r.lambda,
            k: r.k,
            cells: r.cells,
            dofs: r.dofs,
            energy_before: r.energy_before,
            energy_after: r.energy_after,
            h: r.h,
            err_l2: r.err_l2,
            err_h1: r.err_h1,
            nnz: r.nnz,
            cond: r.cond.map(|c| c.cond),
            max_pi_nabla: r.max_pi_nabla,
            max_pi_0: r.max_pi_0,
            wall_seconds: r.mesh_seconds + r.solve_seconds,
        }
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Config(format!("need at least two matching points for a slope, got {} and {}", x.len(), y.len())));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Config("slopes need positive finite values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("all abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub lambda: f64,
    pub k: usize,
    pub points: usize,
    pub l2_vs_h: f64,
    pub h1_vs_h: f64,
    pub l2_vs_dofs: f64,
    pub h1_vs_dofs: f64,
}

/// Errors of the unagglomerated run rescaled to another DOF count with the
/// optimal rates: `e0 (N / N0)^(-r/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub mesh: String,
    pub lambda: f64,
    pub k: usize,
    pub dofs: usize,
    pub err_l2: f64,
    pub err_h1: f64,
    pub expected_l2: f64,
    pub expected_h1: f64,
}

/// Rate rows per `(λ, k)` group, in first-appearance order.
pub fn rate_table(rows: &[ReportRow]) -> Result<Vec<RateRow>> {
    let mut keys: Vec<(f64, usize)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(l, k)| l == r.lambda && k == r.k) {
            keys.push((r.lambda, r.k));
        }
    }
    keys.iter()
        .map(|&(lambda, k)| {
            let g: Vec<&ReportRow> = rows.iter().filter(|r| r.lambda == lambda && r.k == k).collect();
            if g.len() < 3 {
                return Err(Error::Config(format!("λ = {lambda}, k = {k}: need at least 3 refinements, got {}", g.len())));
            }
            let col = |f: fn(&ReportRow) -> Option<f64>| -> Result<Vec<f64>> {
                g.iter().map(|r| f(r).ok_or_else(|| Error::Config(format!("row '{}' has no error norms", r.mesh)))).collect()
            };
            let h: Vec<f64> = g.iter().map(|r| r.h).collect();
            let n: Vec<f64> = g.iter().map(|r| r.dofs as f64).collect();
            let l2 = col(|r| r.err_l2)?;
            let h1 = col(|r| r.err_h1)?;
            Ok(RateRow {
                lambda,
                k,
                points: g.len(),
                l2_vs_h: log_slope(&h, &l2)?,
                h1_vs_h: log_slope(&h, &h1)?,
                l2_vs_dofs: log_slope(&n, &l2)?,
                h1_vs_dofs: log_slope(&n, &h1)?,
            })
        })
        .collect()
}

/// Expected-error rows for every run with λ > 0 that has a λ = 0 run on the same mesh and order.
pub fn expected_errors(rows: &[ReportRow]) -> Vec<ExpectedRow> {
    rows.iter()
        .filter(|r| r.lambda > 0.0)
        .filter_map(|r| {
            let base = rows.iter().find(|b| b.lambda == 0.0 && b.k == r.k && b.mesh == r.mesh)?;
            let ratio = r.dofs as f64 / base.dofs as f64;
            let k = r.k as f64;
            Some(ExpectedRow {
                mesh: r.mesh.clone(),
                lambda: r.lambda,
                k: r.k,
                dofs: r.dofs,
                err_l2: r.err_l2?,
                err_h1: r.err_h1?,
                expected_l2: base.err_l2? * ratio.powf(-(k + 1.0) / 2.0),
                expected_h1: base.err_h1? * ratio.powf(-k / 2.0),
            })
        })
        .collect()
}
