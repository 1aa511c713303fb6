//! Compressed sparse row storage, Dirichlet elimination, sparse Cholesky
//! solves and a condition-number estimate for assembled SPD systems.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            assert!(i < n && j < n, "triplet index out of range");
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut row: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            row.sort_by_key(|e| e.0);
            for &(j, v) in &row {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, &t)
    }

    /// Number of stored entries (explicit zeros included).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.col_idx[p], self.values[p]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(p) => self.values[self.row_ptr[i] + p],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry; also fails on an
    /// asymmetric sparsity pattern.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                let cols = &self.col_idx[self.row_ptr[j]..self.row_ptr[j + 1]];
                if cols.binary_search(&i).is_err() {
                    return f64::INFINITY;
                }
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        // lower triangle only; the factorization reads one side
        let mut t = Vec::with_capacity(self.nnz() / 2 + self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j <= i {
                    t.push(Triplet::new(i, j, v));
                }
            }
        }
        SparseColMat::try_new_from_triplets(self.n, self.n, &t)
            .map_err(|e| Error::Indefinite(format!("sparse matrix construction failed: {e:?}")))
    }
}

/// System left after symmetric elimination of Dirichlet DOFs.
#[derive(Debug, Clone)]
pub struct SpdSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Global index of each reduced unknown.
    pub free: Vec<usize>,
    /// Full-length vector holding the prescribed values (zero on free DOFs).
    pub prescribed: Vec<f64>,
    pub is_fixed: Vec<bool>,
}

impl SpdSystem {
    /// Removes the rows and columns of DOFs with `fixed[i] = Some(value)` and
    /// moves their columns to the right-hand side.
    pub fn eliminate(full: &CsrMatrix, rhs: &[f64], fixed: &[Option<f64>]) -> Self {
        let n = full.n;
        assert_eq!(rhs.len(), n);
        assert_eq!(fixed.len(), n);
        let mut reduced_index = vec![usize::MAX; n];
        let mut free = Vec::new();
        for i in 0..n {
            if fixed[i].is_none() {
                reduced_index[i] = free.len();
                free.push(i);
            }
        }
        let prescribed: Vec<f64> = fixed.iter().map(|v| v.unwrap_or(0.0)).collect();
        let mut triplets = Vec::with_capacity(full.nnz());
        let mut b = Vec::with_capacity(free.len());
        for (ri, &i) in free.iter().enumerate() {
            let mut bi = rhs[i];
            for (j, v) in full.row(i) {
                if fixed[j].is_some() {
                    bi -= v * prescribed[j];
                } else {
                    triplets.push((ri, reduced_index[j], v));
                }
            }
            b.push(bi);
        }
        SpdSystem {
            matrix: CsrMatrix::from_triplets(free.len(), &triplets),
            rhs: b,
            free,
            prescribed,
            is_fixed: fixed.iter().map(Option::is_some).collect(),
        }
    }

    /// Scatters a reduced solution back into a full DOF vector.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut full = self.prescribed.clone();
        for (r, &g) in self.free.iter().enumerate() {
            full[g] = x[r];
        }
        full
    }
}

/// Sparse `LLᵀ` factorization of an SPD matrix.
pub struct Cholesky {
    llt: Option<Llt<usize, f64>>,
    n: usize,
}

impl Cholesky {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        if a.n == 0 {
            return Ok(Cholesky { llt: None, n: 0 });
        }
        let m = a.to_faer()?;
        let llt = m
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Indefinite(format!("Cholesky factorization failed: {e:?}")))?;
        Ok(Cholesky { llt: Some(llt), n: a.n })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        match &self.llt {
            None => Vec::new(),
            Some(llt) => {
                let rhs = Col::<f64>::from_fn(self.n, |i| b[i]);
                let x = llt.solve(&rhs);
                (0..self.n).map(|i| x[i]).collect()
            }
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Full DOF vector, prescribed values included.
    pub solution: Vec<f64>,
    /// `‖Ax - b‖ / ‖b‖` on the reduced system (absolute when `b = 0`).
    pub residual: f64,
}

/// Factorizes and solves the reduced system; the factorization is returned
/// for reuse by [`condition_estimate`].
pub fn solve_spd(system: &SpdSystem) -> Result<(SolveResult, Cholesky)> {
    let chol = Cholesky::new(&system.matrix)?;
    let x = chol.solve(&system.rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Indefinite("non-finite solution".into()));
    }
    let ax = system.matrix.mul_vec(&x);
    let r: Vec<f64> = ax.iter().zip(&system.rhs).map(|(a, b)| a - b).collect();
    let bn = norm(&system.rhs);
    let residual = if bn > 0.0 { norm(&r) / bn } else { norm(&r) };
    Ok((SolveResult { solution: system.expand(&x), residual }, chol))
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ConditionEstimate {
    pub cond: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest eigenvalue of the operator `apply` by power iteration; returns
/// `(eigenvalue, iterations, converged)`.
fn power_iteration(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>, max_iter: usize, tol: f64) -> (f64, usize, bool) {
    // deterministic start with components in every eigendirection of typical stiffness matrices
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i as f64) * 0.618_033_988_75).fract()).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let y = apply(&x);
        let new_lambda: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ny = norm(&y);
        if ny == 0.0 {
            return (0.0, it, true);
        }
        x = y.into_iter().map(|v| v / ny).collect();
        if it > 1 && (new_lambda - lambda).abs() <= tol * new_lambda.abs() {
            return (new_lambda, it, true);
        }
        lambda = new_lambda;
    }
    (lambda, max_iter, false)
}

/// Spectral condition number estimate: power iteration for `λmax` and inverse
/// iteration through the Cholesky factor for `λmin`.
pub fn condition_estimate(a: &CsrMatrix, chol: &Cholesky, max_iter: usize) -> ConditionEstimate {
    if a.n == 0 {
        return ConditionEstimate { cond: 1.0, lambda_max: 0.0, lambda_min: 0.0, iterations: 0, converged: true };
    }
    let tol = 1e-6;
    let (lmax, i1, c1) = power_iteration(a.n, |x| a.mul_vec(x), max_iter, tol);
    let (inv, i2, c2) = power_iteration(a.n, |x| chol.solve(x), max_iter, tol);
    let lmin = 1.0 / inv;
    ConditionEstimate { cond: lmax / lmin, lambda_max: lmax, lambda_min: lmin, iterations: i1 + i2, converged: c1 && c2 }
}
