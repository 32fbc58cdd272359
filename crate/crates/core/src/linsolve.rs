//! Sparse and dense solvers for the absorbing-chain systems `(I - Q)x = b`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub(crate) struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub(crate) fn builder(n: usize) -> CsrBuilder {
        CsrBuilder {
            n,
            row_ptr: vec![0],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub(crate) fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).filter(|&(j, _)| j == i).map(|(_, v)| v).sum())
            .collect()
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    fn residual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.n];
        self.mul_vec(x, &mut ax);
        ax.iter().zip(b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub(crate) struct CsrBuilder {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrBuilder {
    pub(crate) fn push(&mut self, col: usize, val: f64) {
        self.cols.push(col);
        self.vals.push(val);
    }

    pub(crate) fn end_row(&mut self) {
        self.row_ptr.push(self.cols.len());
    }

    pub(crate) fn finish(self) -> CsrMatrix {
        assert_eq!(self.row_ptr.len(), self.n + 1, "row count mismatch");
        CsrMatrix {
            n: self.n,
            row_ptr: self.row_ptr,
            cols: self.cols,
            vals: self.vals,
        }
    }
}

/// Which backend to use for a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Method {
    Dense,
    Iterative,
}

/// Residual target (max-norm) for the iterative solver.
pub(crate) const RESIDUAL_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 20_000;

/// A system matrix prepared for repeated right-hand sides.
pub(crate) enum Solver {
    Dense(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, CsrMatrix),
    Iterative(CsrMatrix, Vec<f64>),
}

impl Solver {
    pub(crate) fn new(a: CsrMatrix, method: Method) -> Result<Self> {
        match method {
            Method::Dense => {
                let lu = a.to_dense().lu();
                if !lu.is_invertible() {
                    return Err(Error::Consistency("singular absorption system".into()));
                }
                Ok(Solver::Dense(lu, a))
            }
            Method::Iterative => {
                let diag = a.diagonal();
                if diag.iter().any(|&d| d == 0.0) {
                    return Err(Error::Consistency("zero diagonal in absorption system".into()));
                }
                let inv = diag.iter().map(|d| 1.0 / d).collect();
                Ok(Solver::Iterative(a, inv))
            }
        }
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            Solver::Dense(lu, a) => {
                let x = lu
                    .solve(&DVector::from_column_slice(b))
                    .ok_or_else(|| Error::Consistency("singular absorption system".into()))?;
                let x: Vec<f64> = x.iter().copied().collect();
                let scale = 1.0 + b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                let resid = a.residual_norm(&x, b);
                if resid > 1e-9 * scale {
                    return Err(Error::Consistency(format!("dense solve residual {resid:e}")));
                }
                Ok(x)
            }
            Solver::Iterative(a, inv_diag) => bicgstab(a, inv_diag, b),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Jacobi-preconditioned BiCGSTAB, iterated until the true residual
/// `max|Ax - b|` drops below [`RESIDUAL_TOL`] (relative to `max|b|` when that
/// exceeds 1).
fn bicgstab(a: &CsrMatrix, inv_diag: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    let tol = RESIDUAL_TOL * max_abs(b).max(1.0);
    let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(inv_diag).map(|(x, d)| x * d).collect() };

    let mut x = precond(b);
    let mut r = vec![0.0; n];
    a.mul_vec(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    if max_abs(&r) <= tol {
        return Ok(x);
    }
    let mut r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];

    for _ in 0..MAX_ITERS {
        let mut rho_next = dot(&r_hat, &r);
        if rho_next.abs() < 1e-300 || omega == 0.0 {
            // Breakdown: restart from the current iterate.
            r_hat.copy_from_slice(&r);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            v.fill(0.0);
            p.fill(0.0);
            rho_next = dot(&r_hat, &r);
        }
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = precond(&p);
        a.mul_vec(&p_hat, &mut v);
        alpha = rho / dot(&r_hat, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if max_abs(&s) <= tol {
            let candidate: Vec<f64> = x.iter().zip(&p_hat).map(|(xi, pi)| xi + alpha * pi).collect();
            if a.residual_norm(&candidate, b) <= tol {
                return Ok(candidate);
            }
        }
        let s_hat = precond(&s);
        a.mul_vec(&s_hat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt == 0.0 { 0.0 } else { dot(&t, &s) / tt };
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        if max_abs(&r) <= tol {
            // Recompute the true residual to guard against drift.
            a.mul_vec(&x, &mut t);
            for i in 0..n {
                r[i] = b[i] - t[i];
            }
            if max_abs(&r) <= tol {
                return Ok(x);
            }
        }
    }
    Err(Error::Consistency(format!(
        "BiCGSTAB did not reach residual {tol:e} in {MAX_ITERS} iterations"
    )))
}
