//! Compressed sparse row matrices and the iterative solvers used by the
//! weak-form and Shortley-Weller assemblies.

use crate::error::{Result, SolverError};

/// Default relative residual tolerance for the iterative solvers.
pub const DEFAULT_CG_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicate entries are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        let mut next = counts.clone();
        for &(r, c, v) in triplets {
            let k = next[r];
            cols[k] = c;
            vals[k] = v;
            next[r] += 1;
        }
        // sort each row and merge duplicates
        let mut row_ptr = vec![0usize; n + 1];
        let mut out_cols = Vec::with_capacity(triplets.len());
        let mut out_vals = Vec::with_capacity(triplets.len());
        for r in 0..n {
            let (lo, hi) = (counts[r], counts[r + 1]);
            let mut row: Vec<(usize, f64)> =
                cols[lo..hi].iter().copied().zip(vals[lo..hi].iter().copied()).collect();
            row.sort_by_key(|e| e.0);
            let mut i = 0;
            while i < row.len() {
                let (c, mut v) = row[i];
                let mut j = i + 1;
                while j < row.len() && row[j].0 == c {
                    v += row[j].1;
                    j += 1;
                }
                out_cols.push(c);
                out_vals.push(v);
                i = j;
            }
            row_ptr[r + 1] = out_cols.len();
        }
        Self {
            n,
            row_ptr,
            cols: out_cols,
            vals: out_vals,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[r] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] == r {
                    d[r] = self.vals[k];
                }
            }
        }
        d
    }

    /// Maximum absolute asymmetry |A − Aᵀ| entry, for assembly checks.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                let mut vt = 0.0;
                for k2 in self.row_ptr[c]..self.row_ptr[c + 1] {
                    if self.cols[k2] == r {
                        vt = self.vals[k2];
                    }
                }
                worst = worst.max((self.vals[k] - vt).abs());
            }
        }
        worst
    }
}

/// A sparse linear system with its solve parameters.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub tol: f64,
    pub max_iters: usize,
}

impl SparseSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>, tol: f64) -> Self {
        let max_iters = default_max_iters(matrix.n);
        Self {
            matrix,
            rhs,
            tol,
            max_iters,
        }
    }
}

pub fn default_max_iters(n: usize) -> usize {
    500 * (n as f64).sqrt().ceil() as usize + 100
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned conjugate gradients for SPD systems.
pub fn cg_solve(system: &SparseSystem) -> Result<(Vec<f64>, SolveStats)> {
    let a = &system.matrix;
    let b = &system.rhs;
    let n = a.n;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats::default()));
    }
    let dinv: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for iter in 0..system.max_iters {
        let rnorm = norm(&r);
        if rnorm <= system.tol * bnorm {
            return Ok((
                x,
                SolveStats {
                    iterations: iter,
                    residual: rnorm / bnorm,
                },
            ));
        }
        a.matvec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rnorm = norm(&r) / bnorm;
    if rnorm <= system.tol * 10.0 {
        // close enough to the floor to accept
        return Ok((
            x,
            SolveStats {
                iterations: system.max_iters,
                residual: rnorm,
            },
        ));
    }
    Err(SolverError::NoConvergence {
        method: "cg".into(),
        iterations: system.max_iters,
        residual: rnorm,
    }
    .into())
}

/// Jacobi-preconditioned BiCGSTAB for the nonsymmetric Shortley-Weller
/// system (an M-matrix).
pub fn bicgstab_solve(system: &SparseSystem) -> Result<(Vec<f64>, SolveStats)> {
    let a = &system.matrix;
    let b = &system.rhs;
    let n = a.n;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats::default()));
    }
    let dinv: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut s = vec![0.0; n];
    for iter in 0..system.max_iters {
        let rnorm = norm(&r);
        if rnorm <= system.tol * bnorm {
            return Ok((
                x,
                SolveStats {
                    iterations: iter,
                    residual: rnorm / bnorm,
                },
            ));
        }
        let rho_new = dot(&r0, &r);
        if rho_new.abs() < 1e-300 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        for i in 0..n {
            phat[i] = p[i] * dinv[i];
        }
        a.matvec(&phat, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= system.tol * bnorm {
            for i in 0..n {
                x[i] += alpha * phat[i];
            }
            return Ok((
                x,
                SolveStats {
                    iterations: iter + 1,
                    residual: norm(&s) / bnorm,
                },
            ));
        }
        for i in 0..n {
            shat[i] = s[i] * dinv[i];
        }
        a.matvec(&shat, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        if omega.abs() < 1e-300 {
            break;
        }
    }
    let rnorm = norm(&r) / bnorm;
    if rnorm <= system.tol * 10.0 {
        return Ok((
            x,
            SolveStats {
                iterations: system.max_iters,
                residual: rnorm,
            },
        ));
    }
    Err(SolverError::NoConvergence {
        method: "bicgstab".into(),
        iterations: system.max_iters,
        residual: rnorm,
    }
    .into())
}
