//! Sparse matrices and the linear solvers used by the time steppers.
//!
//! Matrices are stored in CSR form. Linear systems are solved either by a
//! banded LU factorisation with partial pivoting after a reverse
//! Cuthill-McKee reordering, or by Jacobi-preconditioned BiCGSTAB.

mod csr;
mod eigen;
mod lu;
mod ordering;

pub use csr::CsrMatrix;
pub use eigen::{dominant_eigenvalue, growth_rate, EigenEstimate, PowerIteration};
pub use lu::BandedLu;
pub use ordering::reverse_cuthill_mckee;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SparseError {
    #[error("entry ({row}, {col}) outside a {nrows}x{ncols} matrix")]
    IndexOutOfBounds { row: usize, col: usize, nrows: usize, ncols: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular to working precision at pivot {0}")]
    Singular(usize),
    #[error("iterative solver did not converge in {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("iterative solver broke down at iteration {0}")]
    Breakdown(usize),
    #[error("power iteration did not converge in {iterations} iterations (last estimate {estimate:.6e}); the dominant eigenvalue may be complex")]
    EigenNoConvergence { iterations: usize, estimate: f64 },
}

/// How a linear system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SolveMethod {
    /// Banded LU with partial pivoting, factorised once.
    #[default]
    Direct,
    /// Jacobi-preconditioned BiCGSTAB with a relative residual tolerance.
    BiCgStab { tol: f64, max_iter: usize },
}

/// A matrix prepared for repeated solves.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    matrix: CsrMatrix,
    kind: SolverKind,
}

#[derive(Debug, Clone)]
enum SolverKind {
    Direct(BandedLu),
    Iterative { tol: f64, max_iter: usize, inv_diag: Vec<f64> },
}

impl LinearSolver {
    pub fn prepare(matrix: &CsrMatrix, method: SolveMethod) -> Result<Self, SparseError> {
        let (n, m) = matrix.shape();
        if n != m {
            return Err(SparseError::NotSquare(n, m));
        }
        let kind = match method {
            SolveMethod::Direct => SolverKind::Direct(BandedLu::factor(matrix)?),
            SolveMethod::BiCgStab { tol, max_iter } => {
                let mut inv_diag = vec![1.0; n];
                for (i, d) in inv_diag.iter_mut().enumerate() {
                    let a = matrix.get(i, i);
                    if a != 0.0 {
                        *d = 1.0 / a;
                    }
                }
                SolverKind::Iterative { tol, max_iter, inv_diag }
            }
        };
        Ok(LinearSolver { matrix: matrix.clone(), kind })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SparseError> {
        if rhs.len() != self.dim() {
            return Err(SparseError::DimensionMismatch { expected: (self.dim(), 1), found: (rhs.len(), 1) });
        }
        match &self.kind {
            SolverKind::Direct(lu) => Ok(lu.solve(rhs)),
            SolverKind::Iterative { tol, max_iter, inv_diag } => {
                bicgstab(&self.matrix, rhs, inv_diag, *tol, *max_iter).map(|(x, _)| x)
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGSTAB. Returns the solution and iteration count.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    inv_diag: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize), SparseError> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut resid = 1.0;
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(SparseError::Breakdown(it));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = inv_diag[i] * p[i];
        }
        a.matvec_into(&y, &mut v)?;
        let rv = dot(&r_hat, &v);
        if rv == 0.0 {
            return Err(SparseError::Breakdown(it));
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= tol * bnorm {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = inv_diag[i] * s[i];
        }
        a.matvec_into(&z, &mut t)?;
        let tt = dot(&t, &t);
        omega = if tt == 0.0 { 0.0 } else { dot(&t, &s) / tt };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        resid = norm(&r) / bnorm;
        if resid <= tol {
            return Ok((x, it));
        }
    }
    Err(SparseError::NoConvergence { iterations: max_iter, residual: resid })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.5));
            }
        }
        CsrMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0)]).unwrap();
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.nnz(), 2);
        assert!(CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let i = CsrMatrix::identity(4);
        let b = vec![1.0, -2.0, 3.5, 0.25];
        for method in [SolveMethod::Direct, SolveMethod::BiCgStab { tol: 1e-12, max_iter: 10 }] {
            let s = LinearSolver::prepare(&i, method).unwrap();
            assert_eq!(s.solve(&b).unwrap(), b);
        }
    }

    #[test]
    fn two_by_two_by_hand() {
        // [[2, 1], [1, 3]] x = [1, 2] -> x = [1/5, 3/5]
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]).unwrap();
        let x = LinearSolver::prepare(&m, SolveMethod::Direct).unwrap().solve(&[1.0, 2.0]).unwrap();
        assert!((x[0] - 0.2).abs() < 1e-15 && (x[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn zero_row_is_singular() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0)]).unwrap();
        assert!(matches!(LinearSolver::prepare(&m, SolveMethod::Direct), Err(SparseError::Singular(_))));
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let x = LinearSolver::prepare(&m, SolveMethod::Direct).unwrap().solve(&[3.0, 4.0]).unwrap();
        assert_eq!(x, vec![4.0, 3.0]);
    }

    #[test]
    fn direct_and_iterative_agree() {
        let m = laplacian_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let xd = LinearSolver::prepare(&m, SolveMethod::Direct).unwrap().solve(&b).unwrap();
        let xi =
            LinearSolver::prepare(&m, SolveMethod::BiCgStab { tol: 1e-12, max_iter: 500 }).unwrap().solve(&b).unwrap();
        let r = m.matvec(&xd).unwrap();
        for i in 0..50 {
            assert!((r[i] - b[i]).abs() < 1e-12);
            assert!((xd[i] - xi[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn matmul_and_transpose() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]).unwrap();
        let ata = a.transpose().matmul(&a).unwrap();
        assert_eq!(ata.to_dense(), vec![vec![1.0, 0.0, 2.0], vec![0.0, 9.0, 0.0], vec![2.0, 0.0, 4.0]]);
        let s = a.add_scaled(2.0, &a, -1.0).unwrap();
        assert_eq!(s.to_dense(), a.to_dense());
    }

    #[test]
    fn coordinate_dump() {
        let a = CsrMatrix::from_triplets(2, 2, &[(1, 0, 0.5)]).unwrap();
        let mut out = Vec::new();
        a.write_coordinate(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1 0 5.0000000000000000e-1\n");
    }

    #[test]
    fn sparsity_of_single_entry() {
        assert_eq!(CsrMatrix::identity(1).sparsity_percent(), 0.0);
    }
}
