//! Shared oracles for the integration suites: a dense matrix exponential, the
//! vectorized Lindblad superoperator, a trace-distance metric, and a
//! bisection eigenvalue solver for real symmetric matrices. These are kept
//! deliberately independent of the library's own numerics.

// each integration test binary compiles this module separately and uses a
// different subset of it
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Matrix exponential by scaling and squaring with a Taylor series on the
/// scaled matrix. Accurate to machine precision for the moderate norms used
/// in the tests.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = a.iter().map(|c| c.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a * Complex64::new(1.0 / 2f64.powi(squarings as i32), 0.0);
    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..40 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
        if term.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-300 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Column-major vectorization of a matrix.
pub fn vec_col(m: &CMatrix) -> CMatrix {
    let (r, c) = (m.nrows(), m.ncols());
    let mut v = CMatrix::zeros(r * c, 1);
    for j in 0..c {
        for i in 0..r {
            v[(j * r + i, 0)] = m[(i, j)];
        }
    }
    v
}

/// Inverse of `vec_col` for a square matrix.
pub fn unvec_col(v: &CMatrix, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] = v[(j * n + i, 0)];
        }
    }
    m
}

/// Vectorized Lindblad generator acting on vec(rho) (column-major):
/// L = -i (I (x) H - H^T (x) I)
///     + sum_k [ conj(L_k) (x) L_k
///               - 1/2 (I (x) L_k^dag L_k + (L_k^dag L_k)^T (x) I) ].
pub fn lindblad_superoperator(h: &CMatrix, collapse: &[CMatrix]) -> CMatrix {
    let n = h.nrows();
    let id = CMatrix::identity(n, n);
    let i = Complex64::new(0.0, 1.0);
    let mut sup = (kron(&id, h) - kron(&h.transpose(), &id)) * (-i);
    for l in collapse {
        let ldl = l.adjoint() * l;
        sup += kron(&l.conjugate(), l);
        sup -= (kron(&id, &ldl) + kron(&ldl.transpose(), &id)) * Complex64::new(0.5, 0.0);
    }
    sup
}

/// Trace distance 1/2 ||rho_a - rho_b||_1 via Hermitian eigenvalues.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    // symmetrize away numerical anti-Hermitian noise before the eigensolver
    let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen().eigenvalues;
    0.5 * eig.iter().map(|v| v.abs()).sum::<f64>()
}

/// Eigenvalues of a real symmetric matrix by bisection on the inertia of
/// A - x I, computed with a symmetric LDL^T elimination. Independent of any
/// rotation-based eigensolver. Returns values sorted ascending.
pub fn symmetric_eigenvalues_bisect(a: &DMatrix<f64>, tol: f64) -> Vec<f64> {
    let n = a.nrows();
    // count of eigenvalues strictly below x = negative pivots of LDL^T(A - xI)
    let count_below = |x: f64| -> usize {
        let mut m = a.clone();
        for i in 0..n {
            m[(i, i)] -= x;
        }
        let mut negatives = 0;
        for k in 0..n {
            let mut pivot = m[(k, k)];
            if pivot == 0.0 {
                pivot = 1e-300;
            }
            if pivot < 0.0 {
                negatives += 1;
            }
            for i in (k + 1)..n {
                let factor = m[(i, k)] / pivot;
                for j in (k + 1)..n {
                    m[(i, j)] -= factor * m[(k, j)];
                }
            }
        }
        negatives
    };

    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        lo = lo.min(a[(i, i)] - radius);
        hi = hi.max(a[(i, i)] + radius);
    }
    lo -= tol;
    hi += tol;

    (0..n)
        .map(|k| {
            let (mut a_, mut b_) = (lo, hi);
            while b_ - a_ > tol {
                let mid = 0.5 * (a_ + b_);
                if count_below(mid) > k {
                    b_ = mid;
                } else {
                    a_ = mid;
                }
            }
            0.5 * (a_ + b_)
        })
        .collect()
}
