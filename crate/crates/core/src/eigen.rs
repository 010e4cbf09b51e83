//! Symmetric eigensolver (cyclic Jacobi) for the small dense matrices used by
//! the series propagator and the certification cross-checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::OperatorMatrix;

/// Eigendecomposition `A = V diag(values) Vᵀ` of a real symmetric matrix.
///
/// `values` are sorted ascending; `vectors` is column-major with column `k`
/// holding the eigenvector of `values[k]`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub dim: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }
}

/// Cyclic Jacobi iteration on a row-major real symmetric matrix.
///
/// Converges quadratically; fifty sweeps is far beyond what the ≤ O(100)
/// dimensions used here ever need.
pub fn eigh_symmetric(dim: usize, matrix: &[f64]) -> SymmetricEigen {
    assert_eq!(matrix.len(), dim * dim, "matrix size mismatch");
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }

    let frob: f64 = libm::sqrt(matrix.iter().map(|x| x * x).sum::<f64>());
    let stop = 1e-30 * (1.0 + frob);

    for _sweep in 0..50 {
        let mut off = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p * dim + q] * a[p * dim + q];
            }
        }
        if libm::sqrt(off) <= stop {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                // rotate rows/columns p and q of a
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
                // accumulate the rotation into the eigenvector matrix
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        a[i * dim + i]
            .partial_cmp(&a[j * dim + j])
            .expect("eigenvalues are finite")
    });

    let mut values = Vec::with_capacity(dim);
    let mut vectors = vec![0.0; dim * dim];
    for (k, &idx) in order.iter().enumerate() {
        values.push(a[idx * dim + idx]);
        for r in 0..dim {
            vectors[k * dim + r] = v[r * dim + idx];
        }
    }
    SymmetricEigen { dim, values, vectors }
}

/// Eigenvalues of a complex Hermitian matrix via the real symmetric embedding
/// `H = X + iY  →  [[X, -Y], [Y, X]]`, whose spectrum is that of `H` doubled.
pub fn eigvals_hermitian(m: &OperatorMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut big = vec![0.0; (2 * n) * (2 * n)];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            big[i * 2 * n + j] = z.re;
            big[i * 2 * n + (j + n)] = -z.im;
            big[(i + n) * 2 * n + j] = z.im;
            big[(i + n) * 2 * n + (j + n)] = z.re;
        }
    }
    let eig = eigh_symmetric(2 * n, &big);
    // each eigenvalue appears exactly twice; keep one per adjacent pair
    eig.values.iter().step_by(2).copied().collect()
}
