//! Dense real-symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Lattices here have at most a few dozen sites, so an O(n³)-per-sweep
//! Jacobi solver is fast and gives eigenvalues accurate to a few ulps of the
//! matrix norm, which the spacing diagnostics rely on.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors,
/// stored column-wise in a row-major `n × n` buffer: component `i` of
/// eigenvector `k` is `vectors[i * n + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    #[inline]
    pub fn vector_component(&self, row: usize, k: usize) -> f64 {
        self.vectors[row * self.n + k]
    }
}

/// Decompose the symmetric row-major matrix `a` (length `n²`).
pub fn symmetric_eigen(n: usize, a: &[f64]) -> Result<SymmetricEigen> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: a.len() });
    }
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 || n < 2 {
        return Ok(sorted(n, (0..n).map(|i| m[i * n + i]).collect(), v));
    }

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[p * n + q] * m[p * n + q])
            .sum();
        if libm::sqrt(off) <= 1e-300_f64.max(f64::EPSILON * 1e-3 * scale) {
            let values = (0..n).map(|i| m[i * n + i]).collect();
            return Ok(sorted(n, values, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::NoConvergence { what: "jacobi eigensolver" })
}

fn sorted(n: usize, values: Vec<f64>, v: Vec<f64>) -> SymmetricEigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut vectors = vec![0.0; n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_k] = v[row * n + old_k];
        }
    }
    SymmetricEigen { n, values: order.iter().map(|&i| values[i]).collect(), vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &SymmetricEigen) -> Vec<f64> {
        let n = e.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n)
                    .map(|k| e.vector_component(i, k) * e.values[k] * e.vector_component(j, k))
                    .sum();
            }
        }
        out
    }

    #[test]
    fn two_by_two() {
        let e = symmetric_eigen(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn path_graph_spectrum() {
        // eigenvalues of the n-site path are 2 cos(kπ/(n+1))
        let n = 7;
        let mut a = vec![0.0; n * n];
        for i in 0..n - 1 {
            a[i * n + i + 1] = 1.0;
            a[(i + 1) * n + i] = 1.0;
        }
        let e = symmetric_eigen(n, &a).unwrap();
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 * libm::cos(k as f64 * core::f64::consts::PI / (n as f64 + 1.0)))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (got, want) in e.values.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        let back = reconstruct(&e);
        for (x, y) in back.iter().zip(&a) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(symmetric_eigen(3, &[0.0; 8]).is_err());
    }
}
