use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::eigh::jacobi_rotation;
use super::{CMatrix, Complex};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
const ORTH_TOL: f64 = 1e-15;

/// Thin singular value decomposition `A = U·diag(σ)·V†`.
///
/// For an `m×n` input `u` is `m×n`, `v` is `n×n` and the singular values are
/// sorted descending. Columns of `u` paired with a zero singular value are
/// zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Column pairs of `A·V` are rotated until every pair is orthogonal to
/// working precision; the column norms are then the singular values.
pub fn svd(a: &CMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Err(Error::validation("SVD of an empty matrix"));
    }
    if !a.is_finite() {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);
    // columns this small are numerically zero and are left alone
    let negligible = (f64::EPSILON * a.norm()).powi(2);

    let mut sweeps = 0;
    loop {
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex::new(0.0, 0.0);
                for k in 0..m {
                    alpha += w[(k, p)].norm_sqr();
                    beta += w[(k, q)].norm_sqr();
                    gamma += w[(k, p)].conj() * w[(k, q)];
                }
                let g = gamma.norm();
                if alpha.min(beta) <= negligible || g == 0.0 || g <= ORTH_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                worst = worst.max(g / (alpha * beta).sqrt());
                let [upp, upq, uqp, uqq] = jacobi_rotation(alpha, beta, gamma);
                for k in 0..m {
                    let (x, y) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = x * upp + y * uqp;
                    w[(k, q)] = x * upq + y * uqq;
                }
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * upp + y * uqp;
                    v[(k, q)] = x * upq + y * uqq;
                }
            }
        }
        if worst == 0.0 {
            break;
        }
        sweeps += 1;
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NonConvergence {
                what: "Jacobi SVD",
                iterations: sweeps,
                residual: worst,
            });
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = CMatrix::from_fn(m, n, |i, k| {
        let j = order[k];
        if norms[j] > 0.0 {
            w[(i, j)] / norms[j]
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let v = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Svd {
        u,
        singular_values,
        v,
    })
}
