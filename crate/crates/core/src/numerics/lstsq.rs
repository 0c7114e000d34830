use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{CMatrix, Complex};
use crate::{Error, Result};

/// Householder reflector `I − 2vv†` mapping `x` onto `α·e₁`.
///
/// Returns the unit vector `v` and `α`, or `None` when `x` is already zero.
pub(crate) fn householder(x: &[Complex]) -> Option<(Vec<Complex>, Complex)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let x0 = x[0];
    let phase = if x0.norm() > 0.0 {
        x0 / x0.norm()
    } else {
        Complex::new(1.0, 0.0)
    };
    let alpha = -phase * norm;
    let mut v: Vec<Complex> = x.to_vec();
    v[0] -= alpha;
    let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vn == 0.0 {
        return None;
    }
    for z in v.iter_mut() {
        *z /= vn;
    }
    Some((v, alpha))
}

/// Minimum-residual solution of `A·X ≈ B` for a tall, full-column-rank `A`.
///
/// Uses Householder QR. Fails with [`Error::Degenerate`] if a pivot of `R`
/// falls below `1e-14·‖A‖`.
pub fn lstsq(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (m, n) = (a.rows(), a.cols());
    if m < n || n == 0 {
        return Err(Error::validation("least squares needs at least as many rows as columns"));
    }
    if b.rows() != m {
        return Err(Error::validation("right-hand side row count does not match"));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::validation("least-squares input has non-finite entries"));
    }
    let k = b.cols();
    let scale = a.norm();
    let mut r = a.clone();
    let mut y = b.clone();

    for j in 0..n {
        let x: Vec<Complex> = (j..m).map(|i| r[(i, j)]).collect();
        let Some((v, _)) = householder(&x) else {
            continue;
        };
        for col in j..n {
            let s: Complex = (j..m).map(|i| v[i - j].conj() * r[(i, col)]).sum();
            for i in j..m {
                r[(i, col)] -= v[i - j] * s * 2.0;
            }
        }
        for col in 0..k {
            let s: Complex = (j..m).map(|i| v[i - j].conj() * y[(i, col)]).sum();
            for i in j..m {
                y[(i, col)] -= v[i - j] * s * 2.0;
            }
        }
    }

    for j in 0..n {
        if !(r[(j, j)].norm() > 1e-14 * scale) {
            return Err(Error::Degenerate("least-squares matrix is rank deficient".into()));
        }
    }
    let mut x = CMatrix::zeros(n, k);
    for col in 0..k {
        for i in (0..n).rev() {
            let mut s = y[(i, col)];
            for j in i + 1..n {
                s -= r[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = s / r[(i, i)];
        }
    }
    Ok(x)
}
