use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::lstsq::householder;
use super::{CMatrix, Complex};
use crate::{Error, Result};

const ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of a general square complex matrix, in no particular order.
///
/// Householder reduction to Hessenberg form followed by single-shift QR
/// sweeps with Wilkinson shifts and Givens rotations. Intended for the
/// small dense matrices of the matrix-pencil method.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex>> {
    let n = a.rows();
    if n != a.cols() || n == 0 {
        return Err(Error::validation("eigenvalues need a non-empty square matrix"));
    }
    if !a.is_finite() {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let mut h = hessenberg(a);
    let mut out = alloc::vec![Complex::new(0.0, 0.0); n];
    let eps = f64::EPSILON;

    let mut hi = n - 1;
    let mut iter = 0;
    let mut total = 0;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { h.max_abs() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = Complex::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > ITERATIONS_PER_EIGENVALUE * n {
            return Err(Error::NonConvergence {
                what: "Hessenberg QR",
                iterations: total,
                residual: h[(hi, hi - 1)].norm(),
            });
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_step(&mut h, l, hi, mu);
    }
    out[0] = h[(0, 0)];
    Ok(out)
}

fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some((v, _)) = householder(&x) else {
            continue;
        };
        for col in 0..n {
            let s: Complex = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, col)]).sum();
            for i in k + 1..n {
                h[(i, col)] -= v[i - k - 1] * s * 2.0;
            }
        }
        for row in 0..n {
            let s: Complex = (k + 1..n).map(|j| h[(row, j)] * v[j - k - 1]).sum();
            for j in k + 1..n {
                h[(row, j)] -= s * v[j - k - 1].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::new(0.0, 0.0);
        }
    }
    h
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex, b: Complex, c: Complex, d: Complex) -> Complex {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Givens rotation `[[c, s], [−conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex, b: Complex) -> (f64, Complex) {
    let r = a.norm().hypot(b.norm());
    if r == 0.0 {
        return (1.0, Complex::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, Complex::new(1.0, 0.0));
    }
    let cs = a.norm() / r;
    let sn = (a / a.norm()) * b.conj() / r;
    (cs, sn)
}

/// One shifted QR sweep `H − μI = QR, H ← RQ + μI` on the block `lo..=hi`.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, mu: Complex) {
    for k in lo..=hi {
        h[(k, k)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
        for col in k..=hi {
            let (x, y) = (h[(k, col)], h[(k + 1, col)]);
            h[(k, col)] = x * cs + sn * y;
            h[(k + 1, col)] = -sn.conj() * x + y * cs;
        }
        h[(k + 1, k)] = Complex::new(0.0, 0.0);
        rots.push((cs, sn));
    }
    for (k, &(cs, sn)) in (lo..hi).zip(&rots) {
        for row in lo..=k + 1 {
            let (x, y) = (h[(row, k)], h[(row, k + 1)]);
            h[(row, k)] = x * cs + sn.conj() * y;
            h[(row, k + 1)] = -sn * x + y * cs;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += mu;
    }
}
