use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{CMatrix, Complex, HermitianMatrix};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Off-diagonal magnitudes below `OFF_TOL·‖A‖` count as zero.
const OFF_TOL: f64 = 1e-13;

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// Each eigenvector has its largest-magnitude component real and
/// non-negative. Vectors belonging to a degenerate cluster span the right
/// subspace but are otherwise arbitrary.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ λₖ vₖ vₖ†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| {
            self.eigenvalues
                .iter()
                .zip(&self.eigenvectors)
                .map(|(&l, v)| v[i] * v[j].conj() * l)
                .sum()
        })
    }

    /// `maxₖ ‖A vₖ − λₖ vₖ‖`.
    pub fn max_residual(&self, a: &HermitianMatrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&l, v)| {
                let av = a.as_matrix().mul_vec(v);
                av.iter()
                    .zip(v)
                    .map(|(x, y)| (x - y * l).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Unitary 2×2 rotation `U` that makes `U† [[app, apq], [conj(apq), aqq]] U` diagonal.
///
/// Returned as `[U_pp, U_pq, U_qp, U_qq]`. The complex phase of `apq` is
/// removed first, then the classic real Jacobi angle is applied.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, apq: Complex) -> [Complex; 4] {
    let r = apq.norm();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let ph = phase.conj();
    [
        Complex::new(cs, 0.0),
        Complex::new(sn, 0.0),
        ph * (-sn),
        ph * cs,
    ]
}

/// Hermitian eigensolver by cyclic complex Jacobi rotations.
pub fn eigh(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let norm = a.norm();
    let mut w = a.as_matrix().clone();
    let mut v = CMatrix::identity(n);
    let tol = OFF_TOL * norm;

    let off_max = |w: &CMatrix| {
        let mut m: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                m = m.max(w[(p, q)].norm());
            }
        }
        m
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_max(&w) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let [upp, upq, uqp, uqq] = jacobi_rotation(w[(p, p)].re, w[(q, q)].re, apq);
                for k in 0..n {
                    let (akp, akq) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = akp * upp + akq * uqp;
                    w[(k, q)] = akp * upq + akq * uqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (w[(p, k)], w[(q, k)]);
                    w[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    w[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                w[(p, q)] = Complex::new(0.0, 0.0);
                w[(q, p)] = Complex::new(0.0, 0.0);
                w[(p, p)].im = 0.0;
                w[(q, q)].im = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
    }
    if !converged {
        let residual = off_max(&w);
        if residual > tol {
            return Err(Error::NonConvergence {
                what: "Jacobi eigensolver",
                iterations: MAX_SWEEPS,
                residual,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].re.total_cmp(&w[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| w[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| {
            let mut col = v.column(k);
            fix_phase(&mut col);
            col
        })
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Rotates `v` so its largest-magnitude component (first one on ties) is real and ≥ 0.
pub(crate) fn fix_phase(v: &mut [Complex]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let rot = v[best].conj() / best_mag;
        for z in v.iter_mut() {
            *z *= rot;
        }
        v[best].im = 0.0;
    }
}
