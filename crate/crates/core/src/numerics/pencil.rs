use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{eigenvalues, lstsq, svd, CMatrix, Complex};
use crate::{Error, Result};

/// Singular values below this fraction of the largest one are treated as noise.
pub const RANK_TOL: f64 = 1e-9;
/// Relative tolerance on sample spacing.
pub const GRID_TOL: f64 = 1e-9;
/// Upper bound on the pencil parameter, which keeps the SVD cheap for long signals.
const MAX_PENCIL: usize = 160;

/// One fitted term `amplitude·e^{z t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpMode {
    pub z: Complex,
    pub amplitude: Complex,
}

impl ExpMode {
    /// Envelope decay rate `−Re z`.
    pub fn decay_rate(&self) -> f64 {
        -self.z.re
    }

    pub fn eval(&self, t: f64) -> Complex {
        self.amplitude * (self.z * t).exp()
    }
}

/// Result of [`matrix_pencil_fit`].
#[derive(Clone, Debug)]
pub struct PencilFit {
    /// Modes sorted by decay rate, slowest first.
    pub modes: Vec<ExpMode>,
    /// Singular values of the Hankel data matrix, descending.
    pub singular_values: Vec<f64>,
    /// Number of singular values above `RANK_TOL·σ₀`.
    pub rank: usize,
    /// Root-mean-square misfit of the reconstructed samples.
    pub residual: f64,
}

/// Number of singular values above `RANK_TOL` times the largest.
pub fn numerical_rank(singular_values: &[f64]) -> usize {
    let Some(&s0) = singular_values.first() else {
        return 0;
    };
    if !(s0 > 0.0) {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > RANK_TOL * s0).count()
}

/// Fits `order` complex exponentials to uniformly sampled data.
///
/// The samples are arranged in a Hankel matrix, whose dominant right singular
/// vectors span the signal subspace. The shift-invariance of that subspace
/// gives the poles `λ = e^{z·dt}` as eigenvalues of a small least-squares
/// operator, and the amplitudes follow from a Vandermonde least-squares
/// solve. Returns [`Error::RankDeficient`] when the data support fewer than
/// `order` modes.
pub fn matrix_pencil_fit(times: &[f64], values: &[Complex], order: usize) -> Result<PencilFit> {
    let n = times.len();
    if values.len() != n {
        return Err(Error::validation("times and values have different lengths"));
    }
    if order == 0 {
        return Err(Error::validation("model order must be at least 1"));
    }
    if n < 2 * order + 2 {
        return Err(Error::validation("matrix pencil needs at least 2·order + 2 samples"));
    }
    if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::validation("samples must be finite"));
    }
    let t0 = times[0];
    let dt = (times[n - 1] - t0) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::validation("times must be strictly increasing"));
    }
    for (i, &t) in times.iter().enumerate() {
        if (t - (t0 + i as f64 * dt)).abs() > GRID_TOL * dt {
            return Err(Error::validation("time grid is not uniform"));
        }
    }

    let pencil = ((n - 1) / 2).min(MAX_PENCIL.max(order));
    let rows = n - pencil;
    let hankel = CMatrix::from_fn(rows, pencil + 1, |i, j| values[i + j]);
    let dec = svd(&hankel)?;
    let rank = numerical_rank(&dec.singular_values);
    if rank < order {
        return Err(Error::RankDeficient { rank, requested: order });
    }

    // Rows of the data matrix live in the span of the conjugated right singular vectors.
    let q1 = CMatrix::from_fn(pencil, order, |i, k| dec.v[(i, k)].conj());
    let q2 = CMatrix::from_fn(pencil, order, |i, k| dec.v[(i + 1, k)].conj());
    let shift = lstsq(&q1, &q2)?;
    let lambdas = eigenvalues(&shift)?;
    let mut zs = Vec::with_capacity(order);
    for lam in lambdas {
        if !(lam.norm() > 0.0) {
            return Err(Error::Degenerate("pencil eigenvalue is zero".into()));
        }
        zs.push(lam.ln() / dt);
    }

    let vander = CMatrix::from_fn(n, order, |i, k| (zs[k] * (i as f64 * dt)).exp());
    let rhs = CMatrix::from_fn(n, 1, |i, _| values[i]);
    let coef = lstsq(&vander, &rhs)?;
    let fitted = vander.mul_vec(&coef.column(0));
    let residual = (fitted
        .iter()
        .zip(values)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / n as f64)
        .sqrt();

    let mut modes: Vec<ExpMode> = zs
        .iter()
        .enumerate()
        .map(|(k, &z)| ExpMode {
            z,
            amplitude: coef[(k, 0)] * (-z * t0).exp(),
        })
        .collect();
    modes.sort_by(|a, b| {
        a.decay_rate()
            .total_cmp(&b.decay_rate())
            .then(a.z.im.abs().total_cmp(&b.z.im.abs()))
    });
    Ok(PencilFit {
        modes,
        singular_values: dec.singular_values,
        rank,
        residual,
    })
}
