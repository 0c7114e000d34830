use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{eigh, inner, svd, CMatrix, Complex, EigenDecomposition, HermitianMatrix};
use crate::{Error, Result};

/// Eigenvalue gaps below this are too small to compare eigenvectors across.
pub const GAP_TOL: f64 = 1e-10;

/// Eigenvalues closer than this (relative to the matrix norm) form one cluster.
const CLUSTER_TOL: f64 = 1e-8;

/// Eigendecompositions along a time grid, with eigenpairs ordered by
/// continuity rather than by eigenvalue after the first point.
#[derive(Clone, Debug)]
pub struct MovingBasis {
    pub times: Vec<f64>,
    pub bases: Vec<EigenDecomposition>,
    /// Angle between each matched eigenvector and its predecessor (0 at the first point).
    pub step_angles: Vec<Vec<f64>>,
    /// Times where two tracks came within the cluster tolerance of each other.
    pub near_degenerate: Vec<f64>,
}

impl MovingBasis {
    /// Eigenvalue history of one track.
    pub fn track(&self, k: usize) -> Vec<f64> {
        self.bases.iter().map(|b| b.eigenvalues[k]).collect()
    }

    pub fn max_step_angle(&self) -> f64 {
        self.step_angles.iter().flatten().copied().fold(0.0, f64::max)
    }
}

fn overlap_abs(u: &[Complex], v: &[Complex]) -> f64 {
    inner(u, v).norm()
}

/// Angle between unit vectors `u` and `v` from the residual `v − u⟨u|v⟩`,
/// which stays accurate for nearly parallel vectors.
fn vector_angle(u: &[Complex], v: &[Complex]) -> f64 {
    let o = inner(u, v);
    let sin = u
        .iter()
        .zip(v)
        .map(|(a, b)| (b - a * o).norm_sqr())
        .sum::<f64>()
        .sqrt()
        .min(1.0);
    if o.norm() >= core::f64::consts::FRAC_1_SQRT_2 {
        sin.asin()
    } else {
        o.norm().min(1.0).acos()
    }
}

fn has_near_degeneracy(values: &[f64], scale: f64) -> bool {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).any(|w| w[1] - w[0] < CLUSTER_TOL * scale.max(f64::MIN_POSITIVE))
}

/// Diagonalises each matrix and matches eigenvectors to the previous point
/// by greedily pairing the largest remaining overlap magnitudes.
pub fn moving_eigenbasis(times: &[f64], rhos: &[HermitianMatrix]) -> Result<MovingBasis> {
    if times.len() != rhos.len() || times.is_empty() {
        return Err(Error::validation("need one matrix per time point"));
    }
    let dim = rhos[0].dim();
    if rhos.iter().any(|r| r.dim() != dim) {
        return Err(Error::validation("matrices along the grid differ in size"));
    }
    let mut bases: Vec<EigenDecomposition> = Vec::with_capacity(times.len());
    let mut step_angles = Vec::with_capacity(times.len());
    let mut near_degenerate = Vec::new();
    for (&t, rho) in times.iter().zip(rhos) {
        let mut cur = eigh(rho)?;
        if has_near_degeneracy(&cur.eigenvalues, rho.norm().max(1.0)) {
            near_degenerate.push(t);
        }
        let Some(prev) = bases.last() else {
            step_angles.push(alloc::vec![0.0; dim]);
            bases.push(cur);
            continue;
        };
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dim * dim);
        for (k, p) in prev.eigenvectors.iter().enumerate() {
            for (j, v) in cur.eigenvectors.iter().enumerate() {
                pairs.push((overlap_abs(p, v), k, j));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut assigned = alloc::vec![usize::MAX; dim];
        let mut used = alloc::vec![false; dim];
        for (_, k, j) in pairs {
            if assigned[k] == usize::MAX && !used[j] {
                assigned[k] = j;
                used[j] = true;
            }
        }
        let mut values = Vec::with_capacity(dim);
        let mut vectors = Vec::with_capacity(dim);
        let mut angles = Vec::with_capacity(dim);
        for (k, &j) in assigned.iter().enumerate() {
            let mut v = core::mem::take(&mut cur.eigenvectors[j]);
            let o = inner(&prev.eigenvectors[k], &v);
            if o.norm() > 0.0 {
                let phase = o.conj() / o.norm();
                v.iter_mut().for_each(|x| *x *= phase);
            }
            angles.push(vector_angle(&prev.eigenvectors[k], &v));
            values.push(cur.eigenvalues[j]);
            vectors.push(v);
        }
        step_angles.push(angles);
        bases.push(EigenDecomposition {
            eigenvalues: values,
            eigenvectors: vectors,
        });
    }
    Ok(MovingBasis {
        times: times.to_vec(),
        bases,
        step_angles,
        near_degenerate,
    })
}

/// Largest principal angle between the spans of the orthonormal sets `u` and `v`.
pub fn largest_principal_angle(u: &[Vec<Complex>], v: &[Vec<Complex>]) -> Result<f64> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::validation("subspaces must have equal positive dimension"));
    }
    let dim = u[0].len();
    // columns v_j − Σ_i u_i⟨u_i|v_j⟩; the largest singular value is sin θ_max
    let residual = CMatrix::from_fn(dim, v.len(), |r, j| {
        v[j][r] - u.iter().map(|ui| ui[r] * inner(ui, &v[j])).sum::<Complex>()
    });
    let s = svd(&residual)?;
    let sin = s.singular_values.iter().copied().fold(0.0, f64::max).min(1.0);
    if sin <= core::f64::consts::FRAC_1_SQRT_2 {
        return Ok(sin.asin());
    }
    let m = CMatrix::from_fn(u.len(), v.len(), |i, j| inner(&u[i], &v[j]));
    let cos = svd(&m)?.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(cos.clamp(0.0, 1.0).acos())
}

/// Comparison of the eigenbases of `ρ_R(t)` and `ρ_P(t)` at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisDistance {
    pub t: f64,
    /// Largest principal angle over the eigenvalue clusters of `ρ_P`.
    pub subspace_angle: f64,
    /// Smallest gap between distinct eigenvalue clusters of `ρ_P`.
    pub eigenvalue_gap: f64,
    /// Largest eigenvalue discrepancy after sorting.
    pub eigenvalue_error: f64,
    /// First-order bound `envelope / gap`.
    pub bound: f64,
    /// False when the gap is below [`GAP_TOL`].
    pub reliable: bool,
}

impl BasisDistance {
    pub fn within_bound(&self) -> bool {
        self.reliable && self.subspace_angle <= self.bound
    }
}

fn clusters(values: &[f64], scale: f64) -> Vec<core::ops::Range<usize>> {
    let tol = CLUSTER_TOL * scale.max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i - 1] - values[i]).abs() > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn compare(t: f64, r: &HermitianMatrix, p: &HermitianMatrix, envelope: f64) -> Result<BasisDistance> {
    let er = eigh(r)?;
    let ep = eigh(p)?;
    let groups = clusters(&ep.eigenvalues, p.norm().max(1.0));
    let gap = groups
        .windows(2)
        .map(|w| ep.eigenvalues[w[0].end - 1] - ep.eigenvalues[w[1].start])
        .fold(if groups.len() == 1 && ep.dim() > 1 { 0.0 } else { f64::INFINITY }, f64::min);
    let mut angle: f64 = 0.0;
    if groups.len() > 1 {
        for g in &groups {
            let a = largest_principal_angle(&er.eigenvectors[g.clone()], &ep.eigenvectors[g.clone()])?;
            angle = angle.max(a);
        }
    }
    let eigenvalue_error = er
        .eigenvalues
        .iter()
        .zip(&ep.eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let reliable = gap >= GAP_TOL;
    Ok(BasisDistance {
        t,
        subspace_angle: angle,
        eigenvalue_gap: gap,
        eigenvalue_error,
        bound: if reliable { envelope / gap } else { f64::INFINITY },
        reliable,
    })
}

/// Per-time basis distance between two matrix histories.
///
/// `envelope[i]` bounds the norm of `ρ_R − ρ_P` at `times[i]`; pass zeros
/// when no bound is wanted.
pub fn convergence_profile(
    times: &[f64],
    rho_r: &[HermitianMatrix],
    rho_p: &[HermitianMatrix],
    envelope: &[f64],
) -> Result<Vec<BasisDistance>> {
    let n = times.len();
    if rho_r.len() != n || rho_p.len() != n || envelope.len() != n {
        return Err(Error::validation("histories must share the time grid"));
    }
    times
        .iter()
        .zip(rho_r.iter().zip(rho_p))
        .zip(envelope)
        .map(|((&t, (r, p)), &e)| {
            if r.dim() != p.dim() {
                return Err(Error::validation("matrices differ in size"));
            }
            compare(t, r, p, e)
        })
        .collect()
}
