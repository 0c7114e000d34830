use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::basis::{convergence_profile, BasisDistance};
use crate::numerics::{CMatrix, Complex, HermitianMatrix};
use crate::pole_models::{eval_catalogue, PoleCatalogue, Rendering, TimescaleReport};
use crate::{Error, Result};

/// One matrix entry `factor · S(t)`, with `S` a pole catalogue rendered
/// with its phases.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogueEntry {
    pub factor: Complex,
    pub catalogue: PoleCatalogue,
}

impl CatalogueEntry {
    pub fn new(factor: Complex, catalogue: PoleCatalogue) -> Self {
        CatalogueEntry { factor, catalogue }
    }

    pub fn eval(&self, t: f64) -> Complex {
        self.factor * eval_catalogue(&self.catalogue, t, Rendering::Full)
    }

    fn kept_indices(&self, report: &TimescaleReport) -> Result<Vec<usize>> {
        let modes = self.catalogue.modes();
        match report.threshold_rate() {
            Some(rate) => Ok((0..modes.len()).filter(|&i| modes[i].gamma() <= rate).collect()),
            None if modes.is_empty() => Ok(Vec::new()),
            None if modes.len() == report.mode_count() => Ok(report.p_relevant().to_vec()),
            None => Err(Error::validation(
                "explicit partition does not match the modes of a matrix entry",
            )),
        }
    }

    fn dropped_envelope(&self, keep: &[usize], t: f64) -> f64 {
        let hbar = self.catalogue.hbar();
        self.catalogue
            .modes()
            .iter()
            .enumerate()
            .filter(|(i, _)| !keep.contains(i))
            .map(|(_, m)| m.amplitude.norm() * (-m.gamma() * t / hbar).exp())
            .sum::<f64>()
            * self.factor.norm()
    }
}

/// Hermitian matrix whose upper-triangle entries are catalogue-valued;
/// the lower triangle is the conjugate. Missing entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogueMatrix {
    dim: usize,
    entries: Vec<Option<CatalogueEntry>>,
}

impl CatalogueMatrix {
    pub fn new(dim: usize, entries: Vec<((usize, usize), CatalogueEntry)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("matrix dimension must be positive"));
        }
        let mut slots = alloc::vec![None; dim * dim];
        for ((i, j), e) in entries {
            if i > j || j >= dim {
                return Err(Error::validation("entries must lie in the upper triangle"));
            }
            if i == j && e.catalogue.is_pair_product() {
                return Err(Error::validation("diagonal entries cannot carry phases"));
            }
            if slots[i * dim + j].replace(e).is_some() {
                return Err(Error::validation("entry given twice"));
            }
        }
        Ok(CatalogueMatrix { dim, entries: slots })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&CatalogueEntry> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entries.get(i * self.dim + j).and_then(Option::as_ref)
    }

    fn iter(&self) -> impl Iterator<Item = ((usize, usize), &CatalogueEntry)> {
        let n = self.dim;
        self.entries
            .iter()
            .enumerate()
            .filter_map(move |(k, e)| e.as_ref().map(|e| ((k / n, k % n), e)))
    }

    /// Entries evaluated at `t`, before trace normalisation.
    pub fn eval(&self, t: f64) -> Result<HermitianMatrix> {
        let n = self.dim;
        let mut m = CMatrix::zeros(n, n);
        for ((i, j), e) in self.iter() {
            let v = e.eval(t);
            m[(i, j)] = v;
            if i != j {
                m[(j, i)] = v.conj();
            }
        }
        HermitianMatrix::symmetrized(&m)
    }

    /// `ρ_R(t)` with unit trace.
    pub fn rho_r(&self, t: f64) -> Result<HermitianMatrix> {
        self.eval(t)?.normalized_trace()
    }

    /// The same matrix with every p-irrelevant mode removed from every entry.
    pub fn preferred(&self, report: &TimescaleReport) -> Result<CatalogueMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|slot| {
                slot.as_ref()
                    .map(|e| {
                        let keep = e.kept_indices(report)?;
                        Ok(CatalogueEntry::new(e.factor, e.catalogue.restricted(&keep)?))
                    })
                    .transpose()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CatalogueMatrix { dim: self.dim, entries })
    }

    /// `ρ_P(t)`: p-irrelevant modes dropped, symmetrised, unit trace.
    pub fn rho_p(&self, report: &TimescaleReport, t: f64) -> Result<HermitianMatrix> {
        self.preferred(report)?.rho_r(t)
    }

    /// Frobenius norm of the entrywise dropped-mode envelopes at `t`,
    /// which bounds `‖ρ_R − ρ_P‖` before normalisation.
    pub fn dropped_envelope(&self, report: &TimescaleReport, t: f64) -> Result<f64> {
        let mut sq = 0.0;
        for ((i, j), e) in self.iter() {
            let env = e.dropped_envelope(&e.kept_indices(report)?, t);
            sq += if i == j { env * env } else { 2.0 * env * env };
        }
        Ok(sq.sqrt())
    }
}

/// Basis distance between `ρ_R` and `ρ_P` on `times`, with the first-order
/// bound built from the dropped envelope.
pub fn catalogue_convergence(
    rho: &CatalogueMatrix,
    report: &TimescaleReport,
    times: &[f64],
) -> Result<Vec<BasisDistance>> {
    let pref = rho.preferred(report)?;
    let mut rs = Vec::with_capacity(times.len());
    let mut ps = Vec::with_capacity(times.len());
    let mut env = Vec::with_capacity(times.len());
    for &t in times {
        rs.push(rho.rho_r(t)?);
        let raw = pref.eval(t)?;
        // the normalised gap shrinks by the trace, so the envelope must too
        env.push(rho.dropped_envelope(report, t)? / raw.trace().abs());
        ps.push(raw.normalized_trace()?);
    }
    convergence_profile(times, &rs, &ps, &env)
}

/// Difference between a signal and its preferred version at one time,
/// with its first derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeCheck {
    pub difference: f64,
    pub derivative: f64,
    /// `Σ_{dropped} |aᵢ| e^{−γᵢt/ħ}`.
    pub envelope: f64,
    /// `Σ_{dropped} |aᵢ|·|γᵢ + iωᵢ|/ħ · e^{−γᵢt/ħ}` (phases only for pair products).
    pub derivative_envelope: f64,
}

impl DerivativeCheck {
    pub fn pass(&self) -> bool {
        let slack = 1.0 + 1e-12;
        self.difference <= self.envelope * slack && self.derivative <= self.derivative_envelope * slack
    }
}

pub fn derivative_check(cat: &PoleCatalogue, report: &TimescaleReport, t: f64) -> Result<DerivativeCheck> {
    report.check_matches(cat)?;
    let hbar = cat.hbar();
    let phased = cat.is_pair_product();
    let mut diff = Complex::new(0.0, 0.0);
    let mut deriv = Complex::new(0.0, 0.0);
    let mut envelope = 0.0;
    let mut derivative_envelope = 0.0;
    for &i in report.p_irrelevant() {
        let m = cat.modes()[i];
        let rate = Complex::new(m.gamma(), if phased { m.omega() } else { 0.0 }) / hbar;
        let term = m.amplitude * (-rate * t).exp();
        diff += term;
        deriv -= rate * term;
        let env = m.amplitude.norm() * (-m.gamma() * t / hbar).exp();
        envelope += env;
        derivative_envelope += env * rate.norm();
    }
    Ok(DerivativeCheck {
        difference: diff.norm(),
        derivative: deriv.norm(),
        envelope,
        derivative_envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, eigh};
    use crate::pole_models::{decoherence_time, DecoherenceRule, Mode};

    fn cat(eq: f64, modes: &[(f64, f64)]) -> PoleCatalogue {
        if modes.is_empty() {
            return PoleCatalogue::constant(1.0, eq).unwrap();
        }
        let m = modes.iter().map(|&(g, a)| Mode::new(0.0, g, c(a, 0.0)).unwrap()).collect();
        PoleCatalogue::new(1.0, eq, m, None).unwrap()
    }

    // ρ₁₁ = 0.6 + 0.1e^{−γ₀t} + 0.05e^{−γ₁t}, ρ₂₂ = 1 − ρ₁₁, ρ₁₂ = 0.1e^{−γ₀t} + 0.2e^{−γ₁t}
    fn two_pole(g0: f64, g1: f64) -> CatalogueMatrix {
        let one = c(1.0, 0.0);
        CatalogueMatrix::new(
            2,
            alloc::vec![
                ((0, 0), CatalogueEntry::new(one, cat(0.6, &[(g0, 0.1), (g1, 0.05)]))),
                ((1, 1), CatalogueEntry::new(one, cat(0.4, &[(g0, -0.1), (g1, -0.05)]))),
                ((0, 1), CatalogueEntry::new(one, cat(0.0, &[(g0, 0.1), (g1, 0.2)]))),
            ],
        )
        .unwrap()
    }

    /// Rotation angle of the leading eigenvector of a real symmetric 2×2.
    fn eig_angle(a: f64, b: f64, d: f64) -> f64 {
        0.5 * (2.0 * b).atan2(a - d)
    }

    #[test]
    fn all_relevant_gives_identical_state() {
        let m = two_pole(0.1, 1.0);
        let report = TimescaleReport::explicit(10.0, 1.0, alloc::vec![0, 1], 2).unwrap();
        for t in [0.0, 0.5, 3.0] {
            assert_eq!(m.rho_r(t).unwrap(), m.rho_p(&report, t).unwrap());
        }
    }

    #[test]
    fn preferred_two_pole_keeps_slow_mode_only() {
        let m = two_pole(0.1, 1.0);
        let report = TimescaleReport::explicit(10.0, 1.0, alloc::vec![0], 2).unwrap();
        let t = 2.0;
        let p = m.rho_p(&report, t).unwrap();
        let e = (-0.1f64 * t).exp();
        assert!((p.get(0, 0).re - (0.6 + 0.1 * e)).abs() < 1e-15);
        assert!((p.get(0, 1).re - 0.1 * e).abs() < 1e-15);
    }

    #[test]
    fn angle_matches_explicit_formula_and_bound() {
        let m = two_pole(0.1, 1.0);
        let report = TimescaleReport::explicit(10.0, 1.0, alloc::vec![0], 2).unwrap();
        let t = 2.0;
        let d = catalogue_convergence(&m, &report, &[t]).unwrap()[0];
        let (e0, e1) = ((-0.1f64 * t).exp(), (-t).exp());
        let th_r = eig_angle(0.6 + 0.1 * e0 + 0.05 * e1, 0.1 * e0 + 0.2 * e1, 0.4 - 0.1 * e0 - 0.05 * e1);
        let th_p = eig_angle(0.6 + 0.1 * e0, 0.1 * e0, 0.4 - 0.1 * e0);
        assert!((d.subspace_angle - (th_r - th_p).abs()).abs() < 1e-12);
        assert!(d.within_bound(), "{d:?}");
    }

    #[test]
    fn preferred_is_hermitian_and_positive() {
        let m = two_pole(0.1, 1.0);
        let report = TimescaleReport::explicit(10.0, 1.0, alloc::vec![0], 2).unwrap();
        for t in [0.0, 1.0, 5.0, 50.0] {
            let p = m.rho_p(&report, t).unwrap();
            assert_eq!(p.hermiticity_defect(), 0.0);
            assert!((p.trace() - 1.0).abs() < 1e-15);
            assert!(eigh(&p).unwrap().eigenvalues[1] > -1e-12);
        }
    }

    #[test]
    fn rejects_lower_triangle_and_duplicates() {
        let e = CatalogueEntry::new(c(1.0, 0.0), cat(0.5, &[]));
        assert!(CatalogueMatrix::new(2, alloc::vec![((1, 0), e.clone())]).is_err());
        assert!(CatalogueMatrix::new(2, alloc::vec![((0, 0), e.clone()), ((0, 0), e)]).is_err());
    }

    #[test]
    fn derivative_of_dropped_modes() {
        let c3 = cat(0.0, &[(0.1, 3.0), (1.0, 2.0), (5.0, 1.0)]);
        let report = decoherence_time(&c3, &DecoherenceRule::SecondSmallestGamma).unwrap();
        let d = derivative_check(&c3, &report, 1.0).unwrap();
        assert!((d.difference - (-5.0f64).exp()).abs() < 1e-16);
        assert!((d.derivative - 5.0 * (-5.0f64).exp()).abs() < 1e-15);
        assert!(d.pass());
    }
}
