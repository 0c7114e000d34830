//! Resonance pole of a discrete level coupled to a continuum, to second
//! order in the coupling, and the number-diagonal effective Hamiltonian
//! `zₙ = n·z₀` of the oscillator-plus-field model built on it.

use alloc::vec::Vec;
use core::cell::Cell;

#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{principal_value_integral, Complex};
use crate::{Error, Result};

/// Coupling density `g(ω) = n(ω)·λ²(ω)` on a finite support.
pub trait CouplingDensity {
    fn eval(&self, omega: f64) -> f64;
    /// Integration domain `(lo, hi)`; `g` is taken as zero outside it.
    fn support(&self) -> (f64, f64);
}

/// `height·Γ² / ((ω − center)² + Γ²)` on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lorentzian {
    pub height: f64,
    pub center: f64,
    pub width: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Lorentzian {
    pub fn new(height: f64, center: f64, width: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(height >= 0.0 && height.is_finite()) {
            return Err(Error::validation("Lorentzian height must be nonnegative"));
        }
        if !(width > 0.0 && width.is_finite() && center.is_finite()) {
            return Err(Error::validation("Lorentzian width must be positive"));
        }
        check_support(lo, hi)?;
        Ok(Lorentzian {
            height,
            center,
            width,
            lo,
            hi,
        })
    }
}

impl CouplingDensity for Lorentzian {
    fn eval(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        self.height * self.width * self.width / (d * d + self.width * self.width)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Ohmic density with exponential cutoff, `η·ω·e^{−ω/ω_c}` on `[0, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OhmicCutoff {
    pub eta: f64,
    pub cutoff: f64,
    pub hi: f64,
}

impl OhmicCutoff {
    pub fn new(eta: f64, cutoff: f64, hi: f64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::validation("ohmic strength must be nonnegative"));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::validation("ohmic cutoff must be positive"));
        }
        check_support(0.0, hi)?;
        Ok(OhmicCutoff { eta, cutoff, hi })
    }
}

impl CouplingDensity for OhmicCutoff {
    fn eval(&self, omega: f64) -> f64 {
        self.eta * omega * (-omega / self.cutoff).exp()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.hi)
    }
}

/// Tabulated density, linearly interpolated between samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledDensity {
    omegas: Vec<f64>,
    values: Vec<f64>,
}

impl SampledDensity {
    pub fn new(omegas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if omegas.len() != values.len() || omegas.len() < 2 {
            return Err(Error::validation("sampled density needs at least two (ω, g) pairs"));
        }
        if omegas.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::validation("sampled density has non-finite entries"));
        }
        if omegas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("sampled frequencies must be strictly increasing"));
        }
        if let Some(i) = values.iter().position(|&g| g < 0.0) {
            return Err(Error::validation(alloc::format!(
                "coupling density is negative at ω = {}",
                omegas[i]
            )));
        }
        Ok(SampledDensity { omegas, values })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl CouplingDensity for SampledDensity {
    fn eval(&self, omega: f64) -> f64 {
        let xs = &self.omegas;
        let n = xs.len();
        if omega <= xs[0] {
            return if omega == xs[0] { self.values[0] } else { 0.0 };
        }
        if omega >= xs[n - 1] {
            return if omega == xs[n - 1] { self.values[n - 1] } else { 0.0 };
        }
        let k = xs.partition_point(|&x| x <= omega) - 1;
        let s = (omega - xs[k]) / (xs[k + 1] - xs[k]);
        self.values[k] + s * (self.values[k + 1] - self.values[k])
    }

    fn support(&self) -> (f64, f64) {
        (self.omegas[0], self.omegas[self.omegas.len() - 1])
    }
}

/// Any closure `g(ω)` on an explicit support.
pub struct FnDensity<F> {
    pub f: F,
    pub lo: f64,
    pub hi: f64,
}

impl<F: Fn(f64) -> f64> CouplingDensity for FnDensity<F> {
    fn eval(&self, omega: f64) -> f64 {
        (self.f)(omega)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Pointwise sum of two densities over the union of their supports.
pub struct SumDensity<'a>(pub &'a dyn CouplingDensity, pub &'a dyn CouplingDensity);

impl CouplingDensity for SumDensity<'_> {
    fn eval(&self, omega: f64) -> f64 {
        let part = |g: &dyn CouplingDensity| {
            let (lo, hi) = g.support();
            if (lo..=hi).contains(&omega) {
                g.eval(omega)
            } else {
                0.0
            }
        };
        part(self.0) + part(self.1)
    }

    fn support(&self) -> (f64, f64) {
        let (a, b) = self.0.support();
        let (c, d) = self.1.support();
        (a.min(c), b.max(d))
    }
}

fn check_support(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::validation("density support must be a finite interval lo < hi"))
    }
}

/// Second-order resonance pole `z₀ = (ω₀ + δω₀) − iγ₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbativePole {
    pub omega0: f64,
    pub delta_omega: f64,
    pub gamma0: f64,
}

impl PerturbativePole {
    /// A pole whose shifted frequency is identified with the bare oscillator
    /// frequency, `ω₀′ = ω`.
    pub fn tied_to_oscillator(omega: f64, gamma0: f64) -> Result<Self> {
        if !(omega.is_finite() && gamma0 >= 0.0 && gamma0.is_finite()) {
            return Err(Error::validation("pole needs finite ω and γ₀ ≥ 0"));
        }
        Ok(PerturbativePole {
            omega0: omega,
            delta_omega: 0.0,
            gamma0,
        })
    }

    /// `ω₀′ = ω₀ + δω₀`.
    pub fn omega_prime(&self) -> f64 {
        self.omega0 + self.delta_omega
    }

    pub fn z0(&self) -> Complex {
        Complex::new(self.omega_prime(), -self.gamma0)
    }
}

/// Level shift `δω₀ = P∫ g(ω)/(ω₀ − ω) dω` and width `γ₀ = π·g(ω₀)`.
pub fn perturbative_pole(omega0: f64, g: &dyn CouplingDensity) -> Result<PerturbativePole> {
    let (lo, hi) = g.support();
    check_support(lo, hi)?;
    if !omega0.is_finite() || omega0 <= lo || omega0 >= hi {
        return Err(Error::validation(
            "ω₀ must lie strictly inside the support of the coupling density",
        ));
    }
    let g0 = g.eval(omega0);
    if !g0.is_finite() {
        return Err(Error::validation("coupling density is not finite at ω₀"));
    }
    let lowest = Cell::new((f64::INFINITY, omega0));
    let tracked = |w: f64| {
        let v = g.eval(w);
        if v < lowest.get().0 {
            lowest.set((v, w));
        }
        v
    };
    let delta_omega = principal_value_integral(tracked, omega0, lo, hi)?;
    let (min_g, at) = lowest.get();
    if min_g < 0.0 || g0 < 0.0 {
        let at = if g0 < 0.0 { omega0 } else { at };
        return Err(Error::validation(alloc::format!(
            "coupling density is negative at ω = {at}"
        )));
    }
    Ok(PerturbativePole {
        omega0,
        delta_omega,
        gamma0: core::f64::consts::PI * g0,
    })
}

/// Diagonal non-Hermitian Hamiltonian with levels `zₙ = n·z₀`, `n = 0..=N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveHamiltonian {
    z0: Complex,
    n_max: usize,
    hbar: f64,
}

impl EffectiveHamiltonian {
    pub fn new(z0: Complex, n_max: usize, hbar: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::validation("truncation must be at least 1"));
        }
        if !(z0.re.is_finite() && z0.im.is_finite()) || z0.im > 0.0 {
            return Err(Error::validation("z₀ must be finite with Im z₀ ≤ 0"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::validation("hbar must be positive and finite"));
        }
        Ok(EffectiveHamiltonian { z0, n_max, hbar })
    }

    pub fn z0(&self) -> Complex {
        self.z0
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn level(&self, n: usize) -> Complex {
        self.z0 * n as f64
    }

    pub fn levels(&self) -> Vec<Complex> {
        (0..=self.n_max).map(|n| self.level(n)).collect()
    }

    /// `e^{−i z₀ t/ħ}`, the one-quantum propagation factor.
    pub fn step_factor(&self, t: f64) -> Complex {
        (Complex::new(0.0, -1.0) * self.z0 * (t / self.hbar)).exp()
    }
}

/// Levels `n·z₀` for `n = 0..=n_max`.
pub fn lee_friedrich_spectrum(pole: &PerturbativePole, n_max: usize, hbar: f64) -> Result<EffectiveHamiltonian> {
    EffectiveHamiltonian::new(pole.z0(), n_max, hbar)
}

/// `A(t) = Σₙ bₙ·conj(aₙ)·e^{−i n z₀ t/ħ}`.
pub fn evolve_amplitude(a: &[Complex], b: &[Complex], ham: &EffectiveHamiltonian, t: f64) -> Result<Complex> {
    if a.len() != b.len() {
        return Err(Error::validation("coefficient lists have different lengths"));
    }
    if a.len() > ham.n_max + 1 {
        return Err(Error::validation("more coefficients than Hamiltonian levels"));
    }
    let w = ham.step_factor(t);
    let mut acc = Complex::new(0.0, 0.0);
    for (an, bn) in a.iter().zip(b).rev() {
        acc = acc * w + bn * an.conj();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn zero_coupling_gives_bare_frequency() {
        let g = FnDensity { f: |_| 0.0, lo: 0.0, hi: 10.0 };
        let p = perturbative_pole(3.0, &g).unwrap();
        assert_eq!(p.z0(), c(3.0, 0.0));
    }

    #[test]
    fn symmetric_density_has_no_shift() {
        let g = Lorentzian::new(0.2, 2.0, 0.5, -3.0, 7.0).unwrap();
        let p = perturbative_pole(2.0, &g).unwrap();
        assert!(p.delta_omega.abs() < 1e-12);
        assert_eq!(p.gamma0, core::f64::consts::PI * 0.2);
    }

    #[test]
    fn boundary_and_negative_densities_are_rejected() {
        let g = Lorentzian::new(0.2, 2.0, 0.5, 0.0, 4.0).unwrap();
        assert!(perturbative_pole(0.0, &g).is_err());
        assert!(perturbative_pole(4.0, &g).is_err());
        let neg = FnDensity { f: |w: f64| w - 1.0, lo: 0.0, hi: 3.0 };
        assert!(perturbative_pole(1.5, &neg).is_err());
    }

    #[test]
    fn sampled_density_interpolates() {
        let s = SampledDensity::new(alloc::vec![0.0, 1.0, 3.0], alloc::vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(s.eval(0.5), 1.0);
        assert_eq!(s.eval(2.0), 1.0);
        assert_eq!(s.eval(3.0), 0.0);
        assert!(SampledDensity::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, -1.0]).is_err());
    }

    #[test]
    fn spectrum_levels() {
        let ham = EffectiveHamiltonian::new(c(1.0, -0.1), 3, 1.0).unwrap();
        let want = [c(0.0, 0.0), c(1.0, -0.1), c(2.0, -0.2), c(3.0, -0.3)];
        for (z, w) in ham.levels().iter().zip(&want) {
            assert!((z - w).norm() < 1e-15);
        }
        let big = EffectiveHamiltonian::new(c(1.0, -0.25), 10, 1.0).unwrap();
        assert_eq!(big.level(10).im, -2.5);
        assert!(EffectiveHamiltonian::new(c(1.0, 0.1), 3, 1.0).is_err());
    }

    #[test]
    fn vacuum_is_stationary() {
        let ham = EffectiveHamiltonian::new(c(1.0, -0.3), 4, 1.0).unwrap();
        let a = [c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(evolve_amplitude(&a, &a, &ham, 7.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn single_quantum_decays() {
        let (w, g, t) = (2.0, 0.3, 1.7);
        let ham = EffectiveHamiltonian::new(c(w, -g), 2, 1.0).unwrap();
        let a = [c(0.0, 0.0), c(1.0, 0.0)];
        let got = evolve_amplitude(&a, &a, &ham, t).unwrap();
        let want = c(0.0, -w * t).exp() * (-g * t).exp();
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn length_mismatch() {
        let ham = EffectiveHamiltonian::new(c(1.0, -0.3), 1, 1.0).unwrap();
        assert!(evolve_amplitude(&[c(1.0, 0.0)], &[], &ham, 0.0).is_err());
        let three = [c(1.0, 0.0); 3];
        assert!(evolve_amplitude(&three, &three, &ham, 0.0).is_err());
    }
}
