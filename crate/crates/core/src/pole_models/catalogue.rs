use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{is_finite, Complex};
use crate::{Error, Result};

/// One resonance `z = ω − iγ/2`.
///
/// `gamma` is stored as the e-folding rate of the mode envelope, so a mode
/// built on this pole decays as `e^{−γt/ħ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    omega: f64,
    gamma: f64,
}

impl Pole {
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::validation("pole frequency must be finite"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::validation("pole width must be positive and finite"));
        }
        Ok(Pole { omega, gamma })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Complex energy `ω − iγ/2`.
    pub fn z(&self) -> Complex {
        Complex::new(self.omega, -0.5 * self.gamma)
    }
}

/// A decaying term: a pole together with its complex weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub pole: Pole,
    pub amplitude: Complex,
}

impl Mode {
    pub fn new(omega: f64, gamma: f64, amplitude: Complex) -> Result<Self> {
        if !is_finite(amplitude) {
            return Err(Error::validation("mode amplitude must be finite"));
        }
        Ok(Mode {
            pole: Pole::new(omega, gamma)?,
            amplitude,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.pole.gamma
    }

    pub fn omega(&self) -> f64 {
        self.pole.omega
    }

    fn canonical_cmp(&self, other: &Mode) -> Ordering {
        self.pole
            .gamma
            .total_cmp(&other.pole.gamma)
            .then(self.pole.omega.total_cmp(&other.pole.omega))
            .then(self.amplitude.re.total_cmp(&other.amplitude.re))
            .then(self.amplitude.im.total_cmp(&other.amplitude.im))
    }
}

/// Power-law background `amplitude·(1 + t/τ)^{−p}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KhalfinTail {
    amplitude: f64,
    tau: f64,
    p: f64,
}

impl KhalfinTail {
    pub const DEFAULT_EXPONENT: f64 = 3.0;

    pub fn new(amplitude: f64, tau: f64, p: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::validation("Khalfin amplitude must be finite"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::validation("Khalfin time scale must be positive"));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::validation("Khalfin exponent must be positive"));
        }
        Ok(KhalfinTail { amplitude, tau, p })
    }

    pub fn with_default_exponent(amplitude: f64, tau: f64) -> Result<Self> {
        Self::new(amplitude, tau, Self::DEFAULT_EXPONENT)
    }

    /// A tail that is identically zero.
    pub fn absent() -> Self {
        KhalfinTail {
            amplitude: 0.0,
            tau: 1.0,
            p: Self::DEFAULT_EXPONENT,
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * (1.0 + t / self.tau).powf(-self.p)
    }
}

/// Equilibrium value plus decaying modes plus an optional power-law tail.
///
/// Modes are kept sorted by width (then frequency and amplitude), so two
/// catalogues holding the same modes in different order are identical.
/// A catalogue with neither modes nor tail is not allowed; use
/// [`PoleCatalogue::constant`] for a stationary signal.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleCatalogue {
    hbar: f64,
    equilibrium: f64,
    modes: Vec<Mode>,
    khalfin: Option<KhalfinTail>,
    pair_product: bool,
}

impl PoleCatalogue {
    pub fn new(hbar: f64, equilibrium: f64, mut modes: Vec<Mode>, khalfin: Option<KhalfinTail>) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::validation("hbar must be positive and finite"));
        }
        if !equilibrium.is_finite() {
            return Err(Error::validation("equilibrium value must be finite"));
        }
        if modes.is_empty() && khalfin.is_none() {
            return Err(Error::validation("a catalogue needs at least one mode or a Khalfin tail"));
        }
        modes.sort_by(Mode::canonical_cmp);
        Ok(PoleCatalogue {
            hbar,
            equilibrium,
            modes,
            khalfin,
            pair_product: false,
        })
    }

    /// A stationary signal: no modes and a zero tail.
    pub fn constant(hbar: f64, equilibrium: f64) -> Result<Self> {
        Self::new(hbar, equilibrium, Vec::new(), Some(KhalfinTail::absent()))
    }

    /// Marks the modes as pole-pair products, whose `omega` is the beat
    /// frequency shown by [`Rendering::Full`](super::Rendering::Full).
    pub fn with_pair_product(mut self, pair_product: bool) -> Self {
        self.pair_product = pair_product;
        self
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn equilibrium(&self) -> f64 {
        self.equilibrium
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn khalfin(&self) -> Option<&KhalfinTail> {
        self.khalfin.as_ref()
    }

    pub fn is_pair_product(&self) -> bool {
        self.pair_product
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.modes.iter().map(Mode::gamma).collect()
    }

    /// `Σ|aᵢ|`.
    pub fn amplitude_sum(&self) -> f64 {
        self.modes.iter().map(|m| m.amplitude.norm()).sum()
    }

    pub fn khalfin_at(&self, t: f64) -> f64 {
        self.khalfin.map_or(0.0, |k| k.eval(t))
    }

    /// Keeps only the modes at the given indices (tail and equilibrium unchanged).
    pub fn restricted(&self, keep: &[usize]) -> Result<Self> {
        if let Some(&bad) = keep.iter().find(|&&i| i >= self.modes.len()) {
            return Err(Error::validation(alloc::format!("mode index {bad} is out of range")));
        }
        let modes: Vec<Mode> = self
            .modes
            .iter()
            .enumerate()
            .filter(|(i, _)| keep.contains(i))
            .map(|(_, m)| *m)
            .collect();
        let khalfin = match self.khalfin {
            None if modes.is_empty() => Some(KhalfinTail::absent()),
            k => k,
        };
        Ok(PoleCatalogue {
            hbar: self.hbar,
            equilibrium: self.equilibrium,
            modes,
            khalfin,
            pair_product: self.pair_product,
        })
    }

    /// Multiplies every mode amplitude by `factor`.
    pub fn scaled_amplitudes(&self, factor: Complex) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| Mode::new(m.omega(), m.gamma(), m.amplitude * factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(self.hbar, self.equilibrium, modes, self.khalfin)?.with_pair_product(self.pair_product))
    }
}
