use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::density::{CatalogueEntry, CatalogueMatrix};
use crate::numerics::{matrix_pencil_fit, Complex};
use crate::omnes::{collective_rate, OmnesConfig};
use crate::pole_models::{check_grid, synthesize, Mode, PoleCatalogue, Rendering, Signal, TimescaleReport};
use crate::{Error, Result};

/// The displaced pair as a 2×2 catalogue matrix in the `{|α₁⟩, |α₂⟩}`
/// frame. The off-diagonal `ab*·D(t)` is modelled as the asymptote
/// `e^{−Δ²/2}` plus a single collective mode of width `γ̃₀`.
pub fn omnes_collective_matrix(cfg: &OmnesConfig) -> Result<CatalogueMatrix> {
    let rate = collective_rate(cfg)?;
    let d2 = cfg.delta() * cfg.delta();
    let floor = (-0.5 * d2).exp();
    let off = PoleCatalogue::new(
        cfg.hbar,
        floor,
        alloc::vec![Mode::new(0.0, rate.gamma_tilde, Complex::new(1.0 - floor, 0.0))?],
        None,
    )?;
    let one = Complex::new(1.0, 0.0);
    CatalogueMatrix::new(
        2,
        alloc::vec![
            ((0, 0), CatalogueEntry::new(one, PoleCatalogue::constant(cfg.hbar, cfg.a.norm_sqr())?)),
            ((1, 1), CatalogueEntry::new(one, PoleCatalogue::constant(cfg.hbar, cfg.b.norm_sqr())?)),
            ((0, 1), CatalogueEntry::new(cfg.a * cfg.b.conj(), off)),
        ],
    )
}

/// `t_R = ħ/γ₀`, `t_D = ħ/γ̃₀`, with the collective mode p-irrelevant.
pub fn omnes_collective_report(cfg: &OmnesConfig) -> Result<TimescaleReport> {
    let rate = collective_rate(cfg)?;
    TimescaleReport::explicit(rate.t_r, rate.t_d, Vec::new(), 1)
}

/// A single Fock level evolved with `e^{−inz₀t/ħ}` and refitted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockScenario {
    /// Decay rate recovered by the matrix-pencil fit.
    pub fitted_rate: f64,
    /// `1 / fitted_rate`.
    pub t_d: f64,
    /// `ħ/(n·γ₀)` with `γ₀ = −Im z₀`.
    pub expected_t_d: f64,
}

impl FockScenario {
    pub fn relative_error(&self) -> f64 {
        (self.t_d - self.expected_t_d).abs() / self.expected_t_d
    }
}

pub fn fock_state_scenario(n: usize, z0: Complex, hbar: f64, times: &[f64]) -> Result<FockScenario> {
    if n == 0 {
        return Err(Error::validation("the Fock level must be at least 1"));
    }
    if !(z0.im < 0.0 && z0.re.is_finite() && z0.im.is_finite()) {
        return Err(Error::validation("z0 must have a negative imaginary part"));
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::validation("hbar must be positive and finite"));
    }
    check_grid(times)?;
    let step = Complex::new(0.0, -1.0) * z0 * (n as f64 / hbar);
    let values: Vec<Complex> = times.iter().map(|&t| (step * t).exp()).collect();
    let fit = matrix_pencil_fit(times, &values, 1)?;
    let fitted_rate = fit.modes[0].decay_rate();
    Ok(FockScenario {
        fitted_rate,
        t_d: 1.0 / fitted_rate,
        expected_t_d: hbar / (n as f64 * -z0.im),
    })
}

/// Which part a measurement sees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    O1,
    O2,
}

/// Two commuting parts, each represented only by the poles its observable sees.
#[derive(Clone, Debug, PartialEq)]
pub struct BiFriedrichModel {
    pub part1: PoleCatalogue,
    pub part2: PoleCatalogue,
}

fn relaxation_time(cat: &PoleCatalogue) -> f64 {
    match cat.gammas().first() {
        Some(&g) => cat.hbar() / g,
        None if cat.khalfin().is_some_and(|k| !k.is_zero()) => f64::INFINITY,
        None => 0.0,
    }
}

impl BiFriedrichModel {
    pub fn new(part1: PoleCatalogue, part2: PoleCatalogue) -> Self {
        BiFriedrichModel { part1, part2 }
    }

    pub fn part(&self, obs: Observable) -> &PoleCatalogue {
        match obs {
            Observable::O1 => &self.part1,
            Observable::O2 => &self.part2,
        }
    }

    /// `ħ/γ₀` of a part; zero for a stationary part, infinite for a pure tail.
    pub fn relaxation_time(&self, obs: Observable) -> f64 {
        relaxation_time(self.part(obs))
    }

    pub fn signal(&self, obs: Observable, times: &[f64]) -> Result<Signal> {
        synthesize(self.part(obs), times, Rendering::Envelope)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Quantum,
    /// `t` equals the relaxation time exactly.
    Threshold,
    Classical,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Quantum => "quantum",
            Verdict::Threshold => "threshold",
            Verdict::Classical => "classical",
        }
    }

    fn at(t: f64, t_r: f64) -> Self {
        if t_r == 0.0 || t > t_r {
            Verdict::Classical
        } else if t < t_r {
            Verdict::Quantum
        } else {
            Verdict::Threshold
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerdictRow {
    pub t: f64,
    pub part1: Verdict,
    pub part2: Verdict,
    /// `|Sᵢ(t) − equilibriumᵢ|`.
    pub deviation: [f64; 2],
    /// `Σ|a| e^{−γ₀t/ħ}` for each part.
    pub envelope: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct BiFriedrichRun {
    pub s1: Signal,
    pub s2: Signal,
    pub t_r: [f64; 2],
    pub verdicts: Vec<VerdictRow>,
}

fn slowest_envelope(cat: &PoleCatalogue, t: f64) -> f64 {
    match cat.gammas().first() {
        Some(&g) => cat.amplitude_sum() * (-g * t / cat.hbar()).exp() + cat.khalfin_at(t).abs(),
        None => cat.khalfin_at(t).abs(),
    }
}

/// Signals seen by each observable and a classical/quantum verdict per time.
pub fn bifriedrich_run(model: &BiFriedrichModel, times: &[f64]) -> Result<BiFriedrichRun> {
    let s1 = model.signal(Observable::O1, times)?;
    let s2 = model.signal(Observable::O2, times)?;
    let t_r = [
        model.relaxation_time(Observable::O1),
        model.relaxation_time(Observable::O2),
    ];
    let verdicts = times
        .iter()
        .enumerate()
        .map(|(i, &t)| VerdictRow {
            t,
            part1: Verdict::at(t, t_r[0]),
            part2: Verdict::at(t, t_r[1]),
            deviation: [
                (s1.values()[i] - model.part1.equilibrium()).norm(),
                (s2.values()[i] - model.part2.equilibrium()).norm(),
            ],
            envelope: [slowest_envelope(&model.part1, t), slowest_envelope(&model.part2, t)],
        })
        .collect();
    Ok(BiFriedrichRun { s1, s2, t_r, verdicts })
}
