use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{PoleCatalogue, TimescaleReport};
use crate::numerics::Complex;
use crate::{Error, Result};

/// Relative tolerance (against the grid span) on uniform sample spacing.
pub const GRID_UNIFORMITY_TOL: f64 = 1e-12;

/// How mode phases are rendered by [`synthesize`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rendering {
    /// Real damping only, `aᵢ·e^{−γᵢt/ħ}`.
    #[default]
    Envelope,
    /// Adds the beat phase `e^{−iωᵢt/ħ}` for pole-pair product catalogues.
    /// Other catalogues render as [`Rendering::Envelope`].
    Full,
}

/// Samples of a complex signal on a uniform time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    times: Vec<f64>,
    values: Vec<Complex>,
}

impl Signal {
    pub fn new(times: Vec<f64>, values: Vec<Complex>) -> Result<Self> {
        check_grid(&times)?;
        if values.len() != times.len() {
            return Err(Error::validation("signal times and values have different lengths"));
        }
        Ok(Signal { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sample spacing (zero for a single sample).
    pub fn dt(&self) -> f64 {
        match self.times.len() {
            0 | 1 => 0.0,
            n => (self.times[n - 1] - self.times[0]) / (n - 1) as f64,
        }
    }
}

/// `n` equally spaced points from `start` to `end` inclusive.
pub fn uniform_grid(start: f64, end: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::validation("grid must have at least one point"));
    }
    if !(start.is_finite() && end.is_finite()) {
        return Err(Error::validation("grid bounds must be finite"));
    }
    if n == 1 {
        return Ok(alloc::vec![start]);
    }
    if !(end > start) {
        return Err(Error::validation("grid end must exceed its start"));
    }
    let span = end - start;
    Ok((0..n)
        .map(|i| if i + 1 == n { end } else { start + span * i as f64 / (n - 1) as f64 })
        .collect())
}

/// Checks that `times` is non-empty, finite, increasing and uniform.
pub fn check_grid(times: &[f64]) -> Result<()> {
    let n = times.len();
    if n == 0 {
        return Err(Error::validation("time grid is empty"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::validation("time grid has non-finite entries"));
    }
    if n == 1 {
        return Ok(());
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::validation("time grid must be strictly increasing"));
    }
    let span = times[n - 1] - times[0];
    let dt = span / (n - 1) as f64;
    for (i, &t) in times.iter().enumerate() {
        if (t - (times[0] + dt * i as f64)).abs() > GRID_UNIFORMITY_TOL * span {
            return Err(Error::validation("time grid is not uniform"));
        }
    }
    Ok(())
}

/// `S(t)` for one time point.
pub fn eval_catalogue(cat: &PoleCatalogue, t: f64, rendering: Rendering) -> Complex {
    let hbar = cat.hbar();
    let phased = rendering == Rendering::Full && cat.is_pair_product();
    let mut acc = Complex::new(cat.equilibrium(), 0.0);
    for m in cat.modes() {
        let term = m.amplitude * (-m.gamma() * t / hbar).exp();
        acc += if phased {
            term * Complex::new(0.0, -m.omega() * t / hbar).exp()
        } else {
            term
        };
    }
    acc + cat.khalfin_at(t)
}

/// Samples `S(t) = equilibrium + Σ aᵢ e^{−γᵢt/ħ}[e^{−iωᵢt/ħ}] + tail(t)` on `times`.
pub fn synthesize(cat: &PoleCatalogue, times: &[f64], rendering: Rendering) -> Result<Signal> {
    check_grid(times)?;
    if times.iter().any(|&t| t < 0.0) {
        return Err(Error::validation("signal times must be nonnegative"));
    }
    let values = times.iter().map(|&t| eval_catalogue(cat, t, rendering)).collect();
    Ok(Signal {
        times: times.to_vec(),
        values,
    })
}

/// The signal with every p-irrelevant mode removed.
pub fn preferred_signal(
    cat: &PoleCatalogue,
    report: &TimescaleReport,
    times: &[f64],
    rendering: Rendering,
) -> Result<Signal> {
    report.check_matches(cat)?;
    synthesize(&cat.restricted(report.p_relevant())?, times, rendering)
}

/// Outcome of [`coincidence_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coincidence {
    /// `max_{t ≥ t_D} |S(t) − S_P(t)|`.
    pub max_deviation: f64,
    /// `Σ_{dropped} |aᵢ| e^{−γᵢ t_D/ħ}`.
    pub bound: f64,
    pub pass: bool,
}

/// Compares a signal with its preferred counterpart from `t_D` onwards.
pub fn coincidence_check(
    full: &Signal,
    preferred: &Signal,
    cat: &PoleCatalogue,
    report: &TimescaleReport,
) -> Result<Coincidence> {
    report.check_matches(cat)?;
    if full.times() != preferred.times() {
        return Err(Error::validation("signals are sampled on different grids"));
    }
    let t_d = report.t_d();
    if !full.times().iter().any(|&t| t >= t_d) {
        return Err(Error::validation("grid ends before the decoherence time"));
    }
    let max_deviation = full
        .times()
        .iter()
        .zip(full.values().iter().zip(preferred.values()))
        .filter(|(&t, _)| t >= t_d)
        .map(|(_, (a, b))| (a - b).norm())
        .fold(0.0, f64::max);
    let bound = report
        .p_irrelevant()
        .iter()
        .map(|&i| {
            let m = cat.modes()[i];
            m.amplitude.norm() * (-m.gamma() * t_d / cat.hbar()).exp()
        })
        .sum::<f64>();
    Ok(Coincidence {
        max_deviation,
        bound,
        pass: max_deviation <= bound * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;
    use crate::pole_models::{decoherence_time, DecoherenceRule, KhalfinTail, Mode};

    fn fig3() -> PoleCatalogue {
        let modes = [(0.1, 3.0), (1.0, 2.0), (5.0, 1.0)]
            .iter()
            .map(|&(g, a)| Mode::new(0.0, g, c(a, 0.0)).unwrap())
            .collect();
        PoleCatalogue::new(1.0, 0.0, modes, None).unwrap()
    }

    #[test]
    fn value_at_zero_is_amplitude_sum() {
        let cat = PoleCatalogue::new(1.0, 0.0, alloc::vec![Mode::new(0.0, 1.0, c(1.0, 0.0)).unwrap()], None).unwrap();
        let s = synthesize(&cat, &[0.0], Rendering::Envelope).unwrap();
        assert_eq!(s.values()[0], c(1.0, 0.0));
        let late = synthesize(&cat, &[50.0], Rendering::Envelope).unwrap();
        assert!(late.values()[0].norm() <= (-50.0f64).exp());
    }

    #[test]
    fn three_mode_value_matches_direct_sum() {
        let s = synthesize(&fig3(), &[2.0], Rendering::Envelope).unwrap();
        let want = 3.0 * (-0.2f64).exp() + 2.0 * (-2.0f64).exp() + (-10.0f64).exp();
        assert!((s.values()[0].re - want).abs() < 1e-15);
    }

    #[test]
    fn full_rendering_needs_pair_product() {
        let cat = PoleCatalogue::new(1.0, 0.0, alloc::vec![Mode::new(2.0, 1.0, c(1.0, 0.0)).unwrap()], None).unwrap();
        let t = [0.0, 0.5];
        assert_eq!(
            synthesize(&cat, &t, Rendering::Full).unwrap(),
            synthesize(&cat, &t, Rendering::Envelope).unwrap()
        );
        let pair = cat.with_pair_product(true);
        let v = synthesize(&pair, &t, Rendering::Full).unwrap().values()[1];
        let want = c(0.0, -1.0).exp() * (-0.5f64).exp();
        assert!((v - want).norm() < 1e-15);
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(synthesize(&fig3(), &[], Rendering::Envelope).is_err());
        assert!(check_grid(&[0.0, 1.0, 3.0]).is_err());
    }

    #[test]
    fn model1_preferred_is_tail_only() {
        let tail = KhalfinTail::with_default_exponent(0.01, 50.0).unwrap();
        let cat = PoleCatalogue::new(1.0, 0.3, alloc::vec![Mode::new(0.0, 1.0, c(1.0, 0.0)).unwrap()], Some(tail)).unwrap();
        let report = TimescaleReport::model1(&cat).unwrap();
        let grid = uniform_grid(0.0, 10.0, 11).unwrap();
        let sp = preferred_signal(&cat, &report, &grid, Rendering::Envelope).unwrap();
        for (&t, v) in grid.iter().zip(sp.values()) {
            assert_eq!(*v, c(0.3 + tail.eval(t), 0.0));
        }
    }

    #[test]
    fn coincidence_for_two_poles() {
        let modes = alloc::vec![
            Mode::new(0.0, 0.1, c(1.0, 0.0)).unwrap(),
            Mode::new(0.0, 1.0, c(0.7, 0.0)).unwrap(),
        ];
        let cat = PoleCatalogue::new(1.0, 0.0, modes, None).unwrap();
        let report = TimescaleReport::model2(&cat).unwrap();
        let grid = uniform_grid(0.0, 10.0, 101).unwrap();
        let s = synthesize(&cat, &grid, Rendering::Envelope).unwrap();
        let sp = preferred_signal(&cat, &report, &grid, Rendering::Envelope).unwrap();
        let chk = coincidence_check(&s, &sp, &cat, &report).unwrap();
        assert!(chk.pass);
        assert!((chk.bound - 0.7 * (-1.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn identical_signals_have_zero_deviation() {
        let cat = fig3();
        let report = decoherence_time(&cat, &DecoherenceRule::ScaledSmallest(1e3)).unwrap();
        let grid = uniform_grid(0.0, 1.0, 11).unwrap();
        let s = synthesize(&cat, &grid, Rendering::Envelope).unwrap();
        let chk = coincidence_check(&s, &s, &cat, &report).unwrap();
        assert_eq!(chk.max_deviation, 0.0);
    }
}
