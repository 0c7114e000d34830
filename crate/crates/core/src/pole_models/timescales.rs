use alloc::vec::Vec;

use super::PoleCatalogue;
use crate::{Error, Result};

fn check_width(gamma: f64, what: &str) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(alloc::format!("{what} must be positive and finite")))
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    check_width(hbar, "hbar")
}

/// Decay times of the four non-equilibrium terms of the one-pole model:
/// the pole term, the two pole/continuum cross terms, and the power-law
/// background (`f64::INFINITY`).
pub fn model1_times(gamma0: f64, hbar: f64) -> Result<[f64; 4]> {
    check_width(gamma0, "gamma0")?;
    check_hbar(hbar)?;
    let t = hbar / gamma0;
    Ok([t, 2.0 * hbar / gamma0, 2.0 * hbar / gamma0, f64::INFINITY])
}

/// Characteristic times of the two-pole model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPoleTimes {
    pub t_r: f64,
    pub t_d: f64,
    /// Decay time of the two cross terms, `ħ/(γ₁ + γ₀)`.
    pub intermediate: f64,
    /// `false` when `γ₀ ≥ γ₁/10`, i.e. the widths are not well separated.
    pub well_separated: bool,
}

impl TwoPoleTimes {
    /// The four times in term order: `ħ/γ₀, ħ/(γ₁+γ₀), ħ/(γ₁+γ₀), ħ/γ₁`.
    pub fn all(&self) -> [f64; 4] {
        [self.t_r, self.intermediate, self.intermediate, self.t_d]
    }
}

pub fn model2_times(gamma0: f64, gamma1: f64, hbar: f64) -> Result<TwoPoleTimes> {
    check_width(gamma0, "gamma0")?;
    check_width(gamma1, "gamma1")?;
    check_hbar(hbar)?;
    if gamma0 > gamma1 {
        return Err(Error::validation("gamma0 must not exceed gamma1"));
    }
    Ok(TwoPoleTimes {
        t_r: hbar / gamma0,
        t_d: hbar / gamma1,
        intermediate: hbar / (gamma1 + gamma0),
        well_separated: gamma0 < gamma1 / 10.0,
    })
}

/// How the decoherence time is picked from the widths.
pub enum DecoherenceRule<'a> {
    /// `t_D = ħ/γ₁` (or `ħ/γ₀` for a single pole).
    SecondSmallestGamma,
    /// `t_D = ħ/(factor·γ₀)`; the collective rate of a displaced pair of
    /// coherent states has this form with `factor = Δ²`.
    ScaledSmallest(f64),
    /// `t_D = ħ/f(γ₀, γ₁, ...)` for a caller-supplied rate function.
    Custom(&'a dyn Fn(&[f64]) -> f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    SecondSmallestGamma,
    CustomF,
    /// Partition given by hand rather than by a width threshold.
    Explicit,
}

impl RuleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleKind::SecondSmallestGamma => "second-smallest-gamma",
            RuleKind::CustomF => "custom-f",
            RuleKind::Explicit => "explicit",
        }
    }
}

/// Relaxation and decoherence times with the induced mode partition.
///
/// Indices refer to the (width-sorted) modes of the catalogue the report
/// was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct TimescaleReport {
    t_r: f64,
    t_d: f64,
    threshold_rate: Option<f64>,
    p_relevant: Vec<usize>,
    p_irrelevant: Vec<usize>,
    rule: RuleKind,
    mode_count: usize,
}

impl TimescaleReport {
    /// A report with a hand-picked partition.
    pub fn explicit(t_r: f64, t_d: f64, p_relevant: Vec<usize>, mode_count: usize) -> Result<Self> {
        if !(t_d > 0.0) || t_r.is_nan() {
            return Err(Error::validation("timescales must be positive"));
        }
        if t_d > t_r {
            return Err(Error::validation("decoherence time exceeds relaxation time"));
        }
        let mut p_relevant = p_relevant;
        p_relevant.sort_unstable();
        p_relevant.dedup();
        if p_relevant.iter().any(|&i| i >= mode_count) {
            return Err(Error::validation("p-relevant index out of range"));
        }
        let p_irrelevant = (0..mode_count).filter(|i| p_relevant.binary_search(i).is_err()).collect();
        Ok(TimescaleReport {
            t_r,
            t_d,
            threshold_rate: None,
            p_relevant,
            p_irrelevant,
            rule: RuleKind::Explicit,
            mode_count,
        })
    }

    /// One pole plus power-law tail: the pole is dropped, `t_D = ħ/γ₀`, and
    /// `t_R` is infinite while the tail is nonzero.
    pub fn model1(cat: &PoleCatalogue) -> Result<Self> {
        let [mode] = cat.modes() else {
            return Err(Error::validation("the one-pole model needs exactly one mode"));
        };
        let t_d = cat.hbar() / mode.gamma();
        let has_tail = cat.khalfin().is_some_and(|k| !k.is_zero());
        let t_r = if has_tail { f64::INFINITY } else { t_d };
        Self::explicit(t_r, t_d, Vec::new(), 1)
    }

    /// Two poles: only the slowest mode survives, `t_R = ħ/γ₀`, `t_D = ħ/γ₁`.
    /// Extra modes faster than `γ₁` (cross terms) are dropped as well.
    pub fn model2(cat: &PoleCatalogue) -> Result<Self> {
        let g = cat.gammas();
        if g.len() < 2 {
            return Err(Error::validation("the two-pole model needs at least two modes"));
        }
        Self::explicit(cat.hbar() / g[0], cat.hbar() / g[1], alloc::vec![0], g.len())
    }

    pub fn t_r(&self) -> f64 {
        self.t_r
    }

    pub fn t_d(&self) -> f64 {
        self.t_d
    }

    /// Modes with `γ` at or below this rate are p-relevant (absent for explicit partitions).
    pub fn threshold_rate(&self) -> Option<f64> {
        self.threshold_rate
    }

    pub fn p_relevant(&self) -> &[usize] {
        &self.p_relevant
    }

    pub fn p_irrelevant(&self) -> &[usize] {
        &self.p_irrelevant
    }

    pub fn rule(&self) -> RuleKind {
        self.rule
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Fails if the report cannot have come from `cat`.
    pub fn check_matches(&self, cat: &PoleCatalogue) -> Result<()> {
        if cat.modes().len() != self.mode_count {
            return Err(Error::validation("timescale report does not match the catalogue"));
        }
        if let Some(rate) = self.threshold_rate {
            for (i, m) in cat.modes().iter().enumerate() {
                let relevant = m.gamma() <= rate;
                if relevant != self.p_relevant.contains(&i) {
                    return Err(Error::validation("timescale report does not match the catalogue"));
                }
            }
        }
        Ok(())
    }
}

/// Relaxation time `ħ/γ₀`, a rule-selected decoherence time, and the
/// partition of modes into those with `γ ≤ ħ/t_D` (p-relevant) and the rest.
pub fn decoherence_time(cat: &PoleCatalogue, rule: &DecoherenceRule<'_>) -> Result<TimescaleReport> {
    let gammas = cat.gammas();
    let Some(&g0) = gammas.first() else {
        return Err(Error::validation("decoherence time needs at least one pole"));
    };
    let hbar = cat.hbar();
    let (rate, kind) = match rule {
        DecoherenceRule::SecondSmallestGamma => (*gammas.get(1).unwrap_or(&g0), RuleKind::SecondSmallestGamma),
        DecoherenceRule::ScaledSmallest(factor) => (factor * g0, RuleKind::CustomF),
        DecoherenceRule::Custom(f) => (f(&gammas), RuleKind::CustomF),
    };
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::validation("decoherence rate must be positive and finite"));
    }
    let t_r = hbar / g0;
    let t_d = hbar / rate;
    if t_d > t_r {
        return Err(Error::validation(
            "decoherence rate is below the smallest width, so t_D would exceed t_R",
        ));
    }
    let (p_relevant, p_irrelevant) = (0..gammas.len()).partition(|&i| gammas[i] <= rate);
    Ok(TimescaleReport {
        t_r,
        t_d,
        threshold_rate: Some(rate),
        p_relevant,
        p_irrelevant,
        rule: kind,
        mode_count: gammas.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;
    use crate::pole_models::Mode;

    fn cat(gammas: &[f64]) -> PoleCatalogue {
        let modes = gammas.iter().map(|&g| Mode::new(0.0, g, c(1.0, 0.0)).unwrap()).collect();
        PoleCatalogue::new(1.0, 0.0, modes, None).unwrap()
    }

    #[test]
    fn one_pole_times() {
        assert_eq!(model1_times(1.0, 1.0).unwrap(), [1.0, 2.0, 2.0, f64::INFINITY]);
        assert_eq!(model1_times(0.5, 1.0).unwrap(), [2.0, 4.0, 4.0, f64::INFINITY]);
        assert_eq!(model1_times(1.0, 2.0).unwrap(), [2.0, 4.0, 4.0, f64::INFINITY]);
        assert!(model1_times(0.0, 1.0).is_err());
    }

    #[test]
    fn two_pole_times() {
        let t = model2_times(0.1, 1.0, 1.0).unwrap();
        assert_eq!((t.t_r, t.t_d), (10.0, 1.0));
        assert!((t.intermediate - 1.0 / 1.1).abs() < 1e-15);
        // γ₀ = γ₁/10 sits exactly on the warning threshold
        assert!(!t.well_separated);
        let eq = model2_times(1.0, 1.0, 1.0).unwrap();
        assert!(!eq.well_separated);
        assert_eq!((eq.t_r, eq.t_d), (1.0, 1.0));
        let t = model2_times(0.01, 2.0, 1.0).unwrap();
        assert_eq!((t.t_r, t.t_d), (100.0, 0.5));
        assert!(t.well_separated);
        assert!(model2_times(-1.0, 1.0, 1.0).is_err());
        assert!(model2_times(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn second_smallest_partition() {
        let r = decoherence_time(&cat(&[0.1, 1.0, 5.0]), &DecoherenceRule::SecondSmallestGamma).unwrap();
        assert_eq!((r.t_r(), r.t_d()), (10.0, 1.0));
        assert_eq!(r.p_relevant(), [0, 1]);
        assert_eq!(r.p_irrelevant(), [2]);
        assert_eq!(r.rule(), RuleKind::SecondSmallestGamma);
    }

    #[test]
    fn single_pole_has_equal_times() {
        let r = decoherence_time(&cat(&[0.1]), &DecoherenceRule::SecondSmallestGamma).unwrap();
        assert_eq!((r.t_r(), r.t_d()), (10.0, 10.0));
        assert_eq!(r.p_relevant(), [0]);
    }

    #[test]
    fn collective_rate_rule() {
        let r = decoherence_time(&cat(&[0.1]), &DecoherenceRule::ScaledSmallest(100.0)).unwrap();
        assert!((r.t_d() - r.t_r() / 100.0).abs() < 1e-15);
        let f = |g: &[f64]| 100.0 * g[0];
        let r2 = decoherence_time(&cat(&[0.1]), &DecoherenceRule::Custom(&f)).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn bad_custom_rates() {
        let zero = |_: &[f64]| 0.0;
        assert!(decoherence_time(&cat(&[0.1]), &DecoherenceRule::Custom(&zero)).is_err());
        let slow = |g: &[f64]| 0.5 * g[0];
        assert!(decoherence_time(&cat(&[0.1]), &DecoherenceRule::Custom(&slow)).is_err());
    }

    #[test]
    fn equal_width_at_threshold_is_relevant() {
        let r = decoherence_time(&cat(&[0.1, 1.0, 1.0]), &DecoherenceRule::SecondSmallestGamma).unwrap();
        assert_eq!(r.p_relevant(), [0, 1, 2]);
    }

    #[test]
    fn report_mismatch_is_detected() {
        let r = decoherence_time(&cat(&[0.1, 1.0]), &DecoherenceRule::SecondSmallestGamma).unwrap();
        assert!(r.check_matches(&cat(&[0.1, 1.0, 5.0])).is_err());
        assert!(r.check_matches(&cat(&[0.1, 2.0])).is_err());
    }
}
