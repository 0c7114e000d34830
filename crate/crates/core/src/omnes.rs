//! Two displaced, truncated coherent states of an oscillator whose levels
//! decay as `zₙ = n·z₀`.
//!
//! The off-diagonal block of `|Φ(t)⟩⟨Φ(t)|` with `|Φ(0)⟩ = a|α₁⟩ + b|α₂⟩`
//! decays through a collective pole `γ̃₀ = (mω/2ħ²)·L₀²·γ₀ = Δ²γ₀`, much
//! faster than the single-quantum width `γ₀` once the separation `Δ` is
//! large. We work in the gauge `α₁(0) = 0`, `α₂(0) = Δ`.
//!
//! The older small-`t` estimate of the same block carries a prefactor
//! `¼·mω²L₀²/ħ` in the exponent; the functions here follow the
//! exponential-of-exponential form and its `Δ²γ₀` rate throughout.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{is_finite, Complex, HermitianMatrix, CMatrix};
use crate::{Error, Result};

/// `ln Σ_{k≤n} y^k/k!` for `y ≥ 0`, without overflow.
fn ln_truncated_exp(y: f64, n: usize) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let ly = y.ln();
    let mut logs = Vec::with_capacity(n + 1);
    let mut lt = 0.0;
    logs.push(0.0);
    for k in 1..=n {
        lt += ly - (k as f64).ln();
        logs.push(lt);
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + logs.iter().map(|&l| (l - max).exp()).sum::<f64>().ln()
}

/// Coherent state truncated to Fock levels `0..=N` and renormalised.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiCoherentState {
    alpha: f64,
    n: usize,
}

impl QuasiCoherentState {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::validation("displacement must be finite and nonnegative"));
        }
        Ok(QuasiCoherentState { alpha, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    /// `ln Σ_{k≤N} α^{2k}/k!`, the log of the inverse squared normalisation.
    pub fn ln_norm_sq(&self) -> f64 {
        ln_truncated_exp(self.alpha * self.alpha, self.n)
    }

    /// Fock amplitudes `cₙ ∝ αⁿ/√n!`, evaluated in the log domain.
    pub fn amplitudes(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n + 1);
        if self.alpha == 0.0 {
            out.push(1.0);
            out.resize(self.n + 1, 0.0);
            return out;
        }
        let la = self.alpha.ln();
        let half_norm = 0.5 * self.ln_norm_sq();
        let mut lc = -half_norm;
        out.push(lc.exp());
        for k in 1..=self.n {
            lc += la - 0.5 * (k as f64).ln();
            out.push(lc.exp());
        }
        out
    }

    /// Fock amplitudes after evolution, `cₙ·e^{−i n z₀ t/ħ}`.
    pub fn evolved(&self, z0: Complex, t: f64, hbar: f64) -> Vec<Complex> {
        let step = Complex::new(0.0, -1.0) * z0 * (t / hbar);
        self.amplitudes()
            .into_iter()
            .enumerate()
            .map(|(k, c)| (step * k as f64).exp() * c)
            .collect()
    }
}

fn same_truncation(s1: &QuasiCoherentState, s2: &QuasiCoherentState) -> Result<usize> {
    if s1.n != s2.n {
        return Err(Error::validation("states have different truncations"));
    }
    Ok(s1.n)
}

/// `Σ_{n≤N} (−x)ⁿ/n!` with `x = (α₁ − α₂)²/2`.
///
/// When the omitted terms shrink monotonically (`N + 1 > x`) the result is
/// formed as `e^{−x}` minus the alternating tail, which avoids the
/// catastrophic cancellation of the forward sum. Otherwise the retained
/// terms are added by decreasing magnitude with compensation.
pub fn overlap_truncated(s1: &QuasiCoherentState, s2: &QuasiCoherentState) -> Result<f64> {
    let n = same_truncation(s1, s2)?;
    let d = s1.alpha - s2.alpha;
    let x = 0.5 * d * d;
    if x == 0.0 {
        return Ok(1.0);
    }
    let lx = x.ln();
    let ln_term = |k: usize, lnfact: f64| k as f64 * lx - lnfact;
    let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };

    let mut lnfact = 0.0;
    for k in 1..=n {
        lnfact += (k as f64).ln();
    }
    if (n + 1) as f64 > x {
        // tail Σ_{k>N} (−x)^k/k!, alternating with shrinking terms
        let mut tail = Vec::new();
        let mut k = n + 1;
        let mut lf = lnfact + (k as f64).ln();
        let first = ln_term(k, lf);
        loop {
            let lt = ln_term(k, lf);
            tail.push(sign(k) * lt.exp());
            if lt < first - 40.0 || lt < -745.0 {
                break;
            }
            k += 1;
            lf += (k as f64).ln();
        }
        let tail_sum = tail.iter().rev().sum::<f64>();
        return Ok((-x).exp() - tail_sum);
    }

    let mut terms = Vec::with_capacity(n + 1);
    let mut lf = 0.0;
    for k in 0..=n {
        if k > 0 {
            lf += (k as f64).ln();
        }
        terms.push(sign(k) * ln_term(k, lf).exp());
    }
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    Ok(neumaier_sum(&terms))
}

fn neumaier_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in xs {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Inner product of the two truncated, normalised states,
/// `Σ_{n≤N} (α₁α₂)ⁿ/n!` over the square roots of both norms.
pub fn overlap_exact(s1: &QuasiCoherentState, s2: &QuasiCoherentState) -> Result<f64> {
    let n = same_truncation(s1, s2)?;
    let cross = ln_truncated_exp(s1.alpha * s2.alpha, n);
    Ok((cross - 0.5 * s1.ln_norm_sq() - 0.5 * s2.ln_norm_sq()).exp())
}

/// `(Δ²/2)^{N+1}/(N+1)!`, the Lagrange bound on `|Σ_{n≤N} (−x)ⁿ/n! − e^{−x}|`.
pub fn overlap_error_bound(delta: f64, n: usize) -> Result<f64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::validation("separation must be finite and nonnegative"));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let lx = (0.5 * delta * delta).ln();
    let mut l = 0.0;
    for k in 1..=n + 1 {
        l += lx - (k as f64).ln();
    }
    Ok(l.exp())
}

/// Physical parameters of the displaced-pair initial condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmnesConfig {
    pub m: f64,
    pub omega: f64,
    pub hbar: f64,
    pub gamma0: f64,
    /// Initial separation `|x₁(0) − x₂(0)|`.
    pub l0: f64,
    pub a: Complex,
    pub b: Complex,
    pub n: usize,
}

impl OmnesConfig {
    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.m, "mass"),
            (self.omega, "frequency"),
            (self.hbar, "hbar"),
            (self.gamma0, "gamma0"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(alloc::format!("{name} must be positive and finite")));
            }
        }
        if !(self.l0 >= 0.0 && self.l0.is_finite()) {
            return Err(Error::validation("separation L0 must be finite and nonnegative"));
        }
        if !(is_finite(self.a) && is_finite(self.b)) {
            return Err(Error::validation("superposition coefficients must be finite"));
        }
        let norm = self.a.norm_sqr() + self.b.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::validation("|a|² + |b|² must equal 1"));
        }
        Ok(())
    }

    /// `mω/(2ħ²)`, which turns `L₀²` into `Δ²`.
    pub fn coupling_factor(&self) -> f64 {
        self.m * self.omega / (2.0 * self.hbar * self.hbar)
    }

    /// `Δ = α₂(0) = L₀·√(mω/2ħ²)`.
    pub fn delta(&self) -> f64 {
        self.l0 * self.coupling_factor().sqrt()
    }

    /// The two component states `|α₁(0) = 0⟩`, `|α₂(0) = Δ⟩`.
    pub fn states(&self) -> Result<(QuasiCoherentState, QuasiCoherentState)> {
        Ok((
            QuasiCoherentState::new(0.0, self.n)?,
            QuasiCoherentState::new(self.delta(), self.n)?,
        ))
    }

    pub fn with_l0(&self, l0: f64) -> Self {
        OmnesConfig { l0, ..*self }
    }

    /// The single-quantum pole `ω − iγ₀` with `ω₀′` tied to the oscillator.
    pub fn tied_pole(&self) -> Complex {
        Complex::new(self.omega, -self.gamma0)
    }
}

/// Quantitative reading of "`Δ ≫ 1`" and "`Δ ≪ √(2(N+1))`".
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacroscopicityThresholds {
    pub min_delta: f64,
    pub max_fraction: f64,
}

impl Default for MacroscopicityThresholds {
    fn default() -> Self {
        MacroscopicityThresholds {
            min_delta: 10.0,
            max_fraction: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Macroscopicity {
    pub delta: f64,
    /// `Δ / min_delta`; at least 1 when the separation condition holds.
    pub separation_margin: f64,
    /// `max_fraction·√(2(N+1)) / Δ`; at least 1 when the truncation condition holds.
    pub truncation_margin: f64,
    pub separation_ok: bool,
    pub truncation_ok: bool,
}

impl Macroscopicity {
    pub fn pass(&self) -> bool {
        self.separation_ok && self.truncation_ok
    }
}

pub fn macroscopicity_check(cfg: &OmnesConfig, thresholds: &MacroscopicityThresholds) -> Macroscopicity {
    let delta = cfg.delta();
    let ceiling = thresholds.max_fraction * (2.0 * (cfg.n as f64 + 1.0)).sqrt();
    Macroscopicity {
        delta,
        separation_margin: delta / thresholds.min_delta,
        truncation_margin: ceiling / delta,
        separation_ok: delta >= thresholds.min_delta,
        truncation_ok: delta <= ceiling,
    }
}

/// `e^{−i z₀ t/ħ}`.
fn step_factor(z0: Complex, t: f64, hbar: f64) -> Complex {
    (Complex::new(0.0, -1.0) * z0 * (t / hbar)).exp()
}

fn check_pole(z0: Complex) -> Result<()> {
    if !is_finite(z0) || z0.im > 0.0 {
        return Err(Error::validation("z0 must be finite with Im z0 ≤ 0"));
    }
    Ok(())
}

/// `z₀` with its real part removed: the same decay seen from a frame
/// rotating with the oscillator.
pub fn corotating(z0: Complex) -> Complex {
    Complex::new(0.0, z0.im)
}

/// `⟨α₁(0)|α₁(t)⟩, ⟨α₁(0)|α₂(t)⟩, ⟨α₂(0)|α₁(t)⟩, ⟨α₂(0)|α₂(t)⟩` in the
/// large-separation approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolvedOverlaps {
    pub o11: Complex,
    pub o12: Complex,
    pub o21: Complex,
    pub o22: Complex,
}

pub fn evolved_overlaps(cfg: &OmnesConfig, z0: Complex, t: f64) -> Result<EvolvedOverlaps> {
    cfg.validate()?;
    check_pole(z0)?;
    let d2 = cfg.delta() * cfg.delta();
    let w = step_factor(z0, t, cfg.hbar);
    let small = Complex::new((-0.5 * d2).exp(), 0.0);
    Ok(EvolvedOverlaps {
        o11: Complex::new(1.0, 0.0),
        o12: small,
        o21: small,
        o22: ((Complex::new(1.0, 0.0) - w) * (-d2)).exp(),
    })
}

/// Off-diagonal block of `ρ(t)` in the `{|α₁(0)⟩, |α₂(0)⟩}` frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NdComponents {
    pub rho11: Complex,
    pub rho12: Complex,
    pub rho21: Complex,
    pub rho22: Complex,
    /// `e^{−Δ²/2}`, the size of the neglected `ρ₁₁`, `ρ₂₂` terms.
    pub residual: f64,
    /// `exp[−½Δ²(1 − e^{−2γ₀t/ħ})]`, the closed-form decay factor.
    pub closed_form: f64,
}

/// `ρ₂₁ = conj(a)·b·e^{−Δ²(1 − e^{−iz₀t/ħ})}`, `ρ₁₂ = conj(ρ₂₁)`, `ρ₁₁ ≈ ρ₂₂ ≈ 0`.
pub fn nd_block(cfg: &OmnesConfig, z0: Complex, t: f64) -> Result<NdComponents> {
    let ov = evolved_overlaps(cfg, z0, t)?;
    let d2 = cfg.delta() * cfg.delta();
    let rho21 = cfg.a.conj() * cfg.b * ov.o22;
    let gamma0 = -z0.im;
    Ok(NdComponents {
        rho11: Complex::new(0.0, 0.0),
        rho12: rho21.conj(),
        rho21,
        rho22: Complex::new(0.0, 0.0),
        residual: (-0.5 * d2).exp(),
        closed_form: (-0.5 * d2 * (1.0 - (-2.0 * gamma0 * t / cfg.hbar).exp())).exp(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollectiveRate {
    pub gamma_tilde: f64,
    pub t_d: f64,
    pub t_r: f64,
}

/// `γ̃₀ = (mω/2ħ²)·L₀²·γ₀`, `t_D = ħ/γ̃₀`, `t_R = ħ/γ₀`.
pub fn collective_rate(cfg: &OmnesConfig) -> Result<CollectiveRate> {
    cfg.validate()?;
    if cfg.l0 == 0.0 {
        return Err(Error::validation("L0 must be positive for a collective rate"));
    }
    let gamma_tilde = cfg.coupling_factor() * cfg.l0 * cfg.l0 * cfg.gamma0;
    Ok(CollectiveRate {
        gamma_tilde,
        t_d: cfg.hbar / gamma_tilde,
        t_r: cfg.hbar / cfg.gamma0,
    })
}

/// `|Φ(t)⟩ = a|α₁(t)⟩ + b|α₂(t)⟩` in the truncated Fock basis, with its
/// density matrix available with and without renormalisation.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDensity {
    a: Complex,
    b: Complex,
    first: Vec<Complex>,
    second: Vec<Complex>,
    phi: Vec<Complex>,
    norm_sq: f64,
}

impl FockDensity {
    /// `|Φ(t)⟩`.
    pub fn state(&self) -> &[Complex] {
        &self.phi
    }

    /// `⟨Φ(t)|Φ(t)⟩`, which shrinks under the non-Hermitian evolution.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    /// `⟨u|Φ(t)⟩⟨Φ(t)|v⟩`, without forming the matrix.
    pub fn element(&self, u: &[Complex], v: &[Complex]) -> Complex {
        let left: Complex = u.iter().zip(&self.phi).map(|(x, p)| x.conj() * p).sum();
        let right: Complex = self.phi.iter().zip(v).map(|(p, y)| p.conj() * y).sum();
        left * right
    }

    /// `|Φ(t)⟩⟨Φ(t)|`.
    pub fn unnormalized(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::projector(&self.phi)
    }

    /// `|Φ(t)⟩⟨Φ(t)| / ⟨Φ(t)|Φ(t)⟩`.
    pub fn normalized(&self) -> Result<HermitianMatrix> {
        self.unnormalized()?.normalized_trace()
    }

    /// `|a|²|α₁(t)⟩⟨α₁(t)| + |b|²|α₂(t)⟩⟨α₂(t)|` (unnormalised).
    pub fn diagonal_part(&self) -> Result<HermitianMatrix> {
        let n = self.dim();
        let (p, q) = (self.a.norm_sqr(), self.b.norm_sqr());
        HermitianMatrix::symmetrized(&CMatrix::from_fn(n, n, |i, j| {
            self.first[i] * self.first[j].conj() * p + self.second[i] * self.second[j].conj() * q
        }))
    }

    /// `ab*|α₁(t)⟩⟨α₂(t)| + a*b|α₂(t)⟩⟨α₁(t)|` (unnormalised).
    pub fn off_diagonal_part(&self) -> Result<HermitianMatrix> {
        let n = self.dim();
        let ab = self.a * self.b.conj();
        HermitianMatrix::symmetrized(&CMatrix::from_fn(n, n, |i, j| {
            ab * self.first[i] * self.second[j].conj() + ab.conj() * self.second[i] * self.first[j].conj()
        }))
    }
}

/// Evolves both components level by level with `e^{−inz₀t/ħ}`.
pub fn build_density_matrix(cfg: &OmnesConfig, z0: Complex, t: f64) -> Result<FockDensity> {
    cfg.validate()?;
    check_pole(z0)?;
    if !t.is_finite() {
        return Err(Error::validation("time must be finite"));
    }
    let (s1, s2) = cfg.states()?;
    let first = s1.evolved(z0, t, cfg.hbar);
    let second = s2.evolved(z0, t, cfg.hbar);
    let phi: Vec<Complex> = first
        .iter()
        .zip(&second)
        .map(|(x, y)| cfg.a * x + cfg.b * y)
        .collect();
    let norm_sq = phi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if !(norm_sq.is_finite() && norm_sq > 0.0) {
        return Err(Error::Degenerate("evolved state has zero norm".into()));
    }
    Ok(FockDensity {
        a: cfg.a,
        b: cfg.b,
        first,
        second,
        phi,
        norm_sq,
    })
}

/// 2×2 density matrix in the `{|α₁⟩, |α₂⟩}` frame with off-diagonals
/// `ab*·D(t)`, `D(t) = exp[−½Δ²(1 − e^{−2γ₀t/ħ})]`.
pub fn two_state_density(cfg: &OmnesConfig, t: f64) -> Result<HermitianMatrix> {
    cfg.validate()?;
    let d2 = cfg.delta() * cfg.delta();
    let decay = (-0.5 * d2 * (1.0 - (-2.0 * cfg.gamma0 * t / cfg.hbar).exp())).exp();
    let off = cfg.a * cfg.b.conj() * decay;
    HermitianMatrix::new(CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Complex::new(cfg.a.norm_sqr(), 0.0),
        (1, 1) => Complex::new(cfg.b.norm_sqr(), 0.0),
        (0, 1) => off,
        _ => off.conj(),
    }))
}
