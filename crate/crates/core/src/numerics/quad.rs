use alloc::vec::Vec;
use core::cell::Cell;


use crate::{Error, Result};

/// Absolute tolerance used for principal-value integrals.
pub const PV_TOL: f64 = 1e-9;

const MAX_DEPTH: u32 = 60;
/// Panels narrower than this fraction of the domain are accepted as they are;
/// their combined error estimate still has to stay within tolerance.
const MIN_WIDTH: f64 = 1e-12;
const MAX_EVALS: usize = 20_000_000;
/// The interval is cut into this many panels before adaptation starts, so
/// narrow features are not missed by the first three-point estimate.
const INITIAL_PANELS: usize = 16;

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// `∫_a^b f` by adaptive Simpson with Richardson correction, to absolute
/// tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::validation("integration bounds must be finite"));
    }
    if !(tol > 0.0) {
        return Err(Error::validation("quadrature tolerance must be positive"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return adaptive_simpson(f, b, a, tol).map(|v| -v);
    }

    let evals = Cell::new(0usize);
    let eval = |x: f64| -> Result<f64> {
        evals.set(evals.get() + 1);
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::validation("integrand is not finite"))
        }
    };

    let h = (b - a) / INITIAL_PANELS as f64;
    let mut stack: Vec<Segment> = Vec::with_capacity(2 * MAX_DEPTH as usize);
    let mut left_val = eval(a)?;
    for k in 0..INITIAL_PANELS {
        let x0 = a + k as f64 * h;
        let x1 = if k + 1 == INITIAL_PANELS { b } else { a + (k + 1) as f64 * h };
        let fm = eval(0.5 * (x0 + x1))?;
        let fb = eval(x1)?;
        stack.push(Segment {
            a: x0,
            b: x1,
            fa: left_val,
            fm,
            fb,
            whole: simpson(x0, x1, left_val, fm, fb),
            tol: tol / INITIAL_PANELS as f64,
            depth: 0,
        });
        left_val = fb;
    }

    let scale: f64 = stack.iter().map(|s| s.whole.abs()).sum();
    let mut total = 0.0;
    let mut compensation = 0.0;
    let mut forced_error = 0.0;
    while let Some(s) = stack.pop() {
        let m = 0.5 * (s.a + s.b);
        let flm = eval(0.5 * (s.a + m))?;
        let frm = eval(0.5 * (m + s.b))?;
        let left = simpson(s.a, m, s.fa, flm, s.fm);
        let right = simpson(m, s.b, s.fm, frm, s.fb);
        let diff = left + right - s.whole;
        let width = s.b - s.a;
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs()).max(scale * width / (b - a));
        let tiny = width <= MIN_WIDTH * (b - a);
        if tiny {
            forced_error += diff.abs() / 15.0;
        }
        if tiny || diff.abs() <= 15.0 * s.tol.max(floor) {
            // Neumaier summation keeps thousands of accepted panels exact
            let v = left + right + diff / 15.0;
            let t = total + v;
            if total.abs() >= v.abs() {
                compensation += (total - t) + v;
            } else {
                compensation += (v - t) + total;
            }
            total = t;
            continue;
        }
        if s.depth >= MAX_DEPTH || evals.get() > MAX_EVALS {
            return Err(Error::NonConvergence {
                what: "adaptive Simpson quadrature",
                iterations: evals.get(),
                residual: diff.abs() / 15.0,
            });
        }
        stack.push(Segment {
            a: s.a,
            b: m,
            fa: s.fa,
            fm: flm,
            fb: s.fm,
            whole: left,
            tol: 0.5 * s.tol,
            depth: s.depth + 1,
        });
        stack.push(Segment {
            a: m,
            b: s.b,
            fa: s.fm,
            fm: frm,
            fb: s.fb,
            whole: right,
            tol: 0.5 * s.tol,
            depth: s.depth + 1,
        });
    }
    if forced_error > tol {
        return Err(Error::NonConvergence {
            what: "adaptive Simpson quadrature",
            iterations: evals.get(),
            residual: forced_error,
        });
    }
    Ok(total + compensation)
}

/// Cauchy principal value `P∫_lo^hi f(ω)/(ω₀ − ω) dω` to absolute tolerance [`PV_TOL`].
///
/// With `u = ω − ω₀` and `r = min(ω₀ − lo, hi − ω₀)` the singular part is
/// rewritten as the regular integral `∫_0^r [f(ω₀−u) − f(ω₀+u)]/u du`; the
/// leftover one-sided piece of the domain has no singularity and is
/// integrated directly. `f` must be continuous at `ω₀`.
pub fn principal_value_integral<F: Fn(f64) -> f64>(f: F, omega0: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && omega0.is_finite()) {
        return Err(Error::validation("principal-value domain must be finite"));
    }
    if !(lo < omega0 && omega0 < hi) {
        return Err(Error::validation("singularity must lie strictly inside the integration domain"));
    }
    let r = (omega0 - lo).min(hi - omega0);
    let h0 = 1e-6 * r;
    let pair = |u: f64| {
        if u == 0.0 {
            (f(omega0 - h0) - f(omega0 + h0)) / h0
        } else {
            (f(omega0 - u) - f(omega0 + u)) / u
        }
    };
    let symmetric = adaptive_simpson(pair, 0.0, r, 0.5 * PV_TOL)?;
    let kernel = |w: f64| f(w) / (omega0 - w);
    let rest = if omega0 - lo > r {
        adaptive_simpson(kernel, lo, omega0 - r, 0.5 * PV_TOL)?
    } else if hi - omega0 > r {
        adaptive_simpson(kernel, omega0 + r, hi, 0.5 * PV_TOL)?
    } else {
        0.0
    };
    Ok(symmetric + rest)
}
