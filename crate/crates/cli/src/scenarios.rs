//! One runner per subcommand. Each writes its files into the output
//! directory and returns summary lines for the terminal.

use std::path::Path;

use decopoles_core::numerics::matrix_pencil_fit;
use decopoles_core::omnes::{
    collective_rate, corotating, macroscopicity_check, nd_block, MacroscopicityThresholds, OmnesConfig,
};
use decopoles_core::pole_models::{
    coincidence_check, decoherence_time, model1_times, model2_times, preferred_signal, synthesize, Mode,
    PoleCatalogue, Rendering, TimescaleReport,
};
use decopoles_core::preferred_basis::{
    bifriedrich_run, catalogue_convergence, omnes_collective_matrix, omnes_collective_report, BasisDistance,
    BiFriedrichModel, CatalogueEntry, CatalogueMatrix,
};
use decopoles_core::{Complex, Error as CoreError};
use log::{info, warn};

use crate::config::{
    BiFriedrichConfig, CatalogueJson, DensityJson, ExtractConfig, Frame, Grid, OmnesRunConfig, SimulateConfig,
};
use crate::error::{CliError, Context};
use crate::io::{num, write_json, write_signal, write_text, Table};

pub type Summary = Vec<String>;

fn indices(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

fn report_rows(table: &mut Table, report: &TimescaleReport) {
    let mut row = |k: &str, v: String| table.push(vec![k.to_string(), v]);
    row("t_R", num(report.t_r()));
    row("t_D", num(report.t_d()));
    row("rule", report.rule().as_str().to_string());
    if let Some(rate) = report.threshold_rate() {
        row("threshold_rate", num(rate));
    }
    row("p_relevant", indices(report.p_relevant()));
    row("p_irrelevant", indices(report.p_irrelevant()));
}

fn build_density(d: &DensityJson) -> Result<CatalogueMatrix, CliError> {
    let entries = d
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Ok((
                (e.row, e.col),
                CatalogueEntry::new(
                    Complex::new(e.factor_re, e.factor_im),
                    e.catalogue.build(&format!("density.entries[{i}].catalogue"))?,
                ),
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    CatalogueMatrix::new(d.dim, entries).context("density")
}

fn write_convergence(path: &Path, profile: &[BasisDistance]) -> Result<(), CliError> {
    let mut t = Table::new(&["t", "angle", "gap", "bound", "reliable"]);
    for d in profile {
        t.push(vec![
            num(d.t),
            num(d.subspace_angle),
            num(d.eigenvalue_gap),
            num(d.bound),
            d.reliable.to_string(),
        ]);
    }
    t.write(path)
}

/// `curves.csv`: the full signal next to partial sums of its modes (real parts).
fn write_curves(
    path: &Path,
    kind: &str,
    cat: &PoleCatalogue,
    report: &TimescaleReport,
    times: &[f64],
) -> Result<(), CliError> {
    let bare = |modes: Vec<Mode>, with_tail: bool| -> Result<PoleCatalogue, CliError> {
        let tail = if with_tail { cat.khalfin().copied() } else { None };
        let tail = tail.or(if modes.is_empty() {
            Some(decopoles_core::pole_models::KhalfinTail::absent())
        } else {
            None
        });
        Ok(PoleCatalogue::new(cat.hbar(), cat.equilibrium(), modes, tail)
            .context("curves")?
            .with_pair_product(cat.is_pair_product()))
    };
    let (header, curves): (Vec<&'static str>, Vec<PoleCatalogue>) = if kind == "model1" {
        (
            vec!["t", "full", "pole_only", "khalfin_only"],
            vec![cat.clone(), bare(cat.modes().to_vec(), false)?, bare(Vec::new(), true)?],
        )
    } else {
        let take = |k: usize| cat.modes().iter().take(k).copied().collect::<Vec<_>>();
        (
            vec!["t", "full", "gamma0", "gamma0_gamma1", "preferred"],
            vec![
                cat.clone(),
                bare(take(1), true)?,
                bare(take(2), true)?,
                cat.restricted(report.p_relevant()).context("curves")?,
            ],
        )
    };
    let signals = curves
        .iter()
        .map(|c| synthesize(c, times, Rendering::Full).context("curves"))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&header);
    for (i, &x) in times.iter().enumerate() {
        let mut row = vec![num(x)];
        row.extend(signals.iter().map(|s| num(s.values()[i].re)));
        t.push(row);
    }
    t.write(path)
}

pub fn simulate(kind: &str, cfg: &SimulateConfig, out: &Path) -> Result<Summary, CliError> {
    let cat = cfg.catalogue.build("catalogue")?;
    let times = cfg.grid.times()?;
    if kind != "model3" && cfg.rule.is_some() {
        return Err(CliError::Config(format!("`rule` only applies to model3, not {kind}")));
    }
    let mut table = Table::new(&["quantity", "value"]);
    let report = match kind {
        "model1" => {
            let g0 = cat.gammas().first().copied().unwrap_or(0.0);
            let report = TimescaleReport::model1(&cat).context("catalogue")?;
            let t = model1_times(g0, cat.hbar()).context("catalogue")?;
            report_rows(&mut table, &report);
            for (k, v) in ["pole", "cross_1", "cross_2", "khalfin"].iter().zip(t) {
                table.push(vec![format!("time_{k}"), num(v)]);
            }
            report
        }
        "model2" => {
            let g = cat.gammas();
            let report = TimescaleReport::model2(&cat).context("catalogue")?;
            let t = model2_times(g[0], g[1], cat.hbar()).context("catalogue")?;
            if !t.well_separated {
                warn!("γ₀ = {} is not well below γ₁ = {}; t_R and t_D are close", g[0], g[1]);
            }
            report_rows(&mut table, &report);
            table.push(vec!["intermediate".into(), num(t.intermediate)]);
            table.push(vec!["well_separated".into(), t.well_separated.to_string()]);
            report
        }
        _ => {
            let rule = cfg.rule.unwrap_or(crate::config::RuleJson::SecondSmallestGamma);
            let report = decoherence_time(&cat, &rule.rule()).context("catalogue")?;
            report_rows(&mut table, &report);
            report
        }
    };
    let full = synthesize(&cat, &times, Rendering::Full).context("signal")?;
    let pref = preferred_signal(&cat, &report, &times, Rendering::Full).context("preferred signal")?;
    write_signal(&out.join("signal.csv"), full.times(), full.values())?;
    write_signal(&out.join("preferred.csv"), pref.times(), pref.values())?;
    table.write(&out.join("timescales.csv"))?;
    write_curves(&out.join("curves.csv"), kind, &cat, &report, &times)?;
    write_json(&out.join("catalogue.json"), &CatalogueJson::from_catalogue(&cat))?;

    let mut summary = vec![
        format!("t_R = {}", num(report.t_r())),
        format!("t_D = {}", num(report.t_d())),
        format!(
            "p-relevant modes [{}], p-irrelevant [{}]",
            indices(report.p_relevant()),
            indices(report.p_irrelevant())
        ),
    ];
    if times.last().is_some_and(|&t| t >= report.t_d()) {
        let co = coincidence_check(&full, &pref, &cat, &report).context("coincidence check")?;
        summary.push(format!(
            "max |S - S_P| after t_D = {} (bound {}) {}",
            num(co.max_deviation),
            num(co.bound),
            if co.pass { "PASS" } else { "FAIL" }
        ));
    } else {
        warn!("grid ends before t_D; coincidence check skipped");
    }
    if let Some(d) = &cfg.density {
        let rho = build_density(d)?;
        let prof = catalogue_convergence(&rho, &report, &times).context("convergence profile")?;
        write_convergence(&out.join("convergence.csv"), &prof)?;
        let unreliable = prof.iter().filter(|d| !d.reliable).count();
        if unreliable > 0 {
            warn!("{unreliable} time points have an eigenvalue gap below the reliability threshold");
        }
    }
    Ok(summary)
}

pub fn bifriedrich(cfg: &BiFriedrichConfig, out: &Path) -> Result<Summary, CliError> {
    let model = BiFriedrichModel::new(cfg.part1.build("part1")?, cfg.part2.build("part2")?);
    let times = cfg.grid.times()?;
    let run = bifriedrich_run(&model, &times).context("bi-Friedrich run")?;
    write_signal(&out.join("signal_part1.csv"), run.s1.times(), run.s1.values())?;
    write_signal(&out.join("signal_part2.csv"), run.s2.times(), run.s2.values())?;
    let mut v = Table::new(&["t", "part1_state", "part2_state"]);
    for r in &run.verdicts {
        v.push(vec![num(r.t), r.part1.as_str().into(), r.part2.as_str().into()]);
    }
    v.write(&out.join("verdicts.csv"))?;
    let mut ts = Table::new(&["quantity", "value"]);
    ts.push(vec!["t_R1".into(), num(run.t_r[0])]);
    ts.push(vec!["t_R2".into(), num(run.t_r[1])]);
    ts.write(&out.join("timescales.csv"))?;
    Ok(vec![format!("t_R1 = {}, t_R2 = {}", num(run.t_r[0]), num(run.t_r[1]))])
}

fn omnes_config(cfg: &OmnesRunConfig, base: &Path) -> Result<(OmnesConfig, Option<f64>), CliError> {
    let (gamma0, shift) = match (&cfg.gamma0, &cfg.density) {
        (Some(g), None) => (*g, None),
        (None, Some(spec)) => {
            let g = spec.build(base)?;
            let pole = decopoles_core::friedrich::perturbative_pole(cfg.omega, g.as_ref()).context("density")?;
            (pole.gamma0, Some(pole.delta_omega))
        }
        _ => return Err(CliError::Config("give exactly one of `gamma0` and `density`".into())),
    };
    let oc = OmnesConfig {
        m: cfg.m,
        omega: cfg.omega,
        hbar: cfg.hbar,
        gamma0,
        l0: cfg.l0,
        a: Complex::new(cfg.a_re, cfg.a_im),
        b: Complex::new(cfg.b_re, cfg.b_im),
        n: cfg.n,
    };
    oc.validate().context("omnes parameters")?;
    Ok((oc, shift))
}

pub fn omnes(cfg: &OmnesRunConfig, base: &Path, out: &Path) -> Result<Summary, CliError> {
    let (oc, shift) = omnes_config(cfg, base)?;
    let thresholds = cfg.thresholds.map_or_else(MacroscopicityThresholds::default, |t| MacroscopicityThresholds {
        min_delta: t.min_delta,
        max_fraction: t.max_fraction,
    });
    let mac = macroscopicity_check(&oc, &thresholds);
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let mut text = format!(
        "delta = {}\nseparation: {} (delta >= {}, margin {})\ntruncation: {} (delta <= {}*sqrt(2(N+1)) with N = {}, margin {})\noverall: {}\n",
        num(mac.delta),
        verdict(mac.separation_ok),
        thresholds.min_delta,
        num(mac.separation_margin),
        verdict(mac.truncation_ok),
        thresholds.max_fraction,
        oc.n,
        num(mac.truncation_margin),
        verdict(mac.pass()),
    );
    if let Some(s) = shift {
        text.push_str(&format!("gamma0 = {} (level shift {})\n", num(oc.gamma0), num(s)));
    }
    write_text(&out.join("macroscopicity.txt"), &text)?;
    if !mac.pass() {
        warn!("macroscopicity conditions fail; see macroscopicity.txt");
    }

    let pole = oc.tied_pole();
    let z0 = if cfg.frame == Frame::Corotating { corotating(pole) } else { pole };
    let grid = cfg.grid.unwrap_or(Grid {
        t_max: 0.05 * oc.hbar / oc.gamma0,
        n_points: 201,
    });
    let mut nd = Table::new(&["t", "abs_rho12", "log_abs_rho12", "closed_form"]);
    for t in grid.times()? {
        let b = nd_block(&oc, z0, t).context("off-diagonal block")?;
        let a = b.rho12.norm();
        nd.push(vec![num(t), num(a), num(a.ln()), num(b.closed_form)]);
    }
    nd.write(&out.join("nd_decay.csv"))?;

    let sweep = if cfg.l0_sweep.is_empty() {
        vec![cfg.l0]
    } else {
        cfg.l0_sweep.clone()
    };
    let mut td = Table::new(&["L0", "delta", "gamma_tilde", "t_D", "t_D_L0sq"]);
    for &l0 in &sweep {
        let c = oc.with_l0(l0);
        let r = collective_rate(&c).context(format!("L0 = {l0}"))?;
        td.push(vec![num(l0), num(c.delta()), num(r.gamma_tilde), num(r.t_d), num(r.t_d * l0 * l0)]);
    }
    td.write(&out.join("td_vs_L0.csv"))?;

    let rate = collective_rate(&oc).context("collective rate")?;
    if rate.t_d <= rate.t_r {
        let rho = omnes_collective_matrix(&oc).context("collective density")?;
        let report = omnes_collective_report(&oc).context("collective density")?;
        let times: Vec<f64> = (0..=150).map(|k| rate.t_d * 0.1 * k as f64).collect();
        let prof = catalogue_convergence(&rho, &report, &times).context("convergence profile")?;
        write_convergence(&out.join("convergence.csv"), &prof)?;
    } else {
        warn!("collective width is below gamma0 (delta < 1); convergence.csv not written");
    }

    info!("collective width {}", rate.gamma_tilde);
    Ok(vec![
        format!("delta = {}, macroscopicity {}", num(mac.delta), verdict(mac.pass())),
        format!("t_R = {}", num(rate.t_r)),
        format!("t_D = {}", num(rate.t_d)),
    ])
}

pub fn extract(cfg: &ExtractConfig, base: &Path, out: &Path) -> Result<Summary, CliError> {
    if cfg.modes == 0 {
        return Err(CliError::Config("`modes` must be at least 1".into()));
    }
    if !(cfg.hbar > 0.0 && cfg.hbar.is_finite()) {
        return Err(CliError::Config("`hbar` must be positive".into()));
    }
    let (times, values) = crate::io::read_signal(&base.join(&cfg.signal))?;
    let shifted: Vec<Complex> = values.iter().map(|v| v - cfg.equilibrium).collect();
    let mut summary = Vec::new();
    let fit = match matrix_pencil_fit(&times, &shifted, cfg.modes) {
        Err(CoreError::RankDeficient { rank, requested }) if rank > 0 => {
            warn!("signal supports only {rank} significant modes; {requested} were requested");
            summary.push(format!("rank warning: {rank} significant modes of {requested} requested"));
            matrix_pencil_fit(&times, &shifted, rank).context("matrix pencil fit")?
        }
        r => r.context("matrix pencil fit")?,
    };
    let s0 = fit.singular_values.first().copied().unwrap_or(0.0);
    let kept = fit.singular_values.get(fit.modes.len() - 1).copied().unwrap_or(0.0);
    let next = fit.singular_values.get(fit.modes.len()).copied().unwrap_or(0.0);
    summary.push(format!(
        "rank {}, sigma_min/sigma_0 = {}, next/sigma_0 = {}",
        fit.rank,
        num(kept / s0),
        num(next / s0)
    ));
    let mut modes = Vec::new();
    for (k, m) in fit.modes.iter().enumerate() {
        let gamma = m.decay_rate() * cfg.hbar;
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(CliError::Numeric {
                context: format!("extracted mode {k}"),
                source: CoreError::Degenerate(format!("mode does not decay (rate {gamma})")),
            });
        }
        let omega = if m.z.im.abs() <= 1e-9 * m.z.norm() { 0.0 } else { -m.z.im * cfg.hbar };
        modes.push(Mode::new(omega, gamma, m.amplitude).context(format!("extracted mode {k}"))?);
    }
    let phased = modes.iter().any(|m| m.omega() != 0.0);
    let cat = PoleCatalogue::new(cfg.hbar, cfg.equilibrium, modes, None)
        .context("extracted catalogue")?
        .with_pair_product(phased);
    write_json(&out.join("catalogue.json"), &CatalogueJson::from_catalogue(&cat))?;
    summary.push(format!("residual = {}", num(fit.residual)));
    Ok(summary)
}
