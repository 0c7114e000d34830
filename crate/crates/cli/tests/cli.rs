use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use decopoles_core::pole_models::{synthesize, uniform_grid, Mode, PoleCatalogue, Rendering};
use decopoles_core::Complex;
use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decopoles"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

fn go(sub: &str, config: &Path, out: &Path) -> Output {
    run(&[sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (h, rows) = table(path);
    let i = h.iter().position(|x| x == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn quantity(path: &Path, key: &str) -> String {
    let (_, rows) = table(path);
    rows.into_iter().find(|r| r[0] == key).unwrap()[1].clone()
}

fn mode(gamma: f64, amp: f64) -> Value {
    json!({"omega": 0.0, "gamma": gamma, "amp_re": amp, "amp_im": 0.0})
}

fn model3() -> Value {
    json!({
        "scenario": "model3",
        "catalogue": {"hbar": 1.0, "equilibrium": 0.0, "modes": [mode(0.1, 3.0), mode(1.0, 2.0), mode(5.0, 1.0)], "khalfin": null},
        "grid": {"t_max": 40.0, "n_points": 2001},
        "rule": {"kind": "second-smallest-gamma"}
    })
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m3.json", &model3());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(go("simulate", &cfg, &a).status.success());
    assert!(go("simulate", &cfg, &b).status.success());
    for f in ["signal.csv", "preferred.csv", "timescales.csv", "curves.csv", "catalogue.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn signal_csv_parses_back_to_the_same_bits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m3.json", &model3());
    let out = dir.path().join("o");
    assert!(go("simulate", &cfg, &out).status.success());
    let modes = [(0.1, 3.0), (1.0, 2.0), (5.0, 1.0)]
        .iter()
        .map(|&(g, a)| Mode::new(0.0, g, Complex::new(a, 0.0)).unwrap())
        .collect();
    let cat = PoleCatalogue::new(1.0, 0.0, modes, None).unwrap();
    let times = uniform_grid(0.0, 40.0, 2001).unwrap();
    let want = synthesize(&cat, &times, Rendering::Full).unwrap();
    let re = column(&out.join("signal.csv"), "re");
    let t = column(&out.join("signal.csv"), "t");
    assert_eq!(t, times);
    for (x, w) in re.iter().zip(want.values()) {
        assert_eq!(x.to_bits(), w.re.to_bits());
    }
    let text = fs::read_to_string(out.join("signal.csv")).unwrap();
    let line = text.lines().nth(2).unwrap();
    let digits: usize = line.split(',').nth(1).unwrap().split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
    assert_eq!(digits, 17);
}

#[test]
fn two_pole_timescales() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m2.json",
        &json!({
            "scenario": "model2",
            "catalogue": {"equilibrium": 0.0, "modes": [mode(0.1, 1.0), mode(1.0, 1.0)]},
            "grid": {"t_max": 20.0, "n_points": 201}
        }),
    );
    let out = dir.path().join("o");
    assert!(go("simulate", &cfg, &out).status.success());
    let ts = out.join("timescales.csv");
    assert_eq!(quantity(&ts, "t_R").parse::<f64>().unwrap(), 10.0);
    assert_eq!(quantity(&ts, "t_D").parse::<f64>().unwrap(), 1.0);
    assert_eq!(quantity(&ts, "p_relevant"), "0");
    assert_eq!(quantity(&ts, "p_irrelevant"), "1");
}

#[test]
fn one_pole_without_tail_prefers_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m1.json",
        &json!({
            "scenario": "model1",
            "catalogue": {"equilibrium": 0.25, "modes": [mode(1.0, 1.0)], "khalfin": {"amplitude": 0.0, "tau": 1.0}},
            "grid": {"t_max": 10.0, "n_points": 101}
        }),
    );
    let out = dir.path().join("o");
    assert!(go("simulate", &cfg, &out).status.success());
    assert!(column(&out.join("preferred.csv"), "re").iter().all(|&v| v == 0.25));
    assert!(column(&out.join("preferred.csv"), "im").iter().all(|&v| v == 0.0));
    assert_eq!(quantity(&out.join("timescales.csv"), "t_R"), "1.0000000000000000e0");
}

#[test]
fn three_pole_curves_merge_past_their_timescales() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m3.json", &model3());
    let out = dir.path().join("o");
    assert!(go("simulate", &cfg, &out).status.success());
    let c = out.join("curves.csv");
    let (t, full, g0, g01) = (column(&c, "t"), column(&c, "full"), column(&c, "gamma0"), column(&c, "gamma0_gamma1"));
    for i in 0..t.len() {
        // full vs two slowest: e^{-5t}; two slowest vs slowest: 2e^{-t}
        if t[i] >= 3.0 {
            assert!((full[i] - g01[i]).abs() < 1e-6);
        }
        if t[i] >= 15.0 {
            assert!((g01[i] - g0[i]).abs() < 1e-6);
        }
    }
    let stdout = String::from_utf8(go("simulate", &cfg, &out).stdout).unwrap();
    assert!(stdout.contains("PASS"), "{stdout}");
}

fn omnes(extra: Value) -> Value {
    let mut v = json!({
        "scenario": "omnes",
        "m": 2.0, "omega": 1.0, "gamma0": 0.01, "l0": 10.0,
        "a_re": 0.8f64.sqrt(), "b_re": 0.2f64.sqrt(), "n": 20000,
        "l0_sweep": [10.0, 20.0, 40.0]
    });
    for (k, x) in extra.as_object().unwrap() {
        v[k] = x.clone();
    }
    v
}

#[test]
fn decoherence_time_scales_with_inverse_square_separation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "om.json", &omnes(json!({})));
    let out = dir.path().join("o");
    assert!(go("omnes", &cfg, &out).status.success());
    let p = column(&out.join("td_vs_L0.csv"), "t_D_L0sq");
    assert_eq!(p.len(), 3);
    assert!(p.iter().all(|x| (x - p[0]).abs() <= 1e-12 * p[0]));
}

#[test]
fn default_run_shows_collective_slope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("om.json");
    assert!(run(&["init", "--scenario", "omnes", "--config", cfg.to_str().unwrap()]).status.success());
    let out = dir.path().join("o");
    assert!(go("omnes", &cfg, &out).status.success());
    let f = out.join("nd_decay.csv");
    let (t, l) = (column(&f, "t"), column(&f, "log_abs_rho12"));
    let slope = (l[1] - l[0]) / (t[1] - t[0]);
    // γ̃₀ = (mω/2ħ²)·L₀²·γ₀ = 1 for the template
    assert!((slope + 1.0).abs() < 1e-3, "{slope}");
    let mac = fs::read_to_string(out.join("macroscopicity.txt")).unwrap();
    assert!(mac.contains("overall: PASS"));
    assert!(out.join("convergence.csv").exists());
}

#[test]
fn small_separation_is_reported_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    // mω/2ħ² = 1, so Δ = L₀ = 0.5
    let cfg = write_config(dir.path(), "om.json", &omnes(json!({"l0": 0.5, "l0_sweep": []})));
    let out = dir.path().join("o");
    let o = go("omnes", &cfg, &out);
    assert!(o.status.success());
    let mac = fs::read_to_string(out.join("macroscopicity.txt")).unwrap();
    assert!(mac.contains("separation: FAIL"));
    assert!(mac.contains(&format!("margin {:.16e}", 0.5 / 10.0)));
    assert!(mac.contains("overall: FAIL"));
    assert!(String::from_utf8(o.stderr).unwrap().contains("macroscopicity"));
}

#[test]
fn width_from_a_coupling_density() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.csv"), "omega,g\n0,0\n1,0.002\n2,0.004\n4,0\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "om.json",
        &omnes(json!({"gamma0": null, "density": {"kind": "sampled", "path": "g.csv"}})),
    );
    let out = dir.path().join("o");
    let o = go("omnes", &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mac = fs::read_to_string(out.join("macroscopicity.txt")).unwrap();
    // γ₀ = π·g(1)
    assert!(mac.contains(&format!("gamma0 = {:.16e}", std::f64::consts::PI * 0.002)), "{mac}");
}

fn simulate_model3(dir: &Path) -> PathBuf {
    let cfg = write_config(dir, "m3.json", &model3());
    let out = dir.join("sim");
    assert!(go("simulate", &cfg, &out).status.success());
    out
}

#[test]
fn extract_recovers_simulated_widths() {
    let dir = tempfile::tempdir().unwrap();
    simulate_model3(dir.path());
    let cfg = write_config(dir.path(), "ex.json", &json!({"scenario": "extract", "signal": "sim/signal.csv", "modes": 3}));
    let out = dir.path().join("fit");
    let o = go("extract", &cfg, &out);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().contains("residual"));
    let got: Value = serde_json::from_str(&fs::read_to_string(out.join("catalogue.json")).unwrap()).unwrap();
    let orig: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sim/catalogue.json")).unwrap()).unwrap();
    for (a, b) in got["modes"].as_array().unwrap().iter().zip(orig["modes"].as_array().unwrap()) {
        let (ga, gb) = (a["gamma"].as_f64().unwrap(), b["gamma"].as_f64().unwrap());
        assert!((ga - gb).abs() < 1e-6 * gb);
        assert!((a["amp_re"].as_f64().unwrap() - b["amp_re"].as_f64().unwrap()).abs() < 1e-6);
    }
    assert_eq!(got["khalfin"], Value::Null);
}

#[test]
fn extract_with_too_many_modes_warns() {
    let dir = tempfile::tempdir().unwrap();
    simulate_model3(dir.path());
    let cfg = write_config(dir.path(), "ex.json", &json!({"scenario": "extract", "signal": "sim/signal.csv", "modes": 5}));
    let out = dir.path().join("fit");
    let o = go("extract", &cfg, &out);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().contains("rank warning: 3 significant modes of 5"));
    let got: Value = serde_json::from_str(&fs::read_to_string(out.join("catalogue.json")).unwrap()).unwrap();
    assert_eq!(got["modes"].as_array().unwrap().len(), 3);
}

#[test]
fn constant_signal_cannot_be_fitted() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("t,re,im\n");
    for k in 0..50 {
        text.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", 0.1 * k as f64, 0.7, 0.0));
    }
    fs::write(dir.path().join("c.csv"), text).unwrap();
    let cfg = write_config(
        dir.path(),
        "ex.json",
        &json!({"scenario": "extract", "signal": "c.csv", "modes": 1, "equilibrium": 0.7}),
    );
    let o = go("extract", &cfg, &dir.path().join("fit"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("rank 0"));
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let mut unknown = model3();
    unknown["grid"]["step"] = json!(0.1);
    let mut negative = model3();
    negative["catalogue"]["modes"][0]["gamma"] = json!(-1.0);
    let cases = [
        ("unknown.json", unknown),
        ("negative.json", negative),
        ("mismatch.json", omnes(json!({}))),
        ("scenario.json", json!({"scenario": "model9"})),
    ];
    for (name, v) in cases {
        let cfg = write_config(dir.path(), name, &v);
        let o = go("simulate", &cfg, &out);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = go("simulate", &dir.path().join("missing.json"), &out);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(dir.path(), "unknown.json", &{
        let mut v = model3();
        v["grid"]["step"] = json!(0.1);
        v
    });
    let err = String::from_utf8(go("simulate", &cfg, &out).stderr).unwrap();
    assert!(err.contains("step") && err.contains("line"), "{err}");
}

#[test]
fn bifriedrich_verdicts_split_between_relaxation_times() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bf.json",
        &json!({
            "scenario": "bifriedrich",
            "part1": {"equilibrium": 0.2, "modes": [mode(1.0, 0.8)]},
            "part2": {"equilibrium": 0.5, "modes": [mode(0.01, 0.5)]},
            "grid": {"t_max": 200.0, "n_points": 401}
        }),
    );
    let out = dir.path().join("o");
    assert!(go("simulate", &cfg, &out).status.success());
    let (_, rows) = table(&out.join("verdicts.csv"));
    for r in rows {
        let t: f64 = r[0].parse().unwrap();
        let split = r[1] == "classical" && r[2] == "quantum";
        assert_eq!(split, t > 1.0 && t < 100.0, "t = {t}");
    }
}
