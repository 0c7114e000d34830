use decopoles_core::friedrich::{perturbative_pole, FnDensity};
use decopoles_core::numerics::{eigh, matrix_pencil_fit, CMatrix, HermitianMatrix};
use decopoles_core::omnes::{overlap_error_bound, overlap_truncated, QuasiCoherentState};
use decopoles_core::pole_models::{
    decoherence_time, eval_catalogue, synthesize, uniform_grid, DecoherenceRule, Mode, PoleCatalogue, Rendering,
};
use decopoles_core::preferred_basis::{catalogue_convergence, moving_eigenbasis, CatalogueEntry, CatalogueMatrix};
use decopoles_core::Complex;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex::new(a, b))
}

fn hermitian(max_dim: usize) -> impl Strategy<Value = HermitianMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec(complex(), n * n)
            .prop_map(move |v| HermitianMatrix::symmetrized(&CMatrix::from_row_major(n, n, v).unwrap()).unwrap())
    })
}

fn modes(max: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    proptest::collection::vec((-2.0f64..2.0, 0.01f64..5.0, -3.0f64..3.0), 1..=max)
}

fn catalogue(m: &[(f64, f64, f64)]) -> PoleCatalogue {
    let modes = m
        .iter()
        .map(|&(w, g, a)| Mode::new(w, g, Complex::new(a, 0.0)).unwrap())
        .collect();
    PoleCatalogue::new(1.0, 0.25, modes, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigh_reconstructs_and_keeps_trace(a in hermitian(64)) {
        let e = eigh(&a).unwrap();
        let scale = a.norm().max(1.0);
        prop_assert!(e.reconstruct().sub(a.as_matrix()).unwrap().max_abs() < 1e-10 * scale);
        let sum: f64 = e.eigenvalues.iter().sum();
        prop_assert!((sum - a.trace()).abs() < 1e-10 * scale);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn principal_value_flips_under_reflection(
        w0 in 0.5f64..1.5, height in 0.5f64..1.0, slope in -0.3f64..0.3, half in 1.0f64..3.0,
    ) {
        let g = FnDensity { f: move |w: f64| height + slope * (w - w0) + 0.5 * (w - w0).powi(2), lo: w0 - 0.5 * half, hi: w0 + half };
        let r = FnDensity { f: move |w: f64| height - slope * (w - w0) + 0.5 * (w - w0).powi(2), lo: w0 - half, hi: w0 + 0.5 * half };
        let a = perturbative_pole(w0, &g).unwrap();
        let b = perturbative_pole(w0, &r).unwrap();
        prop_assert!((a.delta_omega + b.delta_omega).abs() < 1e-8);
        prop_assert_eq!(a.gamma0, b.gamma0);
    }

    #[test]
    fn pencil_recovers_two_separated_modes(g0 in 0.05f64..1.0, ratio in 3.0f64..8.0, a0 in 0.3f64..3.0, a1 in -3.0f64..-0.3) {
        let cat = catalogue(&[(0.0, g0, a0), (0.0, g0 * ratio, a1)]);
        let times = uniform_grid(0.0, 5.0 / g0, 300).unwrap();
        let sig = synthesize(&cat, &times, Rendering::Envelope).unwrap();
        let shifted: Vec<Complex> = sig.values().iter().map(|v| v - 0.25).collect();
        let fit = matrix_pencil_fit(&times, &shifted, 2).unwrap();
        prop_assert!((fit.modes[0].decay_rate() - g0).abs() < 1e-7 * g0);
        prop_assert!((fit.modes[1].decay_rate() - g0 * ratio).abs() < 1e-7 * g0 * ratio);
    }

    #[test]
    fn envelope_bounds_signal_and_decreases(m in modes(5), t in 0.0f64..20.0, dt in 0.0f64..5.0) {
        let cat = catalogue(&m);
        let g0 = cat.gammas()[0];
        let env = |t: f64| cat.amplitude_sum() * (-g0 * t).exp();
        let dev = (eval_catalogue(&cat, t, Rendering::Envelope) - 0.25).norm();
        prop_assert!(dev <= env(t) * (1.0 + 1e-12) + 1e-15);
        prop_assert!(env(t + dt) <= env(t));
    }

    #[test]
    fn mode_order_does_not_matter(m in modes(6), shift in 0usize..6) {
        let mut r = m.clone();
        r.reverse();
        let k = shift % r.len();
        r.rotate_left(k);
        prop_assert_eq!(catalogue(&m), catalogue(&r));
    }

    #[test]
    fn spectra_add(m1 in modes(3), m2 in modes(3), t in 0.0f64..10.0) {
        let both: Vec<_> = m1.iter().chain(&m2).copied().collect();
        let s = eval_catalogue(&catalogue(&both), t, Rendering::Envelope);
        let s1 = eval_catalogue(&catalogue(&m1), t, Rendering::Envelope);
        let s2 = eval_catalogue(&catalogue(&m2), t, Rendering::Envelope);
        prop_assert!((s - (s1 + s2 - 0.25)).norm() < 1e-12 * (1.0 + s.norm()));
    }

    #[test]
    fn partition_is_complete_and_respects_threshold(m in modes(6)) {
        prop_assume!(m.len() >= 2);
        let cat = catalogue(&m);
        let r = decoherence_time(&cat, &DecoherenceRule::SecondSmallestGamma).unwrap();
        let rate = r.threshold_rate().unwrap();
        prop_assert_eq!(r.p_relevant().len() + r.p_irrelevant().len(), cat.modes().len());
        for &i in r.p_relevant() { prop_assert!(cat.modes()[i].gamma() <= rate); }
        for &i in r.p_irrelevant() { prop_assert!(cat.modes()[i].gamma() > rate); }
        prop_assert!(r.t_d() <= r.t_r());
    }

    #[test]
    fn truncated_overlap_within_remainder(d in 0.0f64..6.0, n in 1usize..80) {
        let s1 = QuasiCoherentState::new(0.0, n).unwrap();
        let s2 = QuasiCoherentState::new(d, n).unwrap();
        let v = overlap_truncated(&s1, &s2).unwrap();
        let b = overlap_error_bound(d, n).unwrap();
        prop_assert!((v - (-0.5 * d * d).exp()).abs() <= b * (1.0 + 1e-9) + 1e-15);
    }
}

fn three_level(g: [f64; 3], amps: [f64; 6]) -> CatalogueMatrix {
    let one = Complex::new(1.0, 0.0);
    let entry = |eq: f64, a: f64, b: f64| {
        let modes = vec![
            Mode::new(0.0, g[0], Complex::new(a, 0.0)).unwrap(),
            Mode::new(0.0, g[1], Complex::new(b, 0.0)).unwrap(),
            Mode::new(0.0, g[2], Complex::new(0.5 * b, 0.0)).unwrap(),
        ];
        CatalogueEntry::new(one, PoleCatalogue::new(1.0, eq, modes, None).unwrap())
    };
    CatalogueMatrix::new(
        3,
        vec![
            ((0, 0), entry(0.5, 0.0, 0.0)),
            ((1, 1), entry(0.3, 0.0, 0.0)),
            ((2, 2), entry(0.2, 0.0, 0.0)),
            ((0, 1), entry(0.0, amps[0], amps[1])),
            ((0, 2), entry(0.0, amps[2], amps[3])),
            ((1, 2), entry(0.0, amps[4], amps[5])),
        ],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn three_level_angle_obeys_bound_and_decreases(
        g0 in 0.05f64..0.2, r1 in 5.0f64..20.0, r2 in 1.5f64..4.0,
        amps in proptest::array::uniform6(-0.04f64..0.04),
    ) {
        let g = [g0, g0 * r1, g0 * r1 * r2];
        let rho = three_level(g, amps);
        let cat = &rho.entry(0, 1).unwrap().catalogue;
        let report = decoherence_time(cat, &DecoherenceRule::ScaledSmallest(r1)).unwrap();
        let t_d = report.t_d();
        let times: Vec<f64> = (0..=30).map(|k| t_d * (1.0 + 0.1 * k as f64)).collect();
        let prof = catalogue_convergence(&rho, &report, &times).unwrap();
        for d in &prof {
            prop_assert!(d.within_bound(), "{:?}", d);
        }
        let tail: Vec<f64> = prof.iter().filter(|d| d.t >= 2.0 * t_d).map(|d| d.subspace_angle).collect();
        prop_assert!(tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15));
    }

    #[test]
    fn tracks_survive_grid_reversal(theta in 0.0f64..1.0, rate in -0.5f64..0.5) {
        let times: Vec<f64> = (0..=20).map(|k| 0.05 * k as f64).collect();
        let rhos: Vec<HermitianMatrix> = times
            .iter()
            .map(|&t| {
                let (s, c) = (theta + rate * t).sin_cos();
                let l = [0.9 - 0.2 * t, 0.3, 0.05 + 0.1 * t];
                let v = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
                HermitianMatrix::symmetrized(&CMatrix::from_fn(3, 3, |i, j| {
                    Complex::new((0..3).map(|k| v[i][k] * v[j][k] * l[k]).sum(), 0.0)
                }))
                .unwrap()
            })
            .collect();
        let fwd = moving_eigenbasis(&times, &rhos).unwrap();
        let rt: Vec<f64> = times.iter().rev().copied().collect();
        let rr: Vec<HermitianMatrix> = rhos.iter().rev().cloned().collect();
        let back = moving_eigenbasis(&rt, &rr).unwrap();
        let mut a: Vec<Vec<u64>> = (0..3).map(|k| fwd.track(k).iter().map(|x| (x * 1e9).round() as u64).collect()).collect();
        let mut b: Vec<Vec<u64>> = (0..3)
            .map(|k| back.track(k).iter().rev().map(|x| (x * 1e9).round() as u64).collect())
            .collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        for pair in fwd.step_angles.iter().flatten() {
            prop_assert!(*pair < core::f64::consts::FRAC_PI_2);
        }
    }
}
