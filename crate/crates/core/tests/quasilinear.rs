//! Picard solver for the quasilinear problem: manufactured solutions,
//! residual behaviour, symmetry and failure reporting.

use proptest::prelude::*;
use westervelt::kernels::KernelSpec;
use westervelt::solver::{check_smallness, manufactured_exact, solve, DataPreset, PDEConfig};
use westervelt::volterra::{energy_norm, Scheme, SpectralBasis};
use westervelt::Error;

fn config(k: f64, data: DataPreset, n: usize, t: f64, dt: f64) -> PDEConfig {
    PDEConfig {
        c: 1.0,
        k,
        kernel: KernelSpec::abel(0.5, 0.1, 1.0).unwrap(),
        data,
        t_final: t,
        dt,
        n_modes: n,
        length: 1.0,
        fp_tol: 1e-11,
        fp_max_iters: 40,
        relaxation: 1.0,
        scheme: Scheme::default(),
    }
}

fn manufactured_error(cfg: &PDEConfig) -> f64 {
    let r = solve(cfg).unwrap();
    let exact = manufactured_exact(cfg, &r.basis).unwrap();
    energy_norm(&r.traj.diff(&exact).unwrap(), &r.basis)
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let errs: Vec<f64> = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]
        .iter()
        .map(|&dt| {
            let cfg = config(0.3, DataPreset::Manufactured { amplitude: 0.05 }, 8, 0.5, dt);
            let e = manufactured_error(&cfg);
            assert!(e <= 5.0 * dt * dt, "dt = {dt}: {e:e}");
            e
        })
        .collect();
    for p in errs.windows(2) {
        let r = p[0] / p[1];
        assert!((3.0..=5.0).contains(&r), "ratio {r}");
    }
}

#[test]
fn manufactured_solution_holds_for_both_schemes_and_kernels() {
    for scheme in [Scheme::TrapezoidalCq, Scheme::ProductIntegration] {
        for kernel in [
            KernelSpec::Zero,
            KernelSpec::dirac(0.05).unwrap(),
            KernelSpec::exponential(0.1).unwrap(),
            KernelSpec::ml_fixed_tau(0.6, 0.6, 0.1, 1.0).unwrap(),
        ] {
            let mut cfg = config(0.3, DataPreset::Manufactured { amplitude: 0.05 }, 6, 0.5, 1.0 / 64.0);
            cfg.kernel = kernel;
            cfg.scheme = scheme;
            let e = manufactured_error(&cfg);
            assert!(e <= 5.0 * cfg.dt * cfg.dt, "{kernel} {scheme:?}: {e:e}");
        }
    }
}

#[test]
fn picard_residuals_contract() {
    let cfg = config(0.2, DataPreset::SmallGaussModes { amplitude: 0.1, width: 2.0 }, 16, 0.5, 1.0 / 128.0);
    let r = solve(&cfg).unwrap();
    assert!(r.ball_ok && r.ball_margin >= 0.5);
    let res = &r.fp_residuals;
    assert!(res.len() >= 3 && *res.last().unwrap() <= cfg.fp_tol);
    for p in res.windows(2) {
        assert!(p[1] < 0.5 * p[0], "{res:?}");
    }
}

#[test]
fn relaxation_reaches_the_same_fixed_point() {
    let mut cfg = config(0.2, DataPreset::SmallGaussModes { amplitude: 0.1, width: 2.0 }, 8, 0.5, 1.0 / 64.0);
    let plain = solve(&cfg).unwrap();
    cfg.relaxation = 0.7;
    let relaxed = solve(&cfg).unwrap();
    assert!(relaxed.iterations > plain.iterations);
    let gap = energy_norm(&plain.traj.diff(&relaxed.traj).unwrap(), &plain.basis);
    assert!(gap <= 1e-9, "{gap:e}");
}

#[test]
fn iteration_cap_reports_residual_history() {
    let mut cfg = config(0.2, DataPreset::SmallGaussModes { amplitude: 0.1, width: 2.0 }, 8, 0.5, 1.0 / 64.0);
    cfg.fp_max_iters = 2;
    match solve(&cfg) {
        Err(Error::NonConvergence { iterations, residuals }) => {
            assert_eq!(iterations, 2);
            assert_eq!(residuals.len(), 2);
            assert!(residuals[1] < residuals[0]);
        }
        other => panic!("expected NonConvergence, got {other:?}"),
    }
}

#[test]
fn large_data_violates_the_ball() {
    let cfg = config(0.3, DataPreset::SingleMode { mode: 1, amplitude: 1.0, velocity: 0.0 }, 8, 0.5, 1.0 / 64.0);
    assert!(matches!(solve(&cfg), Err(Error::BallViolation { iterate: 0, .. })));
}

#[test]
fn manufactured_data_norms() {
    // u₀ = A v₁, u₁ = 0: ‖u₀‖²_{H^s} = A² (L/2) (1 + π²)^s
    let a = 0.05;
    let s = check_smallness(&config(0.3, DataPreset::Manufactured { amplitude: a }, 8, 0.5, 1.0 / 64.0)).unwrap();
    let l1 = 1.0 + std::f64::consts::PI.powi(2);
    assert!((s.u0_h1_sq - a * a * 0.5 * l1).abs() <= 1e-15);
    assert!((s.u0_h3_sq - a * a * 0.5 * l1.powi(3)).abs() <= 1e-13);
    assert_eq!(s.u1_l2_sq, 0.0);
    assert!(s.f_l1_l2_sq > 0.0 && s.r0_sq >= s.u0_h1_sq);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // u ↦ -u, k ↦ -k maps solutions to solutions
    #[test]
    fn sign_symmetry(amp in 0.01f64..0.1, k in 0.05f64..0.4, mode in 1usize..4) {
        let data = |a| DataPreset::SingleMode { mode, amplitude: a, velocity: 0.5 * a };
        let plus = solve(&config(k, data(amp), 6, 0.4, 0.02)).unwrap();
        let minus = solve(&config(-k, data(-amp), 6, 0.4, 0.02)).unwrap();
        for (a, b) in plus.traj.xi.iter().zip(&minus.traj.xi) {
            prop_assert!((a + b).amax() <= 1e-12);
        }
    }

    // 4|k| sup|u| ≤ 1 keeps the leading coefficient in [1/2, 3/2]
    #[test]
    fn ball_margin_is_consistent(amp in 0.01f64..0.2, k in -0.5f64..0.5) {
        let cfg = config(k, DataPreset::SmallGaussModes { amplitude: amp, width: 2.0 }, 8, 0.3, 0.02);
        if let Ok(r) = solve(&cfg) {
            prop_assert!(r.ball_ok);
            prop_assert!(r.ball_margin >= 0.5 - 1e-12);
        }
    }
}

#[test]
fn spectral_basis_matches_sine_series() {
    let b = SpectralBasis::new(2.0, 5).unwrap();
    let mut x = nalgebra::DVector::zeros(5);
    x[2] = 1.0;
    for &p in &[0.1, 0.7, 1.3] {
        let want = (3.0 * std::f64::consts::PI * p / 2.0).sin();
        assert!((b.eval(&x, p) - want).abs() <= 1e-14);
    }
}
