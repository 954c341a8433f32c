//! Closed-form kernel integrals against independent numerical routes.

use proptest::prelude::*;
use westervelt::kernels::KernelSpec;
use westervelt::mlf::{ml, ml_antiderivative};
use westervelt::quad::integrate_breaks;

const GRID: [f64; 4] = [0.3, 0.5, 0.7, 1.0];

/// Worst relative gap between a central difference of the closed-form
/// antiderivative and the kernel itself, over a log-spaced t grid.
fn fd_gap(a: f64, b: f64) -> f64 {
    let eps = 0.1;
    let k = KernelSpec::ml_fixed_tau(a, b, eps, 1.0).unwrap();
    let (_, _, _, c) = k.ml_shape().unwrap();
    // K = c ε^{-b} t^{b-1} E_{a,b}(-(t/ε)^a) = c ε^{-b} d/dt [t^b E_{a,b+1}(-(t/ε)^a)]
    let prim = |t: f64| c * eps.powf(-b) * ml_antiderivative(a, b, 1.0 / eps, t).unwrap();
    let ts: Vec<f64> = (0..60).map(|i| 10f64.powf(-4.0 + 4.3 * i as f64 / 59.0)).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| k.eval(t).unwrap()).collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ts.iter()
        .zip(&vals)
        .map(|(&t, &v)| {
            let h = 1e-4 * t;
            let fd = (prim(t + h) - prim(t - h)) / (2.0 * h);
            (fd - v).abs() / v.abs().max(1e-6 * scale)
        })
        .fold(0.0, f64::max)
}

#[test]
fn antiderivative_differentiates_to_kernel() {
    for a in GRID {
        for b in GRID {
            let gap = fd_gap(a, b);
            assert!(gap <= 1e-5, "(a, b) = ({a}, {b}): {gap:e}");
        }
    }
}

/// `∫₀ᵗ K` by adaptive quadrature with `s = u^{1/γ}` removing `s^{γ-1}`.
fn conv_one_by_quadrature(k: &KernelSpec, gamma: f64, t: f64) -> f64 {
    let brk: Vec<f64> = [0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 1.0]
        .iter()
        .map(|f| (f * t).powf(gamma))
        .collect();
    integrate_breaks(
        |u: f64| {
            if u == 0.0 {
                return Ok(0.0);
            }
            let s = u.powf(1.0 / gamma);
            Ok(k.eval(s)? * s.powf(1.0 - gamma) / gamma)
        },
        &brk,
        1e-14,
        1e-12,
    )
    .unwrap()
    .value
}

#[test]
fn running_integral_matches_quadrature() {
    let cases = [
        (KernelSpec::abel(0.5, 0.1, 1.0).unwrap(), 0.5),
        (KernelSpec::ml_fixed_tau(0.5, 0.75, 0.05, 1.0).unwrap(), 0.75),
        (KernelSpec::ml_fixed_ratio(0.8, 0.4, 0.1, 1.0).unwrap(), 0.4),
        (KernelSpec::exponential(0.2).unwrap(), 1.0),
        (KernelSpec::limit_abel(0.25, 2.0).unwrap(), 0.25),
    ];
    for (k, g) in cases {
        for t in [1e-3, 0.05, 0.4, 1.0, 3.0] {
            let closed = k.conv_one(t).unwrap();
            let quad = conv_one_by_quadrature(&k, g, t);
            assert!((closed - quad).abs() <= 1e-9 * closed.abs().max(1e-3), "{k} at {t}: {closed} vs {quad}");
        }
    }
}

#[test]
fn limit_gap_integral_matches_closed_form() {
    // ‖(K_ε - K_0) ∗ 1‖_{L¹} for a ≤ b: trapezoid on the tabulated difference
    // against T^{1+b-a} E_{a,2+b-a}(-(T/ε)^a)
    for (a, b) in [(0.5, 0.75), (0.6, 0.6), (0.3, 0.7)] {
        let eps = 0.05;
        let k = KernelSpec::ml_fixed_tau(a, b, eps, 1.0).unwrap();
        let d = k.diff_conv_one(1.0, 200_001).unwrap();
        let h = d.t[1] - d.t[0];
        // the a = b difference jumps at 0; drop the endpoint value
        let vals: Vec<f64> = d.values.iter().map(|v| v.abs()).collect();
        let trap = h * (vals[1..].iter().sum::<f64>() - 0.5 * vals[vals.len() - 1]) + 0.5 * h * vals[1];
        let closed = ml(a, 2.0 + b - a, (1.0 / eps).powf(a)).unwrap();
        assert!((d.l1 - closed).abs() < 1e-14);
        assert!((trap - closed).abs() < 2e-3 * closed, "({a}, {b}): {trap} vs {closed}");
    }
}

#[test]
fn point_mass_running_integrals() {
    let k = KernelSpec::dirac(0.3).unwrap();
    assert_eq!(k.conv_one(0.7).unwrap(), 0.3);
    assert!((k.antiderivative(3, 2.0).unwrap() - 0.3 * 2.0).abs() < 1e-15);
    assert!(k.eval(0.5).is_err());
}

proptest! {
    #[test]
    fn higher_antiderivatives_are_consistent(a in 0.2f64..=1.0, b in 0.2f64..=1.0, t in 0.01f64..2.0) {
        let k = KernelSpec::ml_fixed_tau(a, b, 0.1, 1.0).unwrap();
        let h = 1e-4 * t;
        for n in 1..3u32 {
            let fd = (k.antiderivative(n + 1, t + h).unwrap() - k.antiderivative(n + 1, t - h).unwrap()) / (2.0 * h);
            let v = k.antiderivative(n, t).unwrap();
            prop_assert!((fd - v).abs() <= 1e-6 * v.abs().max(1e-8));
        }
    }

    #[test]
    fn string_form_round_trips(alpha in 0.05f64..=1.0, eps in 1e-4f64..=1.0, tau in 0.1f64..10.0) {
        for k in [
            KernelSpec::abel(alpha, eps, tau).unwrap(),
            KernelSpec::ml_fixed_tau(alpha, 1.0, eps, tau).unwrap(),
            KernelSpec::ml_fixed_ratio(1.0, alpha, eps, tau).unwrap(),
            KernelSpec::exponential(eps).unwrap(),
        ] {
            let back: KernelSpec = k.to_string().parse().unwrap();
            prop_assert_eq!(back, k);
        }
    }

    #[test]
    fn completely_monotone_kernels_are_nonnegative(a in 0.1f64..=1.0, db in 0.0f64..0.9, t in 1e-4f64..5.0) {
        let b = (a + db).min(1.0);
        let k = KernelSpec::ml_fixed_tau(a, b, 0.1, 1.0).unwrap();
        prop_assert!(k.is_nonnegative());
        prop_assert!(k.eval(t).unwrap() >= 0.0);
        prop_assert!(k.conv_one(t).unwrap() >= 0.0);
    }

    #[test]
    fn norms_are_monotone_in_horizon(t in 0.1f64..2.0, dt in 0.01f64..1.0) {
        let k = KernelSpec::abel(0.5, 0.1, 1.0).unwrap();
        let n0 = k.norms(t).unwrap();
        let n1 = k.norms(t + dt).unwrap();
        prop_assert!(n1.l1_or_tv >= n0.l1_or_tv && n1.conv1_l1 >= n0.conv1_l1);
    }
}
