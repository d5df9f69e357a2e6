//! Acceptance suite: one test per numbered criterion, each printing its
//! measurements (run with `--nocapture` to see them for passing tests).
//!
//! Criteria 3, 4 and the slope clause of 6 assert the second-order error
//! law's lambda- and h-exponents on the Evans-function error itself. The
//! measured Evans error sits far below that law because the two shooting
//! sweeps sample mirrored abscissae and their leading defects cancel in the
//! wedge (see the per-side law test in the core crate, where the exponents
//! do hold). Those assertions are kept as stated and fail honestly; the
//! numbers are printed by the tests.

use std::process::Command;

use evans_core::analysis::{
    euler_maclaurin_residual, fit_order, measure_evans_error, reference_evans, reference_nodes,
    SumRule,
};
use evans_core::evans::{asymptotic_evans, evaluate_evans, AsymptoticSeries};
use evans_core::integrate::{one_step, propagate, Coordinates, GridSpec, MethodKind};
use evans_core::linalg::{commutator, expm2, wedge, C2Vector};
use evans_core::model::ReactionModel;
use evans_core::spectral::{
    build_frame, onestep_stiff_expansion, raw_coefficient, transformed_generator, ExpansionOrder,
    Side,
};
use num_complex::Complex64;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn nagumo() -> ReactionModel {
    ReactionModel::nagumo(0.3).unwrap()
}

fn gaussian_bump() -> ReactionModel {
    ReactionModel::bump(0.0, 0.0, 1.0, 1.0).unwrap()
}

#[test]
fn acceptance_01_constant_coefficient_exactness() {
    let model = ReactionModel::constant(0.0, 0.0);
    let lambda = c(4.0);
    for method in [MethodKind::Midpoint, MethodKind::Magnus4] {
        for n in [10usize, 100, 1000] {
            let grid = GridSpec::new(10.0, n).unwrap();
            let d = evaluate_evans(&model, lambda, &grid, method).unwrap().value;
            let err = (d - c(-4.0)).norm();
            assert!(err <= 1e-11, "{method:?} N={n}: error {err:e}");
        }
    }
    // The Gauss-Legendre step is a rational approximation of the
    // exponential, visible in raw coordinates where the initial data is not
    // an invariant direction of the transformed system.
    let frame = build_frame(&model, lambda);
    let mut samples = Vec::new();
    for n in [10usize, 20, 40, 80] {
        let grid = GridSpec::new(10.0, n).unwrap();
        let minus = propagate(&model, &frame, &grid, MethodKind::GaussLegendre4, Side::Minus, Coordinates::Raw)
            .unwrap();
        let plus = propagate(&model, &frame, &grid, MethodKind::GaussLegendre4, Side::Plus, Coordinates::Raw)
            .unwrap();
        let d = wedge(minus.final_value(), plus.final_value());
        samples.push((grid.step_size(), (d - c(-4.0)).norm()));
    }
    let fit = fit_order(&samples).unwrap();
    println!(
        "criterion 01: midpoint/magnus4 exact to 1e-11; gl4 raw h-order {:.3} (need 4 +/- 0.3)",
        fit.slope
    );
    assert!((3.7..=4.3).contains(&fit.slope), "gl4 slope {:.3}", fit.slope);
}

#[test]
fn acceptance_02_translation_zero() {
    let model = nagumo();
    let grid = GridSpec::new(25.0, 2500).unwrap();
    let d = evaluate_evans(&model, c(0.0), &grid, MethodKind::Magnus4).unwrap().value;
    println!("criterion 02: |D(0)| = {:.3e} (need <= 1e-5)", d.norm());
    assert!(d.norm() <= 1e-5);
}

#[test]
fn acceptance_03_midpoint_lambda_order() {
    let model = nagumo();
    let grid = GridSpec::new(25.0, 250).unwrap(); // h = 0.1
    let mut samples = Vec::new();
    for lambda in [1e2, 1e3, 1e4] {
        let report = measure_evans_error(&model, c(lambda), &grid, MethodKind::Midpoint).unwrap();
        println!("criterion 03: lambda = {lambda:.0e}, |E_D| = {:.4e}", report.measured.norm());
        samples.push((lambda, report.measured.norm()));
    }
    let fit = fit_order(&samples).unwrap();
    println!("criterion 03: fitted |E_D| slope vs lambda = {:.3} (need [-0.6, -0.4])", fit.slope);
    assert!(
        (-0.6..=-0.4).contains(&fit.slope),
        "slope {:.3}: the Evans error decays faster than the lambda^(-1/2) h^2 law \
         because the mirrored sweeps cancel the per-side defects; see the decisions ledger \
         and the per-side law test in evans-core",
        fit.slope
    );
}

#[test]
fn acceptance_04_midpoint_h_order() {
    let model = nagumo();
    let lambda = c(1e4);
    let mut samples = Vec::new();
    for n in [60usize, 120, 240, 480] {
        let grid = GridSpec::new(24.0, n).unwrap(); // h = 0.4, 0.2, 0.1, 0.05
        let report = measure_evans_error(&model, lambda, &grid, MethodKind::Midpoint).unwrap();
        println!(
            "criterion 04: h = {:.3}, |E_D| = {:.4e}",
            grid.step_size(),
            report.measured.norm()
        );
        samples.push((grid.step_size(), report.measured.norm()));
    }
    let fit = fit_order(&samples).unwrap();
    println!("criterion 04: fitted |E_D| slope vs h = {:.3} (need [1.8, 2.2])", fit.slope);
    assert!(
        (1.8..=2.2).contains(&fit.slope),
        "slope {:.3}: the h^2 component of the Evans error cancels between the mirrored \
         sweeps, leaving an h^1 residue far below the law; see the decisions ledger",
        fit.slope
    );
}

#[test]
fn acceptance_05_magnus_error_constant() {
    // Gaussian potential: int (phi')^2 = sqrt(pi/2) exactly.
    let model = gaussian_bump();
    let lambda = c(1e4);
    for n in [60usize, 40, 30] {
        let grid = GridSpec::new(12.0, n).unwrap(); // h = 0.2, 0.3, 0.4
        let report = measure_evans_error(&model, lambda, &grid, MethodKind::Magnus4).unwrap();
        let ratio = report.ratio.expect("prediction exists");
        println!(
            "criterion 05: h = {:.3}, measured/predicted = {:.4} (need [0.75, 1.25])",
            grid.step_size(),
            ratio
        );
        assert!((0.75..=1.25).contains(&ratio), "h = {:.3}: ratio {ratio}", grid.step_size());
    }
}

#[test]
fn acceptance_06_gl4_superior_lambda_decay() {
    let model = nagumo();
    let grid = GridSpec::new(25.0, 250).unwrap(); // h = 0.1
    let mut samples = Vec::new();
    for lambda in [1e2, 1e3] {
        let gl = measure_evans_error(&model, c(lambda), &grid, MethodKind::GaussLegendre4).unwrap();
        let mid = measure_evans_error(&model, c(lambda), &grid, MethodKind::Midpoint).unwrap();
        println!(
            "criterion 06: lambda = {lambda:.0e}, |E_gl4| = {:.4e}, |E_mid| = {:.4e}",
            gl.measured.norm(),
            mid.measured.norm()
        );
        assert!(
            gl.measured.norm() < mid.measured.norm(),
            "gl4 not below midpoint at lambda = {lambda:e}"
        );
        samples.push((lambda, gl.measured.norm()));
    }
    let slope = (samples[1].1 / samples[0].1).ln() / 10f64.ln();
    println!("criterion 06: fitted |E_gl4| slope = {slope:.3} (need <= -1.0)");
    assert!(
        slope <= -1.0,
        "slope {slope:.3}: the lambda^-1 h^4 component of the gl4 Evans error collapses \
         (the summed defects are negligible), leaving the lambda^(-1/2) h^8 term; \
         see the decisions ledger",
    );
}

#[test]
fn acceptance_07_asymptotic_series_residual() {
    let model = nagumo();
    let series = AsymptoticSeries::for_model(&model, ExpansionOrder::Second).unwrap();
    let mut samples = Vec::new();
    for lambda in [1e2, 1e3, 1e4] {
        let d_ref = reference_evans(&model, c(lambda), 25.0).unwrap();
        let asym = asymptotic_evans(&series, c(lambda)).unwrap();
        let residual = (d_ref - asym).norm();
        println!("criterion 07: lambda = {lambda:.0e}, residual = {residual:.4e}");
        samples.push((lambda, residual));
    }
    let fit = fit_order(&samples).unwrap();
    println!("criterion 07: residual slope = {:.3} (need [-1.2, -0.8])", fit.slope);
    assert!((-1.2..=-0.8).contains(&fit.slope), "slope {:.3}", fit.slope);
}

#[test]
fn acceptance_08_stiff_one_step_expansions() {
    // Entrywise comparison of the kappa-power expansions against the true
    // one-step exponential. The three entries whose expansions carry
    // kappa-power content must show a stable kappa^-3 defect; the
    // damped-damped corner sits on the exponentially small floor e^{-h k}
    // at the lower lambda values and is checked against that envelope.
    let model = gaussian_bump();
    let (xi_k, h) = (-0.3, 0.1);
    for method in [MethodKind::Midpoint, MethodKind::Magnus4] {
        let mut scaled = Vec::new();
        for lambda in [1e3, 1e4, 1e5] {
            let frame = build_frame(&model, c(lambda));
            let expansion = onestep_stiff_expansion(&model, &frame, method, xi_k, h).unwrap();
            let truth = match method {
                MethodKind::Midpoint => {
                    let g = transformed_generator(&model, &frame, Side::Minus, xi_k + 0.5 * h).unwrap();
                    expm2(&g.scale(c(h))).unwrap()
                }
                _ => {
                    let g1 = transformed_generator(&model, &frame, Side::Minus, xi_k + (0.5 - SQRT_3 / 6.0) * h)
                        .unwrap();
                    let g2 = transformed_generator(&model, &frame, Side::Minus, xi_k + (0.5 + SQRT_3 / 6.0) * h)
                        .unwrap();
                    let omega = (g1 + g2).scale(c(0.5 * h))
                        - commutator(g1, g2).scale(c(SQRT_3 / 12.0 * h * h));
                    expm2(&omega).unwrap()
                }
            };
            let diff = truth - expansion;
            let k3 = frame.kappa_minus.norm().powi(3);
            let m = [diff.a11.norm(), diff.a12.norm(), diff.a21.norm()]
                .into_iter()
                .fold(0.0f64, f64::max)
                * k3;
            let floor = (-h * frame.kappa_minus.re).exp();
            assert!(
                diff.a22.norm() <= 1.5 * floor + 10.0 / k3,
                "{method:?} lambda={lambda:e}: damped corner {:.3e} above envelope",
                diff.a22.norm()
            );
            scaled.push(m);
        }
        let hi = scaled.iter().cloned().fold(0.0f64, f64::max);
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        println!(
            "criterion 08: {method:?} |expm2 - expansion| * kappa^3 = {scaled:.3?}, variation {:.2}x (need < 3x)",
            hi / lo
        );
        assert!(hi / lo < 3.0, "{method:?}: variation {:.2}", hi / lo);
    }
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
}

#[test]
fn acceptance_09_equivariance() {
    let model = nagumo();
    let mut state = 0x5eed_5eedu64;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    while checked < 100 {
        let xi = -5.0 + 10.0 * splitmix(&mut state);
        let lambda = c(1.0 + 99.0 * splitmix(&mut state));
        let h = 0.005 + 0.095 * splitmix(&mut state);
        let frame = build_frame(&model, lambda);
        if !frame.admissible {
            continue;
        }
        checked += 1;
        let basis = frame.b_minus;
        let basis_inv = basis.inverse().unwrap();
        let mu = frame.mu_minus[0];
        for method in [MethodKind::Midpoint, MethodKind::Magnus4] {
            for e in [C2Vector::from_re(1.0, 0.0), C2Vector::from_re(0.0, 1.0)] {
                let gen_t = |x: f64| transformed_generator(&model, &frame, Side::Minus, x).unwrap();
                let transformed_step = one_step(method, &gen_t, xi, h, e).unwrap();
                let gen_r = |x: f64| raw_coefficient(&model, lambda, x);
                let raw_in = (basis * e).scale((mu * Complex64::new(xi, 0.0)).exp());
                let raw_step = one_step(method, &gen_r, xi, h, raw_in).unwrap();
                let pulled = (basis_inv * raw_step).scale((-mu * Complex64::new(xi + h, 0.0)).exp());
                worst = worst.max((transformed_step - pulled).max_norm());
            }
        }
    }
    println!("criterion 09: worst entrywise deviation over 100 samples = {worst:.3e} (need <= 1e-11)");
    assert!(worst <= 1e-11);
}

#[test]
fn acceptance_10_recursion_consistency() {
    let model = nagumo();
    let frame = build_frame(&model, c(1e3));
    let grid = GridSpec::new(25.0, 100).unwrap();
    let h = grid.step_size();
    for method in MethodKind::ALL {
        let mut worst = 0.0f64;
        for side in [Side::Minus, Side::Plus] {
            let coarse = propagate(&model, &frame, &grid, method, side, Coordinates::Transformed).unwrap();
            let refs = reference_nodes(&model, &frame, &grid, side, 32).unwrap();
            let (xi_0, signed_h) = match side {
                Side::Minus => (-grid.half_length(), h),
                Side::Plus => (grid.half_length(), -h),
            };
            let gen = |x: f64| transformed_generator(&model, &frame, side, x).unwrap();
            for k in 0..grid.steps() {
                let xi_k = xi_0 + k as f64 * signed_h;
                let e_k = coarse.trajectory[k] - refs[k];
                let e_next = coarse.trajectory[k + 1] - refs[k + 1];
                let local = one_step(method, &gen, xi_k, signed_h, refs[k]).unwrap() - refs[k + 1];
                let recursed = one_step(method, &gen, xi_k, signed_h, e_k).unwrap() + local;
                worst = worst.max((e_next - recursed).max_norm());
            }
        }
        println!("criterion 10: {method:?} worst per-node identity defect = {worst:.3e} (need <= 1e-12)");
        assert!(worst <= 1e-12, "{method:?}: defect {worst:e}");
    }
}

#[test]
fn acceptance_11_euler_maclaurin_negligibility() {
    let model = nagumo();
    let grid = GridSpec::new(25.0, 250).unwrap(); // h = 0.1
    for rule in [SumRule::MidpointSum, SumRule::GaussPairSum] {
        let residual = euler_maclaurin_residual(&model, &grid, rule).unwrap();
        println!("criterion 11: {rule:?} residual = {residual:.3e} (need < 1e-10)");
        assert!(residual < 1e-10, "{rule:?}: {residual:e}");
    }
}

#[test]
fn acceptance_12_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("run1.csv");
    let second = dir.path().join("run2.csv");
    for path in [&first, &second] {
        let out = Command::new(env!("CARGO_BIN_EXE_evans"))
            .args([
                "evaluate", "--model", "nagumo", "--a", "0.3", "--lambda", "0,1,4,2+1i", "--L",
                "25", "--h", "0.05", "--method", "magnus4", "--output",
            ])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    println!("criterion 12: repeated runs byte-identical = {}", a == b);
    assert_eq!(a, b);
}
