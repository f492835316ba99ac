use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use wgie_core::dist::{CustomModel, Model, Window};
use wgie_core::entropy::{
    closed_form_wgie, generalized_entropy, interval_shannon, weighted_generalized_entropy,
    weighted_interval_entropy, weighted_past_renyi, weighted_renyi, weighted_residual_renyi, wgie,
    wgie_quadrature, EntropyError, EntropyOrder, Method, Regime,
};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn ord(alpha: f64, beta: f64) -> EntropyOrder {
    EntropyOrder::new(alpha, beta).unwrap()
}

#[test]
fn order_validation_and_derived_quantities() {
    assert!(EntropyOrder::new(0.5, 1.2).is_ok());
    assert!(EntropyOrder::new(1.5, 2.0).is_ok());
    // beta below 1, alpha at or below beta-1, alpha at or above beta: all out.
    assert!(EntropyOrder::new(0.5, 0.9).is_err());
    assert!(EntropyOrder::new(0.1, 1.2).is_err());
    assert!(EntropyOrder::new(1.0, 2.0).is_err());
    assert!(EntropyOrder::new(1.2, 1.2).is_err());
    assert!(EntropyOrder::new(1.3, 1.2).is_err());
    assert!(EntropyOrder::new(f64::NAN, 1.2).is_err());

    let o = ord(0.5, 1.2);
    close(o.exponent(), 0.7, 1e-15);
    close(o.gap(), 0.7, 1e-15);
    assert_eq!(o.regime(), Regime::Below);
    assert_eq!(ord(1.5, 2.0).regime(), Regime::Above);
    assert_eq!(ord(0.9, 1.1).regime(), Regime::Boundary);
}

#[test]
fn window_entropy_of_linear_density_on_zero_two() {
    // f(x) = x/2 on (0,2), window (0.5, 0.8), order (1.5, 2).
    let m = Model::Power { a: 2.0, b: 2.0 };
    let w = Window::new(0.5, 0.8).unwrap();
    let o = ord(1.5, 2.0);
    let v = wgie(&m, &w, &o).unwrap();
    close(v.value, 1.78963, 1e-4);
    assert_eq!(v.method, Method::ClosedForm);
    assert_eq!(v.est_error, 0.0);
    let q = wgie_quadrature(&m, &w, &o).unwrap();
    close(q.value, 1.78963, 1e-4);
    assert!(q.est_error > 0.0);
}

#[test]
fn window_entropy_of_decreasing_linear_density() {
    // g(x) = 2(1-x) on (0,1), same window and order.
    let m = Model::piecewise_linear(2.0, -2.0, 0.0, 1.0).unwrap();
    let w = Window::new(0.5, 0.8).unwrap();
    let v = wgie(&m, &w, &ord(1.5, 2.0)).unwrap();
    close(v.value, 1.34467, 1e-4);
    assert_eq!(v.method, Method::Quadrature);
}

#[test]
fn uniform_window_entropy_closed_form() {
    let m = Model::Uniform { a: 0.0, b: 10.0 };
    let w = Window::new(1.0, 2.0).unwrap();
    let v = wgie(&m, &w, &ord(0.5, 1.2)).unwrap();
    let expect = ((2.0f64.powf(1.7) - 1.0) / 1.7).ln() / 0.7;
    close(v.value, expect, 1e-12);
    assert_eq!(v.method, Method::ClosedForm);
}

#[test]
fn full_support_weighted_and_unweighted_entropies() {
    let x = Model::piecewise_linear(0.25, 0.25, 0.0, 2.0).unwrap();
    let y = Model::piecewise_linear(0.75, -0.25, 0.0, 2.0).unwrap();
    let o = ord(0.5, 1.2);
    close(weighted_generalized_entropy(&x, &o).unwrap().value, 0.346064, 1e-4);
    close(weighted_generalized_entropy(&y, &o).unwrap().value, 0.0809797, 1e-4);
    // The unweighted measure cannot tell the two densities apart.
    let gx = generalized_entropy(&x, &o).unwrap().value;
    let gy = generalized_entropy(&y, &o).unwrap().value;
    close(gx, 0.283991, 1e-4);
    close(gy, 0.283991, 1e-4);
}

#[test]
fn full_support_equals_a_wide_window() {
    let m = Model::piecewise_linear(0.25, 0.25, 0.0, 2.0).unwrap();
    let o = ord(0.5, 1.2);
    let full = weighted_generalized_entropy(&m, &o).unwrap().value;
    // The support is bounded, so a window covering it reproduces the
    // unconditional value exactly.
    let windowed = wgie(&m, &Window::new(0.0, 2.0).unwrap(), &o).unwrap().value;
    close(windowed, full, 1e-9);
}

#[test]
fn generalized_entropy_analytic_checks() {
    // Uniform(0,1): f = 1, integral = 1, entropy 0 at any valid order.
    let u = Model::Uniform { a: 0.0, b: 1.0 };
    for o in [ord(0.5, 1.2), ord(1.5, 2.0), ord(0.9, 1.1)] {
        close(generalized_entropy(&u, &o).unwrap().value, 0.0, 1e-10);
    }
    // Exponential(1): INT e^{-(a+b-1)x} = 1/(a+b-1).
    let m = Model::Exponential { rate: 1.0 };
    for o in [ord(0.5, 1.2), ord(1.5, 2.0)] {
        let expect = -(o.exponent()).ln() / o.gap();
        close(generalized_entropy(&m, &o).unwrap().value, expect, 1e-9);
    }
}

#[test]
fn closed_forms_match_quadrature_across_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(2020);
    let mut checked = 0usize;
    for trial in 0..40 {
        let u: f64 = rng.random();
        let beta = 1.0 + 1.5 * rng.random::<f64>();
        let alpha = beta - 1.0 + 0.02 + 0.96 * rng.random::<f64>() * 0.98;
        let o = ord(alpha, beta);
        let model = match trial % 6 {
            0 => Model::Uniform { a: 0.0, b: 1.0 + 5.0 * u },
            1 => Model::Exponential { rate: 0.2 + 3.0 * u },
            2 => Model::Power { a: 0.5 + 2.0 * u, b: 0.3 + 3.0 * rng.random::<f64>() },
            3 => Model::Beta1 { c: 0.3 + 3.0 * u },
            4 => Model::ParetoI { a: 0.5 + u, b: 0.5 + 3.0 * rng.random::<f64>() },
            _ => Model::Gamma { shape: 0.4 + 4.0 * u, rate: 0.3 + 2.0 * rng.random::<f64>() },
        };
        let q1 = 0.05 + 0.35 * rng.random::<f64>();
        let q2 = 0.5 + 0.45 * rng.random::<f64>();
        let w = Window::new(model.quantile(q1).unwrap(), model.quantile(q2).unwrap()).unwrap();
        let Some(cf) = closed_form_wgie(&model, &w, &o) else {
            continue;
        };
        let qd = wgie_quadrature(&model, &w, &o).unwrap();
        let tol = 1e-6 * cf.value.abs().max(1.0);
        assert!(
            (cf.value - qd.value).abs() <= tol,
            "{model:?} {w} ({alpha},{beta}): closed {} vs quadrature {}",
            cf.value,
            qd.value
        );
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} closed-form cases exercised");
}

#[test]
fn singular_pareto_denominator_falls_back_to_quadrature() {
    // b(alpha+beta-1) = 1 kills the closed-form denominator.
    let o = ord(0.5, 1.2); // exponent 0.7
    let m = Model::ParetoI { a: 1.0, b: 1.0 / 0.7 };
    let w = Window::new(1.5, 4.0).unwrap();
    assert!(closed_form_wgie(&m, &w, &o).is_none());
    let v = wgie(&m, &w, &o).unwrap();
    assert_eq!(v.method, Method::Quadrature);
    assert!(v.value.is_finite());
    // Just off the singularity the closed form returns and agrees.
    let m2 = Model::ParetoI { a: 1.0, b: 1.0 / 0.7 + 0.01 };
    let cf = closed_form_wgie(&m2, &w, &o).unwrap();
    let qd = wgie_quadrature(&m2, &w, &o).unwrap();
    close(cf.value, qd.value, 1e-6 * qd.value.abs().max(1.0));
}

#[test]
fn out_of_support_windows_use_quadrature_and_agree() {
    // Window sticking past the support: the closed form declines, the
    // quadrature clips, and the value equals the one for the clipped window.
    let m = Model::Beta1 { c: 2.0 };
    let o = ord(1.5, 2.0);
    let wide = Window::new(0.5, 3.0).unwrap();
    assert!(closed_form_wgie(&m, &wide, &o).is_none());
    let v = wgie(&m, &wide, &o).unwrap();
    let clipped = wgie(&m, &Window::new(0.5, 1.0).unwrap(), &o).unwrap();
    close(v.value, clipped.value, 1e-9);
}

#[test]
fn pareto_tail_divergence_is_reported() {
    // (x f)^e ~ x^{-be}: be <= 1 diverges on the unbounded support.
    let o = ord(0.5, 1.2); // e = 0.7
    let m = Model::ParetoI { a: 1.0, b: 1.0 };
    match weighted_generalized_entropy(&m, &o) {
        Err(EntropyError::Divergent { endpoint }) => assert!(endpoint.is_infinite()),
        other => panic!("expected divergence, got {other:?}"),
    }
    assert!(weighted_renyi(&m, 0.9).is_err());
    // A heavier tail index converges.
    let m = Model::ParetoI { a: 1.0, b: 4.0 };
    assert!(weighted_generalized_entropy(&m, &o).unwrap().value.is_finite());
}

#[test]
fn residual_renyi_exponential_oracle() {
    // Exponential(1), alpha = 2: the tail integral has the primitive
    // e^{-2t}(t^2/2 + t/2 + 1/4), so the entropy is -log of that bracket.
    for &t in &[0.3, 1.0, 2.5] {
        let v = weighted_residual_renyi(&Model::Exponential { rate: 1.0 }, t, 2.0).unwrap();
        let expect = -(t * t / 2.0 + t / 2.0 + 0.25f64).ln();
        close(v.value, expect, 1e-8);
    }
}

#[test]
fn beta_one_window_collapses_to_residual_renyi() {
    let m = Model::Exponential { rate: 1.3 };
    let alpha = 0.7;
    let t = 0.9;
    let resid = weighted_residual_renyi(&m, t, alpha).unwrap().value;
    let t2 = m.quantile(1.0 - 1e-12).unwrap();
    let win = wgie(&m, &Window::new(t, t2).unwrap(), &ord(alpha, 1.0)).unwrap().value;
    close(win, resid, 1e-5);
}

#[test]
fn past_renyi_at_the_support_end_is_the_full_measure() {
    let m = Model::Beta1 { c: 2.0 };
    let full = weighted_renyi(&m, 1.7).unwrap().value;
    let past = weighted_past_renyi(&m, 1.0, 1.7).unwrap().value;
    close(past, full, 1e-8);
    assert!(weighted_renyi(&m, 1.0).is_err());
    assert!(weighted_renyi(&m, 0.0).is_err());
    assert!(weighted_residual_renyi(&m, 1.5, 0.5).is_err());
}

#[test]
fn interval_shannon_values() {
    // Uniform window entropy is the log window length.
    let u = Model::Uniform { a: 0.0, b: 10.0 };
    let w = Window::new(2.0, 5.0).unwrap();
    close(interval_shannon(&u, &w).unwrap(), 3.0f64.ln(), 1e-10);

    // f(x) = 2x on (0,1): exact expression via the partial integral of
    // x^2 log x.
    let m = Model::Power { a: 1.0, b: 2.0 };
    for (t1, t2) in [(0.2f64, 0.6f64), (0.1, 0.9), (0.5, 0.7)] {
        let d = t2 * t2 - t1 * t1;
        let expect = -(2.0f64.ln()) - (t2 * t2 * t2.ln() - t1 * t1 * t1.ln()) / d + 0.5 + d.ln();
        close(interval_shannon(&m, &Window::new(t1, t2).unwrap()).unwrap(), expect, 1e-9);
    }
}

#[test]
fn interval_shannon_is_maximized_by_the_flat_density() {
    for m in [
        Model::Exponential { rate: 2.0 },
        Model::Gamma { shape: 3.0, rate: 1.0 },
        Model::Beta1 { c: 0.5 },
        Model::Gpd { theta: 0.8 },
    ] {
        let q = |p: f64| m.quantile(p).unwrap();
        let w = Window::new(q(0.2), q(0.8)).unwrap();
        let h = interval_shannon(&m, &w).unwrap();
        assert!(h <= (w.t2 - w.t1).ln() + 1e-12, "{m:?}: {h}");
    }
}

#[test]
fn weighted_interval_entropy_uniform_oracle() {
    let u = Model::Uniform { a: 0.0, b: 10.0 };
    let w = Window::new(2.0, 5.0).unwrap();
    // Flat p = 1/3: -INT x p log p = log 3 * (t1+t2)/2.
    close(weighted_interval_entropy(&u, &w).unwrap(), 3.0f64.ln() * 3.5, 1e-9);
    // Shrinking windows push the value toward minus infinity without
    // panicking: roughly -x * log(width scale).
    let narrow = weighted_interval_entropy(&u, &Window::new(2.0, 2.0 + 1e-9).unwrap()).unwrap();
    assert!(narrow < -40.0);
}

#[test]
fn exp_exponential_entropy_is_finite_on_a_grid() {
    let m = Model::ExpExponential { shape: 5.2589, rate: 0.0314 };
    for i in 1..6 {
        for j in (i + 1)..7 {
            let t1 = -((i as f64) / 7.0f64).ln() / 0.05;
            let t2 = -((j as f64) / 7.0f64).ln() / 0.05;
            let (a, b) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            let w = Window::new(a, b).unwrap();
            assert!(weighted_interval_entropy(&m, &w).unwrap().is_finite());
        }
    }
}

#[test]
fn truncation_is_self_consistent() {
    // Conditioning on X > t1 first and then windowing gives the same
    // entropy: the truncated densities coincide.
    let base = Model::Exponential { rate: 2.0 };
    let f1 = base.cdf(1.0);
    let b2 = base.clone();
    let b3 = base.clone();
    let residual = Model::Custom(CustomModel {
        name: "residual".into(),
        support: (1.0, f64::INFINITY),
        pdf: Arc::new(move |x| if x > 1.0 { b2.pdf(x) / (1.0 - f1) } else { 0.0 }),
        cdf: Arc::new(move |x| ((b3.cdf(x) - f1) / (1.0 - f1)).max(0.0)),
    });
    let w = Window::new(1.0, 3.0).unwrap();
    for o in [ord(0.5, 1.2), ord(1.5, 2.0)] {
        let direct = wgie(&base, &w, &o).unwrap().value;
        let conditioned = wgie(&residual, &w, &o).unwrap().value;
        close(conditioned, direct, 1e-9);
    }
}

#[test]
fn entropy_is_continuous_across_the_regime_boundary() {
    let m = Model::Exponential { rate: 1.0 };
    let w = Window::new(1.0, 3.0).unwrap();
    // Slide alpha + beta through 2 holding beta - alpha = 0.2.
    let at = |s: f64| {
        let beta = (s + 0.2) / 2.0;
        wgie(&m, &w, &ord(beta - 0.2, beta)).unwrap().value
    };
    let center = at(2.0);
    close(at(2.0 - 1e-7), center, 1e-5);
    close(at(2.0 + 1e-7), center, 1e-5);
}

#[test]
fn gpd_at_tiny_theta_matches_the_exponential() {
    let w = Window::new(0.5, 2.0).unwrap();
    let o = ord(0.5, 1.2);
    let exp = wgie(&Model::Exponential { rate: 1.0 }, &w, &o).unwrap().value;
    let gpd = wgie(&Model::Gpd { theta: 1e-10 }, &w, &o).unwrap().value;
    close(gpd, exp, 1e-6);
}
