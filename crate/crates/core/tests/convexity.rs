//! The functional f_(a,λ)(k) = λ(log a(k·a)) on K and its gradient.

use crown_core::convexity::{
    self, ascend_critical, f_a, f_a_lambda, grad_f, k_metric, k_norm, max_weyl_value,
    separating_functional, weyl_values, DEFAULT_ASCENT_TOL, DEFAULT_MAX_ITER,
};
use crown_core::linalg;
use crown_core::sampling::{self, Stream};
use crown_core::weyl::{self, HULL_TOL};
use crown_core::{build_group, CartanVector, CovectorIA, CrownError, GroupContext};

fn ctx(s: &str) -> GroupContext {
    build_group(s.parse().unwrap()).unwrap()
}

#[test]
fn weyl_representatives_realize_the_orbit() {
    for g in ["sl:2", "sl:4", "sp:2", "sp:3"] {
        let c = ctx(g);
        let cfg = convexity::gradient_config(&c, 17, 0).unwrap();
        let a = cfg.x.to_complex_imag();
        for (w, value) in c.weyl.iter().zip(weyl_values(&c, &cfg.x, &cfg.lam)) {
            let image = f_a(&c, &a, &w.representative).unwrap();
            assert!(
                image.max_abs_diff(&w.action.apply(&cfg.x).to_complex_imag()) < 1e-10,
                "{g}"
            );
            assert!(
                (f_a_lambda(&c, &a, &w.representative, &cfg.lam).unwrap() - value).abs() < 1e-10
            );
            // Weyl points are critical
            assert!(k_norm(&c, &grad_f(&c, &a, &w.representative, &cfg.lam).unwrap()) < 1e-9);
        }
    }
}

#[test]
fn values_are_linear_in_lambda() {
    let c = ctx("sp:2");
    let cfg = convexity::gradient_config(&c, 18, 0).unwrap();
    let mu =
        convexity::random_regular_covector(&c, &mut sampling::substream(18, Stream::Covector, 7))
            .unwrap();
    let a = cfg.x.to_complex_imag();
    let sum = f_a_lambda(&c, &a, &cfg.k, &cfg.lam.add(&mu)).unwrap();
    let parts =
        f_a_lambda(&c, &a, &cfg.k, &cfg.lam).unwrap() + f_a_lambda(&c, &a, &cfg.k, &mu).unwrap();
    assert!((sum - parts).abs() < 1e-12);
    let t_sum = grad_f(&c, &a, &cfg.k, &cfg.lam.add(&mu)).unwrap();
    let t_parts = grad_f(&c, &a, &cfg.k, &cfg.lam).unwrap() + grad_f(&c, &a, &cfg.k, &mu).unwrap();
    assert!(linalg::fro_real(&(t_sum - t_parts)) < 1e-12);
}

#[test]
fn values_stay_below_the_weyl_maximum() {
    for g in ["sl:3", "sp:2"] {
        let c = ctx(g);
        for i in 0..50 {
            let cfg = convexity::gradient_config(&c, 19, i).unwrap();
            let f = f_a_lambda(&c, &cfg.x.to_complex_imag(), &cfg.k, &cfg.lam).unwrap();
            assert!(f <= max_weyl_value(&c, &cfg.x, &cfg.lam) + 1e-10, "{g}");
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    // a larger group than the reports cover
    for g in ["sl:4", "sp:3"] {
        let c = ctx(g);
        for i in 0..5 {
            let cfg = convexity::gradient_config(&c, 20, i).unwrap();
            let a = cfg.x.to_complex_imag();
            let t = grad_f(&c, &a, &cfg.k, &cfg.lam).unwrap();
            let h = 1e-5;
            let at = |s: f64| {
                f_a_lambda(
                    &c,
                    &a,
                    &(linalg::skew_exp(&(&cfg.direction * s)) * &cfg.k),
                    &cfg.lam,
                )
                .unwrap()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let analytic = k_metric(&c, &cfg.direction, &t);
            assert!(
                (analytic - fd).abs() / (1.0 + analytic.abs()) < 1e-6,
                "{g}: {analytic} vs {fd}"
            );
        }
    }
}

#[test]
fn ascent_finds_the_weyl_maximum() {
    for g in ["sl:2", "sl:3", "sp:2"] {
        let c = ctx(g);
        for i in 0..5 {
            let cfg = convexity::gradient_config(&c, 21, i).unwrap();
            let run = ascend_critical(
                &c,
                &cfg.x.to_complex_imag(),
                &cfg.k,
                &cfg.lam,
                DEFAULT_MAX_ITER,
                DEFAULT_ASCENT_TOL,
            )
            .unwrap_or_else(|e| panic!("{g}: {e}"));
            assert!(run.converged);
            assert!(run.gap() < 1e-6, "{g}: gap {}", run.gap());
            assert!(run.f_values.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}

#[test]
fn ascent_reports_non_convergence_with_the_partial_run() {
    let c = ctx("sl:3");
    let cfg = convexity::gradient_config(&c, 22, 0).unwrap();
    match ascend_critical(&c, &cfg.x.to_complex_imag(), &cfg.k, &cfg.lam, 0, 1e-30) {
        Err(CrownError::NoConvergence(run)) => {
            assert!(!run.converged);
            assert_eq!(run.f_values.len(), 1);
        }
        other => panic!("expected NoConvergence, got {other:?}"),
    }
}

#[test]
fn separating_functional_separates() {
    let c = ctx("sl:3");
    let x = CartanVector::new(vec![0.6, 0.1, -0.7]);
    for y in [
        vec![0.7, 0.1, -0.8],
        vec![0.0, 0.65, -0.65],
        vec![-0.75, 0.05, 0.7],
    ] {
        let y = CartanVector::new(y);
        assert!(!weyl::hull_contains(&c, &x, &y, HULL_TOL).inside);
        let lam = separating_functional(&c, &x, &y).unwrap();
        assert!(lam.is_regular(&c, 0.0));
        assert!(lam.evaluate_imag(&c, &y) > max_weyl_value(&c, &x, &lam));
    }
    assert!(matches!(
        separating_functional(&c, &x, &CartanVector::zeros(3)),
        Err(CrownError::InsideHull)
    ));
}

#[test]
fn sl2_rotation_angle_controls_the_value() {
    // for SL(2), λ(Im log a) moves monotonically from the X vertex to the sX vertex as k rotates through a quarter turn
    let c = ctx("sl:2");
    let x = CartanVector::new(vec![0.4, -0.4]);
    let lam = CovectorIA::new(CartanVector::new(vec![-1.0, 1.0]));
    let values: Vec<f64> = (0..=20)
        .map(|i| {
            let phi = std::f64::consts::FRAC_PI_2 * i as f64 / 20.0;
            let k = linalg::skew_exp(&crown_core::linalg::RMat::from_row_slice(
                2,
                2,
                &[0.0, -phi, phi, 0.0],
            ));
            f_a_lambda(&c, &x.to_complex_imag(), &k, &lam).unwrap()
        })
        .collect();
    let ends = weyl_values(&c, &x, &lam);
    assert!((values[0] - ends[0]).abs() < 1e-12);
    assert!((values[20] - ends[1]).abs() < 1e-12);
    let increasing = values.windows(2).all(|w| w[1] >= w[0] - 1e-15);
    let decreasing = values.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    assert!(increasing || decreasing);
}
