//! Weyl-orbit hulls and the Ω polytope.

use crown_core::sampling::{self, Stream};
use crown_core::weyl::{self, OmegaSpec, HULL_TOL};
use crown_core::{build_group, CartanVector, Family, GroupContext};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use proptest::prelude::*;

fn ctx(s: &str) -> GroupContext {
    build_group(s.parse().unwrap()).unwrap()
}

fn vector(ctx: &GroupContext, raw: &[f64]) -> CartanVector {
    ctx.normalize_coords(CartanVector::new(raw[..ctx.coord_len()].to_vec()))
}

/// Feasibility of Σ t_w·wX = Y, Σ t_w = 1, t ≥ 0.
fn lp_inside(ctx: &GroupContext, x: &CartanVector, y: &CartanVector) -> bool {
    let orbit = weyl::weyl_orbit(ctx, x);
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let t: Vec<_> = orbit
        .iter()
        .map(|_| lp.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    lp.add_constraint(t.iter().map(|&v| (v, 1.0)), ComparisonOp::Eq, 1.0);
    let rows = y.len() - (ctx.spec.family == Family::SpecialLinear) as usize;
    for j in 0..rows {
        lp.add_constraint(
            t.iter().zip(&orbit).map(|(&v, p)| (v, p.coords[j])),
            ComparisonOp::Eq,
            y.coords[j],
        );
    }
    lp.solve().is_ok()
}

#[test]
fn orbit_sizes_match_the_weyl_group() {
    for (g, order) in [
        ("sl:2", 2),
        ("sl:3", 6),
        ("sl:4", 24),
        ("sp:2", 8),
        ("sp:3", 48),
    ] {
        let c = ctx(g);
        assert_eq!(c.weyl_order(), order);
        let x = vector(&c, &[0.9, 0.31, -0.17, -0.05]);
        assert_eq!(weyl::weyl_orbit(&c, &x).len(), order, "{g}: regular orbit");
    }
}

#[test]
fn worked_membership_examples() {
    let sp = ctx("sp:2");
    let out = weyl::hull_contains(
        &sp,
        &CartanVector::new(vec![0.5, 0.2]),
        &CartanVector::new(vec![0.6, 0.0]),
        HULL_TOL,
    );
    assert!(!out.inside);
    assert!((out.margin + 0.1).abs() < 1e-12);
    let sl = ctx("sl:3");
    let x = CartanVector::new(vec![1.0, 0.0, -1.0]);
    assert!(weyl::hull_contains(&sl, &x, &CartanVector::new(vec![0.0, 0.0, 0.0]), HULL_TOL).inside);
    assert!(
        weyl::hull_contains(&sl, &x, &CartanVector::new(vec![-1.0, 1.0, 0.0]), HULL_TOL).inside
    );
    assert!(
        !weyl::hull_contains(
            &sl,
            &x,
            &CartanVector::new(vec![1.1, -0.05, -1.05]),
            HULL_TOL
        )
        .inside
    );
}

#[test]
fn agrees_with_linear_programming() {
    for g in ["sl:2", "sl:3", "sl:4", "sp:2", "sp:3"] {
        let c = ctx(g);
        let mut inside = 0;
        for i in 0..200 {
            let mut rng = sampling::substream(9, Stream::Cartan, i);
            let raw: Vec<f64> = (0..8).map(|_| sampling::gaussian(&mut rng)).collect();
            let x = vector(&c, &raw);
            let s = sampling::uniform(&mut rng, 0.3, 1.4);
            let y =
                &vector(&c, &raw[4..]) * (s * x.norm() / vector(&c, &raw[4..]).norm().max(1e-9));
            let verdict = weyl::hull_contains(&c, &x, &y, HULL_TOL);
            if verdict.margin.abs() > 1e-7 {
                assert_eq!(
                    verdict.inside,
                    lp_inside(&c, &x, &y),
                    "{g}: sample {i}, margin {}",
                    verdict.margin
                );
            }
            inside += verdict.inside as usize;
        }
        assert!(
            inside > 20 && inside < 180,
            "{g}: {inside} inside is too lopsided to be informative"
        );
    }
}

#[test]
fn projection_lands_in_the_hull_and_separates() {
    let c = ctx("sp:3");
    let x = CartanVector::new(vec![0.7, 0.4, 0.1]);
    let y = CartanVector::new(vec![0.9, 0.5, 0.0]);
    let p = weyl::project_onto_hull(&c, &x, &y);
    assert!(weyl::hull_contains(&c, &x, &p, 1e-8).inside);
    let d = &y - &p;
    let orbit = weyl::weyl_orbit(&c, &x);
    // y − p is an outward normal: no orbit point lies beyond p along it
    assert!(orbit.iter().all(|v| d.dot(v) <= d.dot(&p) + 1e-10));
}

#[test]
fn omega_samples_are_deterministic_and_inside() {
    for g in ["sl:3", "sp:2"] {
        let c = ctx(g);
        for spec in [
            OmegaSpec::full(),
            OmegaSpec::scaled(0.8).unwrap(),
            OmegaSpec::ball(0.7).unwrap(),
        ] {
            let a = weyl::sample_omega(&c, &spec, 4, 200).unwrap();
            let b = weyl::sample_omega(&c, &spec, 4, 200).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|x| weyl::omega_margin(&c, &spec, x) > 0.0));
            let other = weyl::sample_omega(&c, &spec, 5, 200).unwrap();
            assert_ne!(a, other);
        }
        // Ω is symmetric under x ↦ −x, so the sample mean is near 0
        let xs = weyl::sample_omega(&c, &OmegaSpec::full(), 8, 4000).unwrap();
        for j in 0..c.coord_len() {
            let mean = xs.iter().map(|x| x.coords[j]).sum::<f64>() / xs.len() as f64;
            assert!(mean.abs() < 0.05, "{g}: coordinate {j} mean {mean}");
        }
    }
}

fn group_strategy() -> impl Strategy<Value = &'static str> {
    prop_oneof![
        Just("sl:2"),
        Just("sl:3"),
        Just("sl:4"),
        Just("sp:2"),
        Just("sp:3")
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_is_weyl_invariant(g in group_strategy(), raw in prop::collection::vec(-1.0f64..1.0, 8), w1 in 0usize..48, w2 in 0usize..48) {
        let c = ctx(g);
        let x = vector(&c, &raw);
        let y = vector(&c, &raw[4..]);
        let wx = c.weyl[w1 % c.weyl_order()].action.apply(&x);
        let wy = c.weyl[w2 % c.weyl_order()].action.apply(&y);
        let base = weyl::hull_contains(&c, &x, &y, HULL_TOL);
        let moved = weyl::hull_contains(&c, &wx, &wy, HULL_TOL);
        prop_assert!((base.margin - moved.margin).abs() < 1e-12);
        prop_assert_eq!(base.inside, moved.inside);
    }

    #[test]
    fn orbit_points_are_inside(g in group_strategy(), raw in prop::collection::vec(-1.0f64..1.0, 4), w in 0usize..48, t in 0.0f64..1.0) {
        let c = ctx(g);
        let x = vector(&c, &raw);
        let orbit = weyl::weyl_orbit(&c, &x);
        let v = &orbit[w % orbit.len()];
        prop_assert!(weyl::hull_contains(&c, &x, v, HULL_TOL).inside);
        // segments between orbit points stay inside
        let u = &orbit[(w + 1) % orbit.len()];
        prop_assert!(weyl::hull_contains(&c, &x, &(&(v * t) + &(u * (1.0 - t))), HULL_TOL).inside);
    }

    #[test]
    fn omega_margin_is_weyl_invariant(g in group_strategy(), raw in prop::collection::vec(-2.0f64..2.0, 4), w in 0usize..48) {
        let c = ctx(g);
        let x = vector(&c, &raw);
        let wx = c.weyl[w % c.weyl_order()].action.apply(&x);
        for spec in [OmegaSpec::full(), OmegaSpec::scaled(0.8).unwrap(), OmegaSpec::ball(1.0).unwrap()] {
            prop_assert!((weyl::omega_margin(&c, &spec, &x) - weyl::omega_margin(&c, &spec, &wx)).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_domains_nest(g in group_strategy(), raw in prop::collection::vec(-2.0f64..2.0, 4), c1 in 0.1f64..1.0, c2 in 0.1f64..1.0) {
        let c = ctx(g);
        let x = vector(&c, &raw);
        let (small, large) = (c1.min(c2), c1.max(c2));
        let m_small = weyl::omega_margin(&c, &OmegaSpec::scaled(small).unwrap(), &x);
        let m_large = weyl::omega_margin(&c, &OmegaSpec::scaled(large).unwrap(), &x);
        prop_assert!(m_small <= m_large + 1e-15);
    }
}
