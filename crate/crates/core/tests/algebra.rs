//! Structure of the concrete Lie algebras, checked against oracles built
//! only from the basis matrices.

use crown_core::lie::h_lambda;
use crown_core::linalg::{self, CMat, RMat, C64, I};
use crown_core::sampling::{self, Stream};
use crown_core::{build_group, CovectorIA, GroupContext};
use nalgebra::{DMatrix, DVector};

const GROUPS: [&str; 5] = ["sl:2", "sl:3", "sl:4", "sp:2", "sp:3"];

fn ctx(s: &str) -> GroupContext {
    build_group(s.parse().unwrap()).unwrap()
}

fn basis(ctx: &GroupContext) -> Vec<RMat> {
    ctx.basis_n
        .iter()
        .chain(&ctx.basis_a)
        .chain(&ctx.basis_k)
        .cloned()
        .collect()
}

/// Columns are the flattened basis matrices.
fn basis_columns(b: &[RMat]) -> RMat {
    let m = b[0].len();
    RMat::from_fn(m, b.len(), |i, j| b[j].as_slice()[i])
}

fn coords(cols: &RMat, x: &RMat) -> DVector<f64> {
    let rhs = DVector::from_column_slice(x.as_slice());
    cols.clone().svd(true, true).solve(&rhs, 1e-12).unwrap()
}

fn random_real(ctx: &GroupContext, seed: u64, index: u64) -> RMat {
    let mut rng = sampling::substream(seed, Stream::Algebra, index);
    basis(ctx)
        .iter()
        .fold(RMat::zeros(ctx.ambient_size, ctx.ambient_size), |acc, b| {
            acc + b * sampling::gaussian(&mut rng)
        })
}

fn random_complex(ctx: &GroupContext, seed: u64, index: u64) -> CMat {
    linalg::to_complex(&random_real(ctx, seed, 2 * index))
        + linalg::to_complex(&random_real(ctx, seed, 2 * index + 1)) * I
}

fn bracket(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

#[test]
fn basis_spans_the_algebra_with_the_right_dimension() {
    for (g, dim) in GROUPS.iter().zip([3, 8, 15, 10, 21]) {
        let c = ctx(g);
        assert_eq!(c.dim_g(), dim, "{g}");
        let cols = basis_columns(&basis(&c));
        assert_eq!(cols.rank(1e-10), dim, "{g}: basis is not independent");
    }
}

#[test]
fn killing_form_matches_trace_of_adjoint_product() {
    for g in GROUPS {
        let c = ctx(g);
        let b = basis(&c);
        let cols = basis_columns(&b);
        let ad = |x: &RMat| {
            let columns: Vec<DVector<f64>> =
                b.iter().map(|e| coords(&cols, &(x * e - e * x))).collect();
            DMatrix::from_columns(&columns)
        };
        for i in 0..4 {
            let (x, y) = (random_real(&c, 11, 2 * i), random_real(&c, 11, 2 * i + 1));
            let oracle = (ad(&x) * ad(&y)).trace();
            let ours = c.killing(&linalg::to_complex(&x), &linalg::to_complex(&y));
            assert!(
                (ours.re - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()),
                "{g}: {} vs {oracle}",
                ours.re
            );
            assert!(ours.im.abs() < 1e-12);
            let real_form = c.killing_r(&linalg::to_complex(&x), &linalg::to_complex(&y));
            assert!((real_form - 2.0 * oracle).abs() <= 1e-9 * (1.0 + oracle.abs()));
        }
    }
}

#[test]
fn split_agrees_with_a_solve_in_the_concatenated_basis() {
    for g in GROUPS {
        let c = ctx(g);
        let b = basis(&c);
        let cols = basis_columns(&b).map(|v| C64::new(v, 0.0));
        let svd = cols.svd(true, true);
        let (nn, na) = (c.basis_n.len(), c.basis_a.len());
        for i in 0..5 {
            let z = random_complex(&c, 23, i);
            let coeff = svd
                .solve(&DVector::from_column_slice(z.as_slice()), 1e-12)
                .unwrap();
            let part = |range: std::ops::Range<usize>| {
                range.fold(CMat::zeros(z.nrows(), z.ncols()), |acc, j| {
                    acc + linalg::to_complex(&b[j]) * coeff[j]
                })
            };
            let split = c.split(&z);
            let scale = linalg::fro(&z);
            assert!(
                linalg::fro(&(&split.n - part(0..nn))) < 1e-12 * scale,
                "{g}: 𝔫 part"
            );
            assert!(
                linalg::fro(&(&split.a - part(nn..nn + na))) < 1e-12 * scale,
                "{g}: 𝔞 part"
            );
            assert!(
                linalg::fro(&(&split.k - part(nn + na..b.len()))) < 1e-12 * scale,
                "{g}: 𝔨 part"
            );
            let a = c.project_a(&z);
            let a_diag = CMat::from_diagonal(&DVector::from_vec(c.diag_of(&a.coords)));
            assert!(linalg::fro(&(a_diag - &split.a)) < 1e-12 * scale);
        }
    }
}

#[test]
fn theta_is_an_involutive_automorphism() {
    for g in GROUPS {
        let c = ctx(g);
        for i in 0..5 {
            let (x, y) = (
                random_complex(&c, 31, 2 * i),
                random_complex(&c, 31, 2 * i + 1),
            );
            let lhs = c.theta_algebra(&bracket(&x, &y));
            let rhs = bracket(&c.theta_algebra(&x), &c.theta_algebra(&y));
            assert!(linalg::fro(&(lhs - rhs)) < 1e-12 * (1.0 + linalg::fro(&x) * linalg::fro(&y)));
            assert!(linalg::fro(&(c.theta_algebra(&c.theta_algebra(&x)) - &x)) == 0.0);
        }
        for k in &c.basis_k {
            let k = linalg::to_complex(k);
            assert!(
                linalg::fro(&(c.theta_algebra(&k) - &k)) == 0.0,
                "{g}: θ ≠ 1 on 𝔨"
            );
        }
        for a in &c.basis_a {
            let a = linalg::to_complex(a);
            assert!(
                linalg::fro(&(c.theta_algebra(&a) + &a)) == 0.0,
                "{g}: θ ≠ −1 on 𝔞"
            );
        }
        // on the group: θ(gh) = θ(g)θ(h)
        let mut rng = sampling::substream(5, Stream::Haar, 0);
        let gm = linalg::to_complex(&sampling::random_group_element(&c, &mut rng, 1.0));
        let hm = linalg::to_complex(&sampling::random_group_element(&c, &mut rng, 1.0));
        let lhs = c.cartan_involution(&(&gm * &hm)).unwrap();
        let rhs = c.cartan_involution(&gm).unwrap() * c.cartan_involution(&hm).unwrap();
        assert!(linalg::rel_residual(&lhs, &rhs) < 1e-12);
    }
}

#[test]
fn positive_root_vectors_are_eigenvectors_of_the_cartan() {
    for g in GROUPS {
        let c = ctx(g);
        let mut rng = sampling::substream(41, Stream::Cartan, 0);
        let h = sampling::random_cartan_box(&c, &mut rng, 1.0);
        let hm = c.cartan_matrix(&h);
        for (e, &root) in c.basis_n.iter().zip(&c.basis_n_roots) {
            let alpha = c.root_datum.eval(root, &h);
            let residual = &hm * e - e * &hm - e * alpha;
            assert!(linalg::fro_real(&residual) < 1e-12, "{g}: root {root}");
        }
    }
}

#[test]
fn h_lambda_represents_lambda_through_the_real_killing_form() {
    for g in GROUPS {
        let c = ctx(g);
        let mut rng = sampling::substream(53, Stream::Covector, 0);
        let lam = CovectorIA::new(sampling::random_cartan_box(&c, &mut rng, 1.0));
        let h = h_lambda(&c, &lam);
        assert!(
            linalg::fro(&h.map(|z| C64::new(z.re, 0.0))) < 1e-14,
            "{g}: H_λ must be imaginary"
        );
        for _ in 0..4 {
            let y = sampling::random_cartan_box(&c, &mut rng, 1.0);
            let iy = linalg::to_complex(&c.cartan_matrix(&y)) * I;
            let lhs = c.killing_r(&iy, &h);
            let rhs = lam.evaluate_imag(&c, &y);
            assert!(
                (lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()),
                "{g}: {lhs} vs {rhs}"
            );
        }
    }
}
