use std::sync::Arc;

use anisoheat::asymptotics::lambda_set;
use anisoheat::heisenberg::{h_compose, h_dilate, h_inverse, HPoint};
use anisoheat::kernels::{heisenberg_kernel_t, SigmaQuadrature};
use anisoheat::moments::{moment, taylor_check, taylor_split_check, QuadSettings};
use anisoheat::{DimensionSplit, FnField, MultiIndex, PolyGaussian, ScalarField};
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = HPoint> {
    (prop::collection::vec(-3.0..3.0f64, 2 * n), -5.0..5.0f64).prop_map(|(z, t)| HPoint::new(z, t).unwrap())
}

fn close(a: &HPoint, b: &HPoint, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol
}

/// Sparse polynomial times a Gaussian in two variables, with positive rates.
fn field2() -> impl Strategy<Value = PolyGaussian> {
    (
        prop::collection::vec((-1.0..1.0f64, 0u32..3, 0u32..3), 1..4),
        prop::collection::vec(0.6..2.0f64, 2),
        prop::collection::vec(-0.5..0.5f64, 2),
    )
        .prop_map(|(terms, a, c)| {
            let terms = terms.into_iter().map(|(w, i, j)| (w, vec![i, j])).collect();
            PolyGaussian::new(terms, a, c).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(u in point(2), v in point(2), w in point(2)) {
        let a = h_compose(&h_compose(&u, &v).unwrap(), &w).unwrap();
        let b = h_compose(&u, &h_compose(&v, &w).unwrap()).unwrap();
        prop_assert!(close(&a, &b, 1e-12));
    }

    #[test]
    fn inverse_gives_identity(v in point(1)) {
        let e = HPoint::identity(1);
        prop_assert!(close(&h_compose(&v, &h_inverse(&v)).unwrap(), &e, 1e-12));
        prop_assert!(close(&h_compose(&h_inverse(&v), &v).unwrap(), &e, 1e-12));
    }

    #[test]
    fn dilation_is_an_automorphism(v in point(2), w in point(2), lambda in 0.1..4.0f64) {
        let lhs = h_dilate(lambda, &h_compose(&v, &w).unwrap()).unwrap();
        let rhs = h_compose(&h_dilate(lambda, &v).unwrap(), &h_dilate(lambda, &w).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn composition_on_h1_matches_formula(v in point(1), w in point(1)) {
        let c = h_compose(&v, &w).unwrap();
        let theta = v.theta + w.theta + 2.0 * (v.z[1] * w.z[0] - v.z[0] * w.z[1]);
        prop_assert!((c.theta - theta).abs() < 1e-12);
    }

    #[test]
    fn heat_kernel_is_radial_in_z_and_even_in_theta(r in 0.0..2.5f64, phi in 0.0..6.3f64, theta in -4.0..4.0f64) {
        let quad = SigmaQuadrature::standard(1).unwrap();
        let h = heisenberg_kernel_t(&[r, 0.0], theta, 1.0, &quad).unwrap();
        let rotated = heisenberg_kernel_t(&[r * phi.cos(), r * phi.sin()], theta, 1.0, &quad).unwrap();
        let flipped = heisenberg_kernel_t(&[r, 0.0], -theta, 1.0, &quad).unwrap();
        prop_assert!((h - rotated).abs() <= 1e-12 * h.abs().max(1e-300));
        prop_assert!((h - flipped).abs() <= 1e-12 * h.abs().max(1e-300));
    }

    #[test]
    fn taylor_formula_holds(phi in field2(), x in -1.5..1.5f64, y in -1.5..1.5f64, k in 0u32..4) {
        prop_assert!(taylor_check(&phi, &[x, y], k).unwrap() < 1e-10);
        let split = DimensionSplit::new(1, 1).unwrap();
        prop_assert!(taylor_split_check(&phi, split, &[x, y], k).unwrap() < 1e-10);
    }

    #[test]
    fn lambda_sets_grow_with_p_and_dimension(k in 0u32..7, n in 1usize..5, p in 1.0..2.0f64, dp in 0.0..1.0f64) {
        let a = lambda_set(p, k, n).unwrap();
        prop_assert!(a.pairs.is_subset(&lambda_set(p + dp, k, n).unwrap().pairs));
        prop_assert!(a.pairs.is_subset(&lambda_set(p, k, n + 1).unwrap().pairs));
        prop_assert!(a.pairs.iter().all(|&(x, y)| x + y <= k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn moments_are_linear(f in field2(), g in field2(), s in -2.0..2.0f64, i in 0u32..3, j in 0u32..3) {
        let q = QuadSettings::default();
        let alpha = MultiIndex::new(vec![i, j]);
        let (f, g) = (Arc::new(f), Arc::new(g));
        let (fc, gc) = (f.clone(), g.clone());
        let sum = FnField::new(2, f.radius().max(g.radius()), move |z| fc.eval(z) + s * gc.eval(z));
        let lhs = moment(&sum, &alpha, &q).unwrap();
        let rhs = moment(&*f, &alpha, &q).unwrap() + s * moment(&*g, &alpha, &q).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn moments_scale_under_dilation(f in field2(), lambda in 0.5..2.0f64, i in 0u32..3, j in 0u32..3) {
        // f(λ·) has α-moment λ^{−N−|α|} times that of f
        let q = QuadSettings::default();
        let alpha = MultiIndex::new(vec![i, j]);
        let f = Arc::new(f);
        let fc = f.clone();
        let dilated = FnField::new(2, f.radius() / lambda, move |z| fc.eval(&[lambda * z[0], lambda * z[1]]));
        let lhs = moment(&dilated, &alpha, &q).unwrap();
        let rhs = lambda.powi(-(2 + alpha.order() as i32)) * moment(&*f, &alpha, &q).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }
}
