//! Randomized invariants.

use std::sync::Arc;

use cavity_fem::elements::{build_dofmap, quadrature_rule, DofMap};
use cavity_fem::mesh::mesh_quality;
use cavity_fem::postprocess::{
    compute_eoc, evaluate_at_points, field_norm, l4_difference, point_weights, successive_l4_error, NormKind,
};
use cavity_fem::study::sig6;
use cavity_fem::{build_uniform_square_mesh, refine_uniform, ElementPair, FeFunction};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = ElementPair> {
    prop::sample::select(ElementPair::ALL.to_vec())
}

fn velocity_space(n: usize, pair: ElementPair) -> Arc<DofMap> {
    build_dofmap(&Arc::new(build_uniform_square_mesh(n).unwrap()), pair).0
}

fn field(map: &Arc<DofMap>, c: [f64; 4]) -> FeFunction {
    FeFunction::interpolate(map.clone(), |p| {
        [c[0] * (2.0 * p[0] + c[1]).sin() + p[1] * p[1], c[2] * p[0] * p[1] - c[3] * (p[1] - 0.3).cos()]
    })
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-2.0f64..2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mesh_counts_and_area(n in 1usize..24) {
        let m = build_uniform_square_mesh(n).unwrap();
        prop_assert_eq!(m.n_vertices(), (n + 1) * (n + 1));
        prop_assert_eq!(m.n_triangles(), 2 * n * n);
        prop_assert_eq!(m.boundary_edges().len(), 4 * n);
        prop_assert_eq!(m.edges().len(), 3 * n * n + 2 * n);
        prop_assert!((m.area() - 4.0).abs() < 1e-12);
        prop_assert!((m.h() - 2.0 / n as f64).abs() < 1e-15);
        prop_assert!((0..m.n_triangles()).all(|t| m.triangle_area(t) > 0.0));
        prop_assert!(mesh_quality(&m).unwrap() > 0.0);
    }

    #[test]
    fn refinement_matches_direct_construction(n in 1usize..12) {
        let r = refine_uniform(&build_uniform_square_mesh(n).unwrap()).unwrap();
        let d = build_uniform_square_mesh(2 * n).unwrap();
        prop_assert_eq!(r.vertices(), d.vertices());
        prop_assert_eq!(r.triangles(), d.triangles());
    }

    #[test]
    fn norms_are_homogeneous(pair in pair(), c in coeffs(), alpha in -5.0f64..5.0) {
        let u = field(&velocity_space(3, pair), c);
        let au = u.scaled(alpha);
        for kind in NormKind::ALL {
            let (a, b) = (field_norm(&au, kind), alpha.abs() * field_norm(&u, kind));
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{:?}: {} vs {}", kind, a, b);
        }
    }

    #[test]
    fn norms_satisfy_triangle_inequality(pair in pair(), c in coeffs(), d in coeffs()) {
        let map = velocity_space(3, pair);
        let (u, v) = (field(&map, c), field(&map, d));
        let sum = FeFunction::new(map.clone(), u.coeffs().iter().zip(v.coeffs()).map(|(a, b)| a + b).collect()).unwrap();
        for kind in NormKind::ALL {
            prop_assert!(field_norm(&sum, kind) <= field_norm(&u, kind) + field_norm(&v, kind) + 1e-12);
        }
    }

    #[test]
    fn l4_difference_is_symmetric(pair in pair(), c in coeffs(), d in coeffs()) {
        let map = velocity_space(4, pair);
        let rule = quadrature_rule(8).unwrap();
        let a = evaluate_at_points(&field(&map, c), &rule);
        let b = evaluate_at_points(&field(&map, d), &rule);
        let w = point_weights(map.mesh(), &rule);
        prop_assert_eq!(l4_difference(&a, &b, &w).to_bits(), l4_difference(&b, &a, &w).to_bits());
        prop_assert_eq!(l4_difference(&a, &a, &w), 0.0);
    }

    #[test]
    fn successive_error_of_nested_interpolant(pair in pair(), c in [-1.0f64..1.0, -1.0..1.0, -1.0..1.0]) {
        // a field representable on the coarse mesh has zero successive error
        let coarse = velocity_space(3, pair);
        let fine = velocity_space(6, pair);
        let f = |p: [f64; 2]| [c[0] + c[1] * p[0] - c[2] * p[1], c[2] * p[0] + 0.5];
        let e = successive_l4_error(&FeFunction::interpolate(coarse, f), &FeFunction::interpolate(fine, f)).unwrap();
        prop_assert!(e < 1e-13);
    }

    #[test]
    fn eoc_recovers_power_laws(r in 0.1f64..4.0, scale in 1e-6f64..1e3, levels in 2usize..7) {
        let hs: Vec<f64> = (0..levels).map(|k| 0.25 / f64::powi(2.0, k as i32)).collect();
        let errors: Vec<f64> = hs.iter().map(|h| scale * h.powf(r)).collect();
        let eoc = compute_eoc(&errors, &hs).unwrap();
        prop_assert_eq!(eoc.len(), levels - 1);
        prop_assert!(eoc.iter().all(|e| (e - r).abs() < 1e-9));
    }

    #[test]
    fn eoc_is_scale_invariant(errors in prop::collection::vec(1e-8f64..10.0, 2..6), scale in 1e-3f64..1e3) {
        let hs: Vec<f64> = (0..errors.len()).map(|k| 1.0 / f64::powi(2.0, k as i32)).collect();
        let scaled: Vec<f64> = errors.iter().map(|e| e * scale).collect();
        let (a, b) = (compute_eoc(&errors, &hs).unwrap(), compute_eoc(&scaled, &hs).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn eoc_rejects_nonpositive(mut errors in prop::collection::vec(1e-8f64..10.0, 2..6), at in 0usize..6, bad in -1.0f64..=0.0) {
        let at = at % errors.len();
        errors[at] = bad;
        let hs: Vec<f64> = (0..errors.len()).map(|k| 1.0 / f64::powi(2.0, k as i32)).collect();
        prop_assert!(compute_eoc(&errors, &hs).is_err());
    }

    #[test]
    fn quadrature_integrates_random_polynomials(deg in 0usize..12, c in prop::collection::vec(-1.0f64..1.0, 91)) {
        let rule = quadrature_rule(deg).unwrap();
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        let mut k = 0;
        let (mut q, mut exact) = (0.0, 0.0);
        for a in 0..=deg {
            for b in 0..=deg - a {
                let ck = c[k % c.len()];
                k += 1;
                q += ck * rule.integrate(|x, y| x.powi(a as i32) * y.powi(b as i32));
                exact += ck * fact(a) * fact(b) / fact(a + b + 2);
            }
        }
        prop_assert!((q - exact).abs() < 1e-13);
    }

    #[test]
    fn sig6_round_trips_to_six_digits(x in prop_oneof![1e-9f64..1e-3, 1e-3f64..1e3, 1e3f64..1e9], neg in any::<bool>()) {
        let x = if neg { -x } else { x };
        let s = sig6(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-6 * x.abs(), "{} -> {}", x, s);
        let digits = s.trim_start_matches('-').split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
        prop_assert!(digits <= 6, "{}", s);
    }
}
