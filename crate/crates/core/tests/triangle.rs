#![allow(clippy::excessive_precision)]

use mbtri_core::gamma_algebra::{
    barnes_reduce, exact_real, parse_integral, rat, take_residues, var, AlgebraError, MBIntegral,
};
use mbtri_core::mb_engine::{evaluate, monomial_values, QuadratureConfig};
use mbtri_core::triangle::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn spec(a: (i128, i128), b: (i128, i128), c: (i128, i128), d: i128) -> TriangleSpec {
    TriangleSpec::new([a, b, c].map(|(n, m)| exact_real(rat(n, m))), rat(d, 1)).unwrap()
}

fn swap_z(m: &MBIntegral) -> MBIntegral {
    let map = [(var("z2"), var("z3")), (var("z3"), var("z2"))].into_iter().collect();
    m.rename(&map)
}

#[test]
fn kernel_is_symmetric_under_index_swap() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut r = || (rng.gen_range(1..13), 10);
        let (a, b, c) = (r(), r(), r());
        let s = spec(a, b, c, 4);
        let t = spec(b, a, c, 4);
        let ds = build_d(&s).unwrap().swap_vars(&var("z2"), &var("z3")).canonicalize();
        assert_eq!(ds, build_d(&t).unwrap().canonicalize());
    }
}

#[test]
fn kernel_matches_hand_written_form() {
    let j = build_j(&spec((1, 1), (1, 1), (1, 1), 4)).unwrap();
    let want =
        parse_integral("MB[z2, z3] Gamma(-z2)^2 * Gamma(-z3)^2 * Gamma(z2 + z3 + 1)^2 * x^(z2) * y^(z3)").unwrap();
    assert_eq!(j.integrand().canonicalize(), want.integrand().canonicalize());
    assert!(j.contour_valid());
    // general d: the last denominator is Gamma(d - sum(nu))
    let d = build_d(&spec((1, 2), (3, 4), (1, 1), 3)).unwrap();
    assert!(d.to_string().contains("Gamma(3/4)^-2"), "{d}");
}

#[test]
fn construction_poles_are_rejected() {
    for s in [spec((1, 1), (1, 1), (2, 1), 4), spec((0, 1), (1, 1), (1, 1), 4), spec((-1, 1), (1, 1), (1, 1), 4)] {
        assert!(matches!(build_d(&s), Err(TriangleError::ConstructionPole(_))), "{s:?}");
        assert!(matches!(build_j(&s), Err(TriangleError::ConstructionPole(_))));
    }
    assert!(TriangleSpec::from_f64([1.0, 1.0, 1.0], 0.0).is_err());
}

#[test]
fn complex_indices_build_and_conjugate() {
    let s = TriangleSpec::from_complex(
        [Complex64::new(1.0, 0.2), Complex64::new(0.9, -0.1), Complex64::new(1.1, 0.0)],
        4.0,
    )
    .unwrap();
    let t = TriangleSpec::from_complex(
        [Complex64::new(1.0, -0.2), Complex64::new(0.9, 0.1), Complex64::new(1.1, 0.0)],
        4.0,
    )
    .unwrap();
    let cfg = QuadratureConfig::default();
    let xy = monomial_values([("x", 0.2), ("y", 0.3)]);
    let a = evaluate(&build_j(&s).unwrap(), &xy, &cfg).unwrap();
    let b = evaluate(&build_j(&t).unwrap(), &xy, &cfg).unwrap();
    assert!(a.converged && b.converged);
    assert!(rel(a.value, b.value.conj()) < 1e-9, "{} vs {}", a.value, b.value);
}

#[test]
fn j111_equals_first_ladder_function() {
    let j = build_j(&spec((1, 1), (1, 1), (1, 1), 4)).unwrap();
    let cfg = QuadratureConfig::default();
    for (x, y) in [(0.2, 0.3), (0.01, 0.6), (0.1, 0.15)] {
        let r = evaluate(&j, &monomial_values([("x", x), ("y", y)]), &cfg).unwrap();
        let phi = ud_phi(&UdPoint::new(1, x, y).unwrap()).unwrap();
        assert!(rel(r.value, Complex64::new(phi, 0.0)) < 1e-9, "({x},{y}): {} vs {phi}", r.value);
    }
}

// 30-digit evaluations of the ladder formula
const PHI_TABLE: &[(u32, f64, f64, f64)] = &[
    (1, 0.2, 0.3, 5.5935032974565928462),
    (2, 0.1, 0.15, 38.79014111808467576),
    (3, 0.1, 0.15, 151.57233332604000983),
    (4, 0.05, 0.2, 661.55320737190656684),
    (2, 0.3, 0.1, 28.642938132076460982),
    (1, 0.01, 0.6, 8.1438782625727693944),
];

#[test]
fn ladder_functions_match_reference_values() {
    for &(n, x, y, want) in PHI_TABLE {
        let got = ud_phi(&UdPoint::new(n, x, y).unwrap()).unwrap();
        assert!(((got - want) / want).abs() < 1e-11, "n={n} ({x},{y}): {got} vs {want}");
    }
}

#[test]
fn ladder_functions_are_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut done = 0;
    while done < 50 {
        let (x, y) = (rng.gen_range(0.001..0.9), rng.gen_range(0.001..0.9));
        let (Ok(p), Ok(q)) = (UdPoint::new(1, x, y), UdPoint::new(1, y, x)) else { continue };
        for n in [1, 2] {
            let a = ud_phi(&UdPoint { n, ..p }).unwrap();
            let b = ud_phi(&UdPoint { n, ..q }).unwrap();
            assert!(((a - b) / a).abs() < 1e-12, "n={n} ({x},{y}): {a} vs {b}");
        }
        done += 1;
    }
}

#[test]
fn ladder_domain_errors() {
    let e = UdPoint::new(2, 0.4, 0.4).unwrap_err();
    assert!(matches!(&e, TriangleError::Domain(m) if m.contains("Lambda^2 <= 0")), "{e}");
    assert!(matches!(UdPoint::new(1, 2.0, 0.01), Err(TriangleError::Domain(_))));
    assert!(matches!(UdPoint::new(0, 0.1, 0.1), Err(TriangleError::Domain(_))));
    assert!(matches!(UdPoint::new(5, 0.1, 0.1), Err(TriangleError::Domain(_))));
    assert!(matches!(UdPoint::new(1, -0.1, 0.1), Err(TriangleError::Domain(_))));
    assert!(ud_phi(&UdPoint::new(2, 0.1, 0.15).unwrap()).unwrap().is_finite());
}

#[test]
fn star_triangle_by_residues() {
    let cases = [
        spec((3, 5), (7, 10), (27, 10), 4),
        spec((4, 3), (4, 3), (4, 3), 4),
        spec((1, 2), (3, 4), (7, 4), 3),
        spec((11, 10), (9, 5), (21, 10), 5),
    ];
    for a in cases {
        let j = build_j_symbolic(&a);
        let got = take_residues(&j, &star_triangle_residue_points(&a)).unwrap();
        assert_eq!(got, star_triangle_rhs(&a), "{a:?}");
    }
}

#[test]
fn weight_has_expected_value() {
    let a = spec((3, 5), (7, 10), (4, 5), 4);
    let w = build_weight(&a);
    let (z2, z3) = (Complex64::new(-0.3, 0.2), Complex64::new(-0.4, 0.0));
    let got = w.eval(&|v| Some(if v.name() == "z2" { z2 } else { z3 })).unwrap();
    let g = |z: Complex64| mbtri_core::special_functions::gamma(z).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let want = g(2.1 * one - z2 - z3 - 2.0) * g(2.0 + z2) * g(2.0 + z3) / (g(1.9 * one + z2 + z3) * g(-z2) * g(-z3));
    assert!(rel(got, want) < 1e-13);
}

#[test]
fn regularized_f_reduces_to_closed_form() {
    let a = spec((3, 5), (7, 10), (4, 5), 4);
    let (u, v) = (Complex64::new(-0.7, 0.1), Complex64::new(-0.8, -0.05));
    for eps in [0.3, 0.25] {
        let m = build_f_integral_regularized(&a, u, v, eps).unwrap();
        let r = barnes_reduce(&barnes_reduce(&m, &var("z2")).unwrap(), &var("z3")).unwrap();
        let ua =
            mbtri_core::gamma_algebra::AffineExponent::constant(mbtri_core::gamma_algebra::exact_from_c64(u).unwrap());
        let va =
            mbtri_core::gamma_algebra::AffineExponent::constant(mbtri_core::gamma_algebra::exact_from_c64(v).unwrap());
        let want = f_closed_product(&a, &ua, &va, mbtri_core::gamma_algebra::rational_from_f64(eps).unwrap());
        assert_eq!(r.integrand().canonicalize(), want.canonicalize());
    }
}

#[test]
fn regularized_f_numeric_matches_closed_form() {
    let a = spec((3, 5), (7, 10), (4, 5), 4);
    let (u, v) = (Complex64::new(-0.7, 0.1), Complex64::new(-0.8, -0.05));
    let closed = f_closed(&a, u, v, 0.3).unwrap();
    // 30-digit reference
    let want = Complex64::new(155.976600136733236367587437221, -22.9627632017788889949993723856);
    assert!(rel(closed, want) < 1e-12, "{closed}");
    let m = build_f_integral_regularized(&a, u, v, 0.3).unwrap();
    let r = evaluate(&m, &monomial_values([]), &QuadratureConfig::default()).unwrap();
    assert!(r.converged, "{r:?}");
    assert!(rel(r.value, want) < 1e-8, "{} vs {want}", r.value);
}

#[test]
fn unregularized_f_has_no_contour() {
    let a = spec((3, 5), (7, 10), (4, 5), 4);
    let (u, v) = (Complex64::new(-0.7, 0.1), Complex64::new(-0.8, -0.05));
    let m = build_f_integral(&a, u, v).unwrap();
    assert!(matches!(m.with_feasible_contour(), Err(AlgebraError::Infeasible { .. })));
    // Re u > -alpha1 leaves no room between the z2 constraints even with eps
    let e = build_f_integral_regularized(&a, Complex64::new(-0.2, 0.4), Complex64::new(-0.3, -0.1), 0.1).unwrap_err();
    assert!(matches!(e, TriangleError::Algebra(AlgebraError::Infeasible { .. })), "{e}");
}

#[test]
fn f_closed_errors() {
    let a = spec((3, 5), (7, 10), (4, 5), 4);
    let (u, v) = (Complex64::new(-0.7, 0.1), Complex64::new(-0.8, -0.05));
    assert!(matches!(f_closed(&a, u, v, 0.0), Err(TriangleError::Domain(_))));
    assert!(matches!(f_closed(&a, Complex64::new(0.0, 0.0), v, 0.1), Err(TriangleError::Special(_))));
}

#[test]
fn orthogonality_by_residues() {
    for a in [spec((3, 5), (7, 10), (4, 5), 4), spec((1, 3), (1, 2), (1, 1), 3)] {
        let got = take_residues(&orthogonality_integral(&a), &orthogonality_residue_points(&a)).unwrap();
        assert_eq!(got, orthogonality_rhs(&a));
    }
}

#[test]
fn loop_reduction_constraint() {
    let e = R1Eps::new([0.1, 0.07, -0.1].map(|x| Complex64::new(x, 0.0))).unwrap_err();
    assert!(matches!(e, TriangleError::ConstraintViolated(_)));
    assert!(R1Eps::new([0.1, -0.1, 0.0].map(|x| Complex64::new(x, 0.0))).is_err());
}

#[test]
fn loop_reduction_bracket_and_lhs() {
    let eps = R1Eps::new([0.1, 0.07, -0.17].map(|x| Complex64::new(x, 0.0))).unwrap();
    let (u, v) = (Complex64::new(-0.3, 0.0), Complex64::new(-0.4, 0.0));
    let b = r1_bracket(&eps, u, v).unwrap();
    // 30-digit reference
    assert!(rel(b, Complex64::new(1347.56772282182982757495462151, 0.0)) < 1e-11, "{b}");
    assert_eq!(r1_bracket_terms(&eps, u, v).unwrap().len(), 3);

    let lhs = build_r1_lhs(&eps, u, v).unwrap();
    assert!(lhs.contour_valid());
    let want = parse_integral(
        "MB[z2, z3] Gamma(z2 + 4/10) * Gamma(z3 + 47/100) * Gamma(3/10 - z2 - z3) * Gamma(-z2) * Gamma(-z3) \
         * Gamma(7/100 - z2) * Gamma(1/10 - z3) * Gamma(z2 + z3 + 83/100) * Gamma(11/10 - z3)^-1 * Gamma(107/100 - z2)^-1 \
         * Gamma(3/10) * Gamma(4/10) * Gamma(13/100) * Gamma(83/100)^-2 * Gamma(11/10)^-1 * Gamma(107/100)^-1",
    )
    .unwrap();
    assert_eq!(lhs.integrand().canonicalize(), want.integrand().canonicalize());

    // eps1 <-> eps2 with u <-> v is the same integral up to z2 <-> z3
    let sw = R1Eps::new([0.07, 0.1, -0.17].map(|x| Complex64::new(x, 0.0))).unwrap();
    let other = build_r1_lhs(&sw, v, u).unwrap();
    assert_eq!(swap_z(&other).integrand().canonicalize(), lhs.integrand().canonicalize());

    let r = evaluate(&lhs, &monomial_values([]), &QuadratureConfig::default()).unwrap();
    assert!(r.converged && r.value.re.is_finite());
}
