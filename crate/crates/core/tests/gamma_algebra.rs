use mbtri_core::gamma_algebra::{
    apply_barnes_first, as_nonpositive_integer, as_positive_integer, barnes_reduce, exact, exact_real, exact_zero,
    feasible_contour, format_exact, int, max_slack_point, multiply, parse_affine, parse_integral, parse_product,
    parse_product_with, parse_rational, poles_in, rat, rational_from_f64, substitute, take_residues, var,
    AffineExponent, AlgebraError, GammaFactor, GammaProduct, MBIntegral, ParseOptions,
};
use proptest::prelude::*;

fn p(s: &str) -> GammaProduct {
    parse_product(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn a(s: &str) -> AffineExponent {
    parse_affine(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn mb(s: &str) -> MBIntegral {
    parse_integral(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

// D[1,1,1] at d = 4
const D111: &str = "Gamma(-z2)^2 * Gamma(-z3)^2 * Gamma(z2 + z3 + 1)^2";

// integrand of f(u,v) for alpha = (0.6, 0.7, 0.8), d = 4, with u and v left symbolic
const F_INTEGRAND: &str = "Gamma(-z2 - 1/2) * Gamma(-z3 - 3/5) * Gamma(z2 + z3 + 6/5) * Gamma(z2 - u - 1/10) \
    * Gamma(z3 - v - 1/10) * Gamma(u + v - z2 - z3 + 1/10) * Gamma(-u) * Gamma(-v) * Gamma(u + v + 21/10) \
    * Gamma(3/5)^-1 * Gamma(7/10)^-1 * Gamma(4/5)^-1 * Gamma(1/10)^-1 * Gamma(-1/10)^-1";

const F_CLOSED: &str = "Gamma(-u) * Gamma(-v) * Gamma(u + v + 21/10) * Gamma(-u - 3/5) * Gamma(-v - 7/10) \
    * Gamma(u + v + 13/10) * Gamma(3/5)^-1 * Gamma(7/10)^-1 * Gamma(4/5)^-1 * Gamma(0)^-1";

#[test]
fn multiply_merges_and_cancels() {
    let g = p("Gamma(-z2)");
    assert_eq!(multiply(&g, &g).to_string(), "Gamma(-z2)^2");
    let q = multiply(&p("Gamma(z3 + 1/2)"), &p("Gamma(z3 + 1/2)^-1"));
    assert_eq!(q.to_string(), "(1)");
    assert!(q.factors().is_empty());
}

#[test]
fn products_print_canonically() {
    let g = p("Gamma(z2 + z3 + 1) * Gamma(-z3) * Gamma(-z2) * Gamma(-z3) * Gamma(-z2) * Gamma(1 + z3 + z2)");
    assert_eq!(g.to_string(), "Gamma(-z2)^2 * Gamma(-z3)^2 * Gamma(z2 + z3 + 1)^2");
    // Gamma at small positive integers folds into the prefactor
    assert_eq!(p("Gamma(1)^4 * Gamma(2)^-1 * Gamma(5)").to_string(), "(24)");
    assert_eq!(p("(3/5) * Gamma(1/2)^-1").to_string(), "(3/5) * Gamma(1/2)^-1");
}

#[test]
fn substitute_examples() {
    // Gamma(-z2), z2 -> alpha1 - d/2 with alpha1 = 0.6, d = 4
    let g = substitute(&p("Gamma(-z2)"), &var("z2"), &a("0.6 - 2"));
    assert_eq!(g, p("Gamma(7/5)"));
    let d = p(D111);
    assert_eq!(substitute(&d, &var("z2"), &a("z2")), d);
    let g = p("Gamma(z2 + z3 + 1/3)").substitute(&var("z2"), &a("u")).substitute(&var("z3"), &a("v - 1/20"));
    assert_eq!(g.to_string(), "Gamma(u + v + 17/60)");
}

#[test]
fn pole_families() {
    let fam = poles_in(&p("Gamma(-z2)"), &var("z2")).unwrap();
    assert_eq!(fam.right_bases(), vec![a("0")]);
    assert!(fam.left.is_empty());

    let fam = poles_in(&p("Gamma(z2 + z3 + 3/7)"), &var("z2")).unwrap();
    assert_eq!(fam.left_bases(), vec![a("-z3 - 3/7")]);

    let fam = poles_in(&p(D111), &var("z2")).unwrap();
    assert_eq!(fam.right_bases(), vec![a("0"), a("0")]);
    assert_eq!(fam.left_bases(), vec![a("-z3 - 1"), a("-z3 - 1")]);

    // denominators carry no poles
    let fam = poles_in(&p("Gamma(z2)^-1"), &var("z2")).unwrap();
    assert!(fam.left.is_empty() && fam.right.is_empty());

    let g = parse_product_with("Gamma(2*z2 + 1)", ParseOptions { allow_general_coefficients: true }).unwrap();
    assert!(matches!(poles_in(&g, &var("z2")), Err(AlgebraError::MixedCoefficient { coefficient: 2, .. })));
}

#[test]
fn general_coefficients_need_the_escape_hatch() {
    assert!(matches!(parse_product("Gamma(2*z2)"), Err(AlgebraError::GeneralCoefficient { .. })));
    assert!(parse_product_with("Gamma(2*z2)", ParseOptions { allow_general_coefficients: true }).is_ok());
}

#[test]
fn feasible_contour_examples() {
    let m = mb(&format!("MB[z2, z3] {D111} * x^(z2) * y^(z3)"));
    let c = feasible_contour(&m).unwrap();
    assert!((c[0] + 1.0 / 3.0).abs() < 1e-12 && (c[1] + 1.0 / 3.0).abs() < 1e-12, "{c:?}");
    // all four inequalities hold strictly
    assert!(-c[0] > 0.0 && -c[1] > 0.0 && c[0] + c[1] + 1.0 > 0.0);
    let m = m.with_contour(c).unwrap();
    assert!(m.contour_valid());

    let b = mb("MB[z] Gamma(z + 1/2)^2 * Gamma(1/2 - z)^2");
    assert_eq!(feasible_contour(&b).unwrap(), vec![0.0]);

    let f = mb(&format!("MB[u, v] {F_CLOSED} * x^(u) * y^(v)"));
    match feasible_contour(&f) {
        Err(AlgebraError::Infeasible { max_slack, active }) => {
            assert!(max_slack.abs() < 1e-12, "{max_slack}");
            for s in ["Gamma(-u - 3/5)", "Gamma(-v - 7/10)", "Gamma(u + v + 13/10)"] {
                assert!(active.iter().any(|x| x == s), "{s} not in {active:?}");
            }
        }
        other => panic!("expected Infeasible, got {other:?}"),
    }
}

#[test]
fn contour_validation() {
    let m = mb("MB[z] Gamma(-z) * Gamma(z + 1)");
    assert!(m.clone().with_contour(vec![-0.5]).is_ok());
    assert!(matches!(m.clone().with_contour(vec![0.5]), Err(AlgebraError::ContourInvalid(_))));
    assert!(matches!(m.clone().with_contour(vec![0.0]), Err(AlgebraError::ContourInvalid(_))));
    assert!(parse_integral("MB[z] Gamma(-z) * Gamma(z + 1) @ z=0.25").is_err());
    let sol = max_slack_point(&m).unwrap();
    assert_eq!(sol.point, vec![-0.5]);
    assert!((sol.slack - 0.5).abs() < 1e-12);
}

#[test]
fn barnes_lemma_at_half() {
    let b = mb("MB[z] Gamma(z + 1/2)^2 * Gamma(1/2 - z)^2 @ z=0");
    let r = apply_barnes_first(&b, &var("z")).unwrap();
    assert_eq!(r.to_string(), "(1)");
}

#[test]
fn barnes_lemma_general_shape() {
    let b = mb("MB[z] Gamma(z + l1) * Gamma(z + l2) * Gamma(l3 - z) * Gamma(l4 - z) * Gamma(w)");
    let r = apply_barnes_first(&b, &var("z")).unwrap();
    let want = p("Gamma(l1 + l3) * Gamma(l1 + l4) * Gamma(l2 + l3) * Gamma(l2 + l4) \
                  * Gamma(l1 + l2 + l3 + l4)^-1 * Gamma(w)");
    assert_eq!(r, want);
}

#[test]
fn barnes_chain_reduces_f_to_closed_form() {
    let m = mb(&format!("MB[z2, z3] {F_INTEGRAND}"));
    let after_z2 = barnes_reduce(&m, &var("z2")).unwrap();
    let z2_part = p("Gamma(z3 + 7/10) * Gamma(-u - 3/5) * Gamma(u + v + 13/10) * Gamma(v - z3) * Gamma(v + 7/10)^-1");
    let spectators = p("Gamma(-z3 - 3/5) * Gamma(z3 - v - 1/10) * Gamma(-u) * Gamma(-v) * Gamma(u + v + 21/10) \
        * Gamma(3/5)^-1 * Gamma(7/10)^-1 * Gamma(4/5)^-1 * Gamma(1/10)^-1 * Gamma(-1/10)^-1");
    assert_eq!(after_z2.integrand(), &z2_part.multiply(&spectators));
    assert_eq!(after_z2.vars(), &[var("z3")]);

    let after_z3 = barnes_reduce(&after_z2, &var("z3")).unwrap();
    assert!(after_z3.vars().is_empty());
    assert_eq!(after_z3.integrand().to_string(), p(F_CLOSED).to_string());
    assert_eq!(after_z3.integrand().power_of(&a("0")), -1);
}

#[test]
fn barnes_pattern_errors() {
    let three = mb("MB[z] Gamma(z + 1/2)^3 * Gamma(1/2 - z)^2");
    assert!(matches!(apply_barnes_first(&three, &var("z")), Err(AlgebraError::PatternMismatch(_))));
    let den = mb("MB[z] Gamma(z + 1/2)^2 * Gamma(1/2 - z)^2 * Gamma(z + 3)^-1");
    assert!(matches!(apply_barnes_first(&den, &var("z")), Err(AlgebraError::PatternMismatch(_))));
    let mono = mb("MB[z] Gamma(z + 1/2)^2 * Gamma(1/2 - z)^2 * x^(z)");
    assert!(matches!(apply_barnes_first(&mono, &var("z")), Err(AlgebraError::PatternMismatch(_))));
    assert!(matches!(apply_barnes_first(&mono, &var("w")), Err(AlgebraError::UnknownVariable(_))));
    // a contour, if present, must be valid: the λ = 1/2 lemma at c = 0.6 cannot be set at all
    assert!(mb("MB[z] Gamma(z + 1/2)^2 * Gamma(1/2 - z)^2").with_contour(vec![0.6]).is_err());
}

#[test]
fn residue_of_gamma_minus_u_at_zero() {
    let m = mb("MB[u] Gamma(-u)");
    let r = take_residues(&m, &[(var("u"), a("0"))]).unwrap();
    assert_eq!(r.to_string(), "MB[] (1)");
    // poles further out carry (-1)^n/n!
    let r = take_residues(&m, &[(var("u"), a("3"))]).unwrap();
    assert_eq!(r.integrand().to_string(), "(-1/6)");
    let r = take_residues(&mb("MB[u] Gamma(u + 1/2) * x^(u)"), &[(var("u"), a("-5/2"))]).unwrap();
    assert_eq!(r.integrand().to_string(), "(1/2)");
    assert_eq!(r.monomials()[0].to_string(), "x^(-5/2)");
}

#[test]
fn star_triangle_residues() {
    // D[alpha] at d = 4 with alpha = (4/3, 4/3, 4/3): Gamma(d - sum) = Gamma(0) in the denominator
    let j = mb("MB[z2, z3] Gamma(-z2) * Gamma(-z3) * Gamma(-z2 - 2/3) * Gamma(-z3 - 2/3) * Gamma(z2 + z3 + 4/3) \
        * Gamma(z2 + z3 + 2) * Gamma(4/3)^-3 * Gamma(0)^-1 * x^(z2) * y^(z3)");
    let r = take_residues(&j, &[(var("z2"), a("-2/3")), (var("z3"), a("-2/3"))]).unwrap();
    assert_eq!(r.integrand().to_string(), "Gamma(2/3)^3 * Gamma(4/3)^-3");
    assert_eq!(r.integrand(), &p("Gamma(2/3)^3 * Gamma(4/3)^-3"));
    let monos: Vec<String> = r.monomials().iter().map(|m| m.to_string()).collect();
    assert_eq!(monos, ["x^(-2/3)", "y^(-2/3)"]);

    // d = 3, alpha = (1, 1, 1)
    let j = mb("MB[z2, z3] Gamma(-z2) * Gamma(-z3) * Gamma(-z2 - 1/2) * Gamma(-z3 - 1/2) * Gamma(z2 + z3 + 1) \
        * Gamma(z2 + z3 + 3/2) * Gamma(0)^-1 * x^(z2) * y^(z3)");
    let r = take_residues(&j, &[(var("z2"), a("-1/2")), (var("z3"), a("-1/2"))]).unwrap();
    assert_eq!(r.integrand(), &p("Gamma(1/2)^3"));
}

#[test]
fn orthogonality_residues() {
    let f = mb(&format!("MB[u, v] {F_CLOSED} * x^(u) * y^(v)"));
    let r = take_residues(&f, &[(var("u"), a("-3/5")), (var("v"), a("-7/10"))]).unwrap();
    assert_eq!(r.to_string(), "MB[] (1) * x^(-3/5) * y^(-7/10)");
}

#[test]
fn residue_errors() {
    let m = mb("MB[u] Gamma(-u)^2");
    assert!(matches!(take_residues(&m, &[(var("u"), a("0"))]), Err(AlgebraError::NotASimplePole(_))));
    let m = mb("MB[u] Gamma(-u) * Gamma(u)");
    assert!(matches!(take_residues(&m, &[(var("u"), a("0"))]), Err(AlgebraError::MultiplePoleCollision(_))));
    let m = mb("MB[u] Gamma(-u)");
    assert!(matches!(take_residues(&m, &[(var("u"), a("1/2"))]), Err(AlgebraError::NotASimplePole(_))));
    assert!(matches!(take_residues(&m, &[(var("w"), a("0"))]), Err(AlgebraError::UnknownVariable(_))));
}

#[test]
fn parse_errors_carry_offsets() {
    match parse_product("Gamma(z2 +) * Gamma(1)") {
        Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 10),
        other => panic!("{other:?}"),
    }
    assert!(parse_product("Gamma(z2").is_err());
    assert!(parse_product("Gamma(z2) $").is_err());
    assert!(parse_integral("MB[z, z] Gamma(z)").is_err());
    assert!(parse_product("x^(z2)").is_err());
}

#[test]
fn integral_round_trip_with_contour() {
    let m = mb(&format!("MB[z2, z3] {D111} * x^(z2) * y^(z3)"));
    let m = m.with_feasible_contour().unwrap();
    let text = m.to_string();
    assert_eq!(parse_integral(&text).unwrap(), m);
    let raw = mb("MBraw[z] Gamma(-z) * Gamma(z + 1) * x^(z)");
    assert!(!raw.normalized());
    assert_eq!(parse_integral(&raw.to_string()).unwrap(), raw);
}

// --- properties ---

fn arb_affine() -> impl Strategy<Value = AffineExponent> {
    (-1i64..=1, -1i64..=1, -1i64..=1, -6i128..=6, 1i128..=4, -2i128..=2).prop_map(|(c2, c3, cu, n, d, im)| {
        let mut s = String::new();
        for (c, v) in [(c2, "z2"), (c3, "z3"), (cu, "u")] {
            match c {
                1 => s.push_str(&format!(" + {v}")),
                -1 => s.push_str(&format!(" - {v}")),
                _ => {}
            }
        }
        s.push_str(&format!(" {} {}/{d}", if n < 0 { '-' } else { '+' }, n.abs()));
        if im != 0 {
            s.push_str(&format!(" {} {}*i", if im < 0 { '-' } else { '+' }, im.abs()));
        }
        parse_affine(&s).unwrap()
    })
}

fn arb_product() -> impl Strategy<Value = GammaProduct> {
    (prop::collection::vec((arb_affine(), -2i32..=2), 0..6), -5i128..=5, 1i128..=5).prop_map(|(fs, n, d)| {
        let pref = mbtri_core::gamma_algebra::exact_real(mbtri_core::gamma_algebra::rat(n, d));
        GammaProduct::new(pref, fs.into_iter().filter(|(_, k)| *k != 0).map(|(arg, k)| GammaFactor::new(arg, k)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn canonicalize_is_idempotent(g in arb_product()) {
        let once = g.canonicalize();
        prop_assert_eq!(once.canonicalize(), once.clone());
        prop_assert_eq!(once, g);
    }

    #[test]
    fn multiply_is_associative_and_commutative(x in arb_product(), y in arb_product(), z in arb_product()) {
        prop_assert_eq!(multiply(&x, &y), multiply(&y, &x));
        prop_assert_eq!(multiply(&multiply(&x, &y), &z), multiply(&x, &multiply(&y, &z)));
    }

    #[test]
    fn product_text_round_trips(g in arb_product()) {
        let text = g.to_string();
        let back = parse_product(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn affine_text_round_trips(e in arb_affine()) {
        prop_assert_eq!(parse_affine(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn inverse_cancels(g in arb_product()) {
        prop_assume!(!g.prefactor().re.numer().eq(&0) || !g.prefactor().im.numer().eq(&0));
        prop_assert_eq!(multiply(&g, &g.inverse()).to_string(), "(1)");
    }
}

#[test]
fn decimals_are_exact() {
    assert_eq!(parse_rational("0.6").unwrap(), rat(3, 5));
    assert_eq!(parse_rational("-1.25e-1").unwrap(), rat(-1, 8));
    assert_eq!(parse_rational("4/3").unwrap(), rat(4, 3));
    assert_eq!(parse_rational("12").unwrap(), int(12));
    assert_eq!(rational_from_f64(0.7).unwrap(), rat(7, 10));
    assert_eq!(rational_from_f64(-0.17).unwrap(), rat(-17, 100));
    assert!(parse_rational("1.2.3").is_err());
    assert!(parse_rational("").is_err());
    assert!(parse_rational("1/0").is_err());
}

#[test]
fn integer_detection() {
    assert_eq!(as_nonpositive_integer(&exact_real(int(-3))), Some(3));
    assert_eq!(as_nonpositive_integer(&exact_zero()), Some(0));
    assert_eq!(as_nonpositive_integer(&exact_real(rat(-1, 2))), None);
    assert_eq!(as_positive_integer(&exact_real(int(4))), Some(4));
    assert_eq!(as_positive_integer(&exact(int(4), int(1))), None);
}

#[test]
fn constant_formatting() {
    assert_eq!(format_exact(&exact(rat(3, 5), rat(-1, 2))), "3/5 - 1/2*i");
    assert_eq!(format_exact(&exact(int(0), int(1))), "i");
    assert_eq!(format_exact(&exact(int(0), int(-2))), "-2*i");
    assert_eq!(format_exact(&exact_zero()), "0");
}
