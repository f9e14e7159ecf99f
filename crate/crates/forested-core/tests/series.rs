use forested_core::exact::{ExactRational, Ring, Series, UPolynomial};
use forested_core::solver::{f_explicit_4valent, solve, solve_specialized, UMode};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = ExactRational> {
    (-20i64..20, 1i64..9).prop_map(|(n, d)| ExactRational::new(n, d))
}

fn poly() -> impl Strategy<Value = UPolynomial> {
    proptest::collection::vec(rational(), 0..6).prop_map(UPolynomial::from_coeffs)
}

proptest! {
    #[test]
    fn shift_is_invertible(p in poly(), a in rational()) {
        prop_assert_eq!(p.shift(&a).shift(&-a.clone()), p);
    }

    #[test]
    fn shift_moves_the_argument(p in poly(), a in rational(), x in rational()) {
        prop_assert_eq!(p.shift(&a).eval(&x), p.eval(&(&x + &a)));
    }

    #[test]
    fn mu_form_evaluates_at_u_plus_one(p in poly(), u in rational()) {
        let mu = &u + &ExactRational::one();
        prop_assert_eq!(p.to_mu().eval(&mu), p.eval(&u));
    }

    #[test]
    fn series_inverse(cs in proptest::collection::vec(rational(), 6), c0 in 1i64..5) {
        let mut cs = cs;
        cs[0] = ExactRational::from(c0);
        let s = Series::new(cs, 5, &ExactRational::zero());
        let prod = s.times(&s.inverse().unwrap());
        prop_assert_eq!(prod, Series::constant(ExactRational::one(), 5));
    }

    #[test]
    fn identity_composition(cs in proptest::collection::vec(rational(), 6)) {
        let mut cs = cs;
        cs[0] = ExactRational::zero();
        let s = Series::new(cs, 5, &ExactRational::zero());
        let id = [ExactRational::zero(), ExactRational::one()];
        prop_assert_eq!(s.compose_into(&id).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn specializing_u_commutes_with_solving(u in rational(), p in 3usize..5) {
        let sym = solve(p, 7, &UMode::Symbolic).unwrap();
        let fixed = solve_specialized(p, 7, &u).unwrap();
        prop_assert_eq!(sym.f.eval_u(&u), fixed.f);
        prop_assert_eq!(sym.h.eval_u(&u), fixed.h);
        prop_assert_eq!(sym.r.eval_u(&u), fixed.r);
    }

    #[test]
    fn explicit_four_valent_form(u in rational()) {
        let fixed = solve_specialized(4, 9, &u).unwrap();
        prop_assert_eq!(f_explicit_4valent(&u, 9).unwrap(), fixed.f);
    }
}

#[test]
fn u_degrees_are_bounded() {
    // a forest on v vertices has at most v - 1 components
    let out = solve(4, 8, &UMode::Symbolic).unwrap();
    for (n, c) in out.f.coeffs().iter().enumerate().skip(1) {
        if let Some(d) = c.degree() {
            assert!(d < n, "z^{n}: degree {d}");
        }
    }
}

#[test]
fn symbolic_order_guard() {
    assert!(solve(3, 61, &UMode::Symbolic).is_err());
}

#[test]
fn spanning_tree_specialization() {
    let zero = ExactRational::zero();
    let fixed = solve_specialized(4, 5, &zero).unwrap();
    let sym = solve(4, 5, &UMode::Symbolic).unwrap();
    for n in 0..=5 {
        assert_eq!(sym.f.coeffs()[n].eval(&zero), fixed.f.coeffs()[n]);
        assert!(sym.f.coeffs()[n].coeffs().iter().all(|c| !c.is_negative()));
    }
    assert!(!fixed.f.coeffs()[3].is_zero());
}
