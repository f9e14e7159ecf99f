use forested_core::dever::{check_de, check_identity, de_residual, parse_de, De, Identity};
use forested_core::exact::{ExactRational, UPolynomial};
use forested_core::solver::{solve, UMode};
use proptest::prelude::*;

#[test]
fn bundled_equations_vanish_with_specialized_u() {
    for de in De::ALL {
        let r = check_de(de, 10, &UMode::Specialized(ExactRational::new(-1, 3))).unwrap();
        assert!(r.is_zero, "{}", r.identity_name);
    }
}

#[test]
fn identities_vanish() {
    for id in Identity::ALL {
        let r = check_identity(id, 12).unwrap();
        assert!(r.is_zero && r.tested_order >= 10, "{}", r.identity_name);
    }
}

#[test]
fn wrong_series_leaves_a_residual() {
    // the H equation applied to F' must not vanish
    let out = solve(4, 10, &UMode::Symbolic).unwrap();
    let r = de_residual(&De::FourValentH.terms(), &out.fprime, &UPolynomial::u(), 0);
    assert!(!r.is_zero());
}

#[test]
fn malformed_definition_is_rejected() {
    assert!(parse_de("[{\"coeff\": 1}]").is_err());
    assert!(parse_de("[{\"coeff\": \"1/0\", \"z_pow\": 0, \"u_pow\": 0, \"derivs\": []}]").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn perturbed_coefficient_is_detected(idx in 0usize..64, delta in 1i64..5) {
        let mut terms = De::FourValentH.terms();
        let i = idx % terms.len();
        terms[i].coeff = &terms[i].coeff + &ExactRational::from(delta);
        let out = solve(4, 10, &UMode::Symbolic).unwrap();
        prop_assert!(!de_residual(&terms, &out.h, &UPolynomial::u(), 0).is_zero());
    }
}
