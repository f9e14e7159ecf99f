use forested_core::exact::ExactRational;
use forested_core::numerics::Numerics;
use forested_core::random::{finite_expectations, kappa, log_derivative_dual, log_derivative_fzu, s_law_finite, s_limit_law};
use forested_core::real::Precision;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dual_and_mixed_derivative_routes_agree(n in 3usize..25, num in 1i64..12, den in 1i64..6) {
        let u = ExactRational::new(num, den);
        let one = ExactRational::from(1);
        prop_assert_eq!(log_derivative_dual(&u, &one, n).unwrap(), log_derivative_fzu(&u, &one, n).unwrap());
    }
}

#[test]
fn routes_agree_at_size_one_hundred() {
    let u = ExactRational::new(1, 2);
    let c = ExactRational::new(1, 30);
    assert_eq!(log_derivative_dual(&u, &c, 100).unwrap(), log_derivative_fzu(&u, &c, 100).unwrap());
}

#[test]
fn expectations_are_consistent() {
    let nm = Numerics::new(Precision::default());
    let u = nm.int(2);
    let rho = nm.radius(4, &u).unwrap().rho.to_f64();
    let e = finite_expectations(2.0, rho, 150).unwrap();
    // E_i(I_n) = (1+u)/u (E_c(C_n) - 1)
    assert!((e.internal_active - 1.5 * e.components_minus_one).abs() < 1e-9 * e.internal_active);
    let k = kappa(&nm, &u).unwrap().to_f64();
    assert!((e.internal_per_size / k - 1.0).abs() < 0.02);
}

#[test]
fn finite_law_is_a_subprobability() {
    let nm = Numerics::new(Precision::default());
    let u = nm.int(1);
    let rho = nm.radius(4, &u).unwrap().rho.to_f64();
    let law = s_law_finite(1.0, rho, 60, 58).unwrap();
    let total: f64 = law.iter().sum();
    assert!(law.iter().all(|&p| p >= 0.0));
    assert!(total <= 1.0 + 1e-12 && total > 0.99, "{total}");
    let limit = s_limit_law(&nm, &u, 1).unwrap()[0].to_f64();
    assert!((law[0] - limit).abs() < 0.05);
}
