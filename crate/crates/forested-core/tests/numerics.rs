use forested_core::exact::ExactRational;
use forested_core::numerics::{Numerics, Regime};
use forested_core::real::{Precision, Real};
use proptest::prelude::*;
use std::sync::OnceLock;

fn nm() -> &'static Numerics {
    static NM: OnceLock<Numerics> = OnceLock::new();
    NM.get_or_init(|| Numerics::new(Precision::digits(40)))
}

#[test]
fn closed_form_radii() {
    let nm = nm();
    let b = nm.bits();
    let r = nm.radius(4, &nm.int(-1)).unwrap();
    let want = &Real::from_i64(3, b).sqrt() / &(&Real::pi(b) * 12);
    assert!((&r.rho - &want).abs().to_f64() < 1e-30);
    assert_eq!(nm.radius(3, &nm.int(0)).unwrap().rho, nm.frac(1, 64));
    let r0 = nm.radius(4, &nm.int(0)).unwrap();
    assert_eq!(r0.rho, nm.frac(1, 27));
    assert_eq!(r0.regime, Regime::ZeroU);
}

#[test]
fn affine_below_the_transition() {
    let nm = nm();
    for (n, d) in [(-1, 1), (-1, 3), (0, 1)] {
        let u = nm.frac(n, d);
        let gap = (&nm.radius(4, &u).unwrap().rho - &nm.rho4_affine(&u).unwrap()).abs();
        assert!(gap.to_f64() < 1e-35, "u = {n}/{d}");
    }
    // above it the gap is exponentially small in 1/u
    let u = nm.frac(1, 10);
    let gap = (&nm.radius(4, &u).unwrap().rho - &nm.rho4_affine(&u).unwrap()).abs().to_f64();
    assert!(gap > 0.0 && gap < 1e-14, "{gap}");
}

#[test]
fn radius_out_of_domain() {
    let nm = nm();
    assert!(nm.radius(4, &nm.int(-2)).is_err());
    assert!(nm.radius(5, &nm.int(1)).is_err());
    assert!(nm.asymptotic_constant(3, &nm.frac(-1, 2)).is_err());
}

#[test]
fn log_probe_agrees_with_parametrization() {
    let nm = nm();
    let probe = nm.log_singularity_probe(&ExactRational::new(-1, 3), &[0.5, 0.9, 0.99], 1e-8, 40000).unwrap();
    for r in &probe.rows {
        assert!(r.tail_bound < 1e-8);
        assert!((r.lhs - r.implicit_lhs).abs() < 1e-6 * r.lhs.abs().max(1.0), "{r:?}");
    }
    assert!(probe.rows.windows(2).all(|w| w[1].deviation < w[0].deviation));
}

#[test]
fn cubic_beta_fit_improves_towards_rho() {
    let nm = nm();
    let w = nm.cubic_beta_fit_implicit(&nm.frac(-1, 2), &[(2, 6), (6, 12), (12, 24)], 8).unwrap();
    assert!(w.windows(2).all(|p| p[1].deviation < p[0].deviation), "{w:?}");
    assert!(w[0].beta < 0.0);
}

#[test]
fn coefficient_ratios_at_u_one() {
    let rows = nm().coefficient_asymptotic_check(4, &ExactRational::from(1), &[40, 80, 160]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].deviation < w[0].deviation));
    assert!(rows[2].deviation < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn radius_decreases_in_u(a in -8i64..24, b in -8i64..24, p in 3usize..5) {
        prop_assume!(a != b);
        let (lo, hi) = (a.min(b), a.max(b));
        let nm = nm();
        let r_lo = nm.radius(p, &nm.frac(lo, 8)).unwrap();
        let r_hi = nm.radius(p, &nm.frac(hi, 8)).unwrap();
        prop_assert!(r_hi.rho < r_lo.rho);
        prop_assert!(r_lo.residual.to_f64() < 1e-20);
    }
}
