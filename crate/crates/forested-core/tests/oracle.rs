use forested_core::oracle::*;
use forested_core::solver::{solve, UMode};
use forested_core::{ExactRational, UPolynomial};
use proptest::prelude::*;
use std::sync::OnceLock;

fn cubic4() -> &'static [CombMap] {
    static MAPS: OnceLock<Vec<CombMap>> = OnceLock::new();
    MAPS.get_or_init(|| enumerate_maps(3, 4).unwrap())
}

fn series_coeff(p: usize, n: usize, h: bool) -> UPolynomial {
    let out = solve(p, 6, &UMode::Symbolic).unwrap();
    if h {
        out.h.coeffs()[n].clone()
    } else {
        out.f.coeffs()[n].clone()
    }
}

#[test]
fn oracle_matches_series_f() {
    for p in [3, 4] {
        for n in [3, 4] {
            let maps = enumerate_maps(p, n).unwrap();
            let want = series_coeff(p, n, false);
            assert_eq!(oracle_sum(&maps, OracleVariant::AllForests).unwrap(), want, "p={p} n={n}");
            assert_eq!(oracle_sum(&maps, OracleVariant::TreeRootedActivity).unwrap(), want, "p={p} n={n}");
        }
    }
}

#[test]
fn oracle_matches_series_h() {
    for p in [3, 4] {
        for n in [3, 4] {
            let maps = enumerate_maps(p, n).unwrap();
            assert_eq!(oracle_sum(&maps, OracleVariant::RootEdgeOutside).unwrap(), series_coeff(p, n, true), "p={p} n={n}");
        }
    }
}

#[test]
fn cubic_four_faces_printed_values() {
    assert_eq!(oracle_f(3, 4, OracleVariant::AllForests).unwrap(), UPolynomial::from_ints(&[140, 234, 144, 32]));
}

#[test]
fn tutte_and_activities_per_map() {
    for (p, n) in [(3, 3), (3, 4), (4, 3), (4, 4)] {
        for m in enumerate_maps(p, n).unwrap() {
            let t = tutte_poly(&m).unwrap();
            assert_eq!(activity_poly(&m).unwrap(), t);
            // T(μ, 1) equals the forest polynomial at u = μ - 1
            assert_eq!(t.at_nu_one(), forest_poly(&m).unwrap().shift(&ExactRational::from(-1)));
        }
    }
}

#[test]
fn every_map_is_valid_and_distinct() {
    let maps = cubic4();
    for m in maps {
        m.validate().unwrap();
        assert_eq!(m.n_faces(), 4);
        assert_eq!(m.canonical(), *m);
    }
    let json = dump_maps(&maps[..2]);
    assert!(json.contains("\"root_dart\": 0"));
}

fn relabel(m: &CombMap, perm: &[usize]) -> CombMap {
    // new label of dart d is perm[d]
    let n = m.n_darts;
    let mut sigma = vec![0; n];
    let mut alpha = vec![0; n];
    for d in 0..n {
        sigma[perm[d]] = perm[m.sigma[d]];
        alpha[perm[d]] = perm[m.alpha[d]];
    }
    CombMap { n_darts: n, sigma, alpha, root_dart: perm[m.root_dart] }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn canonical_form_ignores_labels(idx in 0usize..1000, seed in proptest::collection::vec(0u64..1_000_000, 12)) {
        let maps = cubic4();
        let m = &maps[idx % maps.len()];
        let mut perm: Vec<usize> = (0..m.n_darts).collect();
        let mut keys: Vec<(u64, usize)> = perm.iter().map(|&d| (seed[d % seed.len()].wrapping_mul(d as u64 + 7), d)).collect();
        keys.sort();
        for (i, (_, d)) in keys.into_iter().enumerate() {
            perm[d] = i;
        }
        let r = relabel(m, &perm);
        prop_assert_eq!(r.canonical(), m.clone());
        prop_assert_eq!(forest_poly(&r).unwrap(), forest_poly(m).unwrap());
    }
}
