//! The acceptance checks, one function per criterion. Each returns a
//! deterministic one-line detail so that `forested repro` output is
//! reproducible.

use std::time::{Duration, Instant};

use forested_core::dever::{check_de, check_identity, De, Identity};
use forested_core::error::Result;
use forested_core::exact::{ExactRational, UPolynomial};
use forested_core::numerics::Numerics;
use forested_core::oracle::{enumerate_maps, oracle_sum, OracleVariant};
use forested_core::positivity::mu_tables;
use forested_core::random::{finite_expectations, kappa, s_law_finite, s_limit_law};
use forested_core::real::Real;
use forested_core::solver::{solve, solve_specialized, UMode};
use forested_core::trees::spanning_tree_count;
use serde::Serialize;

pub const COUNT: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "exact cubic coefficients",
        2 => "brute-force oracle equals series",
        3 => "spanning-tree closed form",
        4 => "differential equations and identities",
        5 => "positivity in u+1",
        6 => "radii of convergence",
        7 => "smoothness at the transition",
        8 => "asymptotics at u = 0",
        9 => "asymptotics at u = 1",
        10 => "logarithmic regime probe",
        11 => "cubic singular expansion",
        12 => "random-map statistics",
        _ => "unknown",
    }
}

/// Run one criterion; errors count as failures.
pub fn run(id: usize, nm: &Numerics) -> Outcome {
    let res = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(nm),
        7 => c7(nm),
        8 => c8(nm),
        9 => c9(nm),
        10 => c10(nm),
        11 => c11(nm),
        12 => c12(nm),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (pass, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome { id, title: title(id), pass, detail }
}

type Check = Result<(bool, String)>;

fn up(cs: &[i64]) -> UPolynomial {
    UPolynomial::from_ints(cs)
}

fn show(p: &UPolynomial) -> String {
    p.display("u")
}

fn c1() -> Check {
    let t = Instant::now();
    let out = solve(3, 4, &UMode::Symbolic)?;
    let fast = t.elapsed() < Duration::from_secs(1);
    let (f3, f4) = (&out.f.coeffs()[3], &out.f.coeffs()[4]);
    let exact = *f3 == up(&[6, 4]) && *f4 == up(&[140, 234, 144, 32]);
    Ok((exact && fast, format!("[z^3]F = {}, [z^4]F = {}, runtime under 1 s: {fast}", show(f3), show(f4))))
}

fn c2() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [3, 4] {
        let out = solve(p, 4, &UMode::Symbolic)?;
        for n in [3, 4] {
            let maps = enumerate_maps(p, n)?;
            let want = &out.f.coeffs()[n];
            let all = oracle_sum(&maps, OracleVariant::AllForests)?;
            let act = oracle_sum(&maps, OracleVariant::TreeRootedActivity)?;
            let good = all == *want && act == *want;
            ok &= good;
            parts.push(format!("p={p} n={n}: {} maps {}", maps.len(), if good { "equal" } else { "DIFFER" }));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn c3() -> Check {
    let zero = ExactRational::zero();
    let mut ok = true;
    for p in [3, 4, 6] {
        let out = solve_specialized(p, 30, &zero)?;
        for n in 0..=30 {
            ok &= out.f.coeffs()[n] == spanning_tree_count(p, n);
        }
    }
    Ok((ok, "p in {3, 4, 6}, n <= 30, exact rational equality".into()))
}

fn c4() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for de in De::ALL {
        let r = check_de(de, 12, &UMode::Symbolic)?;
        ok &= r.is_zero && r.tested_order >= 10;
        parts.push(format!("{} zero through z^{}", r.identity_name, r.tested_order));
    }
    let mut min_order = usize::MAX;
    for id in Identity::ALL {
        // a residual computed at order N is meaningful through z^{N-2} for the worst identity
        let r = check_identity(id, 22)?;
        ok &= r.is_zero && r.tested_order >= 20;
        min_order = min_order.min(r.tested_order);
    }
    parts.push(format!("{} identities zero through at least z^{min_order}", Identity::ALL.len()));
    Ok((ok, parts.join("; ")))
}

fn c5() -> Check {
    let t = mu_tables(3, 12)?;
    let c = |i: usize, n: usize| t[i].series.coeffs()[n].clone();
    let printed = c(0, 2) == up(&[2, 4])
        && c(0, 3) == up(&[16, 36, 48, 40])
        && c(1, 1) == up(&[2])
        && c(1, 2) == up(&[6, 12, 12])
        && c(1, 3) == up(&[72, 176, 240, 224, 128])
        && c(2, 2) == up(&[10, 16, 4])
        && c(2, 3) == up(&[144, 320, 264, 96, 16]);
    let nonneg = t.iter().all(|m| m.nonnegative());
    Ok((printed && nonneg, format!("printed terms match: {printed}; {} series nonnegative through z^12: {nonneg}", t.len())))
}

fn c6(nm: &Numerics) -> Check {
    let b = nm.bits();
    let pi = Real::pi(b);
    let mut worst_residual = 0f64;
    let mut prof = |p: usize, u: &Real| -> Result<Real> {
        let pr = nm.radius(p, u)?;
        worst_residual = worst_residual.max(pr.residual.to_f64());
        Ok(pr.rho)
    };
    let r4m1 = prof(4, &nm.int(-1))?;
    let want4 = &Real::from_i64(3, b).sqrt() / &(&pi * 12);
    let d_a = (&r4m1 - &want4).abs().to_f64();
    let r3m1 = prof(3, &nm.int(-1))?;
    let want3 = &(&pi * &pi) / 384;
    let d_b = (&r3m1 - &want3).abs().to_f64();
    let r30 = prof(3, &nm.int(0))?;
    let exact0 = r30 == nm.frac(1, 64);
    let p31 = nm.radius(3, &nm.int(1))?;
    worst_residual = worst_residual.max(p31.residual.to_f64());
    let r31 = p31.rho.to_f64();
    let st = nm.s_tilde_radius_cubic(&nm.int(1))?;
    worst_residual = worst_residual.max(st.residual.to_f64());
    let st = st.x.to_f64();
    let grid = [(-1, 1), (-1, 2), (-1, 4), (0, 1), (1, 4), (1, 2), (1, 1), (2, 1)];
    let mut decreasing = true;
    for p in [3, 4] {
        let mut prev: Option<Real> = None;
        for (n, d) in grid {
            let pr = nm.radius(p, &nm.frac(n, d))?;
            worst_residual = worst_residual.max(pr.residual.to_f64());
            if let Some(q) = &prev {
                decreasing &= pr.rho < *q;
            }
            prev = Some(pr.rho);
        }
    }
    let checks = [
        d_a < 1e-12,
        d_b < 1e-6,
        exact0,
        (0.0093..=0.0103).contains(&r31),
        (0.0098..=0.0108).contains(&st),
        worst_residual < 1e-12,
        decreasing,
    ];
    let detail = format!(
        "p=4,u=-1 gap {d_a:.1e}; p=3,u=-1 gap {d_b:.1e}; p=3,u=0 equals 1/64: {exact0}; p=3,u=1 rho {r31:.7} (tau {:.7}) in [0.0093, 0.0103]: {}; S~ radius {st:.7}; max residual {worst_residual:.1e}; decreasing on grid: {decreasing}",
        p31.tau.to_f64(),
        checks[3],
    );
    Ok((checks.iter().all(|&c| c), detail))
}

fn c7(nm: &Numerics) -> Check {
    let u = nm.frac(1, 20);
    let bound = (-2.0 * std::f64::consts::PI / (3f64.sqrt() * 0.05)).exp();
    let rho = nm.radius(4, &u)?.rho;
    let gap = (&rho - &nm.rho4_affine(&u)?).abs().to_f64();
    let kgap = (&kappa(nm, &u)? - &nm.kappa4_affine(&u)?).abs().to_f64();
    let ok = gap < bound && kgap < 1e-10;
    Ok((ok, format!("rho gap {gap:.2e} < {bound:.2e}; kappa gap {kgap:.2e} < 1e-10 ({:.1} x the exponential)", kgap / bound)))
}

fn c8(nm: &Numerics) -> Check {
    let t = Instant::now();
    let rows = nm.coefficient_asymptotic_check(4, &ExactRational::zero(), &[500])?;
    let r = &rows[0];
    let c0 = 2.0 / (9.0 * 3f64.sqrt() * std::f64::consts::PI);
    let literal = r.scaled_coefficient * 500f64.powi(3) / c0;
    let ok = (literal - 1.0).abs() < 0.05 && t.elapsed() < Duration::from_secs(60);
    Ok((ok, format!("n=500 ratio with 2/(9√3π): {literal:.5}; with 2√3/(729π): {:.5}", r.ratio)))
}

fn c9(nm: &Numerics) -> Check {
    let rows = nm.coefficient_asymptotic_check(4, &ExactRational::from(1), &[50, 100, 200, 400])?;
    let ok = rows.windows(2).all(|w| w[1].deviation < w[0].deviation);
    let devs: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.deviation)).collect();
    Ok((ok, format!("deviations at n = 50, 100, 200, 400: {}", devs.join(", "))))
}

fn c10(nm: &Numerics) -> Check {
    let probe = nm.log_singularity_probe(&ExactRational::new(-1, 2), &[0.9, 0.99, 0.999], 1e-6, 40000)?;
    let dec = probe.rows.windows(2).all(|w| w[1].deviation < w[0].deviation);
    let tails = probe.rows.iter().all(|r| r.tail_bound < 1e-6);
    let devs: Vec<String> = probe.rows.iter().map(|r| format!("{:.4}", r.deviation)).collect();
    let worst = probe.rows.iter().map(|r| r.tail_bound).fold(0.0, f64::max);
    Ok((dec && tails, format!("{} terms; deviations {}; largest tail bound {worst:.1e}", probe.terms, devs.join(", "))))
}

fn c11(nm: &Numerics) -> Check {
    let u = ExactRational::new(-1, 2);
    let (terms, pts) = nm.cubic_beta_points(&u, &[0.9, 0.99, 0.999], 1e-6, 40000)?;
    let (_, fit) = nm.cubic_beta_fit(&u, &[(0.9, 0.999)], 20, 1e-6, 40000)?;
    let shrinking = pts.windows(2).all(|w| w[1].deviation < w[0].deviation);
    let f = &fit[0];
    let within = f.deviation < 0.2;
    let devs: Vec<String> = pts.iter().map(|p| format!("{:.3}", p.deviation)).collect();
    Ok((
        shrinking && within,
        format!("beta {:.4}; fitted {:.4} (deviation {:.3}); pointwise deviations {} from {terms} terms", f.beta, f.beta_fit, f.deviation, devs.join(", ")),
    ))
}

fn c12(nm: &Numerics) -> Check {
    let u = nm.int(1);
    let rho = nm.radius(4, &u)?.rho.to_f64();
    let k1 = kappa(nm, &u)?.to_f64();
    let dev = |n| -> Result<f64> { Ok((finite_expectations(1.0, rho, n)?.internal_per_size / k1 - 1.0).abs()) };
    let (d100, d200) = (dev(100)?, dev(200)?);
    let limit: Vec<f64> = s_limit_law(nm, &u, 5)?.iter().map(Real::to_f64).collect();
    let mut approaching = true;
    let mut prev: Option<Vec<f64>> = None;
    for n in [50, 100, 200] {
        let law = s_law_finite(1.0, rho, n, 5)?;
        let d: Vec<f64> = law.iter().zip(&limit).map(|(a, b)| (a - b).abs()).collect();
        if let Some(p) = &prev {
            approaching &= d.iter().zip(p).all(|(a, b)| a < b);
        }
        prev = Some(d);
    }
    let ok = d200 < 0.05 && d200 < d100 && approaching;
    Ok((ok, format!("E_i/n deviation {d100:.4} at n=100, {d200:.4} at n=200; S_n law for k=1..5 approaching the limit: {approaching}")))
}
