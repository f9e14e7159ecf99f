use forested_core::dever::{check_de, check_identity, De, Identity, ResidualReport};
use forested_core::exact::{ExactRational, Ring, UPolynomial};
use forested_core::numerics::Numerics;
use forested_core::oracle::{dump_maps, enumerate_maps_with_limit, oracle_sum, OracleVariant, DEFAULT_SCALE_LIMIT};
use forested_core::positivity::mu_tables;
use forested_core::random::{finite_expectations, model_stats, s_law_finite};
use forested_core::real::{Precision, Real};
use forested_core::solver::{solve, UMode, MAX_SYMBOLIC_ORDER};
use serde_json::{json, Value};

use crate::args::*;
use crate::{bad, Artifact, Failure};
use forested_repro as repro;

type Out = Result<Artifact, Failure>;

pub fn dispatch(cli: &Cli) -> Out {
    let prec = Precision::digits(cli.precision);
    let ctx = Ctx { nm: Numerics::new(prec), digits: cli.precision as usize };
    let (name, cfg) = match &cli.command {
        Command::Coeffs(a) => ("coeffs", to_value(a)),
        Command::Oracle(a) => ("oracle", to_value(a)),
        Command::Verify(a) => ("verify", to_value(a)),
        Command::Radius(a) => ("radius", to_value(a)),
        Command::Asymptotics(a) => ("asymptotics", to_value(a)),
        Command::Random(a) => ("random", to_value(a)),
        Command::MuExpand(a) => ("mu-expand", to_value(a)),
        Command::Repro(a) => ("repro", to_value(a)),
    };
    let mut art = match &cli.command {
        Command::Coeffs(a) => coeffs(a),
        Command::Oracle(a) => oracle(a),
        Command::Verify(a) => verify(a),
        Command::Radius(a) => radius(&ctx, a),
        Command::Asymptotics(a) => asymptotics(&ctx, a),
        Command::Random(a) => random(&ctx, a),
        Command::MuExpand(a) => mu_expand(a),
        Command::Repro(a) => repro_cmd(&ctx, a),
    }?;
    art.config = json!({ "command": name, "precision_digits": cli.precision, "args": cfg });
    Ok(art)
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

pub struct Ctx {
    pub nm: Numerics,
    pub digits: usize,
}

impl Ctx {
    fn show(&self, r: &Real) -> String {
        plain_decimal(&r.to_string_digits(self.digits.saturating_sub(5).max(10)))
    }
}

fn artifact(quantity: &'static str, data: Value, header: &[&str], rows: Vec<Vec<String>>, ok: bool) -> Artifact {
    Artifact { quantity, config: Value::Null, data, header: header.iter().map(|s| s.to_string()).collect(), rows, ok }
}

/// `4.59e-2` → `0.0459`; exponents beyond ±30 are left as they are.
pub fn plain_decimal(s: &str) -> String {
    let Some((mant, exp)) = s.split_once(['e', 'E']) else { return s.to_string() };
    let Ok(e) = exp.parse::<i32>() else { return s.to_string() };
    if e.abs() > 30 {
        return s.to_string();
    }
    let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int}{frac}");
    let point = int.len() as i32 + e;
    let body = if point <= 0 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    let body = body.trim_start_matches('0');
    let body = if body.starts_with('.') || body.is_empty() { format!("0{body}") } else { body.to_string() };
    format!("{sign}{body}")
}

fn rational_strings(p: &UPolynomial) -> Vec<String> {
    p.coeffs().iter().map(ExactRational::to_string).collect()
}

fn check_p(p: usize, allowed: &[usize]) -> Result<(), Failure> {
    if allowed.contains(&p) {
        Ok(())
    } else {
        Err(bad(format!("--p {p} is not supported here; use one of {allowed:?}")))
    }
}

fn u_mode(u: &USpec, order: usize) -> Result<UMode, Failure> {
    match u {
        USpec::Symbolic if order > MAX_SYMBOLIC_ORDER => Err(bad(format!(
            "--order {order} with symbolic u exceeds {MAX_SYMBOLIC_ORDER}; pass --u <rational> to specialize"
        ))),
        USpec::Symbolic => Ok(UMode::Symbolic),
        USpec::Value(r) => Ok(UMode::Specialized(r.clone())),
    }
}

fn coeffs(a: &CoeffsArgs) -> Out {
    if a.p < 3 {
        return Err(bad("--p must be at least 3"));
    }
    let mode = u_mode(&a.u, a.order)?;
    if a.series.contains(&SeriesName::G) && a.p != 3 {
        return Err(bad("series g exists for p = 3 only"));
    }
    let out = solve(a.p, a.order, &mode)?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for name in &a.series {
        let s = match name {
            SeriesName::F => &out.f,
            SeriesName::Fprime => &out.fprime,
            SeriesName::G => out.g.as_ref().expect("g is built for p = 3"),
            SeriesName::H => &out.h,
            SeriesName::R => &out.r,
            SeriesName::S => &out.s,
            SeriesName::STilde => &out.s_tilde,
        };
        let label = to_value(name);
        for (n, c) in s.coeffs().iter().enumerate().take(a.order + 1) {
            if c.is_zero() {
                continue;
            }
            let shown = c.display("u");
            rows.push(vec![label.as_str().unwrap_or("").to_string(), n.to_string(), shown.clone(), rational_strings(c).join(";")]);
            records.push(json!({ "series": label, "n": n, "coefficient": shown, "u_coefficients": rational_strings(c) }));
        }
    }
    Ok(artifact("series_coefficients", json!({ "records": records }), &["series", "n", "coefficient", "u_coefficients"], rows, true))
}

fn oracle(a: &OracleArgs) -> Out {
    check_p(a.p, &[3, 4, 5, 6])?;
    let variant = match a.variant {
        VariantArg::AllForests => OracleVariant::AllForests,
        VariantArg::TreeRootedActivity => OracleVariant::TreeRootedActivity,
        VariantArg::RootEdgeOutside => OracleVariant::RootEdgeOutside,
    };
    let maps = enumerate_maps_with_limit(a.p, a.n, a.limit.unwrap_or(DEFAULT_SCALE_LIMIT))?;
    if let Some(path) = &a.dump {
        std::fs::write(path, dump_maps(&maps))?;
    }
    let got = oracle_sum(&maps, variant)?;
    let out = solve(a.p, a.n, &UMode::Symbolic)?;
    // the root-edge variant counts maps whose root edge is not in the forest
    let target = if variant == OracleVariant::RootEdgeOutside { &out.h } else { &out.f };
    let want = target.coeffs().get(a.n).cloned().unwrap_or_else(UPolynomial::zero);
    let ok = got == want;
    let data = json!({
        "maps": maps.len(),
        "oracle": got.display("u"),
        "oracle_u_coefficients": rational_strings(&got),
        "series": want.display("u"),
        "series_u_coefficients": rational_strings(&want),
        "equal": ok,
    });
    let rows = vec![vec![a.p.to_string(), a.n.to_string(), maps.len().to_string(), got.display("u"), want.display("u"), ok.to_string()]];
    Ok(artifact("oracle_comparison", data, &["p", "n", "maps", "oracle", "series", "equal"], rows, ok))
}

fn report_json(kind: &str, r: &ResidualReport) -> Value {
    json!({
        "check": r.identity_name,
        "kind": kind,
        "tested_order": r.tested_order,
        "zero_residual": r.is_zero,
        "first_nonzero": r.first_nonzero(),
    })
}

pub fn parse_identity(name: &str) -> Result<Identity, Failure> {
    Identity::ALL
        .into_iter()
        .find(|i| i.name() == name)
        .ok_or_else(|| bad(format!("unknown identity {name:?}; known: {:?}", Identity::ALL.map(Identity::name))))
}

pub fn parse_de(name: &str) -> Result<De, Failure> {
    De::ALL
        .into_iter()
        .find(|d| d.name() == name)
        .ok_or_else(|| bad(format!("unknown differential equation {name:?}; known: {:?}", De::ALL.map(De::name))))
}

fn verify(a: &VerifyArgs) -> Out {
    let mut ids: Vec<Identity> = a.identity.iter().map(|n| parse_identity(n)).collect::<Result<_, _>>()?;
    let mut des: Vec<De> = a.de.iter().map(|n| parse_de(n)).collect::<Result<_, _>>()?;
    if a.all || a.identities {
        ids = Identity::ALL.to_vec();
    }
    if a.all || a.des {
        des = De::ALL.to_vec();
    }
    if ids.is_empty() && des.is_empty() {
        return Err(bad("nothing to verify; pass --all, --identities, --des, --identity <name> or --de <name>"));
    }
    if a.order < 2 {
        return Err(bad("--order must be at least 2"));
    }
    let mode = u_mode(&a.u, a.order)?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for id in ids {
        let r = check_identity(id, a.order)?;
        ok &= r.is_zero;
        rows.push(vec![r.identity_name.clone(), "identity".into(), r.tested_order.to_string(), r.is_zero.to_string()]);
        records.push(report_json("identity", &r));
    }
    for de in des {
        let r = check_de(de, a.order, &mode)?;
        ok &= r.is_zero;
        rows.push(vec![r.identity_name.clone(), "de".into(), r.tested_order.to_string(), r.is_zero.to_string()]);
        records.push(report_json("de", &r));
    }
    Ok(artifact("residual_checks", json!({ "checks": records, "all_zero": ok }), &["check", "kind", "tested_order", "zero_residual"], rows, ok))
}

fn radius(ctx: &Ctx, a: &RadiusArgs) -> Out {
    check_p(a.p, &[3, 4])?;
    let nm = &ctx.nm;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut rhos: Vec<(ExactRational, Real)> = Vec::new();
    for u in &a.u {
        let ur = nm.real(u);
        let prof = nm.radius(a.p, &ur)?;
        let mut rec = json!({
            "u": u.to_string(),
            "rho": ctx.show(&prof.rho),
            "rho_f64": prof.rho.to_f64(),
            "tau": ctx.show(&prof.tau),
            "sigma": ctx.show(&prof.sigma),
            "regime": format!("{:?}", prof.regime),
            "c_u": prof.c_u.as_ref().map(|c| ctx.show(c)),
            "subexponential_law": prof.subexp_class.map(|c| c.label()),
            "error_bound": prof.residual.to_f64(),
        });
        if a.p == 4 {
            // the affine continuation and its exponentially small gap for small u > 0
            let aff = nm.rho4_affine(&ur)?;
            rec["affine_rho"] = json!(ctx.show(&aff));
            rec["affine_gap"] = json!((&prof.rho - &aff).abs().to_f64());
            if ur.is_positive() {
                let bound = (-2.0 * std::f64::consts::PI / (3f64.sqrt() * u.to_f64())).exp();
                rec["exp_bound"] = json!(bound);
            }
        }
        if a.s_tilde {
            if a.p != 3 {
                return Err(bad("--s-tilde applies to p = 3"));
            }
            // only defined for u > 0
            if ur.is_positive() {
                let r = nm.s_tilde_radius_cubic(&ur)?;
                rec["s_tilde_radius"] = json!(ctx.show(&r.x));
                rec["s_tilde_error_bound"] = json!(r.residual.to_f64());
            } else {
                rec["s_tilde_radius"] = Value::Null;
            }
        }
        rows.push(vec![u.to_string(), ctx.show(&prof.rho), ctx.show(&prof.tau), format!("{:?}", prof.regime), format!("{:e}", prof.residual.to_f64())]);
        records.push(rec);
        rhos.push((u.clone(), prof.rho));
    }
    rhos.sort_by(|x, y| x.0 .0.cmp(&y.0 .0));
    let decreasing = rhos.windows(2).all(|w| w[0].0 == w[1].0 || w[1].1 < w[0].1);
    Ok(artifact(
        "radius_of_convergence",
        json!({ "p": a.p, "points": records, "strictly_decreasing_in_u": decreasing }),
        &["u", "rho", "tau", "regime", "error_bound"],
        rows,
        true,
    ))
}

fn asymptotics(ctx: &Ctx, a: &AsymptoticsArgs) -> Out {
    check_p(a.p, &[3, 4])?;
    let nm = &ctx.nm;
    if a.z.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
        return Err(bad("--z values must lie in (0, 1)"));
    }
    if a.log_probe {
        if a.p != 4 || !a.u.is_negative() {
            return Err(bad("--log-probe needs --p 4 and -1 <= u < 0"));
        }
        let probe = nm.log_singularity_probe(&a.u, &a.z, a.tol, a.max_terms)?;
        let rows = probe
            .rows
            .iter()
            .map(|r| vec![r.z_frac.to_string(), format!("{:.10e}", r.lhs), format!("{:.10e}", r.rhs), format!("{:.6}", r.deviation), format!("{:.3e}", r.tail_bound)])
            .collect();
        let decreasing = probe.rows.windows(2).all(|w| w[1].deviation < w[0].deviation);
        let tails = probe.rows.iter().all(|r| r.tail_bound < a.tol);
        let data = json!({ "probe": probe, "deviation_strictly_decreasing": decreasing, "tail_bounds_below_tol": tails });
        return Ok(artifact("log_singularity_probe", data, &["z_over_rho", "lhs", "rhs", "deviation", "tail_bound"], rows, true));
    }
    if a.beta {
        if a.p != 3 || !a.u.is_negative() {
            return Err(bad("--beta needs --p 3 and -1 < u < 0"));
        }
        let (terms, pts) = nm.cubic_beta_points(&a.u, &a.z, a.tol, a.max_terms)?;
        let lo = a.z.iter().cloned().fold(1.0, f64::min);
        let hi = a.z.iter().cloned().fold(0.0, f64::max);
        let (_, fit) = nm.cubic_beta_fit(&a.u, &[(lo, hi)], 20, a.tol, a.max_terms)?;
        let ur = nm.real(&a.u);
        let deep = nm.cubic_beta_fit_implicit(&ur, &[(2, 6), (6, 12), (12, 24), (24, 40)], 10)?;
        let rows = pts
            .iter()
            .map(|p| vec![p.z_frac.to_string(), format!("{:.8}", p.value), format!("{:.8}", p.beta), format!("{:.6}", p.deviation), format!("{:.3e}", p.tail_bound)])
            .collect();
        let data = json!({
            "beta": ctx.show(&nm.cubic_beta(&ur)?),
            "alpha": ctx.show(&nm.cubic_alpha(&ur)?),
            "series_terms": terms,
            "points": pts,
            "series_fit": fit,
            "parametrization_fit": deep,
        });
        return Ok(artifact("cubic_beta_probe", data, &["z_over_rho", "q_value", "beta", "deviation", "tail_bound"], rows, true));
    }
    if a.n.iter().any(|&n| n < 2) {
        return Err(bad("--n values must be at least 2"));
    }
    let table = nm.coefficient_asymptotic_check(a.p, &a.u, &a.n)?;
    let ur = nm.real(&a.u);
    let c = nm.asymptotic_constant(a.p, &ur)?;
    // for p = 4, u = 0 also the ratio against 2/(9√3π), which lacks a factor ρ₀
    let printed = (a.p == 4 && a.u.is_zero()).then(|| 2.0 / (9.0 * 3f64.sqrt() * std::f64::consts::PI));
    let records: Vec<Value> = table
        .iter()
        .map(|r| {
            let mut v = to_value(r);
            if let Some(c0) = printed {
                v["ratio_uncorrected_constant"] = json!(r.scaled_coefficient * (r.n as f64).powi(3) / c0);
            }
            v
        })
        .collect();
    let rows = table.iter().map(|r| vec![r.n.to_string(), format!("{:.10e}", r.scaled_coefficient), format!("{:.8}", r.ratio), format!("{:.6}", r.deviation)]).collect();
    let decreasing = table.windows(2).all(|w| w[1].deviation < w[0].deviation);
    let data = json!({ "constant": ctx.show(&c), "rows": records, "deviation_strictly_decreasing": decreasing });
    Ok(artifact("coefficient_asymptotics", data, &["n", "scaled_coefficient", "ratio", "deviation"], rows, true))
}

fn random(ctx: &Ctx, a: &RandomArgs) -> Out {
    let nm = &ctx.nm;
    let ur = nm.real(&a.u);
    if ur < -nm.int(1) {
        return Err(bad("--u must be at least -1"));
    }
    if a.k_max == 0 || a.n.iter().any(|&n| n < 2) {
        return Err(bad("--k-max must be positive and --n values at least 2"));
    }
    let stats = model_stats(nm, &ur, a.k_max)?;
    let rho = nm.radius(4, &ur)?.rho.to_f64();
    let uf = a.u.to_f64();
    let mut finite = Vec::new();
    let mut rows = Vec::new();
    for &n in &a.n {
        let e = finite_expectations(uf, rho, n)?;
        let law = if ur.is_positive() { s_law_finite(uf, rho, n, a.k_max)? } else { Vec::new() };
        rows.push(vec![
            n.to_string(),
            format!("{:.10}", e.internal_per_size),
            format!("{:.6}", (e.internal_per_size / stats.kappa - 1.0).abs()),
            law.iter().map(|p| format!("{p:.8}")).collect::<Vec<_>>().join(";"),
        ]);
        finite.push(json!({ "expectations": e, "s_law": law }));
    }
    let mut data = json!({ "limits": stats, "finite": finite });
    if ur.is_positive() {
        data["kappa_affine"] = json!(nm.kappa4_affine(&ur)?.to_f64());
        data["kappa_gap"] = json!((&nm.kappa4_affine(&ur)? - &forested_core::random::kappa(nm, &ur)?).abs().to_f64());
    }
    rows.push(vec!["limit".into(), format!("{:.10}", stats.kappa), "0".into(), stats.s_law.iter().map(|p| format!("{p:.8}")).collect::<Vec<_>>().join(";")]);
    Ok(artifact("random_map_statistics", data, &["n", "internal_active_per_size", "deviation_from_kappa", "s_law"], rows, true))
}

fn mu_expand(a: &MuExpandArgs) -> Out {
    check_p(a.p, &[3, 4])?;
    u_mode(&USpec::Symbolic, a.order)?;
    let tables = mu_tables(a.p, a.order)?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for t in &tables {
        ok &= t.nonnegative();
        for r in t.rows() {
            rows.push(vec![r.series.to_string(), r.n.to_string(), r.mu_poly.clone(), r.nonnegative.to_string()]);
            records.push(to_value(&r));
        }
    }
    Ok(artifact("mu_expansions", json!({ "rows": records, "all_nonnegative": ok }), &["series", "n", "mu_polynomial", "nonnegative"], rows, ok))
}

fn repro_cmd(ctx: &Ctx, a: &ReproArgs) -> Out {
    let ids: Vec<usize> = if a.only.is_empty() { (1..=repro::COUNT).collect() } else { a.only.clone() };
    if let Some(bad_id) = ids.iter().find(|&&i| i == 0 || i > repro::COUNT) {
        return Err(bad(format!("criterion {bad_id} does not exist; use 1..={}", repro::COUNT)));
    }
    let results: Vec<repro::Outcome> = ids.iter().map(|&i| repro::run(i, &ctx.nm)).collect();
    let ok = results.iter().all(|r| r.pass);
    let rows = results.iter().map(|r| vec![r.id.to_string(), if r.pass { "PASS" } else { "FAIL" }.into(), r.title.into(), r.detail.clone()]).collect();
    Ok(artifact("acceptance_summary", json!({ "criteria": results, "all_pass": ok }), &["id", "result", "criterion", "detail"], rows, ok))
}

#[cfg(test)]
mod tests {
    use super::plain_decimal;

    #[test]
    fn plain_decimals() {
        assert_eq!(plain_decimal("4.5944e-2"), "0.045944");
        assert_eq!(plain_decimal("-1.25e1"), "-12.5");
        assert_eq!(plain_decimal("3.0e0"), "3.0");
        assert_eq!(plain_decimal("2.5e2"), "250");
        assert_eq!(plain_decimal("1.5e-40"), "1.5e-40");
        assert_eq!(plain_decimal("0.5"), "0.5");
    }
}
