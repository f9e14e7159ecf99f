//! Statistics of large random 4-valent forested maps: number of components,
//! degree of the root component and internally active edges.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Dual, ExactRational, Field};
use crate::numerics::{Numerics, P4Series, SingularProfile};
use crate::real::Real;
use crate::recur;
use crate::trees::Factorials;

#[derive(Clone, Debug, Serialize)]
pub struct ModelStats {
    pub u: f64,
    /// Limit of `E_c(C_n)/n`; `None` for u <= 0.
    pub slope_components: Option<f64>,
    /// Limit of `E_i(I_n)/n`.
    pub kappa: f64,
    /// `P(S_n = k)` in the limit, for `k = 1..`; empty for u <= 0.
    pub s_law: Vec<f64>,
}

fn profile4(nm: &Numerics, u: &Real) -> Result<SingularProfile> {
    nm.radius(4, u)
}

/// `lim E_c(C_n)/n = uΦ(τ)/(τ - uΦ(τ))`, u > 0.
pub fn component_slope(nm: &Numerics, u: &Real) -> Result<Real> {
    if !u.is_positive() {
        return Err(Error::Domain("the component slope is only established for u > 0".into()));
    }
    let prof = profile4(nm, u)?;
    let phi = nm.phi_numeric(P4Series::Phi, &prof.tau)?;
    Ok(&(u * &phi) / &prof.rho)
}

/// `κ_u = (1+u)Φ(τ)/(τ - uΦ(τ))`.
pub fn kappa(nm: &Numerics, u: &Real) -> Result<Real> {
    let prof = profile4(nm, u)?;
    let phi = nm.phi_numeric(P4Series::Phi, &prof.tau)?;
    Ok(&(&(&nm.int(1) + u) * &phi) / &prof.rho)
}

/// `(k+1)θ_{k+1} = 4(3k)!/((k-1)! k! (k+1)!)`, the weight of a root vertex
/// whose component has `k+1` half-edges towards subtrees.
pub fn root_weight(k: usize) -> BigInt {
    let mut f = Factorials::new(3 * k + 2);
    let num = f.get(3 * k).clone() * 4;
    let den = f.get(k - 1).clone() * f.get(k).clone() * f.get(k + 1).clone();
    num / den
}

/// `lim P(S_n = k) = (k+1)θ_{k+1} τ^k/θ'(τ)` for `k = 1..=k_max`, u > 0.
pub fn s_limit_law(nm: &Numerics, u: &Real, k_max: usize) -> Result<Vec<Real>> {
    if !u.is_positive() {
        return Err(Error::Domain("the limit law is established for u > 0".into()));
    }
    let prof = profile4(nm, u)?;
    let dth = nm.phi_numeric(P4Series::DTheta, &prof.tau)?;
    let mut out = Vec::with_capacity(k_max);
    let mut tp = nm.int(1);
    for k in 1..=k_max {
        tp = &tp * &prof.tau;
        let w = nm.real(&ExactRational::from_bigint(root_weight(k)));
        out.push(&(&w * &tp) / &dth);
    }
    Ok(out)
}

/// Finite-size law `P(S_n = k) = θ_{k+1}[z^{n-1}]R^{k+1} / [z^{n-1}]F'`
/// for `k = 1..=k_max`, in double precision with the series rescaled by `ρ`.
pub fn s_law_finite(u: f64, rho: f64, n: usize, k_max: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InsufficientOrder { needed: 2, have: n });
    }
    let fv = recur::four_valent(&u, &rho, n - 1);
    let m = n - 1;
    let denom = fv.fprime[m];
    let mut pow = fv.r.clone();
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        // pow = R^{k+1}
        let mut next = vec![0.0; m + 1];
        for (i, a) in pow.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in fv.r.iter().enumerate().take(m + 1 - i) {
                next[i + j] += a * b;
            }
        }
        pow = next;
        let theta = root_weight(k).to_string().parse::<f64>().unwrap_or(f64::NAN) / (k as f64 + 1.0);
        out.push(theta * pow[m] / denom);
    }
    Ok(out)
}

/// `f'_n(u)/f_n(u)` from dual numbers carried through the recurrence.
pub fn log_derivative_dual<C: Field>(u: &C, scale: &C, n: usize) -> Result<C> {
    let ud = Dual::new(u.clone(), u.one_like());
    let cd = Dual::new(scale.clone(), u.zero_like());
    let fv = recur::four_valent(&ud, &cd, n);
    let f = fv.f_scaled();
    let d = &f[n];
    if d.re.is_zero() {
        return Err(Error::Domain(format!("f_{n} vanishes at this u")));
    }
    Ok(d.eps.div(&d.re))
}

/// `f'_n(u)/f_n(u)` through `F''_{zu} = Φ(R)F''`.
pub fn log_derivative_fzu<C: Field>(u: &C, scale: &C, n: usize) -> Result<C> {
    let fv = recur::four_valent(u, scale, n);
    let f = fv.f_scaled();
    let fzu = fv.fzu();
    if f[n].is_zero() {
        return Err(Error::Domain(format!("f_{n} vanishes at this u")));
    }
    // [w^{n-1}] F''_{zu}(cw) = c^{n-1} n f'_n
    Ok(fzu[n - 1].times(scale).div(&f[n].scale(&ExactRational::from(n as i64))))
}

/// Finite-size expectations at size `n`.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteExpectations {
    pub n: usize,
    /// `E_c(C_n) - 1 = u f'_n/f_n`
    pub components_minus_one: f64,
    /// `E_i(I_n) = (1+u) f'_n/f_n`
    pub internal_active: f64,
    /// `E_i(I_n)/n`
    pub internal_per_size: f64,
}

pub fn finite_expectations(u: f64, rho: f64, n: usize) -> Result<FiniteExpectations> {
    let ld = log_derivative_dual(&u, &rho, n)?;
    Ok(FiniteExpectations {
        n,
        components_minus_one: u * ld,
        internal_active: (1.0 + u) * ld,
        internal_per_size: (1.0 + u) * ld / n as f64,
    })
}

pub fn model_stats(nm: &Numerics, u: &Real, k_max: usize) -> Result<ModelStats> {
    let positive = u.is_positive();
    Ok(ModelStats {
        u: u.to_f64(),
        slope_components: if positive { Some(component_slope(nm, u)?.to_f64()) } else { None },
        kappa: kappa(nm, u)?.to_f64(),
        s_law: if positive { s_limit_law(nm, u, k_max)?.iter().map(Real::to_f64).collect() } else { Vec::new() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Precision;
    use crate::trees::build_phi_theta;

    fn nm() -> Numerics {
        Numerics::new(Precision::default())
    }

    #[test]
    fn root_weights_match_theta() {
        let pt = build_phi_theta(4, 30);
        let th = pt.theta_x.unwrap();
        for k in 1..8 {
            let lhs = th[k + 1].clone() * ExactRational::from((k + 1) as i64);
            assert_eq!(lhs, ExactRational::from_bigint(root_weight(k)), "k = {k}");
        }
        assert_eq!(root_weight(1), BigInt::from(12));
    }

    #[test]
    fn kappa_at_zero_and_minus_one() {
        let nm = nm();
        let k0 = kappa(&nm, &nm.int(0)).unwrap();
        // 27Φ(1/27) = 9√3/(4π) - 1
        let want = &(&(&Real::from_i64(3, nm.bits()).sqrt() * 9) / &(&nm.pi() * 4)) - &nm.int(1);
        assert!((&k0 - &want).abs().to_f64() < 1e-40);
        assert!((k0.to_f64() - 0.2404900147).abs() < 1e-9);
        assert!(kappa(&nm, &nm.int(-1)).unwrap().is_zero());
        assert!(kappa(&nm, &nm.int(-2)).is_err());
    }

    #[test]
    fn limit_law_sums_to_one() {
        let nm = nm();
        let law = s_limit_law(&nm, &nm.int(1), 400).unwrap();
        let total: f64 = law.iter().map(Real::to_f64).sum();
        assert!(total < 1.0 && total > 0.999, "{total}");
        assert!(law.iter().all(|p| p.is_positive()));
        assert!(component_slope(&nm, &nm.int(0)).is_err());
    }

    #[test]
    fn two_routes_agree_exactly() {
        let u = ExactRational::from(1);
        let one = ExactRational::from(1);
        for n in [3usize, 4, 7, 12] {
            let a = log_derivative_dual(&u, &one, n).unwrap();
            let b = log_derivative_fzu(&u, &one, n).unwrap();
            assert_eq!(a, b, "n = {n}");
        }
    }
}
