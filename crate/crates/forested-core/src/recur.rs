//! Quadratic-time coefficient recurrences for R, S and F' at fixed `u`.
//!
//! Both routes work in a rescaled variable `z = c·w`, so the returned
//! coefficients are those of `R(c·w)`, `F'(c·w)`, ... in `w`. Choosing `c`
//! near the radius keeps floating-point coefficients of order one.

use crate::exact::{ExactRational, Field};

/// Coefficients `[w^n]` of the 4-valent series at fixed `u`.
#[derive(Clone, Debug)]
pub struct FourValent<C> {
    pub scale: C,
    /// `R(cw)`
    pub r: Vec<C>,
    /// `Φ(R(cw))`
    pub phi: Vec<C>,
    /// `Φ'(R(cw))`
    pub dphi: Vec<C>,
    /// `F'(cw)`
    pub fprime: Vec<C>,
}

fn conv_at<C: Field>(a: &[C], b: &[C], n: usize, lo: usize, hi: usize) -> C {
    let mut acc = a[0].zero_like();
    for k in lo..=hi {
        let (x, y) = (&a[k], &b[n - k]);
        if !x.is_zero() && !y.is_zero() {
            acc.add_mul(x, y);
        }
    }
    acc
}

fn rat<C: Field>(proto: &C, n: i64, d: i64) -> C {
    proto.from_rational_like(&ExactRational::new(n, d))
}

/// Solve `R = z + uΦ(R)` through the differential system
/// `R'(1 - uQ) = 1`, `P' = QR'`, `R(27R-1)Q' = -6(P+R)R'`
/// with `P = Φ(R)`, `Q = Φ'(R)`.
pub fn four_valent<C: Field>(u: &C, scale: &C, n: usize) -> FourValent<C> {
    let zero = u.zero_like();
    let c = scale.clone();
    let mut r = vec![zero.clone(); n + 2];
    let mut p = vec![zero.clone(); n + 2];
    let mut q = vec![zero.clone(); n + 2];
    // A = 27R² - R, B = P + R
    let mut r2 = vec![zero.clone(); n + 2];
    let mut a = vec![zero.clone(); n + 2];
    let mut b = vec![zero.clone(); n + 2];
    // k·r_k and k·q_k
    let mut dr = vec![zero.clone(); n + 2];
    let mut dq = vec![zero.clone(); n + 2];
    let neg6 = rat(u, -6, 1);
    for m in 1..=n + 1 {
        // m r_m = c[m=1] + u Σ_{k=0}^{m-2} (k+1) r_{k+1} q_{m-1-k}
        let mut acc = if m == 1 { c.clone() } else { zero.clone() };
        if m >= 2 {
            let s = conv_at(&dr, &q, m, 1, m - 1);
            acc.add_mul(u, &s);
        }
        r[m] = acc.scale(&ExactRational::new(1, m as i64));
        dr[m] = r[m].scale(&ExactRational::from(m as i64));
        // m p_m = Σ_{k=1}^{m-1} q_k (m-k) r_{m-k}
        p[m] = if m >= 2 { conv_at(&q, &dr, m, 1, m - 1).scale(&ExactRational::new(1, m as i64)) } else { zero.clone() };
        r2[m] = if m >= 2 { conv_at(&r, &r, m, 1, m - 1) } else { zero.clone() };
        a[m] = r2[m].scale(&ExactRational::from(27)).minus(&r[m]);
        b[m] = p[m].plus(&r[m]);
        // A_1 m q_m = -6 Σ_{k=1}^{m} B_k (m+1-k) r_{m+1-k} - Σ_{k=2}^{m} A_k (m+1-k) q_{m+1-k}
        let rhs = conv_at(&b, &dr, m + 1, 1, m).times(&neg6);
        let rest = if m >= 2 { conv_at(&a, &dq, m + 1, 2, m) } else { zero.clone() };
        let den = a[1].scale(&ExactRational::from(m as i64));
        q[m] = rhs.minus(&rest).div(&den);
        dq[m] = q[m].scale(&ExactRational::from(m as i64));
    }
    // F' = (2(27R - 1)Q - 42P + 12R)/3
    let mut fprime = vec![zero.clone(); n + 1];
    for m in 0..=n {
        let mut acc = if m >= 1 { conv_at(&r, &q, m, 1, m - 1).scale(&ExactRational::from(54)) } else { zero.clone() };
        acc = acc.minus(&q[m].scale(&ExactRational::from(2)));
        acc = acc.minus(&p[m].scale(&ExactRational::from(42)));
        acc.add_assign(&r[m].scale(&ExactRational::from(12)));
        fprime[m] = acc.scale(&ExactRational::new(1, 3));
    }
    r.truncate(n + 1);
    p.truncate(n + 1);
    q.truncate(n + 1);
    FourValent { scale: c, r, phi: p, dphi: q, fprime }
}

impl<C: Field> FourValent<C> {
    /// `[w^n] F(cw) = c^n f_n` for `n <= len`, from `F' `.
    pub fn f_scaled(&self) -> Vec<C> {
        let zero = self.scale.zero_like();
        let mut f = vec![zero; self.fprime.len() + 1];
        for (m, c) in self.fprime.iter().enumerate() {
            f[m + 1] = c.times(&self.scale).scale(&ExactRational::new(1, m as i64 + 1));
        }
        f
    }
    /// `[w^n] F''(cw)`.
    pub fn fsecond(&self) -> Vec<C> {
        let inv = self.scale.inv();
        (1..self.fprime.len())
            .map(|m| self.fprime[m].scale(&ExactRational::from(m as i64)).times(&inv))
            .collect()
    }
    /// `[w^n] F''_{zu}(cw) = [w^n] Φ(R)·F''`.
    pub fn fzu(&self) -> Vec<C> {
        let f2 = self.fsecond();
        let n = f2.len();
        (0..n).map(|m| conv_at(&self.phi, &f2, m, 0, m)).collect()
    }
}

/// Coefficients `[w^n]` of the cubic series at fixed `u`.
#[derive(Clone, Debug)]
pub struct Cubic<C> {
    pub scale: C,
    pub r: Vec<C>,
    pub s: Vec<C>,
    /// `F'(cw)`; empty when `u = 0`.
    pub fprime: Vec<C>,
}

/// Solve the cubic system through `R'D = N_R`, `S'D = N_S`.
pub fn cubic<C: Field>(u: &C, scale: &C, n: usize) -> Cubic<C> {
    let zero = u.zero_like();
    let one = u.one_like();
    let c = scale.clone();
    let u1 = u.plus(&one);
    let u1sq = u1.times(&u1);
    let k = |x: i64| u.from_int_like(x);
    let mut r = vec![zero.clone(); n + 1];
    let mut s = vec![zero.clone(); n + 1];
    let mut d = vec![zero.clone(); n + 1];
    let mut x = vec![zero.clone(); n + 1];
    let mut r2 = vec![zero.clone(); n + 1];
    let mut s2 = vec![zero.clone(); n + 1];
    let mut rs = vec![zero.clone(); n + 1];
    let mut rs2 = vec![zero.clone(); n + 1];
    let mut dr = vec![zero.clone(); n + 1];
    let mut ds = vec![zero.clone(); n + 1];
    x[0] = one.negated();
    let c_inv = c.inv();
    for m in 1..=n {
        if m >= 2 {
            r2[m] = conv_at(&r, &r, m, 1, m - 1);
            s2[m] = conv_at(&s, &s, m, 1, m - 1);
            rs[m] = conv_at(&r, &s, m, 1, m - 1);
        }
        if m >= 3 {
            rs2[m] = conv_at(&r, &s2, m, 1, m - 2);
        }
        let mut dknown = if m == 2 { c.times(&c).times(&k(36)) } else { zero.clone() };
        dknown.add_mul(&c.times(&u1).times(&k(24)), &r[m - 1]);
        dknown.add_mul(&u1.times(&k(4)), &rs[m]);
        dknown = dknown.minus(&u1sq.times(&k(4)).times(&rs2[m]));
        dknown.add_mul(&u1sq.times(&k(4)), &r2[m]);
        if m == 1 {
            r[1] = c.clone();
        } else {
            // L = Σ_{k=1}^{m-2} (k+1) r_{k+1} D_{m-k}
            let l = conv_at(&dr, &d, m + 1, 2, m - 1);
            let sigma = conv_at(&r, &x, m, 1, m - 1);
            let num = c.times(&dknown).plus(&l).minus(&c.times(&sigma));
            r[m] = num.times(&c_inv).scale(&ExactRational::new(1, m as i64));
        }
        dr[m] = r[m].scale(&ExactRational::from(m as i64));
        d[m] = dknown.minus(&r[m]);
        // N_S[m] = -2(3c[m=1] + (u-3) r_m - 12c s_{m-1} + 4(u+1)(RS)_m)
        let mut ns = if m == 1 { c.times(&k(3)) } else { zero.clone() };
        ns.add_mul(&u.minus(&k(3)), &r[m]);
        ns = ns.minus(&c.times(&k(12)).times(&s[m - 1]));
        ns.add_mul(&u1.times(&k(4)), &rs[m]);
        let ns = ns.times(&k(-2));
        // Σ_{k=0}^{m-2} (k+1) s_{k+1} D_{m-k} - c N_S[m] = c m s_m
        let l = if m >= 2 { conv_at(&ds, &d, m + 1, 1, m - 1) } else { zero.clone() };
        s[m] = l.minus(&c.times(&ns)).times(&c_inv).scale(&ExactRational::new(1, m as i64));
        ds[m] = s[m].scale(&ExactRational::from(m as i64));
        if m >= 1 {
            s2[m] = conv_at(&s, &s, m, 1, m - 1);
        }
        // X = 48cw - 1 + 16(u+1)R + 2(3+u)S - 8(u+1)S²
        let mut xm = if m == 1 { c.times(&k(48)) } else { zero.clone() };
        xm.add_mul(&u1.times(&k(16)), &r[m]);
        xm.add_mul(&u.plus(&k(3)).times(&k(2)), &s[m]);
        xm = xm.minus(&u1.times(&k(8)).times(&s2[m]));
        x[m] = xm;
    }
    // F' = (2z + S)/u - (1 + 1/u)(2R + S²)
    let fprime = if u.is_zero() {
        Vec::new()
    } else {
        let ui = u.inv();
        let coef = one.plus(&ui);
        (0..=n)
            .map(|m| {
                let mut v = if m == 1 { c.times(&k(2)) } else { zero.clone() };
                v.add_assign(&s[m]);
                v = v.times(&ui);
                let s2m = if m >= 2 { conv_at(&s, &s, m, 1, m - 1) } else { zero.clone() };
                v.minus(&coef.times(&r[m].times(&k(2)).plus(&s2m)))
            })
            .collect()
    };
    Cubic { scale: c, r, s, fprime }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{Dual, Ring};
    use crate::solver::solve_specialized;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn four_valent_matches_solver() {
        for u in [q(1, 1), q(-1, 2), q(3, 7)] {
            let out = solve_specialized(4, 12, &u).unwrap();
            let fv = four_valent(&u, &q(1, 1), 12);
            assert_eq!(fv.r, out.r.coeffs());
            assert_eq!(fv.fprime, out.fprime.coeffs());
            assert_eq!(fv.f_scaled()[..=12], out.f.coeffs()[..]);
        }
    }

    #[test]
    fn four_valent_scaling() {
        let u = q(1, 1);
        let c = q(1, 3);
        let a = four_valent(&u, &q(1, 1), 10);
        let b = four_valent(&u, &c, 10);
        for n in 0..=10 {
            assert_eq!(b.r[n], &a.r[n] * &c.pow(n));
            assert_eq!(b.fprime[n], &a.fprime[n] * &c.pow(n));
        }
    }

    #[test]
    fn cubic_matches_solver() {
        for u in [q(1, 1), q(-1, 2), q(2, 5)] {
            let out = solve_specialized(3, 10, &u).unwrap();
            let cb = cubic(&u, &q(1, 1), 10);
            assert_eq!(cb.r, out.r.coeffs());
            assert_eq!(cb.s, out.s.coeffs());
            assert_eq!(cb.fprime, out.fprime.coeffs());
        }
    }

    #[test]
    fn dual_gives_u_derivative() {
        // d/du [z^n]F at u = 1 against a symbolic solve
        let out = crate::solver::solve(4, 8, &crate::solver::UMode::Symbolic).unwrap();
        let u = Dual::new(q(1, 1), q(1, 1));
        let one = Dual::new(q(1, 1), q(0, 1));
        let fv = four_valent(&u, &one, 8);
        let f = fv.f_scaled();
        for n in 3..=8 {
            let dp = out.f.coeff(n).derivative();
            assert_eq!(f[n].eps, dp.eval(&q(1, 1)));
            assert_eq!(f[n].re, out.f.coeff(n).eval(&q(1, 1)));
        }
    }

    #[test]
    fn f64_tracks_exact() {
        let u = q(-1, 2);
        let ex = four_valent(&u, &q(1, 20), 60);
        let fl = four_valent(&-0.5f64, &0.05f64, 60);
        for n in 0..=60 {
            let e = ex.fprime[n].to_f64();
            assert!((e - fl.fprime[n]).abs() <= 1e-12 * e.abs().max(1e-300), "{n}: {e} vs {}", fl.fprime[n]);
        }
    }
}
