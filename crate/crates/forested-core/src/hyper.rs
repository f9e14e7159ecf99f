//! `₂F₁(a, 1-a; 2; w)` on `[0, 1]` for `a ∈ {1/3, 1/4}`.
//!
//! For `w <= 1/2` the defining series is summed directly. Closer to `w = 1`
//! the logarithmic connection formula is used in the variable `s = 1 - w`:
//!
//! `F = A + B Σ_n c_n s^{n+1} (ln s + h_n)` with `A = sin(πa)/(π a b)`,
//! `B = sin(πa)/π`, `c_n = (a+1)_n (b+1)_n / (n! (n+1)!)` and
//! `h_n = ψ(a+n+1) + ψ(b+n+1) - ψ(n+1) - ψ(n+2)`.

use crate::error::{Error, Result};
use crate::real::Real;

/// The two hypergeometric families used by the valency 4 and 3 series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypKind {
    /// `a = 1/3`, behind `Φ`.
    Third,
    /// `a = 1/4`, behind `Ψ₁`.
    Quarter,
}

/// Value and scaled `w`-derivatives at a point.
///
/// `sdf = s·F'(w)` and `s2d2f = s²·F''(w)` stay finite at `s = 0`.
#[derive(Clone, Debug)]
pub struct HypVals {
    pub s: Real,
    pub f: Real,
    pub sdf: Real,
    pub s2d2f: Real,
    /// Rough bound on the neglected tail.
    pub tail: f64,
}

impl HypVals {
    pub fn df(&self) -> Result<Real> {
        if self.s.is_zero() {
            return Err(Error::Domain("derivative is infinite at the singular point".into()));
        }
        Ok(&self.sdf / &self.s)
    }
    pub fn d2f(&self) -> Result<Real> {
        if self.s.is_zero() {
            return Err(Error::Domain("derivative is infinite at the singular point".into()));
        }
        Ok(&self.s2d2f / &(&self.s * &self.s))
    }
}

#[derive(Clone, Debug)]
pub struct Hyp {
    pub kind: HypKind,
    p: usize,
    a: Real,
    b: Real,
    big_a: Real,
    big_b: Real,
    h0: Real,
}

impl Hyp {
    pub fn new(kind: HypKind, p: usize) -> Self {
        let pi = Real::pi(p);
        let (an, ad) = match kind {
            HypKind::Third => (1, 3),
            HypKind::Quarter => (1, 4),
        };
        let a = Real::frac(an, ad, p);
        let b = Real::frac(ad - an, ad, p);
        // sin(πa) and ψ(a) + ψ(1-a) + 2γ
        let (sin, k) = match kind {
            HypKind::Third => (Real::from_i64(3, p).sqrt() / 2, -(Real::from_i64(3, p).ln() * 3)),
            HypKind::Quarter => (Real::from_i64(2, p).sqrt() / 2, -(Real::from_i64(2, p).ln() * 6)),
        };
        let big_b = &sin / &pi;
        let big_a = &big_b / &(&a * &b);
        let h0 = k + a.recip() + b.recip() - Real::one(p);
        Hyp { kind, p, a, b, big_a, big_b, h0 }
    }

    pub fn prec(&self) -> usize {
        self.p
    }

    /// `F(1)`.
    pub fn at_one(&self) -> Real {
        self.big_a.clone()
    }

    /// Coefficient of `s ln s` in the expansion at `w = 1`.
    pub fn log_coeff(&self) -> Real {
        self.big_b.clone()
    }

    /// Evaluate at `w = 1 - s`, `0 <= s <= 1`.
    pub fn eval_s(&self, s: &Real) -> Result<HypVals> {
        let p = self.p;
        if s.is_negative() || *s > Real::one(p) {
            return Err(Error::Domain(format!("s = {} outside [0, 1]", s.to_f64())));
        }
        if s.is_zero() {
            return Ok(HypVals {
                s: s.clone(),
                f: self.big_a.clone(),
                sdf: Real::zero(p),
                s2d2f: Real::zero(p),
                tail: 0.0,
            });
        }
        if *s >= Real::frac(1, 2, p) {
            self.direct(s)
        } else {
            self.connection(s)
        }
    }

    /// Evaluate at `w`, `0 <= w <= 1`.
    pub fn eval_w(&self, w: &Real) -> Result<HypVals> {
        self.eval_s(&(Real::one(self.p) - w))
    }

    fn eps(&self) -> Real {
        Real::one(self.p).ldexp(-(self.p as i32) + 4)
    }

    /// Direct summation in `w`; used for `s >= 1/2`.
    pub fn direct(&self, s: &Real) -> Result<HypVals> {
        let p = self.p;
        let w = Real::one(p) - s;
        let eps = self.eps();
        // k_n = (a)_n (b)_n / (n! (n+1)!)
        let mut k = Real::one(p);
        let mut wn = Real::one(p);
        let mut wn1 = Real::zero(p);
        let mut wn2 = Real::zero(p);
        let (mut f, mut df, mut d2f) = (Real::zero(p), Real::zero(p), Real::zero(p));
        let mut tail = f64::INFINITY;
        for n in 0..100_000usize {
            let t0 = &k * &wn;
            let t1 = &(&k * &wn1) * n as i64;
            let t2 = &(&k * &wn2) * (n * n.saturating_sub(1)) as i64;
            f = f + &t0;
            df = df + &t1;
            d2f = d2f + &t2;
            let mag = t0.abs().max(&t1.abs()).max(&t2.abs());
            if n > 4 && mag <= eps {
                tail = mag.to_f64() * 4.0;
                break;
            }
            let nf = n as i64;
            k = &k * &((&self.a + nf) * (&self.b + nf)) / ((nf + 1) * (nf + 2));
            wn2 = wn1.clone();
            wn1 = wn.clone();
            wn = &wn * &w;
        }
        if !tail.is_finite() {
            return Err(Error::NonConvergence("direct hypergeometric series".into()));
        }
        Ok(HypVals { s: s.clone(), sdf: s * &df, s2d2f: &(s * s) * &d2f, f, tail })
    }

    /// Logarithmic connection series in `s`; used for `0 < s < 1/2`.
    pub fn connection(&self, s: &Real) -> Result<HypVals> {
        let p = self.p;
        let ln = s.ln();
        let eps = self.eps();
        let mut c = Real::one(p);
        let mut h = self.h0.clone();
        let mut sp = s.clone();
        let (mut s0, mut s1, mut s2) = (Real::zero(p), Real::zero(p), Real::zero(p));
        let mut tail = f64::INFINITY;
        for n in 0..100_000usize {
            let nf = n as i64;
            let lh = &ln + &h;
            let base = &c * &sp;
            let t0 = &base * &lh;
            let t1 = &base * &(&lh * (nf + 1) + Real::one(p));
            let t2 = &base * &(&lh * (nf * (nf + 1)) + Real::from_i64(2 * nf + 1, p));
            s0 = s0 + &t0;
            s1 = s1 + &t1;
            s2 = s2 + &t2;
            let mag = t0.abs().max(&t1.abs()).max(&t2.abs());
            if n > 4 && mag <= eps {
                tail = mag.to_f64() * 4.0;
                break;
            }
            let m = nf + 1;
            c = &c * &((&self.a + m) * (&self.b + m)) / (m * (m + 1));
            h = h + (&self.a + m).recip() + (&self.b + m).recip() - Real::frac(1, m, p) - Real::frac(1, m + 1, p);
            sp = &sp * s;
        }
        if !tail.is_finite() {
            return Err(Error::NonConvergence("logarithmic hypergeometric series".into()));
        }
        let bb = &self.big_b;
        Ok(HypVals {
            s: s.clone(),
            f: &self.big_a + &(bb * &s0),
            sdf: -(bb * &s1),
            s2d2f: bb * &s2,
            tail,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Real, b: &Real, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol
    }

    #[test]
    fn methods_agree_on_overlap() {
        let p = 230;
        for kind in [HypKind::Third, HypKind::Quarter] {
            let h = Hyp::new(kind, p);
            for (n, d) in [(2, 5), (1, 2), (3, 5), (9, 20)] {
                let s = Real::frac(n, d, p);
                let a = h.direct(&s).unwrap();
                let b = h.connection(&s).unwrap();
                assert!(close(&a.f, &b.f, 1e-45), "{kind:?} {n}/{d}");
                assert!(close(&a.sdf, &b.sdf, 1e-45));
                assert!(close(&a.s2d2f, &b.s2d2f, 1e-45));
            }
        }
    }

    #[test]
    fn value_at_one() {
        let p = 230;
        let pi = Real::pi(p);
        let h = Hyp::new(HypKind::Third, p);
        let want = Real::from_i64(3, p).sqrt() * 9 / (pi.clone() * 4);
        assert!(close(&h.eval_s(&Real::zero(p)).unwrap().f, &want, 1e-60));
        // continuity into the singular point
        let near = h.eval_s(&Real::from_f64(1e-30, p)).unwrap();
        assert!(close(&near.f, &want, 1e-27));
        let q = Hyp::new(HypKind::Quarter, p);
        let want = Real::from_i64(2, p).sqrt() * 8 / (pi * 3);
        assert!(close(&q.at_one(), &want, 1e-60));
    }

    #[test]
    fn small_w_matches_taylor() {
        // F = 1 + (ab/2) w + ...
        let p = 200;
        let h = Hyp::new(HypKind::Third, p);
        let w = Real::from_f64(1e-8, p);
        let v = h.eval_w(&w).unwrap();
        let approx = 1.0 + (2.0 / 9.0) / 2.0 * 1e-8;
        assert!((v.f.to_f64() - approx).abs() < 1e-15);
        assert!((v.df().unwrap().to_f64() - 1.0 / 9.0).abs() < 1e-8);
    }

    #[test]
    fn derivative_by_differences() {
        let p = 230;
        let h = Hyp::new(HypKind::Quarter, p);
        for sv in ["0.1", "0.7", "0.001"] {
            let s = Real::from_rational(&sv.parse().unwrap(), p);
            let d = Real::from_f64(1e-20, p);
            let up = h.eval_s(&(&s - &d)).unwrap().f;
            let dn = h.eval_s(&(&s + &d)).unwrap().f;
            let fd = (up - dn) / (d * 2);
            let v = h.eval_s(&s).unwrap();
            assert!(close(&fd, &v.df().unwrap(), 1e-30), "{sv}");
        }
    }

    #[test]
    fn rejects_outside() {
        let h = Hyp::new(HypKind::Third, 128);
        assert!(h.eval_s(&Real::from_f64(-0.1, 128)).is_err());
        assert!(h.eval_s(&Real::from_f64(1.5, 128)).is_err());
    }
}
