//! Arbitrary-precision binary floating point.
//!
//! Every value carries its own precision in bits; binary operations work at
//! the larger of the two. The constants cache is thread-local and holds no
//! precision state.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

use crate::exact::{ExactRational, Field, Ring};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CC: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CC.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision for high-precision numerics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub working_digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { working_digits: 50 }
    }
}

impl Precision {
    pub fn digits(d: u32) -> Self {
        Precision { working_digits: d.max(16) }
    }
    /// Mantissa bits, with a guard word.
    pub fn bits(&self) -> usize {
        (self.working_digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
    }
    /// Absolute tolerance implied by half the working digits.
    pub fn target_abs_tol(&self) -> f64 {
        10f64.powi(-(self.working_digits as i32) / 2)
    }
    /// Stopping threshold for series and root finding, `2^-bits`.
    pub fn eps(&self) -> Real {
        Real::from_i64(1, self.bits()).ldexp(-(self.bits() as i32 - 8))
    }
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    p: usize,
}

impl Real {
    pub fn zero(p: usize) -> Self {
        Real { v: BigFloat::from_i64(0, p), p }
    }
    pub fn one(p: usize) -> Self {
        Real::from_i64(1, p)
    }
    pub fn from_i64(n: i64, p: usize) -> Self {
        Real { v: BigFloat::from_i64(n, p), p }
    }
    pub fn from_f64(x: f64, p: usize) -> Self {
        Real { v: BigFloat::from_f64(x, p), p }
    }
    pub fn from_rational(r: &ExactRational, p: usize) -> Self {
        let part = |s: String| with_cc(|cc| BigFloat::parse(&s, Radix::Dec, p + 64, RM, cc));
        let n = part(r.numer().to_string());
        let d = part(r.denom().to_string());
        Real { v: n.div(&d, p, RM), p }
    }
    pub fn frac(n: i64, d: i64, p: usize) -> Self {
        Real::from_i64(n, p) / Real::from_i64(d, p)
    }
    pub fn pi(p: usize) -> Self {
        Real { v: with_cc(|cc| cc.pi(p, RM)), p }
    }
    pub fn prec(&self) -> usize {
        self.p
    }
    pub fn with_prec(&self, p: usize) -> Self {
        let mut v = self.v.clone();
        let _ = v.set_precision(p, RM);
        Real { v, p }
    }
    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }
    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }
    pub fn is_positive(&self) -> bool {
        self.v.is_positive() && !self.v.is_zero()
    }
    pub fn abs(&self) -> Self {
        Real { v: self.v.abs(), p: self.p }
    }
    pub fn sqrt(&self) -> Self {
        Real { v: self.v.sqrt(self.p, RM), p: self.p }
    }
    pub fn ln(&self) -> Self {
        Real { v: with_cc(|cc| self.v.ln(self.p, RM, cc)), p: self.p }
    }
    pub fn exp(&self) -> Self {
        Real { v: with_cc(|cc| self.v.exp(self.p, RM, cc)), p: self.p }
    }
    pub fn powi(&self, n: i32) -> Self {
        let r = Real { v: self.v.powi(n.unsigned_abs() as usize, self.p, RM), p: self.p };
        if n < 0 {
            r.recip()
        } else {
            r
        }
    }
    pub fn recip(&self) -> Self {
        Real { v: self.v.reciprocal(self.p, RM), p: self.p }
    }
    /// `self · 2^k`, exact.
    pub fn ldexp(&self, k: i32) -> Self {
        if self.v.is_zero() {
            return self.clone();
        }
        let mut v = self.v.clone();
        let e = v.exponent().unwrap_or(0);
        v.set_exponent(e + k);
        Real { v, p: self.p }
    }
    pub fn max(&self, o: &Real) -> Real {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }
    pub fn min(&self, o: &Real) -> Real {
        if self <= o {
            self.clone()
        } else {
            o.clone()
        }
    }
    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.v.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((m, _, s, e, _)) = self.v.as_raw_parts() else { return 0.0 };
        if m.is_empty() || self.v.is_zero() {
            return 0.0;
        }
        let l = m.len();
        let two64 = 18446744073709551616.0f64;
        let mut top = m[l - 1] as f64 / two64;
        if l >= 2 {
            top += m[l - 2] as f64 / two64 / two64;
        }
        let mag = top * 2f64.powi(e);
        if s == Sign::Neg {
            -mag
        } else {
            mag
        }
    }
    /// Decimal rendering with `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let s = with_cc(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into());
        shorten(&s, digits)
    }
}

fn shorten(s: &str, digits: usize) -> String {
    let (mant, exp) = match s.find('e') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let keep = mant.chars().filter(|c| c.is_ascii_digit()).take(digits).count();
    let mut out = String::new();
    let mut seen = 0;
    for ch in mant.chars() {
        if ch.is_ascii_digit() {
            if seen == keep {
                break;
            }
            seen += 1;
        }
        out.push(ch);
    }
    out + exp
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(25))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        write!(f, "{}", self.to_string_digits(d))
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                let p = self.p.max(o.p);
                Real { v: BigFloat::$m(&self.v, &o.v, p, RM), p }
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                <&Real as $tr<&Real>>::$m(&self, &o)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                <&Real as $tr<&Real>>::$m(&self, o)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                <&Real as $tr<&Real>>::$m(self, &o)
            }
        }
        impl $tr<i64> for &Real {
            type Output = Real;
            fn $m(self, o: i64) -> Real {
                <&Real as $tr<&Real>>::$m(self, &Real::from_i64(o, self.p))
            }
        }
        impl $tr<i64> for Real {
            type Output = Real;
            fn $m(self, o: i64) -> Real {
                <&Real as $tr<&Real>>::$m(&self, &Real::from_i64(o, self.p))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), p: self.p }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), p: self.p }
    }
}

impl Ring for Real {
    fn zero_like(&self) -> Self {
        Real::zero(self.p)
    }
    fn one_like(&self) -> Self {
        Real::one(self.p)
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_rational_like(&self, r: &ExactRational) -> Self {
        Real::from_rational(r, self.p)
    }
    fn from_int_like(&self, n: i64) -> Self {
        Real::from_i64(n, self.p)
    }
    fn scale(&self, r: &ExactRational) -> Self {
        if r.is_integer() {
            if let Ok(n) = i64::try_from(r.numer()) {
                return self * n;
            }
        }
        self * &Real::from_rational(r, self.p)
    }
}

impl Field for Real {
    fn inv(&self) -> Self {
        self.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_and_roundtrip() {
        let p = Precision::default().bits();
        let pi = Real::pi(p);
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let x = Real::from_f64(-0.1234, p);
        assert_eq!(x.to_f64(), -0.1234);
        assert!(pi.to_string_digits(10).starts_with("3.14159265"));
    }

    #[test]
    fn rational_conversion() {
        let p = 200;
        let r: ExactRational = "-355/113".parse().unwrap();
        let x = Real::from_rational(&r, p);
        assert!((x.to_f64() + 355.0 / 113.0).abs() < 1e-15);
        let big = ExactRational::new(num_bigint::BigInt::from(10).pow(40) + 1, 3);
        let y = Real::from_rational(&big, p) * 3 - Real::from_i64(10, p).powi(40);
        assert_eq!(y.to_f64(), 1.0);
    }

    #[test]
    fn power_of_two_scaling_is_exact() {
        let p = 256;
        let pi4 = Real::pi(p).powi(4);
        let num = &pi4 * 3;
        let den = &pi4 * 192;
        assert!(num / den == Real::frac(1, 64, p));
        assert_eq!(Real::from_i64(3, p).ldexp(-2).to_f64(), 0.75);
    }

    #[test]
    fn elementary_functions() {
        let p = 256;
        let two = Real::from_i64(2, p);
        let l = two.ln();
        assert!((l.exp() - &two).abs() < Real::from_f64(1e-70, p));
        assert!((two.sqrt().powi(2) - &two).abs() < Real::from_f64(1e-70, p));
        assert!(Real::from_i64(-3, p) < Real::zero(p));
    }
}
