//! Exact scalars, polynomials in `u`, and truncated power series in `z`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Commutative ring used as a series coefficient domain.
///
/// Constructors take `&self` as a prototype so that types carrying a
/// context (such as a working precision) can build compatible constants.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_rational_like(&self, r: &ExactRational) -> Self;

    fn from_int_like(&self, n: i64) -> Self {
        self.from_rational_like(&ExactRational::from(n))
    }
    fn scale(&self, r: &ExactRational) -> Self {
        self.times(&self.from_rational_like(r))
    }
    fn add_assign(&mut self, o: &Self) {
        *self = self.plus(o);
    }
    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self = self.plus(&a.times(b));
    }
    fn pow(&self, n: usize) -> Self {
        let mut acc = self.one_like();
        for _ in 0..n {
            acc = acc.times(self);
        }
        acc
    }
}

/// A ring with exact or approximate division.
pub trait Field: Ring {
    fn inv(&self) -> Self;
    fn div(&self, o: &Self) -> Self {
        self.times(&o.inv())
    }
}

/// Arbitrary-precision rational, always in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(pub BigRational);

impl ExactRational {
    pub fn new(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::new(n.into(), d.into()))
    }
    pub fn from_bigint(n: BigInt) -> Self {
        ExactRational(BigRational::from_integer(n))
    }
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }
    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
    pub fn recip(&self) -> Self {
        ExactRational(self.0.recip())
    }
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        ExactRational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        ExactRational::from_bigint(n)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(ExactRational::new(n, d))
            }
            None => {
                if let Some((ip, fp)) = s.split_once('.') {
                    // decimal literal such as "-0.5"
                    let neg = ip.starts_with('-');
                    let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
                    let n: BigInt = digits.parse().map_err(|_| bad())?;
                    let d = num_traits::pow(BigInt::from(10), fp.len());
                    let r = ExactRational::new(n, d);
                    return Ok(if neg { -r } else { r });
                }
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(ExactRational::from_bigint(n))
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, o: ExactRational) -> ExactRational {
                ExactRational(self.0.$m(o.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, o: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&o.0))
            }
        }
    };
}
rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Ring for ExactRational {
    fn zero_like(&self) -> Self {
        ExactRational::zero()
    }
    fn one_like(&self) -> Self {
        ExactRational::one()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
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
        ExactRational(-self.0.clone())
    }
    fn from_rational_like(&self, r: &ExactRational) -> Self {
        r.clone()
    }
    fn scale(&self, r: &ExactRational) -> Self {
        self * r
    }
    fn add_assign(&mut self, o: &Self) {
        self.0 += &o.0;
    }
}

impl Field for ExactRational {
    fn inv(&self) -> Self {
        self.recip()
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Ring for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
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
        r.to_f64()
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self = a.mul_add(*b, *self);
    }
}

impl Field for f64 {
    fn inv(&self) -> Self {
        1.0 / self
    }
}

/// Dense polynomial in `u` with rational coefficients; index = power of `u`.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients and `degree()` returns `None`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UPolynomial {
    coeffs: Vec<ExactRational>,
}

impl UPolynomial {
    pub fn zero() -> Self {
        UPolynomial { coeffs: Vec::new() }
    }
    pub fn one() -> Self {
        Self::constant(ExactRational::one())
    }
    pub fn constant(c: ExactRational) -> Self {
        Self::from_coeffs(vec![c])
    }
    /// The variable `u`.
    pub fn u() -> Self {
        Self::from_coeffs(vec![ExactRational::zero(), ExactRational::one()])
    }
    pub fn from_coeffs(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.0.is_zero()) {
            coeffs.pop();
        }
        UPolynomial { coeffs }
    }
    pub fn from_ints(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| ExactRational::from(c)).collect())
    }
    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }
    /// Coefficient of `u^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> ExactRational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn eval(&self, u: &ExactRational) -> ExactRational {
        let mut acc = ExactRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * u) + c;
        }
        acc
    }
    /// Evaluate in any ring containing the rationals.
    pub fn eval_in<C: Ring>(&self, u: &C) -> C {
        let mut acc = u.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(u).plus(&u.from_rational_like(c));
        }
        acc
    }
    /// `p(u + a)`.
    pub fn shift(&self, a: &ExactRational) -> Self {
        // Horner with the linear polynomial u + a.
        let lin = UPolynomial::from_coeffs(vec![a.clone(), ExactRational::one()]);
        let mut acc = UPolynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(&lin).plus(&UPolynomial::constant(c.clone()));
        }
        acc
    }
    /// Rewrite in `mu = u + 1`: returns `q` with `q(mu) = p(mu - 1)`.
    pub fn to_mu(&self) -> Self {
        self.shift(&ExactRational::from(-1))
    }
    /// Exact division by `u`; fails when the constant term is nonzero.
    pub fn div_u(&self) -> Result<Self> {
        match self.coeffs.first() {
            None => Ok(UPolynomial::zero()),
            Some(c) if c.0.is_zero() => Ok(UPolynomial::from_coeffs(self.coeffs[1..].to_vec())),
            Some(c) => Err(Error::NotDivisible(format!("constant term {c} is not zero"))),
        }
    }
    pub fn mul_u(&self) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(ExactRational::zero());
        v.extend(self.coeffs.iter().cloned());
        UPolynomial { coeffs: v }
    }
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
    /// Formal derivative in `u`.
    pub fn derivative(&self) -> Self {
        UPolynomial::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &ExactRational::from(k as i64))
                .collect(),
        )
    }
    /// `pretty` with superscript exponents, in parentheses: `(6+4u²)`.
    pub fn display(&self, var: &str) -> String {
        const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
        let mut out = String::from("(");
        let mut exp = false;
        for c in self.pretty(var).chars() {
            match c {
                '^' => exp = true,
                d if exp && d.is_ascii_digit() => out.push(SUP[d as usize - '0' as usize]),
                _ => {
                    exp = false;
                    out.push(c);
                }
            }
        }
        out.push(')');
        out
    }
    /// Human-readable form in the given variable name.
    pub fn pretty(&self, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.0.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { "-" } else { "+" });
            }
            let unit = a == ExactRational::one();
            match k {
                0 => out.push_str(&a.to_string()),
                1 if unit => out.push_str(var),
                1 => out.push_str(&format!("{a}{var}")),
                _ if unit => out.push_str(&format!("{var}^{k}")),
                _ => out.push_str(&format!("{a}{var}^{k}")),
            }
        }
        out
    }
}

impl fmt::Debug for UPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty("u"))
    }
}

impl fmt::Display for UPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty("u"))
    }
}

impl Serialize for UPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(UPolynomial::from_coeffs(Vec::<ExactRational>::deserialize(d)?))
    }
}

impl Ring for UPolynomial {
    fn zero_like(&self) -> Self {
        UPolynomial::zero()
    }
    fn one_like(&self) -> Self {
        UPolynomial::one()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        UPolynomial::from_coeffs(v)
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negated())
    }
    fn times(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return UPolynomial::zero();
        }
        let mut v = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.0.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += &a.0 * &b.0;
            }
        }
        UPolynomial::from_coeffs(v.into_iter().map(ExactRational).collect())
    }
    fn negated(&self) -> Self {
        UPolynomial { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
    fn from_rational_like(&self, r: &ExactRational) -> Self {
        UPolynomial::constant(r.clone())
    }
    fn scale(&self, r: &ExactRational) -> Self {
        UPolynomial::from_coeffs(self.coeffs.iter().map(|c| c * r).collect())
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return;
        }
        let n = a.coeffs.len() + b.coeffs.len() - 1;
        if self.coeffs.len() < n {
            self.coeffs.resize(n, ExactRational::zero());
        }
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.0.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                self.coeffs[i + j].0 += &x.0 * &y.0;
            }
        }
        while self.coeffs.last().is_some_and(|c| c.0.is_zero()) {
            self.coeffs.pop();
        }
    }
}

/// First-order dual numbers `a + b·eps` with `eps² = 0`; used to
/// differentiate exactly with respect to a parameter.
#[derive(Clone, PartialEq, Debug)]
pub struct Dual<C> {
    pub re: C,
    pub eps: C,
}

impl<C: Ring> Dual<C> {
    pub fn new(re: C, eps: C) -> Self {
        Dual { re, eps }
    }
}

impl<C: Ring> Ring for Dual<C> {
    fn zero_like(&self) -> Self {
        Dual::new(self.re.zero_like(), self.re.zero_like())
    }
    fn one_like(&self) -> Self {
        Dual::new(self.re.one_like(), self.re.zero_like())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        Dual::new(self.re.plus(&o.re), self.eps.plus(&o.eps))
    }
    fn minus(&self, o: &Self) -> Self {
        Dual::new(self.re.minus(&o.re), self.eps.minus(&o.eps))
    }
    fn times(&self, o: &Self) -> Self {
        let mut e = self.re.times(&o.eps);
        e.add_mul(&self.eps, &o.re);
        Dual::new(self.re.times(&o.re), e)
    }
    fn negated(&self) -> Self {
        Dual::new(self.re.negated(), self.eps.negated())
    }
    fn from_rational_like(&self, r: &ExactRational) -> Self {
        Dual::new(self.re.from_rational_like(r), self.re.zero_like())
    }
    fn scale(&self, r: &ExactRational) -> Self {
        Dual::new(self.re.scale(r), self.eps.scale(r))
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        self.re.add_mul(&a.re, &b.re);
        self.eps.add_mul(&a.re, &b.eps);
        self.eps.add_mul(&a.eps, &b.re);
    }
}

impl<C: Field> Field for Dual<C> {
    fn inv(&self) -> Self {
        let r = self.re.inv();
        let e = self.eps.times(&r).times(&r).negated();
        Dual::new(r, e)
    }
}

/// Truncated power series in `z`; coefficients of `z^0..=z^order` are exact.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<C> {
    coeffs: Vec<C>,
    order: usize,
}

/// Series with coefficients polynomial in `u`.
pub type ZSeries = Series<UPolynomial>;
/// Series with `u` specialized to a rational.
pub type QSeries = Series<ExactRational>;

impl<C: Ring> Series<C> {
    /// Builds a series from its coefficients; missing ones are zero and
    /// extra ones are discarded.
    pub fn new(mut coeffs: Vec<C>, order: usize, proto: &C) -> Self {
        coeffs.resize(order + 1, proto.zero_like());
        Series { coeffs, order }
    }
    pub fn zero(order: usize, proto: &C) -> Self {
        Series { coeffs: vec![proto.zero_like(); order + 1], order }
    }
    pub fn constant(c: C, order: usize) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = c;
        Series { coeffs, order }
    }
    /// The series `z`.
    pub fn var(order: usize, proto: &C) -> Self {
        let mut s = Self::zero(order, proto);
        if order >= 1 {
            s.coeffs[1] = proto.one_like();
        }
        s
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }
    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }
    pub fn set_coeff(&mut self, n: usize, c: C) {
        self.coeffs[n] = c;
    }
    fn proto(&self) -> &C {
        &self.coeffs[0]
    }
    /// Lower the truncation order.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Series { coeffs: self.coeffs[..=order].to_vec(), order }
    }
    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }
    pub fn plus(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let coeffs = (0..=order).map(|k| self.coeffs[k].plus(&o.coeffs[k])).collect();
        Series { coeffs, order }
    }
    pub fn minus(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let coeffs = (0..=order).map(|k| self.coeffs[k].minus(&o.coeffs[k])).collect();
        Series { coeffs, order }
    }
    pub fn negated(&self) -> Self {
        Series { coeffs: self.coeffs.iter().map(|c| c.negated()).collect(), order: self.order }
    }
    pub fn times(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let z = self.proto().zero_like();
        let mut out = vec![z; order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j].add_mul(a, b);
            }
        }
        Series { coeffs: out, order }
    }
    pub fn scale(&self, r: &ExactRational) -> Self {
        Series { coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect(), order: self.order }
    }
    /// Multiply every coefficient by the ring element `c`.
    pub fn mul_coeff(&self, c: &C) -> Self {
        Series { coeffs: self.coeffs.iter().map(|x| x.times(c)).collect(), order: self.order }
    }
    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series { coeffs: self.coeffs.iter().map(f).collect(), order: self.order }
    }
    /// Multiply by `z^k`; the order grows by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![self.proto().zero_like(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Series { coeffs, order: self.order + k }
    }
    /// Divide by `z^k`; fails if a low coefficient is nonzero.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return Err(Error::NotDivisible(format!("series not divisible by z^{k}")));
        }
        if k > self.order {
            return Err(Error::InsufficientOrder { needed: k, have: self.order });
        }
        Ok(Series { coeffs: self.coeffs[k..].to_vec(), order: self.order - k })
    }
    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Series::constant(self.proto().one_like(), self.order);
        for _ in 0..n {
            acc = acc.times(self);
        }
        acc
    }
    /// d/dz. The result is exact through `order - 1`.
    pub fn derivative(&self) -> Self {
        if self.order == 0 {
            return Series::zero(0, self.proto());
        }
        let coeffs = (1..=self.order)
            .map(|k| self.coeffs[k].scale(&ExactRational::from(k as i64)))
            .collect();
        Series { coeffs, order: self.order - 1 }
    }
    /// Integral with zero constant term. The result is exact through `order + 1`.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.order + 2);
        coeffs.push(self.proto().zero_like());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&ExactRational::new(1, k as i64 + 1)));
        }
        Series { coeffs, order: self.order + 1 }
    }
    /// `outer(self)` where `outer` is given by its coefficient list.
    pub fn compose_into(&self, outer: &[C]) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let proto = self.proto().clone();
        let top = outer.len().min(self.order + 1);
        let mut acc = Series::zero(self.order, &proto);
        for k in (0..top).rev() {
            acc = acc.times(self);
            acc.coeffs[0].add_assign(&outer[k]);
        }
        Ok(acc)
    }
}

impl<C: Field> Series<C> {
    /// Multiplicative inverse; requires an invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NotDivisible("series has zero constant term".into()));
        }
        let c0 = self.coeffs[0].inv();
        let mut out = vec![c0.zero_like(); self.order + 1];
        out[0] = c0.clone();
        for n in 1..=self.order {
            let mut acc = c0.zero_like();
            for k in 1..=n {
                acc.add_mul(&self.coeffs[k], &out[n - k]);
            }
            out[n] = acc.times(&c0).negated();
        }
        Ok(Series { coeffs: out, order: self.order })
    }
}

impl ZSeries {
    /// Specialize `u` to a rational value.
    pub fn eval_u(&self, u: &ExactRational) -> QSeries {
        self.map(|p| p.eval(u))
    }
    /// Exact division of every coefficient by `u`.
    pub fn div_u(&self) -> Result<ZSeries> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.div_u().map_err(|e| Error::NotDivisible(format!("z^{n}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Series { coeffs, order: self.order })
    }
    /// Rewrite every coefficient in `mu = u + 1`.
    pub fn to_mu(&self) -> ZSeries {
        self.map(|p| p.to_mu())
    }
    /// Largest `u`-degree among the coefficients.
    pub fn max_u_degree(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(|c| c.degree()).max()
    }
}

impl QSeries {
    /// Lift a specialized series back to constant polynomials.
    pub fn lift(&self) -> ZSeries {
        self.map(|c| UPolynomial::constant(c.clone()))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr<C> {
    order: usize,
    coeffs: Vec<C>,
}

impl<C: Ring + Serialize> Serialize for Series<C> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr { order: self.order, coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series<UPolynomial> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SeriesRepr::<UPolynomial>::deserialize(d)?;
        if r.coeffs.len() != r.order + 1 {
            return Err(serde::de::Error::custom("coefficient count must be order + 1"));
        }
        Ok(Series { coeffs: r.coeffs, order: r.order })
    }
}

/// Truncated bivariate series `Σ c[i][j] x^i y^j` keeping `i + j <= order`.
#[derive(Clone, PartialEq, Debug)]
pub struct BiSeries {
    order: usize,
    c: Vec<Vec<ExactRational>>,
}

impl BiSeries {
    pub fn zero(order: usize) -> Self {
        BiSeries { order, c: (0..=order).map(|i| vec![ExactRational::zero(); order + 1 - i]).collect() }
    }
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> ExactRational) -> Self {
        let mut b = Self::zero(order);
        for i in 0..=order {
            for j in 0..=order - i {
                b.c[i][j] = f(i, j);
            }
        }
        b
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn get(&self, i: usize, j: usize) -> ExactRational {
        if i + j > self.order {
            return ExactRational::zero();
        }
        self.c[i][j].clone()
    }
    pub fn coeff_ref(&self, i: usize, j: usize) -> &ExactRational {
        &self.c[i][j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: ExactRational) {
        self.c[i][j] = v;
    }
    pub fn plus(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        Self::from_fn(order, |i, j| &self.c[i][j] + &o.c[i][j])
    }
    pub fn minus(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        Self::from_fn(order, |i, j| &self.c[i][j] - &o.c[i][j])
    }
    pub fn times(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out = Self::zero(order);
        for i1 in 0..=order {
            for j1 in 0..=order - i1 {
                let a = &self.c[i1][j1];
                if a.0.is_zero() {
                    continue;
                }
                for i2 in 0..=order - i1 - j1 {
                    for j2 in 0..=order - i1 - j1 - i2 {
                        let b = &o.c[i2][j2];
                        if !b.0.is_zero() {
                            out.c[i1 + i2][j1 + j2].0 += &a.0 * &b.0;
                        }
                    }
                }
            }
        }
        out
    }
    pub fn scale(&self, r: &ExactRational) -> Self {
        Self::from_fn(self.order, |i, j| &self.c[i][j] * r)
    }
    /// Partial derivative in `x`; exact through `order - 1`.
    pub fn dx(&self) -> Self {
        let order = self.order.saturating_sub(1);
        Self::from_fn(order, |i, j| &self.c[i + 1][j] * &ExactRational::from(i as i64 + 1))
    }
    /// Partial derivative in `y`; exact through `order - 1`.
    pub fn dy(&self) -> Self {
        let order = self.order.saturating_sub(1);
        Self::from_fn(order, |i, j| &self.c[i][j + 1] * &ExactRational::from(j as i64 + 1))
    }
    /// Restriction `y = 0` as a coefficient list in `x`.
    pub fn at_y0(&self) -> Vec<ExactRational> {
        (0..=self.order).map(|i| self.c[i][0].clone()).collect()
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().all(|c| c.0.is_zero())
    }
    /// Substitute series `x = r`, `y = s` (both without constant term).
    ///
    /// Computed as `Σ_j A_j(r) s^j` with `A_j = Σ_i c_ij x^i` evaluated by Horner.
    pub fn compose<C: Ring>(&self, r: &Series<C>, s: &Series<C>) -> Result<Series<C>> {
        if !r.coeff(0).is_zero() || !s.coeff(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let order = r.order().min(s.order()).min(self.order);
        let r = r.truncate(order);
        let s = s.truncate(order);
        let proto = r.coeff(0).clone();
        let s_zero = s.is_zero();
        let mut acc = Series::zero(order, &proto);
        for j in (0..=order).rev() {
            if s_zero && j > 0 {
                continue;
            }
            let col: Vec<C> = (0..=order - j).map(|i| proto.from_rational_like(&self.c[i][j])).collect();
            let aj = r.compose_into(&col)?;
            acc = acc.times(&s);
            acc = acc.plus(&aj);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_uses_superscripts() {
        assert_eq!(UPolynomial::from_ints(&[140, 234, 144, 32]).display("u"), "(140+234u+144u²+32u³)");
        assert_eq!(UPolynomial::from_coeffs(vec![q(-1, 2), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1)]).display("μ"), "(-1/2+μ¹⁰)");
    }

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn rational_normal_form_and_display() {
        let r = q(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(q(4, 2).to_string(), "2");
        assert_eq!("-3/2".parse::<ExactRational>().unwrap(), r);
        assert_eq!("-0.5".parse::<ExactRational>().unwrap(), q(-1, 2));
        assert!("1/0".parse::<ExactRational>().is_err());
    }

    #[test]
    fn poly_trim_and_sentinel() {
        let p = UPolynomial::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(UPolynomial::from_ints(&[0, 0]).degree(), None);
        assert!(p.minus(&p).is_zero());
    }

    #[test]
    fn poly_mu_shift() {
        // 2(2u+3) = 4u+6 -> 4(mu-1)+6 = 4mu+2
        let p = UPolynomial::from_ints(&[6, 4]);
        assert_eq!(p.to_mu(), UPolynomial::from_ints(&[2, 4]));
        assert_eq!(p.to_mu().shift(&q(1, 1)), p);
    }

    #[test]
    fn poly_div_u_rejects_remainder() {
        assert!(UPolynomial::from_ints(&[1, 1]).div_u().is_err());
        assert_eq!(UPolynomial::from_ints(&[0, 3, 2]).div_u().unwrap(), UPolynomial::from_ints(&[3, 2]));
    }

    #[test]
    fn series_products() {
        let z = QSeries::var(5, &ExactRational::zero());
        let zz = z.times(&z);
        assert_eq!(zz.coeff(2), &ExactRational::one());
        assert_eq!(zz.valuation(), Some(2));
        let one = QSeries::constant(ExactRational::one(), 5);
        let a = one.plus(&z);
        let b = one.minus(&z);
        let c = a.times(&b);
        assert_eq!(c.coeffs()[..3], [q(1, 1), q(0, 1), q(-1, 1)]);
        assert!(c.coeffs()[3..].iter().all(|x| x.0.is_zero()));
    }

    #[test]
    fn truncation_is_min_of_operands() {
        let a = QSeries::var(7, &ExactRational::zero());
        let b = QSeries::var(4, &ExactRational::zero());
        assert_eq!(a.times(&b).order(), 4);
        assert_eq!(a.plus(&b).order(), 4);
    }

    #[test]
    fn compose_small() {
        let zero = ExactRational::zero();
        let inner = QSeries::new(vec![q(0, 1), q(1, 1), q(1, 1)], 6, &zero);
        let outer = vec![q(0, 1), q(0, 1), q(1, 1)];
        let c = inner.compose_into(&outer).unwrap();
        assert_eq!(c.coeffs()[..5], [q(0, 1), q(0, 1), q(1, 1), q(2, 1), q(1, 1)]);
        let id = vec![q(0, 1), q(1, 1)];
        assert_eq!(inner.compose_into(&id).unwrap(), inner);
        let bad = QSeries::constant(q(1, 1), 3);
        assert!(matches!(bad.compose_into(&outer), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn calculus() {
        let zero = ExactRational::zero();
        let z3 = QSeries::new(vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)], 5, &zero);
        let d = z3.derivative();
        assert_eq!(d.coeff(2), &q(3, 1));
        assert_eq!(d.order(), 4);
        let s = QSeries::new(vec![q(0, 1), q(0, 1), q(6, 1)], 4, &zero);
        let i = s.integral();
        assert_eq!(i.coeff(3), &q(2, 1));
        assert_eq!(i.order(), 5);
        assert_eq!(i.derivative(), s);
    }

    #[test]
    fn inverse_of_one_minus_z() {
        let zero = ExactRational::zero();
        let s = QSeries::new(vec![q(1, 1), q(-1, 1)], 6, &zero);
        let inv = s.inverse().unwrap();
        assert!(inv.coeffs().iter().all(|c| *c == q(1, 1)));
    }

    #[test]
    fn dual_numbers_differentiate() {
        // d/du (u^3) at u=2 is 12
        let u = Dual::new(q(2, 1), q(1, 1));
        let c = u.times(&u).times(&u);
        assert_eq!(c.re, q(8, 1));
        assert_eq!(c.eps, q(12, 1));
        let i = u.inv();
        assert_eq!(i.eps, q(-1, 4));
    }

    #[test]
    fn bivariate_compose_matches_expansion() {
        // f(x,y) = x^2 + 3xy + y^2 at x = z, y = z + z^2
        let mut f = BiSeries::zero(6);
        f.set(2, 0, q(1, 1));
        f.set(1, 1, q(3, 1));
        f.set(0, 2, q(1, 1));
        let zero = ExactRational::zero();
        let r = QSeries::var(6, &zero);
        let s = QSeries::new(vec![q(0, 1), q(1, 1), q(1, 1)], 6, &zero);
        let c = f.compose(&r, &s).unwrap();
        // z^2 + 3z^2 + 3z^3 + z^2 + 2z^3 + z^4 = 5z^2 + 5z^3 + z^4
        assert_eq!(c.coeffs()[..5], [q(0, 1), q(0, 1), q(5, 1), q(5, 1), q(1, 1)]);
    }

    #[test]
    fn series_json_shape() {
        let s = ZSeries::new(vec![UPolynomial::zero(), UPolynomial::from_ints(&[1, -2])], 2, &UPolynomial::zero());
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"order":2,"coeffs":[[],["1","-2"],[]]}"#);
        let back: ZSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
