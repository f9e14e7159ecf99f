//! Counts of p-valent plane trees and the tree series built from them.

use num_bigint::BigInt;
use num_traits::One;

use crate::exact::{BiSeries, ExactRational};

/// How a tree is rooted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rooting {
    Leaf,
    Corner,
}

/// Memoized table of `n!`.
#[derive(Clone, Debug)]
pub struct Factorials {
    f: Vec<BigInt>,
}

impl Factorials {
    pub fn new(n: usize) -> Self {
        let mut f = Vec::with_capacity(n + 1);
        f.push(BigInt::one());
        for k in 1..=n {
            let next = &f[k - 1] * BigInt::from(k);
            f.push(next);
        }
        Factorials { f }
    }
    pub fn get(&mut self, n: usize) -> &BigInt {
        while self.f.len() <= n {
            let k = self.f.len();
            let next = &self.f[k - 1] * BigInt::from(k);
            self.f.push(next);
        }
        &self.f[n]
    }
    /// `n! / (a! b! c!)` when `a + b + c = n`; zero if any part is negative.
    pub fn trinomial(&mut self, a: i64, b: i64, c: i64) -> BigInt {
        if a < 0 || b < 0 || c < 0 {
            return BigInt::from(0);
        }
        let n = (a + b + c) as usize;
        let num = self.get(n).clone();
        let den = self.get(a as usize).clone() * self.get(b as usize) * self.get(c as usize);
        num / den
    }
}

/// `Some(ℓ)` when `k = (p-2)ℓ + 2` with `ℓ >= 1`.
fn ell_of(p: usize, k: usize) -> Option<usize> {
    if k < 2 || (k - 2) % (p - 2) != 0 {
        return None;
    }
    let l = (k - 2) / (p - 2);
    (l >= 1).then_some(l)
}

fn tree_count_with(f: &mut Factorials, p: usize, k: usize, kind: Rooting) -> BigInt {
    let Some(l) = ell_of(p, k) else { return BigInt::from(0) };
    match kind {
        Rooting::Leaf => f.get((p - 1) * l).clone() / (f.get(l).clone() * f.get((p - 2) * l + 1)),
        Rooting::Corner => {
            BigInt::from(p) * f.get((p - 1) * l).clone() / (f.get(l - 1).clone() * f.get((p - 2) * l + 2))
        }
    }
}

/// Number of p-valent plane trees with `k` leaves, rooted at a leaf or a corner.
pub fn tree_count(p: usize, k: usize, kind: Rooting) -> ExactRational {
    assert!(p >= 3, "p must be at least 3");
    let mut f = Factorials::new(p * k + 2);
    ExactRational::from_bigint(tree_count_with(&mut f, p, k, kind))
}

/// Table of `t_k` and `t^c_k` for `k <= kmax`.
#[derive(Clone, Debug)]
pub struct TreeCountTable {
    pub p: usize,
    pub t: Vec<BigInt>,
    pub tc: Vec<BigInt>,
}

impl TreeCountTable {
    pub fn new(p: usize, kmax: usize) -> Self {
        assert!(p >= 3, "p must be at least 3");
        let mut f = Factorials::new(p * kmax + 2);
        let t = (0..=kmax).map(|k| tree_count_with(&mut f, p, k, Rooting::Leaf)).collect();
        let tc = (0..=kmax).map(|k| tree_count_with(&mut f, p, k, Rooting::Corner)).collect();
        TreeCountTable { p, t, tc }
    }
    /// `t_k`, zero for negative or out-of-range `k`.
    pub fn t(&self, k: i64) -> BigInt {
        if k < 0 {
            return BigInt::from(0);
        }
        self.t.get(k as usize).cloned().unwrap_or_default()
    }
    pub fn tc(&self, k: i64) -> BigInt {
        if k < 0 {
            return BigInt::from(0);
        }
        self.tc.get(k as usize).cloned().unwrap_or_default()
    }
}

/// The truncated tree series for a given valency.
#[derive(Clone, Debug)]
pub struct PhiTheta {
    pub p: usize,
    pub order: usize,
    pub theta: BiSeries,
    pub phi1: BiSeries,
    pub phi2: BiSeries,
    /// `θ(x, 0)`, used when `p` is even.
    pub theta_x: Option<Vec<ExactRational>>,
    /// `Φ₁(x, 0)`, used when `p` is even.
    pub phi_x: Option<Vec<ExactRational>>,
}

/// Build θ, Φ₁, Φ₂ keeping monomials `x^i y^j` with `i + j <= order`.
pub fn build_phi_theta(p: usize, order: usize) -> PhiTheta {
    let kmax = 2 * order + 2;
    let tab = TreeCountTable::new(p, kmax);
    let mut f = Factorials::new(2 * kmax);
    let (i_, j_) = (|i: usize| i as i64, |j: usize| j as i64);
    let theta = BiSeries::from_fn(order, |i, j| {
        let (i, j) = (i_(i), j_(j));
        ExactRational::from_bigint(tab.tc(2 * i + j) * f.trinomial(i, i, j))
    });
    let phi1 = BiSeries::from_fn(order, |i, j| {
        let (i, j) = (i_(i), j_(j));
        if i < 1 {
            return ExactRational::zero();
        }
        ExactRational::from_bigint(tab.t(2 * i + j) * f.trinomial(i - 1, i, j))
    });
    let phi2 = BiSeries::from_fn(order, |i, j| {
        let (i, j) = (i_(i), j_(j));
        ExactRational::from_bigint(tab.t(2 * i + j + 1) * f.trinomial(i, i, j))
    });
    let (theta_x, phi_x) = if p % 2 == 0 { (Some(theta.at_y0()), Some(phi1.at_y0())) } else { (None, None) };
    PhiTheta { p, order, theta, phi1, phi2, theta_x, phi_x }
}

/// `Σ_{i≥2} t_{2i+j-1} (2i+j-2)!/((i-2)! i! j!) x^i y^j`.
pub fn g_sum(p: usize, order: usize) -> BiSeries {
    let tab = TreeCountTable::new(p, 2 * order + 2);
    let mut f = Factorials::new(4 * order + 4);
    BiSeries::from_fn(order, |i, j| {
        let (i, j) = (i as i64, j as i64);
        if i < 2 {
            return ExactRational::zero();
        }
        ExactRational::from_bigint(tab.t(2 * i + j - 1) * f.trinomial(i - 2, i, j))
    })
}

/// `Σ_{i≥3} t_{2i+j-2} (2i+j-3)!/((i-3)! i! j!) x^i y^j`.
pub fn h_sum(p: usize, order: usize) -> BiSeries {
    let tab = TreeCountTable::new(p, 2 * order + 2);
    let mut f = Factorials::new(4 * order + 4);
    BiSeries::from_fn(order, |i, j| {
        let (i, j) = (i as i64, j as i64);
        if i < 3 {
            return ExactRational::zero();
        }
        ExactRational::from_bigint(tab.t(2 * i + j - 2) * f.trinomial(i - 3, i, j))
    })
}

/// The univariate hypergeometric pair attached to cubic maps.
#[derive(Clone, Debug)]
pub struct Psi {
    pub psi1: Vec<ExactRational>,
    pub psi2: Vec<ExactRational>,
}

/// Coefficients of `Ψ₁` and `Ψ₂` through `z^order`.
pub fn build_psi(order: usize) -> Psi {
    let mut f = Factorials::new(4 * order + 2);
    let mut psi1 = vec![ExactRational::zero(); order + 1];
    let mut psi2 = vec![ExactRational::zero(); order + 1];
    for i in 1..=order {
        let n1 = f.get(4 * i - 4).clone();
        let d1 = f.get(2 * i - 2).clone() * f.get(i) * f.get(i - 1);
        psi1[i] = ExactRational::new(n1, d1);
        let n2 = f.get(4 * i - 2).clone();
        let d2 = f.get(2 * i - 1).clone() * f.get(i) * f.get(i);
        psi2[i] = ExactRational::new(n2, d2);
    }
    Psi { psi1, psi2 }
}

/// `Λ(x) = Σ_{i≥3} (3i-6)!/((i-3)!(i-2)! i!) x^i`.
pub fn build_lambda(order: usize) -> Vec<ExactRational> {
    let mut f = Factorials::new(3 * order + 2);
    (0..=order)
        .map(|i| {
            if i < 3 {
                return ExactRational::zero();
            }
            let n = f.get(3 * i - 6).clone();
            let d = f.get(i - 3).clone() * f.get(i - 2) * f.get(i);
            ExactRational::new(n, d)
        })
        .collect()
}

/// Coefficient of `z^n` in the generating function of p-valent maps with a
/// spanning tree (Mullin's formula).
pub fn spanning_tree_count(p: usize, n: usize) -> ExactRational {
    // n = 2 + (p-2)ℓ/2
    if n < 2 || (2 * (n - 2)) % (p - 2) != 0 {
        return ExactRational::zero();
    }
    let l = 2 * (n - 2) / (p - 2);
    if l < 1 || (p % 2 == 1 && l % 2 == 1) {
        return ExactRational::zero();
    }
    let h = (p - 2) * l / 2;
    let mut f = Factorials::new((p - 1) * l + 2);
    let num = BigInt::from(p) * f.get((p - 1) * l).clone();
    let den = f.get(l - 1).clone() * f.get(1 + h) * f.get(2 + h);
    ExactRational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> ExactRational {
        ExactRational::from(n)
    }

    #[test]
    fn small_counts() {
        assert_eq!(tree_count(3, 3, Rooting::Leaf), int(1));
        assert_eq!(tree_count(3, 4, Rooting::Leaf), int(2));
        assert_eq!(tree_count(4, 3, Rooting::Leaf), int(0));
        assert_eq!(tree_count(3, 2, Rooting::Leaf), int(0));
        assert_eq!(tree_count(4, 4, Rooting::Corner), int(1));
        assert_eq!(tree_count(3, 4, Rooting::Corner), int(3));
    }

    #[test]
    fn four_valent_phi_theta() {
        let pt = build_phi_theta(4, 6);
        let phi = pt.phi_x.unwrap();
        let theta = pt.theta_x.unwrap();
        assert_eq!(phi[..5], [int(0), int(0), int(3), int(30), int(420)]);
        assert_eq!(theta[..4], [int(0), int(0), int(6), int(80)]);
        assert!(pt.phi2.at_y0().iter().all(|c| *c == int(0)));
        assert!(!pt.phi2.is_zero());
    }

    #[test]
    fn psi_leading_terms() {
        let psi = build_psi(4);
        assert_eq!(psi.psi1[1], int(1));
        assert_eq!(psi.psi1[2], int(6));
        assert_eq!(psi.psi2[1], int(2));
    }

    #[test]
    fn mullin_small() {
        assert_eq!(spanning_tree_count(4, 3), int(2));
        assert_eq!(spanning_tree_count(4, 4), int(20));
        assert_eq!(spanning_tree_count(3, 3), int(6));
        assert_eq!(spanning_tree_count(3, 4), int(140));
        assert_eq!(spanning_tree_count(3, 5), int(4158));
    }
}
