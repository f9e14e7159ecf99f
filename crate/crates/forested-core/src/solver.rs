//! Order-by-order solution of `R = z + uΦ₁(R,S)`, `S = uΦ₂(R,S)` and
//! assembly of the series F, G, H.

use crate::error::{Error, Result};
use crate::exact::{BiSeries, ExactRational, Ring, Series, UPolynomial, ZSeries};
use crate::trees::{build_phi_theta, g_sum, h_sum, Factorials, PhiTheta};

/// Largest order accepted with `u` kept symbolic.
pub const MAX_SYMBOLIC_ORDER: usize = 60;

/// How the variable `u` is treated.
#[derive(Clone, Debug, PartialEq)]
pub enum UMode {
    Symbolic,
    Specialized(ExactRational),
}

impl UMode {
    pub fn check_order(&self, order: usize) -> Result<()> {
        if matches!(self, UMode::Symbolic) && order > MAX_SYMBOLIC_ORDER {
            return Err(Error::Refused(format!(
                "order {order} with symbolic u exceeds {MAX_SYMBOLIC_ORDER}; specialize u"
            )));
        }
        Ok(())
    }
    /// The value of `u` as a constant polynomial or the variable itself.
    pub fn as_poly(&self) -> UPolynomial {
        match self {
            UMode::Symbolic => UPolynomial::u(),
            UMode::Specialized(r) => UPolynomial::constant(r.clone()),
        }
    }
}

/// Running table of `[z^n] X^i` for a series `X` with `X(0) = 0`.
struct Powers<C> {
    p: Vec<Vec<C>>,
}

impl<C: Ring> Powers<C> {
    fn new(order: usize, proto: &C) -> Self {
        let mut p = vec![vec![proto.zero_like(); order + 1]; order + 1];
        p[0][0] = proto.one_like();
        Powers { p }
    }
    /// Fill `[z^n] X^i` for `i >= 2`; these do not depend on `x_n`.
    fn advance(&mut self, n: usize) {
        for i in 2..=n.min(self.p.len() - 1) {
            let mut acc = self.p[0][0].zero_like();
            for k in 1..n {
                let (a, b) = (&self.p[1][k], &self.p[i - 1][n - k]);
                if !a.is_zero() && !b.is_zero() {
                    acc.add_mul(a, b);
                }
            }
            self.p[i][n] = acc;
        }
    }
    fn set_linear(&mut self, n: usize, x: C) {
        self.p[1][n] = x;
    }
}

/// Partial sums `A_j = Σ_i c_ij X^i` of a bivariate series, kept coefficientwise.
struct Columns<C> {
    a: Vec<Vec<C>>,
    cs: Vec<Vec<(usize, C)>>,
}

impl<C: Ring> Columns<C> {
    fn new(b: &BiSeries, order: usize, jmax: usize, proto: &C) -> Self {
        let cs: Vec<Vec<(usize, C)>> = (0..=jmax)
            .map(|j| {
                (0..=order - j)
                    .filter(|&i| !b.coeff_ref(i, j).is_zero())
                    .map(|i| (i, proto.from_rational_like(b.coeff_ref(i, j))))
                    .collect()
            })
            .collect();
        let mut a = vec![vec![proto.zero_like(); order + 1]; jmax + 1];
        for (j, col) in cs.iter().enumerate() {
            if let Some((0, c)) = col.first() {
                a[j][0] = c.clone();
            }
        }
        Columns { a, cs }
    }
    fn update(&mut self, n: usize, rp: &Powers<C>) {
        for (j, col) in self.cs.iter().enumerate() {
            let mut acc = rp.p[0][0].zero_like();
            for (i, c) in col {
                if *i >= 1 && *i <= n {
                    acc.add_mul(c, &rp.p[*i][n]);
                }
            }
            self.a[j][n] = acc;
        }
    }
    /// `[z^n] Σ_j A_j S^j`, given `A_0` at index `n` in `a0n`.
    fn coeff(&self, n: usize, a0n: &C, sp: &Powers<C>) -> C {
        let mut acc = a0n.clone();
        for j in 1..self.a.len() {
            for a in 0..n {
                let (x, y) = (&self.a[j][a], &sp.p[j][n - a]);
                if !x.is_zero() && !y.is_zero() {
                    acc.add_mul(x, y);
                }
            }
        }
        acc
    }
    fn a0_at(&self, n: usize, rp: &Powers<C>) -> C {
        let mut acc = rp.p[0][0].zero_like();
        for (i, c) in &self.cs[0] {
            if *i >= 1 && *i <= n {
                acc.add_mul(c, &rp.p[*i][n]);
            }
        }
        acc
    }
}

/// Solve the pair of implicit equations in any coefficient ring.
///
/// With `fixed_r`, `R` is pinned to `z` and only `S` is solved; this yields
/// `S̃ = uΦ₂(z, S̃)`.
pub fn solve_pair<C: Ring>(pt: &PhiTheta, u: &C, order: usize, fixed_r: bool) -> (Series<C>, Series<C>) {
    let order = order.min(pt.order);
    let jmax = if pt.p % 2 == 0 { 0 } else { order };
    let mut rp = Powers::new(order, u);
    let mut sp = Powers::new(order, u);
    let mut c1 = Columns::new(&pt.phi1, order, jmax, u);
    let mut c2 = Columns::new(&pt.phi2, order, jmax, u);
    debug_assert!(pt.phi1.get(1, 0).is_zero() && pt.phi2.get(0, 1).is_zero());
    for n in 1..=order {
        rp.advance(n);
        sp.advance(n);
        let r_n = if fixed_r || n == 1 {
            if n == 1 {
                u.one_like()
            } else {
                u.zero_like()
            }
        } else {
            let a0 = c1.a0_at(n, &rp);
            u.times(&c1.coeff(n, &a0, &sp))
        };
        rp.set_linear(n, r_n);
        c1.update(n, &rp);
        c2.update(n, &rp);
        let s_n = if jmax == 0 { u.zero_like() } else { u.times(&c2.coeff(n, &c2.a[0][n].clone(), &sp)) };
        sp.set_linear(n, s_n);
    }
    let r = Series::new(rp.p[1].clone(), order, u);
    let s = Series::new(sp.p[1].clone(), order, u);
    (r, s)
}

/// Reference solver: plain fixed-point iteration, one sweep per order.
pub fn solve_pair_naive<C: Ring>(pt: &PhiTheta, u: &C, order: usize) -> (Series<C>, Series<C>) {
    let z = Series::var(order, u);
    let mut r = Series::zero(order, u);
    let mut s = Series::zero(order, u);
    for _ in 0..order {
        let nr = z.plus(&pt.phi1.compose(&r, &s).expect("valuation").mul_coeff(u));
        s = pt.phi2.compose(&nr, &s).expect("valuation").mul_coeff(u);
        r = nr;
    }
    (r, s)
}

/// Everything the solver produces for one valency.
#[derive(Clone, Debug)]
pub struct SolverOutput<C> {
    pub p: usize,
    pub order: usize,
    pub r: Series<C>,
    pub s: Series<C>,
    pub s_tilde: Series<C>,
    pub f: Series<C>,
    pub fprime: Series<C>,
    /// Quasi-p-valent maps; only for `p = 3`.
    pub g: Option<Series<C>>,
    pub h: Series<C>,
}

/// Solve and assemble all series in a generic coefficient ring.
pub fn solve_all<C: Ring>(p: usize, u: &C, order: usize) -> Result<SolverOutput<C>> {
    if p < 3 {
        return Err(Error::Invalid("p must be at least 3".into()));
    }
    if order < 3 {
        return Err(Error::InsufficientOrder { needed: 3, have: order });
    }
    let pt = build_phi_theta(p, order);
    let (r, s) = solve_pair(&pt, u, order, false);
    let (_, s_tilde) = solve_pair(&pt, u, order, true);
    let fprime = pt.theta.compose(&r, &s)?;
    let f = fprime.integral().truncate(order);
    let z = Series::var(order, u);
    let phi1_rs = pt.phi1.compose(&r, &s)?;
    let phi2_rs = pt.phi2.compose(&r, &s)?;
    let gs = g_sum(p, order).compose(&r, &s)?;
    let hs = h_sum(p, order).compose(&r, &s)?;
    // (R - z)/u = Φ₁(R,S) and S/u = Φ₂(R,S), so no division by u is needed.
    let h = z
        .times(&phi1_rs)
        .plus(&z.times(&s).times(&phi2_rs))
        .minus(&s.times(&gs).scale(&ExactRational::from(2)))
        .minus(&hs);
    let g = if p == 3 {
        let u1 = u.plus(&u.one_like());
        Some(z.times(&phi2_rs).minus(&gs).mul_coeff(&u1))
    } else {
        None
    };
    Ok(SolverOutput { p, order, r, s, s_tilde, f, fprime, g, h })
}

/// Solve with `u` symbolic or specialized; results are polynomial in `u`.
pub fn solve(p: usize, order: usize, mode: &UMode) -> Result<SolverOutput<UPolynomial>> {
    mode.check_order(order)?;
    solve_all(p, &mode.as_poly(), order)
}

/// Solve with `u` a rational; results have rational coefficients.
pub fn solve_specialized(p: usize, order: usize, u: &ExactRational) -> Result<SolverOutput<ExactRational>> {
    solve_all(p, u, order)
}

/// Univariate route for even `p`: `R = z + uΦ(R)`, `F' = θ(R)`.
pub fn solve_univariate<C: Ring>(p: usize, u: &C, order: usize) -> Result<(Series<C>, Series<C>)> {
    if p % 2 != 0 {
        return Err(Error::Invalid("the univariate system needs even p".into()));
    }
    let pt = build_phi_theta(p, order);
    let phi: Vec<C> = pt.phi_x.as_ref().expect("even p").iter().map(|c| u.from_rational_like(c)).collect();
    let theta: Vec<C> = pt.theta_x.as_ref().expect("even p").iter().map(|c| u.from_rational_like(c)).collect();
    let z = Series::var(order, u);
    let mut r = z.clone();
    for _ in 0..order {
        r = z.plus(&r.compose_into(&phi)?.mul_coeff(u));
    }
    let fprime = r.compose_into(&theta)?;
    Ok((r, fprime))
}

/// `F = Ψ(R)` for `p = 4`, where
/// `Ψ(x) = 4Σ_{i≥2} c_i x^{i+1}/(i+1) - 4u Σ_{i≥2,j≥1} c_i (3j)!/j!³ x^{i+j+1}/(i+j+1)`
/// and `c_i = (3i-3)!/((i-2)! i!²)`.
pub fn f_explicit_4valent<C: Ring>(u: &C, order: usize) -> Result<Series<C>> {
    let mut f = Factorials::new(3 * order + 3);
    let ci = |f: &mut Factorials, i: usize| {
        ExactRational::new(f.get(3 * i - 3).clone(), f.get(i - 2).clone() * f.get(i) * f.get(i))
    };
    let mut first = vec![ExactRational::zero(); order + 1];
    let mut second = vec![ExactRational::zero(); order + 1];
    for i in 2..order {
        let c = &ci(&mut f, i) * &ExactRational::from(4);
        first[i + 1] = &c * &ExactRational::new(1, i as i64 + 1);
        for j in 1..order - i {
            let dj = ExactRational::new(f.get(3 * j).clone(), f.get(j).clone() * f.get(j) * f.get(j));
            let k = i + j + 1;
            second[k] = &second[k] + &(&(&c * &dj) * &ExactRational::new(1, k as i64));
        }
    }
    let psi: Vec<C> = first
        .iter()
        .zip(&second)
        .map(|(a, b)| u.from_rational_like(a).minus(&u.from_rational_like(b).times(u)))
        .collect();
    let pt = build_phi_theta(4, order);
    let (r, _) = solve_pair(&pt, u, order, false);
    r.compose_into(&psi)
}

/// Coefficients of `ū·X` re-expressed in `μ = u + 1`.
pub fn mu_expansion(s: &ZSeries, divide_by_u: bool) -> Result<ZSeries> {
    let s = if divide_by_u { s.div_u()? } else { s.clone() };
    Ok(s.to_mu())
}

/// `[z^n]` of a series evaluated through the u-polynomial, for display.
pub fn coefficient_table(s: &ZSeries) -> Vec<(usize, UPolynomial)> {
    s.coeffs().iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(cs: &[i64]) -> UPolynomial {
        UPolynomial::from_ints(cs)
    }

    #[test]
    fn four_valent_r_low_order() {
        let out = solve(4, 3, &UMode::Symbolic).unwrap();
        assert_eq!(out.r.coeffs(), &[up(&[]), up(&[1]), up(&[0, 3]), up(&[0, 30, 18])]);
        assert!(out.s.is_zero());
        assert!(out.s_tilde.is_zero());
    }

    #[test]
    fn cubic_r_low_order() {
        let out = solve(3, 3, &UMode::Symbolic).unwrap();
        assert_eq!(out.r.coeff(2), &up(&[0, 6, 4]));
        assert_eq!(out.r.coeff(3), &up(&[0, 140, 252, 168, 40]));
    }

    #[test]
    fn cubic_f_low_order() {
        let out = solve(3, 4, &UMode::Symbolic).unwrap();
        assert_eq!(out.f.coeff(3), &up(&[6, 4]));
        assert_eq!(out.f.coeff(4), &up(&[140, 234, 144, 32]));
        assert!(out.f.coeff(0).is_zero());
    }

    #[test]
    fn u_zero_gives_trivial_r() {
        for p in 3..=6 {
            let out = solve(p, 8, &UMode::Specialized(ExactRational::zero())).unwrap();
            assert_eq!(out.r, Series::var(8, &UPolynomial::zero()));
            assert!(out.s.is_zero());
        }
    }

    #[test]
    fn incremental_matches_naive() {
        for p in 3..=5 {
            let pt = build_phi_theta(p, 7);
            let u = UPolynomial::u();
            assert_eq!(solve_pair(&pt, &u, 7, false), solve_pair_naive(&pt, &u, 7));
        }
    }

    #[test]
    fn s_tilde_leading_term() {
        let out = solve(3, 3, &UMode::Symbolic).unwrap();
        assert_eq!(out.s_tilde.coeff(1), &up(&[0, 2]));
        let mu = mu_expansion(&out.s_tilde, true).unwrap();
        assert_eq!(mu.coeff(2), &up(&[10, 16, 4]));
    }

    #[test]
    fn explicit_four_valent_matches() {
        let u = UPolynomial::u();
        let out = solve_all(4, &u, 8).unwrap();
        assert_eq!(f_explicit_4valent(&u, 8).unwrap(), out.f);
        let (r, fp) = solve_univariate(4, &u, 8).unwrap();
        assert_eq!(r, out.r);
        assert_eq!(fp, out.fprime);
    }

    #[test]
    fn symbolic_order_guard() {
        assert!(matches!(solve(3, 61, &UMode::Symbolic), Err(Error::Refused(_))));
    }
}
