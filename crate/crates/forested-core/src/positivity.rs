//! `(u+1)`-positivity tables: series re-expressed in `μ = u + 1`.

use serde::Serialize;

use crate::error::Result;
use crate::exact::{Ring, Series, UPolynomial, ZSeries};
use crate::solver::{mu_expansion, solve, UMode};
use crate::trees::build_phi_theta;

#[derive(Clone, Debug)]
pub struct MuTable {
    pub name: &'static str,
    /// Coefficients in `μ`.
    pub series: ZSeries,
}

impl MuTable {
    pub fn nonnegative(&self) -> bool {
        self.series.coeffs().iter().all(UPolynomial::is_nonnegative)
    }
    pub fn rows(&self) -> Vec<MuRow> {
        self.series
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| MuRow {
                series: self.name,
                n,
                mu_poly: c.display("μ"),
                coefficients: c.coeffs().iter().map(|x| x.to_string()).collect(),
                nonnegative: c.is_nonnegative(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MuRow {
    pub series: &'static str,
    pub n: usize,
    pub mu_poly: String,
    pub coefficients: Vec<String>,
    pub nonnegative: bool,
}

/// `ū(R-z)`, `ūS`, `ūS̃`, `F` and, for p = 3, `∂Φ₂/∂y(z, S̃)`, all in `μ`.
pub fn mu_tables(p: usize, order: usize) -> Result<Vec<MuTable>> {
    let out = solve(p, order, &UMode::Symbolic)?;
    let z = Series::var(order, &UPolynomial::zero());
    let mut tables = vec![
        MuTable { name: "R-z over u", series: mu_expansion(&out.r.minus(&z), true)? },
        MuTable { name: "S over u", series: mu_expansion(&out.s, true)? },
        MuTable { name: "S~ over u", series: mu_expansion(&out.s_tilde, true)? },
        MuTable { name: "F", series: mu_expansion(&out.f, false)? },
    ];
    if p == 3 {
        let pt = build_phi_theta(3, order);
        let d = pt.phi2.dy().compose(&z, &out.s_tilde)?;
        tables.push(MuTable { name: "dPhi2/dy at (z, S~)", series: mu_expansion(&d, false)? });
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(cs: &[i64]) -> UPolynomial {
        UPolynomial::from_ints(cs)
    }

    #[test]
    fn printed_cubic_terms() {
        let t = mu_tables(3, 4).unwrap();
        let c = |i: usize, n: usize| t[i].series.coeffs()[n].clone();
        assert_eq!(c(0, 2), up(&[2, 4]));
        assert_eq!(c(0, 3), up(&[16, 36, 48, 40]));
        assert_eq!(c(1, 1), up(&[2]));
        assert_eq!(c(1, 2), up(&[6, 12, 12]));
        assert_eq!(c(1, 3), up(&[72, 176, 240, 224, 128]));
        assert_eq!(c(2, 2), up(&[10, 16, 4]));
        assert_eq!(c(2, 3), up(&[144, 320, 264, 96, 16]));
        assert!(t.iter().all(MuTable::nonnegative));
    }
}
