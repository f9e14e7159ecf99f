//! Generating functions of p-valent planar maps carrying spanning forests:
//! exact series, brute-force oracles, differential-equation checks and
//! high-precision singularity numerics.

pub mod error;
pub mod dever;
pub mod exact;
pub mod hyper;
pub mod numerics;
pub mod oracle;
pub mod positivity;
pub mod random;
pub mod real;
pub mod recur;
pub mod solver;
pub mod trees;

pub use error::{Error, Result};
pub use exact::{BiSeries, Dual, ExactRational, Field, QSeries, Ring, Series, UPolynomial, ZSeries};
