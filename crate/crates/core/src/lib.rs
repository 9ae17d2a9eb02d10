//! Exact certification of entanglement structure and nonlocality properties
//! of finite multipartite state sets.
//!
//! The library works over the Gaussian rationals end to end: reduced feature
//! matrix ranks, product-forming quadratic systems, reduced Groebner bases,
//! and elimination to univariate generators are all exact. A thin floating
//! layer handles root finding and spectra where the certificates only need
//! bounded-error numerics.

pub mod certify;
pub mod error;
pub mod exact;
pub mod family;
pub mod feature;
pub mod groebner;
pub mod io;
pub mod matrix;
pub mod numeric;
pub mod poly;
pub mod product;
pub mod state;

pub use error::{Error, Result};
pub use exact::{GaussianRational, Rational};
pub use state::{Bipartition, PartySpec, PureState, StateSet};
