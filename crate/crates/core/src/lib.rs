//! Pricing of single-name CDS options, recovery swaps and options, and CDS
//! index options.
//!
//! Single-name options are priced with lognormal par-spread dynamics in the
//! survival measure (Black-76 for the all-running case, a change of numeraire
//! plus Gaussian quadrature when the strike is partly or wholly upfront).
//! Index options are priced as options on the fully-funded protection PV,
//! which keeps the formula well-defined when every name in the index has
//! defaulted.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod black;
pub mod copula;
pub mod curves;
pub mod error;
pub mod index;
pub mod numerics;
pub mod recovery;
pub mod single_name;
pub mod types;
pub mod validation;

pub use curves::{year_fraction, CreditCurve, YearFraction};

pub use error::{Error, Result};
pub use numerics::{Bracket, QuadratureRule, Scheme};
pub use recovery::{RecoveryOptionKind, RecoveryParams, RecoveryQuote};

pub use types::{PriceResult, Side, Vol};

/// One basis point as a decimal.
pub const BP: f64 = 1e-4;
