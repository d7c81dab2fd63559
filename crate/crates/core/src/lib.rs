//! Optimal couplings of finite discrete distributions.
//!
//! The crate is organised bottom-up:
//!
//! - [`prob_core`]: distributions, channels, joints, entropies, divergences and types.
//! - [`coupling_lp`]: the transportation-polytope engine (min-cost, maximal,
//!   excess-distance and minimum-entropy couplings, vertex enumeration).
//! - [`guessing`]: maximal guessing couplings through distribution approximation.
//! - [`asymptotics`]: exponent solvers and product-space constructions.
//! - [`channels_apps`]: resolvability, common information, stealth bounds and
//!   one-shot soft covering.
//!
//! Entropic quantities are computed in nats and converted through [`Base`] at
//! the boundary. Infinite values are plain `f64::INFINITY` and serialize as the
//! string `"inf"`.

pub mod asymptotics;
pub mod channels_apps;
pub mod coupling_lp;
pub mod guessing;
pub mod io;
pub mod prob_core;

mod error;
mod linalg;
mod lp;
mod numeric;
mod units;

pub use error::{Error, Result};
pub use numeric::{normal_cdf, normal_quantile_upper};
pub use units::{serde_inf, Base};

/// Default cap on the number of atoms materialized for product alphabets.
pub const DEFAULT_ATOM_CAP: usize = 1 << 22;
