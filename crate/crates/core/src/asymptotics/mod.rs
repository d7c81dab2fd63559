//! Exponent solvers and product-space constructions.

mod converse;
mod fit;
mod tilt;
mod typecouple;

pub use converse::excess_exponent_converse;
pub use fit::{exponent_fit, ExponentFit, ExponentSeries, SeriesTransform};
pub use tilt::{cramer_tilt_exponent, min_max_kl, CramerReport, MinMaxKl, TiltSide};
pub use typecouple::{type_coupling_excess, TypeCouplingReport};
