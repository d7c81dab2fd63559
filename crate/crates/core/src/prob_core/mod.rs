//! Distributions, channels, joints, entropies, divergences, products and types.

mod dist;
mod measures;
mod product;
mod types;

pub use dist::{Channel, Dist, JointDist, PROB_TOL};
pub use measures::{
    arimoto_renyi_conditional, chernoff_information, entropy, information_measures, kl_divergence,
    renyi_entropy, tv_distance, InformationMeasures,
};
pub use product::{channel_power, power_labels, product_power};
pub use types::{enumerate_types, overlap_product_exact, tv_product_exact, type_count, TypeComposition, TYPE_CAP};

pub(crate) use dist::clean;
pub(crate) use measures::{arimoto_nats, log_sum_exp, renyi_nats, tv_vec};
pub(crate) use product::{decode_index, power_vec};
