//! Applications: feasible-input polytopes and exact resolvability, common
//! information and constrained capacity, stealth-secrecy bounds, second-order
//! calculators and one-shot soft-covering bounds.

mod common;
mod feasible;
mod oneshot;
mod polytope;
mod second_order;
mod stealth;

pub use common::{
    capacity_with_input_constraint, conditional_maximal_correlation, gk_common_information, maximal_correlation,
    sufficient_statistic_detect, CapacityReport, ConditionalJoint, GkReport, SufficientStatistic,
};
pub use feasible::{exact_resolvability, feasible_input_set, ExactResolvability, FeasibleInputSet, FEASIBLE_VERTEX_CAP};
pub use oneshot::{
    monte_carlo_softcover, oneshot_resolvability_bounds, IdentityCase, MonteCarloReport, OneShotBounds, OneShotSetup,
    SOFTCOVER_TAUS,
};
pub use second_order::{mu_epsilon, second_order_rate, MuEpsilon, RateDirection};
pub use stealth::{pz_redundancy_check, stealth_capacity_bounds, FullRankExact, RedundancyReport, StealthBounds};

/// I(X;Y) in nats for input `p` through channel rows W(·|x).
pub(crate) fn mutual_information_nats(p: &[f64], rows: &[Vec<f64>]) -> f64 {
    let ny = rows.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; ny];
    for (&px, row) in p.iter().zip(rows) {
        for (o, &w) in out.iter_mut().zip(row) {
            *o += px * w;
        }
    }
    let hy = crate::numeric::entropy_nats(&out);
    let hyx: f64 = p.iter().zip(rows).filter(|(&px, _)| px > 0.0).map(|(&px, r)| px * crate::numeric::entropy_nats(r)).sum();
    (hy - hyx).max(0.0)
}
