use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coupling_lp::transport_simplex;
use crate::prob_core::{tv_vec, Channel, Dist};
use crate::{Error, Result};

/// Source W, channel from (w, x) to the output (inputs listed w-major, i.e.
/// input index w·|X| + x), target law on the output, and the threshold τ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneShotSetup {
    pub source: Dist,
    pub channel: Channel,
    pub target: Dist,
    pub tau: f64,
}

impl OneShotSetup {
    pub fn new(source: Dist, channel: Channel, target: Dist, tau: f64) -> Result<Self> {
        let s = OneShotSetup { source, channel, target, tau };
        s.validate()?;
        Ok(s)
    }

    pub fn n_x(&self) -> usize {
        self.channel.n_inputs() / self.source.len().max(1)
    }

    fn validate(&self) -> Result<()> {
        let nw = self.source.len();
        let ni = self.channel.n_inputs();
        if nw == 0 || ni == 0 || ni % nw != 0 {
            return Err(Error::InvalidParameter(format!(
                "channel has {ni} inputs, not a multiple of the source size {nw}"
            )));
        }
        if self.target.len() != self.channel.n_outputs() {
            return Err(Error::MismatchedAlphabets);
        }
        if self.tau.is_nan() {
            return Err(Error::InvalidParameter("tau must be a number".into()));
        }
        Ok(())
    }

    fn row(&self, w: usize, x: usize) -> &[f64] {
        &self.channel.rows()[w * self.n_x() + x]
    }

    /// Output law when W is encoded by the conditional `q[w][x]`.
    fn output(&self, q: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.channel.n_outputs()];
        for (w, &pw) in self.source.probs().iter().enumerate() {
            for (x, &qx) in q[w].iter().enumerate() {
                if pw * qx > 0.0 {
                    for (o, &v) in out.iter_mut().zip(self.row(w, x)) {
                        *o += pw * qx * v;
                    }
                }
            }
        }
        out
    }

    fn output_f(&self, f: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.channel.n_outputs()];
        for (w, &pw) in self.source.probs().iter().enumerate() {
            for (o, &v) in out.iter_mut().zip(self.row(w, f[w])) {
                *o += pw * v;
            }
        }
        out
    }

    /// P(A_τ) for the conditional `q`, with P_Y its own output law.
    fn a_tau_prob(&self, q: &[Vec<f64>], tau: f64) -> f64 {
        let py = self.output(q);
        let mut total = 0.0;
        for (w, &pw) in self.source.probs().iter().enumerate() {
            for (x, &qx) in q[w].iter().enumerate() {
                for (y, &v) in self.row(w, x).iter().enumerate() {
                    let m = pw * qx * v;
                    // ties count towards A_τ: that can only raise the upper bound
                    if m > 0.0 && (pw * v / py[y]).ln() > tau - BOUNDARY_TOL {
                        total += m;
                    }
                }
            }
        }
        total
    }

    /// Indicator of B_τ at (w, x, z); ties are left out so the lower bound can only drop.
    fn in_b(&self, w: usize, x: usize, z: usize, tau: f64) -> bool {
        let pz = self.target.probs()[z];
        let m = self.source.probs()[w] * self.row(w, x)[z];
        m > 0.0 && pz > 0.0 && (m / pz).ln() > tau + BOUNDARY_TOL
    }

    fn is_identity_in_x(&self) -> bool {
        let nx = self.n_x();
        nx == self.channel.n_outputs()
            && (0..self.source.len()).all(|w| {
                (0..nx).all(|x| self.row(w, x).iter().enumerate().all(|(y, &v)| v == if y == x { 1.0 } else { 0.0 }))
            })
    }
}

const BOUNDARY_TOL: f64 = 1e-12;

/// Deterministic encoders are enumerated exhaustively up to this many.
pub const EXHAUSTIVE_F_CAP: usize = 4096;
const RESTARTS: u64 = 5;

fn function_count(nx: usize, nw: usize) -> Option<usize> {
    let mut total = 1usize;
    for _ in 0..nw {
        total = total.checked_mul(nx)?;
        if total > EXHAUSTIVE_F_CAP {
            return None;
        }
    }
    Some(total)
}

fn for_each_function(nx: usize, nw: usize, mut visit: impl FnMut(&[usize])) {
    let mut f = vec![0usize; nw];
    loop {
        visit(&f);
        let mut i = 0;
        while i < nw {
            f[i] += 1;
            if f[i] < nx {
                break;
            }
            f[i] = 0;
            i += 1;
        }
        if i == nw {
            return;
        }
    }
}

fn as_conditional(f: &[usize], nx: usize) -> Vec<Vec<f64>> {
    f.iter().map(|&x| (0..nx).map(|k| if k == x { 1.0 } else { 0.0 }).collect()).collect()
}

/// Coordinate descent over encoders from several random starts; returns the best objective.
fn local_search(nx: usize, nw: usize, seed: u64, mut obj: impl FnMut(&[usize]) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    for r in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r);
        let mut f: Vec<usize> = (0..nw).map(|_| rng.random_range(0..nx)).collect();
        let mut cur = obj(&f);
        let mut improved = true;
        while improved {
            improved = false;
            for w in 0..nw {
                let keep = f[w];
                for x in 0..nx {
                    if x == keep {
                        continue;
                    }
                    f[w] = x;
                    let v = obj(&f);
                    if v < cur - 1e-15 {
                        cur = v;
                        improved = true;
                        break;
                    }
                    f[w] = keep;
                }
            }
        }
        best = best.min(cur);
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCase {
    /// min over couplings of P_W and P_Z of the mass on {P_W(w) > e^τ P_Z(z)}.
    pub a_prime_min: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct OneShotBounds {
    pub tau: f64,
    /// P(A_τ) at the encoder attaining the upper bound.
    pub A_tau_prob_min_over_conditionals: Option<f64>,
    pub upper_bound: f64,
    pub lower_bound_B_tau: f64,
    /// Lower bound with the per-(w, z) best x inside the transport cost; always certified.
    pub lower_bound_relaxed: f64,
    /// Whether `lower_bound_B_tau` came from enumerating every encoder (and so is certified).
    pub lower_exhaustive: bool,
    /// min over encoders f of |P_Z − P_{Y_f}|, when enumerable.
    pub exact_min_tv: Option<f64>,
    pub identity_case: Option<IdentityCase>,
}

/// Upper and lower bounds on min over deterministic encoders of the total
/// variation between the target and the induced output law.
pub fn oneshot_resolvability_bounds(setup: &OneShotSetup) -> Result<OneShotBounds> {
    setup.validate()?;
    let (nw, nx, tau) = (setup.source.len(), setup.n_x(), setup.tau);
    let pz = setup.target.probs();
    let pw = setup.source.probs();
    let enumerable = function_count(nx, nw).is_some();

    // upper bound: TV + P(A_τ) minimised over encoders, with the uniform encoder as an extra candidate
    let upper_obj = |q: &[Vec<f64>]| tv_vec(&setup.output(q), pz) + setup.a_tau_prob(q, tau);
    let uniform = vec![vec![1.0 / nx as f64; nx]; nw];
    let mut best_upper = (upper_obj(&uniform), setup.a_tau_prob(&uniform, tau));
    let mut exact: Option<f64> = None;
    let mut consider = |f: &[usize]| {
        let q = as_conditional(f, nx);
        let v = upper_obj(&q);
        if v < best_upper.0 {
            best_upper = (v, setup.a_tau_prob(&q, tau));
        }
    };
    if enumerable {
        let mut m = f64::INFINITY;
        for_each_function(nx, nw, |f| {
            consider(f);
            m = m.min(tv_vec(&setup.output_f(f), pz));
        });
        exact = Some(m);
    } else {
        let v = local_search(nx, nw, 0, |f| upper_obj(&as_conditional(f, nx)));
        if v < best_upper.0 {
            best_upper = (v, f64::NAN);
        }
    }
    let upper_bound = best_upper.0 + 0.5 * (tau / 2.0).exp();
    let a_tau = best_upper.1.is_finite().then_some(best_upper.1);

    // lower bound: min over couplings of P_W, P_Z and encoders of P(B_τ), minus e^{-τ}
    let cost_for = |f: &[usize]| -> Vec<Vec<f64>> {
        (0..nw).map(|w| (0..pz.len()).map(|z| if setup.in_b(w, f[w], z, tau) { 1.0 } else { 0.0 }).collect()).collect()
    };
    let transport = |cost: &[Vec<f64>]| transport_simplex(pw, pz, cost).1;
    let b_min = if enumerable {
        let mut m = f64::INFINITY;
        for_each_function(nx, nw, |f| m = m.min(transport(&cost_for(f))));
        m
    } else {
        alternating_lower(setup, &cost_for)
    };
    let relaxed_cost: Vec<Vec<f64>> = (0..nw)
        .map(|w| (0..pz.len()).map(|z| if (0..nx).all(|x| setup.in_b(w, x, z, tau)) { 1.0 } else { 0.0 }).collect())
        .collect();
    let relaxed = transport(&relaxed_cost);
    let slack = (-tau).exp();

    let identity_case = setup.is_identity_in_x().then(|| {
        let cost: Vec<Vec<f64>> = pw
            .iter()
            .map(|&a| pz.iter().map(|&b| if a > 0.0 && (b == 0.0 || (a / b).ln() > tau) { 1.0 } else { 0.0 }).collect())
            .collect();
        let a_prime_min = transport(&cost);
        IdentityCase { a_prime_min, lower: a_prime_min - slack, upper: a_prime_min + 0.5 * (tau / 2.0).exp() }
    });

    Ok(OneShotBounds {
        tau,
        A_tau_prob_min_over_conditionals: a_tau,
        upper_bound,
        lower_bound_B_tau: b_min - slack,
        lower_bound_relaxed: relaxed - slack,
        lower_exhaustive: enumerable,
        exact_min_tv: exact,
        identity_case,
    })
}

/// Alternates between the optimal coupling for the current encoder and the
/// per-w best input for the current coupling.
fn alternating_lower(setup: &OneShotSetup, cost_for: &dyn Fn(&[usize]) -> Vec<Vec<f64>>) -> f64 {
    let (nw, nx, tau) = (setup.source.len(), setup.n_x(), setup.tau);
    let (pw, pz) = (setup.source.probs(), setup.target.probs());
    let mut best = f64::INFINITY;
    for r in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        rng.set_stream(r);
        let mut f: Vec<usize> = (0..nw).map(|_| rng.random_range(0..nx)).collect();
        let mut cur = f64::INFINITY;
        for _ in 0..100 {
            let (plan, v) = transport_simplex(pw, pz, &cost_for(&f));
            if v >= cur - 1e-15 {
                break;
            }
            cur = v;
            for (w, fw) in f.iter_mut().enumerate() {
                let mass = |x: usize| (0..pz.len()).filter(|&z| setup.in_b(w, x, z, tau)).map(|z| plan[w][z]).sum::<f64>();
                *fw = (0..nx).min_by(|&a, &b| mass(a).total_cmp(&mass(b))).unwrap_or(0);
            }
        }
        best = best.min(cur);
    }
    best
}

/// The τ grid over which the soft-covering bound is minimised.
pub const SOFTCOVER_TAUS: [f64; 5] = [-8.0, -6.0, -4.0, -2.0, 0.0];

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub seed: u64,
    pub mean_tv: f64,
    /// min over τ of P(A_τ) + ½e^{τ/2}.
    pub bound: f64,
    pub best_tau: f64,
    pub bounds_per_tau: Vec<(f64, f64)>,
    pub holds: bool,
}

/// Random-codebook soft covering: each x(w) is drawn from `conditional(·|w)`,
/// the induced output law is computed exactly and compared with the output law
/// of the conditional itself. Trial k uses stream k of a ChaCha8 generator
/// keyed by `seed`, so the estimate does not depend on thread scheduling.
pub fn monte_carlo_softcover(
    setup: &OneShotSetup,
    conditional: &Channel,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    setup.validate()?;
    let (nw, nx) = (setup.source.len(), setup.n_x());
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if conditional.n_inputs() != nw || conditional.n_outputs() != nx {
        return Err(Error::MismatchedAlphabets);
    }
    let q = conditional.rows();
    let py = setup.output(q);
    let samplers: Vec<WeightedIndex<f64>> = q
        .iter()
        .map(|r| WeightedIndex::new(r).map_err(|e| Error::InvalidParameter(e.to_string())))
        .collect::<Result<_>>()?;

    let trial_tv = |k: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let f: Vec<usize> = samplers.iter().map(|s| s.sample(&mut rng)).collect();
        tv_vec(&setup.output_f(&f), &py)
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(trials);
    let chunk = trials.div_ceil(threads);
    let mut tvs = vec![0.0; trials];
    std::thread::scope(|s| {
        for (c, out) in tvs.chunks_mut(chunk).enumerate() {
            let trial_tv = &trial_tv;
            s.spawn(move || {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = trial_tv(c * chunk + i);
                }
            });
        }
    });
    let mean_tv = tvs.iter().sum::<f64>() / trials as f64;

    let bounds_per_tau: Vec<(f64, f64)> =
        SOFTCOVER_TAUS.iter().map(|&t| (t, setup.a_tau_prob(q, t) + 0.5 * (t / 2.0).exp())).collect();
    let &(best_tau, bound) = bounds_per_tau.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty grid");
    Ok(MonteCarloReport { trials, seed, mean_tv, bound, best_tau, bounds_per_tau, holds: mean_tv <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn identity_setup(pw: Dist, pz: Dist, tau: f64) -> OneShotSetup {
        let nw = pw.len();
        let nx = pz.len();
        let rows = (0..nw * nx).map(|i| (0..nx).map(|y| if y == i % nx { 1.0 } else { 0.0 }).collect()).collect();
        OneShotSetup::new(pw, Channel::from_rows(rows).unwrap(), pz, tau).unwrap()
    }

    fn random_dist(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.02).collect();
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    }

    fn random_setup(rng: &mut ChaCha8Rng, nw: usize, nx: usize, ny: usize, tau: f64) -> OneShotSetup {
        let rows = (0..nw * nx).map(|_| random_dist(rng, ny)).collect();
        OneShotSetup::new(
            Dist::from_probs(random_dist(rng, nw)).unwrap(),
            Channel::from_rows(rows).unwrap(),
            Dist::from_probs(random_dist(rng, ny)).unwrap(),
            tau,
        )
        .unwrap()
    }

    /// Brute force over encoders, straight from the definition.
    fn brute_min_tv(s: &OneShotSetup) -> f64 {
        let (nw, nx) = (s.source.len(), s.n_x());
        let mut best = f64::INFINITY;
        for code in 0..nx.pow(nw as u32) {
            let mut c = code;
            let mut out = vec![0.0; s.target.len()];
            for w in 0..nw {
                let x = c % nx;
                c /= nx;
                for (y, o) in out.iter_mut().enumerate() {
                    *o += s.source.probs()[w] * s.channel.rows()[w * nx + x][y];
                }
            }
            let tv: f64 = out.iter().zip(s.target.probs()).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
            best = best.min(tv);
        }
        best
    }

    #[test]
    fn identity_equal_laws() {
        let p = Dist::from_probs(vec![0.5, 0.3, 0.2]).unwrap();
        for tau in [2.0, 5.0, 10.0] {
            let b = oneshot_resolvability_bounds(&identity_setup(p.clone(), p.clone(), tau)).unwrap();
            assert_abs_diff_eq!(b.exact_min_tv.unwrap(), 0.0, epsilon = 1e-15);
            assert!(b.lower_bound_B_tau <= 0.0 && 0.0 <= b.upper_bound);
            let ic = b.identity_case.unwrap();
            assert!(ic.lower <= 0.0 && 0.0 <= ic.upper);
        }
    }

    #[test]
    fn identity_uniform_four_to_two() {
        let b = oneshot_resolvability_bounds(&identity_setup(Dist::uniform(4), Dist::uniform(2), 0.0)).unwrap();
        let ic = b.identity_case.unwrap();
        assert_eq!(ic.a_prime_min, 0.0);
        assert_abs_diff_eq!(ic.upper, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b.exact_min_tv.unwrap(), 0.0, epsilon = 1e-15);
        assert!(b.lower_bound_B_tau <= 0.0 && ic.lower <= 0.0);
    }

    #[test]
    fn sandwich_on_random_setups() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let s0 = random_setup(&mut rng, 3, 2, 2, 0.0);
            let exact = brute_min_tv(&s0);
            for tau in [-8.0, -6.0, -4.0, -2.0, 0.0, 2.0] {
                let s = OneShotSetup { tau, ..s0.clone() };
                let b = oneshot_resolvability_bounds(&s).unwrap();
                assert_abs_diff_eq!(b.exact_min_tv.unwrap(), exact, epsilon = 1e-12);
                assert!(b.lower_bound_relaxed <= b.lower_bound_B_tau + 1e-12);
                assert!(b.lower_bound_B_tau <= exact + 1e-12, "tau {tau}: {} > {exact}", b.lower_bound_B_tau);
                assert!(exact <= b.upper_bound + 1e-12);
            }
        }
    }

    #[test]
    fn identity_corollary_sandwich_on_random_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let pw = Dist::from_probs(random_dist(&mut rng, 4)).unwrap();
            let pz = Dist::from_probs(random_dist(&mut rng, 3)).unwrap();
            for tau in [-2.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
                let b = oneshot_resolvability_bounds(&identity_setup(pw.clone(), pz.clone(), tau)).unwrap();
                let ic = b.identity_case.unwrap();
                let exact = b.exact_min_tv.unwrap();
                assert!(ic.lower <= exact + 1e-12 && exact <= ic.upper + 1e-12);
            }
        }
    }

    #[test]
    fn local_search_path_matches_enumeration_on_small_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_setup(&mut rng, 3, 2, 3, -1.0);
        let b = oneshot_resolvability_bounds(&s).unwrap();
        let nx = s.n_x();
        let v = local_search(nx, 3, 0, |f| {
            let q = as_conditional(f, nx);
            tv_vec(&s.output(&q), s.target.probs()) + s.a_tau_prob(&q, s.tau)
        });
        assert!(v + 0.5 * (-0.5f64).exp() >= b.upper_bound - 1e-12);
        let alt = alternating_lower(&s, &|f: &[usize]| {
            (0..3).map(|w| (0..3).map(|z| if s.in_b(w, f[w], z, s.tau) { 1.0 } else { 0.0 }).collect()).collect()
        });
        assert!(alt - (1.0f64).exp() >= b.lower_bound_B_tau - 1e-12);
    }

    #[test]
    fn deterministic_conditional_has_no_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_setup(&mut rng, 3, 2, 2, 0.0);
        let cond = Channel::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let r = monte_carlo_softcover(&s, &cond, 50, 1).unwrap();
        assert_eq!(r.mean_tv, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn codebook_irrelevant_when_channel_ignores_x() {
        let nw = 64;
        let row = vec![0.3, 0.7];
        let rows = vec![row.clone(); nw * 2];
        let s = OneShotSetup::new(Dist::uniform(nw), Channel::from_rows(rows).unwrap(), Dist::uniform(2), 0.0).unwrap();
        let cond = Channel::from_rows(vec![vec![0.5, 0.5]; nw]).unwrap();
        let r = monte_carlo_softcover(&s, &cond, 200, 0).unwrap();
        assert_abs_diff_eq!(r.mean_tv, 0.0, epsilon = 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn softcover_bound_holds_and_is_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let s = random_setup(&mut rng, 4, 3, 3, 0.0);
            let cond = Channel::from_rows((0..4).map(|_| random_dist(&mut rng, 3)).collect()).unwrap();
            let a = monte_carlo_softcover(&s, &cond, 1000, 0).unwrap();
            let b = monte_carlo_softcover(&s, &cond, 1000, 0).unwrap();
            assert_eq!(a.mean_tv, b.mean_tv);
            for &(_, bound) in &a.bounds_per_tau {
                assert!(a.mean_tv <= bound);
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let e = OneShotSetup::new(Dist::uniform(3), Channel::identity(4), Dist::uniform(4), 0.0);
        assert!(matches!(e, Err(Error::InvalidParameter(_))));
        let e = OneShotSetup::new(Dist::uniform(2), Channel::identity(4), Dist::uniform(3), 0.0);
        assert!(matches!(e, Err(Error::MismatchedAlphabets)));
    }
}
