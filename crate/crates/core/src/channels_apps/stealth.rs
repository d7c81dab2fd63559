use serde::Serialize;

use super::common::gk_common_information;
use super::feasible::{check_target, FEASIBLE_VERTEX_CAP};
use super::mutual_information_nats;
use super::polytope::Polytope;
use crate::numeric::{golden_max, entropy_nats};
use crate::prob_core::{Channel, Dist};
use crate::{Base, Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct RedundancyReport {
    pub redundant: bool,
    /// Two feasible inputs with the same Z-law and different Y-laws.
    pub witness_pair: Option<(Dist, Dist)>,
}

fn check_pair(wy: &Channel, wz: &Channel, target: &Dist) -> Result<()> {
    if wy.input() != wz.input() {
        return Err(Error::MismatchedAlphabets);
    }
    check_target(wz, target)
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn dist(w: &Channel, p: &[f64]) -> Dist {
    Dist::from_parts_unchecked(w.input().to_vec(), p.iter().map(|&v| if v.abs() < 1e-14 { 0.0 } else { v.max(0.0) }).collect())
}

/// Feasible candidate inputs used as witnesses: vertices when enumerable, else
/// the two ends of the longest chord through the interior point along the
/// direction with the largest Y-image.
fn witness_candidates(poly: &Polytope, wy: &Channel) -> Vec<Vec<f64>> {
    if wy.n_inputs() <= FEASIBLE_VERTEX_CAP {
        return poly.vertices();
    }
    let dirs = poly.directions();
    let norm = |v: &Vec<f64>| wy.apply_vec(v).iter().map(|x| x.abs()).sum::<f64>();
    let Some(v) = dirs.iter().max_by(|a, b| norm(a).total_cmp(&norm(b))) else {
        return vec![poly.interior.clone()];
    };
    let p = &poly.interior;
    let reach = |sign: f64| {
        p.iter()
            .zip(v)
            .filter(|(_, &vi)| sign * vi < -1e-15)
            .map(|(&pi, &vi)| pi / (-sign * vi))
            .fold(f64::INFINITY, f64::min)
    };
    let (tp, tm) = (reach(1.0), reach(-1.0));
    vec![
        p.iter().zip(v).map(|(a, b)| a + tp * b).collect(),
        p.iter().zip(v).map(|(a, b)| a - tm * b).collect(),
    ]
}

/// Y-laws of two inputs are farther than this in L1 ⇒ genuinely different.
const DISTINCT_TOL: f64 = 1e-9;

fn best_pair(cands: &[Vec<f64>], wy: &Channel) -> Option<(usize, usize, f64)> {
    let imgs: Vec<Vec<f64>> = cands.iter().map(|c| wy.apply_vec(c)).collect();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..cands.len() {
        for k in i + 1..cands.len() {
            let d = l1(&imgs[i], &imgs[k]);
            if d > DISTINCT_TOL && best.is_none_or(|b| d > b.2) {
                best = Some((i, k, d));
            }
        }
    }
    best
}

/// Decides whether two inputs can induce the target Z-law yet different Y-laws.
/// On the relative interior every direction of the feasible set's affine hull
/// is realisable, so redundancy is exactly "some such direction has a non-zero
/// image under Wy".
pub fn pz_redundancy_check(wy: &Channel, wz: &Channel, target: &Dist) -> Result<RedundancyReport> {
    check_pair(wy, wz, target)?;
    let poly = Polytope::new(wz, target.probs()).ok_or(Error::InfeasibleTarget)?;
    let redundant = poly.directions().iter().any(|v| {
        let img = wy.apply_vec(v);
        img.iter().map(|x| x.abs()).sum::<f64>() > 1e-9
    });
    let witness_pair = if redundant {
        let cands = witness_candidates(&poly, wy);
        best_pair(&cands, wy).map(|(i, k, _)| (dist(wy, &cands[i]), dist(wy, &cands[k])))
    } else {
        None
    };
    Ok(RedundancyReport { redundant, witness_pair })
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct FullRankExact {
    pub C0: f64,
    pub C1: f64,
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct StealthBounds {
    /// Certified upper bound on max I(X;Y) over the feasible set (value + Frank–Wolfe gap).
    pub C0_upper: f64,
    /// Best C_GK(X;Y) over vertices, the interior point and the I-maximiser.
    pub C0_lower: f64,
    /// max over witness pairs and mixture weights of I(B;Y).
    pub C1_lower_mixture: f64,
    /// 0 when not redundant (C1 vanishes exactly); otherwise C0_upper,
    /// since I(U;Y) − I(U;Z) ≤ I(X;Y).
    pub C1_upper_relaxed: f64,
    pub fullrank_exact: Option<FullRankExact>,
    /// The input attaining the I(X;Y) iterate behind C0_upper.
    pub maximiser: Dist,
}

const FW_ITERS: usize = 500;

/// max over the feasible set of I(X;Y) by conditional gradient with exact line
/// search; returns (argmax, value, duality gap).
fn max_mutual_information(poly: &Polytope, wy: &Channel, start: Vec<f64>) -> (Vec<f64>, f64, f64) {
    let f = |p: &[f64]| mutual_information_nats(p, wy.rows());
    let grad = |p: &[f64]| -> Vec<f64> {
        let py = wy.apply_vec(p);
        wy.rows()
            .iter()
            .map(|row| row.iter().zip(&py).filter(|(&w, _)| w > 0.0).map(|(&w, &q)| w * (w / q).ln()).sum::<f64>())
            .collect()
    };
    let mut p = start;
    let mut gap = f64::INFINITY;
    for _ in 0..FW_ITERS {
        let g = grad(&p);
        let Some(s) = poly.argmax_linear(&g) else { break };
        gap = g.iter().zip(s.iter().zip(&p)).map(|(gi, (si, pi))| gi * (si - pi)).sum::<f64>().max(0.0);
        if gap < 1e-12 {
            break;
        }
        let line = |t: f64| f(&p.iter().zip(&s).map(|(a, b)| a + t * (b - a)).collect::<Vec<_>>());
        let (t, _) = golden_max(&line, 0.0, 1.0, 1e-12);
        let t = if line(1.0) >= line(t) { 1.0 } else { t };
        p = p.iter().zip(&s).map(|(a, b)| a + t * (b - a)).collect();
    }
    // final gap at the returned point
    let g = grad(&p);
    if let Some(s) = poly.argmax_linear(&g) {
        gap = g.iter().zip(s.iter().zip(&p)).map(|(gi, (si, pi))| gi * (si - pi)).sum::<f64>().max(0.0);
    }
    let v = f(&p);
    (p, v, gap)
}

fn binary_mixture_information(lambda: f64, a: &[f64], b: &[f64]) -> f64 {
    let mix: Vec<f64> = a.iter().zip(b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
    let h = entropy_nats(&mix) - lambda * entropy_nats(a) - (1.0 - lambda) * entropy_nats(b);
    h.max(0.0)
}

pub fn stealth_capacity_bounds(wy: &Channel, wz: &Channel, target: &Dist, base: Base) -> Result<StealthBounds> {
    check_pair(wy, wz, target)?;
    let poly = Polytope::new(wz, target.probs()).ok_or(Error::InfeasibleTarget)?;
    let gk = |p: &[f64]| gk_common_information(&wy.joint_vec(p), Base::Nats).C_GK;

    if poly.is_unique() {
        let p = poly.interior.clone();
        let c0 = gk(&p);
        let i = mutual_information_nats(&p, wy.rows());
        return Ok(StealthBounds {
            C0_upper: base.from_nats(i),
            C0_lower: base.from_nats(c0),
            C1_lower_mixture: 0.0,
            C1_upper_relaxed: 0.0,
            fullrank_exact: Some(FullRankExact { C0: base.from_nats(c0), C1: 0.0 }),
            maximiser: dist(wy, &p),
        });
    }

    let cands = witness_candidates(&poly, wy);
    let mut start = poly.interior.clone();
    let mut start_v = mutual_information_nats(&start, wy.rows());
    for c in &cands {
        let v = mutual_information_nats(c, wy.rows());
        if v > start_v {
            start = c.clone();
            start_v = v;
        }
    }
    let (pmax, imax, gap) = max_mutual_information(&poly, wy, start);
    let c0_upper = imax + gap;

    let c0_lower = cands.iter().chain([&poly.interior, &pmax]).map(|p| gk(p)).fold(0.0, f64::max);

    let redundant = pz_redundancy_check(wy, wz, target)?.redundant;
    let mut c1_lower = 0.0f64;
    if redundant {
        let imgs: Vec<Vec<f64>> = cands.iter().map(|c| wy.apply_vec(c)).collect();
        for i in 0..imgs.len() {
            for k in i + 1..imgs.len() {
                if l1(&imgs[i], &imgs[k]) <= DISTINCT_TOL {
                    continue;
                }
                for step in 0..=100 {
                    c1_lower = c1_lower.max(binary_mixture_information(step as f64 / 100.0, &imgs[i], &imgs[k]));
                }
            }
        }
    }
    Ok(StealthBounds {
        C0_upper: base.from_nats(c0_upper),
        C0_lower: base.from_nats(c0_lower),
        C1_lower_mixture: base.from_nats(c1_lower),
        C1_upper_relaxed: if redundant { base.from_nats(c0_upper) } else { 0.0 },
        fullrank_exact: None,
        maximiser: dist(wy, &pmax),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mod2() -> (Channel, Channel, Dist) {
        let wy = Channel::identity(4);
        let wz = Channel::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        (wy, wz, Dist::uniform(2))
    }

    #[test]
    fn redundancy_examples() {
        let (wy, wz, t) = mod2();
        let r = pz_redundancy_check(&wy, &wz, &t).unwrap();
        assert!(r.redundant);
        let (q, q2) = r.witness_pair.unwrap();
        assert!(wz.apply_vec(q.probs()).iter().all(|v| (v - 0.5).abs() < 1e-9));
        assert!(wz.apply_vec(q2.probs()).iter().all(|v| (v - 0.5).abs() < 1e-9));
        assert_abs_diff_eq!(l1(q.probs(), q2.probs()), 2.0, epsilon = 1e-9);

        let r = pz_redundancy_check(&Channel::identity(2), &Channel::bsc(0.1), &Dist::uniform(2)).unwrap();
        assert!(!r.redundant && r.witness_pair.is_none());

        // duplicated inputs under Wz, but Wy cannot tell them apart either
        let wz = Channel::from_rows(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let wy = Channel::from_rows(vec![vec![0.3, 0.7], vec![0.3, 0.7], vec![0.9, 0.1]]).unwrap();
        assert!(!pz_redundancy_check(&wy, &wz, &Dist::uniform(2)).unwrap().redundant);

        assert!(matches!(
            pz_redundancy_check(&Channel::identity(2), &Channel::bsc(0.1), &Dist::from_probs(vec![0.0, 1.0]).unwrap()),
            Err(Error::InfeasibleTarget)
        ));
    }

    #[test]
    fn identity_wz_is_never_redundant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let v: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let s: f64 = v.iter().sum();
            let t = Dist::from_probs(v.iter().map(|x| x / s).collect()).unwrap();
            let wy = Channel::from_rows(vec![vec![0.2, 0.8], vec![0.5, 0.5], vec![0.9, 0.1]]).unwrap();
            assert!(!pz_redundancy_check(&wy, &Channel::identity(3), &t).unwrap().redundant);
        }
    }

    #[test]
    fn stealth_examples() {
        let b = stealth_capacity_bounds(&Channel::identity(2), &Channel::bsc(0.1), &Dist::uniform(2), Base::Bits).unwrap();
        let fr = b.fullrank_exact.unwrap();
        assert_eq!(fr.C1, 0.0);
        assert_abs_diff_eq!(fr.C0, 1.0, epsilon = 1e-9);

        let (wy, wz, t) = mod2();
        let b = stealth_capacity_bounds(&wy, &wz, &t, Base::Bits).unwrap();
        assert_abs_diff_eq!(b.C1_lower_mixture, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.C0_upper, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(b.C0_lower, 2.0, epsilon = 1e-6);
        assert!(b.C1_lower_mixture <= b.C1_upper_relaxed && b.C0_lower <= b.C0_upper);

        let wz = Channel::from_rows(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let wy = Channel::from_rows(vec![vec![0.3, 0.7], vec![0.3, 0.7], vec![0.9, 0.1]]).unwrap();
        let b = stealth_capacity_bounds(&wy, &wz, &Dist::uniform(2), Base::Bits).unwrap();
        assert_eq!(b.C1_lower_mixture, 0.0);
        assert_eq!(b.C1_upper_relaxed, 0.0);
    }

    #[test]
    fn stealth_ordering_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut rowgen = |k: usize| {
            let v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        for _ in 0..20 {
            let wz = Channel::from_rows((0..4).map(|_| rowgen(2)).collect()).unwrap();
            let wy = Channel::from_rows((0..4).map(|_| rowgen(3)).collect()).unwrap();
            let pin = rowgen(4);
            let t = Dist::from_probs(wz.apply_vec(&pin)).unwrap();
            let b = stealth_capacity_bounds(&wy, &wz, &t, Base::Nats).unwrap();
            assert!(b.C1_lower_mixture <= b.C1_upper_relaxed + 1e-12);
            assert!(b.C0_lower <= b.C0_upper + 1e-12);
            // any feasible point's I(X;Y) stays below the certified upper bound
            assert!(mutual_information_nats(&pin, wy.rows()) <= b.C0_upper + 1e-9);
        }
    }
}
