//! Method of types: compositions, class sizes, and type-space evaluation of
//! product-distribution distances.

use serde::Serialize;

use super::dist::Dist;
use super::measures::log_sum_exp;
use crate::{Error, Result};

/// Cap on the number of types enumerated at once.
pub const TYPE_CAP: u128 = 10_000_000;

/// Empirical counts of a length-`n` string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TypeComposition {
    pub counts: Vec<u32>,
    pub n: u32,
}

impl TypeComposition {
    pub fn new(counts: Vec<u32>) -> Self {
        let n = counts.iter().sum();
        TypeComposition { counts, n }
    }

    /// Type of a sequence of symbol indices over an alphabet of size `k`.
    pub fn of_sequence(seq: &[usize], k: usize) -> Self {
        let mut counts = vec![0u32; k];
        for &s in seq {
            counts[s] += 1;
        }
        TypeComposition::new(counts)
    }

    /// Multinomial coefficient n!/∏c!, or `None` on u128 overflow.
    pub fn class_size(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        let mut placed: u128 = 0;
        for &c in &self.counts {
            // acc·C(placed + c, c), built one factor at a time so every step is integral
            for i in 1..=c as u128 {
                placed += 1;
                acc = acc.checked_mul(placed)? / i;
            }
        }
        Some(acc)
    }

    /// Natural log of the class size; exact up to floating round-off at any n.
    pub fn log_class_size(&self) -> f64 {
        ln_factorial(self.n) - self.counts.iter().map(|&c| ln_factorial(c)).sum::<f64>()
    }

    /// The empirical distribution counts/n.
    pub fn as_probs(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// log of P^n(x^n) for any x^n in the class.
    pub fn log_seq_prob(&self, p: &[f64]) -> f64 {
        let mut s = 0.0;
        for (&c, &pi) in self.counts.iter().zip(p) {
            if c > 0 {
                if pi <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                s += c as f64 * pi.ln();
            }
        }
        s
    }

    /// log of P^n(𝒯(T)), the probability of the whole class.
    pub fn log_class_prob(&self, p: &[f64]) -> f64 {
        let s = self.log_seq_prob(p);
        if s == f64::NEG_INFINITY {
            s
        } else {
            s + self.log_class_size()
        }
    }
}

pub(crate) fn ln_factorial(n: u32) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 256 {
        (2..=n).map(|i| (i as f64).ln()).sum()
    } else {
        statrs::function::gamma::ln_gamma(n as f64 + 1.0)
    }
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Number of n-types over an alphabet of size k.
pub fn type_count(k: usize, n: usize) -> Option<u128> {
    if k == 0 {
        return Some(0);
    }
    binomial_u128((n + k - 1) as u128, (k - 1) as u128)
}

/// All compositions of `n` into `k` parts, first count descending.
pub fn enumerate_types(k: usize, n: usize) -> Result<Vec<TypeComposition>> {
    if k == 0 {
        return Err(Error::InvalidParameter("alphabet size must be positive".into()));
    }
    let count = type_count(k, n).unwrap_or(u128::MAX);
    if count > TYPE_CAP {
        return Err(Error::too_large("number of types", count as f64, TYPE_CAP as f64));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![0u32; k];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<TypeComposition>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(TypeComposition::new(cur.clone()));
            return;
        }
        for c in (0..=left).rev() {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, out);
        }
    }
    rec(0, n as u32, &mut cur, &mut out);
    Ok(out)
}

/// |P^n − Q^n| evaluated by summing over type classes in log space.
pub fn tv_product_exact(p: &Dist, q: &Dist, n: usize) -> Result<f64> {
    p.same_alphabet(q)?;
    let (tv, _) = tv_and_overlap(p.probs(), q.probs(), n)?;
    Ok(tv)
}

/// 1 − |P^n − Q^n| = Σ min(P^n, Q^n), summed directly so it keeps full
/// relative precision when it is tiny.
pub fn overlap_product_exact(p: &Dist, q: &Dist, n: usize) -> Result<f64> {
    p.same_alphabet(q)?;
    let (_, ov) = tv_and_overlap(p.probs(), q.probs(), n)?;
    Ok(ov)
}

fn tv_and_overlap(p: &[f64], q: &[f64], n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let types = enumerate_types(p.len(), n)?;
    let mut excess = Vec::with_capacity(types.len());
    let mut common = Vec::with_capacity(types.len());
    for t in &types {
        let lp = t.log_class_prob(p);
        let lq = t.log_class_prob(q);
        let (hi, lo) = if lp >= lq { (lp, lq) } else { (lq, lp) };
        if hi == f64::NEG_INFINITY {
            continue;
        }
        common.push(lo);
        // log(e^hi − e^lo) = hi + log(1 − e^{lo−hi})
        let r = (lo - hi).exp();
        if r < 1.0 {
            excess.push(hi + (-r).ln_1p());
        }
    }
    let tv = log_sum_exp(excess.iter().copied()).exp() * 0.5;
    let ov = log_sum_exp(common.iter().copied()).exp();
    Ok((tv.clamp(0.0, 1.0), ov.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(v: &[f64]) -> Dist {
        Dist::from_probs(v.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_small() {
        let t = enumerate_types(2, 2).unwrap();
        let counts: Vec<_> = t.iter().map(|t| t.counts.clone()).collect();
        assert_eq!(counts, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let sizes: Vec<_> = t.iter().map(|t| t.class_size().unwrap()).collect();
        assert_eq!(sizes, vec![1, 2, 1]);

        let t = enumerate_types(2, 4).unwrap();
        let sizes: Vec<_> = t.iter().map(|t| t.class_size().unwrap()).collect();
        assert_eq!(sizes, vec![1, 4, 6, 4, 1]);

        let t = enumerate_types(3, 2).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.iter().map(|t| t.class_size().unwrap()).sum::<u128>(), 9);
    }

    #[test]
    fn class_sizes_sum_to_power() {
        for k in 1..=4usize {
            for n in 0..=12usize {
                let s: u128 = enumerate_types(k, n).unwrap().iter().map(|t| t.class_size().unwrap()).sum();
                assert_eq!(s, (k as u128).pow(n as u32), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn log_class_size_matches_exact() {
        let t = TypeComposition::new(vec![7, 3, 5]);
        assert_abs_diff_eq!(t.log_class_size(), (t.class_size().unwrap() as f64).ln(), epsilon = 1e-10);
        let big = TypeComposition::new(vec![100, 100]);
        assert!(big.class_size().is_none() || big.class_size().unwrap() > 0);
        assert!(TypeComposition::new(vec![300, 300]).class_size().is_none());
    }

    #[test]
    fn tv_product_examples() {
        let p = d(&[0.5, 0.5]);
        let q = d(&[0.25, 0.75]);
        assert_abs_diff_eq!(tv_product_exact(&p, &q, 1).unwrap(), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(tv_product_exact(&p, &q, 2).unwrap(), 0.3125, epsilon = 1e-14);
        assert_eq!(tv_product_exact(&p, &p, 7).unwrap(), 0.0);
        assert_abs_diff_eq!(
            overlap_product_exact(&p, &q, 5).unwrap() + tv_product_exact(&p, &q, 5).unwrap(),
            1.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn too_many_types() {
        assert!(matches!(enumerate_types(20, 40), Err(Error::TooLarge { .. })));
    }
}
