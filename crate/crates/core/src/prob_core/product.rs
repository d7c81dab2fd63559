use super::dist::{Channel, Dist};
use crate::{Error, Result};

fn power_size(k: usize, n: usize, cap: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let size = (k as f64).powi(n as i32);
    if size > cap as f64 {
        return Err(Error::too_large("product alphabet atoms", size, cap as f64));
    }
    Ok(k.pow(n as u32))
}

/// Labels of the n-fold alphabet in lexicographic order, tuples joined by ','.
pub fn power_labels(alphabet: &[String], n: usize) -> Vec<String> {
    let mut labels: Vec<String> = alphabet.to_vec();
    for _ in 1..n {
        labels = labels
            .iter()
            .flat_map(|a| alphabet.iter().map(move |b| format!("{a},{b}")))
            .collect();
    }
    labels
}

/// Kronecker power of a probability vector.
pub(crate) fn power_vec(p: &[f64], n: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    for _ in 1..n {
        v = v.iter().flat_map(|&a| p.iter().map(move |&b| a * b)).collect();
    }
    v
}

/// The i.i.d. product P^n over tuple labels in lexicographic order.
pub fn product_power(p: &Dist, n: usize, atom_cap: usize) -> Result<Dist> {
    power_size(p.len(), n, atom_cap)?;
    Ok(Dist::from_parts_unchecked(power_labels(p.alphabet(), n), power_vec(p.probs(), n)))
}

/// The memoryless extension W^n.
pub fn channel_power(w: &Channel, n: usize, atom_cap: usize) -> Result<Channel> {
    let nin = power_size(w.n_inputs(), n, atom_cap)?;
    let nout = power_size(w.n_outputs(), n, atom_cap)?;
    if (nin as f64) * (nout as f64) > atom_cap as f64 {
        return Err(Error::too_large("channel power entries", nin as f64 * nout as f64, atom_cap as f64));
    }
    let mut rows = w.rows().to_vec();
    for _ in 1..n {
        rows = rows
            .iter()
            .flat_map(|ra| {
                w.rows().iter().map(move |rb| {
                    ra.iter().flat_map(|&a| rb.iter().map(move |&b| a * b)).collect::<Vec<f64>>()
                })
            })
            .collect();
    }
    Ok(Channel::from_parts_unchecked(
        power_labels(w.input(), n),
        power_labels(w.output(), n),
        rows,
    ))
}

/// Symbol indices of the tuple with lexicographic index `idx`.
pub(crate) fn decode_index(mut idx: usize, k: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for i in (0..n).rev() {
        out[i] = idx % k;
        idx /= k;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_ATOM_CAP;

    #[test]
    fn power_examples() {
        let p = Dist::from_probs(vec![0.5, 0.5]).unwrap();
        assert_eq!(product_power(&p, 2, DEFAULT_ATOM_CAP).unwrap().probs(), &[0.25; 4]);
        let q = Dist::from_probs(vec![0.25, 0.75]).unwrap();
        let q2 = product_power(&q, 2, DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(q2.probs(), &[0.0625, 0.1875, 0.1875, 0.5625]);
        assert_eq!(q2.alphabet(), &["0,0", "0,1", "1,0", "1,1"]);
        let id = channel_power(&Channel::identity(2), 2, DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(id.rows(), Channel::identity(4).rows());
    }

    #[test]
    fn cap_is_enforced() {
        let p = Dist::from_probs(vec![0.5, 0.5]).unwrap();
        assert!(matches!(product_power(&p, 23, DEFAULT_ATOM_CAP), Err(Error::TooLarge { .. })));
        assert_eq!(decode_index(5, 2, 3), vec![1, 0, 1]);
    }
}
