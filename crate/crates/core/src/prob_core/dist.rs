use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Validation tolerance for total mass and row sums.
pub const PROB_TOL: f64 = 1e-9;

fn default_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn check_labels(labels: &[String], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidDistribution(format!("duplicate {what} label {l:?}")));
        }
    }
    Ok(())
}

fn check_vector(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!("{what} has entry {x}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!("{what} sums to {s}")));
    }
    Ok(())
}

fn normalize_vector(p: &mut [f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution(format!("{what} has negative or non-finite entries")));
    }
    let s: f64 = p.iter().sum();
    if s <= 0.0 {
        return Err(Error::InvalidDistribution(format!("{what} has zero total mass")));
    }
    p.iter_mut().for_each(|x| *x /= s);
    Ok(())
}

/// Clamp round-off negatives produced by internal arithmetic.
pub(crate) fn clean(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// A probability vector over a labelled finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist")]
pub struct Dist {
    alphabet: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDist {
    alphabet: Vec<String>,
    probs: Vec<f64>,
}

impl TryFrom<RawDist> for Dist {
    type Error = Error;
    fn try_from(r: RawDist) -> Result<Self> {
        Dist::new(r.alphabet, r.probs)
    }
}

impl Dist {
    pub fn new(alphabet: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if alphabet.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} probabilities",
                alphabet.len(),
                probs.len()
            )));
        }
        check_labels(&alphabet, "alphabet")?;
        check_vector(&probs, "probs")?;
        Ok(Dist { alphabet, probs })
    }

    /// Like [`Dist::new`] but rescales the vector to unit mass first.
    pub fn new_normalized(alphabet: Vec<String>, mut probs: Vec<f64>) -> Result<Self> {
        if alphabet.len() != probs.len() {
            return Err(Error::InvalidDistribution("label/probability length mismatch".into()));
        }
        check_labels(&alphabet, "alphabet")?;
        normalize_vector(&mut probs, "probs")?;
        Ok(Dist { alphabet, probs })
    }

    /// Distribution with labels `"0"`, `"1"`, ….
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        Dist::new(default_labels(probs.len()), probs)
    }

    pub fn uniform(k: usize) -> Self {
        Dist {
            alphabet: default_labels(k),
            probs: vec![1.0 / k as f64; k],
        }
    }

    /// Internal constructor for vectors that are valid up to round-off.
    pub(crate) fn from_parts_unchecked(alphabet: Vec<String>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(alphabet.len(), probs.len());
        Dist {
            alphabet,
            probs: probs.into_iter().map(clean).collect(),
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.probs[i] > 0.0).collect()
    }

    pub fn min_positive(&self) -> f64 {
        self.probs.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min)
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// Uniform over the whole alphabet, within `tol` per atom.
    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.len() as f64;
        self.probs.iter().all(|&p| (p - u).abs() <= tol)
    }

    pub(crate) fn same_alphabet(&self, other: &Dist) -> Result<()> {
        if self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(Error::MismatchedAlphabets)
        }
    }

    /// Same probabilities under new labels.
    pub fn relabel(&self, alphabet: Vec<String>) -> Result<Self> {
        Dist::new(alphabet, self.probs.clone())
    }
}

/// A joint probability matrix with labelled row and column alphabets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint")]
pub struct JointDist {
    rows: Vec<String>,
    cols: Vec<String>,
    mass: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawJoint {
    rows: Vec<String>,
    cols: Vec<String>,
    mass: Vec<Vec<f64>>,
}

impl TryFrom<RawJoint> for JointDist {
    type Error = Error;
    fn try_from(r: RawJoint) -> Result<Self> {
        JointDist::new(r.rows, r.cols, r.mass)
    }
}

fn check_shape(m: &[Vec<f64>], r: usize, c: usize, what: &str) -> Result<()> {
    if m.len() != r || m.iter().any(|row| row.len() != c) {
        return Err(Error::InvalidDistribution(format!("{what} matrix is not {r}×{c}")));
    }
    Ok(())
}

impl JointDist {
    pub fn new(rows: Vec<String>, cols: Vec<String>, mass: Vec<Vec<f64>>) -> Result<Self> {
        check_labels(&rows, "row")?;
        check_labels(&cols, "column")?;
        check_shape(&mass, rows.len(), cols.len(), "mass")?;
        let flat: Vec<f64> = mass.iter().flatten().copied().collect();
        check_vector(&flat, "mass")?;
        Ok(JointDist { rows, cols, mass })
    }

    pub fn new_normalized(rows: Vec<String>, cols: Vec<String>, mut mass: Vec<Vec<f64>>) -> Result<Self> {
        check_labels(&rows, "row")?;
        check_labels(&cols, "column")?;
        check_shape(&mass, rows.len(), cols.len(), "mass")?;
        let mut flat: Vec<f64> = mass.iter().flatten().copied().collect();
        normalize_vector(&mut flat, "mass")?;
        let c = cols.len();
        for (i, row) in mass.iter_mut().enumerate() {
            row.copy_from_slice(&flat[i * c..(i + 1) * c]);
        }
        Ok(JointDist { rows, cols, mass })
    }

    pub fn from_matrix(mass: Vec<Vec<f64>>) -> Result<Self> {
        let r = mass.len();
        let c = mass.first().map_or(0, |row| row.len());
        JointDist::new(default_labels(r), default_labels(c), mass)
    }

    pub(crate) fn from_parts_unchecked(rows: Vec<String>, cols: Vec<String>, mass: Vec<Vec<f64>>) -> Self {
        let mass = mass
            .into_iter()
            .map(|r| r.into_iter().map(clean).collect())
            .collect();
        JointDist { rows, cols, mass }
    }

    /// Independent joint P × Q.
    pub fn product(p: &Dist, q: &Dist) -> Self {
        let mass = p
            .probs()
            .iter()
            .map(|&a| q.probs().iter().map(|&b| a * b).collect())
            .collect();
        JointDist::from_parts_unchecked(p.alphabet().to_vec(), q.alphabet().to_vec(), mass)
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn mass(&self) -> &[Vec<f64>] {
        &self.mass
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mass[i][j]
    }

    pub fn row_marginal(&self) -> Dist {
        let p = self.mass.iter().map(|r| r.iter().sum()).collect();
        Dist::from_parts_unchecked(self.rows.clone(), p)
    }

    pub fn col_marginal(&self) -> Dist {
        let mut q = vec![0.0; self.ncols()];
        for row in &self.mass {
            for (j, &v) in row.iter().enumerate() {
                q[j] += v;
            }
        }
        Dist::from_parts_unchecked(self.cols.clone(), q)
    }

    /// The joint with rows and columns swapped.
    pub fn transpose(&self) -> Self {
        let mass = (0..self.ncols())
            .map(|j| (0..self.nrows()).map(|i| self.mass[i][j]).collect())
            .collect();
        JointDist {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            mass,
        }
    }
}

/// A memoryless channel; `rows[x]` is the output law given input `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel")]
pub struct Channel {
    input: Vec<String>,
    output: Vec<String>,
    rows: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawChannel {
    input: Vec<String>,
    output: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<RawChannel> for Channel {
    type Error = Error;
    fn try_from(r: RawChannel) -> Result<Self> {
        Channel::new(r.input, r.output, r.rows)
    }
}

impl Channel {
    pub fn new(input: Vec<String>, output: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        check_labels(&input, "input")?;
        check_labels(&output, "output")?;
        check_shape(&rows, input.len(), output.len(), "channel")?;
        for (x, row) in rows.iter().enumerate() {
            check_vector(row, &format!("channel row {x}"))?;
        }
        Ok(Channel { input, output, rows })
    }

    pub fn new_normalized(input: Vec<String>, output: Vec<String>, mut rows: Vec<Vec<f64>>) -> Result<Self> {
        check_labels(&input, "input")?;
        check_labels(&output, "output")?;
        check_shape(&rows, input.len(), output.len(), "channel")?;
        for (x, row) in rows.iter_mut().enumerate() {
            normalize_vector(row, &format!("channel row {x}"))?;
        }
        Ok(Channel { input, output, rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Channel::new(default_labels(r), default_labels(c), rows)
    }

    pub(crate) fn from_parts_unchecked(input: Vec<String>, output: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        Channel { input, output, rows }
    }

    pub fn identity(k: usize) -> Self {
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Channel::from_parts_unchecked(default_labels(k), default_labels(k), rows)
    }

    /// Binary symmetric channel with crossover `a`.
    pub fn bsc(a: f64) -> Self {
        Channel::from_parts_unchecked(default_labels(2), default_labels(2), vec![vec![1.0 - a, a], vec![a, 1.0 - a]])
    }

    pub fn input(&self) -> &[String] {
        &self.input
    }

    pub fn output(&self) -> &[String] {
        &self.output
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_inputs(&self) -> usize {
        self.input.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output.len()
    }

    /// Output law of the input vector `p` (indexed like the input alphabet).
    pub fn apply_vec(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_outputs()];
        for (x, &px) in p.iter().enumerate() {
            if px != 0.0 {
                for (y, &w) in self.rows[x].iter().enumerate() {
                    out[y] += px * w;
                }
            }
        }
        out
    }

    pub fn apply(&self, p: &Dist) -> Result<Dist> {
        if p.alphabet() != self.input.as_slice() {
            return Err(Error::MismatchedAlphabets);
        }
        Ok(Dist::from_parts_unchecked(self.output.clone(), self.apply_vec(p.probs())))
    }

    /// Joint law of (X, Y) for input `p`.
    pub fn joint(&self, p: &Dist) -> Result<JointDist> {
        if p.alphabet() != self.input.as_slice() {
            return Err(Error::MismatchedAlphabets);
        }
        Ok(self.joint_vec(p.probs()))
    }

    pub(crate) fn joint_vec(&self, p: &[f64]) -> JointDist {
        let mass = p
            .iter()
            .zip(&self.rows)
            .map(|(&px, row)| row.iter().map(|&w| px * w).collect())
            .collect();
        JointDist::from_parts_unchecked(self.input.clone(), self.output.clone(), mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_mass() {
        assert!(Dist::from_probs(vec![0.5, 0.6]).is_err());
        assert!(Dist::from_probs(vec![1.2, -0.2]).is_err());
        assert!(Dist::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]).is_err());
        assert!(Dist::new_normalized(vec!["a".into(), "b".into()], vec![1.0, 3.0]).is_ok());
    }

    #[test]
    fn marginals_of_product() {
        let p = Dist::from_probs(vec![0.5, 0.5]).unwrap();
        let q = Dist::from_probs(vec![0.25, 0.75]).unwrap();
        let j = JointDist::product(&p, &q);
        assert_eq!(j.row_marginal().probs(), p.probs());
        assert_eq!(j.col_marginal().probs(), q.probs());
    }

    #[test]
    fn channel_apply() {
        let w = Channel::bsc(0.1);
        let out = w.apply(&Dist::from_probs(vec![1.0, 0.0]).unwrap()).unwrap();
        assert!((out.probs()[1] - 0.1).abs() < 1e-15);
        assert!(Channel::from_rows(vec![vec![0.5, 0.4]]).is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let d: Dist = serde_json::from_str(r#"{"alphabet":["a","b"],"probs":[0.25,0.75]}"#).unwrap();
        assert_eq!(d.probs(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<Dist>(r#"{"alphabet":["a","b"],"probs":[0.25,0.7]}"#).is_err());
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<Dist>(&s).unwrap(), d);
    }
}
