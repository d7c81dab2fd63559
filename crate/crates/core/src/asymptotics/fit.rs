use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which quantity decays exponentially: v itself or 1 − v.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesTransform {
    Value,
    Complement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSeries {
    pub points: Vec<(usize, f64)>,
    pub transform: SeriesTransform,
}

impl ExponentSeries {
    pub fn new(points: Vec<(usize, f64)>, transform: SeriesTransform) -> Result<Self> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParameter("series n must be strictly increasing".into()));
        }
        if points.iter().any(|&(_, v)| !(v > 0.0 && v <= 1.0)) {
            return Err(Error::InvalidParameter("series values must lie in (0, 1]".into()));
        }
        Ok(ExponentSeries { points, transform })
    }

    pub fn transformed(&self, v: f64) -> f64 {
        match self.transform {
            SeriesTransform::Value => v,
            SeriesTransform::Complement => 1.0 - v,
        }
    }

    /// (n, −log transform(v)) pairs.
    pub fn log_points(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|&(n, v)| (n as f64, -self.transformed(v).ln())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least-squares line through (n, −log transform(v_n)); the slope estimates the exponent.
pub fn exponent_fit(series: &ExponentSeries) -> Result<ExponentFit> {
    let pts = series.log_points();
    if pts.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: pts.len() });
    }
    if pts.iter().any(|(_, y)| !y.is_finite()) {
        return Err(Error::InvalidParameter("transformed series value is 0; log is infinite".into()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_tot > 1e-300 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(ExponentFit { slope, intercept, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob_core::{chernoff_information, overlap_product_exact, tv_product_exact, Dist};
    use crate::Base;
    use approx::assert_abs_diff_eq;

    #[test]
    fn synthetic_series() {
        let s = ExponentSeries::new((1..=10).map(|n| (n, (-0.3 * n as f64).exp())).collect(), SeriesTransform::Value).unwrap();
        let f = exponent_fit(&s).unwrap();
        assert_abs_diff_eq!(f.slope, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(f.intercept, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.r2, 1.0, epsilon = 1e-12);

        let s = ExponentSeries::new((1..=6).map(|n| (n, 0.5)).collect(), SeriesTransform::Value).unwrap();
        let f = exponent_fit(&s).unwrap();
        assert_abs_diff_eq!(f.slope, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn errors() {
        let s = ExponentSeries::new(vec![(1, 0.5), (2, 0.4), (3, 0.3)], SeriesTransform::Value).unwrap();
        assert!(matches!(exponent_fit(&s), Err(Error::InsufficientData { needed: 4, got: 3 })));
        assert!(ExponentSeries::new(vec![(2, 0.5), (1, 0.4)], SeriesTransform::Value).is_err());
        assert!(ExponentSeries::new(vec![(1, 0.0)], SeriesTransform::Value).is_err());
        let s = ExponentSeries::new((1..=4).map(|n| (n, 1.0)).collect(), SeriesTransform::Complement).unwrap();
        assert!(exponent_fit(&s).is_err());
    }

    #[test]
    fn tv_series_slope_tracks_chernoff() {
        let p = Dist::from_probs(vec![0.5, 0.5]).unwrap();
        let q = Dist::from_probs(vec![0.25, 0.75]).unwrap();
        // 1 − TV(Pⁿ, Qⁿ) = Σ min(Pⁿ, Qⁿ) taken directly, far past where 1 − TV rounds to 0;
        // large n keeps the polynomial prefactor's slope contribution small
        let pts = (200..=2000).step_by(200).map(|n| (n, overlap_product_exact(&p, &q, n).unwrap())).collect();
        let s = ExponentSeries::new(pts, SeriesTransform::Value).unwrap();
        let f = exponent_fit(&s).unwrap();
        let b = chernoff_information(&p, &q, Base::Nats).unwrap();
        let short: Vec<(usize, f64)> = (4..=16).map(|n| (n, tv_product_exact(&p, &q, n).unwrap())).collect();
        let fs = exponent_fit(&ExponentSeries::new(short, SeriesTransform::Complement).unwrap()).unwrap();
        assert!(fs.slope > 0.0 && fs.slope < 2.0 * b);
        assert!((f.slope - b).abs() <= 0.1 * b, "slope {} vs {b}", f.slope);
    }
}
