//! Power-law fits in log-log space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub amplitude: f64,
    pub mu: f64,
    /// Sum of squared residuals of `ln S`.
    pub residual: f64,
    #[serde(rename = "L_min")]
    pub l_min: f64,
    pub points: usize,
}

impl PowerFit {
    pub fn eval(&self, l: f64) -> f64 {
        self.amplitude * l.powf(self.mu)
    }
}

/// Least-squares line through `(ln L, ln S)` for the points with `L ≥ l_min`
/// and `S > 0`.
pub fn fit_power_law(points: &[(f64, f64)], l_min: f64) -> Result<PowerFit> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(l, s)| l >= l_min && l > 0.0 && s > 0.0 && s.is_finite())
        .map(|&(l, s)| (l.ln(), s.ln()))
        .collect();
    if used.len() < 3 {
        return Err(Error::Diagnostic(format!(
            "power-law fit needs 3 points with L >= {l_min} and S > 0, got {}",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Diagnostic("power-law fit needs distinct L values".into()));
    }
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let mu = sxy / sxx;
    let intercept = my - mu * mx;
    let residual = used
        .iter()
        .map(|p| (p.1 - intercept - mu * p.0).powi(2))
        .sum();
    Ok(PowerFit {
        amplitude: intercept.exp(),
        mu,
        residual,
        l_min,
        points: used.len(),
    })
}
