use serde::{Deserialize, Serialize};

use super::series::{RatioSeries, Witness};
use crate::error::{Error, Result};
use crate::groups::{ball_sizes, GroupSpec, LengthIndex};

/// Which side of the norm bracket a fit or constant is computed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

/// Least-squares line `log(value) = intercept + slope·log(1+n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub r2: f64,
    pub window_lo: u32,
    pub window_hi: u32,
    pub points: usize,
}

impl ExponentFit {
    /// `C = exp(intercept)`.
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Fits `log(values)` against `log(1+n)` for the points with `n` in
/// `[lo, hi]`.
pub fn fit_log_log(points: &[(u32, f64)], window: (u32, u32)) -> Result<ExponentFit> {
    let (lo, hi) = window;
    let pts: Vec<(u32, f64)> = points.iter().copied().filter(|(n, _)| *n >= lo && *n <= hi).collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateWindow(format!(
            "[{lo}, {hi}] holds {} points, need at least 3",
            pts.len()
        )));
    }
    if let Some((n, v)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::DegenerateWindow(format!("value {v} at n = {n} is not positive")));
    }
    let xs: Vec<f64> = pts.iter().map(|(n, _)| (1.0 + *n as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateWindow("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let total: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if total > 0.0 {
        (1.0 - residual / total).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
        r2,
        window_lo: pts.first().unwrap().0,
        window_hi: pts.last().unwrap().0,
        points: pts.len(),
    })
}

fn side_points(series: &RatioSeries, which: Side) -> Vec<(u32, f64)> {
    series
        .entries
        .iter()
        .map(|e| {
            (
                e.n,
                match which {
                    Side::Lower => e.ratio_lower,
                    Side::Upper => e.ratio_upper,
                },
            )
        })
        .collect()
}

/// Exponent `s` in `ratio(n) ≈ C(1+n)^s` over the window.
pub fn fit_exponent(series: &RatioSeries, window: (u32, u32), which: Side) -> Result<ExponentFit> {
    fit_log_log(&side_points(series, which), window)
}

/// Growth exponent: `log γ(n)` against `log(1+n)` over the window.
pub fn fit_growth(spec: &GroupSpec, window: (u32, u32), index: Option<&LengthIndex>) -> Result<ExponentFit> {
    let sizes = ball_sizes(spec, window.1, index)?;
    let pts: Vec<(u32, f64)> = sizes.iter().enumerate().map(|(n, g)| (n as u32, *g as f64)).collect();
    fit_log_log(&pts, window)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Divergent,
    BoundedTrend,
}

/// Thresholds for calling a constant series divergent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRule {
    /// The series must be nondecreasing on this trailing fraction.
    pub tail_fraction: f64,
    /// Required `last/first`.
    pub min_growth: f64,
}

impl Default for DivergenceRule {
    fn default() -> DivergenceRule {
        DivergenceRule {
            tail_fraction: 0.5,
            min_growth: 1.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantSeries {
    pub group: String,
    pub witness: Witness,
    pub s: f64,
    pub values: Vec<(u32, f64)>,
    pub tail_nondecreasing: bool,
    pub growth: f64,
    pub verdict: Verdict,
}

impl ConstantSeries {
    pub fn value(&self, n: u32) -> Option<f64> {
        self.values.iter().find(|(m, _)| *m == n).map(|(_, c)| *c)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().map(|(_, c)| *c).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `C_s(n) = ratio_lower(n)/(1+n)^s` with the default divergence rule.
pub fn rd_constant_series(series: &RatioSeries, s: f64) -> Result<ConstantSeries> {
    rd_constant_series_with(series, s, &DivergenceRule::default())
}

pub fn rd_constant_series_with(series: &RatioSeries, s: f64, rule: &DivergenceRule) -> Result<ConstantSeries> {
    if series.entries.is_empty() {
        return Err(Error::InvalidParameter("empty ratio series".into()));
    }
    let values: Vec<(u32, f64)> = series
        .entries
        .iter()
        .map(|e| (e.n, e.ratio_lower / (1.0 + e.n as f64).powf(s)))
        .collect();
    let len = values.len();
    let keep = ((len as f64 * rule.tail_fraction).ceil() as usize).clamp(1, len);
    let tail = &values[len - keep..];
    let tail_nondecreasing = tail.windows(2).all(|w| w[1].1 >= w[0].1);
    let growth = values[len - 1].1 / values[0].1;
    let verdict = if tail_nondecreasing && growth >= rule.min_growth {
        Verdict::Divergent
    } else {
        Verdict::BoundedTrend
    };
    Ok(ConstantSeries {
        group: series.group.clone(),
        witness: series.witness,
        s,
        values,
        tail_nondecreasing,
        growth,
        verdict,
    })
}

/// `C′ = 2^s·C·(1 − 4^{−ε})^{−1/2}`, the constant for
/// `‖a‖ ≤ C′‖a‖_{2,s+ε}` obtained by splitting `a` over dyadic annuli.
pub fn delocalize_constant(c: f64, s: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!("C must be nonnegative, got {c}")));
    }
    Ok(2f64.powf(s) * c / (1.0 - 4f64.powf(-eps)).sqrt())
}
