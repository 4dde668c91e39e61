use serde::Serialize;

use super::fit::{
    fit_exponent, fit_growth, rd_constant_series_with, ConstantSeries, DivergenceRule, ExponentFit, Side,
};
use super::series::{ratio_series, RatioSeries, Witness};
use crate::error::{Error, Result};
use crate::groups::{GroupSpec, LengthIndex};
use crate::norms::NormConfig;

/// Smallest `n` used in fits; smaller balls are dominated by transients.
pub const DEFAULT_FIT_START: u32 = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub n_lo: u32,
    pub n_hi: u32,
    /// Exponents for `C_s(n)`; when empty, the ball-witness slope and that
    /// slope minus 0.1.
    pub s_values: Vec<f64>,
    pub norm: NormConfig,
    pub rule: DivergenceRule,
}

impl ReportConfig {
    pub fn new(n_lo: u32, n_hi: u32) -> ReportConfig {
        ReportConfig {
            n_lo,
            n_hi,
            s_values: Vec::new(),
            norm: NormConfig::default(),
            rule: DivergenceRule::default(),
        }
    }

    pub fn window(&self) -> (u32, u32) {
        (self.n_lo.max(DEFAULT_FIT_START), self.n_hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RdReport {
    pub group: String,
    pub generators: Vec<String>,
    pub window: (u32, u32),
    /// `log γ(n)` against `log(1+n)`.
    pub growth_fit: ExponentFit,
    pub ball_series: RatioSeries,
    pub sphere_series: RatioSeries,
    pub ball_fit: ExponentFit,
    pub sphere_fit: ExponentFit,
    pub constants: Vec<ConstantSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
}

impl RdReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Ball and sphere witness series over `[n_lo, n_hi]` with their fits and
/// constant series.
pub fn build_report(spec: &GroupSpec, cfg: &ReportConfig, index: Option<&LengthIndex>) -> Result<RdReport> {
    if cfg.n_lo > cfg.n_hi {
        return Err(Error::InvalidParameter(format!(
            "empty range {}:{}",
            cfg.n_lo, cfg.n_hi
        )));
    }
    let window = cfg.window();
    let ns: Vec<u32> = (cfg.n_lo.max(1)..=cfg.n_hi).collect();
    let growth_fit = fit_growth(spec, window, index)?;
    let ball_series = ratio_series(spec, Witness::Ball, &ns, &cfg.norm, index)?;
    let sphere_series = ratio_series(spec, Witness::Sphere, &ns, &cfg.norm, index)?;
    let ball_fit = fit_exponent(&ball_series, window, Side::Lower)?;
    let sphere_fit = fit_exponent(&sphere_series, window, Side::Lower)?;
    let s_values = if cfg.s_values.is_empty() {
        vec![ball_fit.slope, ball_fit.slope - 0.1]
    } else {
        cfg.s_values.clone()
    };
    let constants = s_values
        .iter()
        .map(|&s| rd_constant_series_with(&ball_series, s, &cfg.rule))
        .collect::<Result<Vec<_>>>()?;
    Ok(RdReport {
        group: spec.descriptor(),
        generators: spec.generators().iter().map(|g| spec.key(g)).collect(),
        window,
        growth_fit,
        ball_series,
        sphere_series,
        ball_fit,
        sphere_fit,
        constants,
        manifest: None,
    })
}
