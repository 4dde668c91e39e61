//! Brackets `lower ≤ ‖a‖ ≤ upper` for the operator norm of left convolution
//! by `a` on `ℓ²Γ`.

mod power;
mod radial;
mod trace;


use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, NormKind};
use crate::error::{Error, Result};
use crate::groups::LengthIndex;

pub use power::op_norm_power_iteration;
pub use radial::{radial_convolve, RadialElement};
pub use trace::{op_norm_trace_moments, op_norm_trace_power, radial_trace_moments, radial_trace_power, TraceOptions};

/// Default support limit for trace-power squaring.
pub const DEFAULT_TRACE_BUDGET: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TracePower,
    PowerIteration,
    AmenableExact,
    L1Bound,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::TracePower => "trace_power",
            Method::PowerIteration => "power_iteration",
            Method::AmenableExact => "amenable_exact",
            Method::L1Bound => "l1_bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    pub steps: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Intercept of `log(step)` against `1/k` over the last half of the
    /// steps. A diagnostic only; never used as a bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolated: Option<f64>,
}

impl NormEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimate serializes")
    }
}

/// `‖a‖ = ‖a‖_1` for nonnegative `a` on an amenable group.
pub fn op_norm_positive_amenable(a: &AlgebraElement) -> Result<NormEstimate> {
    if !a.spec().is_amenable() {
        return Err(Error::NotAmenable(a.spec().descriptor()));
    }
    if let Some((g, c)) = a.iter().find(|(_, c)| *c < 0.0) {
        return Err(Error::NegativeCoefficient {
            element: a.spec().key(g),
            value: c,
        });
    }
    let v = a.norm(NormKind::L1, None)?;
    Ok(NormEstimate {
        lower: v,
        upper: v,
        method: Method::AmenableExact,
        steps: vec![v],
        iterations: 0,
        converged: true,
        extrapolated: None,
    })
}

/// The trivial bracket `‖a‖_2 ≤ ‖a‖ ≤ ‖a‖_1`.
pub fn op_norm_l1_bound(a: &AlgebraElement) -> NormEstimate {
    let lower = a.norm(NormKind::L2, None).expect("plain norms need no index");
    let upper = a.norm(NormKind::L1, None).expect("plain norms need no index");
    NormEstimate {
        lower,
        upper,
        method: Method::L1Bound,
        steps: vec![lower],
        iterations: 0,
        converged: false,
        extrapolated: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    /// Exact when amenable and positive, otherwise trace power (radial when
    /// possible), falling back to the `ℓ¹` bracket if even `a*∗a` is over
    /// budget.
    Auto,
    Exact,
    Trace,
    Power,
}

impl std::str::FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<MethodChoice> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "exact" => Ok(MethodChoice::Exact),
            "trace" => Ok(MethodChoice::Trace),
            "power" => Ok(MethodChoice::Power),
            _ => Err(Error::Parse {
                what: "norm method",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormConfig {
    pub method: MethodChoice,
    pub trace_depth: u32,
    pub budget: usize,
    pub power_iters: usize,
    /// Domain radius for power iteration; defaults to the largest radius the
    /// index allows.
    pub power_radius: Option<u32>,
    pub seed: u64,
    pub extrapolate: bool,
}

impl Default for NormConfig {
    fn default() -> NormConfig {
        NormConfig {
            method: MethodChoice::Auto,
            trace_depth: 7,
            budget: DEFAULT_TRACE_BUDGET,
            power_iters: 200,
            power_radius: None,
            seed: 0,
            extrapolate: false,
        }
    }
}

impl NormConfig {
    fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            budget: self.budget,
            extrapolate: self.extrapolate,
        }
    }
}

/// Estimates `‖a‖` with the configured method.
pub fn estimate(a: &AlgebraElement, cfg: &NormConfig, index: Option<&LengthIndex>) -> Result<NormEstimate> {
    match cfg.method {
        MethodChoice::Exact => op_norm_positive_amenable(a),
        MethodChoice::Trace => trace::trace_power_with(a, cfg.trace_depth, &cfg.trace_options()),
        MethodChoice::Power => {
            let index = index.ok_or_else(|| Error::IndexRequired {
                group: a.spec().descriptor(),
            })?;
            let radius = match cfg.power_radius {
                Some(r) => r,
                None => index.radius().saturating_sub(a.support_radius()),
            };
            op_norm_power_iteration(a, radius, cfg.power_iters, cfg.seed, index)
        }
        MethodChoice::Auto => {
            if a.spec().is_amenable() && a.is_nonnegative() {
                return op_norm_positive_amenable(a);
            }
            match trace::trace_power_with(a, cfg.trace_depth, &cfg.trace_options()) {
                Err(Error::BudgetExceeded { .. }) => Ok(op_norm_l1_bound(a)),
                other => other,
            }
        }
    }
}

/// Estimates the norm of a radial element; `Power` and `Exact` are not
/// available on this path.
pub fn estimate_radial(x: &RadialElement, cfg: &NormConfig) -> Result<NormEstimate> {
    match cfg.method {
        MethodChoice::Auto | MethodChoice::Trace => radial_trace_power(x, cfg.trace_depth, &cfg.trace_options()),
        MethodChoice::Exact => {
            if x.rank() > 1 {
                return Err(Error::NotAmenable(format!("F{}", x.rank())));
            }
            if !x.is_nonnegative() {
                return Err(Error::InvalidParameter(
                    "exact norm needs nonnegative coefficients".into(),
                ));
            }
            let v = x.l1_norm();
            Ok(NormEstimate {
                lower: v,
                upper: v,
                method: Method::AmenableExact,
                steps: vec![v],
                iterations: 0,
                converged: true,
                extrapolated: None,
            })
        }
        MethodChoice::Power => Err(Error::InvalidParameter(
            "power iteration needs an explicit element and a ball index".into(),
        )),
    }
}
