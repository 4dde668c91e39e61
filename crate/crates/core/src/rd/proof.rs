use serde::{Deserialize, Serialize};

use super::lemmas::{verify_doubling, DoublingCheck};
use super::zseries::build_z_series;
use crate::error::{Error, Result};
use crate::groups::{GroupSpec, LengthIndex};

/// Slack allowed on `α + β − 1 ≤ ½` so that decimal inputs such as
/// `0.96 + 0.54` are accepted.
const BOUNDARY_SLACK: f64 = 1e-12;

/// `s < t < ½`, `α > ½ + t`, `β > ½`, `α + β − 1 ≤ ½`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofParameters {
    pub s: f64,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ProofParameters {
    pub fn new(s: f64, t: f64, alpha: f64, beta: f64) -> Result<ProofParameters> {
        let p = ProofParameters { s, t, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ProofParameters { s, t, alpha, beta } = *self;
        let fail = |m: String| Err(Error::InvalidParameter(m));
        if !(s >= 0.0) {
            return fail(format!("s must be nonnegative, got {s}"));
        }
        if !(t > s) {
            return fail(format!("t must exceed s (t = {t}, s = {s})"));
        }
        if !(t < 0.5) {
            return fail(format!("t must be below 1/2, got {t}"));
        }
        if !(alpha > 0.5 + t) {
            return fail(format!("alpha must exceed 1/2 + t = {}, got {alpha}", 0.5 + t));
        }
        if !(beta > 0.5) {
            return fail(format!("beta must exceed 1/2, got {beta}"));
        }
        if !(alpha + beta - 1.0 <= 0.5 + BOUNDARY_SLACK) {
            return fail(format!(
                "alpha + beta - 1 must be at most 1/2, got {}",
                alpha + beta - 1.0
            ));
        }
        Ok(())
    }
}

/// `ζ(x)` for `x > 1` by Euler–Maclaurin summation after 16 terms.
pub fn zeta(x: f64) -> f64 {
    assert!(x > 1.0, "zeta needs x > 1");
    const N: f64 = 16.0;
    let head: f64 = (1..16).map(|k| (k as f64).powf(-x)).sum();
    // Bernoulli corrections B_2/2!, B_4/4!, B_6/6!, B_8/8!.
    let b = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let mut tail = N.powf(1.0 - x) / (x - 1.0) + 0.5 * N.powf(-x);
    let mut rising = x;
    for (i, c) in b.iter().enumerate() {
        tail += c * rising * N.powf(-x - (2 * i + 1) as f64);
        let m = (2 * i + 1) as f64;
        rising *= (x + m) * (x + m + 1.0);
    }
    head + tail
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedStep {
    /// `‖Z^K(α)‖_{2,t}`.
    pub weighted: f64,
    /// `(2r)^t‖Z^K(α−t)‖_2`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergentStep {
    /// `‖Z^K(β)‖_2²`.
    pub actual: f64,
    /// `4Σ_{k≤K} k^{−2β}`.
    pub truncated_bound: f64,
    /// `4ζ(2β)`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContradictionReport {
    pub group: String,
    pub params: ProofParameters,
    pub r: u32,
    pub k_max: u32,
    pub doubling: DoublingCheck,
    pub weighted: WeightedStep,
    pub convergent: ConvergentStep,
    /// `2(α+β−1)`.
    pub divergent_exponent: f64,
    /// `(k, Σ_{j≤k} j^{−2(α+β−1)})`.
    pub divergent_partial_sums: Vec<(u32, f64)>,
}

/// Numerical trace of the argument that no `s < ½` works for a group whose
/// balls of radius `rk` double: the weighted-norm step, the convergent
/// `ℓ²` bound for `Z(β)`, and the partial sums of `‖Z(α+β−1)‖_2²`, which
/// grow without bound.
pub fn contradiction_trace(
    spec: &GroupSpec,
    params: &ProofParameters,
    r: u32,
    k_max: u32,
    index: Option<&LengthIndex>,
) -> Result<ContradictionReport> {
    params.validate()?;
    let doubling = verify_doubling(spec, r, k_max, index)?;
    if !doubling.holds {
        return Err(Error::DoublingFailed {
            r,
            min_ratio: doubling.min_ratio,
        });
    }
    let ProofParameters { t, alpha, beta, .. } = *params;
    let za = build_z_series(spec, r, alpha, k_max, index)?;
    let zat = build_z_series(spec, r, alpha - t, k_max, index)?;
    let weighted = za.weighted_l2(t);
    let bound = (2.0 * r as f64).powf(t) * zat.l2_norm();
    let zb = build_z_series(spec, r, beta, k_max, index)?;
    let actual = zb.l2_norm().powi(2);
    let truncated: f64 = (1..=k_max).map(|k| (k as f64).powf(-2.0 * beta)).sum();
    let zeta_bound = 4.0 * zeta(2.0 * beta);
    let e = 2.0 * (alpha + beta - 1.0);
    let mut acc = 0.0;
    let divergent_partial_sums = (1..=k_max)
        .map(|k| {
            acc += (k as f64).powf(-e);
            (k, acc)
        })
        .collect();
    Ok(ContradictionReport {
        group: spec.descriptor(),
        params: *params,
        r,
        k_max,
        doubling,
        weighted: WeightedStep {
            weighted,
            bound,
            holds: weighted <= bound * (1.0 + 1e-12),
        },
        convergent: ConvergentStep {
            actual,
            truncated_bound: 4.0 * truncated,
            bound: zeta_bound,
            holds: actual <= 4.0 * truncated * (1.0 + 1e-12),
        },
        divergent_exponent: e,
        divergent_partial_sums,
    })
}
