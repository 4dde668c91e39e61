use serde::Serialize;

use super::lemmas::verify_doubling;
use super::series::sphere_sizes_f64;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::groups::{ball_sizes, GroupSpec, LengthIndex};
use crate::norms::RadialElement;

/// `Z^K_r(α) = Σ_{k=1..K} k^{−α} χ(B_{rk})/‖χ(B_{rk})‖_2`.
///
/// Stored by word length: the coefficient on `g` depends only on `|g|`, and
/// for free groups `B_{rK}` is far too large to hold explicitly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZSeries {
    pub group: String,
    pub r: u32,
    pub alpha: f64,
    pub k_max: u32,
    /// Coefficient on elements of length `ℓ = 0..=rK`.
    pub profile: Vec<f64>,
    /// `|S_ℓ|` for `ℓ = 0..=rK`.
    pub sphere_sizes: Vec<f64>,
    #[serde(skip)]
    spec: GroupSpec,
}

/// `‖χ(B_{rk})‖_2` for `k = 1..=K`, at index `k − 1`.
pub(crate) fn ball_l2_norms(spec: &GroupSpec, r: u32, k_max: u32, index: Option<&LengthIndex>) -> Result<Vec<f64>> {
    let radius = r.checked_mul(k_max).ok_or(Error::Overflow("r·K"))?;
    if let Some(rank) = spec.standard_free_rank() {
        // |B_n| = (r(2r−1)^n − 1)/(r − 1) for r ≥ 2, and 2n + 1 for r = 1.
        let q = (2 * rank - 1) as f64;
        return Ok((1..=k_max)
            .map(|k| {
                let n = (r * k) as f64;
                let g = if rank == 1 {
                    2.0 * n + 1.0
                } else {
                    (rank as f64 * q.powf(n) - 1.0) / (rank as f64 - 1.0)
                };
                g.sqrt()
            })
            .collect());
    }
    let balls = ball_sizes(spec, radius, index)?;
    Ok((1..=k_max).map(|k| (balls[(r * k) as usize] as f64).sqrt()).collect())
}

fn check_params(r: u32, k_max: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if k_max == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    Ok(())
}

/// Builds `Z^K_r(α)`; needs `index` only when the group has no closed-form
/// growth.
pub fn build_z_series(
    spec: &GroupSpec,
    r: u32,
    alpha: f64,
    k_max: u32,
    index: Option<&LengthIndex>,
) -> Result<ZSeries> {
    check_params(r, k_max)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let norms = ball_l2_norms(spec, r, k_max, index)?;
    let radius = r * k_max;
    let sizes = sphere_sizes_f64(spec, radius, index)?;
    // suffix[k] = Σ_{k ≤ k' ≤ K} k'^{−α}/‖χ(B_{rk'})‖_2.
    let mut suffix = vec![0.0; k_max as usize + 2];
    for k in (1..=k_max as usize).rev() {
        suffix[k] = suffix[k + 1] + (k as f64).powf(-alpha) / norms[k - 1];
    }
    let profile = (0..=radius).map(|l| suffix[l.div_ceil(r).max(1) as usize]).collect();
    Ok(ZSeries {
        group: spec.descriptor(),
        r,
        alpha,
        k_max,
        profile,
        sphere_sizes: sizes,
        spec: spec.clone(),
    })
}

impl ZSeries {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn support_radius(&self) -> u32 {
        self.r * self.k_max
    }

    /// `‖Z‖_2`.
    pub fn l2_norm(&self) -> f64 {
        self.weighted_l2(0.0)
    }

    /// `‖Z‖_{2,t} = (Σ_g Z(g)²(1+|g|)^{2t})^{1/2}`.
    pub fn weighted_l2(&self, t: f64) -> f64 {
        self.profile
            .iter()
            .zip(&self.sphere_sizes)
            .enumerate()
            .map(|(l, (c, s))| c * c * s * (1.0 + l as f64).powf(2.0 * t))
            .sum::<f64>()
            .sqrt()
    }

    /// The series as an explicit element over the balls of `index`.
    pub fn to_element(&self, index: &LengthIndex) -> Result<AlgebraElement> {
        let radius = self.support_radius();
        if index.radius() < radius {
            return Err(Error::IndexTooSmall {
                needed: radius,
                available: index.radius(),
            });
        }
        let terms = (0..=radius).flat_map(|l| {
            index
                .sphere(l)
                .iter()
                .map(move |g| (g.clone(), self.profile[l as usize]))
        });
        AlgebraElement::from_coeffs(&self.spec, terms, Some(index))
    }

    /// The series as a radial element, for standard free groups.
    pub fn to_radial(&self) -> Option<RadialElement> {
        let rank = self.spec.standard_free_rank()?;
        RadialElement::from_sphere_coeffs(rank, &self.profile).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZL2Bounds {
    /// `Σ_{k≤K} k^{−2α}`.
    pub lower: f64,
    /// `‖Z^K_r(α)‖_2²`.
    pub actual: f64,
    /// `4Σ_{k≤K} k^{−2α}`, valid when the balls double.
    pub upper: f64,
    pub doubling_ok: bool,
    pub doubling_min_ratio: Option<f64>,
}

/// The squared-norm sandwich for `Z^K_r(α)`. The doubling flag is false
/// when `‖χ(B_{r(k+1)})‖_2 ≥ 2‖χ(B_{rk})‖_2` fails for some `k ≤ K` or
/// cannot be checked with the available sizes.
pub fn z_l2_bounds(z: &ZSeries, index: Option<&LengthIndex>) -> ZL2Bounds {
    let lower: f64 = (1..=z.k_max).map(|k| (k as f64).powf(-2.0 * z.alpha)).sum();
    let doubling = verify_doubling(&z.spec, z.r, z.k_max, index).ok();
    ZL2Bounds {
        lower,
        actual: z.l2_norm().powi(2),
        upper: 4.0 * lower,
        doubling_ok: doubling.as_ref().is_some_and(|d| d.holds),
        doubling_min_ratio: doubling.map(|d| d.min_ratio),
    }
}
