use serde::Serialize;

use super::series::sphere_sizes_f64;
use super::zseries::{ball_l2_norms, build_z_series};
use crate::algebra::{AlgebraElement, Shape, GEQ_TOLERANCE};
use crate::error::{Error, Result};
use crate::groups::{word_length, GroupSpec, LengthIndex};
use crate::norms::radial_convolve;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaOneCheck {
    pub n: u32,
    pub k: u32,
    pub holds: bool,
    pub min_slack: f64,
}

fn need_radius(index: &LengthIndex, radius: u32) -> Result<()> {
    if index.radius() < radius {
        Err(Error::IndexTooSmall {
            needed: radius,
            available: index.radius(),
        })
    } else {
        Ok(())
    }
}

/// `χ(B_n)∗χ(B_{n+k}) ≥ |B_n|·χ(B_k)` on `B_k`.
pub fn verify_lemma_one(spec: &GroupSpec, n: u32, k: u32, index: &LengthIndex) -> Result<LemmaOneCheck> {
    need_radius(index, n + k)?;
    let small = AlgebraElement::characteristic(spec, &Shape::Ball(n), index)?;
    let large = AlgebraElement::characteristic(spec, &Shape::Ball(n + k), index)?;
    let region: Vec<_> = index.ball(k).collect();
    let lhs = small.convolve_on(&large, region.iter().copied())?;
    let bound = small.len() as f64;
    let min_slack = region
        .iter()
        .map(|h| lhs.coeff(h) - bound)
        .fold(f64::INFINITY, f64::min);
    Ok(LemmaOneCheck {
        n,
        k,
        holds: min_slack >= GEQ_TOLERANCE,
        min_slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaOneSweep {
    pub group: String,
    pub max_total: u32,
    pub holds: bool,
    pub min_slack: f64,
    pub worst: (u32, u32),
    pub checks: Vec<LemmaOneCheck>,
}

/// [`verify_lemma_one`] for every `n, k ≥ 0` with `n + k ≤ max_total`.
pub fn verify_lemma_one_sweep(spec: &GroupSpec, max_total: u32, index: &LengthIndex) -> Result<LemmaOneSweep> {
    need_radius(index, max_total)?;
    let mut checks = Vec::new();
    for n in 0..=max_total {
        for k in 0..=max_total - n {
            checks.push(verify_lemma_one(spec, n, k, index)?);
        }
    }
    let worst = checks
        .iter()
        .min_by(|a, b| a.min_slack.total_cmp(&b.min_slack))
        .expect("at least one check");
    Ok(LemmaOneSweep {
        group: spec.descriptor(),
        max_total,
        holds: checks.iter().all(|c| c.holds),
        min_slack: worst.min_slack,
        worst: (worst.n, worst.k),
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingCheck {
    pub r: u32,
    /// `(k, ‖χ(B_{r(k+1)})‖_2/‖χ(B_{rk})‖_2)` for `k = 1..=k_max`.
    pub ratios: Vec<(u32, f64)>,
    pub min_ratio: f64,
    pub argmin: u32,
    pub holds: bool,
}

/// Whether `‖χ(B_{r(k+1)})‖_2 ≥ 2‖χ(B_{rk})‖_2` for `1 ≤ k ≤ k_max`,
/// computed from ball sizes.
pub fn verify_doubling(spec: &GroupSpec, r: u32, k_max: u32, index: Option<&LengthIndex>) -> Result<DoublingCheck> {
    if r == 0 || k_max == 0 {
        return Err(Error::InvalidParameter("r and k_max must be at least 1".into()));
    }
    let norms = ball_l2_norms(spec, r, k_max + 1, index)?;
    let ratios: Vec<(u32, f64)> = (1..=k_max)
        .map(|k| (k, norms[k as usize] / norms[k as usize - 1]))
        .collect();
    let &(argmin, min_ratio) = ratios.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("k_max ≥ 1");
    Ok(DoublingCheck {
        r,
        ratios,
        min_ratio,
        argmin,
        holds: min_ratio >= 2.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralDiagnostic {
    pub j: u32,
    /// `Σ_{k=1}^{K−j} (j+k)^{−(α+β)}`.
    pub partial: f64,
    /// `j^{−(α+β−1)}/(α+β−1)`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaTwoCheck {
    pub group: String,
    pub r: u32,
    pub alpha: f64,
    pub beta: f64,
    pub k_max: u32,
    pub route: &'static str,
    pub holds: bool,
    pub min_slack: f64,
    pub diagnostics: Vec<IntegralDiagnostic>,
}

/// Finite form of the convolution bound for the `Z` series:
/// `Z^K(α)∗Z^K(β) ≥ Σ_{j,k≥1, j+k≤K} k^{−α}(j+k)^{−β} χ(B_{rj})/‖χ(B_{rj})‖_2`
/// pointwise. Both sides are radial in word length, so standard free groups
/// compare sphere coefficients; other groups need `index` to radius `rK`.
pub fn verify_lemma_two_finite(
    spec: &GroupSpec,
    r: u32,
    alpha: f64,
    beta: f64,
    k_max: u32,
    index: Option<&LengthIndex>,
) -> Result<LemmaTwoCheck> {
    if !(alpha > 0.0 && beta > 0.0 && alpha + beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need α, β > 0 and α + β > 1, got α = {alpha}, β = {beta}"
        )));
    }
    let za = build_z_series(spec, r, alpha, k_max, index)?;
    let zb = build_z_series(spec, r, beta, k_max, index)?;
    let norms = ball_l2_norms(spec, r, k_max, index)?;
    let top = r * (k_max - 1);
    // rhs[ℓ] for ℓ ≤ r(K−1): sum over j with rj ≥ ℓ.
    let mut rhs_j = vec![0.0; k_max as usize];
    for j in 1..k_max {
        let s: f64 = (1..=k_max - j)
            .map(|k| (k as f64).powf(-alpha) * ((j + k) as f64).powf(-beta))
            .sum();
        rhs_j[j as usize] = s / norms[j as usize - 1];
    }
    let rhs: Vec<f64> = (0..=top)
        .map(|l| {
            let first = l.div_ceil(r).max(1);
            (first..k_max).map(|j| rhs_j[j as usize]).sum()
        })
        .collect();
    let (route, min_slack) = if let (Some(x), Some(y)) = (za.to_radial(), zb.to_radial()) {
        let p = radial_convolve(&x, &y)?;
        let slack = (0..=top)
            .map(|l| p.sphere_coeff(l as usize) - rhs[l as usize])
            .fold(f64::INFINITY, f64::min);
        ("radial", slack)
    } else {
        let ix = index.ok_or_else(|| Error::IndexRequired {
            group: spec.descriptor(),
        })?;
        let a = za.to_element(ix)?;
        let b = zb.to_element(ix)?;
        let region: Vec<_> = ix.ball(top).collect();
        let lhs = a.convolve_on(&b, region.iter().copied())?;
        let mut slack = f64::INFINITY;
        for h in &region {
            let l = word_length(spec, h, Some(ix))?;
            slack = slack.min(lhs.coeff(h) - rhs[l as usize]);
        }
        ("explicit", slack)
    };
    let ab = alpha + beta;
    let diagnostics = (1..k_max)
        .map(|j| IntegralDiagnostic {
            j,
            partial: (1..=k_max - j).map(|k| ((j + k) as f64).powf(-ab)).sum(),
            bound: (j as f64).powf(-(ab - 1.0)) / (ab - 1.0),
        })
        .collect();
    // With K = 1 the right side is empty and the check is vacuous.
    let min_slack = if k_max == 1 { 0.0 } else { min_slack };
    Ok(LemmaTwoCheck {
        group: spec.descriptor(),
        r,
        alpha,
        beta,
        k_max,
        route,
        holds: min_slack >= GEQ_TOLERANCE,
        min_slack,
        diagnostics,
    })
}

/// Ratio of the late to the early doubling increment below which partial
/// sums are reported as converging.
pub const CONVERGING_INCREMENT_RATIO: f64 = 0.75;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicSum {
    pub group: String,
    pub d_hat: f64,
    /// `(n, S(n))` with `S(n) = Σ_{m=1..n} (1+m)^{−d̂}|S_m|`.
    pub partial_sums: Vec<(u32, f64)>,
    /// `(m, S(2m) − S(m))` for `m = ⌊N/4⌋, ⌊N/2⌋`.
    pub increments: Vec<(u32, f64)>,
    pub converging: bool,
}

impl HarmonicSum {
    pub fn sum(&self, n: u32) -> Option<f64> {
        if n == 0 {
            return Some(0.0);
        }
        self.partial_sums.iter().find(|(m, _)| *m == n).map(|(_, s)| *s)
    }
}

/// Partial sums of `Σ (1+n)^{−d̂}|S_n|` up to `N`.
pub fn harmonic_sphere_sum(
    spec: &GroupSpec,
    d_hat: f64,
    n_max: u32,
    index: Option<&LengthIndex>,
) -> Result<HarmonicSum> {
    if !(d_hat > 0.0) {
        return Err(Error::InvalidParameter(format!("d̂ must be positive, got {d_hat}")));
    }
    if n_max < 4 {
        return Err(Error::InvalidParameter("N must be at least 4".into()));
    }
    let sizes = sphere_sizes_f64(spec, n_max, index)?;
    let mut acc = 0.0;
    let partial_sums: Vec<(u32, f64)> = (1..=n_max)
        .map(|n| {
            acc += (1.0 + n as f64).powf(-d_hat) * sizes[n as usize];
            (n, acc)
        })
        .collect();
    let s = |n: u32| if n == 0 { 0.0 } else { partial_sums[n as usize - 1].1 };
    let increments: Vec<(u32, f64)> = [n_max / 4, n_max / 2].iter().map(|&m| (m, s(2 * m) - s(m))).collect();
    let converging = increments[1].1 <= CONVERGING_INCREMENT_RATIO * increments[0].1;
    Ok(HarmonicSum {
        group: spec.descriptor(),
        d_hat,
        partial_sums,
        increments,
        converging,
    })
}
