use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, NormKind};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, LengthIndex};

use super::{Method, NormEstimate};

const RELATIVE_TOLERANCE: f64 = 1e-10;

/// Largest singular value of `v ↦ a∗v` restricted to `ℓ²(B_R)`, by power
/// iteration on `v ↦ truncate_{B_R}(a*∗(a∗v))` from a ChaCha8 start seeded
/// with `seed`. Always a lower bound for `‖a‖`.
pub fn op_norm_power_iteration(
    a: &AlgebraElement,
    radius: u32,
    iters: usize,
    seed: u64,
    index: &LengthIndex,
) -> Result<NormEstimate> {
    let s = a.support_radius();
    if radius < s {
        return Err(Error::InvalidParameter(format!(
            "domain radius {radius} is below the support radius {s}"
        )));
    }
    if index.spec() != a.spec() {
        return Err(Error::SpecMismatch {
            left: a.spec().descriptor(),
            right: index.spec().descriptor(),
        });
    }
    if index.radius() < radius + s {
        return Err(Error::IndexTooSmall {
            needed: radius + s,
            available: index.radius(),
        });
    }
    if iters == 0 {
        return Err(Error::InvalidParameter(
            "power iteration needs at least one iteration".into(),
        ));
    }
    let upper = a.norm(NormKind::L1, None)?;
    let spec = a.spec();
    let domain: Vec<&GroupElement> = index.ball(radius).collect();
    // Column x of L holds a∗δ_x = Σ_g a(g) δ_{gx}.
    let mut rows: HashMap<GroupElement, u32> = HashMap::new();
    let mut columns: Vec<Vec<(u32, f64)>> = Vec::with_capacity(domain.len());
    for x in &domain {
        let col = a
            .iter()
            .map(|(g, c)| {
                let p = spec.mul(g, x);
                let next = rows.len() as u32;
                (*rows.entry(p).or_insert(next), c)
            })
            .collect();
        columns.push(col);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..domain.len()).map(|_| rng.gen::<f64>() + 0.5).collect();
    normalize(&mut v);
    let mut w = vec![0.0; rows.len()];
    let mut steps = Vec::new();
    let mut prev: Option<f64> = None;
    let mut converged = false;
    let mut done = 0;
    for _ in 0..iters {
        w.iter_mut().for_each(|t| *t = 0.0);
        for (col, &vx) in columns.iter().zip(&v) {
            for &(r, c) in col {
                w[r as usize] += c * vx;
            }
        }
        let rayleigh: f64 = w.iter().map(|t| t * t).sum();
        steps.push(rayleigh.sqrt());
        done += 1;
        if let Some(p) = prev {
            if (rayleigh - p).abs() <= RELATIVE_TOLERANCE * rayleigh.abs() {
                converged = true;
                break;
            }
        }
        prev = Some(rayleigh);
        for (col, vx) in columns.iter().zip(v.iter_mut()) {
            *vx = col.iter().map(|&(r, c)| c * w[r as usize]).sum();
        }
        if normalize(&mut v) == 0.0 {
            converged = true;
            break;
        }
    }
    let last = *steps.last().expect("at least one iteration");
    Ok(NormEstimate {
        lower: last.min(upper),
        upper,
        method: Method::PowerIteration,
        steps,
        iterations: done,
        converged,
        extrapolated: None,
    })
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|t| *t /= n);
    }
    n
}
