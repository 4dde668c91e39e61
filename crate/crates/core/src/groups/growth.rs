use super::bfs::LengthIndex;
use super::spec::{GroupKind, GroupSpec};
use crate::error::{Error, Result};

/// Sphere sizes `|S_0|, ..., |S_N|`.
///
/// Uses closed forms for standard generating sets of `Z^d`, `F_r`, `C_m` and
/// their products; otherwise reads them off `index`.
pub fn sphere_sizes(spec: &GroupSpec, radius: u32, index: Option<&LengthIndex>) -> Result<Vec<u128>> {
    if spec.is_standard() {
        if let Some(s) = closed_form_spheres(spec.kind(), radius as usize)? {
            return Ok(s);
        }
    }
    let ix = index.ok_or_else(|| Error::IndexRequired {
        group: spec.descriptor(),
    })?;
    if ix.spec() != spec {
        return Err(Error::SpecMismatch {
            left: spec.descriptor(),
            right: ix.spec().descriptor(),
        });
    }
    if ix.radius() < radius {
        return Err(Error::IndexTooSmall {
            needed: radius,
            available: ix.radius(),
        });
    }
    Ok(ix.sphere_sizes()[..=radius as usize]
        .iter()
        .map(|&s| s as u128)
        .collect())
}

/// Ball sizes `|B_0|, ..., |B_N|`; same sources as [`sphere_sizes`].
pub fn ball_sizes(spec: &GroupSpec, radius: u32, index: Option<&LengthIndex>) -> Result<Vec<u128>> {
    let spheres = sphere_sizes(spec, radius, index)?;
    let mut acc = 0u128;
    spheres
        .into_iter()
        .map(|s| {
            acc = acc.checked_add(s).ok_or(Error::Overflow("ball size"))?;
            Ok(acc)
        })
        .collect()
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn closed_form_spheres(kind: &GroupKind, radius: usize) -> Result<Option<Vec<u128>>> {
    let overflow = || Error::Overflow("sphere size");
    let out = match kind {
        GroupKind::FreeAbelian { rank } => {
            let d = *rank as u128;
            let mut out = vec![1u128];
            for n in 1..=radius as u128 {
                // Vectors with exactly k nonzero entries: choose positions,
                // signs, and a composition of n into k positive parts.
                let mut total = 0u128;
                for k in 1..=d.min(n) {
                    let term = binomial(d, k)
                        .and_then(|c| c.checked_mul(1u128.checked_shl(k as u32)?))
                        .and_then(|c| c.checked_mul(binomial(n - 1, k - 1)?))
                        .ok_or_else(overflow)?;
                    total = total.checked_add(term).ok_or_else(overflow)?;
                }
                out.push(total);
            }
            out
        }
        GroupKind::Free { rank } => {
            let mut out = vec![1u128];
            let mut s = 2 * *rank as u128;
            for n in 1..=radius {
                if n > 1 {
                    s = s.checked_mul(2 * *rank as u128 - 1).ok_or_else(overflow)?;
                }
                out.push(s);
            }
            out
        }
        GroupKind::Cyclic { order } => {
            let m = *order as u128;
            (0..=radius as u128)
                .map(|n| match n {
                    0 => 1,
                    n if 2 * n < m => 2,
                    n if 2 * n == m => 1,
                    _ => 0,
                })
                .collect()
        }
        GroupKind::Heisenberg => return Ok(None),
        GroupKind::Product(fs) => {
            let mut acc = vec![0u128; radius + 1];
            acc[0] = 1;
            for f in fs {
                let Some(s) = closed_form_spheres(f, radius)? else {
                    return Ok(None);
                };
                let mut next = vec![0u128; radius + 1];
                for (i, &a) in acc.iter().enumerate() {
                    for (j, &b) in s.iter().enumerate().take(radius + 1 - i) {
                        let t = a.checked_mul(b).ok_or_else(overflow)?;
                        next[i + j] = next[i + j].checked_add(t).ok_or_else(overflow)?;
                    }
                }
                acc = next;
            }
            acc
        }
    };
    Ok(Some(out))
}
