use serde::Serialize;

use super::series::{ratio_series, Witness};
use crate::algebra::{AlgebraElement, NormKind};
use crate::error::{Error, Result};
use crate::groups::{Embedding, GroupElement, LengthIndex};
use crate::norms::{estimate, NormConfig};

/// Relative slack allowed when comparing the two ratios.
const RELATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeredityEntry {
    pub n: u32,
    /// Number of `h ∈ Γ′` with `|φ(h)|_Γ ≤ n`.
    pub sub_count: usize,
    pub sub_ratio: f64,
    pub ambient_ratio: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeredityCheck {
    pub sub: String,
    pub ambient: String,
    pub holds: bool,
    pub entries: Vec<HeredityEntry>,
}

/// Compares, for each `n`, the witness `χ{h ∈ Γ′ : |φ(h)|_Γ ≤ n}` of the
/// subgroup with the ambient ball witness `χ(B_n)`.
///
/// Subgroup elements are drawn from `sub_index`. Coverage requires every
/// element on its outermost sphere to map outside `B_n` (or that sphere to be
/// empty), so that no element with a short image is missed for groups where
/// image length grows with subgroup length. Ratios are lower brackets when
/// norms are not exact.
pub fn verify_heredity(
    emb: &Embedding,
    n_list: &[u32],
    sub_index: &LengthIndex,
    ambient_index: Option<&LengthIndex>,
    cfg: &NormConfig,
) -> Result<HeredityCheck> {
    let sub = emb.sub();
    if sub_index.spec() != sub {
        return Err(Error::SpecMismatch {
            left: sub.descriptor(),
            right: sub_index.spec().descriptor(),
        });
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(Error::InvalidParameter("empty n list".into()));
    }
    let n_max = *ns.last().unwrap();
    if let Some(ix) = ambient_index {
        if ix.radius() < n_max && !emb.ambient().has_closed_form_length() {
            return Err(Error::IndexTooSmall {
                needed: n_max,
                available: ix.radius(),
            });
        }
    }
    // Images outside an ambient index that covers B_{n_max} are longer than
    // every n of interest.
    let image_length = |g: &GroupElement| match emb.ambient_length(g, ambient_index) {
        Err(Error::OutsideIndex { .. }) => Ok(u32::MAX),
        other => other,
    };
    let elems: Vec<&GroupElement> = sub_index.ball(sub_index.radius()).collect();
    let lengths = elems.iter().map(|g| image_length(g)).collect::<Result<Vec<_>>>()?;
    let outer_min = sub_index
        .sphere(sub_index.radius())
        .iter()
        .map(image_length)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min();
    if let Some(m) = outer_min {
        if m <= n_max {
            return Err(Error::Coverage(format!(
                "an element of the subgroup sphere of radius {} maps to length {m} ≤ {n_max}",
                sub_index.radius()
            )));
        }
    }
    let ambient = ratio_series(emb.ambient(), Witness::Ball, &ns, cfg, ambient_index)?;
    let mut entries = Vec::with_capacity(ns.len());
    for (&n, amb) in ns.iter().zip(&ambient.entries) {
        let members: Vec<(GroupElement, f64)> = elems
            .iter()
            .zip(&lengths)
            .filter(|(_, l)| **l <= n)
            .map(|(g, _)| ((*g).clone(), 1.0))
            .collect();
        let count = members.len();
        let sub_ratio = if sub.is_amenable() {
            (count as f64).sqrt()
        } else {
            let w = AlgebraElement::from_coeffs(sub, members, Some(sub_index))?;
            estimate(&w, cfg, Some(sub_index))?.lower / w.norm(NormKind::L2, None)?
        };
        let ambient_ratio = amb.ratio_lower;
        entries.push(HeredityEntry {
            n,
            sub_count: count,
            sub_ratio,
            ambient_ratio,
            holds: sub_ratio <= ambient_ratio * (1.0 + RELATIVE_TOLERANCE),
        });
    }
    Ok(HeredityCheck {
        sub: sub.descriptor(),
        ambient: emb.ambient().descriptor(),
        holds: entries.iter().all(|e| e.holds),
        entries,
    })
}
