//! Concrete finitely generated groups.
//!
//! Every group here has a canonical normal form for its elements, so that
//! equality of group elements is equality of values. The supported families
//! are free abelian groups `Z^d`, the discrete Heisenberg group `H3`, free
//! groups `F_r`, finite cyclic groups `C_m` and finite direct products of
//! these.

mod bfs;
pub mod cache;
mod element;
mod embed;
mod growth;
mod spec;

pub use bfs::{enumerate_balls, enumerate_balls_with_budget, LengthIndex, DEFAULT_BALL_BUDGET};
pub use element::GroupElement;
pub use embed::Embedding;
pub use growth::{ball_sizes, sphere_sizes};
pub use spec::{GroupKind, GroupSpec};

use crate::error::{Error, Result};

/// Product `g·h`.
pub fn multiply(spec: &GroupSpec, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    spec.check(g)?;
    spec.check(h)?;
    Ok(spec.mul(g, h))
}

/// Inverse `g⁻¹`.
pub fn inverse(spec: &GroupSpec, g: &GroupElement) -> Result<GroupElement> {
    spec.check(g)?;
    Ok(spec.inv(g))
}

/// Word length of `g` with respect to the generating set of `spec`.
///
/// Closed forms are used for standard generating sets of `Z^d`, `F_r`, `C_m`
/// and their products. Anything involving `H3`, or a non-standard generating
/// set, needs a [`LengthIndex`] that contains `g`.
pub fn word_length(spec: &GroupSpec, g: &GroupElement, index: Option<&LengthIndex>) -> Result<u32> {
    spec.check(g)?;
    if let Some(len) = spec.closed_form_length(g) {
        return Ok(len);
    }
    match index {
        Some(ix) => {
            if ix.spec() != spec {
                return Err(Error::SpecMismatch {
                    left: spec.descriptor(),
                    right: ix.spec().descriptor(),
                });
            }
            ix.length(g).ok_or_else(|| Error::OutsideIndex {
                element: spec.key(g),
                radius: ix.radius(),
            })
        }
        None => Err(Error::IndexRequired {
            group: spec.descriptor(),
        }),
    }
}

/// Integer power `g^n` by repeated squaring.
pub fn power(spec: &GroupSpec, g: &GroupElement, n: i64) -> GroupElement {
    let mut base = if n < 0 { spec.inv(g) } else { g.clone() };
    let mut e = n.unsigned_abs();
    let mut acc = spec.identity();
    while e > 0 {
        if e & 1 == 1 {
            acc = spec.mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = spec.mul(&base, &base);
        }
    }
    acc
}

#[cfg(test)]
mod tests;
