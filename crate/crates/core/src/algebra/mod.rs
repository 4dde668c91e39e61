//! Finitely supported real functions on a group.
//!
//! An [`AlgebraElement`] is `a = Σ a_g g` with finitely many nonzero real
//! coefficients. Products are convolutions, `(a∗b)(h) = Σ_g a(g) b(g⁻¹h)`,
//! and inequalities between elements are pointwise.

mod json;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

pub use json::ElementJson;

use crate::error::{Error, Result};
use crate::groups::{word_length, GroupElement, GroupSpec, LengthIndex};

/// Threshold below which `pointwise_geq` reports a violation.
pub const GEQ_TOLERANCE: f64 = -1e-9;

/// Pair count above which convolution is split across threads.
const PARALLEL_PAIRS: usize = 1 << 16;
/// Outer entries per parallel chunk. Fixed so that summation order, and
/// therefore every output bit, is independent of the thread count.
const CHUNK: usize = 256;

/// Shape of a characteristic function.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Ball(u32),
    Sphere(u32),
    Point(GroupElement),
}

/// Which norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    /// `Σ |a_g|`
    L1,
    /// `(Σ |a_g|²)^½`
    L2,
    /// `(Σ |a_g|² (1+|g|)^{2s})^½`
    L2s(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    spec: GroupSpec,
    coeffs: BTreeMap<GroupElement, f64>,
    support_radius: u32,
}

impl AlgebraElement {
    pub fn zero(spec: &GroupSpec) -> AlgebraElement {
        AlgebraElement {
            spec: spec.clone(),
            coeffs: BTreeMap::new(),
            support_radius: 0,
        }
    }

    /// `δ_g`.
    pub fn delta(spec: &GroupSpec, g: GroupElement, index: Option<&LengthIndex>) -> Result<AlgebraElement> {
        AlgebraElement::from_coeffs(spec, [(g, 1.0)], index)
    }

    /// Element with the given coefficients; zeros are dropped and repeated
    /// keys are summed. The support radius is computed from word lengths.
    pub fn from_coeffs<I>(spec: &GroupSpec, coeffs: I, index: Option<&LengthIndex>) -> Result<AlgebraElement>
    where
        I: IntoIterator<Item = (GroupElement, f64)>,
    {
        let mut map = BTreeMap::new();
        for (g, c) in coeffs {
            spec.check(&g)?;
            *map.entry(g).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        let mut radius = 0;
        for g in map.keys() {
            radius = radius.max(word_length(spec, g, index)?);
        }
        Ok(AlgebraElement {
            spec: spec.clone(),
            coeffs: map,
            support_radius: radius,
        })
    }

    /// Trusted constructor; `coeffs` must be canonical and nonzero with
    /// support inside `B_{support_radius}`.
    pub(crate) fn from_parts(
        spec: &GroupSpec,
        coeffs: BTreeMap<GroupElement, f64>,
        support_radius: u32,
    ) -> AlgebraElement {
        debug_assert!(coeffs.values().all(|c| *c != 0.0));
        AlgebraElement {
            spec: spec.clone(),
            coeffs,
            support_radius,
        }
    }

    /// `χ(B_n)`, `χ(S_n)` or `δ_g`.
    pub fn characteristic(spec: &GroupSpec, shape: &Shape, index: &LengthIndex) -> Result<AlgebraElement> {
        if index.spec() != spec {
            return Err(Error::SpecMismatch {
                left: spec.descriptor(),
                right: index.spec().descriptor(),
            });
        }
        let need = |n: u32| {
            if n > index.radius() {
                Err(Error::IndexTooSmall {
                    needed: n,
                    available: index.radius(),
                })
            } else {
                Ok(())
            }
        };
        let (coeffs, radius): (BTreeMap<_, _>, u32) = match shape {
            Shape::Ball(n) => {
                need(*n)?;
                (index.ball(*n).map(|g| (g.clone(), 1.0)).collect(), *n)
            }
            Shape::Sphere(n) => {
                need(*n)?;
                (index.sphere(*n).iter().map(|g| (g.clone(), 1.0)).collect(), *n)
            }
            Shape::Point(g) => {
                let l = word_length(spec, g, Some(index))?;
                ([(g.clone(), 1.0)].into_iter().collect(), l)
            }
        };
        Ok(AlgebraElement::from_parts(spec, coeffs, radius))
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Smallest known `n` with support inside `B_n`.
    pub fn support_radius(&self) -> u32 {
        self.support_radius
    }

    pub fn coeff(&self, g: &GroupElement) -> f64 {
        self.coeffs.get(g).copied().unwrap_or(0.0)
    }

    /// Coefficient at the identity, `τ(a) = a(e)`.
    pub fn trace(&self) -> f64 {
        self.coeff(&self.spec.identity())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, f64)> {
        self.coeffs.iter().map(|(g, c)| (g, *c))
    }

    pub fn coeffs(&self) -> &BTreeMap<GroupElement, f64> {
        &self.coeffs
    }

    /// Size of the support.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| *c >= 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `c·a`.
    pub fn scaled(&self, c: f64) -> AlgebraElement {
        if c == 0.0 {
            return AlgebraElement::zero(&self.spec);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(g, v)| (g.clone(), v * c))
            .filter(|(_, v)| *v != 0.0)
            .collect();
        AlgebraElement::from_parts(&self.spec, coeffs, self.support_radius)
    }

    /// Pointwise absolute value.
    pub fn abs(&self) -> AlgebraElement {
        let coeffs = self.coeffs.iter().map(|(g, v)| (g.clone(), v.abs())).collect();
        AlgebraElement::from_parts(&self.spec, coeffs, self.support_radius)
    }

    fn same_spec(&self, other: &AlgebraElement) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch {
                left: self.spec.descriptor(),
                right: other.spec.descriptor(),
            })
        }
    }

    /// `a∗b` with no limit on the output support.
    pub fn convolve(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.convolve_with_budget(other, usize::MAX)
    }

    /// `a∗b`, failing once the output support would exceed `max_support`.
    pub fn convolve_with_budget(&self, other: &AlgebraElement, max_support: usize) -> Result<AlgebraElement> {
        self.same_spec(other)?;
        let spec = &self.spec;
        let radius = self.support_radius + other.support_radius;
        let over = |reached: usize| Error::BudgetExceeded {
            limit: max_support,
            reached: radius,
            context: format!("convolution output support reached {reached}"),
        };
        let a: Vec<(&GroupElement, f64)> = self.iter().collect();
        let b: Vec<(&GroupElement, f64)> = other.iter().collect();
        // Iterate over the smaller operand in the outer loop; products keep
        // their left/right order.
        let outer_is_left = a.len() <= b.len();
        let (outer, inner) = if outer_is_left { (&a, &b) } else { (&b, &a) };
        let accumulate = |chunk: &[(&GroupElement, f64)]| -> std::result::Result<HashMap<GroupElement, f64>, usize> {
            let mut acc: HashMap<GroupElement, f64> = HashMap::new();
            for &(x, cx) in chunk {
                for &(y, cy) in inner.iter() {
                    let p = if outer_is_left { spec.mul(x, y) } else { spec.mul(y, x) };
                    *acc.entry(p).or_insert(0.0) += cx * cy;
                    if acc.len() > max_support {
                        return Err(acc.len());
                    }
                }
            }
            Ok(acc)
        };
        let partials: Vec<HashMap<GroupElement, f64>> = if outer.len() * inner.len() >= PARALLEL_PAIRS {
            outer
                .par_chunks(CHUNK)
                .map(accumulate)
                .collect::<std::result::Result<Vec<_>, usize>>()
                .map_err(over)?
        } else {
            outer
                .chunks(CHUNK)
                .map(accumulate)
                .collect::<std::result::Result<Vec<_>, usize>>()
                .map_err(over)?
        };
        let mut iter = partials.into_iter();
        let mut total = iter.next().unwrap_or_default();
        for part in iter {
            for (g, v) in part {
                *total.entry(g).or_insert(0.0) += v;
            }
            if total.len() > max_support {
                return Err(over(total.len()));
            }
        }
        let coeffs = total.into_iter().filter(|(_, v)| *v != 0.0).collect();
        Ok(AlgebraElement::from_parts(spec, coeffs, radius))
    }

    /// `(a∗b)(h)` for `h` in `region` only, returned as an element supported
    /// on the region.
    pub fn convolve_on<'r, I>(&self, other: &AlgebraElement, region: I) -> Result<AlgebraElement>
    where
        I: IntoIterator<Item = &'r GroupElement>,
    {
        self.same_spec(other)?;
        let spec = &self.spec;
        let mut coeffs = BTreeMap::new();
        for h in region {
            spec.check(h)?;
            let mut v = 0.0;
            for (g, cg) in self.iter() {
                let c = other.coeff(&spec.mul(&spec.inv(g), h));
                if c != 0.0 {
                    v += cg * c;
                }
            }
            if v != 0.0 {
                coeffs.insert(h.clone(), v);
            }
        }
        Ok(AlgebraElement::from_parts(
            spec,
            coeffs,
            self.support_radius + other.support_radius,
        ))
    }

    /// `a*(g) = a(g⁻¹)` (real coefficients, so no conjugation).
    pub fn adjoint(&self) -> AlgebraElement {
        let coeffs = self.coeffs.iter().map(|(g, c)| (self.spec.inv(g), *c)).collect();
        AlgebraElement::from_parts(&self.spec, coeffs, self.support_radius)
    }

    pub fn norm(&self, kind: NormKind, index: Option<&LengthIndex>) -> Result<f64> {
        match kind {
            NormKind::L1 => Ok(self.coeffs.values().map(|c| c.abs()).sum()),
            NormKind::L2 => Ok(self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()),
            NormKind::L2s(s) => {
                if s.is_nan() || s < 0.0 {
                    return Err(Error::InvalidParameter(format!("weight exponent {s} must be >= 0")));
                }
                let mut acc = 0.0;
                for (g, c) in self.iter() {
                    let l = word_length(&self.spec, g, index)? as f64;
                    acc += c * c * (1.0 + l).powf(2.0 * s);
                }
                Ok(acc.sqrt())
            }
        }
    }

    /// Whether `a(g) ≥ b(g)` on the union of supports (optionally only its
    /// part inside `B_region`), with the minimum of `a(g) − b(g)` there.
    ///
    /// The minimum over an empty set is reported as 0.
    pub fn pointwise_geq(
        &self,
        other: &AlgebraElement,
        region: Option<u32>,
        index: Option<&LengthIndex>,
    ) -> Result<(bool, f64)> {
        self.same_spec(other)?;
        let mut min: Option<f64> = None;
        let keys = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys().filter(|g| !self.coeffs.contains_key(*g)));
        for g in keys {
            if let Some(n) = region {
                if word_length(&self.spec, g, index)? > n {
                    continue;
                }
            }
            let d = self.coeff(g) - other.coeff(g);
            min = Some(min.map_or(d, |m: f64| m.min(d)));
        }
        let slack = min.unwrap_or(0.0);
        Ok((slack >= GEQ_TOLERANCE, slack))
    }

    /// Restriction of `a` to the annuli `A_n = {2ⁿ−1 ≤ |g| < 2ⁿ⁺¹−1}`,
    /// indexed by `n`. Empty pieces are kept so that piece `n` is at index `n`.
    pub fn annulus_decompose(&self, index: Option<&LengthIndex>) -> Result<Vec<AlgebraElement>> {
        let mut pieces: Vec<BTreeMap<GroupElement, f64>> = Vec::new();
        let mut radii: Vec<u32> = Vec::new();
        for (g, c) in self.iter() {
            let l = word_length(&self.spec, g, index)?;
            let n = annulus_of(l) as usize;
            if pieces.len() <= n {
                pieces.resize_with(n + 1, BTreeMap::new);
                radii.resize(n + 1, 0);
            }
            pieces[n].insert(g.clone(), c);
            radii[n] = radii[n].max(l);
        }
        if pieces.is_empty() {
            return Ok(vec![AlgebraElement::zero(&self.spec)]);
        }
        Ok(pieces
            .into_iter()
            .zip(radii)
            .map(|(p, r)| AlgebraElement::from_parts(&self.spec, p, r))
            .collect())
    }
}

/// Index `n` of the annulus `A_n` containing elements of length `len`.
pub fn annulus_of(len: u32) -> u32 {
    (len as u64 + 1).ilog2()
}

/// `a∗b`.
pub fn convolve(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.convolve(b)
}

/// `Σ c_i a_i`, dropping zero coefficients.
pub fn linear_combine(terms: &[(f64, &AlgebraElement)]) -> Result<AlgebraElement> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("linear combination of no terms".into()))?;
    let spec = first.spec();
    let mut acc: BTreeMap<GroupElement, f64> = BTreeMap::new();
    let mut radius = 0;
    for (c, a) in terms {
        first.same_spec(a)?;
        if *c == 0.0 {
            continue;
        }
        for (g, v) in a.iter() {
            *acc.entry(g.clone()).or_insert(0.0) += c * v;
        }
        radius = radius.max(a.support_radius);
    }
    acc.retain(|_, v| *v != 0.0);
    if acc.is_empty() {
        radius = 0;
    }
    Ok(AlgebraElement::from_parts(spec, acc, radius))
}

#[cfg(test)]
mod tests;
