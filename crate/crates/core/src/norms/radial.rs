use std::collections::BTreeMap;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::groups::{GroupSpec, LengthIndex};

/// Relative tolerance for "constant on a sphere" when detecting radial
/// elements.
const RADIAL_TOLERANCE: f64 = 1e-12;

/// `ln |S_j|` in the free group of rank `r` with standard generators.
pub(crate) fn ln_sphere_size(rank: usize, j: usize) -> f64 {
    if j == 0 {
        0.0
    } else {
        (2.0 * rank as f64).ln() + (j - 1) as f64 * (2.0 * rank as f64 - 1.0).ln()
    }
}

/// A radial element `Σ c_j χ(S_j)` of the free group `F_r`.
///
/// Stored in the orthonormal basis `e_j = χ(S_j)/√|S_j|`, in which
/// multiplication by `χ(S_1)` is a Jacobi matrix with entries
/// `√(2r)` (between `e_0` and `e_1`) and `√(2r−1)` elsewhere. This keeps
/// coefficients in range even when `|S_j|` does not fit in a float.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialElement {
    rank: usize,
    unit: Vec<f64>,
}

impl RadialElement {
    fn trimmed(rank: usize, mut unit: Vec<f64>) -> RadialElement {
        while unit.len() > 1 && *unit.last().unwrap() == 0.0 {
            unit.pop();
        }
        if unit.is_empty() {
            unit.push(0.0);
        }
        RadialElement { rank, unit }
    }

    fn check_rank(rank: usize) -> Result<()> {
        if rank == 0 {
            Err(Error::InvalidParameter("free group rank must be at least 1".into()))
        } else {
            Ok(())
        }
    }

    /// From coefficients `c_j` of `χ(S_j)`.
    pub fn from_sphere_coeffs(rank: usize, coeffs: &[f64]) -> Result<RadialElement> {
        Self::check_rank(rank)?;
        let unit = coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * (0.5 * ln_sphere_size(rank, j)).exp())
            .collect();
        Ok(Self::trimmed(rank, unit))
    }

    /// From coefficients in the basis `χ(S_j)/√|S_j|`.
    pub fn from_unit_coeffs(rank: usize, unit: Vec<f64>) -> Result<RadialElement> {
        Self::check_rank(rank)?;
        Ok(Self::trimmed(rank, unit))
    }

    pub fn delta(rank: usize) -> Result<RadialElement> {
        Self::from_unit_coeffs(rank, vec![1.0])
    }

    /// `χ(S_n)`.
    pub fn sphere(rank: usize, n: usize) -> Result<RadialElement> {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::from_sphere_coeffs(rank, &c)
    }

    /// `χ(B_n)`.
    pub fn ball(rank: usize, n: usize) -> Result<RadialElement> {
        Self::from_sphere_coeffs(rank, &vec![1.0; n + 1])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Largest sphere index with a nonzero coefficient.
    pub fn max_radius(&self) -> usize {
        self.unit.len() - 1
    }

    pub fn unit_coeffs(&self) -> &[f64] {
        &self.unit
    }

    /// Coefficient of `χ(S_j)`.
    pub fn sphere_coeff(&self, j: usize) -> f64 {
        self.unit
            .get(j)
            .map_or(0.0, |v| v * (-0.5 * ln_sphere_size(self.rank, j)).exp())
    }

    pub fn sphere_coeffs(&self) -> Vec<f64> {
        (0..self.unit.len()).map(|j| self.sphere_coeff(j)).collect()
    }

    /// `τ(x) = x(e)`.
    pub fn trace(&self) -> f64 {
        self.unit[0]
    }

    pub fn l2_norm(&self) -> f64 {
        self.unit.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.unit
            .iter()
            .enumerate()
            .map(|(j, v)| v.abs() * (0.5 * ln_sphere_size(self.rank, j)).exp())
            .sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.unit.iter().all(|v| *v >= 0.0)
    }

    pub fn scaled(&self, c: f64) -> RadialElement {
        Self::trimmed(self.rank, self.unit.iter().map(|v| v * c).collect())
    }

    pub(crate) fn max_abs_unit(&self) -> f64 {
        self.unit.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Recognizes elements of a standard free group that are constant on
    /// every sphere meeting their support.
    pub fn from_algebra(a: &AlgebraElement) -> Option<RadialElement> {
        let rank = a.spec().standard_free_rank()?;
        let mut per_sphere: BTreeMap<usize, (usize, f64, f64, f64)> = BTreeMap::new();
        for (g, c) in a.iter() {
            let crate::groups::GroupElement::Word(w) = g else {
                return None;
            };
            let e = per_sphere.entry(w.len()).or_insert((0, c, c, 0.0));
            e.0 += 1;
            e.1 = e.1.min(c);
            e.2 = e.2.max(c);
            e.3 += c;
        }
        let top = per_sphere.keys().next_back().copied().unwrap_or(0);
        let mut coeffs = vec![0.0; top + 1];
        for (j, (count, lo, hi, sum)) in per_sphere {
            if (count as f64) != ln_sphere_size(rank, j).exp().round() {
                return None;
            }
            if hi - lo > RADIAL_TOLERANCE * hi.abs().max(lo.abs()) {
                return None;
            }
            coeffs[j] = sum / count as f64;
        }
        Self::from_sphere_coeffs(rank, &coeffs).ok()
    }

    /// Explicit element over the spheres of `index`.
    pub fn to_algebra(&self, index: &LengthIndex) -> Result<AlgebraElement> {
        let spec = index.spec();
        if spec.standard_free_rank() != Some(self.rank) {
            return Err(Error::SpecMismatch {
                left: format!("F{}", self.rank),
                right: spec.descriptor(),
            });
        }
        let m = self.max_radius() as u32;
        if index.radius() < m {
            return Err(Error::IndexTooSmall {
                needed: m,
                available: index.radius(),
            });
        }
        let mut terms = Vec::new();
        for j in 0..=m {
            let c = self.sphere_coeff(j as usize);
            if c != 0.0 {
                terms.extend(index.sphere(j).iter().map(|g| (g.clone(), c)));
            }
        }
        AlgebraElement::from_coeffs(spec, terms, Some(index))
    }

    /// The free group this element lives in.
    pub fn spec(&self) -> GroupSpec {
        GroupSpec::free(self.rank).expect("rank was validated")
    }
}

/// `y ↦ χ(S_1)·y` in the orthonormal sphere basis.
fn apply_generator_sum(rank: usize, y: &[f64]) -> Vec<f64> {
    let s2r = (2.0 * rank as f64).sqrt();
    let sq = (2.0 * rank as f64 - 1.0).sqrt();
    let mut w = vec![0.0; y.len() + 1];
    for (n, &v) in y.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        match n {
            0 => w[1] += s2r * v,
            1 => {
                w[0] += s2r * v;
                w[2] += sq * v;
            }
            _ => {
                w[n - 1] += sq * v;
                w[n + 1] += sq * v;
            }
        }
    }
    w
}

/// Product of radial elements of the same free group.
///
/// With `Q_j` the polynomial in `A = χ(S_1)` giving `e_j = Q_j(A)`,
/// `Q_0 = 1`, `Q_1 = A/√(2r)`, `Q_2 = (A Q_1 − √(2r))/√(2r−1)` and
/// `Q_{j+1} = A Q_j/√(2r−1) − Q_{j−1}`; the product is `Σ_j x_j Q_j(A) y`.
/// These follow from `χ(S_1)χ(S_1) = χ(S_2) + 2r·δ_e` and
/// `χ(S_1)χ(S_n) = χ(S_{n+1}) + (2r−1)χ(S_{n−1})` for `n ≥ 2`.
pub fn radial_convolve(x: &RadialElement, y: &RadialElement) -> Result<RadialElement> {
    if x.rank != y.rank {
        return Err(Error::SpecMismatch {
            left: format!("F{}", x.rank),
            right: format!("F{}", y.rank),
        });
    }
    let rank = x.rank;
    // The radial subalgebra is commutative; expand the shorter operand.
    let (poly, other) = if x.unit.len() <= y.unit.len() { (x, y) } else { (y, x) };
    let s2r = (2.0 * rank as f64).sqrt();
    let sq = (2.0 * rank as f64 - 1.0).sqrt();
    let out_len = poly.unit.len() + other.unit.len() - 1;
    let mut out = vec![0.0; out_len];
    let mut add = |coef: f64, v: &[f64]| {
        if coef != 0.0 {
            for (o, t) in out.iter_mut().zip(v) {
                *o += coef * t;
            }
        }
    };
    let mut prev: Vec<f64> = other.unit.clone();
    add(poly.unit[0], &prev);
    if poly.unit.len() > 1 {
        let mut cur: Vec<f64> = apply_generator_sum(rank, &prev).iter().map(|v| v / s2r).collect();
        add(poly.unit[1], &cur);
        for j in 1..poly.unit.len() - 1 {
            let mut next = apply_generator_sum(rank, &cur);
            if j == 1 {
                for (n, p) in next.iter_mut().zip(prev.iter().chain(std::iter::repeat(&0.0))) {
                    *n = (*n - s2r * p) / sq;
                }
            } else {
                for (n, p) in next.iter_mut().zip(prev.iter().chain(std::iter::repeat(&0.0))) {
                    *n = *n / sq - p;
                }
            }
            add(poly.unit[j + 1], &next);
            prev = cur;
            cur = next;
        }
    }
    RadialElement::from_unit_coeffs(rank, out)
}
