use std::collections::HashMap;

use super::element::GroupElement;
use super::spec::GroupSpec;
use crate::error::{Error, Result};

/// Default cap on the number of elements a ball enumeration may store.
pub const DEFAULT_BALL_BUDGET: usize = 5_000_000;

/// Word lengths of every element of the ball `B_N`, built once by
/// breadth-first search and immutable afterwards.
#[derive(Clone, Debug)]
pub struct LengthIndex {
    spec: GroupSpec,
    radius: u32,
    lengths: HashMap<GroupElement, u32>,
    /// `spheres[n]` holds `S_n`, sorted.
    spheres: Vec<Vec<GroupElement>>,
}

impl LengthIndex {
    /// Builds an index from explicit spheres (used by the ball cache).
    pub(crate) fn from_spheres(spec: GroupSpec, spheres: Vec<Vec<GroupElement>>) -> LengthIndex {
        let mut spheres = spheres;
        let mut lengths = HashMap::new();
        for (n, s) in spheres.iter_mut().enumerate() {
            s.sort();
            for g in s.iter() {
                lengths.insert(g.clone(), n as u32);
            }
        }
        LengthIndex {
            spec,
            radius: spheres.len() as u32 - 1,
            lengths,
            spheres,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// `ℓ(g)`, or `None` when `|g| > N`.
    pub fn length(&self, g: &GroupElement) -> Option<u32> {
        self.lengths.get(g).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.lengths.contains_key(g)
    }

    /// Elements of the sphere `S_n` in sorted order; empty beyond the radius.
    pub fn sphere(&self, n: u32) -> &[GroupElement] {
        self.spheres.get(n as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Elements of `B_n`, sphere by sphere.
    pub fn ball(&self, n: u32) -> impl Iterator<Item = &GroupElement> {
        self.spheres.iter().take(n.min(self.radius) as usize + 1).flatten()
    }

    /// `|S_0|, ..., |S_N|`.
    pub fn sphere_sizes(&self) -> Vec<u64> {
        self.spheres.iter().map(|s| s.len() as u64).collect()
    }

    /// `|B_0|, ..., |B_N|`.
    pub fn ball_sizes(&self) -> Vec<u64> {
        self.spheres
            .iter()
            .scan(0u64, |acc, s| {
                *acc += s.len() as u64;
                Some(*acc)
            })
            .collect()
    }

    /// Number of stored elements, `|B_N|`.
    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Copy restricted to radius `n ≤ N`.
    pub fn truncated(&self, n: u32) -> Result<LengthIndex> {
        if n > self.radius {
            return Err(Error::IndexTooSmall {
                needed: n,
                available: self.radius,
            });
        }
        Ok(LengthIndex::from_spheres(
            self.spec.clone(),
            self.spheres[..=n as usize].to_vec(),
        ))
    }
}

/// Breadth-first enumeration of `B_N` with the default element budget.
pub fn enumerate_balls(spec: &GroupSpec, radius: u32) -> Result<LengthIndex> {
    enumerate_balls_with_budget(spec, radius, DEFAULT_BALL_BUDGET)
}

/// Breadth-first enumeration of `B_N` from the identity over the generating
/// set. Spheres are sorted, so the result does not depend on traversal order.
pub fn enumerate_balls_with_budget(spec: &GroupSpec, radius: u32, budget: usize) -> Result<LengthIndex> {
    let e = spec.identity();
    let mut lengths: HashMap<GroupElement, u32> = HashMap::new();
    lengths.insert(e.clone(), 0);
    let mut spheres = vec![vec![e]];
    for n in 1..=radius {
        let mut next = Vec::new();
        for g in &spheres[n as usize - 1] {
            for s in spec.generators() {
                let h = spec.mul(g, s);
                if !lengths.contains_key(&h) {
                    if lengths.len() >= budget {
                        return Err(Error::BudgetExceeded {
                            limit: budget,
                            reached: n - 1,
                            context: format!("ball enumeration of {}", spec.descriptor()),
                        });
                    }
                    lengths.insert(h.clone(), n);
                    next.push(h);
                }
            }
        }
        next.sort();
        spheres.push(next);
    }
    Ok(LengthIndex {
        spec: spec.clone(),
        radius,
        lengths,
        spheres,
    })
}
