use std::collections::HashMap;

use super::bfs::{enumerate_balls_with_budget, LengthIndex};
use super::element::GroupElement;
use super::spec::{GroupKind, GroupSpec};
use super::{power, word_length};
use crate::error::{Error, Result};

/// Radius of the subgroup ball on which the homomorphism property is sampled.
const SAMPLE_RADIUS: u32 = 3;
const SAMPLE_BUDGET: usize = 20_000;

/// An injective homomorphism `Γ′ → Γ` given by images of the primitive
/// generators of `Γ′` (the standard generators, without inverses).
#[derive(Clone, Debug)]
pub struct Embedding {
    sub: GroupSpec,
    ambient: GroupSpec,
    images: Vec<GroupElement>,
}

impl Embedding {
    /// `images` maps each primitive generator of `sub` (or its inverse) to an
    /// element of `ambient`.
    ///
    /// The map is checked on all pairs from the subgroup ball of radius 3:
    /// the image of a product must equal the product of images, and distinct
    /// elements must have distinct images.
    pub fn new(sub: GroupSpec, ambient: GroupSpec, images: &[(GroupElement, GroupElement)]) -> Result<Embedding> {
        let prims = sub.primitive_generators();
        let mut slots: Vec<Option<GroupElement>> = vec![None; prims.len()];
        for (gen, img) in images {
            ambient.check(img)?;
            let (slot, value) = if let Some(i) = prims.iter().position(|p| p == gen) {
                (i, img.clone())
            } else if let Some(i) = prims.iter().position(|p| sub.inv(p) == *gen) {
                (i, ambient.inv(img))
            } else {
                return Err(Error::Homomorphism(format!(
                    "{} is not a standard generator of {}",
                    sub.key(gen),
                    sub.descriptor()
                )));
            };
            match &slots[slot] {
                Some(prev) if *prev != value => {
                    return Err(Error::Homomorphism(format!(
                        "inconsistent images for generator {}",
                        sub.key(&prims[slot])
                    )))
                }
                _ => slots[slot] = Some(value),
            }
        }
        let images = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| Error::Homomorphism(format!("no image for generator {}", sub.key(&prims[i]))))
            })
            .collect::<Result<Vec<_>>>()?;
        let emb = Embedding { sub, ambient, images };
        emb.check_homomorphism()?;
        Ok(emb)
    }

    pub fn sub(&self) -> &GroupSpec {
        &self.sub
    }

    pub fn ambient(&self) -> &GroupSpec {
        &self.ambient
    }

    /// Image of a subgroup element.
    pub fn push(&self, g: &GroupElement) -> Result<GroupElement> {
        self.sub.check(g)?;
        Ok(eval(self.sub.kind(), &self.ambient, &self.images, g))
    }

    /// Ambient word length of the image of `g`.
    pub fn ambient_length(&self, g: &GroupElement, index: Option<&LengthIndex>) -> Result<u32> {
        word_length(&self.ambient, &self.push(g)?, index)
    }

    fn check_homomorphism(&self) -> Result<()> {
        let ball = enumerate_balls_with_budget(&self.sub, SAMPLE_RADIUS, SAMPLE_BUDGET)?;
        let elems: Vec<&GroupElement> = ball.ball(SAMPLE_RADIUS).collect();
        let pushed: HashMap<&GroupElement, GroupElement> = elems
            .iter()
            .map(|g| (*g, eval(self.sub.kind(), &self.ambient, &self.images, g)))
            .collect();
        let mut seen: HashMap<&GroupElement, &GroupElement> = HashMap::new();
        for g in &elems {
            if let Some(other) = seen.insert(&pushed[g], g) {
                return Err(Error::Homomorphism(format!(
                    "{} and {} have the same image",
                    self.sub.key(other),
                    self.sub.key(g)
                )));
            }
        }
        for g in &elems {
            for h in &elems {
                let gh = self.sub.mul(g, h);
                let lhs = eval(self.sub.kind(), &self.ambient, &self.images, &gh);
                let rhs = self.ambient.mul(&pushed[g], &pushed[h]);
                if lhs != rhs {
                    return Err(Error::Homomorphism(format!(
                        "image of {}·{} differs from the product of images",
                        self.sub.key(g),
                        self.sub.key(h)
                    )));
                }
            }
        }
        if let GroupKind::Cyclic { order } = self.sub.kind() {
            if let Some(img) = self.images.first() {
                if power(&self.ambient, img, *order as i64) != self.ambient.identity() {
                    return Err(Error::Homomorphism(format!(
                        "image of the generator does not have order dividing {order}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Evaluates the homomorphism on a normal-form word for `g`.
fn eval(kind: &GroupKind, ambient: &GroupSpec, images: &[GroupElement], g: &GroupElement) -> GroupElement {
    let mut acc = ambient.identity();
    match (kind, g) {
        (GroupKind::FreeAbelian { .. }, GroupElement::Vector(v)) => {
            for (img, &k) in images.iter().zip(v) {
                acc = ambient.mul(&acc, &power(ambient, img, k));
            }
        }
        (GroupKind::Heisenberg, GroupElement::Heisenberg([a, b, c])) => {
            // (a, b, c) = x^a y^b z^(c - ab) with z = x y x⁻¹ y⁻¹.
            let (x, y) = (&images[0], &images[1]);
            let z = [x, y, &ambient.inv(x), &ambient.inv(y)]
                .into_iter()
                .fold(ambient.identity(), |p, q| ambient.mul(&p, q));
            acc = ambient.mul(&power(ambient, x, *a), &power(ambient, y, *b));
            acc = ambient.mul(&acc, &power(ambient, &z, c - a * b));
        }
        (GroupKind::Free { .. }, GroupElement::Word(w)) => {
            for &l in w {
                let img = &images[l.unsigned_abs() as usize - 1];
                let step = if l > 0 { img.clone() } else { ambient.inv(img) };
                acc = ambient.mul(&acc, &step);
            }
        }
        (GroupKind::Cyclic { .. }, GroupElement::Residue(k)) => {
            if let Some(img) = images.first() {
                acc = power(ambient, img, *k as i64);
            }
        }
        (GroupKind::Product(fs), GroupElement::Tuple(parts)) => {
            let mut offset = 0;
            for (f, p) in fs.iter().zip(parts) {
                let n = GroupSpec::new(f.clone())
                    .map(|s| s.primitive_generators().len())
                    .unwrap_or(0);
                let piece = eval(f, ambient, &images[offset..offset + n], p);
                acc = ambient.mul(&acc, &piece);
                offset += n;
            }
        }
        _ => unreachable!("element was checked against the subgroup kind"),
    }
    acc
}
