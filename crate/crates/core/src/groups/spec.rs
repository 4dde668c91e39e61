use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::element::{letter_char, reduce_into, GroupElement};
use crate::error::{Error, Result};

/// Isomorphism type of a supported group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    FreeAbelian {
        rank: usize,
    },
    Heisenberg,
    Free {
        rank: usize,
    },
    Cyclic {
        order: u64,
    },
    /// Direct product of non-product factors.
    Product(Vec<GroupKind>),
}

impl GroupKind {
    fn validate(&self) -> Result<()> {
        match self {
            GroupKind::FreeAbelian { rank } if *rank == 0 => {
                Err(Error::InvalidParameter("free abelian rank must be at least 1".into()))
            }
            GroupKind::Free { rank } if *rank == 0 || *rank > 26 => {
                Err(Error::InvalidParameter("free group rank must lie in 1..=26".into()))
            }
            GroupKind::Cyclic { order } if *order == 0 => {
                Err(Error::InvalidParameter("cyclic order must be at least 1".into()))
            }
            GroupKind::Product(factors) => {
                if factors.is_empty() {
                    return Err(Error::InvalidParameter("empty direct product".into()));
                }
                for f in factors {
                    if matches!(f, GroupKind::Product(_)) {
                        return Err(Error::InvalidParameter("nested direct product".into()));
                    }
                    f.validate()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn descriptor(&self) -> String {
        match self {
            GroupKind::FreeAbelian { rank } => format!("Z^{rank}"),
            GroupKind::Heisenberg => "H3".to_string(),
            GroupKind::Free { rank } => format!("F{rank}"),
            GroupKind::Cyclic { order } => format!("C{order}"),
            GroupKind::Product(fs) => fs.iter().map(GroupKind::descriptor).collect::<Vec<_>>().join("x"),
        }
    }

    fn parse_factor(tok: &str) -> Result<GroupKind> {
        let bad = || Error::Parse {
            what: "group descriptor",
            input: tok.to_string(),
        };
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        let kind = if tok == "Z" {
            GroupKind::FreeAbelian { rank: 1 }
        } else if let Some(d) = tok.strip_prefix("Z^") {
            GroupKind::FreeAbelian { rank: num(d)? as usize }
        } else if tok == "H3" {
            GroupKind::Heisenberg
        } else if let Some(r) = tok.strip_prefix('F') {
            GroupKind::Free { rank: num(r)? as usize }
        } else if let Some(m) = tok.strip_prefix('C') {
            GroupKind::Cyclic { order: num(m)? }
        } else {
            return Err(bad());
        };
        kind.validate()?;
        Ok(kind)
    }

    fn identity(&self) -> GroupElement {
        match self {
            GroupKind::FreeAbelian { rank } => GroupElement::Vector(vec![0; *rank]),
            GroupKind::Heisenberg => GroupElement::Heisenberg([0; 3]),
            GroupKind::Free { .. } => GroupElement::Word(Vec::new()),
            GroupKind::Cyclic { .. } => GroupElement::Residue(0),
            GroupKind::Product(fs) => GroupElement::Tuple(fs.iter().map(GroupKind::identity).collect()),
        }
    }

    fn check(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (GroupKind::FreeAbelian { rank }, GroupElement::Vector(v)) => v.len() == *rank,
            (GroupKind::Heisenberg, GroupElement::Heisenberg(_)) => true,
            (GroupKind::Free { rank }, GroupElement::Word(w)) => {
                w.iter().all(|&l| l != 0 && (l.unsigned_abs() as usize) <= *rank) && w.windows(2).all(|p| p[0] != -p[1])
            }
            (GroupKind::Cyclic { order }, GroupElement::Residue(k)) => k < order,
            (GroupKind::Product(fs), GroupElement::Tuple(parts)) => {
                fs.len() == parts.len() && fs.iter().zip(parts).all(|(f, p)| f.check(p))
            }
            _ => false,
        }
    }

    fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (self, g, h) {
            (GroupKind::FreeAbelian { .. }, GroupElement::Vector(a), GroupElement::Vector(b)) => {
                GroupElement::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupKind::Heisenberg, GroupElement::Heisenberg(a), GroupElement::Heisenberg(b)) => {
                GroupElement::Heisenberg([a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]])
            }
            (GroupKind::Free { .. }, GroupElement::Word(a), GroupElement::Word(b)) => {
                let mut out = Vec::with_capacity(a.len() + b.len());
                out.extend_from_slice(a);
                for &l in b {
                    reduce_into(&mut out, l);
                }
                GroupElement::Word(out)
            }
            (GroupKind::Cyclic { order }, GroupElement::Residue(a), GroupElement::Residue(b)) => {
                GroupElement::Residue(((*a as u128 + *b as u128) % *order as u128) as u64)
            }
            (GroupKind::Product(fs), GroupElement::Tuple(a), GroupElement::Tuple(b)) => {
                GroupElement::Tuple(fs.iter().zip(a.iter().zip(b)).map(|(f, (x, y))| f.mul(x, y)).collect())
            }
            _ => unreachable!("operands were checked against the group kind"),
        }
    }

    fn inv(&self, g: &GroupElement) -> GroupElement {
        match (self, g) {
            (GroupKind::FreeAbelian { .. }, GroupElement::Vector(a)) => {
                GroupElement::Vector(a.iter().map(|x| -x).collect())
            }
            (GroupKind::Heisenberg, GroupElement::Heisenberg([a, b, c])) => {
                GroupElement::Heisenberg([-a, -b, -c + a * b])
            }
            (GroupKind::Free { .. }, GroupElement::Word(w)) => GroupElement::Word(w.iter().rev().map(|l| -l).collect()),
            (GroupKind::Cyclic { order }, GroupElement::Residue(k)) => {
                GroupElement::Residue(if *k == 0 { 0 } else { order - k })
            }
            (GroupKind::Product(fs), GroupElement::Tuple(parts)) => {
                GroupElement::Tuple(fs.iter().zip(parts).map(|(f, p)| f.inv(p)).collect())
            }
            _ => unreachable!("operand was checked against the group kind"),
        }
    }

    fn canonicalize(&self, g: &GroupElement) -> Option<GroupElement> {
        match (self, g) {
            (GroupKind::FreeAbelian { rank }, GroupElement::Vector(v)) if v.len() == *rank => Some(g.clone()),
            (GroupKind::Heisenberg, GroupElement::Heisenberg(_)) => Some(g.clone()),
            (GroupKind::Free { rank }, GroupElement::Word(w)) => {
                if w.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > *rank) {
                    return None;
                }
                let mut out = Vec::with_capacity(w.len());
                for &l in w {
                    reduce_into(&mut out, l);
                }
                Some(GroupElement::Word(out))
            }
            (GroupKind::Cyclic { order }, GroupElement::Residue(k)) => Some(GroupElement::Residue(k % order)),
            (GroupKind::Product(fs), GroupElement::Tuple(parts)) if fs.len() == parts.len() => fs
                .iter()
                .zip(parts)
                .map(|(f, p)| f.canonicalize(p))
                .collect::<Option<Vec<_>>>()
                .map(GroupElement::Tuple),
            _ => None,
        }
    }

    fn key(&self, g: &GroupElement) -> String {
        match g {
            GroupElement::Vector(v) => join_ints(v),
            GroupElement::Heisenberg(t) => join_ints(t),
            GroupElement::Word(w) => w.iter().map(|&l| letter_char(l)).collect(),
            GroupElement::Residue(k) => k.to_string(),
            GroupElement::Tuple(parts) => {
                let GroupKind::Product(fs) = self else {
                    unreachable!("tuple element outside a direct product")
                };
                fs.iter()
                    .zip(parts)
                    .map(|(f, p)| f.key(p))
                    .collect::<Vec<_>>()
                    .join(";")
            }
        }
    }

    fn parse_key(&self, key: &str) -> Option<GroupElement> {
        let ints = |s: &str| -> Option<Vec<i64>> { s.split(',').map(|t| t.trim().parse::<i64>().ok()).collect() };
        let g = match self {
            GroupKind::FreeAbelian { .. } => GroupElement::Vector(ints(key)?),
            GroupKind::Heisenberg => {
                let v = ints(key)?;
                GroupElement::Heisenberg(v.try_into().ok()?)
            }
            GroupKind::Free { .. } => GroupElement::word(key)?,
            GroupKind::Cyclic { .. } => GroupElement::Residue(key.trim().parse().ok()?),
            GroupKind::Product(fs) => {
                let parts: Vec<&str> = key.split(';').collect();
                if parts.len() != fs.len() {
                    return None;
                }
                GroupElement::Tuple(
                    fs.iter()
                        .zip(parts)
                        .map(|(f, p)| f.parse_key(p))
                        .collect::<Option<Vec<_>>>()?,
                )
            }
        };
        if self.check(&g) {
            Some(g)
        } else {
            None
        }
    }

    fn default_generators(&self) -> Vec<GroupElement> {
        let mut gens = Vec::new();
        for g in self.primitive_generators() {
            let gi = self.inv(&g);
            gens.push(g.clone());
            if gi != g {
                gens.push(gi);
            }
        }
        gens
    }

    fn primitive_generators(&self) -> Vec<GroupElement> {
        match self {
            GroupKind::FreeAbelian { rank } => (0..*rank)
                .map(|i| {
                    let mut v = vec![0; *rank];
                    v[i] = 1;
                    GroupElement::Vector(v)
                })
                .collect(),
            GroupKind::Heisenberg => vec![GroupElement::Heisenberg([1, 0, 0]), GroupElement::Heisenberg([0, 1, 0])],
            GroupKind::Free { rank } => (1..=*rank as i8).map(|l| GroupElement::Word(vec![l])).collect(),
            GroupKind::Cyclic { order } => {
                if *order > 1 {
                    vec![GroupElement::Residue(1)]
                } else {
                    Vec::new()
                }
            }
            GroupKind::Product(fs) => {
                let id: Vec<GroupElement> = fs.iter().map(GroupKind::identity).collect();
                let mut out = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    for g in f.primitive_generators() {
                        let mut t = id.clone();
                        t[i] = g;
                        out.push(GroupElement::Tuple(t));
                    }
                }
                out
            }
        }
    }

    fn closed_form_length(&self, g: &GroupElement) -> Option<u32> {
        match (self, g) {
            (GroupKind::FreeAbelian { .. }, GroupElement::Vector(v)) => {
                Some(v.iter().map(|x| x.unsigned_abs()).sum::<u64>() as u32)
            }
            (GroupKind::Free { .. }, GroupElement::Word(w)) => Some(w.len() as u32),
            (GroupKind::Cyclic { order }, GroupElement::Residue(k)) => Some((*k).min(order - k) as u32),
            (GroupKind::Product(fs), GroupElement::Tuple(parts)) => {
                fs.iter().zip(parts).map(|(f, p)| f.closed_form_length(p)).sum()
            }
            _ => None,
        }
    }

    fn is_amenable(&self) -> bool {
        match self {
            GroupKind::Free { rank } => *rank < 2,
            GroupKind::Product(fs) => fs.iter().all(GroupKind::is_amenable),
            _ => true,
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            GroupKind::Cyclic { .. } => true,
            GroupKind::Product(fs) => fs.iter().all(GroupKind::is_finite),
            _ => false,
        }
    }
}

fn join_ints(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// A group together with a finite symmetric generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    kind: GroupKind,
    generators: Vec<GroupElement>,
    standard: bool,
}

impl GroupSpec {
    /// Group with the default generating set: `±e_i` for `Z^d`, `x^±1, y^±1`
    /// for `H3`, the free letters and their inverses for `F_r`, `±1` for `C_m`.
    pub fn new(kind: GroupKind) -> Result<GroupSpec> {
        let kind = match kind {
            GroupKind::Product(fs) => {
                let flat: Vec<GroupKind> = fs
                    .into_iter()
                    .flat_map(|f| match f {
                        GroupKind::Product(inner) => inner,
                        other => vec![other],
                    })
                    .collect();
                if flat.len() == 1 {
                    flat.into_iter().next().unwrap()
                } else {
                    GroupKind::Product(flat)
                }
            }
            k => k,
        };
        kind.validate()?;
        let generators = kind.default_generators();
        Ok(GroupSpec {
            kind,
            generators,
            standard: true,
        })
    }

    /// Group with a custom generating set. The set must be symmetric and
    /// consist of canonical elements; the identity is dropped.
    pub fn with_generators(kind: GroupKind, generators: Vec<GroupElement>) -> Result<GroupSpec> {
        let base = GroupSpec::new(kind)?;
        let id = base.identity();
        let mut gens: Vec<GroupElement> = Vec::new();
        for g in generators {
            if !base.kind.check(&g) {
                return Err(Error::KindMismatch {
                    group: base.descriptor(),
                    element: format!("{g:?}"),
                });
            }
            if g != id && !gens.contains(&g) {
                gens.push(g);
            }
        }
        let set: HashSet<&GroupElement> = gens.iter().collect();
        for g in &gens {
            if !set.contains(&base.inv(g)) {
                return Err(Error::InvalidParameter(format!(
                    "generating set is not symmetric: inverse of {} missing",
                    base.key(g)
                )));
            }
        }
        let standard = gens == base.generators;
        Ok(GroupSpec {
            generators: gens,
            standard,
            ..base
        })
    }

    pub fn free_abelian(rank: usize) -> Result<GroupSpec> {
        GroupSpec::new(GroupKind::FreeAbelian { rank })
    }

    pub fn integers() -> GroupSpec {
        GroupSpec::new(GroupKind::FreeAbelian { rank: 1 }).expect("rank 1 is valid")
    }

    pub fn heisenberg() -> GroupSpec {
        GroupSpec::new(GroupKind::Heisenberg).expect("H3 is valid")
    }

    pub fn free(rank: usize) -> Result<GroupSpec> {
        GroupSpec::new(GroupKind::Free { rank })
    }

    pub fn cyclic(order: u64) -> Result<GroupSpec> {
        GroupSpec::new(GroupKind::Cyclic { order })
    }

    pub fn product(factors: Vec<GroupKind>) -> Result<GroupSpec> {
        GroupSpec::new(GroupKind::Product(factors))
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Whether the generating set is the default one.
    pub fn is_standard(&self) -> bool {
        self.standard
    }

    /// `false` exactly when some factor is a free group of rank at least 2.
    pub fn is_amenable(&self) -> bool {
        self.kind.is_amenable()
    }

    pub fn is_finite(&self) -> bool {
        self.kind.is_finite()
    }

    /// Rank `r` when the group is a free group with its standard generators.
    pub fn standard_free_rank(&self) -> Option<usize> {
        match self.kind {
            GroupKind::Free { rank } if self.standard => Some(rank),
            _ => None,
        }
    }

    /// Descriptor string such as `Z^2`, `H3`, `F2`, `C12` or `Z^1xF2`.
    pub fn descriptor(&self) -> String {
        self.kind.descriptor()
    }

    pub fn identity(&self) -> GroupElement {
        self.kind.identity()
    }

    /// Errors unless `g` is a canonical element of this group.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if self.kind.check(g) {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                group: self.descriptor(),
                element: format!("{g:?}"),
            })
        }
    }

    /// Brings a raw element (unreduced word, residue out of range) into
    /// canonical form.
    pub fn canonicalize(&self, g: &GroupElement) -> Result<GroupElement> {
        self.kind.canonicalize(g).ok_or_else(|| Error::KindMismatch {
            group: self.descriptor(),
            element: format!("{g:?}"),
        })
    }

    /// Unchecked product; operands must be canonical for this group.
    pub(crate) fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.kind.mul(g, h)
    }

    /// Unchecked inverse.
    pub(crate) fn inv(&self, g: &GroupElement) -> GroupElement {
        self.kind.inv(g)
    }

    /// Text key of a canonical element.
    pub fn key(&self, g: &GroupElement) -> String {
        self.kind.key(g)
    }

    pub fn parse_key(&self, key: &str) -> Result<GroupElement> {
        self.kind.parse_key(key).ok_or_else(|| Error::Parse {
            what: "element key",
            input: key.to_string(),
        })
    }

    /// Generators whose powers, together with their inverses, make up the
    /// default generating set.
    pub fn primitive_generators(&self) -> Vec<GroupElement> {
        self.kind.primitive_generators()
    }

    pub(crate) fn closed_form_length(&self, g: &GroupElement) -> Option<u32> {
        if self.standard {
            self.kind.closed_form_length(g)
        } else {
            None
        }
    }

    /// Whether [`word_length`](super::word_length) works without an index.
    pub fn has_closed_form_length(&self) -> bool {
        self.standard && self.kind.closed_form_length(&self.identity()).is_some()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<GroupSpec> {
        let s = s.trim();
        let factors = s.split('x').map(GroupKind::parse_factor).collect::<Result<Vec<_>>>()?;
        if factors.len() == 1 {
            GroupSpec::new(factors.into_iter().next().unwrap())
        } else {
            GroupSpec::new(GroupKind::Product(factors))
        }
    }
}
