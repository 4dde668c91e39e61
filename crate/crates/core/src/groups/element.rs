/// A group element in canonical form.
///
/// The variant must agree with the [`GroupKind`](super::GroupKind) of the
/// group it is used with; [`GroupSpec::check`](super::GroupSpec::check)
/// enforces this.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// Integer vector of a free abelian group.
    Vector(Vec<i64>),
    /// Heisenberg normal form `x^a y^b z^c`, stored as `[a, b, c]`.
    Heisenberg([i64; 3]),
    /// Freely reduced word. Letter `+i` is the `i`-th generator (1-based),
    /// `-i` its inverse.
    Word(Vec<i8>),
    /// Residue in `[0, m)`.
    Residue(u64),
    /// One component per direct factor.
    Tuple(Vec<GroupElement>),
}

impl GroupElement {
    /// Free-group word from a string like `"aB"` (uppercase = inverse).
    ///
    /// The result is not reduced; pass it through
    /// [`GroupSpec::canonicalize`](super::GroupSpec::canonicalize).
    pub fn word(letters: &str) -> Option<GroupElement> {
        letters
            .chars()
            .map(|c| {
                if c.is_ascii_lowercase() {
                    Some((c as u8 - b'a' + 1) as i8)
                } else if c.is_ascii_uppercase() {
                    Some(-((c as u8 - b'A' + 1) as i8))
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()
            .map(GroupElement::Word)
    }

    pub fn vector(v: &[i64]) -> GroupElement {
        GroupElement::Vector(v.to_vec())
    }

    pub fn heisenberg(a: i64, b: i64, c: i64) -> GroupElement {
        GroupElement::Heisenberg([a, b, c])
    }
}

pub(crate) fn letter_char(l: i8) -> char {
    if l > 0 {
        (b'a' + (l as u8 - 1)) as char
    } else {
        (b'A' + ((-l) as u8 - 1)) as char
    }
}

pub(crate) fn reduce_into(out: &mut Vec<i8>, letter: i8) {
    if out.last() == Some(&-letter) {
        out.pop();
    } else {
        out.push(letter);
    }
}
