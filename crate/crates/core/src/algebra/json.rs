use serde::{Deserialize, Serialize};

use super::AlgebraElement;
use crate::error::{Error, Result};
use crate::groups::{GroupSpec, LengthIndex};

/// Wire form of an [`AlgebraElement`]: coefficients as `[key, value]` pairs
/// sorted by key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub group: String,
    pub support_radius: u32,
    pub coeffs: Vec<(String, f64)>,
}

impl AlgebraElement {
    pub fn to_wire(&self) -> ElementJson {
        let mut coeffs: Vec<(String, f64)> = self.iter().map(|(g, c)| (self.spec.key(g), c)).collect();
        coeffs.sort_by(|a, b| a.0.cmp(&b.0));
        ElementJson {
            group: self.spec.descriptor(),
            support_radius: self.support_radius,
            coeffs,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("element serializes")
    }

    /// Rebuilds an element over the standard generating set of the named
    /// group. The stated support radius is checked wherever word lengths are
    /// available (closed forms or `index`).
    pub fn from_wire(wire: &ElementJson, index: Option<&LengthIndex>) -> Result<AlgebraElement> {
        let spec: GroupSpec = wire.group.parse()?;
        let pairs = wire
            .coeffs
            .iter()
            .map(|(k, v)| Ok((spec.parse_key(k)?, *v)))
            .collect::<Result<Vec<_>>>()?;
        let can_measure = spec.has_closed_form_length() || index.is_some();
        let mut a = if can_measure {
            AlgebraElement::from_coeffs(&spec, pairs, index)?
        } else {
            let mut z = AlgebraElement::zero(&spec);
            for (g, v) in pairs {
                spec.check(&g)?;
                if v != 0.0 {
                    *z.coeffs.entry(g).or_insert(0.0) += v;
                }
            }
            z.coeffs.retain(|_, v| *v != 0.0);
            z
        };
        if can_measure && a.support_radius > wire.support_radius {
            return Err(Error::InvalidParameter(format!(
                "support radius {} is smaller than the measured {}",
                wire.support_radius, a.support_radius
            )));
        }
        a.support_radius = wire.support_radius;
        Ok(a)
    }

    pub fn from_json(text: &str, index: Option<&LengthIndex>) -> Result<AlgebraElement> {
        AlgebraElement::from_wire(&serde_json::from_str(text)?, index)
    }
}
