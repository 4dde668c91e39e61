use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, NormKind};
use crate::error::{Error, Result};
use crate::groups::{sphere_sizes, GroupSpec, LengthIndex};
use crate::norms::{estimate, estimate_radial, Method, MethodChoice, NormConfig, NormEstimate, RadialElement};

/// Witness families: `χ(B_n)`, `χ(S_n)` and
/// `a_n = Σ_{1≤m≤n} (1+m)^{−d̂} χ(S_m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Witness {
    Ball,
    Sphere,
    AN(f64),
}

impl Witness {
    /// Coefficients `c_0..c_n` of `Σ c_m χ(S_m)`.
    pub fn sphere_coeffs(&self, n: u32) -> Vec<f64> {
        let n = n as usize;
        match self {
            Witness::Ball => vec![1.0; n + 1],
            Witness::Sphere => {
                let mut c = vec![0.0; n + 1];
                c[n] = 1.0;
                c
            }
            Witness::AN(d) => (0..=n)
                .map(|m| if m == 0 { 0.0 } else { (1.0 + m as f64).powf(-d) })
                .collect(),
        }
    }

    fn validate(&self, n: u32) -> Result<()> {
        match self {
            Witness::AN(d) if !(*d > 0.0) => Err(Error::InvalidParameter(format!(
                "aN exponent must be positive, got {d}"
            ))),
            Witness::AN(_) if n == 0 => Err(Error::InvalidParameter("aN needs n ≥ 1".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Ball => f.write_str("ball"),
            Witness::Sphere => f.write_str("sphere"),
            Witness::AN(d) => write!(f, "aN({d})"),
        }
    }
}

impl FromStr for Witness {
    type Err = Error;
    fn from_str(s: &str) -> Result<Witness> {
        let bad = || Error::Parse {
            what: "witness",
            input: s.to_string(),
        };
        match s {
            "ball" => Ok(Witness::Ball),
            "sphere" => Ok(Witness::Sphere),
            _ => {
                let inner = s
                    .strip_prefix("aN(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let d: f64 = inner.parse().map_err(|_| bad())?;
                Ok(Witness::AN(d))
            }
        }
    }
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Witness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Witness, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub n: u32,
    pub norm_lower: f64,
    pub norm_upper: f64,
    pub l2: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSeries {
    pub group: String,
    pub witness: Witness,
    /// Method shared by all entries, or the weakest one used.
    pub method: Method,
    pub entries: Vec<SeriesEntry>,
}

impl RatioSeries {
    pub fn entry(&self, n: u32) -> Option<&SeriesEntry> {
        self.entries.iter().find(|e| e.n == n)
    }
}

/// Sphere sizes as floats; for standard free groups these come from
/// logarithms and never overflow.
pub(crate) fn sphere_sizes_f64(spec: &GroupSpec, radius: u32, index: Option<&LengthIndex>) -> Result<Vec<f64>> {
    if let Some(r) = spec.standard_free_rank() {
        let q = (2 * r - 1) as f64;
        return Ok((0..=radius)
            .map(|n| {
                if n == 0 {
                    1.0
                } else {
                    2.0 * r as f64 * q.powi(n as i32 - 1)
                }
            })
            .collect());
    }
    Ok(sphere_sizes(spec, radius, index)?
        .into_iter()
        .map(|s| s as f64)
        .collect())
}

fn method_rank(m: Method) -> u8 {
    match m {
        Method::AmenableExact => 3,
        Method::PowerIteration => 2,
        Method::TracePower => 1,
        Method::L1Bound => 0,
    }
}

/// Norm bracket for one witness element.
fn witness_estimate(
    spec: &GroupSpec,
    coeffs: &[f64],
    cfg: &NormConfig,
    index: Option<&LengthIndex>,
) -> Result<(NormEstimate, f64)> {
    let n = coeffs.len() as u32 - 1;
    let exact = match cfg.method {
        MethodChoice::Exact => {
            if !spec.is_amenable() {
                return Err(Error::NotAmenable(spec.descriptor()));
            }
            true
        }
        MethodChoice::Auto => spec.is_amenable(),
        _ => false,
    };
    if exact {
        // Witness coefficients are nonnegative, so ‖a‖ = ‖a‖_1.
        let sizes = sphere_sizes_f64(spec, n, index)?;
        let l1: f64 = coeffs.iter().zip(&sizes).map(|(c, s)| c * s).sum();
        let l2 = coeffs.iter().zip(&sizes).map(|(c, s)| c * c * s).sum::<f64>().sqrt();
        let est = NormEstimate {
            lower: l1,
            upper: l1,
            method: Method::AmenableExact,
            steps: vec![l1],
            iterations: 0,
            converged: true,
            extrapolated: None,
        };
        return Ok((est, l2));
    }
    if let (Some(r), MethodChoice::Auto | MethodChoice::Trace) = (spec.standard_free_rank(), cfg.method) {
        let x = RadialElement::from_sphere_coeffs(r, coeffs)?;
        return Ok((estimate_radial(&x, cfg)?, x.l2_norm()));
    }
    let ix = index.ok_or_else(|| Error::IndexRequired {
        group: spec.descriptor(),
    })?;
    if ix.radius() < n {
        return Err(Error::IndexTooSmall {
            needed: n,
            available: ix.radius(),
        });
    }
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .flat_map(|(m, c)| ix.sphere(m as u32).iter().map(move |g| (g.clone(), *c)));
    let a = AlgebraElement::from_coeffs(spec, terms, Some(ix))?;
    let l2 = a.norm(NormKind::L2, None)?;
    Ok((estimate(&a, cfg, Some(ix))?, l2))
}

/// Norm brackets and `ℓ²` norms of the witness at each `n`.
///
/// `n_list` is sorted and deduplicated. Amenable groups use the exact value
/// `‖a‖ = ‖a‖_1` unless another method is requested; standard free groups use
/// the radial trace path; everything else needs `index`.
pub fn ratio_series(
    spec: &GroupSpec,
    witness: Witness,
    n_list: &[u32],
    cfg: &NormConfig,
    index: Option<&LengthIndex>,
) -> Result<RatioSeries> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(Error::InvalidParameter("empty n list".into()));
    }
    let mut entries = Vec::with_capacity(ns.len());
    for &n in &ns {
        witness.validate(n)?;
        let (est, l2) = witness_estimate(spec, &witness.sphere_coeffs(n), cfg, index)?;
        entries.push(SeriesEntry {
            n,
            norm_lower: est.lower,
            norm_upper: est.upper,
            l2,
            ratio_lower: est.lower / l2,
            ratio_upper: est.upper / l2,
            method: est.method,
        });
    }
    let method = entries
        .iter()
        .map(|e| e.method)
        .min_by_key(|m| method_rank(*m))
        .expect("nonempty");
    Ok(RatioSeries {
        group: spec.descriptor(),
        witness,
        method,
        entries,
    })
}
