use crate::algebra::{AlgebraElement, NormKind};
use crate::error::{Error, Result};

use super::radial::{radial_convolve, RadialElement};
use super::{Method, NormEstimate};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceOptions {
    /// Largest support allowed for any intermediate power.
    pub budget: usize,
    pub extrapolate: bool,
}

impl Default for TraceOptions {
    fn default() -> TraceOptions {
        TraceOptions {
            budget: super::DEFAULT_TRACE_BUDGET,
            extrapolate: false,
        }
    }
}

/// What the trace estimators need from an element type.
trait Moments: Sized {
    /// `a*∗a`.
    fn gram(&self, budget: usize) -> Result<Self>;
    fn product(&self, other: &Self, budget: usize) -> Result<Self>;
    /// `τ(x∗y)` for self-adjoint `y`.
    fn pairing(&self, other: &Self) -> f64;
    fn tau(&self) -> f64;
    fn peak(&self) -> f64;
    fn rescaled(&self, c: f64) -> Self;
    fn l1(&self) -> f64;
}

impl Moments for AlgebraElement {
    fn gram(&self, budget: usize) -> Result<Self> {
        self.adjoint().convolve_with_budget(self, budget)
    }
    fn product(&self, other: &Self, budget: usize) -> Result<Self> {
        self.convolve_with_budget(other, budget)
    }
    fn pairing(&self, other: &Self) -> f64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().map(|(g, c)| c * large.coeff(g)).sum()
    }
    fn tau(&self) -> f64 {
        self.trace()
    }
    fn peak(&self) -> f64 {
        self.max_abs()
    }
    fn rescaled(&self, c: f64) -> Self {
        self.scaled(c)
    }
    fn l1(&self) -> f64 {
        self.norm(NormKind::L1, None).expect("plain norms need no index")
    }
}

fn radial_budget(x: RadialElement, budget: usize) -> Result<RadialElement> {
    if x.unit_coeffs().len() > budget {
        Err(Error::BudgetExceeded {
            limit: budget,
            reached: x.max_radius() as u32,
            context: format!("radial product needs {} sphere coefficients", x.unit_coeffs().len()),
        })
    } else {
        Ok(x)
    }
}

impl Moments for RadialElement {
    fn gram(&self, budget: usize) -> Result<Self> {
        // Spheres are symmetric, so radial elements are self-adjoint.
        radial_budget(radial_convolve(self, self)?, budget)
    }
    fn product(&self, other: &Self, budget: usize) -> Result<Self> {
        radial_budget(radial_convolve(self, other)?, budget)
    }
    fn pairing(&self, other: &Self) -> f64 {
        self.unit_coeffs()
            .iter()
            .zip(other.unit_coeffs())
            .map(|(x, y)| x * y)
            .sum()
    }
    fn tau(&self) -> f64 {
        self.trace()
    }
    fn peak(&self) -> f64 {
        self.max_abs_unit()
    }
    fn rescaled(&self, c: f64) -> Self {
        self.scaled(c)
    }
    fn l1(&self) -> f64 {
        self.l1_norm()
    }
}

/// An element stored as `exp(log_scale)·x` with `max |x| = 1`.
struct Scaled<T> {
    x: T,
    log_scale: f64,
}

impl<T: Moments> Scaled<T> {
    fn new(x: T) -> Scaled<T> {
        let s = x.peak();
        Scaled {
            x: x.rescaled(1.0 / s),
            log_scale: s.ln(),
        }
    }

    fn mul(&self, other: &Scaled<T>, budget: usize) -> Result<Scaled<T>> {
        let p = Scaled::new(self.x.product(&other.x, budget)?);
        Ok(Scaled {
            x: p.x,
            log_scale: p.log_scale + self.log_scale + other.log_scale,
        })
    }

    /// `ln τ(self ∗ other)`.
    fn ln_pairing(&self, other: &Scaled<T>) -> f64 {
        self.x.pairing(&other.x).ln() + self.log_scale + other.log_scale
    }
}

fn zero_estimate() -> NormEstimate {
    NormEstimate {
        lower: 0.0,
        upper: 0.0,
        method: Method::TracePower,
        steps: vec![0.0],
        iterations: 0,
        converged: true,
        extrapolated: None,
    }
}

/// Appends a step, keeping the running maximum so that rounding in the last
/// bits cannot make the sequence decrease.
fn push_step(steps: &mut Vec<f64>, v: f64) {
    let v = steps.last().map_or(v, |p| p.max(v));
    steps.push(v);
}

/// Intercept of the least-squares line `ln(step) = c + d/k` over the last
/// half of the points.
fn extrapolate(ks: &[f64], steps: &[f64]) -> Option<f64> {
    let start = ks.len() / 2;
    let pts: Vec<(f64, f64)> = ks[start..]
        .iter()
        .zip(&steps[start..])
        .filter(|(_, s)| **s > 0.0)
        .map(|(k, s)| (1.0 / k, s.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some((my - sxy / sxx * mx).exp())
}

fn finish(
    steps: Vec<f64>,
    ks: &[f64],
    upper: f64,
    achieved: usize,
    wanted: usize,
    opts: &TraceOptions,
) -> NormEstimate {
    let last = *steps.last().expect("at least one step");
    NormEstimate {
        lower: last.min(upper),
        upper,
        method: Method::TracePower,
        extrapolated: if opts.extrapolate {
            extrapolate(ks, &steps)
        } else {
            None
        },
        steps,
        iterations: achieved,
        converged: achieved == wanted,
    }
}

/// Squaring schedule: `step_j = τ(b^{2^j})^{1/2^{j+1}}` for `b = a*∗a`,
/// `j = 0..=depth`.
fn squaring<T: Moments>(a: &T, depth: u32, opts: &TraceOptions) -> Result<NormEstimate> {
    if depth == 0 {
        return Err(Error::InvalidParameter("trace-power depth must be at least 1".into()));
    }
    let upper = a.l1();
    if upper == 0.0 {
        return Ok(zero_estimate());
    }
    let b = a.gram(opts.budget)?;
    let mut steps = vec![b.tau().sqrt()];
    let mut ks = vec![1.0];
    let mut p = Scaled::new(b);
    let mut achieved = 0;
    for j in 1..=depth {
        if j >= 2 {
            match p.mul(&p, opts.budget) {
                Ok(q) => p = q,
                Err(Error::BudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        // τ(b^{2^j}) = ‖b^{2^{j−1}}‖_2².
        let ln_tau = p.ln_pairing(&p);
        let k = 2f64.powi(j as i32);
        push_step(&mut steps, (ln_tau / (2.0 * k)).exp());
        ks.push(k);
        achieved = j as usize;
    }
    Ok(finish(steps, &ks, upper, achieved, depth as usize, opts))
}

/// Linear schedule: `step_k = τ(b^k)^{1/2k}` for `k = 1..=k_max`, using
/// `τ(b^k) = τ(b^⌈k/2⌉ b^⌊k/2⌋)`.
fn linear<T: Moments>(a: &T, k_max: u32, opts: &TraceOptions) -> Result<NormEstimate> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("moment count must be at least 1".into()));
    }
    let upper = a.l1();
    if upper == 0.0 {
        return Ok(zero_estimate());
    }
    let b = a.gram(opts.budget)?;
    let mut steps = vec![b.tau().sqrt()];
    let mut ks = vec![1.0];
    let mut powers = vec![Scaled::new(b)];
    let mut achieved = 1;
    for k in 2..=k_max as usize {
        let hi = k.div_ceil(2);
        let lo = k / 2;
        if powers.len() < hi {
            match powers[hi - 2].mul(&powers[0], opts.budget) {
                Ok(q) => powers.push(q),
                Err(Error::BudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        let ln_tau = powers[hi - 1].ln_pairing(&powers[lo - 1]);
        push_step(&mut steps, (ln_tau / (2.0 * k as f64)).exp());
        ks.push(k as f64);
        achieved = k;
    }
    Ok(finish(steps, &ks, upper, achieved, k_max as usize, opts))
}

/// Trace-power bracket by repeated squaring; radial elements of standard
/// free groups take the radial path.
pub fn op_norm_trace_power(a: &AlgebraElement, depth: u32, budget: usize) -> Result<NormEstimate> {
    trace_power_with(
        a,
        depth,
        &TraceOptions {
            budget,
            extrapolate: false,
        },
    )
}

pub(crate) fn trace_power_with(a: &AlgebraElement, depth: u32, opts: &TraceOptions) -> Result<NormEstimate> {
    match RadialElement::from_algebra(a) {
        Some(x) => squaring(&x, depth, opts),
        None => squaring(a, depth, opts),
    }
}

/// Trace-power bracket with every exponent `2k`, `k = 1..=k_max`.
pub fn op_norm_trace_moments(a: &AlgebraElement, k_max: u32, opts: &TraceOptions) -> Result<NormEstimate> {
    match RadialElement::from_algebra(a) {
        Some(x) => linear(&x, k_max, opts),
        None => linear(a, k_max, opts),
    }
}

pub fn radial_trace_power(x: &RadialElement, depth: u32, opts: &TraceOptions) -> Result<NormEstimate> {
    squaring(x, depth, opts)
}

pub fn radial_trace_moments(x: &RadialElement, k_max: u32, opts: &TraceOptions) -> Result<NormEstimate> {
    linear(x, k_max, opts)
}
