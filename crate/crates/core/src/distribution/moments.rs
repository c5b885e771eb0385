use serde::{Deserialize, Serialize};

use super::DgpParams;
use crate::error::{Error, Result};
use crate::special::hurwitz_zeta_scaled;

/// Number of series terms summed one by one before the remaining tail is
/// taken in closed form.
const DIRECT_TERMS: u64 = 64;

/// Order and truncation target for a raw moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    order: u32,
    rel_tolerance: f64,
}

impl MomentSpec {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;

    pub fn new(order: u32, rel_tolerance: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("moment order must be at least 1"));
        }
        if !(rel_tolerance > 0.0 && rel_tolerance < 1.0) {
            return Err(Error::domain(format!(
                "relative tolerance must lie in (0, 1), got {rel_tolerance}"
            )));
        }
        Ok(MomentSpec { order, rel_tolerance })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn rel_tolerance(&self) -> f64 {
        self.rel_tolerance
    }
}

impl Default for MomentSpec {
    fn default() -> Self {
        MomentSpec { order: 1, rel_tolerance: Self::DEFAULT_TOLERANCE }
    }
}

/// A raw moment, or the report that its series diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Moment::Divergent)
    }
}

/// `x^r - (x - 1)^r` written as a sum of positive terms.
fn power_step(x: f64, r: u32) -> f64 {
    match r {
        1 => 1.0,
        2 => 2.0 * x - 1.0,
        _ => (0..r).map(|i| x.powi(i as i32) * (x - 1.0).powi((r - 1 - i) as i32)).sum(),
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Sums `E(X^r) = mu^r + sum_{x > mu} [x^r - (x-1)^r] Pr(X >= x)`.
///
/// Terms are added one at a time; the loop stops early once an integral
/// bound on the remainder is below `rel_tolerance` of the partial sum. If that
/// has not happened after `DIRECT_TERMS` terms, the remainder is added exactly
/// as a combination of Hurwitz zeta values.
pub(super) fn raw_moment(p: &DgpParams, spec: MomentSpec) -> Moment {
    let r = spec.order;
    let alpha = p.alpha;
    if alpha <= r as f64 {
        return Moment::Divergent;
    }
    let mu = p.mu as f64;
    let mut sum = mu.powi(r as i32);
    for j in 1..=DIRECT_TERMS {
        let x = mu + j as f64;
        sum += power_step(x, r) * p.tail_at(j as f64);
        if integrand_decreasing(p, r, x) && tail_bound(p, r, x) <= spec.rel_tolerance * sum {
            return Moment::Finite(sum);
        }
    }
    Moment::Finite(sum + zeta_tail(p, r, DIRECT_TERMS))
}

/// Whether `r t^(r-1) [1 + lambda (t - mu)]^(-alpha)` is decreasing for all `t >= x`.
fn integrand_decreasing(p: &DgpParams, r: u32, x: f64) -> bool {
    let u = 1.0 + p.lambda * (x - p.mu as f64);
    (r as f64 - 1.0) * u < p.alpha * p.lambda * x
}

/// Upper bound on `sum_{x' > x}` of the series terms via
/// `int_x^inf r t^(r-1) [1 + lambda (t - mu)]^(-alpha) dt`.
fn tail_bound(p: &DgpParams, r: u32, x: f64) -> f64 {
    let (alpha, lambda, mu) = (p.alpha, p.lambda, p.mu as f64);
    let ln_u = (lambda * (x - mu)).ln_1p();
    match r {
        1 => ((1.0 - alpha) * ln_u).exp() / (lambda * (alpha - 1.0)),
        2 => {
            let c = 1.0 - lambda * mu;
            2.0 / (lambda * lambda)
                * (((2.0 - alpha) * ln_u).exp() / (alpha - 2.0)
                    - c * ((1.0 - alpha) * ln_u).exp() / (alpha - 1.0))
        }
        _ => {
            // t <= u (1 + lambda mu) / lambda for u >= 1
            let rf = r as f64;
            let ln_coef = (rf / lambda).ln() + (rf - 1.0) * ((1.0 + lambda * mu) / lambda).ln();
            (ln_coef + (rf - alpha) * ln_u).exp() / (alpha - rf)
        }
    }
}

/// Exact `sum_{j > skip}` of the series terms.
///
/// With `w = j + 1/lambda` the summand is `P(w) (lambda w)^(-alpha)` for a
/// polynomial `P` of degree `r - 1`, so the remainder is a finite sum of
/// Hurwitz zeta values starting at `w0 = skip + 1 + 1/lambda`.
fn zeta_tail(p: &DgpParams, r: u32, skip: u64) -> f64 {
    let (alpha, lambda, mu) = (p.alpha, p.lambda, p.mu as f64);
    let w0 = skip as f64 + 1.0 + 1.0 / lambda;
    let lead = p.tail_at(skip as f64 + 1.0);
    let d = mu - 1.0 / lambda;
    (0..r)
        .map(|k| {
            let e = (r - k) as i32;
            let coef = binomial(r, k) * (d.powi(e) - (d - 1.0).powi(e));
            let z = hurwitz_zeta_scaled(alpha - k as f64, w0)
                .expect("alpha > r keeps every zeta order above 1");
            coef * w0.powi(k as i32) * z
        })
        .sum::<f64>()
        * lead
}
