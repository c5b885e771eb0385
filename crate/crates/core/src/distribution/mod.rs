//! The discrete generalized Pareto family.
//!
//! `DgpParams` holds a shape `alpha`, a scale `lambda` and an integer location
//! `mu`. Its support is `{mu, mu + 1, ...}` and its survival function is
//! `Pr(X >= x) = [1 + lambda (x - mu)]^(-alpha)`. The discrete Lomax
//! distribution is the `mu = 0` member; [`unit_shape`] collects the closed
//! forms available when `alpha = 1` as well.
//!
//! All powers are evaluated as `exp(-alpha * ln_1p(..))`, and the pmf as
//! `survival(x) * (1 - ratio^alpha)` with the bracket computed through
//! `exp_m1`, so far-tail probabilities keep their relative precision.

mod moments;
mod sampling;
pub mod unit_shape;

pub use moments::{Moment, MomentSpec};
pub use sampling::SampleSeed;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a discrete generalized Pareto distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpParams {
    alpha: f64,
    lambda: f64,
    mu: u64,
}

impl DgpParams {
    /// Builds a distribution with shape `alpha > 0`, scale `lambda > 0` and
    /// support minimum `mu`.
    pub fn new(alpha: f64, lambda: f64, mu: u64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::params(format!("alpha must be positive and finite, got {alpha}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::params(format!("lambda must be positive and finite, got {lambda}")));
        }
        if mu > i64::MAX as u64 / 2 {
            return Err(Error::params(format!("mu = {mu} is too large")));
        }
        Ok(DgpParams { alpha, lambda, mu })
    }

    /// Discrete Lomax distribution, the `mu = 0` member of the family.
    pub fn lomax(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(alpha, lambda, 0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> u64 {
        self.mu
    }

    /// Same shape and scale, different location.
    pub fn with_mu(&self, mu: u64) -> Result<Self> {
        Self::new(self.alpha, self.lambda, mu)
    }

    /// Offset of `x` from the support minimum, or `None` below the support.
    fn offset(&self, x: i64) -> Option<f64> {
        let mu = self.mu as i64;
        (x >= mu).then(|| (x - mu) as f64)
    }

    fn require_support(&self, x: i64) -> Result<f64> {
        self.offset(x).ok_or(Error::BelowSupport { value: x, mu: self.mu })
    }

    /// `[1 + lambda k]^(-alpha)` for offset `k >= 0`.
    pub(crate) fn tail_at(&self, k: f64) -> f64 {
        (-self.alpha * (self.lambda * k).ln_1p()).exp()
    }

    /// `ln [1 + lambda k]^(-alpha)`.
    fn ln_tail_at(&self, k: f64) -> f64 {
        -self.alpha * (self.lambda * k).ln_1p()
    }

    /// `1 - [(1 + lambda k) / (1 + lambda (k + 1))]^alpha`.
    fn step_fraction(&self, k: f64) -> f64 {
        let log_ratio = -(self.lambda / (1.0 + self.lambda * k)).ln_1p();
        -(self.alpha * log_ratio).exp_m1()
    }

    /// `Pr(X <= x)`; zero below the support.
    pub fn cdf(&self, x: i64) -> f64 {
        match self.offset(x) {
            None => 0.0,
            Some(k) => -(self.ln_tail_at(k + 1.0)).exp_m1(),
        }
    }

    /// `Pr(X >= x)` for `x` on the support.
    pub fn survival(&self, x: i64) -> Result<f64> {
        Ok(self.tail_at(self.require_support(x)?))
    }

    /// `Pr(X = x)`; zero below the support.
    pub fn pmf(&self, x: i64) -> f64 {
        match self.offset(x) {
            None => 0.0,
            Some(k) => self.tail_at(k) * self.step_fraction(k),
        }
    }

    /// `ln Pr(X = x)` for `x` on the support.
    pub fn ln_pmf(&self, x: i64) -> Result<f64> {
        let k = self.require_support(x)?;
        Ok(self.ln_tail_at(k) + self.step_fraction(k).ln())
    }

    /// Failure rate `Pr(X = x) / Pr(X >= x)`.
    pub fn hazard(&self, x: i64) -> Result<f64> {
        Ok(self.step_fraction(self.require_support(x)?))
    }

    /// Smallest support point `x` with `cdf(x) >= gamma`.
    ///
    /// Evaluates the ceiling formula, clamps it to `mu`, then nudges the
    /// candidate by at most a step or two so that the result is exactly the
    /// minimal `x` under floating-point `cdf`. Quantiles beyond `2^53` are
    /// returned without the correction, saturating at `u64::MAX`.
    pub fn quantile(&self, gamma: f64) -> Result<u64> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {gamma}")));
        }
        // ((1 - gamma)^(-1/alpha) - 1) / lambda
        let spread = (-(-gamma).ln_1p() / self.alpha).exp_m1() / self.lambda;
        let raw = (spread - 1.0).ceil();
        if !(raw < 9.0e15) {
            return Ok((raw + self.mu as f64) as u64);
        }
        let mut x = self.mu as i64 + (raw as i64).max(0);
        let mu = self.mu as i64;
        while x > mu && self.cdf(x - 1) >= gamma {
            x -= 1;
        }
        while self.cdf(x) < gamma {
            x += 1;
        }
        Ok(x as u64)
    }

    /// Raw moment `E(X^r)`, reported as divergent when `alpha <= r`.
    pub fn raw_moment(&self, spec: MomentSpec) -> Moment {
        moments::raw_moment(self, spec)
    }

    /// `E(X)` at the default truncation tolerance.
    pub fn mean(&self) -> Moment {
        self.raw_moment(MomentSpec::default())
    }

    /// Variance when `alpha > 2`.
    pub fn variance(&self) -> Result<f64> {
        let (m1, m2) = self.first_two_moments()?;
        Ok(m2 - m1 * m1)
    }

    /// Variance-to-mean ratio `[E(X^2) - E(X)^2] / E(X)`; needs `alpha > 2`.
    pub fn index_of_dispersion(&self) -> Result<f64> {
        let (m1, m2) = self.first_two_moments()?;
        if m1 <= 0.0 {
            return Err(Error::Numerical("mean underflowed to zero".into()));
        }
        Ok((m2 - m1 * m1) / m1)
    }

    fn first_two_moments(&self) -> Result<(f64, f64)> {
        if self.alpha <= 2.0 {
            return Err(Error::domain(format!(
                "second moment is infinite for alpha = {} <= 2",
                self.alpha
            )));
        }
        let m1 = self.raw_moment(MomentSpec::default());
        let m2 = self.raw_moment(MomentSpec::new(2, MomentSpec::DEFAULT_TOLERANCE)?);
        match (m1.value(), m2.value()) {
            (Some(m1), Some(m2)) => Ok((m1, m2)),
            _ => Err(Error::Numerical("moment series failed".into())),
        }
    }

    /// Draws `n` values by inverse-transform sampling from a generator seeded
    /// with `seed`.
    pub fn sample(&self, n: usize, seed: SampleSeed) -> Result<Vec<u64>> {
        sampling::sample(self, n, seed)
    }
}

impl std::fmt::Display for DgpParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DGP(alpha = {}, lambda = {}, mu = {})", self.alpha, self.lambda, self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(alpha: f64, lambda: f64, mu: u64) -> DgpParams {
        DgpParams::new(alpha, lambda, mu).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DgpParams::new(0.0, 1.0, 0).is_err());
        assert!(DgpParams::new(1.0, -1.0, 0).is_err());
        assert!(DgpParams::new(f64::NAN, 1.0, 0).is_err());
        assert!(DgpParams::new(1.0, f64::INFINITY, 0).is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(p(1.0, 1.0, 0).cdf(0), 0.5);
        let d = p(3.8227, 0.2295, 3);
        assert_eq!(d.cdf(2), 0.0);
        assert_eq!(d.cdf(-7), 0.0);
        // 1 - 1.2295^-3.8227
        assert!((d.cdf(3) - 0.5461).abs() < 5e-4);
        assert!((d.cdf(3) - 525.0 / 958.0).abs() < 0.002);
    }

    #[test]
    fn survival_examples() {
        let d = p(2.0, 0.5, 0);
        assert_eq!(d.survival(0).unwrap(), 1.0);
        assert_relative_eq!(d.survival(2).unwrap(), 0.25, max_relative = 1e-15);
        let dlo = p(6.5547, 0.3142, 0);
        let s1 = dlo.survival(1).unwrap();
        assert!((s1 - 0.166_80).abs() < 1e-5, "{s1}");
        assert!((s1 - (1.0 - 797.0 / 958.0)).abs() < 0.002);
        assert!(matches!(p(1.0, 1.0, 4).survival(3), Err(Error::BelowSupport { .. })));
    }

    #[test]
    fn pmf_examples() {
        let d = p(1.0, 1.0, 0);
        assert_eq!(d.pmf(0), 0.5);
        assert_relative_eq!(d.pmf(1), 1.0 / 6.0, max_relative = 1e-14);
        let acc = p(3.8227, 0.2295, 3);
        assert!((acc.pmf(4) - 0.218).abs() < 5e-4);
        assert!((acc.pmf(4) - 209.0 / 958.0).abs() < 0.002);
        assert_eq!(acc.pmf(2), 0.0);
    }

    #[test]
    fn ln_pmf_matches_pmf() {
        assert_relative_eq!(p(1.0, 1.0, 0).ln_pmf(0).unwrap(), 0.5f64.ln(), max_relative = 1e-15);
        let d = p(2.0, 0.5, 0);
        assert_relative_eq!(d.ln_pmf(3).unwrap(), d.pmf(3).ln(), max_relative = 1e-12);
        assert!(d.ln_pmf(-1).is_err());
    }

    #[test]
    fn ln_pmf_far_tail_is_finite() {
        // oracle: ln pmf = -5 ln(1 + 1e5) + ln(1 - (1 - 0.1/(1 + 1e5))^... ) evaluated with
        // series for the log ratio: ln(1 - r^5) where ln r = -ln(1 + 0.1/100001).
        let d = p(5.0, 0.1, 0);
        let v = d.ln_pmf(1_000_000).unwrap();
        assert!(v.is_finite() && v < 0.0);
        let eps: f64 = 0.1 / 100_001.0;
        let ln_r = -(eps - eps * eps / 2.0 + eps.powi(3) / 3.0);
        let y = -5.0 * ln_r; // 1 - r^5 = 1 - e^{-y}
        let one_minus = y - y * y / 2.0 + y.powi(3) / 6.0;
        let oracle = -5.0 * 100_001f64.ln() + one_minus.ln();
        assert_relative_eq!(v, oracle, max_relative = 1e-12);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(p(1.0, 1.0, 0).quantile(0.5).unwrap(), 0);
        let d = p(3.8227, 0.2295, 3);
        assert_eq!(d.quantile(d.cdf(3)).unwrap(), 3);
        let q = d.quantile(0.99).unwrap();
        let scan = (3i64..).find(|&x| d.cdf(x) >= 0.99).unwrap() as u64;
        assert_eq!(q, scan);
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
        assert!(d.quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_clamps_to_support() {
        // gamma below cdf(mu) drives the raw formula to mu - 1
        let d = p(2.0, 0.5, 7);
        assert_eq!(d.quantile(1e-6).unwrap(), 7);
    }

    #[test]
    fn hazard_examples() {
        let d = p(1.0, 1.0, 0);
        assert_relative_eq!(d.hazard(1).unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        let acc = p(3.26, 0.2933, 3);
        assert_relative_eq!(acc.hazard(3).unwrap(), acc.pmf(3), max_relative = 1e-14);
        assert_relative_eq!(
            acc.hazard(5).unwrap(),
            acc.pmf(5) / acc.survival(5).unwrap(),
            max_relative = 1e-12
        );
        assert!(acc.hazard(2).is_err());
    }

    #[test]
    fn dispersion_needs_two_moments() {
        assert!(p(2.0, 1.0, 0).index_of_dispersion().is_err());
        assert!(p(1.5, 1.0, 0).variance().is_err());
    }

    #[test]
    fn dispersion_reference_cells() {
        // exact values from an independent high-precision series summation
        assert!((p(3.0, 0.1, 0).index_of_dispersion().unwrap() - 16.538_318_358_667_1).abs() < 1e-8);
        assert!((p(10.0, 10.0, 0).index_of_dispersion().unwrap() - 1.00).abs() < 0.01);
        assert!((p(5.0, 1.0, 0).index_of_dispersion().unwrap() - 1.42).abs() < 0.01);
    }
}
