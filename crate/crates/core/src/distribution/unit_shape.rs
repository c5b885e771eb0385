//! Closed forms for the one-parameter case `alpha = 1`, `mu = 0`, where
//! `Pr(X = x) = lambda / ((1 + lambda x) (1 + lambda (x + 1)))`.
//!
//! The mean of this distribution is infinite, but its generating function,
//! the inverse moment `E[1/(X+1)]` and the ratio `Pr(X=1)/Pr(X=0)` are finite.

use crate::error::{Error, Result};
use crate::special::{digamma, lerch_phi, LerchArgs, EULER_GAMMA};

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::params(format!("lambda must be positive and finite, got {lambda}")));
    }
    Ok(())
}

/// Closed-form pmf of the unit-shape discrete Lomax distribution.
pub fn pmf(lambda: f64, x: u64) -> Result<f64> {
    check_lambda(lambda)?;
    let x = x as f64;
    Ok(lambda / ((1.0 + lambda * x) * (1.0 + lambda * (x + 1.0))))
}

/// Probability generating function `G(z) = E[z^X]` for `|z| < 1`.
///
/// `G(z) = (1/z) [1 - (1 - z) Phi(z, 1, 1/lambda) / lambda]`, with the
/// removable singularity at `z = 0` filled by `Pr(X = 0)`.
pub fn pgf(lambda: f64, z: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let args = LerchArgs::new(z, 1.0, 1.0 / lambda)?;
    if z == 0.0 {
        return pmf(lambda, 0);
    }
    let phi = lerch_phi(args)?;
    Ok((1.0 - (1.0 - z) * phi / lambda) / z)
}

/// `E[1 / (X + 1)] = lambda (lambda + psi(1/lambda) + gamma - 1) / (1 - lambda)`.
///
/// The expression is singular at `lambda = 1`, which is rejected.
pub fn inverse_moment(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda == 1.0 {
        return Err(Error::domain("inverse moment formula is singular at lambda = 1"));
    }
    let psi = digamma(1.0 / lambda)?;
    Ok(lambda * (lambda + psi + EULER_GAMMA - 1.0) / (1.0 - lambda))
}

/// Lower bound `Pr(X = 1) / Pr(X = 0)` on the variance, which works out to
/// `1 / (1 + 2 lambda)`.
pub fn variance_lower_bound(lambda: f64) -> Result<f64> {
    Ok(pmf(lambda, 1)? / pmf(lambda, 0)?)
}
