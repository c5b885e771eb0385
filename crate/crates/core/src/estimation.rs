//! Parameter estimation from a frequency table.
//!
//! Estimation runs in two stages. The location `mu` is fixed first (the
//! sample minimum, or a caller-supplied value such as `0` for the discrete
//! Lomax model). The relative frequencies at `mu` and `mu + 1` then give a
//! closed-form seed `(alpha0, lambda0)`, and maximum likelihood refines it.
//!
//! The maximizer works on `(ln alpha, ln lambda)`, so every iterate stays
//! positive. Each step is Newton on the analytic gradient, with a
//! finite-difference Hessian of that gradient. A backtracking line search
//! only accepts steps that do not lower the log-likelihood.

use serde::{Deserialize, Serialize};

use crate::data::FrequencyTable;
use crate::distribution::DgpParams;
use crate::error::{Error, Result};

const SEED_LAMBDA_MIN: f64 = 1e-9;
const SEED_LAMBDA_MAX: f64 = 1e9;
/// Iterates with `|ln alpha|` or `|ln lambda|` beyond this are treated as
/// running off to the boundary of the parameter space. The usual way there is
/// `alpha -> inf`, `lambda -> 0` with `alpha lambda` fixed, the geometric
/// limit, which is where the likelihood climbs when the data are less
/// dispersed than a geometric law; by `alpha = e^20` the two are equal to
/// about eight digits.
const LOG_PARAM_LIMIT: f64 = 20.0;

/// Which member of the family is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Three parameters; `mu` is the sample minimum.
    Dgp,
    /// Two parameters; `mu` is fixed at 0.
    Dlo,
}

impl Model {
    /// Location passed to [`fit_mle`].
    pub fn location(self) -> Option<u64> {
        match self {
            Model::Dgp => None,
            Model::Dlo => Some(0),
        }
    }

    /// Parameters estimated from the data, for chi-square degrees of freedom.
    pub fn parameter_count(self) -> usize {
        match self {
            Model::Dgp => 3,
            Model::Dlo => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Dgp => "dgp",
            Model::Dlo => "dlo",
        }
    }
}

/// Starting values from the relative frequencies at `mu` and `mu + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedEstimate {
    pub alpha0: f64,
    pub lambda0: f64,
    /// `false` when the frequency equations had no solution and the
    /// `(1, 1)` fallback was used.
    pub solved: bool,
}

impl SeedEstimate {
    pub const FALLBACK: SeedEstimate = SeedEstimate { alpha0: 1.0, lambda0: 1.0, solved: false };

    /// Solves `p_mu = 1 - (1+lambda)^-alpha` and
    /// `p_{mu+1} = (1+lambda)^-alpha - (1+2 lambda)^-alpha`.
    pub fn from_frequencies(p_mu: f64, p_next: f64) -> Self {
        Self::from_tails(1.0 - p_mu, 1.0 - p_mu - p_next)
    }

    /// Same system written with the tail probabilities `s1 = 1 - p_mu` and
    /// `s2 = 1 - p_mu - p_{mu+1}`.
    ///
    /// Eliminating `alpha` gives `ln(1 + 2 lambda) / ln(1 + lambda) = ln s2 / ln s1`,
    /// whose left side falls strictly from 2 to 1; the root is found by
    /// bisection on `ln lambda` over `[1e-9, 1e9]`. Then
    /// `alpha = -ln s1 / ln(1 + lambda)`.
    pub fn from_tails(s1: f64, s2: f64) -> Self {
        if !(s1 > 0.0 && s1 < 1.0 && s2 > 0.0 && s2 < s1) {
            return Self::FALLBACK;
        }
        let target = s2.ln() / s1.ln();
        if !(target > 1.0 && target < 2.0) {
            return Self::FALLBACK;
        }
        let excess = |lambda: f64| (2.0 * lambda).ln_1p() / lambda.ln_1p() - target;
        let (mut lo, mut hi) = (SEED_LAMBDA_MIN.ln(), SEED_LAMBDA_MAX.ln());
        if excess(lo.exp()) <= 0.0 || excess(hi.exp()) >= 0.0 {
            return Self::FALLBACK;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if excess(mid.exp()) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let lambda0 = (0.5 * (lo + hi)).exp();
        let alpha0 = -s1.ln() / lambda0.ln_1p();
        SeedEstimate { alpha0, lambda0, solved: true }
    }
}

/// Frequency-method seed for a table with support minimum `mu`.
pub fn frequency_seed(data: &FrequencyTable, mu: u64) -> Result<SeedEstimate> {
    let n = data.total();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let at_mu = data.count_of(mu);
    let at_next = data.count_of(mu + 1);
    if at_mu == 0 || at_next == 0 {
        return Ok(SeedEstimate::FALLBACK);
    }
    // tails from integer counts, so nothing cancels when p_mu is close to 1
    let s1 = (n - at_mu) as f64 / n as f64;
    let s2 = n.saturating_sub(at_mu + at_next) as f64 / n as f64;
    Ok(SeedEstimate::from_tails(s1, s2))
}

fn check_support(params: &DgpParams, data: &FrequencyTable) -> Result<()> {
    if data.min_value() < params.mu() {
        return Err(Error::BelowSupport { value: data.min_value() as i64, mu: params.mu() });
    }
    Ok(())
}

/// `sum count * ln pmf(value)`.
pub fn log_likelihood(params: &DgpParams, data: &FrequencyTable) -> Result<f64> {
    check_support(params, data)?;
    let mut total = 0.0;
    for (value, count) in data.iter() {
        total += count as f64 * params.ln_pmf(value as i64)?;
    }
    Ok(total)
}

/// `log_likelihood(new) - log_likelihood(old)` for two parameter sets with the
/// same `mu`, computed term by term without subtracting two large totals.
///
/// Near a maximum the difference is far below the rounding error of either
/// log-likelihood, so the optimizer compares candidate points with this.
pub fn log_likelihood_ratio(new: &DgpParams, old: &DgpParams, data: &FrequencyTable) -> Result<f64> {
    if new.mu() != old.mu() {
        return Err(Error::domain("likelihood ratio needs a common mu"));
    }
    check_support(old, data)?;
    let (a0, l0) = (old.alpha(), old.lambda());
    let (a1, l1) = (new.alpha(), new.lambda());
    let (da, dl) = (a1 - a0, l1 - l0);
    let mut sum = 0.0;
    let mut carry = 0.0;
    for (value, count) in data.iter() {
        let k = (value - old.mu()) as f64;
        let (a_old, a_new) = (1.0 + l0 * k, 1.0 + l1 * k);
        let b_old = a_old + l0;
        // tail part: -alpha ln(1 + lambda k)
        let tail = -(da * (l1 * k).ln_1p() + a0 * (dl * k / a_old).ln_1p());
        // step part: ln s with s = -expm1(-u), u = alpha ln(1 + lambda / A)
        let ell_new = (l1 / a_new).ln_1p();
        let u_old = a0 * (l0 / a_old).ln_1p();
        let du = da * ell_new + a0 * (dl / (a_new * b_old)).ln_1p();
        let s_old = -(-u_old).exp_m1();
        let step = ((-u_old).exp() * -(-du).exp_m1() / s_old).ln_1p();
        // Neumaier summation: first-order terms cancel across observations
        let term = count as f64 * (tail + step);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            carry += (sum - t) + term;
        } else {
            carry += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + carry)
}

/// Partial derivatives of the log-likelihood in `alpha` and `lambda`.
///
/// With `A = 1 + lambda k`, `B = A + lambda`, `k = x - mu` and
/// `q = (A/B)^alpha`, each observation contributes
/// `d/d alpha = -ln A + ln(1 + lambda/A) q / (1 - q)` and
/// `d/d lambda = alpha / (A B (1 - q)) - alpha (k + 1) / B`.
pub fn log_likelihood_gradient(params: &DgpParams, data: &FrequencyTable) -> Result<[f64; 2]> {
    check_support(params, data)?;
    let (alpha, lambda, mu) = (params.alpha(), params.lambda(), params.mu());
    let mut grad = [0.0; 2];
    for (value, count) in data.iter() {
        let k = (value - mu) as f64;
        let a = 1.0 + lambda * k;
        let b = a + lambda;
        let ln_a = (lambda * k).ln_1p();
        let ln_step = (lambda / a).ln_1p();
        let one_minus_q = -(-alpha * ln_step).exp_m1();
        let q = 1.0 - one_minus_q;
        let c = count as f64;
        grad[0] += c * (-ln_a + ln_step * q / one_minus_q);
        grad[1] += c * (alpha / (a * b * one_minus_q) - alpha * (k + 1.0) / b);
    }
    Ok(grad)
}

/// Asymptotic standard errors of `(alpha, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardErrors {
    pub alpha: f64,
    pub lambda: f64,
}

/// Standard errors from the observed information at `params`.
///
/// `Ok(None)` when the negative Hessian is not positive definite.
pub fn standard_errors(params: &DgpParams, data: &FrequencyTable) -> Result<Option<StandardErrors>> {
    check_support(params, data)?;
    let mu = params.mu();
    let loglik = |alpha: f64, lambda: f64| {
        DgpParams::new(alpha, lambda, mu)
            .and_then(|p| log_likelihood(&p, data))
            .unwrap_or(f64::NAN)
    };
    Ok(observed_information_se(loglik, params.alpha(), params.lambda()))
}

/// Square roots of the diagonal of the inverse negative Hessian of `loglik`,
/// taken by central differences with step `max(1e-5, 1e-5 |param|)`.
pub fn observed_information_se<F>(loglik: F, alpha: f64, lambda: f64) -> Option<StandardErrors>
where
    F: Fn(f64, f64) -> f64,
{
    let ha = (1e-5 * alpha.abs()).max(1e-5).min(0.5 * alpha);
    let hl = (1e-5 * lambda.abs()).max(1e-5).min(0.5 * lambda);
    let f0 = loglik(alpha, lambda);
    let faa = (loglik(alpha + ha, lambda) - 2.0 * f0 + loglik(alpha - ha, lambda)) / (ha * ha);
    let fll = (loglik(alpha, lambda + hl) - 2.0 * f0 + loglik(alpha, lambda - hl)) / (hl * hl);
    let fal = (loglik(alpha + ha, lambda + hl) - loglik(alpha + ha, lambda - hl)
        - loglik(alpha - ha, lambda + hl)
        + loglik(alpha - ha, lambda - hl))
        / (4.0 * ha * hl);
    // information matrix = -Hessian
    let (i_aa, i_ll, i_al) = (-faa, -fll, -fal);
    let det = i_aa * i_ll - i_al * i_al;
    if !(i_aa > 0.0 && det > 0.0) || !det.is_finite() {
        return None;
    }
    Some(StandardErrors { alpha: (i_ll / det).sqrt(), lambda: (i_aa / det).sqrt() })
}

/// Stopping rules for [`fit_mle_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Bound on the final step in `(ln alpha, ln lambda)`.
    pub step_tolerance: f64,
    /// Bound on the gradient norm in `(alpha, lambda)`.
    pub gradient_tolerance: f64,
    /// Skip the standard-error computation (bootstrap refits do not need it).
    pub standard_errors: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 10_000,
            step_tolerance: 1e-10,
            gradient_tolerance: 1e-8,
            standard_errors: true,
        }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: DgpParams,
    pub standard_errors: Option<StandardErrors>,
    pub loglik: f64,
    pub seed: SeedEstimate,
    pub iterations: usize,
    pub converged: bool,
    /// Gradient in `(alpha, lambda)` at `params`.
    pub gradient: [f64; 2],
    /// Log-likelihood along the accepted iterates: the value at the seed, then
    /// each accepted step's likelihood ratio added on.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

/// Maximum-likelihood fit with default options.
///
/// `mu = None` uses the sample minimum; the discrete Lomax fit is `Some(0)`.
///
/// No maximizer exists when all mass sits on `mu`, or typically when the
/// data are less dispersed than a geometric law; the result then comes back
/// with `converged = false` and no standard errors.
pub fn fit_mle(data: &FrequencyTable, mu: Option<u64>) -> Result<FitResult> {
    fit_mle_with(data, mu, &FitOptions::default())
}

pub fn fit_mle_with(data: &FrequencyTable, mu: Option<u64>, options: &FitOptions) -> Result<FitResult> {
    let mu = mu.unwrap_or_else(|| data.min_value());
    if data.min_value() < mu {
        return Err(Error::BelowSupport { value: data.min_value() as i64, mu });
    }
    let seed = frequency_seed(data, mu)?;
    let objective = Objective { data, mu };

    let mut theta = [seed.alpha0.ln(), seed.lambda0.ln()];
    let mut value = objective.value(theta)?;
    let mut trace = vec![value];

    // All mass on mu: the likelihood increases towards the boundary and has
    // no maximizer.
    if data.count_of(mu) == data.total() {
        return objective.finish(theta, value, seed, 0, false, trace, options);
    }

    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        let grad = objective.gradient_log(theta)?;
        let hess = objective.hessian_log(theta)?;
        let newton = newton_direction(&hess, &grad);
        let direction = match newton {
            Some(d) => d,
            None => {
                let norm = grad[0].hypot(grad[1]);
                if norm == 0.0 {
                    break;
                }
                let scale = norm.min(1.0) / norm;
                [grad[0] * scale, grad[1] * scale]
            }
        };
        let direction = cap_length(direction, 5.0);
        let natural = objective.gradient_natural(theta)?;
        if newton.is_some()
            && direction[0].hypot(direction[1]) < options.step_tolerance
            && natural[0].hypot(natural[1]) < options.gradient_tolerance
        {
            converged = true;
            break;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = [theta[0] + t * direction[0], theta[1] + t * direction[1]];
            if let Ok(gain) = objective.gain(trial, theta) {
                if gain >= 0.0 {
                    accepted = Some((trial, value + gain));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((next, next_value)) = accepted else {
            // no ascent left; stationary up to rounding or stuck
            converged = newton.is_some() && natural[0].hypot(natural[1]) < options.gradient_tolerance;
            break;
        };
        let step = t * direction[0].hypot(direction[1]);
        theta = next;
        value = next_value;
        trace.push(value);
        if theta.iter().any(|v| v.abs() > LOG_PARAM_LIMIT) {
            break;
        }
        let natural = objective.gradient_natural(theta)?;
        if step < options.step_tolerance
            && natural[0].hypot(natural[1]) < options.gradient_tolerance
            && newton.is_some()
        {
            converged = true;
            break;
        }
    }
    if converged {
        // a maximum needs a negative definite Hessian
        let hess = objective.hessian_log(theta)?;
        converged = newton_direction(&hess, &[0.0, 0.0]).is_some();
    }
    objective.finish(theta, value, seed, iterations, converged, trace, options)
}

/// Newton step `-H^-1 g`, or `None` unless `H` is negative definite.
fn newton_direction(h: &[[f64; 2]; 2], g: &[f64; 2]) -> Option<[f64; 2]> {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if !(h[0][0] < 0.0 && det > 0.0) || !det.is_finite() {
        return None;
    }
    let d0 = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
    let d1 = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
    Some([d0, d1])
}

fn cap_length(d: [f64; 2], max: f64) -> [f64; 2] {
    let norm = d[0].hypot(d[1]);
    if norm > max {
        [d[0] * max / norm, d[1] * max / norm]
    } else {
        d
    }
}

struct Objective<'a> {
    data: &'a FrequencyTable,
    mu: u64,
}

impl Objective<'_> {
    fn params(&self, theta: [f64; 2]) -> Result<DgpParams> {
        DgpParams::new(theta[0].exp(), theta[1].exp(), self.mu)
    }

    fn value(&self, theta: [f64; 2]) -> Result<f64> {
        let v = log_likelihood(&self.params(theta)?, self.data)?;
        if v.is_nan() {
            return Err(Error::Numerical("log-likelihood is NaN".into()));
        }
        Ok(v)
    }

    fn gain(&self, to: [f64; 2], from: [f64; 2]) -> Result<f64> {
        let g = log_likelihood_ratio(&self.params(to)?, &self.params(from)?, self.data)?;
        if g.is_nan() {
            return Err(Error::Numerical("log-likelihood ratio is NaN".into()));
        }
        Ok(g)
    }

    fn gradient_natural(&self, theta: [f64; 2]) -> Result<[f64; 2]> {
        log_likelihood_gradient(&self.params(theta)?, self.data)
    }

    fn gradient_log(&self, theta: [f64; 2]) -> Result<[f64; 2]> {
        let g = self.gradient_natural(theta)?;
        Ok([g[0] * theta[0].exp(), g[1] * theta[1].exp()])
    }

    fn hessian_log(&self, theta: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        const H: f64 = 1e-5;
        let mut cols = [[0.0; 2]; 2];
        for (j, col) in cols.iter_mut().enumerate() {
            let mut up = theta;
            let mut down = theta;
            up[j] += H;
            down[j] -= H;
            let gu = self.gradient_log(up)?;
            let gd = self.gradient_log(down)?;
            *col = [(gu[0] - gd[0]) / (2.0 * H), (gu[1] - gd[1]) / (2.0 * H)];
        }
        let off = 0.5 * (cols[0][1] + cols[1][0]);
        Ok([[cols[0][0], off], [off, cols[1][1]]])
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        theta: [f64; 2],
        loglik: f64,
        seed: SeedEstimate,
        iterations: usize,
        converged: bool,
        trace: Vec<f64>,
        options: &FitOptions,
    ) -> Result<FitResult> {
        let params = self.params(theta)?;
        let loglik = if trace.len() > 1 { log_likelihood(&params, self.data)? } else { loglik };
        let gradient = log_likelihood_gradient(&params, self.data)?;
        let standard_errors = if options.standard_errors && converged {
            standard_errors(&params, self.data)?
        } else {
            None
        };
        Ok(FitResult { params, standard_errors, loglik, seed, iterations, converged, gradient, trace })
    }
}
