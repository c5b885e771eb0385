//! Special functions used by the unit-shape distribution and the chi-square test.
//!
//! Everything here is real-valued and restricted to the domains the rest of
//! the crate needs: digamma on the positive axis, the Lerch transcendent inside
//! the unit disc, the Hurwitz zeta function for `s > 1` and the regularized
//! incomplete gamma function behind the chi-square distribution.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Relative truncation target for the Lerch series.
const LERCH_TOLERANCE: f64 = 1e-12;
const LERCH_MAX_TERMS: usize = 200_000_000;

/// Bernoulli numbers B2, B4, ..., B16.
const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Digamma function `psi(x) = Gamma'(x) / Gamma(x)` for `x > 0`.
///
/// Shifts the argument above 10 with `psi(x) = psi(x + 1) - 1/x`, then applies
/// the asymptotic expansion through `x^-14`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut shift = 0.0;
    let mut x = x;
    while x < 10.0 {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // sum_{k=1}^{7} B_{2k} / (2k x^{2k}), Horner in x^-2
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(x.ln() - 0.5 / x - series - shift)
}

/// Arguments of the Lerch transcendent `Phi(z, s, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LerchArgs {
    z: f64,
    s: f64,
    a: f64,
}

impl LerchArgs {
    pub fn new(z: f64, s: f64, a: f64) -> Result<Self> {
        if !(z.abs() < 1.0) {
            return Err(Error::domain(format!("Lerch series needs |z| < 1, got z = {z}")));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("Lerch series needs a > 0, got a = {a}")));
        }
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("Lerch series needs s >= 0, got s = {s}")));
        }
        Ok(LerchArgs { z, s, a })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

/// Lerch transcendent `Phi(z, s, a) = sum_{k>=0} z^k (k + a)^(-s)` by direct
/// summation.
///
/// Stops once the geometric tail bound `|z|^(K+1) (K+1+a)^(-s) / (1 - |z|)`
/// drops below `1e-12` of the partial sum.
pub fn lerch_phi(args: LerchArgs) -> Result<f64> {
    let LerchArgs { z, s, a } = args;
    let abs_z = z.abs();
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 0..LERCH_MAX_TERMS {
        let kf = k as f64;
        sum += zk * (kf + a).powf(-s);
        zk *= z;
        let bound = zk.abs() * (kf + 1.0 + a).powf(-s) / (1.0 - abs_z);
        if bound <= LERCH_TOLERANCE * sum.abs() || bound == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::Numerical(format!(
        "Lerch series did not reach tolerance within {LERCH_MAX_TERMS} terms (z = {z})"
    )))
}

/// `a^s * zeta(s, a) = sum_{m>=0} (1 + m/a)^(-s)`, the Hurwitz zeta function
/// normalized by its leading term so it stays representable for large `s`.
pub fn hurwitz_zeta_scaled(s: f64, a: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::domain(format!("Hurwitz zeta needs s > 1, got {s}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("Hurwitz zeta needs a > 0, got {a}")));
    }
    // Euler-Maclaurin after shifting the argument to w = a + N.
    let target = s + 20.0;
    let n = if a >= target { 0 } else { (target - a).ceil() as usize };
    let mut head = 0.0;
    for m in 0..n {
        head += (-s * (m as f64 / a).ln_1p()).exp();
    }
    let w = a + n as f64;
    let scale = (-s * (w / a).ln()).exp();
    let mut tail = w / (s - 1.0) + 0.5;
    // rising factorial (s)_{2j-1} and (2j)!
    let mut rising = s;
    let mut factorial = 2.0;
    let mut w_pow = 1.0 / w;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = j as f64 + 1.0;
        tail += b / factorial * rising * w_pow;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        w_pow /= w * w;
    }
    Ok(head + scale * tail)
}

/// Hurwitz zeta function `zeta(s, a) = sum_{m>=0} (m + a)^(-s)` for `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    Ok(hurwitz_zeta_scaled(s, a)? * a.powf(-s))
}

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    check_incomplete_gamma(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        Ok(1.0 - gamma_continued_fraction(a, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    check_incomplete_gamma(a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_series(a, x)?)
    } else {
        gamma_continued_fraction(a, x)
    }
}

fn check_incomplete_gamma(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !(x >= 0.0) || !a.is_finite() || x.is_nan() {
        return Err(Error::domain(format!(
            "incomplete gamma needs a > 0 and x >= 0, got a = {a}, x = {x}"
        )));
    }
    Ok(())
}

fn gamma_series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..10_000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            return Ok(sum * (-x + a * x.ln() - ln_gamma(a)).exp());
        }
    }
    Err(Error::Numerical(format!("incomplete gamma series failed (a = {a}, x = {x})")))
}

fn gamma_continued_fraction(a: f64, x: f64) -> Result<f64> {
    // modified Lentz
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok((-x + a * x.ln() - ln_gamma(a)).exp() * h);
        }
    }
    Err(Error::Numerical(format!(
        "incomplete gamma continued fraction failed (a = {a}, x = {x})"
    )))
}

/// Chi-square distribution function with `df` degrees of freedom.
pub fn chi_square_cdf(x: f64, df: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    gamma_p(df / 2.0, x / 2.0)
}

/// Right-tail probability of the chi-square distribution.
pub fn chi_square_sf(x: f64, df: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(1.0);
    }
    gamma_q(df / 2.0, x / 2.0)
}

/// Quantile of the chi-square distribution, by bisection on the cdf.
pub fn chi_square_quantile(p: f64, df: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("probability must lie in (0, 1), got {p}")));
    }
    if !(df > 0.0) {
        return Err(Error::domain(format!("degrees of freedom must be positive, got {df}")));
    }
    let mut lo = 0.0;
    let mut hi = df.max(1.0);
    while chi_square_cdf(hi, df)? < p {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, df)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
