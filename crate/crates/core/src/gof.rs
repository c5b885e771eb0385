//! Goodness of fit: Pearson chi-square on merged bins, and the discrete
//! Kolmogorov-Smirnov statistic with a parametric bootstrap p-value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FrequencyTable;
use crate::distribution::{DgpParams, SampleSeed};
use crate::error::{Error, Result};
use crate::estimation::{fit_mle_with, FitOptions};
use crate::special::{chi_square_quantile, chi_square_sf};

/// Minimum count per chi-square bin.
pub const MIN_BIN_COUNT: f64 = 5.0;
pub const SIGNIFICANCE: f64 = 0.05;
pub const DEFAULT_REPLICATES: usize = 10_000;

/// Which count decides when adjacent values are pooled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeRule {
    /// Close a bin once its observed count reaches 5. An under-5 remainder
    /// joins the last bin, which then runs to infinity.
    #[default]
    Observed,
    /// Close a bin once its expected count reaches 5; start the open tail as
    /// soon as the expected mass left, or the data, runs out.
    Expected,
}

/// One bin `[lo, hi)`, with `hi = None` for the open tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: u64,
    pub hi: Option<u64>,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub rule: MergeRule,
    pub bins: Vec<Bin>,
}

impl BinSpec {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

fn check_support(params: &DgpParams, data: &FrequencyTable) -> Result<()> {
    if data.min_value() < params.mu() {
        return Err(Error::BelowSupport { value: data.min_value() as i64, mu: params.mu() });
    }
    Ok(())
}

/// Partitions `{mu, mu+1, ...}` into bins for the chi-square test.
pub fn build_bins(params: &DgpParams, data: &FrequencyTable, rule: MergeRule) -> Result<BinSpec> {
    check_support(params, data)?;
    let n = data.total() as f64;
    let mu = params.mu();
    let max = data.max_value();
    let survival = |x: u64| params.survival(x as i64).expect("x >= mu");

    // closed bins as (lo, hi); the open tail starts at `tail`
    let mut closed: Vec<(u64, u64)> = Vec::new();
    let mut lo = mu;
    match rule {
        MergeRule::Observed => {
            let mut acc = 0u64;
            for x in mu..=max {
                acc += data.count_of(x);
                if acc as f64 >= MIN_BIN_COUNT {
                    closed.push((lo, x + 1));
                    lo = x + 1;
                    acc = 0;
                }
            }
        }
        MergeRule::Expected => {
            let mut acc = 0.0;
            let mut x = mu;
            loop {
                if x == lo && (lo > max || n * survival(lo) < MIN_BIN_COUNT) {
                    break;
                }
                acc += n * params.pmf(x as i64);
                if acc >= MIN_BIN_COUNT {
                    closed.push((lo, x + 1));
                    lo = x + 1;
                    acc = 0.0;
                }
                x += 1;
            }
        }
    }

    let observed_in = |lo: u64, hi: Option<u64>| -> u64 {
        data.iter()
            .filter(|&(v, _)| v >= lo && hi.is_none_or(|h| v < h))
            .map(|(_, c)| c)
            .sum()
    };
    let tail_observed = observed_in(lo, None);
    let tail_expected = n * survival(lo);
    let tail_small = match rule {
        MergeRule::Observed => (tail_observed as f64) < MIN_BIN_COUNT,
        MergeRule::Expected => tail_expected < MIN_BIN_COUNT,
    };
    if tail_small {
        if let Some((prev_lo, _)) = closed.pop() {
            lo = prev_lo;
        }
    }

    let mut bins: Vec<Bin> = closed
        .into_iter()
        .map(|(a, b)| Bin {
            lo: a,
            hi: Some(b),
            observed: observed_in(a, Some(b)),
            expected: n * (survival(a) - survival(b)),
        })
        .collect();
    bins.push(Bin { lo, hi: None, observed: observed_in(lo, None), expected: n * survival(lo) });
    if bins.len() < 2 {
        return Err(Error::Degenerate("fewer than two bins after merging".into()));
    }
    Ok(BinSpec { rule, bins })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    /// Number of bins.
    pub k: usize,
    /// Number of estimated parameters.
    pub r: usize,
    pub df: usize,
    pub critical_95: f64,
    pub p_value: f64,
    pub reject: bool,
    pub bins: BinSpec,
}

/// Pearson chi-square test with `df = k - r - 1`.
pub fn chi_square_test(
    params: &DgpParams,
    data: &FrequencyTable,
    r: usize,
    rule: MergeRule,
) -> Result<ChiSquareReport> {
    let bins = build_bins(params, data, rule)?;
    let k = bins.len();
    if k < r + 2 {
        return Err(Error::Degenerate(format!(
            "{k} bins leave no degrees of freedom for {r} estimated parameters"
        )));
    }
    let df = k - r - 1;
    let statistic: f64 = bins
        .bins
        .iter()
        .map(|b| {
            let d = b.observed as f64 - b.expected;
            d * d / b.expected
        })
        .sum();
    let critical_95 = chi_square_quantile(1.0 - SIGNIFICANCE, df as f64)?;
    let p_value = chi_square_sf(statistic, df as f64)?;
    Ok(ChiSquareReport { statistic, k, r, df, critical_95, p_value, reject: statistic > critical_95, bins })
}

/// `sqrt(n) max |F_n(k) - F(k)|` over every integer `k` from `mu` to the
/// sample maximum.
pub fn ks_statistic(params: &DgpParams, data: &FrequencyTable) -> Result<f64> {
    check_support(params, data)?;
    let n = data.total() as f64;
    let mut cum = 0u64;
    let mut worst = 0.0f64;
    for k in params.mu()..=data.max_value() {
        cum += data.count_of(k);
        let gap = (cum as f64 / n - params.cdf(k as i64)).abs();
        worst = worst.max(gap);
    }
    Ok(n.sqrt() * worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub params: DgpParams,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub replicates: usize,
    pub master_seed: u64,
    /// Replicates whose statistic was strictly above the observed one.
    pub exceedances: usize,
    pub refit_failures: usize,
    /// More than 1% of refits failed.
    pub failure_warning: bool,
}

/// Parametric bootstrap KS test.
///
/// The observed data are fitted first. Each replicate `i` then draws `n`
/// values from the fit with the stream `SampleSeed(master_seed).child(i)`,
/// refits them and records the KS statistic against its own refit. `mu =
/// None` fits every dataset at its own minimum; `Some(m)` holds the location
/// at `m` throughout (the discrete Lomax case is `Some(0)`).
///
/// Replicates run in parallel; the report depends only on the arguments.
pub fn ks_bootstrap_test(
    data: &FrequencyTable,
    mu: Option<u64>,
    replicates: usize,
    master_seed: u64,
) -> Result<KsReport> {
    if replicates == 0 {
        return Err(Error::domain("at least one bootstrap replicate is needed"));
    }
    let options = FitOptions { standard_errors: false, ..FitOptions::default() };
    let fit = fit_mle_with(data, mu, &options)?;
    if !fit.converged {
        return Err(Error::Numerical("maximum likelihood fit of the observed data did not converge".into()));
    }
    let params = fit.params;
    let statistic = ks_statistic(&params, data)?;
    let n = data.total() as usize;
    let master = SampleSeed(master_seed);

    let stats: Vec<Option<f64>> = (0..replicates)
        .into_par_iter()
        .map(|i| replicate(&params, n, mu, master.child(i as u64), &options))
        .collect();

    let refit_failures = stats.iter().filter(|s| s.is_none()).count();
    let valid = replicates - refit_failures;
    if valid == 0 {
        return Err(Error::Numerical("every bootstrap refit failed".into()));
    }
    let exceedances = stats.iter().flatten().filter(|&&s| s > statistic).count();
    let p_value = exceedances as f64 / valid as f64;
    Ok(KsReport {
        params,
        statistic,
        p_value,
        reject: p_value < SIGNIFICANCE,
        replicates,
        master_seed,
        exceedances,
        refit_failures,
        failure_warning: refit_failures as f64 > 0.01 * replicates as f64,
    })
}

fn replicate(
    params: &DgpParams,
    n: usize,
    mu: Option<u64>,
    seed: SampleSeed,
    options: &FitOptions,
) -> Option<f64> {
    let values = params.sample(n, seed).ok()?;
    let table = FrequencyTable::from_values("", values).ok()?;
    let fit = fit_mle_with(&table, mu, options).ok()?;
    if !fit.converged {
        return None;
    }
    ks_statistic(&fit.params, &table).ok()
}
