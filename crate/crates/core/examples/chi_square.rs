//! Pearson chi-square goodness of fit with pooled bins.

use discrete_pareto::data::bundled;
use discrete_pareto::estimation::{fit_mle, Model};
use discrete_pareto::gof::{chi_square_test, MergeRule};

fn main() -> discrete_pareto::Result<()> {
    let data = bundled("accidents_2003")?;
    let fit = fit_mle(&data, Model::Dgp.location())?;
    for rule in [MergeRule::Observed, MergeRule::Expected] {
        let rep = chi_square_test(&fit.params, &data, Model::Dgp.parameter_count(), rule)?;
        println!("{rule:?} rule");
        for b in &rep.bins.bins {
            let range = match b.hi {
                Some(hi) if hi == b.lo + 1 => format!("{}", b.lo),
                Some(hi) => format!("{}..{}", b.lo, hi - 1),
                None => format!("{}+", b.lo),
            };
            println!("  {range:>6} observed {:>4} expected {:>8.3}", b.observed, b.expected);
        }
        println!(
            "  chi2 = {:.3} on {} df (critical {:.3}), p = {:.4}, reject = {}",
            rep.statistic, rep.df, rep.critical_95, rep.p_value, rep.reject
        );
    }
    Ok(())
}
