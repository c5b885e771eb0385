//! Discrete Kolmogorov-Smirnov test with a parametric bootstrap p-value.
//!
//! `cargo run --release --example ks_bootstrap -- [replicates] [seed]`

use discrete_pareto::data::bundled;
use discrete_pareto::gof::ks_bootstrap_test;
use discrete_pareto::reproduce::model_for;

fn main() -> discrete_pareto::Result<()> {
    let mut args = std::env::args().skip(1);
    let replicates = args.next().and_then(|a| a.parse().ok()).unwrap_or(1000);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(42);
    for name in ["accidents_2006", "deaths_2006"] {
        let data = bundled(name)?;
        let rep = ks_bootstrap_test(&data, model_for(name).location(), replicates, seed)?;
        println!(
            "{name}: KS = {:.4}, p = {:.4} from {} replicates ({} refits failed){}",
            rep.statistic,
            rep.p_value,
            rep.replicates,
            rep.refit_failures,
            if rep.reject { ", rejected at 0.05" } else { "" }
        );
    }
    Ok(())
}
