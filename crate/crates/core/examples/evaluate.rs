//! Distribution functions, quantiles and moments of a discrete generalized
//! Pareto law.

use discrete_pareto::{DgpParams, MomentSpec};

fn main() -> discrete_pareto::Result<()> {
    let d = DgpParams::new(3.8227, 0.2295, 3)?;
    println!("{d}");
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "x", "pmf", "cdf", "sf", "hazard");
    for x in 3..=12 {
        println!(
            "{x:>4} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            d.pmf(x),
            d.cdf(x),
            d.survival(x)?,
            d.hazard(x)?
        );
    }
    for gamma in [0.5, 0.9, 0.99, 0.999] {
        println!("quantile({gamma}) = {}", d.quantile(gamma)?);
    }
    for order in 1..=4 {
        match d.raw_moment(MomentSpec::new(order, 1e-12)?).value() {
            Some(m) => println!("E[X^{order}] = {m:.6}"),
            None => println!("E[X^{order}] diverges"),
        }
    }
    println!("index of dispersion = {:.6}", d.index_of_dispersion()?);
    Ok(())
}
