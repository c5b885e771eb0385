//! Seeded inverse-transform sampling and the empirical pmf it produces.

use discrete_pareto::{DgpParams, FrequencyTable, SampleSeed};

fn main() -> discrete_pareto::Result<()> {
    let d = DgpParams::new(2.0, 0.5, 0)?;
    let n = 100_000;
    let table = FrequencyTable::from_values("simulated", d.sample(n, SampleSeed(2024))?)?;
    println!("{:>4} {:>10} {:>10}", "x", "empirical", "model");
    for x in 0..10 {
        println!("{x:>4} {:>10.5} {:>10.5}", table.count_of(x) as f64 / n as f64, d.pmf(x as i64));
    }
    println!("max = {}", table.max_value());
    // sub-streams for parallel work are derived from one master seed
    let master = SampleSeed(2024);
    println!("children: {:?}", (0..3).map(|i| master.child(i).value()).collect::<Vec<_>>());
    Ok(())
}
