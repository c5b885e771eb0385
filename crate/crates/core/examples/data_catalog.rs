//! The bundled frequency tables and the CSV format used for user data.

use discrete_pareto::data::{bundled, dataset_names, YEAR_SUMMARIES};
use discrete_pareto::FrequencyTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in YEAR_SUMMARIES {
        println!("{}: {} blackspots, {} accidents, {} deaths", s.year, s.blackspots, s.accidents, s.deaths);
    }
    for name in dataset_names() {
        let t = bundled(name)?;
        println!("{name}: n = {}, values {}..={}", t.total(), t.min_value(), t.max_value());
    }
    let parsed = FrequencyTable::parse_csv(b"value,count\n0,12\n1,5\n3,1\n")?;
    print!("{}", parsed.to_csv());
    match FrequencyTable::parse_csv(b"value,count\n0,12\n1,-5\n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
