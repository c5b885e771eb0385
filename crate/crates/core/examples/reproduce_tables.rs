//! Recomputes the four reference tables and lists cells that miss their
//! published value.
//!
//! `cargo run --release --example reproduce_tables -- [replicates]`

use discrete_pareto::reproduce::{reproduce, TABLE_IDS};

fn main() -> discrete_pareto::Result<()> {
    let replicates = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(500);
    for id in TABLE_IDS {
        let report = reproduce(id, replicates, 42)?;
        let misses: Vec<_> = report.failures().collect();
        println!("table {id}: {}/{} cells within tolerance", report.cells.len() - misses.len(), report.cells.len());
        for c in misses {
            println!("  {} {}: published {} computed {:.6}", c.row, c.column, c.printed, c.computed);
        }
    }
    Ok(())
}
