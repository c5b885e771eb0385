//! Closed forms of the discrete Lomax law with `alpha = 1`, whose mean is
//! infinite.

use discrete_pareto::distribution::unit_shape;

fn main() -> discrete_pareto::Result<()> {
    for lambda in [0.25, 0.5, 2.0, 8.0] {
        println!("lambda = {lambda}");
        println!("  Pr(X = 0..4) = {:?}", (0..5).map(|x| unit_shape::pmf(lambda, x)).collect::<Result<Vec<_>, _>>()?);
        println!("  G(0.5)       = {:.10}", unit_shape::pgf(lambda, 0.5)?);
        println!("  E[1/(X+1)]   = {:.10}", unit_shape::inverse_moment(lambda)?);
        println!("  Var bound    = {:.10}", unit_shape::variance_lower_bound(lambda)?);
    }
    Ok(())
}
