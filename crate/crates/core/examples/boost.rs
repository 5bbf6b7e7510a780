//! Boosts a coupled ground state to a travelling wave and checks the Maxwell
//! equations on the Cartesian grid at two resolutions.

use gaugewave::electrodynamics::{boost, maxwell_residuals, refinement_study, total_energy, CartesianGrid, RESIDUAL_NAMES};
use gaugewave::minimizer::{minimize, SolverConfig};
use gaugewave::nonlinearity::NonlinearityModel;

fn main() -> gaugewave::Result<()> {
    let model = NonlinearityModel::saturable(1.0, 1.0)?;
    let sol = minimize(&SolverConfig { q: 0.1, sigma2: 100.0, n_points: 1000, r_max: 40.0, ..SolverConfig::default() }, &model)?;

    let grid = CartesianGrid::new(40, 12.0)?;
    for v in [0.0, 0.5] {
        let a = boost(&sol, v, 0.0, grid)?;
        let b = boost(&sol, v, grid.spacing / 4.0, grid)?;
        let report = maxwell_residuals(&a, &b)?;
        println!("v = {v}: energy {:.6}, gamma {:.4}", total_energy(&a, &model)?, a.gamma);
        for (i, name) in RESIDUAL_NAMES.iter().enumerate() {
            let tag = if report.is_exact(i) { "  (rounding)" } else { "" };
            println!("  {name:<11} {:.3e}{tag}", report.residuals[i]);
        }
        for w in &a.warnings {
            println!("  warning: {w}");
        }
    }

    let study = refinement_study(&sol, 0.5, 0.0, 12.0, 32, 64)?;
    println!("observed orders, v = 0.5:");
    for o in &study.orders {
        match o.order {
            Some(p) => println!("  {:<11} {p:.3}", o.name),
            None => println!("  {:<11} exact", o.name),
        }
    }
    Ok(())
}
