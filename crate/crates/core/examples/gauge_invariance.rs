//! Applies gauge transformations to a boosted frame: the amplitude, charge
//! density and fields are unchanged, the potentials and phase are not.

use gaugewave::electrodynamics::{boost, gauge_transform, CartesianGrid, TimeIndependent};
use gaugewave::minimizer::{minimize, SolverConfig};
use gaugewave::nonlinearity::NonlinearityModel;

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn main() -> gaugewave::Result<()> {
    let model = NonlinearityModel::saturable(1.0, 1.0)?;
    let sol = minimize(&SolverConfig { q: 0.1, sigma2: 100.0, n_points: 1000, r_max: 40.0, ..SolverConfig::default() }, &model)?;
    let frame = boost(&sol, 0.4, 0.3, CartesianGrid::new(32, 12.0)?)?;

    let static_chi = TimeIndependent(|x: [f64; 3]| (0.3 * x[0]).sin() * x[1]);
    let moving_chi = (
        |t: f64, x: [f64; 3]| (t + x[0]).cos() * (0.2 * x[1]).sin(),
        |t: f64, x: [f64; 3]| -(t + x[0]).sin() * (0.2 * x[1]).sin(),
    );
    for (label, g) in [("chi(x)", gauge_transform(&frame, &static_chi)), ("chi(t, x)", gauge_transform(&frame, &moving_chi))] {
        println!("{label}");
        println!("  potential A1 moved by {:.3e}", max_gap(&g.a_pot[0], &frame.a_pot[0]));
        println!("  psi_re moved by       {:.3e}", max_gap(&g.psi_re, &frame.psi_re));
        println!("  |psi| gap             {:.3e}", max_gap(&g.u_amp, &frame.u_amp));
        println!("  rho gap               {:.3e}", max_gap(&g.rho, &frame.rho));
        for c in 0..3 {
            println!(
                "  E{} gap {:.3e}   H{} gap {:.3e}",
                c + 1,
                max_gap(&g.e_field[c], &frame.e_field[c]),
                c + 1,
                max_gap(&g.h_field[c], &frame.h_field[c])
            );
        }
    }
    Ok(())
}
