//! Follows the ground state as the coupling grows, in parallel, and fits the
//! shift in `ω²` against `q²`.

use rayon::prelude::*;

use gaugewave::minimizer::{minimize, SolverConfig};
use gaugewave::nonlinearity::NonlinearityModel;

fn main() -> gaugewave::Result<()> {
    let model = NonlinearityModel::saturable(1.0, 1.0)?;
    let qs: Vec<f64> = (0..=8).map(|k| 0.0125 * k as f64).collect();
    let rows: Vec<(f64, gaugewave::Result<f64>)> = qs
        .par_iter()
        .map(|&q| {
            let config = SolverConfig { q, sigma2: 102.13, ..SolverConfig::default() };
            (q, minimize(&config, &model).map(|s| s.omega2))
        })
        .collect();

    let &(_, Ok(base)) = &rows[0] else {
        eprintln!("uncoupled solve failed");
        std::process::exit(1);
    };
    println!("{:>8} {:>14} {:>14}", "q", "omega^2", "shift/q^2");
    for (q, w) in &rows {
        match w {
            Ok(w) if *q > 0.0 => println!("{q:>8.4} {w:>14.9} {:>14.6}", (w - base) / (q * q)),
            Ok(w) => println!("{q:>8.4} {w:>14.9} {:>14}", "-"),
            Err(e) => println!("{q:>8.4} failed: {e}"),
        }
    }
    Ok(())
}
