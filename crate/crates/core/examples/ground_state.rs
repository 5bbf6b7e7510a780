//! Minimizes `J` on the constraint set for one coupling and prints the
//! solution summary and its verification table.
//!
//!     cargo run --release --example ground_state -- 0.05 102.13

use gaugewave::functionals::derrick_pohozaev;
use gaugewave::minimizer::{minimize, SolverConfig};
use gaugewave::nonlinearity::NonlinearityModel;

fn main() -> gaugewave::Result<()> {
    let mut args = std::env::args().skip(1);
    let q: f64 = args.next().map_or(0.05, |a| a.parse().expect("q"));
    let sigma2: f64 = args.next().map_or(102.13, |a| a.parse().expect("sigma2"));

    let model = NonlinearityModel::saturable(1.0, 1.0)?;
    let config = SolverConfig { q, sigma2, ..SolverConfig::default() };
    let sol = minimize(&config, &model)?;

    println!("q = {q}, sigma2 = {sigma2}");
    println!("omega^2   {:.9}", sol.omega2);
    println!("J         {:.9}", sol.j_value);
    println!("energy    {:.9}", sol.energy);
    println!("u(0)      {:.6}", sol.u.value_at_origin());
    println!("max Phi   {:.6}", sol.phi.max_abs());
    println!("residual  {:.2e} after {} iterations", sol.residual, sol.iterations);

    let dp = derrick_pohozaev(&sol.u, &model, sol.omega2)?;
    println!("dp_W      {:.6}", dp.dp_w);
    if q == 0.0 {
        println!("dp_G      {:.2e}", dp.dp_g);
    }

    for check in &sol.diagnostics.checks {
        println!("  {:<32} {}", check.0, if check.1.passed() { "pass" } else { "FAIL" });
    }
    Ok(())
}
