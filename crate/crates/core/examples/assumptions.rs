//! Samples a few nonlinearities and reports which of the structural
//! assumptions on `W` hold, plus the admissible frequency window.

use gaugewave::nonlinearity::{default_report, frequency_window, NonlinearityModel};

fn main() -> gaugewave::Result<()> {
    let models = [
        ("saturable m0=1 s0=1", NonlinearityModel::saturable(1.0, 1.0)?),
        ("saturable m0=2 s0=0.5", NonlinearityModel::saturable(2.0, 0.5)?),
        ("quadratic m0=1", NonlinearityModel::quadratic(1.0)?),
        ("power law p=4", NonlinearityModel::power_law(1.0, 4.0)?),
    ];
    for (name, model) in &models {
        let report = default_report(model)?;
        println!("== {name}");
        print!("{}", report.render());
        match frequency_window(model) {
            Ok((m1, m0)) => println!("window ({m1:.6}, {m0:.6})\n"),
            Err(e) => println!("no window: {e}\n"),
        }
    }
    Ok(())
}
