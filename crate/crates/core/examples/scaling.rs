//! Measure how convergence time grows with input size and fit the log-log
//! slope.
//!
//! ```text
//! cargo run --release --example scaling
//! ```

use crnforge::bench::{fit_loglog, scaling_csv, scaling_run};
use crnforge::semilinear::parse_fn_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ns = [16, 32, 64, 128, 256, 512, 1024];
    for (name, spec) in [("2x", include_str!("double.json")), ("max(2 x1 - x2, x2)", include_str!("fig2.json"))] {
        let f = parse_fn_spec(spec)?;
        let rows = scaling_run(&f, &ns, 25, 1)?;
        print!("{name}\n{}", scaling_csv(&rows));
        println!("slope {:.3}\n", fit_loglog(&rows)?);
    }
    Ok(())
}
