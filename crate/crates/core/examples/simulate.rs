//! Run seeded stochastic trials of a compiled network and report
//! convergence-time statistics and correctness against the function spec file.
//!
//! ```text
//! cargo run --release --example simulate
//! ```

use crnforge::compiler::{compile_piecewise, CompileOptions};
use crnforge::kinetics::{run_trials, simulate, SimLimits, VolumePolicy};
use crnforge::semilinear::parse_fn_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_fn_spec(include_str!("fig2.json"))?;
    let crc = compile_piecewise(&f, &CompileOptions::default())?.crc;

    let one = simulate(&crc, &[30, 12], VolumePolicy::Auto, SimLimits::default(), 42)?;
    println!(
        "x = (30, 12): Y = {:?} after {} events, last output change at t = {:.2}, peak {} molecules",
        one.output, one.events, one.last_output_change_time, one.count_peak
    );

    let oracle = |x: &[u64]| f.eval(x).ok();
    for x in [[10, 10], [40, 5], [5, 40]] {
        let stats = run_trials(&crc, &x, 200, 7, VolumePolicy::Auto, SimLimits::default(), Some(&oracle))?;
        println!(
            "x = {x:?}: mean convergence {:.1} (median {:.1}), correct {:.3}, terminal {:.3}",
            stats.mean_conv_time.unwrap_or(f64::NAN),
            stats.median_conv_time.unwrap_or(f64::NAN),
            stats.fraction_correct.unwrap_or(0.0),
            stats.fraction_terminal
        );
    }
    Ok(())
}
