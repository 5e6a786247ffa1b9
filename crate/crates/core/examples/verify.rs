//! Certify the three hand-written example networks by exhaustive
//! reachability against their function specs, then show a counterexample
//! for a network that gets floor(x/2) wrong.
//!
//! ```text
//! cargo run --release --example verify
//! ```

use crnforge::format::parse_crn;
use crnforge::semilinear::{parse_fn_spec, vectors_in_box};
use crnforge::verifier::{check_stable_computation, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = [
        ("fig1a", include_str!("fig1a.crn"), include_str!("fig1a.json"), 8),
        ("fig1b", include_str!("fig1b.crn"), include_str!("fig1b.json"), 5),
        ("fig1c", include_str!("fig1c.crn"), include_str!("fig1c.json"), 5),
    ];
    for (name, crn, spec, box_size) in corpus {
        let crc = parse_crn(crn)?.into_crc()?;
        let f = parse_fn_spec(spec)?;
        let k = crc.inputs().len();
        let report = check_stable_computation(&crc, |x| f.eval(x).ok(), vectors_in_box(k, box_size), VerifyOptions::default())?;
        print!("{name}: {}", report.render_text(Some(crc.crn())));
    }

    let wrong = parse_crn("input X\noutput Y\nrxn X -> Y\n")?.into_crc()?;
    let f = parse_fn_spec(include_str!("fig1a.json"))?;
    let report = check_stable_computation(&wrong, |x| f.eval(x).ok(), vectors_in_box(1, 4), VerifyOptions::default())?;
    print!("X -> Y against floor(x/2): {}", report.render_text(Some(wrong.crn())));
    Ok(())
}
