//! Turn a computer into a decider for the graph of its function, certify
//! it, and wrap a graph decider into the (unbounded) searching computer.
//!
//! ```text
//! cargo run --example graph_decider
//! ```

use crnforge::compiler::{graph_decider, search_crc};
use crnforge::format::{parse_crn, serialize_crc, serialize_crd};
use crnforge::semilinear::vectors_in_box;
use crnforge::verifier::{check_stable_decision, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let half = parse_crn(include_str!("fig1a.crn"))?.into_crc()?;
    let d = graph_decider(&half)?;
    print!("{}", serialize_crd(&d));

    // inputs are (x, claimed y)
    let report = check_stable_decision(&d, |v| Some(v[1] == v[0] / 2), vectors_in_box(2, 6), VerifyOptions::default())?;
    print!("decides y = floor(x/2): {}", report.render_text(None));

    // The searching computer needs inputs (x, claims, productions).
    let double = parse_crn("input X\noutput Y\nrxn X -> 2 Y\n")?.into_crc()?;
    let gd = graph_decider(&double)?;
    let crn = gd.crn();
    let inputs = vec![crn.require("X")?, crn.require("Y^C")?, crn.require("Y^P")?];
    let gd = crnforge::crn::Crd::new(crn.clone(), inputs, gd.voters().to_vec(), gd.context().clone())?;
    let search = search_crc(&gd, 1)?;
    println!("\nsearching computer (bounded: {}):", search.is_bounded());
    print!("{}", serialize_crc(&search));
    Ok(())
}
