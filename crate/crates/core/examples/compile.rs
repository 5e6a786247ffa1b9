//! Compile a semilinear function into a reaction network and write it in
//! the `.crn` text format together with its manifest.
//!
//! ```text
//! cargo run --example compile [-- out.crn]
//! ```

use crnforge::compiler::{compile_piecewise, CompileOptions};
use crnforge::format::{serialize_crc, Manifest};
use crnforge::semilinear::parse_fn_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_fn_spec(include_str!("fig2.json"))?;
    let compiled = compile_piecewise(&f, &CompileOptions::default())?;
    let crn = compiled.crc.crn();
    eprintln!(
        "{} species, {} reactions, input fan-out {}",
        crn.species_count(),
        crn.reactions().len(),
        compiled.fanout_width
    );
    let text = serialize_crc(&compiled.crc);
    let manifest = Manifest::for_crc(&compiled.crc, Some("fast"), Some(compiled.fanout_width)).to_json();
    match std::env::args().nth(1) {
        Some(path) => {
            let path = std::path::PathBuf::from(path);
            std::fs::write(&path, text)?;
            std::fs::write(crnforge::format::manifest_path(&path), manifest)?;
        }
        None => print!("{text}\n{manifest}"),
    }
    Ok(())
}
