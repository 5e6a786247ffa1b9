//! Compile Presburger predicates into deciders and certify them on every
//! input up to a norm, ties included.
//!
//! ```text
//! cargo run --release --example predicates
//! ```

use crnforge::compiler::{compile_guard, CompileOptions};
use crnforge::semilinear::{vectors_up_to_norm, GuardFile};
use crnforge::verifier::{check_stable_decision, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let files = [
        ("x1 < x2", include_str!("less-than.json")),
        ("x even", include_str!("parity.json")),
        ("x1 >= x2 and not x1 >= 2 x2", include_str!("conjunction.json")),
    ];
    for (name, text) in files {
        let g = GuardFile::from_json(text)?;
        let opts = CompileOptions {
            input_names: Some(g.inputs.clone()),
            ..Default::default()
        };
        let d = compile_guard(&g.guard, &opts)?;
        let inputs = vectors_up_to_norm(g.inputs.len(), 10);
        let report = check_stable_decision(&d, |x| Some(g.guard.eval(x)), inputs, VerifyOptions::default())?;
        print!(
            "{name}: {} species, {} reactions; {}",
            d.crn().species_count(),
            d.crn().reactions().len(),
            report.render_text(None)
        );
    }
    Ok(())
}
