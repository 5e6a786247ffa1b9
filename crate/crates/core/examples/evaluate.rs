//! Load a piecewise-affine function spec and evaluate it exactly.
//!
//! ```text
//! cargo run --example evaluate
//! ```

use crnforge::semilinear::{parse_fn_spec, vectors_in_box};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_fn_spec(include_str!("fig2.json"))?;
    println!("max(2 x1 - x2, x2) over {:?}", f.inputs);
    for x in vectors_in_box(2, 3) {
        let piece = f.selected_piece(&x).expect("total function");
        println!("  f{x:?} = {:?}  (piece {})", f.eval(&x)?, piece + 1);
    }

    // Guards that leave inputs uncovered are reported, not silently zero.
    let half = parse_fn_spec(include_str!("half.json"))?;
    println!("half(3, 5) = {:?}", half.eval(&[3, 5])?);
    println!("half(3, 4) = {:?}", half.eval(&[3, 4])?);
    Ok(())
}
