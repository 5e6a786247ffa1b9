//! Recover affine pieces from linear graph sets, reject sets that are not
//! graphs of functions, and build the difference encoding.
//!
//! ```text
//! cargo run --example decompose
//! ```

use crnforge::semilinear::{extract_affine, hat_transform, GraphSets, SemilinearError};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GraphSets::from_json(include_str!("identity-graph.json"))?;
    let p = extract_affine(&g.sets[0], g.dim_in)?;
    println!("(x1 + x2) / 2 graph -> n = {:?}, d = {:?}, b = {:?}, c = {:?}", p.num, p.den, p.b, p.c);

    let bad = GraphSets::from_json(include_str!("not-a-graph.json"))?;
    match extract_affine(&bad.sets[0], bad.dim_in) {
        Err(SemilinearError::NotAGraph { first, second, .. }) => {
            println!("{{(1,0),(1,1)}} rejected: {first:?} and {second:?} are both in the set")
        }
        other => println!("unexpected: {other:?}"),
    }

    let hat = hat_transform(&g.union()?, g.dim_in)?;
    for set in &hat.components {
        println!("hat: base {:?}, periods {:?}", set.base, set.periods);
    }
    Ok(())
}
