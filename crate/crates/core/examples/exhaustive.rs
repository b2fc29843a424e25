//! Exhaustive searches over small projective spaces.
//!
//! Run with `cargo run --release --example exhaustive`.

use cb_lab::campaign::{counterexample_search, exhaustive_lower_bound};
use cb_lab::{FieldSpec, Result};

fn main() -> Result<()> {
    let gf3 = FieldSpec::prime(3)?;
    for r in [1, 2] {
        let rep = exhaustive_lower_bound(gf3, 2, r)?;
        let subsets: u64 = rep.records.iter().map(|x| x.counts["subsets"]).sum();
        println!("P^2(GF(3)), r={r}: {subsets} small subsets, {} CB(r)", rep.summary.violations);
    }

    let rep = counterexample_search(FieldSpec::prime(2)?, 3, 2, 2, 7)?;
    for rec in &rep.records {
        println!("P^3(GF(2)) size {}: {:?}", rec.counts["size"], rec.counts);
    }
    println!("violations: {}", rep.violations.len());
    if let Some(c) = &rep.caveat {
        println!("{c}");
    }
    Ok(())
}
