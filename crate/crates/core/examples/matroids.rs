//! The matroid analog: flats, MCB(r), and covers by flats.
//!
//! Run with `cargo run --example matroids`.

use cb_lab::generators::gen_skew_lines;
use cb_lab::matroid::{exists_flat_cover, is_mcb, Matroid, McbMode};
use cb_lab::{FieldSpec, Result};

fn main() -> Result<()> {
    let fano = Matroid::fano();
    let lattice = fano.flats(3)?;
    println!("Fano plane: {} lines", lattice.of_rank(2).len());
    for r in 1..=3 {
        let rep = is_mcb(&fano, r, McbMode::AllFlats)?;
        println!("  MCB({r}): {} {:?}", rep.verdict, rep.flats);
    }

    let u = Matroid::uniform(3, 7)?;
    println!("U(3,7) MCB(2): {}", is_mcb(&u, 2, McbMode::AllFlats)?.verdict);

    // The matroid of ten points on two skew lines has the geometric cover as a flat cover.
    let pts = gen_skew_lines(2, &[5, 5], FieldSpec::prime(101)?, 1)?.points;
    let m = Matroid::from_points(&pts)?;
    println!("skew-line matroid: rank {}, MCB(3) {}", m.full_rank(), is_mcb(&m, 3, McbMode::AllFlats)?.verdict);
    println!("cover by two rank-2 flats: {:?}", exists_flat_cover(&m, &[1, 1])?);
    println!("cover by one rank-3 flat: {:?}", exists_flat_cover(&m, &[2])?);
    Ok(())
}
