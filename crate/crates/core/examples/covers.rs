//! Plane-configuration covers: existence, minimality, and a tight non-example.
//!
//! Run with `cargo run --example covers`.

use cb_lab::cb::is_cb;
use cb_lab::cover::{balancing_case, exists_cover, min_cover, CoverSearch};
use cb_lab::generators::{gen_rnc, gen_skew_lines};
use cb_lab::{FieldSpec, Result};

fn main() -> Result<()> {
    let f = FieldSpec::prime(101)?;

    // Ten points, five on each of two skew lines in P^3: CB(3) with a 2-dimensional cover.
    let skew = gen_skew_lines(2, &[5, 5], f, 1)?.points;
    println!("skew lines CB(3): {}", is_cb(&skew, 3).verdict);
    let min = min_cover(&skew)?;
    println!("minimal cover: dim {} length {} (exhaustive: {})", min.dim, min.length, min.proof_of_minimality);
    println!("point-to-plane assignment: {:?}", min.assignment);
    let cfg = min.config.as_ref().expect("found");
    println!("balancing case at r = 3: {:?}", balancing_case(&skew, cfg, 3));
    let one_plane = exists_cover(&skew, 2, 1)?;
    println!("a single plane of dim <= 2 covers it: {}", one_plane.found);

    // Eight points on a twisted cubic: CB(2) yet no cover of dimension 2.
    let rnc = gen_rnc(3, 8, f, 2)?.points;
    let mut search = CoverSearch::new(&rnc)?;
    let res = search.exists(2, 2)?;
    println!(
        "twisted cubic, 8 points: CB(2) = {}, 2-dim cover = {} after {} nodes",
        is_cb(&rnc, 2).verdict,
        res.found,
        res.nodes_explored
    );
    println!("candidate flats of dim <= 2: {}", search.candidates(2).len());
    Ok(())
}
