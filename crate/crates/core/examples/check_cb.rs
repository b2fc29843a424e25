//! Deciding CB(r), reading witnesses, and excision.
//!
//! Run with `cargo run --example check_cb`.

use cb_lab::cb::{excise, is_cb, max_cb};
use cb_lab::generators::gen_plane_curve_ci;
use cb_lab::{FieldSpec, Flat, PlaneConfiguration, PointSet, Result};

fn main() -> Result<()> {
    let f = FieldSpec::prime(101)?;

    // Two plane cubics meet in 9 points, and those 9 are CB(3).
    let ci = gen_plane_curve_ci(3, 3, f, 7)?;
    println!("{}", ci.certificate);
    let report = is_cb(&ci.points, 3);
    println!("CB(3) on the cubic intersection: {}", report.verdict);
    println!("largest r with CB(r): {}", max_cb(&ci.points, 10)?);

    // Five points on a line are CB(3) but not CB(4).
    let line = PointSet::from_i64(f, 2, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[1, 2, 0], &[1, 3, 0]])?;
    for r in [3, 4] {
        let rep = is_cb(&line, r);
        print!("five collinear points, CB({r}): {}", rep.verdict);
        match &rep.witness {
            Some(w) => println!("; {} vanishes everywhere except point {}", w.form, w.omitted),
            None => println!(),
        }
    }
    println!("as JSON: {}", is_cb(&line, 4).to_json());

    // Removing the points on a line drops the CB degree by at most one.
    let x0 = Flat::from_vectors(f, 2, &[vec![f.zero(), f.one(), f.zero()], vec![f.zero(), f.zero(), f.one()]])?;
    let cfg = PlaneConfiguration::new(vec![x0])?;
    let rest = excise(&ci.points, &cfg);
    println!(
        "after removing the line x0 = 0: {} points left, CB(2) = {}",
        rest.len(),
        is_cb(&rest, 2).verdict
    );
    Ok(())
}
