//! The example families: draw each one, then report CB and the minimal cover.
//!
//! Run with `cargo run --example families`.

use cb_lab::cb::max_cb;
use cb_lab::cover::min_cover;
use cb_lab::generators::{Family, GenSpec, Piece};
use cb_lab::{FieldSpec, Result};

fn main() -> Result<()> {
    let f = FieldSpec::prime(101)?;
    let families = [
        Family::Rnc { k: 3, m: 8 },
        Family::SkewLines { d: 2, counts: vec![5, 5] },
        Family::TwoPlaneConics { points_per_conic: 8 },
        Family::PlaneCurveCi { deg_d: 2, deg_e: 3 },
        Family::EllipticQuartic { m: 9 },
        Family::SplitUnion {
            pieces: vec![Piece::Rnc { k: 1, m: 4 }, Piece::General { k: 2, m: 7 }],
        },
    ];
    for family in families {
        let spec = GenSpec::new(family, f, 3);
        let g = spec.generate()?;
        let cover = min_cover(&g.points)?;
        println!("{}", spec.to_json());
        println!(
            "  {} points in P^{}, max CB degree {}, minimal cover dim {} length {}",
            g.points.len(),
            g.points.ambient_dim(),
            max_cb(&g.points, 8)?,
            cover.dim,
            cover.length
        );
        println!("  {}", g.certificate);
    }

    // The same spec always gives the same points.
    let spec = GenSpec::from_json(r#"{"family":"rnc","params":{"k":2,"m":6},"field":{"kind":"rational"},"seed":9}"#)?;
    assert_eq!(spec.generate()?.points, spec.generate()?.points);
    println!("conic over Q: {}", spec.generate()?.points.to_json());
    Ok(())
}
