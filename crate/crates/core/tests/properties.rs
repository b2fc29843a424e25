//! Property suites over random inputs.

mod common;

use cb_lab::cb::{cb_failures, excise, is_cb};
use cb_lab::cover::min_cover;
use cb_lab::generators::{Family, GenSpec, Piece};
use cb_lab::linalg::rank;
use cb_lab::{FieldSpec, Flat, PlaneConfiguration, PointSet, Scalar};
use proptest::prelude::*;

fn gf(p: u64) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

fn s(f: FieldSpec, v: i64) -> Scalar {
    f.from_i64(v)
}

/// A family whose draws are CB(r) for general seeds, sized for quick checks.
fn cb_family(r: u32) -> impl Strategy<Value = Family> {
    let r = r as usize;
    prop_oneof![
        (1usize..=3, 0usize..3).prop_map(move |(k, extra)| Family::Rnc { k, m: k * r + 2 + extra }),
        (0usize..3).prop_map(move |extra| Family::SkewLines {
            d: 2,
            counts: vec![r + 2 + extra, r + 2],
        }),
        (0usize..2).prop_map(move |extra| Family::SplitUnion {
            pieces: vec![Piece::Rnc { k: 1, m: r + 2 + extra }, Piece::Rnc { k: 2, m: 2 * r + 2 }],
        }),
    ]
}

/// Any point set over GF(p) from a short list of coordinate rows.
fn point_set(p: u64, n: usize, max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(0..p as i64, n + 1), 0..=max).prop_map(move |rows| {
        let f = gf(p);
        let mut pts = Vec::new();
        for row in rows {
            if let Ok(pt) = cb_lab::ProjPoint::from_i64(f, &row) {
                if !pts.contains(&pt) {
                    pts.push(pt);
                }
            }
        }
        PointSet::new(f, n, pts).unwrap()
    })
}

fn invertible(p: u64, n: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    prop::collection::vec(prop::collection::vec(0..p as i64, n + 1), n + 1)
        .prop_filter_map("singular", move |rows| {
            let f = gf(p);
            let m: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| s(f, v)).collect()).collect();
            (rank(f, n + 1, &m) == n + 1).then_some(m)
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms(a in 0i64..101, b in 0i64..101, c in 0i64..101) {
        let f = gf(101);
        let (a, b, c) = (s(f, a), s(f, b), s(f, c));
        prop_assert_eq!(a.checked_add(&b).unwrap(), b.checked_add(&a).unwrap());
        prop_assert_eq!(
            a.checked_mul(&b.checked_add(&c).unwrap()).unwrap(),
            a.checked_mul(&b).unwrap().checked_add(&a.checked_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.checked_mul(&b).unwrap().checked_mul(&c).unwrap(),
            a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.checked_add(&-&a).unwrap().is_zero());
        if !a.is_zero() {
            prop_assert!(a.checked_mul(&a.inv().unwrap()).unwrap().is_one());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn rational_arithmetic_reduces_mod_p(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let q = FieldSpec::rationals();
        let x = s(q, a).checked_div(&s(q, b)).unwrap();
        let y = s(q, c).checked_div(&s(q, d)).unwrap();
        let p = gf(101);
        let sum = x.checked_add(&y).unwrap().checked_mul(&x).unwrap();
        let reduced = x.reduce_mod(p).unwrap().checked_add(&y.reduce_mod(p).unwrap()).unwrap()
            .checked_mul(&x.reduce_mod(p).unwrap()).unwrap();
        prop_assert_eq!(sum.reduce_mod(p).unwrap(), reduced);
    }

    #[test]
    fn rank_over_q_matches_large_prime(rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 5), 1..=5)) {
        // Minors are at most (5 * sqrt 5)^5 < 2^31 - 1 in absolute value, so no prime above that divides one.
        let q = FieldSpec::rationals();
        let p = gf(2_147_483_647);
        let mq: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| s(q, v)).collect()).collect();
        let mp: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| s(p, v)).collect()).collect();
        prop_assert_eq!(rank(q, 5, &mq), rank(p, 5, &mp));
        let (pp, small) = (7u64, gf(7));
        let m7: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| s(small, v)).collect()).collect();
        prop_assert!(rank(small, 5, &m7) <= rank(q, 5, &mq));
        let raw: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&v| v.rem_euclid(pp as i64) as u64).collect()).collect();
        prop_assert_eq!(rank(small, 5, &m7), common::rank_mod(pp, raw));
    }

    #[test]
    fn points_and_flats_are_canonical(v in prop::collection::vec(0i64..11, 4), w in prop::collection::vec(0i64..11, 4), k in 1i64..11) {
        let f = gf(11);
        prop_assume!(v.iter().any(|&x| x != 0) && w.iter().any(|&x| x != 0));
        let a = cb_lab::ProjPoint::from_i64(f, &v).unwrap();
        let scaled: Vec<i64> = v.iter().map(|x| x * k).collect();
        prop_assert_eq!(&a, &cb_lab::ProjPoint::from_i64(f, &scaled).unwrap());
        let vs: Vec<Scalar> = v.iter().map(|&x| s(f, x)).collect();
        let ws: Vec<Scalar> = w.iter().map(|&x| s(f, x)).collect();
        let sum: Vec<Scalar> = vs.iter().zip(&ws).map(|(x, y)| x.checked_add(y).unwrap()).collect();
        if let (Ok(l1), Ok(l2)) = (
            Flat::from_vectors(f, 3, &[vs.clone(), ws.clone()]),
            Flat::from_vectors(f, 3, &[ws.clone(), sum, vs.clone()]),
        ) {
            prop_assert_eq!(l1.to_owned(), l2);
            prop_assert_eq!(serde_json::from_str::<Flat>(&serde_json::to_string(&l1).unwrap()).unwrap(), l1);
        }
    }

    #[test]
    fn witnesses_are_valid_and_match_oracle(gamma in point_set(7, 2, 8), r in 0u32..4) {
        let rep = is_cb(&gamma, r);
        prop_assert_eq!(rep.verdict, common::oracle_cb(&gamma, r));
        prop_assert_eq!(rep.verdict, rep.witness.is_none());
        prop_assert!(rep.witness_is_valid(&gamma));
        let back: cb_lab::cb::CbReport = serde_json::from_str(&rep.to_json()).unwrap();
        prop_assert_eq!(back, rep);
    }

    #[test]
    fn point_set_json_round_trip(gamma in point_set(13, 3, 6)) {
        prop_assert_eq!(PointSet::from_json(&gamma.to_json()).unwrap(), gamma.clone());
        prop_assert_eq!(PointSet::from_json(&gamma.to_json()).unwrap().to_json(), gamma.to_json());
    }

    #[test]
    fn monotonicity(r in 1u32..4, fam in (1u32..4).prop_flat_map(cb_family), seed in any::<u64>()) {
        let g = GenSpec::new(fam, gf(101), seed).generate().unwrap();
        for r in 1..=r {
            if is_cb(&g.points, r).verdict {
                prop_assert!(is_cb(&g.points, r - 1).verdict);
            }
        }
    }

    #[test]
    fn excision_lowers_degree_by_length(r in 1u32..4, seed in any::<u64>(), picks in prop::collection::vec((0usize..64, 0usize..64), 1..4)) {
        let g = GenSpec::new(Family::Rnc { k: 3, m: 3 * r as usize + 2 }, gf(101), seed).generate().unwrap();
        prop_assume!(is_cb(&g.points, r).verdict);
        let n = g.points.len();
        let mut lines = Vec::new();
        for (i, j) in picks.into_iter().take(r as usize) {
            let (i, j) = (i % n, j % n);
            if i == j { continue; }
            let l = Flat::from_vectors(gf(101), 3, &[g.points.points()[i].coords().to_vec(), g.points.points()[j].coords().to_vec()]).unwrap();
            if !lines.contains(&l) { lines.push(l); }
        }
        prop_assume!(!lines.is_empty());
        let len = lines.len() as u32;
        let rest = excise(&g.points, &PlaneConfiguration::new(lines).unwrap());
        prop_assert!(is_cb(&rest, r - len).verdict);
    }

    #[test]
    fn split_union_is_cb_iff_pieces_are(a in 1usize..7, b in 1usize..7, r in 1u32..4, seed in any::<u64>()) {
        let g = GenSpec::new(Family::SkewLines { d: 2, counts: vec![a, b] }, gf(101), seed).generate().unwrap();
        let cfg = g.config.unwrap();
        let pieces: Vec<bool> = cfg.planes().iter().map(|p| is_cb(&g.points.subset(&p.incident(&g.points)), r).verdict).collect();
        prop_assert_eq!(is_cb(&g.points, r).verdict, pieces.iter().all(|&x| x));
    }

    #[test]
    fn transforms_preserve_verdicts(gamma in point_set(11, 2, 7), m in invertible(11, 2), r in 1u32..4) {
        let moved = gamma.transform(&m).unwrap();
        prop_assert_eq!(cb_failures(&gamma, r).len(), cb_failures(&moved, r).len());
        prop_assert_eq!(is_cb(&gamma, r).verdict, is_cb(&moved, r).verdict);
        if !gamma.is_empty() {
            let (a, b) = (min_cover(&gamma).unwrap(), min_cover(&moved).unwrap());
            prop_assert_eq!((a.dim, a.length), (b.dim, b.length));
        }
    }

    #[test]
    fn generators_are_deterministic_and_on_their_curves(fam in (1u32..4).prop_flat_map(cb_family), seed in any::<u64>()) {
        let spec = GenSpec::new(fam, gf(101), seed);
        let a = spec.generate().unwrap();
        let b = GenSpec::from_json(&spec.to_json()).unwrap().generate().unwrap();
        prop_assert_eq!(a.points.to_json(), b.points.to_json());
        for form in &a.defining_forms {
            for pt in a.points.iter() {
                prop_assert!(form.eval(pt).is_zero());
            }
        }
        if let Some(cfg) = &a.config {
            prop_assert!(cb_lab::cover::verify_cover(&a.points, cfg));
        }
    }
}

#[test]
fn plane_curve_points_satisfy_both_curves() {
    for seed in 0..5 {
        let g = cb_lab::generators::gen_plane_curve_ci(2, 3, gf(101), seed).unwrap();
        assert_eq!(g.defining_forms.len(), 2);
        for form in &g.defining_forms {
            assert!(g.points.iter().all(|p| form.eval(p).is_zero()));
        }
    }
}
