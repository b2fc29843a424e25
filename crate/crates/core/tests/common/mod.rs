//! Independent test oracles over GF(p), written with plain u64 arithmetic.
//! Nothing here calls the library's linear algebra, CB check or cover search.

#![allow(dead_code)]

use std::collections::HashSet;

use cb_lab::{FieldSpec, PointSet, ProjPoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn residues(gamma: &PointSet) -> (u64, Vec<Vec<u64>>) {
    let p = gamma.field().modulus().expect("oracles work over GF(p)") as u64;
    let rows = gamma
        .iter()
        .map(|pt| pt.coords().iter().map(|c| c.residue().unwrap() as u64).collect())
        .collect();
    (p, rows)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn rank_mod(p: u64, mut rows: Vec<Vec<u64>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let f = rows[i][col] * inv % p;
                for j in col..ncols {
                    rows[i][j] = (rows[i][j] + p * p - f * rows[rank][j]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exponent vectors of all monomials of degree `r` in `vars` variables.
fn monomials(vars: usize, r: u32) -> Vec<Vec<u32>> {
    if vars == 1 {
        return vec![vec![r]];
    }
    let mut out = Vec::new();
    for e in 0..=r {
        for mut rest in monomials(vars - 1, r - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

/// CB(r) straight from the definition's linear-algebra form: every point's
/// row lies in the span of the other rows of the degree-r evaluation matrix.
pub fn oracle_cb(gamma: &PointSet, r: u32) -> bool {
    if r == 0 || gamma.is_empty() {
        return true;
    }
    let (p, pts) = residues(gamma);
    let mons = monomials(gamma.ambient_dim() + 1, r);
    let rows: Vec<Vec<u64>> = pts
        .iter()
        .map(|x| {
            mons.iter()
                .map(|m| m.iter().zip(x).fold(1, |a, (&e, &c)| a * pow_mod(c, e as u64, p) % p))
                .collect()
        })
        .collect();
    let full = rank_mod(p, rows.clone());
    (0..rows.len()).all(|i| {
        let mut rest = rows.clone();
        rest.remove(i);
        rank_mod(p, rest) == full
    })
}

/// Every flat worth using in a cover, as (points of Γ on it, dimension).
/// Flats spanned by subsets of Γ, plus a line through each single point.
pub fn oracle_candidates(gamma: &PointSet) -> Vec<(u64, usize)> {
    let (p, pts) = residues(gamma);
    let n = pts.len();
    assert!(n <= 16, "oracle is for small sets");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in 1u64..(1 << n) {
        let rows: Vec<Vec<u64>> = (0..n).filter(|i| s >> i & 1 == 1).map(|i| pts[i].clone()).collect();
        let rk = rank_mod(p, rows.clone());
        if rk < 2 {
            continue;
        }
        let closure = (0..n).fold(0u64, |acc, x| {
            let mut with = rows.clone();
            with.push(pts[x].clone());
            if rank_mod(p, with) == rk {
                acc | 1 << x
            } else {
                acc
            }
        });
        if seen.insert(closure) {
            out.push((closure, rk - 1));
        }
    }
    for i in 0..n {
        out.push((1 << i, 1));
    }
    out
}

/// Does some multiset of at most `max_len` candidates with total dimension
/// at most `d` cover Γ? Breadth-first over (length, dimension, covered set).
pub fn oracle_cover(gamma: &PointSet, d: usize, max_len: usize) -> bool {
    let n = gamma.len();
    if n == 0 {
        return true;
    }
    let full = (1u64 << n) - 1;
    let cands = oracle_candidates(gamma);
    let mut layer: HashSet<(usize, u64)> = HashSet::from([(0, 0)]);
    for _ in 0..max_len {
        let mut next = HashSet::new();
        for &(k, mask) in &layer {
            for &(m, dm) in &cands {
                if k + dm <= d && m & !mask != 0 {
                    let u = mask | m;
                    if u == full {
                        return true;
                    }
                    next.insert((k + dm, u));
                }
            }
        }
        layer = next;
    }
    false
}

/// Least dimension, then least length, of a cover.
pub fn oracle_min(gamma: &PointSet) -> (usize, usize) {
    let n = gamma.ambient_dim();
    let d = (1..=n.max(1)).find(|&d| oracle_cover(gamma, d, d)).expect("the whole space covers");
    let l = (1..=d).find(|&l| oracle_cover(gamma, d, l)).unwrap();
    (d, l)
}

fn random_vec(p: u64, len: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    loop {
        let v: Vec<u64> = (0..len).map(|_| rng.gen_range(0..p)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

/// Up to `max_points` points of P^n(GF(p)) clustered on a few random lines
/// and planes, so that low-dimensional covers sometimes exist.
pub fn random_structured(p: u64, n: usize, max_points: usize, rng: &mut ChaCha8Rng) -> PointSet {
    let f = FieldSpec::prime(p).unwrap();
    let mut pts: Vec<ProjPoint> = Vec::new();
    let groups = rng.gen_range(1..=3);
    for _ in 0..groups {
        let k = rng.gen_range(1..=2.min(n));
        let basis: Vec<Vec<u64>> = (0..=k).map(|_| random_vec(p, n + 1, rng)).collect();
        for _ in 0..rng.gen_range(1..=4) {
            let c = random_vec(p, k + 1, rng);
            let v: Vec<i64> = (0..=n)
                .map(|j| (0..=k).fold(0, |a, i| (a + c[i] * basis[i][j]) % p) as i64)
                .collect();
            push_point(f, &v, &mut pts);
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let v: Vec<i64> = random_vec(p, n + 1, rng).into_iter().map(|x| x as i64).collect();
        push_point(f, &v, &mut pts);
    }
    pts.truncate(max_points);
    PointSet::new(f, n, pts).unwrap()
}

fn push_point(f: FieldSpec, v: &[i64], pts: &mut Vec<ProjPoint>) {
    if let Ok(pt) = ProjPoint::from_i64(f, v) {
        if !pts.contains(&pt) {
            pts.push(pt);
        }
    }
}
