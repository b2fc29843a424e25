//! Matroids on at most 20 elements, their flats, the matroid Cayley-Bacharach
//! condition MCB(r) and flat covers.
//!
//! MCB(r): whenever a union of `r` flats contains all elements but one, it
//! contains that one too. A flat avoiding `x` is proper, so the search looks, for
//! each `x`, for at most `r` flats avoiding `x` whose union is everything else.
//! Only the inclusion-maximal flats avoiding `x` matter.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg;
use crate::projective::{all_points, PointSet};

pub const MAX_GROUND: usize = 20;

/// Subsets of the ground set as bitmasks.
pub type Set = u32;

fn members(s: Set) -> Vec<usize> {
    (0..32).filter(|&i| s >> i & 1 == 1).collect()
}

fn from_members(items: &[usize]) -> Set {
    items.iter().fold(0, |acc, &i| acc | 1 << i)
}

#[derive(Clone, Debug)]
enum Backing {
    Points(PointSet),
    /// All flats, each with its rank.
    Lattice(Vec<(Set, usize)>),
    Uniform { k: usize },
}

#[derive(Clone, Debug)]
pub struct Matroid {
    n: usize,
    backing: Backing,
    cache: RefCell<HashMap<Set, usize>>,
}

/// Matroid JSON: a representing point set or the complete list of flats.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatroidSpec {
    Matrix { matrix: PointSet },
    Flats { flats: Vec<Vec<usize>> },
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_GROUND {
        return Err(Error::GroundTooLarge { size: n, cap: MAX_GROUND });
    }
    Ok(())
}

impl Matroid {
    /// The matroid of linear dependencies among the coordinate vectors of Γ.
    pub fn from_points(gamma: &PointSet) -> Result<Matroid> {
        check_size(gamma.len())?;
        Ok(Matroid::with(gamma.len(), Backing::Points(gamma.clone())))
    }

    pub fn uniform(k: usize, n: usize) -> Result<Matroid> {
        check_size(n)?;
        if k > n {
            return Err(Error::InvalidParams(format!("U_{{{k},{n}}} needs k <= n")));
        }
        Ok(Matroid::with(n, Backing::Uniform { k }))
    }

    /// The Fano plane: the seven points of P^2 over GF(2).
    pub fn fano() -> Matroid {
        let f = FieldSpec::prime(2).expect("2 is prime");
        let pts = all_points(f, 2).expect("prime field");
        Matroid::with(7, Backing::Points(PointSet::new(f, 2, pts).expect("distinct")))
    }

    /// From the complete list of flats on `0..n`. The ground set is added if
    /// missing; the list must be closed under intersection.
    pub fn from_flats(n: usize, flats: &[Vec<usize>]) -> Result<Matroid> {
        check_size(n)?;
        let mut sets: BTreeSet<Set> = BTreeSet::new();
        for f in flats {
            if let Some(&bad) = f.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidConfiguration(format!("element {bad} outside a ground set of {n}")));
            }
            sets.insert(from_members(f));
        }
        let ground = if n == 32 { !0 } else { (1u32 << n) - 1 };
        sets.insert(ground);
        let list: Vec<Set> = sets.into_iter().collect();
        for &a in &list {
            for &b in &list {
                if !list.contains(&(a & b)) {
                    return Err(Error::InvalidConfiguration(format!(
                        "flats {:?} and {:?} meet in a non-flat",
                        members(a),
                        members(b)
                    )));
                }
            }
        }
        // Rank of a flat is the length of the longest chain of flats below it.
        let mut by_size = list.clone();
        by_size.sort_by_key(|s| s.count_ones());
        let mut ranked: Vec<(Set, usize)> = Vec::new();
        for f in by_size {
            let r = ranked
                .iter()
                .filter(|(g, _)| *g != f && g & f == *g)
                .map(|(_, r)| r + 1)
                .max()
                .unwrap_or(0);
            ranked.push((f, r));
        }
        let m = Matroid::with(n, Backing::Lattice(ranked));
        if let Some(v) = m.check_rank_axioms(256, 0) {
            return Err(Error::InvalidConfiguration(v));
        }
        Ok(m)
    }

    pub fn from_spec(spec: &MatroidSpec) -> Result<Matroid> {
        match spec {
            MatroidSpec::Matrix { matrix } => Matroid::from_points(matrix),
            MatroidSpec::Flats { flats } => {
                let n = flats.iter().flatten().map(|&i| i + 1).max().unwrap_or(0);
                Matroid::from_flats(n, flats)
            }
        }
    }

    fn with(n: usize, backing: Backing) -> Matroid {
        Matroid {
            n,
            backing,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn ground(&self) -> Set {
        if self.n == 32 {
            !0
        } else {
            (1 << self.n) - 1
        }
    }

    pub fn rank(&self, s: Set) -> usize {
        let s = s & self.ground();
        if let Some(&r) = self.cache.borrow().get(&s) {
            return r;
        }
        let r = match &self.backing {
            Backing::Uniform { k } => (s.count_ones() as usize).min(*k),
            Backing::Points(gamma) => {
                let rows: Vec<_> = members(s).into_iter().map(|i| gamma.points()[i].coords().to_vec()).collect();
                linalg::rank(gamma.field(), gamma.ambient_dim() + 1, &rows)
            }
            Backing::Lattice(flats) => flats
                .iter()
                .filter(|(f, _)| f & s == s)
                .min_by_key(|(f, _)| f.count_ones())
                .map(|(_, r)| *r)
                .expect("the ground set is a flat"),
        };
        self.cache.borrow_mut().insert(s, r);
        r
    }

    pub fn full_rank(&self) -> usize {
        self.rank(self.ground())
    }

    pub fn closure(&self, s: Set) -> Set {
        let r = self.rank(s);
        let mut c = s;
        for e in 0..self.n {
            if c >> e & 1 == 0 && self.rank(s | 1 << e) == r {
                c |= 1 << e;
            }
        }
        c
    }

    pub fn is_flat(&self, s: Set) -> bool {
        self.closure(s) == s
    }

    /// Checks normalization, boundedness, monotonicity and submodularity on
    /// random triples; returns a description of the first violation.
    pub fn check_rank_axioms(&self, triples: usize, seed: u64) -> Option<String> {
        if self.rank(0) != 0 {
            return Some("rank of the empty set is not 0".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = self.ground();
        for _ in 0..triples {
            let (a, b, c) = (rng.gen::<Set>() & g, rng.gen::<Set>() & g, rng.gen::<Set>() & g);
            let (ra, rb) = (self.rank(a), self.rank(b));
            if ra > a.count_ones() as usize {
                return Some(format!("rank {ra} exceeds size of {:?}", members(a)));
            }
            if self.rank(a | c) < ra {
                return Some(format!("rank drops from {:?} to {:?}", members(a), members(a | c)));
            }
            if self.rank(a | b) + self.rank(a & b) > ra + rb {
                return Some(format!("submodularity fails for {:?}, {:?}", members(a), members(b)));
            }
        }
        None
    }

    /// All flats of rank at most `max_rank`, grouped by rank.
    pub fn flats(&self, max_rank: usize) -> Result<FlatLattice> {
        check_size(self.n)?;
        let mut by_rank: Vec<Vec<Set>> = vec![vec![self.closure(0)]];
        while by_rank.len() <= max_rank.min(self.full_rank()) {
            let mut next = BTreeSet::new();
            for &f in by_rank.last().unwrap() {
                for e in 0..self.n {
                    if f >> e & 1 == 0 {
                        next.insert(self.closure(f | 1 << e));
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            by_rank.push(next.into_iter().collect());
        }
        for level in &mut by_rank {
            level.sort_by_key(|&s| members(s));
        }
        Ok(FlatLattice { by_rank })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatLattice {
    by_rank: Vec<Vec<Set>>,
}

impl FlatLattice {
    /// Flats of rank `k`, ordered by their sorted element lists.
    pub fn of_rank(&self, k: usize) -> &[Set] {
        self.by_rank.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn max_rank(&self) -> usize {
        self.by_rank.len() - 1
    }

    pub fn all(&self) -> impl Iterator<Item = Set> + '_ {
        self.by_rank.iter().flatten().copied()
    }

    pub fn to_lists(&self) -> Vec<Vec<Vec<usize>>> {
        self.by_rank.iter().map(|l| l.iter().map(|&s| members(s)).collect()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McbMode {
    /// Every proper flat.
    AllFlats,
    /// Only flats of corank one. Experimental: not known to be equivalent.
    HyperplanesOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McbReport {
    pub r: usize,
    pub verdict: bool,
    pub mode: McbMode,
    /// On failure, the element the flats miss.
    pub excluded: Option<usize>,
    /// On failure, at most `r` flats covering everything but `excluded`.
    pub flats: Vec<Vec<usize>>,
}

pub fn is_mcb(m: &Matroid, r: usize, mode: McbMode) -> Result<McbReport> {
    check_size(m.len())?;
    if r == 0 {
        return Err(Error::InvalidParams("MCB(r) needs r >= 1".into()));
    }
    let full = m.full_rank();
    let lattice = m.flats(full.saturating_sub(1))?;
    let pool: Vec<Set> = match mode {
        McbMode::AllFlats => lattice.all().filter(|&f| f != m.ground()).collect(),
        McbMode::HyperplanesOnly => lattice.of_rank(full.saturating_sub(1)).to_vec(),
    };
    for x in 0..m.len() {
        let bit = 1 << x;
        let avoiding: Vec<Set> = pool.iter().copied().filter(|f| f & bit == 0).collect();
        let maximal: Vec<Set> = avoiding
            .iter()
            .copied()
            .filter(|&f| !avoiding.iter().any(|&g| g != f && g & f == f))
            .collect();
        let target = m.ground() & !bit;
        let mut chosen = Vec::new();
        if cover_with(&maximal, target, 0, r, &mut chosen) {
            if chosen.is_empty() {
                // Nothing else to cover: any flat avoiding x witnesses the failure.
                match maximal.first() {
                    Some(&f) => chosen.push(f),
                    None => continue,
                }
            }
            return Ok(McbReport {
                r,
                verdict: false,
                mode,
                excluded: Some(x),
                flats: chosen.into_iter().map(members).collect(),
            });
        }
    }
    Ok(McbReport {
        r,
        verdict: true,
        mode,
        excluded: None,
        flats: Vec::new(),
    })
}

/// At most `left` sets from `pool` covering `target`, branching on the lowest uncovered element.
fn cover_with(pool: &[Set], target: Set, covered: Set, left: usize, chosen: &mut Vec<Set>) -> bool {
    let open = target & !covered;
    if open == 0 {
        return true;
    }
    if left == 0 {
        return false;
    }
    let e = open.trailing_zeros();
    for &f in pool.iter().filter(|&&f| f >> e & 1 == 1) {
        chosen.push(f);
        if cover_with(pool, target, covered | f, left - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Flats `F_i` of rank `dims[i] + 1` whose union is the ground set.
pub fn exists_flat_cover(m: &Matroid, dims: &[usize]) -> Result<Option<Vec<Vec<usize>>>> {
    check_size(m.len())?;
    let top = dims.iter().map(|d| d + 1).max().unwrap_or(0);
    let lattice = m.flats(top)?;
    let mut slots: Vec<Option<Set>> = vec![None; dims.len()];
    if !flat_cover(m, &lattice, dims, 0, &mut slots) {
        return Ok(None);
    }
    // Unused slots take the first flat of their rank.
    for (slot, &d) in slots.iter_mut().zip(dims) {
        if slot.is_none() {
            match lattice.of_rank(d + 1).first() {
                Some(&f) => *slot = Some(f),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(slots.into_iter().map(|s| members(s.unwrap())).collect()))
}

fn flat_cover(m: &Matroid, lattice: &FlatLattice, dims: &[usize], covered: Set, slots: &mut [Option<Set>]) -> bool {
    let open = m.ground() & !covered;
    if open == 0 {
        return true;
    }
    let e = open.trailing_zeros();
    let mut tried_ranks = BTreeSet::new();
    for i in 0..dims.len() {
        if slots[i].is_some() || !tried_ranks.insert(dims[i]) {
            continue;
        }
        for &f in lattice.of_rank(dims[i] + 1).iter().filter(|&&f| f >> e & 1 == 1) {
            slots[i] = Some(f);
            if flat_cover(m, lattice, dims, covered | f, slots) {
                return true;
            }
        }
        slots[i] = None;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf101() -> FieldSpec {
        FieldSpec::prime(101).unwrap()
    }

    fn two_skew_lines() -> PointSet {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for t in 1..=5 {
            rows.push(vec![1, t, 0, 0]);
        }
        for t in 1..=5 {
            rows.push(vec![0, 0, 1, 2 * t + 1]);
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        PointSet::from_i64(gf101(), 3, &refs).unwrap()
    }

    #[test]
    fn collinear_points_are_u23() {
        let g = PointSet::from_i64(gf101(), 2, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 0]]).unwrap();
        let m = Matroid::from_points(&g).unwrap();
        assert_eq!(m.full_rank(), 2);
        let u = Matroid::uniform(2, 3).unwrap();
        for s in 0..8 {
            assert_eq!(m.rank(s), u.rank(s));
        }
        let flats = m.flats(1).unwrap();
        assert_eq!(flats.of_rank(1), &[0b001, 0b010, 0b100]);
    }

    #[test]
    fn generic_points_are_uniform() {
        let g = PointSet::from_i64(gf101(), 2, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]).unwrap();
        let m = Matroid::from_points(&g).unwrap();
        assert_eq!(m.flats(2).unwrap().of_rank(2).len(), 6);
        assert!(m.check_rank_axioms(1000, 1).is_none());
    }

    #[test]
    fn skew_lines_flats() {
        let m = Matroid::from_points(&two_skew_lines()).unwrap();
        assert_eq!(m.full_rank(), 4);
        let lines: Vec<Set> = m.flats(2).unwrap().of_rank(2).iter().copied().filter(|f| f.count_ones() == 5).collect();
        assert_eq!(lines, vec![0b00000_11111, 0b11111_00000]);
        let cover = exists_flat_cover(&m, &[1, 1]).unwrap().unwrap();
        assert_eq!(cover, vec![vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]);
        assert!(exists_flat_cover(&m, &[1]).unwrap().is_none());
    }

    #[test]
    fn mcb_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert!(is_mcb(&u23, 1, McbMode::AllFlats).unwrap().verdict);
        let single = Matroid::uniform(1, 1).unwrap();
        let rep = is_mcb(&single, 1, McbMode::AllFlats).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.excluded, Some(0));
        assert_eq!(rep.flats, vec![Vec::<usize>::new()]);
        // 10 points on two skew lines, 5 on each, are CB(3) and so MCB(3).
        let m = Matroid::from_points(&two_skew_lines()).unwrap();
        assert!(is_mcb(&m, 3, McbMode::AllFlats).unwrap().verdict);
        let rep = is_mcb(&m, 4, McbMode::AllFlats).unwrap();
        assert!(!rep.verdict && rep.flats.len() <= 4);
    }

    #[test]
    fn flat_cover_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert_eq!(exists_flat_cover(&u23, &[1]).unwrap(), Some(vec![vec![0, 1, 2]]));
        let u37 = Matroid::uniform(3, 7).unwrap();
        assert_eq!(exists_flat_cover(&u37, &[1]).unwrap(), None);
    }

    #[test]
    fn fano_and_lattice_backing() {
        let fano = Matroid::fano();
        assert_eq!(fano.full_rank(), 3);
        let lines = fano.flats(2).unwrap();
        assert_eq!(lines.of_rank(2).len(), 7);
        assert!(lines.of_rank(2).iter().all(|l| l.count_ones() == 3));
        let mut flats: Vec<Vec<usize>> = lines.all().map(members).collect();
        flats.push((0..7).collect());
        let back = Matroid::from_flats(7, &flats).unwrap();
        for s in 0..128 {
            assert_eq!(back.rank(s), fano.rank(s));
        }
        assert!(Matroid::from_flats(3, &[vec![0, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn ground_cap() {
        let f = FieldSpec::prime(101).unwrap();
        let rows: Vec<Vec<i64>> = (0..21).map(|t| vec![1, t]).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let g = PointSet::from_i64(f, 1, &refs).unwrap();
        assert!(matches!(Matroid::from_points(&g), Err(Error::GroundTooLarge { .. })));
    }

    #[test]
    fn spec_json() {
        let s: MatroidSpec = serde_json::from_str(r#"{"flats":[[],[0],[1],[2]]}"#).unwrap();
        let m = Matroid::from_spec(&s).unwrap();
        assert_eq!(m.full_rank(), 2);
        let p = MatroidSpec::Matrix { matrix: two_skew_lines() };
        let back: MatroidSpec = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
