//! Exact search for plane configurations covering a point set.
//!
//! Any plane of a cover can be shrunk to the span of the points of Γ it
//! contains without uncovering anything or raising its dimension. So it is
//! enough to search over flats spanned by subsets of Γ (plus, for a lone point,
//! one line through it). Those candidates are generated level by level:
//! every flat of dimension `k + 1` spanned by points of Γ is the span of a
//! dimension-`k` such flat and one more point.
//!
//! The search is a depth-first branch and bound: branch on the uncovered point
//! lying on the fewest usable candidates, bound by the remaining dimension and
//! length budget, and memoize failed `(covered, dim left, length left)` states.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::projective::{span, Flat, Generator, PlaneConfiguration, PointSet, ProjPoint};

/// Point subsets are bitmasks, which caps the search at 64 points.
pub type Mask = u64;
pub const MAX_POINTS: usize = 64;
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// A flat spanned by points of Γ, with the points of Γ it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub flat: Flat,
    pub mask: Mask,
}

impl Candidate {
    pub fn points(&self) -> Vec<usize> {
        (0..MAX_POINTS).filter(|&i| self.mask >> i & 1 == 1).collect()
    }

    pub fn dim(&self) -> usize {
        self.flat.dim()
    }
}

fn incident_mask(flat: &Flat, gamma: &PointSet, known: Mask) -> Mask {
    let mut mask = known;
    for (i, p) in gamma.iter().enumerate() {
        if known >> i & 1 == 0 && flat.contains(p) {
            mask |= 1 << i;
        }
    }
    mask
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverResult {
    pub found: bool,
    pub config: Option<PlaneConfiguration>,
    pub dim: usize,
    pub length: usize,
    pub nodes_explored: u64,
    /// Every smaller dimension (and, at this dimension, every smaller length)
    /// was ruled out exhaustively.
    pub proof_of_minimality: bool,
    /// For each point, the index of the first plane containing it.
    pub assignment: Vec<usize>,
}

impl CoverResult {
    fn not_found(nodes: u64) -> Self {
        CoverResult {
            found: false,
            config: None,
            dim: 0,
            length: 0,
            nodes_explored: nodes,
            proof_of_minimality: true,
            assignment: Vec::new(),
        }
    }

    fn found(gamma: &PointSet, planes: Vec<Flat>, nodes: u64) -> Self {
        let cfg = PlaneConfiguration::new(planes).expect("cover planes are distinct").canonical();
        let assignment = gamma
            .iter()
            .map(|p| cfg.planes().iter().position(|f| f.contains(p)).expect("cover is sound"))
            .collect();
        CoverResult {
            found: true,
            dim: cfg.dim(),
            length: cfg.length(),
            config: Some(cfg),
            nodes_explored: nodes,
            proof_of_minimality: false,
            assignment,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cover result serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct CoverWire {
    found: bool,
    config: Option<PlaneConfiguration>,
    dim: usize,
    length: usize,
    nodes_explored: u64,
    proof_of_minimality: bool,
    assignment: Vec<usize>,
}

impl Serialize for CoverResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoverWire {
            found: self.found,
            config: self.config.clone(),
            dim: self.dim,
            length: self.length,
            nodes_explored: self.nodes_explored,
            proof_of_minimality: self.proof_of_minimality,
            assignment: self.assignment.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoverResult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CoverWire::deserialize(d)?;
        Ok(CoverResult {
            found: w.found,
            config: w.config,
            dim: w.dim,
            length: w.length,
            nodes_explored: w.nodes_explored,
            proof_of_minimality: w.proof_of_minimality,
            assignment: w.assignment,
        })
    }
}

/// Candidate generation and cover queries for one point set. Candidate levels
/// are built lazily and shared between queries.
pub struct CoverSearch<'a> {
    gamma: &'a PointSet,
    full: Mask,
    /// `levels[k]` holds the candidates of dimension `k + 1`.
    levels: Vec<Vec<Candidate>>,
    budget: u64,
}

impl<'a> CoverSearch<'a> {
    pub fn new(gamma: &'a PointSet) -> Result<Self> {
        if gamma.len() > MAX_POINTS {
            return Err(Error::InvalidParams(format!(
                "cover search supports at most {MAX_POINTS} points, got {}",
                gamma.len()
            )));
        }
        let full = if gamma.len() == 64 { !0 } else { (1u64 << gamma.len()) - 1 };
        Ok(CoverSearch {
            gamma,
            full,
            levels: Vec::new(),
            budget: DEFAULT_NODE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn build_levels(&mut self, max_dim: usize) {
        let max_dim = max_dim.min(self.gamma.ambient_dim());
        let pts = self.gamma.points();
        while self.levels.len() < max_dim {
            let next_dim = self.levels.len() + 1;
            let mut found: HashMap<Mask, Flat> = HashMap::new();
            if next_dim == 1 {
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        let pair: Mask = (1 << i) | (1 << j);
                        if found.keys().any(|&m| m & pair == pair) {
                            continue;
                        }
                        let l = span([&pts[i], &pts[j]]).expect("distinct points");
                        let mask = incident_mask(&l, self.gamma, pair);
                        found.insert(mask, l);
                    }
                }
            } else {
                let prev = &self.levels[next_dim - 2];
                for c in prev {
                    for (x, p) in pts.iter().enumerate() {
                        if c.mask >> x & 1 == 1 {
                            continue;
                        }
                        let seed = c.mask | 1 << x;
                        if found.keys().any(|&m| m & seed == seed) {
                            continue;
                        }
                        let f = span([Generator::Flat(&c.flat), p.into()]).expect("nonempty");
                        let mask = incident_mask(&f, self.gamma, seed);
                        found.insert(mask, f);
                    }
                }
            }
            let mut level: Vec<Candidate> = found.into_iter().map(|(mask, flat)| Candidate { flat, mask }).collect();
            level.sort_by(|a, b| a.flat.cmp(&b.flat));
            let done = level.is_empty();
            self.levels.push(level);
            if done {
                break;
            }
        }
    }

    /// Distinct flats of dimension `1..=max_dim` spanned by points of Γ, in canonical order.
    pub fn candidates(&mut self, max_dim: usize) -> Vec<Candidate> {
        self.build_levels(max_dim);
        self.levels.iter().take(max_dim).flatten().cloned().collect()
    }

    /// A cover of dimension at most `d` by at most `max_length` planes, if one exists.
    pub fn exists(&mut self, d: usize, max_length: usize) -> Result<CoverResult> {
        if self.gamma.is_empty() {
            // The empty configuration; there is no plane to report.
            return Ok(CoverResult {
                found: true,
                config: None,
                dim: 0,
                length: 0,
                nodes_explored: 0,
                proof_of_minimality: true,
                assignment: Vec::new(),
            });
        }
        let n = self.gamma.ambient_dim();
        if d == 0 || max_length == 0 || n == 0 {
            return Ok(CoverResult::not_found(0));
        }
        if self.gamma.len() == 1 {
            return Ok(CoverResult::found(self.gamma, vec![line_through(&self.gamma.points()[0])], 1));
        }
        self.build_levels(d);
        let cands: Vec<&Candidate> = self.levels.iter().take(d).flatten().collect();
        let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); self.gamma.len()];
        for (ci, c) in cands.iter().enumerate() {
            for x in c.points() {
                by_point[x].push(ci);
            }
        }
        let mut state = Dfs {
            cands: &cands,
            by_point: &by_point,
            full: self.full,
            failed: HashSet::new(),
            nodes: 0,
            budget: self.budget,
            chosen: Vec::new(),
        };
        if state.search(0, d, max_length)? {
            let planes = state.chosen.iter().map(|&ci| cands[ci].flat.clone()).collect();
            Ok(CoverResult::found(self.gamma, planes, state.nodes))
        } else {
            Ok(CoverResult::not_found(state.nodes))
        }
    }

    /// Lexicographically smallest `(dim, length)` cover.
    pub fn minimal(&mut self) -> Result<CoverResult> {
        if self.gamma.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut nodes = 0;
        for d in 1..=self.gamma.ambient_dim() {
            let at_d = self.exists(d, d)?;
            nodes += at_d.nodes_explored;
            if !at_d.found {
                continue;
            }
            for len in 1..=d {
                let mut res = self.exists(d, len)?;
                nodes += res.nodes_explored;
                if res.found {
                    res.nodes_explored = nodes;
                    res.proof_of_minimality = true;
                    return Ok(res);
                }
            }
        }
        let mut res = CoverResult::not_found(nodes);
        res.proof_of_minimality = true;
        Ok(res)
    }
}

struct Dfs<'c> {
    cands: &'c [&'c Candidate],
    by_point: &'c [Vec<usize>],
    full: Mask,
    failed: HashSet<(Mask, usize, usize)>,
    nodes: u64,
    budget: u64,
    chosen: Vec<usize>,
}

impl Dfs<'_> {
    fn search(&mut self, covered: Mask, dim_left: usize, len_left: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.nodes - 1));
        }
        if covered == self.full {
            return Ok(true);
        }
        if dim_left == 0 || len_left == 0 || self.failed.contains(&(covered, dim_left, len_left)) {
            return Ok(false);
        }
        let uncovered = self.full & !covered;
        let need = uncovered.count_ones() as usize;

        // Each plane costs at least one dimension; bound the points the remaining
        // budget could still cover.
        let mut best_single = 0usize;
        let mut best_ratio = 0f64;
        for c in self.cands.iter().filter(|c| c.dim() <= dim_left) {
            let gain = (c.mask & uncovered).count_ones() as usize;
            best_single = best_single.max(gain);
            best_ratio = best_ratio.max(gain as f64 / c.dim() as f64);
        }
        let by_length = best_single * len_left;
        let by_dim = (best_ratio * dim_left as f64 + 1e-9).floor() as usize;
        if by_length.min(by_dim) < need {
            self.failed.insert((covered, dim_left, len_left));
            return Ok(false);
        }

        let mut pivot = None;
        let mut fewest = usize::MAX;
        for x in (0..self.by_point.len()).filter(|&x| uncovered >> x & 1 == 1) {
            let count = self.by_point[x]
                .iter()
                .filter(|&&ci| self.cands[ci].dim() <= dim_left)
                .count();
            if count < fewest {
                fewest = count;
                pivot = Some(x);
            }
        }
        let pivot = pivot.expect("something is uncovered");
        for k in 0..self.by_point[pivot].len() {
            let ci = self.by_point[pivot][k];
            let c = self.cands[ci];
            if c.dim() > dim_left {
                continue;
            }
            self.chosen.push(ci);
            if self.search(covered | c.mask, dim_left - c.dim(), len_left - 1)? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        self.failed.insert((covered, dim_left, len_left));
        Ok(false)
    }
}

/// The line through `p` and the first coordinate point different from it.
fn line_through(p: &ProjPoint) -> Flat {
    let field: FieldSpec = p.field();
    let n = p.ambient_dim();
    (0..=n)
        .rev()
        .map(|j| {
            let e: Vec<_> = (0..=n).map(|i| if i == j { field.one() } else { field.zero() }).collect();
            ProjPoint::new(e).expect("coordinate point")
        })
        .find(|e| e != p)
        .map(|e| span([p, &e]).expect("two distinct points"))
        .expect("P^n has at least two coordinate points for n >= 1")
}

pub fn candidate_flats(gamma: &PointSet, max_dim: usize) -> Result<Vec<Candidate>> {
    Ok(CoverSearch::new(gamma)?.candidates(max_dim))
}

pub fn exists_cover(gamma: &PointSet, d: usize, max_length: usize) -> Result<CoverResult> {
    CoverSearch::new(gamma)?.exists(d, max_length)
}

pub fn exists_cover_with_budget(gamma: &PointSet, d: usize, max_length: usize, budget: u64) -> Result<CoverResult> {
    CoverSearch::new(gamma)?.with_budget(budget).exists(d, max_length)
}

pub fn min_cover(gamma: &PointSet) -> Result<CoverResult> {
    CoverSearch::new(gamma)?.minimal()
}

pub fn min_cover_with_budget(gamma: &PointSet, budget: u64) -> Result<CoverResult> {
    CoverSearch::new(gamma)?.with_budget(budget).minimal()
}

/// Every point lies on some plane of `cfg`.
pub fn verify_cover(gamma: &PointSet, cfg: &PlaneConfiguration) -> bool {
    if gamma.is_empty() {
        return true;
    }
    if cfg.field() != gamma.field() || cfg.ambient_dim() != gamma.ambient_dim() {
        return false;
    }
    gamma.iter().all(|p| cfg.contains(p))
}

/// Which alternative of the balancing dichotomy a skew cover with populated
/// planes falls into, for a CB(r) set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balancing {
    /// Every plane holds at least `max(length, r + 2)` points.
    AllPlanesHeavy,
    /// Some plane holds fewer than `length` points and `length >= r + 2`.
    ShortPlaneLongConfiguration,
    /// Neither alternative holds.
    Violated,
    /// The configuration is not skew or some plane holds no point.
    NotApplicable,
}

pub fn balancing_case(gamma: &PointSet, cfg: &PlaneConfiguration, r: u32) -> Balancing {
    if !cfg.is_skew() {
        return Balancing::NotApplicable;
    }
    let counts: Vec<usize> = cfg.planes().iter().map(|f| f.incident(gamma).len()).collect();
    if counts.contains(&0) {
        return Balancing::NotApplicable;
    }
    let len = cfg.length();
    let r2 = r as usize + 2;
    if counts.iter().all(|&c| c >= len.max(r2)) {
        Balancing::AllPlanesHeavy
    } else if counts.iter().any(|&c| c < len) && len >= r2 {
        Balancing::ShortPlaneLongConfiguration
    } else {
        Balancing::Violated
    }
}
