//! Seeded verification campaigns.
//!
//! Randomized targets draw point sets from the example families, keep the
//! draws that satisfy CB(r) (counting the rest as discarded) and check a
//! property on each. Exhaustive targets enumerate every subset of P^n over a
//! small prime field. Trials run in parallel; records come back in trial order
//! and every per-trial seed is derived from the campaign seed, so the same
//! spec always yields the same report apart from `elapsed_ms` fields.
//!
//! Violations found over a finite field are flagged as needing a
//! characteristic-0 lift. They are evidence, not refutations.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cb::{cb_failures, excise};
use crate::cover::{balancing_case, Balancing, CoverResult, CoverSearch, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::forms::binomial;
use crate::generators::{Family, GenSpec, Piece, MAX_ENUMERATION_PRIME};
use crate::matroid::{exists_flat_cover, is_mcb, Matroid, McbMode};
use crate::projective::{all_points, Flat, PlaneConfiguration, PointSet};

pub const CHAR0_CAVEAT: &str =
    "needs characteristic-0 lift: a violation over a finite field does not refute a statement over characteristic 0";
/// Draws per trial before a trial is skipped for want of a CB(r) set.
pub const MAX_DRAWS: usize = 64;
/// Matroid checks use point sets of at most this size.
pub const MCB_MAX_POINTS: usize = 12;
const MAX_LISTED_WITNESSES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Conjecture,
    Excision,
    LowerBoundExhaustive,
    Tightness,
    Balancing,
    McbAnalog,
    CounterexampleSearch,
    Monotonicity,
}

fn default_budget() -> u64 {
    DEFAULT_NODE_BUDGET
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub target: Target,
    /// Configuration dimensions to test.
    pub d: Vec<usize>,
    pub r: Vec<u32>,
    pub field: FieldSpec,
    /// Trials per `(d, r)` pair (randomized targets).
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub node_budget: u64,
    /// Ambient dimension (exhaustive targets).
    #[serde(default)]
    pub ambient: Option<usize>,
    /// Largest subset enumerated (counterexample search).
    #[serde(default)]
    pub size_cap: Option<usize>,
    /// Extra point sets checked by the counterexample search.
    #[serde(default)]
    pub inject: Vec<GenSpec>,
}

impl CampaignSpec {
    pub fn new(target: Target, d: Vec<usize>, r: Vec<u32>, field: FieldSpec, trials: usize, seed: u64) -> Self {
        CampaignSpec {
            target,
            d,
            r,
            field,
            trials,
            seed,
            node_budget: DEFAULT_NODE_BUDGET,
            ambient: None,
            size_cap: None,
            inject: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.r.is_empty() {
            return bad("r range is empty");
        }
        match self.target {
            Target::LowerBoundExhaustive | Target::CounterexampleSearch => {
                if self.ambient.is_none() {
                    return bad("exhaustive targets need an ambient dimension");
                }
                if self.field.modulus().is_none() {
                    return bad("exhaustive targets need a prime field");
                }
                if self.target == Target::CounterexampleSearch && (self.d.is_empty() || self.size_cap.is_none()) {
                    return bad("counterexample search needs d and size_cap");
                }
            }
            _ => {
                if self.d.is_empty() {
                    return bad("d range is empty");
                }
                if self.trials == 0 {
                    return bad("trials must be at least 1");
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Violation,
    /// A CB(r) set above the size bound with no cover: shows the bound is sharp.
    Witness,
    BudgetExceeded,
    /// No CB(r) draw was obtained.
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSummary {
    pub dim: usize,
    pub length: usize,
}

impl From<&CoverResult> for CoverSummary {
    fn from(c: &CoverResult) -> Self {
        CoverSummary {
            dim: c.dim,
            length: c.length,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub target: Target,
    pub d: usize,
    pub r: u32,
    pub seed: Option<u64>,
    pub gen: Option<GenSpec>,
    pub certificate: Option<String>,
    /// Draws rejected before this one (not CB(r), or a generator gave up).
    pub discarded: usize,
    pub points: Option<PointSet>,
    /// The excising configuration, for the excision target.
    pub config: Option<PlaneConfiguration>,
    pub verdicts: BTreeMap<String, bool>,
    pub cover: Option<CoverSummary>,
    /// Tallies for exhaustive runs.
    pub counts: BTreeMap<String, u64>,
    pub outcome: Outcome,
    pub detail: Option<String>,
    pub elapsed_ms: f64,
}

impl TrialRecord {
    fn new(index: usize, target: Target, d: usize, r: u32) -> Self {
        TrialRecord {
            index,
            target,
            d,
            r,
            seed: None,
            gen: None,
            certificate: None,
            discarded: 0,
            points: None,
            config: None,
            verdicts: BTreeMap::new(),
            cover: None,
            counts: BTreeMap::new(),
            outcome: Outcome::Pass,
            detail: None,
            elapsed_ms: 0.0,
        }
    }
}

/// Everything needed to re-check a violating point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub record: usize,
    pub target: Target,
    pub d: usize,
    pub r: u32,
    pub points: PointSet,
    pub config: Option<PlaneConfiguration>,
    pub verdicts: BTreeMap<String, bool>,
    pub detail: Option<String>,
    pub needs_characteristic_zero_lift: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub passed: usize,
    pub violations: usize,
    pub witnesses: usize,
    pub budget_exceeded: usize,
    pub skipped: usize,
    pub discarded_draws: usize,
    pub family_mix: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub spec: CampaignSpec,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
    pub violations: Vec<Violation>,
    /// CB(r) sets above the size bound without a cover (counterexample search).
    pub witnesses: Vec<Violation>,
    pub caveat: Option<String>,
    pub elapsed_ms: f64,
}

impl CampaignReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// JSON with every `elapsed_ms` field removed, for comparing runs.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        strip_timings(&mut v);
        serde_json::to_string(&v).expect("value serializes")
    }
}

pub fn strip_timings(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timings);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a sub-task, mixed from the campaign seed and a path of indices.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Largest |Γ| allowed by the conjectured bound.
pub fn size_bound(d: usize, r: u32) -> usize {
    (d + 1) * r as usize + 1
}

fn is_cb(points: &PointSet, r: u32) -> bool {
    cb_failures(points, r).is_empty()
}

/// Smallest `m` for which `m` points of the piece are CB(r).
fn piece_min(p: Piece, r: u32) -> usize {
    let r = r as usize;
    if r == 0 {
        return 1;
    }
    match p {
        Piece::Rnc { k, .. } => k * r + 2,
        Piece::General { k, .. } => binomial((k + r) as u64, r as u64) as usize + 1,
    }
}

fn with_m(p: Piece, m: usize) -> Piece {
    match p {
        Piece::Rnc { k, .. } => Piece::Rnc { k, m },
        Piece::General { k, .. } => Piece::General { k, m },
    }
}

/// Spreads `extra` points over `mins` at random.
fn distribute(mins: &[usize], extra: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut out = mins.to_vec();
    for _ in 0..extra {
        let i = rng.gen_range(0..out.len());
        out[i] += 1;
    }
    out
}

#[derive(Clone, Copy, Debug)]
enum Template {
    Rnc,
    General,
    SkewLines,
    SplitUnion,
    PlaneCi,
    Elliptic,
    TwoPlanes,
}

/// A family whose general members are CB(r), fit in a `d`-dimensional
/// configuration and have at most `cap` points.
fn draw_family(d: usize, r: u32, field: FieldSpec, cap: usize, rng: &mut ChaCha8Rng) -> Option<Family> {
    let mut templates = [
        Template::Rnc,
        Template::General,
        Template::SkewLines,
        Template::SplitUnion,
        Template::PlaneCi,
        Template::Elliptic,
        Template::TwoPlanes,
    ];
    templates.shuffle(rng);
    let q = field.size().map(|q| q as usize).unwrap_or(usize::MAX / 4);
    let enumerable = field.modulus().is_some_and(|p| p <= MAX_ENUMERATION_PRIME);
    let ru = r as usize;
    for t in templates {
        let fam = match t {
            Template::Rnc => {
                let ks: Vec<usize> = (1..=d).filter(|&k| piece_min(Piece::Rnc { k, m: 0 }, r) <= cap.min(q + 1)).collect();
                ks.choose(rng).map(|&k| {
                    let lo = piece_min(Piece::Rnc { k, m: 0 }, r);
                    Family::Rnc {
                        k,
                        m: rng.gen_range(lo..=cap.min(q + 1)),
                    }
                })
            }
            Template::General => {
                let ks: Vec<usize> = (1..=d).filter(|&k| piece_min(Piece::General { k, m: 0 }, r) <= cap).collect();
                ks.choose(rng).map(|&k| {
                    let lo = piece_min(Piece::General { k, m: 0 }, r);
                    Family::SplitUnion {
                        pieces: vec![Piece::General {
                            k,
                            m: rng.gen_range(lo..=cap),
                        }],
                    }
                })
            }
            Template::SkewLines => {
                let js: Vec<usize> = (2..=d).filter(|&j| j * (ru + 2) <= cap && ru + 2 <= q + 1).collect();
                js.choose(rng).and_then(|&j| {
                    let mins = vec![ru + 2; j];
                    let room = (cap - j * (ru + 2)).min(j * (q + 1 - (ru + 2)));
                    let counts = distribute(&mins, rng.gen_range(0..=room), rng);
                    (counts.iter().all(|&c| c <= q + 1)).then_some(Family::SkewLines { d: j, counts })
                })
            }
            Template::SplitUnion => (0..8).find_map(|_| {
                if d < 2 {
                    return None;
                }
                let len = rng.gen_range(2..=d);
                let total = rng.gen_range(len..=d);
                let mut dims = vec![1; len];
                for _ in len..total {
                    let i = rng.gen_range(0..len);
                    dims[i] += 1;
                }
                let pieces: Vec<Piece> = dims
                    .iter()
                    .map(|&k| {
                        if rng.gen_bool(0.5) {
                            Piece::Rnc { k, m: 0 }
                        } else {
                            Piece::General { k, m: 0 }
                        }
                    })
                    .collect();
                let mins: Vec<usize> = pieces.iter().map(|&p| piece_min(p, r)).collect();
                let need: usize = mins.iter().sum();
                if need > cap || mins.iter().any(|&m| m > q + 1) {
                    return None;
                }
                let counts = distribute(&mins, rng.gen_range(0..=cap - need), rng);
                if counts.iter().any(|&m| m > q + 1) {
                    return None;
                }
                Some(Family::SplitUnion {
                    pieces: pieces.iter().zip(counts).map(|(&p, m)| with_m(p, m)).collect(),
                })
            }),
            Template::PlaneCi => {
                let opts: Vec<(u32, u32)> = if d >= 2 && enumerable {
                    (1..=4u32)
                        .flat_map(|a| (a..=4u32).map(move |b| (a, b)))
                        .filter(|&(a, b)| {
                            a + b >= 3 && a + b - 3 >= r && ((a * b) as usize) <= cap && ((a * b) as usize) < q + 1
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                opts.choose(rng).map(|&(a, b)| Family::PlaneCurveCi { deg_d: a, deg_e: b })
            }
            Template::Elliptic => {
                let lo = 4 * ru + 1;
                let hi = cap.min(q + 1 - (2.0 * (q as f64).sqrt()).ceil() as usize);
                (d >= 3 && enumerable && lo <= hi).then(|| Family::EllipticQuartic {
                    m: rng.gen_range(lo..=hi),
                })
            }
            Template::TwoPlanes => {
                let lo = 2 * ru + 2;
                (d >= 4 && 2 * lo <= cap && lo <= q + 1).then(|| Family::TwoPlaneConics {
                    points_per_conic: rng.gen_range(lo..=(cap / 2).min(q + 1)),
                })
            }
        };
        if fam.is_some() {
            return fam;
        }
    }
    None
}

struct Draw {
    spec: GenSpec,
    points: PointSet,
    certificate: String,
    discarded: usize,
}

/// First CB(r) draw from the family mix, or the number of rejected draws.
fn draw_cb_set(d: usize, r: u32, field: FieldSpec, cap: usize, seed: u64) -> std::result::Result<Draw, usize> {
    let mut discarded = 0;
    for attempt in 0..MAX_DRAWS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[attempt as u64]));
        let Some(family) = draw_family(d, r, field, cap, &mut rng) else {
            return Err(discarded);
        };
        let spec = GenSpec::new(family, field, rng.gen());
        match spec.generate() {
            Ok(g) if g.points.len() <= cap && is_cb(&g.points, r) => {
                return Ok(Draw {
                    spec,
                    points: g.points,
                    certificate: g.certificate,
                    discarded,
                })
            }
            _ => discarded += 1,
        }
    }
    Err(discarded)
}

/// A random configuration of `len` planes, each through some points of Γ.
fn random_configuration(gamma: &PointSet, len: usize, rng: &mut ChaCha8Rng) -> Option<PlaneConfiguration> {
    let n = gamma.ambient_dim();
    let field = gamma.field();
    if n < 1 || gamma.is_empty() {
        return None;
    }
    let len = if n == 1 { 1 } else { len };
    for _ in 0..32 {
        let mut planes: Vec<Flat> = Vec::new();
        for _ in 0..64 * len {
            if planes.len() == len {
                break;
            }
            // In P^1 the only plane is the whole line.
            let k = if n == 1 { 1 } else { rng.gen_range(1..n) };
            let through = rng.gen_range(1..=(k + 1).min(gamma.len()));
            let mut vecs: Vec<Vec<Scalar>> = rand::seq::index::sample(rng, gamma.len(), through)
                .into_iter()
                .map(|i| gamma.points()[i].coords().to_vec())
                .collect();
            let mut tries = 0;
            while crate::linalg::rank(field, n + 1, &vecs) < k + 1 && tries < 64 {
                tries += 1;
                let v: Vec<Scalar> = (0..=n)
                    .map(|_| match field.modulus() {
                        Some(p) => field.from_u64(rng.gen_range(0..p as u64)),
                        None => field.from_i64(rng.gen_range(-5..=5)),
                    })
                    .collect();
                vecs.push(v);
                if crate::linalg::rank(field, n + 1, &vecs) < vecs.len() {
                    vecs.pop();
                }
            }
            match Flat::from_vectors(field, n, &vecs) {
                Ok(f) if f.dim() == k && !planes.contains(&f) => planes.push(f),
                _ => {}
            }
        }
        if planes.is_empty() {
            continue;
        }
        if let Ok(cfg) = PlaneConfiguration::new(planes) {
            return Some(cfg);
        }
    }
    None
}

struct Evaluation {
    verdicts: BTreeMap<String, bool>,
    cover: Option<CoverSummary>,
    outcome: Outcome,
    detail: Option<String>,
}

fn budget_hit(verdicts: BTreeMap<String, bool>, e: Error) -> Evaluation {
    Evaluation {
        verdicts,
        cover: None,
        outcome: Outcome::BudgetExceeded,
        detail: Some(e.to_string()),
    }
}

/// Which length the main theorem promises for a CB(r) set with a `d`-dimensional cover.
fn promised_length(d: usize, r: u32) -> Option<usize> {
    if r <= 2 {
        Some(1)
    } else if (d <= 3 && r <= 4) || (d, r) == (4, 3) {
        Some(2)
    } else {
        None
    }
}

/// Recomputes every verdict of a randomized target from the point set alone.
fn evaluate(
    target: Target,
    d: usize,
    r: u32,
    points: &PointSet,
    config: Option<&PlaneConfiguration>,
    budget: u64,
) -> Result<Evaluation> {
    let mut v = BTreeMap::new();
    let cb = is_cb(points, r);
    v.insert("cb".to_string(), cb);
    let mut detail = None;
    let mut cover = None;
    let ok = |v: BTreeMap<String, bool>, pass: bool, cover, detail| Evaluation {
        verdicts: v,
        cover,
        outcome: if pass { Outcome::Pass } else { Outcome::Violation },
        detail,
    };
    Ok(match target {
        Target::Conjecture | Target::CounterexampleSearch => {
            if !cb {
                return Ok(ok(v, true, None, Some("not CB(r)".into())));
            }
            let mut search = CoverSearch::new(points)?.with_budget(budget);
            let found = match search.exists(d, d) {
                Ok(c) => c,
                Err(e @ Error::BudgetExceeded(_)) => return Ok(budget_hit(v, e)),
                Err(e) => return Err(e),
            };
            v.insert("cover".into(), found.found);
            let mut pass = found.found;
            if found.found {
                cover = Some(CoverSummary::from(&found));
            }
            if let (true, Target::Conjecture, Some(len)) = (found.found, target, promised_length(d, r)) {
                let short = match search.exists(d, len) {
                    Ok(c) => c,
                    Err(e @ Error::BudgetExceeded(_)) => return Ok(budget_hit(v, e)),
                    Err(e) => return Err(e),
                };
                v.insert(format!("length_le_{len}"), short.found);
                pass &= short.found;
                if short.found {
                    cover = Some(CoverSummary::from(&short));
                }
            }
            if target == Target::CounterexampleSearch && !found.found && points.len() > size_bound(d, r) {
                return Ok(Evaluation {
                    verdicts: v,
                    cover,
                    outcome: Outcome::Witness,
                    detail: Some("CB(r) above the size bound with no cover".into()),
                });
            }
            ok(v, pass, cover, detail)
        }
        Target::Tightness => {
            let found = match CoverSearch::new(points)?.with_budget(budget).exists(d, d) {
                Ok(c) => c,
                Err(e @ Error::BudgetExceeded(_)) => return Ok(budget_hit(v, e)),
                Err(e) => return Err(e),
            };
            v.insert("cover".into(), found.found);
            v.insert("exhaustive".into(), found.proof_of_minimality);
            ok(v, cb && !found.found && found.proof_of_minimality, None, detail)
        }
        Target::Excision => {
            let cfg = config.ok_or_else(|| Error::InvalidParams("excision needs a configuration".into()))?;
            let len = cfg.length() as u32;
            let rest = excise(points, cfg);
            let kept = is_cb(&rest, r.saturating_sub(len));
            v.insert("excised_cb".into(), kept);
            detail = Some(format!("removed {} of {} points with {} planes", points.len() - rest.len(), points.len(), len));
            ok(v, !cb || kept, None, detail)
        }
        Target::Monotonicity => {
            let lower = r == 0 || is_cb(points, r - 1);
            v.insert("cb_r_minus_1".into(), lower);
            ok(v, !cb || lower, None, detail)
        }
        Target::Balancing => {
            let min = match CoverSearch::new(points)?.with_budget(budget).minimal() {
                Ok(c) => c,
                Err(e @ Error::BudgetExceeded(_)) => return Ok(budget_hit(v, e)),
                Err(e) => return Err(e),
            };
            let cfg = min.config.clone().expect("nonempty sets have a minimal cover");
            cover = Some(CoverSummary::from(&min));
            let case = balancing_case(points, &cfg, r);
            v.insert("skew".into(), cfg.is_skew());
            let mut pass = case != Balancing::Violated;
            v.insert("balancing".into(), pass);
            // Length bound for skew covers when 1 <= r/(d-1) <= 2.
            if d >= 2 && cfg.is_skew() && cfg.dim() <= d {
                let q = d as u32 - 1;
                if q <= r && r <= 2 * q {
                    let short = cfg.length() < d;
                    v.insert("length_le_d_minus_1".into(), short);
                    pass &= short;
                }
            }
            detail = Some(format!("{case:?}"));
            ok(v, !cb || pass, cover, detail)
        }
        Target::McbAnalog => {
            let m = Matroid::from_points(points)?;
            // MCB(0) is not defined; CB(0) holds for every set.
            let mcb = r == 0 || is_mcb(&m, r as usize, McbMode::AllFlats)?.verdict;
            if r > 0 {
                v.insert("mcb".into(), mcb);
            }
            let min = match CoverSearch::new(points)?.with_budget(budget).minimal() {
                Ok(c) => c,
                Err(e @ Error::BudgetExceeded(_)) => return Ok(budget_hit(v, e)),
                Err(e) => return Err(e),
            };
            let cfg = min.config.clone().expect("nonempty sets have a minimal cover");
            cover = Some(CoverSummary::from(&min));
            // Each plane's trace on Γ is a flat of rank dim + 1 (planes are spans of their points).
            let traces_ok = cfg.planes().iter().all(|p| {
                let trace: u32 = p.incident(points).iter().fold(0, |a, &i| a | 1 << i);
                m.is_flat(trace) && m.rank(trace) <= p.dim() + 1
            });
            let dims: Vec<usize> = cfg.planes().iter().map(|p| p.dim()).collect();
            let flat_cover = points.len() == 1 || exists_flat_cover(&m, &dims)?.is_some();
            v.insert("traces_are_flats".into(), traces_ok);
            v.insert("flat_cover".into(), flat_cover);
            ok(v, !cb || (mcb && traces_ok && flat_cover), cover, detail)
        }
        Target::LowerBoundExhaustive => ok(v, points.is_empty() || r == 0 || !cb, None, None),
    })
}

/// Runs one campaign. Per-trial budget overruns are recorded, never fatal;
/// exhaustive targets fail with [`Error::BudgetExceeded`] when the
/// enumeration itself is larger than the node budget.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignReport> {
    spec.validate()?;
    let start = Instant::now();
    let (records, violations, witnesses) = match spec.target {
        Target::LowerBoundExhaustive => run_lower_bound(spec)?,
        Target::CounterexampleSearch => run_counterexample(spec)?,
        _ => run_randomized(spec)?,
    };
    let mut summary = Summary {
        trials: records.len(),
        ..Summary::default()
    };
    for rec in &records {
        match rec.outcome {
            Outcome::Pass => summary.passed += 1,
            Outcome::Violation => summary.violations += 1,
            Outcome::Witness => summary.witnesses += 1,
            Outcome::BudgetExceeded => summary.budget_exceeded += 1,
            Outcome::Skipped => summary.skipped += 1,
        }
        summary.discarded_draws += rec.discarded;
        if let Some(g) = &rec.gen {
            *summary.family_mix.entry(g.family.name().to_string()).or_default() += 1;
        }
    }
    // Exhaustive records hold tallies; count their violations individually.
    if matches!(spec.target, Target::LowerBoundExhaustive | Target::CounterexampleSearch) {
        summary.violations = violations.len();
        summary.witnesses = witnesses.len().max(summary.witnesses);
    }
    let caveat = (spec.field.modulus().is_some() && !violations.is_empty()).then(|| CHAR0_CAVEAT.to_string());
    Ok(CampaignReport {
        spec: spec.clone(),
        records,
        summary,
        violations,
        witnesses,
        caveat,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

type Runs = (Vec<TrialRecord>, Vec<Violation>, Vec<Violation>);

fn violation_of(rec: &TrialRecord, field: FieldSpec) -> Option<Violation> {
    Some(Violation {
        record: rec.index,
        target: rec.target,
        d: rec.d,
        r: rec.r,
        points: rec.points.clone()?,
        config: rec.config.clone(),
        verdicts: rec.verdicts.clone(),
        detail: rec.detail.clone(),
        needs_characteristic_zero_lift: field.modulus().is_some(),
    })
}

fn run_randomized(spec: &CampaignSpec) -> Result<Runs> {
    let mut jobs = Vec::new();
    for &d in &spec.d {
        for &r in &spec.r {
            for t in 0..spec.trials {
                jobs.push((d, r, t));
            }
        }
    }
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(d, r, t))| run_trial(spec, index, d, r, t))
        .collect::<Result<_>>()?;
    let violations = records
        .iter()
        .filter(|r| r.outcome == Outcome::Violation)
        .filter_map(|r| violation_of(r, spec.field))
        .collect();
    Ok((records, violations, Vec::new()))
}

fn run_trial(spec: &CampaignSpec, index: usize, d: usize, r: u32, t: usize) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = derive_seed(spec.seed, &[d as u64, r as u64, t as u64]);
    let mut rec = TrialRecord::new(index, spec.target, d, r);
    rec.seed = Some(seed);
    if spec.target == Target::Tightness && r < 2 {
        // d+3 points pair off onto lines of total dimension d once d >= 2.
        rec.outcome = Outcome::Skipped;
        rec.detail = Some("the rational normal curve example needs r >= 2".into());
        rec.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        return Ok(rec);
    }
    let draw = if spec.target == Target::Tightness {
        let gen = GenSpec::new(
            Family::Rnc {
                k: d + 1,
                m: size_bound(d, r) + 1,
            },
            spec.field,
            seed,
        );
        let g = gen.generate()?;
        Ok(Draw {
            spec: gen,
            points: g.points,
            certificate: g.certificate,
            discarded: 0,
        })
    } else {
        let cap = match spec.target {
            Target::McbAnalog => size_bound(d, r).min(MCB_MAX_POINTS),
            _ => size_bound(d, r),
        };
        draw_cb_set(d, r, spec.field, cap, seed)
    };
    let draw = match draw {
        Ok(draw) => draw,
        Err(discarded) => {
            rec.discarded = discarded;
            rec.outcome = Outcome::Skipped;
            rec.detail = Some("no CB(r) draw from the family mix".into());
            rec.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            return Ok(rec);
        }
    };
    if spec.target == Target::Excision && r >= 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[u64::MAX]));
        let len = rng.gen_range(1..=r as usize);
        rec.config = random_configuration(&draw.points, len, &mut rng);
    }
    let eval = if spec.target == Target::Excision && rec.config.is_none() {
        Evaluation {
            verdicts: BTreeMap::from([("cb".to_string(), true)]),
            cover: None,
            outcome: Outcome::Skipped,
            detail: Some("no configuration could be drawn".into()),
        }
    } else {
        evaluate(spec.target, d, r, &draw.points, rec.config.as_ref(), spec.node_budget)?
    };
    rec.gen = Some(draw.spec);
    rec.certificate = Some(draw.certificate);
    rec.discarded = draw.discarded;
    rec.points = Some(draw.points);
    rec.verdicts = eval.verdicts;
    rec.cover = eval.cover;
    rec.outcome = eval.outcome;
    rec.detail = eval.detail;
    rec.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(rec)
}

/// Index subsets of `0..n` of size `k` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn enumeration_size(points: usize, max_size: usize) -> u64 {
    (1..=max_size).map(|s| binomial(points as u64, s as u64)).sum()
}

fn space(spec: &CampaignSpec) -> Result<PointSet> {
    let n = spec.ambient.expect("validated");
    PointSet::new(spec.field, n, all_points(spec.field, n)?)
}

fn run_lower_bound(spec: &CampaignSpec) -> Result<Runs> {
    let all = space(spec)?;
    let mut records = Vec::new();
    let mut violations = Vec::new();
    let max_r = spec.r.iter().copied().max().unwrap_or(0) as usize;
    if enumeration_size(all.len(), max_r + 1) > spec.node_budget {
        return Err(Error::BudgetExceeded(spec.node_budget));
    }
    for &r in &spec.r {
        if r == 0 {
            let mut rec = TrialRecord::new(records.len(), spec.target, 0, 0);
            rec.detail = Some("vacuous: the bound is asserted for r >= 1".into());
            records.push(rec);
            continue;
        }
        for size in 1..=r as usize + 1 {
            let start = Instant::now();
            let subsets = combinations(all.len(), size);
            let cb: Vec<&Vec<usize>> = subsets
                .par_iter()
                .filter(|s| is_cb(&all.subset(s), r))
                .collect::<Vec<_>>();
            let mut rec = TrialRecord::new(records.len(), spec.target, 0, r);
            rec.counts.insert("size".into(), size as u64);
            rec.counts.insert("subsets".into(), subsets.len() as u64);
            rec.counts.insert("cb".into(), cb.len() as u64);
            rec.outcome = if cb.is_empty() { Outcome::Pass } else { Outcome::Violation };
            for s in cb {
                let points = all.subset(s);
                violations.push(Violation {
                    record: rec.index,
                    target: spec.target,
                    d: 0,
                    r,
                    verdicts: BTreeMap::from([("cb".to_string(), true)]),
                    points,
                    config: None,
                    detail: Some(format!("nonempty CB({r}) set of size {size} <= r+1")),
                    needs_characteristic_zero_lift: true,
                });
            }
            rec.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            records.push(rec);
        }
    }
    Ok((records, violations, Vec::new()))
}

fn run_counterexample(spec: &CampaignSpec) -> Result<Runs> {
    let all = space(spec)?;
    let cap = spec.size_cap.expect("validated");
    if enumeration_size(all.len(), cap) > spec.node_budget {
        return Err(Error::BudgetExceeded(spec.node_budget));
    }
    let mut records = Vec::new();
    let mut violations = Vec::new();
    let mut witnesses = Vec::new();
    for &d in &spec.d {
        for &r in &spec.r {
            for size in 1..=cap {
                let start = Instant::now();
                let subsets = combinations(all.len(), size);
                let evals: Vec<(usize, Evaluation)> = subsets
                    .par_iter()
                    .enumerate()
                    .filter(|(_, s)| is_cb(&all.subset(s), r))
                    .map(|(i, s)| evaluate(spec.target, d, r, &all.subset(s), None, spec.node_budget).map(|e| (i, e)))
                    .collect::<Result<_>>()?;
                let mut rec = TrialRecord::new(records.len(), spec.target, d, r);
                let mut tally = |key: &str| *rec.counts.entry(key.to_string()).or_insert(0) += 1;
                for (_, e) in &evals {
                    tally(match e.outcome {
                        Outcome::Pass => "covered",
                        Outcome::Violation => "violations",
                        Outcome::Witness => "witnesses",
                        Outcome::BudgetExceeded => "budget_exceeded",
                        Outcome::Skipped => "skipped",
                    });
                }
                rec.counts.insert("size".into(), size as u64);
                rec.counts.insert("subsets".into(), subsets.len() as u64);
                rec.counts.insert("cb".into(), evals.len() as u64);
                for (i, e) in evals {
                    let v = Violation {
                        record: rec.index,
                        target: spec.target,
                        d,
                        r,
                        points: all.subset(&subsets[i]),
                        config: None,
                        verdicts: e.verdicts,
                        detail: e.detail,
                        needs_characteristic_zero_lift: true,
                    };
                    match e.outcome {
                        Outcome::Violation => violations.push(v),
                        Outcome::Witness if witnesses.len() < MAX_LISTED_WITNESSES => witnesses.push(v),
                        _ => {}
                    }
                }
                rec.outcome = if rec.counts.contains_key("violations") {
                    Outcome::Violation
                } else if rec.counts.contains_key("budget_exceeded") {
                    Outcome::BudgetExceeded
                } else {
                    Outcome::Pass
                };
                rec.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
                records.push(rec);
            }
            for gen in &spec.inject {
                let start = Instant::now();
                let g = gen.generate()?;
                let mut rec = TrialRecord::new(records.len(), spec.target, d, r);
                let e = evaluate(spec.target, d, r, &g.points, None, spec.node_budget)?;
                rec.seed = Some(gen.seed);
                rec.gen = Some(gen.clone());
                rec.certificate = Some(g.certificate);
                rec.points = Some(g.points);
                rec.verdicts = e.verdicts;
                rec.cover = e.cover;
                rec.outcome = e.outcome;
                rec.detail = e.detail;
                rec.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
                match rec.outcome {
                    Outcome::Violation => violations.extend(violation_of(&rec, spec.field)),
                    Outcome::Witness => witnesses.extend(violation_of(&rec, spec.field)),
                    _ => {}
                }
                records.push(rec);
            }
        }
    }
    Ok((records, violations, witnesses))
}

pub fn exhaustive_lower_bound(field: FieldSpec, n: usize, r: u32) -> Result<CampaignReport> {
    let mut spec = CampaignSpec::new(Target::LowerBoundExhaustive, Vec::new(), vec![r], field, 1, 0);
    spec.ambient = Some(n);
    run_campaign(&spec)
}

pub fn counterexample_search(field: FieldSpec, n: usize, r: u32, d: usize, size_cap: usize) -> Result<CampaignReport> {
    let mut spec = CampaignSpec::new(Target::CounterexampleSearch, vec![d], vec![r], field, 1, 0);
    spec.ambient = Some(n);
    spec.size_cap = Some(size_cap);
    run_campaign(&spec)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayResult {
    /// The generator reproduced the stored points byte for byte (`None` without a generator).
    pub points_match: Option<bool>,
    pub verdicts_match: bool,
    pub verdicts: BTreeMap<String, bool>,
    pub outcome: Outcome,
}

/// Re-runs a single trial record: regenerates its points and recomputes its verdicts.
pub fn replay_record(rec: &TrialRecord, node_budget: u64) -> Result<ReplayResult> {
    let points_match = match (&rec.gen, &rec.points) {
        (Some(g), Some(p)) => Some(g.generate()?.points.to_json() == p.to_json()),
        _ => None,
    };
    let points = rec
        .points
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("record has no point set to replay".into()))?;
    let e = evaluate(rec.target, rec.d, rec.r, points, rec.config.as_ref(), node_budget)?;
    Ok(ReplayResult {
        points_match,
        verdicts_match: e.verdicts == rec.verdicts,
        verdicts: e.verdicts,
        outcome: e.outcome,
    })
}

/// Re-checks a violation from its stored point set alone.
pub fn replay_violation(v: &Violation, node_budget: u64) -> Result<ReplayResult> {
    let e = evaluate(v.target, v.d, v.r, &v.points, v.config.as_ref(), node_budget)?;
    Ok(ReplayResult {
        points_match: None,
        verdicts_match: e.verdicts == v.verdicts,
        verdicts: e.verdicts,
        outcome: e.outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf101() -> FieldSpec {
        FieldSpec::prime(101).unwrap()
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(4, 2)[..3], [vec![0, 1], vec![0, 2], vec![0, 3]]);
    }

    #[test]
    fn seeds_differ_by_path() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(7, &[3]), derive_seed(7, &[3]));
    }

    #[test]
    fn family_mix_respects_bound() {
        for (d, r) in [(1, 1), (1, 4), (2, 3), (3, 2), (4, 3)] {
            for s in 0..40 {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let fam = draw_family(d, r, gf101(), size_bound(d, r), &mut rng).unwrap();
                let g = GenSpec::new(fam.clone(), gf101(), s).generate();
                if let Ok(g) = g {
                    assert!(g.points.len() <= size_bound(d, r), "{fam:?}");
                }
            }
        }
    }

    #[test]
    fn small_conjecture_campaign() {
        let spec = CampaignSpec::new(Target::Conjecture, vec![1, 2], vec![1, 2], gf101(), 3, 42);
        let rep = run_campaign(&spec).unwrap();
        assert_eq!(rep.records.len(), 12);
        assert_eq!(rep.summary.violations, 0);
        assert!(rep.records.iter().all(|r| r.outcome == Outcome::Pass));
        let again = run_campaign(&spec).unwrap();
        assert_eq!(rep.deterministic_json(), again.deterministic_json());
        let rec = &rep.records[5];
        let replay = replay_record(rec, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(replay.points_match, Some(true));
        assert!(replay.verdicts_match);
    }

    #[test]
    fn tightness_target() {
        let spec = CampaignSpec::new(Target::Tightness, vec![2], vec![2], gf101(), 2, 1);
        let rep = run_campaign(&spec).unwrap();
        assert_eq!(rep.summary.passed, 2);
        assert_eq!(rep.records[0].points.as_ref().unwrap().len(), 8);
    }

    #[test]
    fn lower_bound_small() {
        let rep = exhaustive_lower_bound(FieldSpec::prime(5).unwrap(), 1, 1).unwrap();
        assert_eq!(rep.summary.violations, 0);
        let subsets: u64 = rep.records.iter().map(|r| r.counts["subsets"]).sum();
        assert_eq!(subsets, 6 + 15);
        let vacuous = exhaustive_lower_bound(FieldSpec::prime(5).unwrap(), 1, 0).unwrap();
        assert_eq!(vacuous.summary.passed, 1);
    }

    #[test]
    fn counterexample_vacuous_and_witness() {
        let rep = counterexample_search(FieldSpec::prime(3).unwrap(), 2, 1, 1, 0).unwrap();
        assert_eq!(rep.summary.violations, 0);
        let mut spec = CampaignSpec::new(Target::CounterexampleSearch, vec![1], vec![2], gf101(), 1, 0);
        spec.ambient = Some(2);
        spec.size_cap = Some(0);
        spec.inject = vec![GenSpec::new(Family::Rnc { k: 2, m: 6 }, gf101(), 3)];
        let rep = run_campaign(&spec).unwrap();
        assert_eq!(rep.witnesses.len(), 1);
        assert_eq!(rep.summary.violations, 0);
    }

    #[test]
    fn budget_guard() {
        let mut spec = CampaignSpec::new(Target::LowerBoundExhaustive, vec![], vec![3], FieldSpec::prime(3).unwrap(), 1, 0);
        spec.ambient = Some(2);
        spec.node_budget = 10;
        assert!(matches!(run_campaign(&spec), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn validation() {
        let spec = CampaignSpec::new(Target::Conjecture, vec![], vec![1], gf101(), 1, 0);
        assert!(spec.validate().is_err());
        let spec = CampaignSpec::new(Target::Conjecture, vec![1], vec![1], gf101(), 0, 0);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn timings_are_stripped() {
        let mut v = serde_json::json!({"a": 1, "elapsed_ms": 3.0, "b": [{"elapsed_ms": 1, "c": 2}]});
        strip_timings(&mut v);
        assert_eq!(v, serde_json::json!({"a": 1, "b": [{"c": 2}]}));
    }
}
