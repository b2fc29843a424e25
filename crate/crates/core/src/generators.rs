//! Seeded constructors for the standard example families.
//!
//! Every family draws "general" objects by uniform sampling and resamples until
//! a checkable certificate holds (distinct points, general linear position,
//! exact intersection counts). The same [`GenSpec`] always produces the same
//! points, byte for byte.
//!
//! | family | ambient | certificate |
//! |---|---|---|
//! | `rnc` | P^k | distinct parameters on `[1:t:...:t^k]` |
//! | `skew_lines` | P^(2d-1) | the `2d` spanning vectors are independent |
//! | `two_plane_conics` | P^5 | the two planes span P^5 |
//! | `plane_curve_ci` | P^2 | the two curves share exactly `ab` rational points |
//! | `elliptic_quartic` | P^3 | point count in the Hasse interval, no 3 sampled points collinear, no 5 coplanar |
//! | `on_configuration` | any | distinct points |
//! | `split_union` | P^(Σ(k_i+1)-1) | the pieces span independent subspaces |

use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::forms::{vanishing_forms, Form, MonomialBasis};
use crate::linalg;
use crate::projective::{Flat, NormalizedVectors, PlaneConfiguration, PointSet, ProjPoint};

pub const DEFAULT_PRIME: u64 = 101;
pub const RESAMPLE_BUDGET: usize = 500;
/// Plane-curve and quadric-pair generators enumerate P^2 or P^3 point by point.
pub const MAX_ENUMERATION_PRIME: u32 = 2003;
/// Random rationals are integers in `-Q_RANGE..=Q_RANGE`.
const Q_RANGE: i64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    /// `m` points on a rational normal curve spanning P^k.
    Rnc { k: usize, m: usize },
    /// `m` points in general linear position in P^k.
    General { k: usize, m: usize },
}

impl Piece {
    pub fn dim(&self) -> usize {
        match *self {
            Piece::Rnc { k, .. } | Piece::General { k, .. } => k,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Piece::Rnc { m, .. } | Piece::General { m, .. } => m,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    Rnc { k: usize, m: usize },
    SkewLines { d: usize, counts: Vec<usize> },
    TwoPlaneConics { points_per_conic: usize },
    PlaneCurveCi { deg_d: u32, deg_e: u32 },
    EllipticQuartic { m: usize },
    OnConfiguration { config: PlaneConfiguration, counts: Vec<usize> },
    SplitUnion { pieces: Vec<Piece> },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Rnc { .. } => "rnc",
            Family::SkewLines { .. } => "skew_lines",
            Family::TwoPlaneConics { .. } => "two_plane_conics",
            Family::PlaneCurveCi { .. } => "plane_curve_ci",
            Family::EllipticQuartic { .. } => "elliptic_quartic",
            Family::OnConfiguration { .. } => "on_configuration",
            Family::SplitUnion { .. } => "split_union",
        }
    }

    /// Parses `key=value` pairs such as `k=3,m=8`. Lists use `:` (`counts=5:5`);
    /// split-union pieces are `kind/k/m` joined by `+` (`pieces=rnc/2/8+general/1/3`).
    /// `on_configuration` needs a configuration and is only available through JSON.
    pub fn from_params(name: &str, params: &str) -> Result<Family> {
        let mut kv = std::collections::BTreeMap::new();
        for part in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParams(format!("expected key=value, got {part:?}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| {
            kv.remove(key)
                .ok_or_else(|| Error::InvalidParams(format!("family {name} needs parameter {key}")))
        };
        let num = |s: String| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidParams(format!("not a nonnegative integer: {s:?}")))
        };
        let fam = match name {
            "rnc" => Family::Rnc {
                k: num(take("k")?)?,
                m: num(take("m")?)?,
            },
            "skew_lines" => Family::SkewLines {
                d: num(take("d")?)?,
                counts: take("counts")?.split(':').map(|s| num(s.to_string())).collect::<Result<_>>()?,
            },
            "two_plane_conics" => Family::TwoPlaneConics {
                points_per_conic: num(take("points_per_conic")?)?,
            },
            "plane_curve_ci" => Family::PlaneCurveCi {
                deg_d: num(take("deg_d")?)? as u32,
                deg_e: num(take("deg_e")?)? as u32,
            },
            "elliptic_quartic" => Family::EllipticQuartic { m: num(take("m")?)? },
            "split_union" => Family::SplitUnion {
                pieces: take("pieces")?
                    .split('+')
                    .map(|p| {
                        let f: Vec<&str> = p.split('/').collect();
                        let [kind, k, m] = f[..] else {
                            return Err(Error::InvalidParams(format!("piece must be kind/k/m, got {p:?}")));
                        };
                        let (k, m) = (num(k.to_string())?, num(m.to_string())?);
                        match kind {
                            "rnc" => Ok(Piece::Rnc { k, m }),
                            "general" => Ok(Piece::General { k, m }),
                            _ => Err(Error::InvalidParams(format!("unknown piece kind {kind:?}"))),
                        }
                    })
                    .collect::<Result<_>>()?,
            },
            "on_configuration" => {
                return Err(Error::InvalidParams(
                    "on_configuration takes a configuration; pass a GenSpec JSON file".into(),
                ))
            }
            _ => return Err(Error::InvalidParams(format!("unknown family {name:?}"))),
        };
        if let Some(extra) = kv.keys().next() {
            return Err(Error::InvalidParams(format!("family {name} has no parameter {extra}")));
        }
        Ok(fam)
    }
}

/// A family, its parameters, a field and a seed: everything needed to
/// regenerate a point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub family: Family,
    pub field: FieldSpec,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, field: FieldSpec, seed: u64) -> Self {
        GenSpec { family, field, seed }
    }

    pub fn generate(&self) -> Result<Generated> {
        let (f, seed) = (self.field, self.seed);
        match &self.family {
            Family::Rnc { k, m } => gen_rnc(*k, *m, f, seed),
            Family::SkewLines { d, counts } => gen_skew_lines(*d, counts, f, seed),
            Family::TwoPlaneConics { points_per_conic } => gen_two_plane_conics(*points_per_conic, f, seed),
            Family::PlaneCurveCi { deg_d, deg_e } => gen_plane_curve_ci(*deg_d, *deg_e, f, seed),
            Family::EllipticQuartic { m } => gen_elliptic_quartic(*m, f, seed),
            Family::OnConfiguration { config, counts } => gen_on_configuration(config, counts, f, seed),
            Family::SplitUnion { pieces } => gen_split_union(pieces, f, seed),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<GenSpec> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Output of a generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub points: PointSet,
    /// The planes the points were placed on, when the family has them.
    pub config: Option<PlaneConfiguration>,
    /// Forms whose common zeros contain the points (curve equations).
    pub defining_forms: Vec<Form>,
    pub certificate: String,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_scalar(field: FieldSpec, rng: &mut ChaCha8Rng) -> Scalar {
    match field.modulus() {
        Some(p) => field.from_u64(rng.gen_range(0..p as u64)),
        None => field.from_i64(rng.gen_range(-Q_RANGE..=Q_RANGE)),
    }
}

fn random_invertible(field: FieldSpec, size: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Scalar>> {
    loop {
        let m: Vec<Vec<Scalar>> = (0..size)
            .map(|_| (0..size).map(|_| random_scalar(field, rng)).collect())
            .collect();
        if linalg::rank(field, size, &m) == size {
            return m;
        }
    }
}

fn too_small(field: FieldSpec, what: String) -> Error {
    Error::FieldTooSmall(format!("{field} is too small for {what}"))
}

/// `m` distinct points of P^1 as parameters; `None` is the point at infinity,
/// used only when every affine parameter is taken.
fn distinct_params(field: FieldSpec, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Option<Scalar>>> {
    match field.modulus() {
        Some(p) => {
            let p = p as usize;
            if m > p + 1 {
                return Err(too_small(field, format!("{m} distinct points on a rational curve")));
            }
            if m == p + 1 {
                let mut all: Vec<Option<Scalar>> = (0..p).map(|t| Some(field.from_u64(t as u64))).collect();
                all.push(None);
                return Ok(all);
            }
            let mut ts = index::sample(rng, p, m).into_vec();
            ts.sort_unstable();
            Ok(ts.into_iter().map(|t| Some(field.from_u64(t as u64))).collect())
        }
        None => {
            let span = 4 * m.max(1);
            let mut ts = index::sample(rng, span, m).into_vec();
            ts.sort_unstable();
            Ok(ts
                .into_iter()
                .map(|t| Some(field.from_i64(t as i64 - 2 * m as i64)))
                .collect())
        }
    }
}

fn rnc_coords(field: FieldSpec, k: usize, t: Option<&Scalar>) -> Vec<Scalar> {
    match t {
        Some(t) => {
            let mut v = Vec::with_capacity(k + 1);
            v.push(field.one());
            for i in 1..=k {
                let next = &v[i - 1] * t;
                v.push(next);
            }
            v
        }
        None => (0..=k).map(|i| if i == k { field.one() } else { field.zero() }).collect(),
    }
}

/// The 2x2 minors `x_i x_{j+1} - x_{i+1} x_j` cutting out the rational normal curve in P^k.
fn rnc_equations(field: FieldSpec, k: usize) -> Vec<Form> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let mut a = vec![0u32; k + 1];
            a[i] += 1;
            a[j + 1] += 1;
            let mut b = vec![0u32; k + 1];
            b[i + 1] += 1;
            b[j] += 1;
            if a == b {
                continue;
            }
            let terms = [
                crate::forms::Term {
                    coeff: "1".into(),
                    exponents: a,
                },
                crate::forms::Term {
                    coeff: "-1".into(),
                    exponents: b,
                },
            ];
            out.push(Form::from_terms(field, k, 2, &terms).expect("valid monomials"));
        }
    }
    out
}

fn rnc_points(field: FieldSpec, k: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<Scalar>>> {
    Ok(distinct_params(field, m, rng)?
        .iter()
        .map(|t| rnc_coords(field, k, t.as_ref()))
        .collect())
}

fn to_point_set(field: FieldSpec, n: usize, rows: Vec<Vec<Scalar>>) -> Result<PointSet> {
    let pts = rows.into_iter().map(ProjPoint::new).collect::<Result<Vec<_>>>()?;
    PointSet::new(field, n, pts)
}

/// `m` points `[1:t:...:t^k]` with distinct parameters `t`.
pub fn gen_rnc(k: usize, m: usize, field: FieldSpec, seed: u64) -> Result<Generated> {
    if k == 0 {
        return Err(Error::InvalidParams("rnc needs k >= 1".into()));
    }
    let mut rng = rng(seed);
    let rows = rnc_points(field, k, m, &mut rng)?;
    Ok(Generated {
        points: to_point_set(field, k, rows)?,
        config: None,
        defining_forms: rnc_equations(field, k),
        certificate: format!("{m} distinct parameters on the degree-{k} rational normal curve"),
    })
}

/// Places each piece in its own coordinate block, then applies one random
/// invertible transformation to the whole space.
fn assemble(
    field: FieldSpec,
    blocks: Vec<(usize, Vec<Vec<Scalar>>)>,
    rng: &mut ChaCha8Rng,
) -> Result<(PointSet, PlaneConfiguration)> {
    let size: usize = blocks.iter().map(|(k, _)| k + 1).sum();
    let n = size - 1;
    let mut rows = Vec::new();
    let mut planes = Vec::new();
    let mut offset = 0;
    for (k, pts) in &blocks {
        for p in pts {
            let mut v = vec![field.zero(); size];
            v[offset..offset + k + 1].clone_from_slice(p);
            rows.push(v);
        }
        let basis: Vec<Vec<Scalar>> = (0..=*k)
            .map(|i| {
                (0..size)
                    .map(|j| if j == offset + i { field.one() } else { field.zero() })
                    .collect()
            })
            .collect();
        planes.push(Flat::from_vectors(field, n, &basis)?);
        offset += k + 1;
    }
    let m = random_invertible(field, size, rng);
    let points = to_point_set(field, n, rows)?.transform(&m)?;
    let config = PlaneConfiguration::new(planes)?.transform(&m)?;
    Ok((points, config))
}

/// `counts[i]` points on each of `d` lines spanning P^(2d-1).
pub fn gen_skew_lines(d: usize, counts: &[usize], field: FieldSpec, seed: u64) -> Result<Generated> {
    if d == 0 || counts.len() != d || counts.contains(&0) {
        return Err(Error::InvalidParams(format!(
            "skew_lines needs d >= 1 and d positive counts, got d={d}, counts={counts:?}"
        )));
    }
    let mut rng = rng(seed);
    let blocks = counts
        .iter()
        .map(|&c| Ok((1, rnc_points(field, 1, c, &mut rng)?)))
        .collect::<Result<Vec<_>>>()?;
    let (points, config) = assemble(field, blocks, &mut rng)?;
    Ok(Generated {
        points,
        config: Some(config),
        defining_forms: Vec::new(),
        certificate: format!("{d} lines spanned by {} independent vectors", 2 * d),
    })
}

/// A conic in each of two planes spanning P^5, with `points_per_conic` points on each.
pub fn gen_two_plane_conics(points_per_conic: usize, field: FieldSpec, seed: u64) -> Result<Generated> {
    if points_per_conic == 0 {
        return Err(Error::InvalidParams("two_plane_conics needs at least one point per conic".into()));
    }
    let mut rng = rng(seed);
    let blocks = (0..2)
        .map(|_| Ok((2, rnc_points(field, 2, points_per_conic, &mut rng)?)))
        .collect::<Result<Vec<_>>>()?;
    let (points, config) = assemble(field, blocks, &mut rng)?;
    Ok(Generated {
        points,
        config: Some(config),
        defining_forms: Vec::new(),
        certificate: "two smooth conics in planes spanning P^5".into(),
    })
}

/// Pieces in independent subspaces. A union placed this way is CB(r) exactly
/// when every piece is.
pub fn gen_split_union(pieces: &[Piece], field: FieldSpec, seed: u64) -> Result<Generated> {
    if pieces.is_empty() || pieces.iter().any(|p| p.dim() == 0 || p.is_empty()) {
        return Err(Error::InvalidParams("split_union needs nonempty pieces of dimension >= 1".into()));
    }
    let mut rng = rng(seed);
    let blocks = pieces
        .iter()
        .map(|p| match *p {
            Piece::Rnc { k, m } => Ok((k, rnc_points(field, k, m, &mut rng)?)),
            Piece::General { k, m } => Ok((k, general_points(field, k, m, &mut rng)?)),
        })
        .collect::<Result<Vec<_>>>()?;
    let (points, config) = assemble(field, blocks, &mut rng)?;
    Ok(Generated {
        points,
        config: Some(config),
        defining_forms: Vec::new(),
        certificate: format!("{} pieces in independent subspaces", pieces.len()),
    })
}

/// `m` points of P^k, every `min(m, k+1)` of them independent.
fn general_points(field: FieldSpec, k: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<Scalar>>> {
    let need = m.min(k + 1);
    for _ in 0..RESAMPLE_BUDGET {
        let rows: Vec<Vec<Scalar>> = (0..m)
            .map(|_| loop {
                let v: Vec<Scalar> = (0..=k).map(|_| random_scalar(field, rng)).collect();
                if v.iter().any(|c| !c.is_zero()) {
                    break v;
                }
            })
            .collect();
        if all_subsets_have_rank(field, k + 1, &rows, need, need) {
            return Ok(rows);
        }
    }
    Err(Error::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

/// Every `size`-subset of `rows` has rank at least `rank`.
fn all_subsets_have_rank(field: FieldSpec, ncols: usize, rows: &[Vec<Scalar>], size: usize, rank: usize) -> bool {
    let mut idx: Vec<usize> = (0..size).collect();
    if size > rows.len() {
        return true;
    }
    loop {
        let sub: Vec<Vec<Scalar>> = idx.iter().map(|&i| rows[i].clone()).collect();
        if linalg::rank(field, ncols, &sub) < rank {
            return false;
        }
        // next combination
        let mut i = size;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < rows.len() - size + i {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Distinct random points, `counts[i]` of them on plane `i`.
pub fn gen_on_configuration(cfg: &PlaneConfiguration, counts: &[usize], field: FieldSpec, seed: u64) -> Result<Generated> {
    if cfg.field() != field {
        return Err(Error::MixedFields);
    }
    if counts.len() != cfg.length() {
        return Err(Error::InvalidParams(format!(
            "{} counts for {} planes",
            counts.len(),
            cfg.length()
        )));
    }
    let mut rng = rng(seed);
    let mut seen = BTreeSet::new();
    let mut pts = Vec::new();
    for (plane, &count) in cfg.planes().iter().zip(counts) {
        let k = plane.dim();
        let mut chosen = 0;
        if let Some(q) = field.modulus() {
            let size = (0..=k).try_fold(0u64, |acc, _| acc.checked_mul(q as u64).map(|x| x + 1));
            match size {
                Some(s) if s <= 1 << 16 => {
                    // Small plane: enumerate it and sample among the unused points.
                    let fresh: Vec<ProjPoint> = NormalizedVectors::new(q as u64, k + 1)
                        .map(|c| combine(field, plane, &c.into_iter().map(|x| field.from_u64(x)).collect::<Vec<_>>()))
                        .filter(|p| !seen.contains(p))
                        .collect();
                    if fresh.len() < count {
                        return Err(too_small(field, format!("{count} new points on a {k}-plane")));
                    }
                    let mut picks = index::sample(&mut rng, fresh.len(), count).into_vec();
                    picks.sort_unstable();
                    for i in picks {
                        seen.insert(fresh[i].clone());
                        pts.push(fresh[i].clone());
                    }
                    continue;
                }
                _ => {}
            }
        }
        let mut attempts = 0;
        while chosen < count {
            attempts += 1;
            if attempts > RESAMPLE_BUDGET * (count + 1) {
                return Err(Error::ResampleBudgetExceeded(attempts));
            }
            let c: Vec<Scalar> = (0..=k).map(|_| random_scalar(field, &mut rng)).collect();
            if c.iter().all(Scalar::is_zero) {
                continue;
            }
            let p = combine(field, plane, &c);
            if seen.insert(p.clone()) {
                pts.push(p);
                chosen += 1;
            }
        }
    }
    Ok(Generated {
        points: PointSet::new(field, cfg.ambient_dim(), pts)?,
        config: Some(cfg.clone()),
        defining_forms: Vec::new(),
        certificate: "distinct points sampled on the given planes".into(),
    })
}

fn combine(field: FieldSpec, plane: &Flat, coeffs: &[Scalar]) -> ProjPoint {
    let n = plane.ambient_dim() + 1;
    let mut v = vec![field.zero(); n];
    for (c, b) in coeffs.iter().zip(plane.basis()) {
        if c.is_zero() {
            continue;
        }
        for j in 0..n {
            v[j] = &v[j] + &(c * &b[j]);
        }
    }
    ProjPoint::new(v).expect("independent basis, nonzero coefficients")
}

/// A form with residue coefficients, for fast evaluation during enumeration.
struct ModForm {
    p: u64,
    terms: Vec<(u64, Vec<u32>)>,
}

impl ModForm {
    fn from_form(f: &Form, basis: &MonomialBasis, p: u64) -> Self {
        let terms = f
            .coefficients()
            .iter()
            .zip(basis.monomials())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, m)| (c.residue().expect("prime field") as u64, m.clone()))
            .collect();
        ModForm { p, terms }
    }

    fn eval(&self, x: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for (c, m) in &self.terms {
            let mut t = *c;
            for (xi, &e) in x.iter().zip(m) {
                for _ in 0..e {
                    t = t * xi % p;
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }

    /// Coefficients of the polynomial in the last variable obtained by fixing the others.
    fn in_last_variable(&self, head: &[u64], degree: usize) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0u64; degree + 1];
        for (c, m) in &self.terms {
            let mut t = *c;
            for (xi, &e) in head.iter().zip(m) {
                for _ in 0..e {
                    t = t * xi % p;
                }
            }
            let e = *m.last().unwrap() as usize;
            out[e] = (out[e] + t) % p;
        }
        out
    }
}

fn random_form(field: FieldSpec, n: usize, r: u32, rng: &mut ChaCha8Rng) -> Form {
    let basis = MonomialBasis::new(n, r);
    loop {
        let coeffs: Vec<Scalar> = (0..basis.len()).map(|_| random_scalar(field, rng)).collect();
        if coeffs.iter().any(|c| !c.is_zero()) {
            return Form::new(field, basis, coeffs).expect("shapes agree");
        }
    }
}

fn enumeration_prime(field: FieldSpec, family: &str) -> Result<u64> {
    match field.modulus() {
        Some(p) if p <= MAX_ENUMERATION_PRIME => Ok(p as u64),
        Some(p) => Err(Error::InvalidParams(format!(
            "{family} enumerates points; p={p} exceeds {MAX_ENUMERATION_PRIME}"
        ))),
        None => Err(Error::InvalidParams(format!("{family} needs a prime field"))),
    }
}

fn residue_point(field: FieldSpec, v: &[u64]) -> ProjPoint {
    ProjPoint::new(v.iter().map(|&x| field.from_u64(x)).collect()).expect("normalized vectors are nonzero")
}

/// The intersection of two plane curves of degrees `deg_d` and `deg_e` meeting
/// in exactly `deg_d * deg_e` rational points.
///
/// With `a <= b` the degrees, a random curve `F` of degree `a` is drawn and
/// `ab - g` of its rational points chosen, `g = (a-1)(a-2)/2`. A random degree-`b`
/// form `G` through them then meets `F` in those points and `g` residual ones;
/// the draw is kept when `F ∩ G` has exactly `ab` rational points, which rules
/// out common components and tangencies once `p + 1 > ab`.
pub fn gen_plane_curve_ci(deg_d: u32, deg_e: u32, field: FieldSpec, seed: u64) -> Result<Generated> {
    if deg_d + deg_e < 3 || deg_d == 0 || deg_e == 0 {
        return Err(Error::InvalidParams(format!(
            "plane_curve_ci needs positive degrees with d+e-3 >= 0, got ({deg_d},{deg_e})"
        )));
    }
    let p = enumeration_prime(field, "plane_curve_ci")?;
    let (a, b) = (deg_d.min(deg_e), deg_d.max(deg_e));
    let total = (a * b) as usize;
    if p < total as u64 {
        return Err(too_small(field, format!("{total} points on a line")));
    }
    let genus = ((a - 1) * (a.saturating_sub(2)) / 2) as usize;
    let imposed = total - genus;
    let mut rng = rng(seed);
    let plane: Vec<Vec<u64>> = NormalizedVectors::new(p, 3).collect();
    let basis_a = MonomialBasis::new(2, a);
    let basis_b = MonomialBasis::new(2, b);
    for _ in 0..RESAMPLE_BUDGET {
        let f = random_form(field, 2, a, &mut rng);
        let fm = ModForm::from_form(&f, &basis_a, p);
        let on_f: Vec<&Vec<u64>> = plane.iter().filter(|x| fm.eval(x) == 0).collect();
        if on_f.len() < imposed {
            continue;
        }
        let mut picks = index::sample(&mut rng, on_f.len(), imposed).into_vec();
        picks.sort_unstable();
        let chosen = to_point_set(
            field,
            2,
            picks.iter().map(|&i| residue_point(field, on_f[i]).coords().to_vec()).collect(),
        )?;
        let kernel = vanishing_forms(&chosen, b);
        let coeffs: Vec<Scalar> = kernel.iter().map(|_| random_scalar(field, &mut rng)).collect();
        let mut g = vec![field.zero(); basis_b.len()];
        for (c, form) in coeffs.iter().zip(&kernel) {
            for (gi, fi) in g.iter_mut().zip(form.coefficients()) {
                *gi = &*gi + &(c * fi);
            }
        }
        let g = Form::new(field, basis_b.clone(), g)?;
        if g.is_zero() {
            continue;
        }
        let gm = ModForm::from_form(&g, &basis_b, p);
        let common: Vec<&Vec<u64>> = on_f.iter().copied().filter(|x| gm.eval(x) == 0).collect();
        if common.len() != total {
            continue;
        }
        let points = to_point_set(
            field,
            2,
            common.iter().map(|x| x.iter().map(|&v| field.from_u64(v)).collect()).collect(),
        )?;
        let (fd, fe) = if deg_d <= deg_e { (f, g) } else { (g, f) };
        return Ok(Generated {
            points,
            config: None,
            defining_forms: vec![fd, fe],
            certificate: format!("curves of degrees {deg_d} and {deg_e} share exactly {total} rational points"),
        });
    }
    Err(Error::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

/// Square roots modulo an odd prime (Tonelli-Shanks); `None` for non-residues.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    use crate::field::pow_mod;
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1).expect("odd prime has a non-residue");
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % p;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r)
}

/// Roots in GF(p) of `c0 + c1 x + c2 x^2`; every element when it vanishes identically.
fn quadratic_roots(c: &[u64], p: u64) -> Vec<u64> {
    let (c0, c1, c2) = (c[0], c[1], c[2]);
    if p == 2 || (c2 == 0 && c1 == 0 && c0 == 0) {
        return (0..p)
            .filter(|&x| (c0 + c1 * x % p + c2 * x % p * x) % p == 0)
            .collect();
    }
    use crate::field::inv_mod;
    if c2 == 0 {
        if c1 == 0 {
            return Vec::new();
        }
        return vec![(p - c0) % p * inv_mod(c1, p) % p];
    }
    let disc = (c1 * c1 % p + p - 4 * c0 % p * c2 % p) % p;
    let Some(s) = sqrt_mod(disc, p) else {
        return Vec::new();
    };
    let inv2a = inv_mod(2 * c2 % p, p);
    let r1 = (p - c1 + s) % p * inv2a % p;
    let r2 = (2 * p - c1 - s) % p * inv2a % p;
    if r1 == r2 {
        vec![r1]
    } else {
        let mut v = vec![r1, r2];
        v.sort_unstable();
        v
    }
}

/// `m` points of a quartic curve cut out by two random quadrics in P^3.
pub fn gen_elliptic_quartic(m: usize, field: FieldSpec, seed: u64) -> Result<Generated> {
    let p = enumeration_prime(field, "elliptic_quartic")?;
    let mut rng = rng(seed);
    let basis = MonomialBasis::new(3, 2);
    let hasse = 2.0 * (p as f64).sqrt();
    for _ in 0..RESAMPLE_BUDGET {
        let q1 = random_form(field, 3, 2, &mut rng);
        let q2 = random_form(field, 3, 2, &mut rng);
        let (m1, m2) = (ModForm::from_form(&q1, &basis, p), ModForm::from_form(&q2, &basis, p));
        let mut curve: Vec<Vec<u64>> = Vec::new();
        // (x0:x1:x2) normalized and x3 free, then the point (0:0:0:1).
        for head in NormalizedVectors::new(p, 3) {
            for x3 in quadratic_roots(&m1.in_last_variable(&head, 2), p) {
                let x = [head[0], head[1], head[2], x3];
                if m2.eval(&x) == 0 {
                    curve.push(x.to_vec());
                }
            }
        }
        let apex = [0, 0, 0, 1];
        if m1.eval(&apex) == 0 && m2.eval(&apex) == 0 {
            curve.push(apex.to_vec());
        }
        let count = curve.len();
        if ((count as f64) - (p as f64 + 1.0)).abs() > hasse || count < m {
            continue;
        }
        let mut picks = index::sample(&mut rng, count, m).into_vec();
        picks.sort_unstable();
        let rows: Vec<Vec<Scalar>> = picks
            .iter()
            .map(|&i| curve[i].iter().map(|&v| field.from_u64(v)).collect())
            .collect();
        if !all_subsets_have_rank(field, 4, &rows, 3, 3) || !all_subsets_have_rank(field, 4, &rows, 5, 4) {
            continue;
        }
        return Ok(Generated {
            points: to_point_set(field, 3, rows)?,
            config: None,
            defining_forms: vec![q1, q2],
            certificate: format!(
                "{count} rational points on the quadric intersection (Hasse interval), sample has no 3 collinear and no 5 coplanar"
            ),
        });
    }
    Err(Error::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cb::is_cb;

    fn gf101() -> FieldSpec {
        FieldSpec::prime(DEFAULT_PRIME).unwrap()
    }

    fn on_forms(g: &Generated) -> bool {
        g.defining_forms
            .iter()
            .all(|f| g.points.iter().all(|p| f.eval(p).is_zero()))
    }

    #[test]
    fn rnc_shapes() {
        let g = gen_rnc(1, 3, gf101(), 1).unwrap();
        assert_eq!((g.points.len(), g.points.ambient_dim()), (3, 1));
        let g = gen_rnc(3, 8, gf101(), 2).unwrap();
        assert!(on_forms(&g));
        assert!(all_subsets_have_rank(gf101(), 4, &g.points.rows(), 4, 4));
        let q = gen_rnc(2, 6, FieldSpec::rationals(), 3).unwrap();
        assert!(on_forms(&q) && is_cb(&q.points, 2).verdict);
    }

    #[test]
    fn rnc_uses_infinity_only_when_full() {
        let f = FieldSpec::prime(5).unwrap();
        let g = gen_rnc(2, 6, f, 0).unwrap();
        assert_eq!(g.points.len(), 6);
        assert!(g.points.iter().any(|p| p.coords()[0].is_zero()));
        assert!(matches!(gen_rnc(2, 7, f, 0), Err(Error::FieldTooSmall(_))));
        let g = gen_rnc(2, 5, f, 0).unwrap();
        assert!(g.points.iter().all(|p| p.coords()[0].is_one()));
    }

    #[test]
    fn skew_lines_example() {
        let g = gen_skew_lines(2, &[5, 5], gf101(), 7).unwrap();
        let cfg = g.config.as_ref().unwrap();
        assert_eq!(g.points.ambient_dim(), 3);
        assert!(cfg.is_split());
        assert!(g.points.iter().all(|p| cfg.contains(p)));
        assert!(is_cb(&g.points, 3).verdict);
        let one = gen_skew_lines(1, &[4], gf101(), 1).unwrap();
        assert_eq!(one.points.ambient_dim(), 1);
    }

    #[test]
    fn two_plane_conics_split() {
        let g = gen_two_plane_conics(1, gf101(), 3).unwrap();
        assert_eq!(g.points.len(), 2);
        assert!(g.config.as_ref().unwrap().is_split());
        let g = gen_two_plane_conics(8, gf101(), 3).unwrap();
        assert_eq!((g.points.len(), g.points.ambient_dim()), (16, 5));
    }

    #[test]
    fn plane_curve_ci_counts() {
        for (a, b, r) in [(2, 2, 1), (2, 3, 2), (3, 3, 3)] {
            let g = gen_plane_curve_ci(a, b, gf101(), 11).unwrap();
            assert_eq!(g.points.len(), (a * b) as usize);
            assert!(on_forms(&g));
            assert!(is_cb(&g.points, r).verdict);
        }
        assert!(matches!(gen_plane_curve_ci(1, 1, gf101(), 0), Err(Error::InvalidParams(_))));
        assert!(gen_plane_curve_ci(2, 2, FieldSpec::rationals(), 0).is_err());
    }

    #[test]
    fn elliptic_quartic_shapes() {
        let g = gen_elliptic_quartic(9, gf101(), 5).unwrap();
        assert_eq!((g.points.len(), g.points.ambient_dim()), (9, 3));
        assert!(on_forms(&g));
        assert_eq!(gen_elliptic_quartic(4, gf101(), 5).unwrap().points.len(), 4);
    }

    #[test]
    fn sqrt_and_roots() {
        let p = 101;
        for a in 0..p {
            if let Some(s) = sqrt_mod(a, p) {
                assert_eq!(s * s % p, a);
            }
        }
        // (x-3)(x-7) = x^2 - 10x + 21
        assert_eq!(quadratic_roots(&[21, p - 10, 1], p), vec![3, 7]);
        assert_eq!(quadratic_roots(&[0, 0, 0], 5).len(), 5);
    }

    #[test]
    fn on_configuration_examples() {
        let f = gf101();
        let line = crate::projective::span([
            &ProjPoint::from_i64(f, &[1, 0, 0, 0]).unwrap(),
            &ProjPoint::from_i64(f, &[0, 1, 0, 0]).unwrap(),
        ])
        .unwrap();
        let cfg = PlaneConfiguration::new(vec![line]).unwrap();
        let g = gen_on_configuration(&cfg, &[4], f, 1).unwrap();
        assert_eq!(g.points.len(), 4);
        assert!(g.points.iter().all(|p| cfg.contains(p)));
        let small = FieldSpec::prime(3).unwrap();
        let skew = gen_skew_lines(2, &[1, 1], small, 0).unwrap().config.unwrap();
        let g = gen_on_configuration(&skew, &[4, 4], small, 2).unwrap();
        assert_eq!(g.points.len(), 8);
        assert!(matches!(gen_on_configuration(&skew, &[5, 1], small, 2), Err(Error::FieldTooSmall(_))));
    }

    #[test]
    fn determinism() {
        let spec = GenSpec::new(Family::TwoPlaneConics { points_per_conic: 7 }, gf101(), 99);
        let a = spec.generate().unwrap().points.to_json();
        let b = spec.generate().unwrap().points.to_json();
        assert_eq!(a, b);
        let other = GenSpec::new(Family::TwoPlaneConics { points_per_conic: 7 }, gf101(), 100);
        assert_ne!(a, other.generate().unwrap().points.to_json());
    }

    #[test]
    fn spec_json_and_params() {
        let spec = GenSpec::new(Family::Rnc { k: 3, m: 8 }, gf101(), 5);
        let json = spec.to_json();
        assert_eq!(
            json,
            r#"{"family":"rnc","params":{"k":3,"m":8},"field":{"kind":"prime","p":101},"seed":5}"#
        );
        assert_eq!(GenSpec::from_json(&json).unwrap(), spec);
        assert_eq!(Family::from_params("rnc", "k=3, m=8").unwrap(), spec.family);
        assert_eq!(
            Family::from_params("skew_lines", "d=2,counts=5:5").unwrap(),
            Family::SkewLines { d: 2, counts: vec![5, 5] }
        );
        assert_eq!(
            Family::from_params("split_union", "pieces=rnc/2/8+general/1/3").unwrap(),
            Family::SplitUnion {
                pieces: vec![Piece::Rnc { k: 2, m: 8 }, Piece::General { k: 1, m: 3 }]
            }
        );
        assert!(Family::from_params("rnc", "k=3").is_err());
        assert!(Family::from_params("rnc", "k=3,m=8,x=1").is_err());
        let cfg_spec = GenSpec::new(
            Family::OnConfiguration {
                config: gen_skew_lines(2, &[2, 2], gf101(), 0).unwrap().config.unwrap(),
                counts: vec![2, 2],
            },
            gf101(),
            1,
        );
        assert_eq!(GenSpec::from_json(&cfg_spec.to_json()).unwrap(), cfg_spec);
    }

    #[test]
    fn split_union_pieces() {
        let g = gen_split_union(&[Piece::Rnc { k: 2, m: 6 }, Piece::General { k: 1, m: 3 }], gf101(), 4).unwrap();
        assert_eq!((g.points.len(), g.points.ambient_dim()), (9, 4));
        assert!(g.config.as_ref().unwrap().is_split());
        assert!(is_cb(&g.points, 1).verdict);
    }
}
