//! Projective points, linear flats and plane configurations.
//!
//! A [`Flat`] is stored as the reduced row echelon basis of its affine cone, so
//! two flats are equal exactly when their bases are. The defining equations
//! (a basis of the annihilator) are kept alongside for fast incidence tests.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg;

/// A point of P^n with its first nonzero coordinate scaled to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<Scalar>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        let Some(first) = coords.first() else {
            return Err(Error::EmptyInput);
        };
        let field = first.field();
        for c in &coords {
            field.check(c)?;
        }
        let lead = coords.iter().find(|c| !c.is_zero()).ok_or(Error::ZeroPoint)?;
        let scale = lead.inv()?;
        let coords = coords.iter().map(|c| c * &scale).collect();
        Ok(ProjPoint { coords })
    }

    pub fn from_i64(field: FieldSpec, coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn field(&self) -> FieldSpec {
        self.coords[0].field()
    }
}

/// An ordered finite set of distinct points sharing one ambient space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet {
    field: FieldSpec,
    ambient_dim: usize,
    points: Vec<ProjPoint>,
}

impl PointSet {
    /// Rejects duplicates (after normalization) instead of dropping them.
    pub fn new(field: FieldSpec, ambient_dim: usize, points: Vec<ProjPoint>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: p.ambient_dim(),
                });
            }
            if p.field() != field {
                return Err(Error::MixedFields);
            }
            if !seen.insert(p) {
                return Err(Error::DuplicatePoint(i));
            }
        }
        Ok(PointSet {
            field,
            ambient_dim,
            points,
        })
    }

    pub fn empty(field: FieldSpec, ambient_dim: usize) -> Self {
        PointSet {
            field,
            ambient_dim,
            points: Vec::new(),
        }
    }

    pub fn from_i64(field: FieldSpec, ambient_dim: usize, rows: &[&[i64]]) -> Result<Self> {
        let pts = rows
            .iter()
            .map(|r| ProjPoint::from_i64(field, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, ambient_dim, pts)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ProjPoint> {
        self.points.iter()
    }

    /// The points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        PointSet {
            field: self.field,
            ambient_dim: self.ambient_dim,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    pub fn without(&self, index: usize) -> PointSet {
        let mut points = self.points.clone();
        points.remove(index);
        PointSet {
            field: self.field,
            ambient_dim: self.ambient_dim,
            points,
        }
    }

    /// Points as coordinate rows.
    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.points.iter().map(|p| p.coords.clone()).collect()
    }

    /// Image under the invertible `(n+1) x (n+1)` matrix `m` acting on column vectors.
    pub fn transform(&self, m: &[Vec<Scalar>]) -> Result<PointSet> {
        let size = self.ambient_dim + 1;
        if m.len() != size || m.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: m.len(),
            });
        }
        if linalg::rank(self.field, size, m) != size {
            return Err(Error::InvalidParams("transformation matrix is singular".into()));
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                ProjPoint::new(m.iter().map(|row| linalg::dot(self.field, row, &p.coords)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(self.field, self.ambient_dim, points)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("point set serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a ProjPoint;
    type IntoIter = std::slice::Iter<'a, ProjPoint>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

#[derive(Serialize, Deserialize)]
struct PointSetWire {
    field: FieldSpec,
    ambient_dim: usize,
    points: Vec<Vec<String>>,
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointSetWire {
            field: self.field,
            ambient_dim: self.ambient_dim,
            points: self.points.iter().map(|p| coord_strings(&p.coords)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PointSetWire::deserialize(d)?;
        let points = w
            .points
            .iter()
            .map(|row| ProjPoint::new(parse_row(w.field, row)?))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        PointSet::new(w.field, w.ambient_dim, points).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn coord_strings(row: &[Scalar]) -> Vec<String> {
    row.iter().map(|c| c.to_string()).collect()
}

pub(crate) fn parse_row(field: FieldSpec, row: &[String]) -> Result<Vec<Scalar>> {
    row.iter().map(|s| field.parse(s)).collect()
}

/// A nonempty linear subspace of P^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flat {
    field: FieldSpec,
    ambient_dim: usize,
    basis: Vec<Vec<Scalar>>,
    equations: Vec<Vec<Scalar>>,
}

impl Flat {
    /// The span of the given cone vectors. Fails if they are all zero.
    pub fn from_vectors(field: FieldSpec, ambient_dim: usize, vectors: &[Vec<Scalar>]) -> Result<Flat> {
        let ncols = ambient_dim + 1;
        for v in vectors {
            if v.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    got: v.len(),
                });
            }
            for c in v {
                field.check(c)?;
            }
        }
        let ech = linalg::rref(field, ncols, vectors);
        if ech.rank() == 0 {
            return Err(Error::EmptyInput);
        }
        let equations = ech.nullspace(field);
        Ok(Flat {
            field,
            ambient_dim,
            basis: ech.rows,
            equations,
        })
    }

    /// The common zero locus of linear forms; `None` when it is empty.
    pub fn from_equations(field: FieldSpec, ambient_dim: usize, equations: &[Vec<Scalar>]) -> Option<Flat> {
        let cone = linalg::nullspace(field, ambient_dim + 1, equations);
        if cone.is_empty() {
            return None;
        }
        Flat::from_vectors(field, ambient_dim, &cone).ok()
    }

    pub fn point(p: &ProjPoint) -> Flat {
        Flat::from_vectors(p.field(), p.ambient_dim(), std::slice::from_ref(&p.coords))
            .expect("points are nonzero")
    }

    pub fn whole_space(field: FieldSpec, ambient_dim: usize) -> Flat {
        let n = ambient_dim + 1;
        let rows: Vec<Vec<Scalar>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        Flat::from_vectors(field, ambient_dim, &rows).expect("identity has full rank")
    }

    /// Image under an invertible matrix acting on column vectors.
    pub fn transform(&self, m: &[Vec<Scalar>]) -> Result<Flat> {
        let size = self.ambient_dim + 1;
        if m.len() != size || m.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: m.len(),
            });
        }
        let images: Vec<Vec<Scalar>> = self
            .basis
            .iter()
            .map(|v| m.iter().map(|row| linalg::dot(self.field, row, v)).collect())
            .collect();
        let out = Flat::from_vectors(self.field, self.ambient_dim, &images)?;
        if out.dim() != self.dim() {
            return Err(Error::InvalidParams("transformation matrix is singular".into()));
        }
        Ok(out)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Projective dimension (rank of the cone minus one).
    pub fn dim(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    /// Linear forms cutting out the flat, in reduced echelon form.
    pub fn equations(&self) -> &[Vec<Scalar>] {
        &self.equations
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.equations
            .iter()
            .all(|e| linalg::dot(self.field, e, &p.coords).is_zero())
    }

    pub fn contains_flat(&self, other: &Flat) -> bool {
        other
            .basis
            .iter()
            .all(|v| self.equations.iter().all(|e| linalg::dot(self.field, e, v).is_zero()))
    }

    /// Indices of the points of `gamma` on this flat.
    pub fn incident(&self, gamma: &PointSet) -> Vec<usize> {
        (0..gamma.len()).filter(|&i| self.contains(&gamma.points[i])).collect()
    }

    fn compatible(&self, other: &Flat) -> bool {
        self.field == other.field && self.ambient_dim == other.ambient_dim
    }
}

impl PartialOrd for Flat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by field, ambient space, dimension, then basis entries.
impl Ord for Flat {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.field, self.ambient_dim, self.basis.len(), &self.basis).cmp(&(
            other.field,
            other.ambient_dim,
            other.basis.len(),
            &other.basis,
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct FlatWire {
    field: FieldSpec,
    ambient_dim: usize,
    dim: usize,
    basis: Vec<Vec<String>>,
}

impl Serialize for Flat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FlatWire {
            field: self.field,
            ambient_dim: self.ambient_dim,
            dim: self.dim(),
            basis: self.basis.iter().map(|r| coord_strings(r)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Flat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = FlatWire::deserialize(d)?;
        let rows = w
            .basis
            .iter()
            .map(|r| parse_row(w.field, r))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        let flat = Flat::from_vectors(w.field, w.ambient_dim, &rows).map_err(serde::de::Error::custom)?;
        if flat.dim() != w.dim {
            return Err(serde::de::Error::custom(format!(
                "basis spans a flat of dimension {}, not {}",
                flat.dim(),
                w.dim
            )));
        }
        Ok(flat)
    }
}

/// Something that can be fed to [`span`].
#[derive(Clone, Copy, Debug)]
pub enum Generator<'a> {
    Point(&'a ProjPoint),
    Flat(&'a Flat),
}

impl<'a> From<&'a ProjPoint> for Generator<'a> {
    fn from(p: &'a ProjPoint) -> Self {
        Generator::Point(p)
    }
}

impl<'a> From<&'a Flat> for Generator<'a> {
    fn from(f: &'a Flat) -> Self {
        Generator::Flat(f)
    }
}

/// Smallest flat containing every input.
pub fn span<'a, I>(items: I) -> Result<Flat>
where
    I: IntoIterator,
    I::Item: Into<Generator<'a>>,
{
    let mut rows = Vec::new();
    let mut shape: Option<(FieldSpec, usize)> = None;
    for item in items {
        let (field, n, vecs): (_, _, &[Vec<Scalar>]) = match item.into() {
            Generator::Point(p) => (p.field(), p.ambient_dim(), std::slice::from_ref(&p.coords)),
            Generator::Flat(f) => (f.field, f.ambient_dim, &f.basis),
        };
        match shape {
            None => shape = Some((field, n)),
            Some((f0, _)) if f0 != field => return Err(Error::MixedFields),
            Some((_, n0)) if n0 != n => return Err(Error::DimensionMismatch { expected: n0, got: n }),
            _ => {}
        }
        rows.extend(vecs.iter().cloned());
    }
    let (field, n) = shape.ok_or(Error::EmptyInput)?;
    Flat::from_vectors(field, n, &rows)
}

/// Intersection of two flats; `None` when their cones meet only at the origin.
pub fn intersect(a: &Flat, b: &Flat) -> Option<Flat> {
    assert!(a.compatible(b), "flats live in different spaces");
    let mut eqs = a.equations.clone();
    eqs.extend(b.equations.iter().cloned());
    Flat::from_equations(a.field, a.ambient_dim, &eqs)
}

/// A union of distinct positive-dimensional flats.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaneConfiguration {
    planes: Vec<Flat>,
}

impl PlaneConfiguration {
    pub fn new(planes: Vec<Flat>) -> Result<Self> {
        let Some(first) = planes.first() else {
            return Err(Error::InvalidConfiguration("no planes".into()));
        };
        for (i, p) in planes.iter().enumerate() {
            if !p.compatible(first) {
                return Err(Error::InvalidConfiguration("planes live in different spaces".into()));
            }
            if p.dim() == 0 {
                return Err(Error::InvalidConfiguration(format!("plane {i} is a point")));
            }
            if planes[..i].contains(p) {
                return Err(Error::InvalidConfiguration(format!("plane {i} is repeated")));
            }
        }
        Ok(PlaneConfiguration { planes })
    }

    pub fn planes(&self) -> &[Flat] {
        &self.planes
    }

    /// Sum of the plane dimensions.
    pub fn dim(&self) -> usize {
        self.planes.iter().map(Flat::dim).sum()
    }

    /// Number of planes.
    pub fn length(&self) -> usize {
        self.planes.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.planes[0].ambient_dim
    }

    pub fn field(&self) -> FieldSpec {
        self.planes[0].field
    }

    pub fn span(&self) -> Flat {
        span(&self.planes).expect("configuration is nonempty")
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.planes.iter().any(|f| f.contains(p))
    }

    /// Pairwise disjoint planes.
    pub fn is_skew(&self) -> bool {
        let k = self.planes.len();
        (0..k).all(|i| (i + 1..k).all(|j| intersect(&self.planes[i], &self.planes[j]).is_none()))
    }

    /// Skew, and the span has the expected dimension `dim + length - 1`.
    pub fn is_split(&self) -> bool {
        self.is_skew() && self.span().dim() + 1 == self.dim() + self.length()
    }

    pub fn transform(&self, m: &[Vec<Scalar>]) -> Result<PlaneConfiguration> {
        let planes = self.planes.iter().map(|f| f.transform(m)).collect::<Result<Vec<_>>>()?;
        PlaneConfiguration::new(planes)
    }

    /// Planes sorted in canonical order.
    pub fn canonical(&self) -> PlaneConfiguration {
        let mut planes = self.planes.clone();
        planes.sort();
        PlaneConfiguration { planes }
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigWire {
    dim: usize,
    length: usize,
    planes: Vec<Flat>,
}

impl Serialize for PlaneConfiguration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigWire {
            dim: self.dim(),
            length: self.length(),
            planes: self.planes.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlaneConfiguration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = ConfigWire::deserialize(d)?;
        let cfg = PlaneConfiguration::new(w.planes).map_err(serde::de::Error::custom)?;
        if cfg.dim() != w.dim || cfg.length() != w.length {
            return Err(serde::de::Error::custom("dim/length do not match the planes"));
        }
        Ok(cfg)
    }
}

/// A hyperplane `H ⊇ p` with `H ∩ gamma = p ∩ gamma`.
///
/// Hyperplanes through `p` are the nonzero combinations `Σ c_i E_i` of the
/// equations of `p`. Over GF(p) the coefficient vectors are scanned in
/// lexicographic order (normalized so the leading coefficient is 1), which is
/// exhaustive, so failure means no such hyperplane exists. Over Q the scan
/// follows the moment curve `c = (t^(k-1), ..., t, 1)`, `t = 0, 1, 2, ...`;
/// each point off `p` rules out fewer than `k` values of `t`, so this
/// terminates.
pub fn extend_to_hyperplane(p: &Flat, gamma: &PointSet) -> Result<Flat> {
    if gamma.field() != p.field || gamma.ambient_dim() != p.ambient_dim {
        return Err(Error::InvalidParams("point set and flat live in different spaces".into()));
    }
    if p.dim() >= p.ambient_dim {
        return Err(Error::InvalidParams("the flat is already the whole space".into()));
    }
    let field = p.field;
    let k = p.equations.len();
    // Values E_i(x) for every point x of gamma off the flat.
    let avoid: Vec<Vec<Scalar>> = gamma
        .iter()
        .filter(|x| !p.contains(x))
        .map(|x| p.equations.iter().map(|e| linalg::dot(field, e, x.coords())).collect())
        .collect();
    let accept = |c: &[Scalar]| avoid.iter().all(|vals| !linalg::dot(field, c, vals).is_zero());
    let hyperplane = |c: &[Scalar]| {
        let mut h = vec![field.zero(); p.ambient_dim + 1];
        for (ci, e) in c.iter().zip(&p.equations) {
            for (hj, ej) in h.iter_mut().zip(e) {
                *hj = &*hj + &(ci * ej);
            }
        }
        Flat::from_equations(field, p.ambient_dim, &[h]).expect("a hyperplane is nonempty")
    };
    match field.modulus() {
        Some(q) => {
            for c in NormalizedVectors::new(q as u64, k) {
                let c: Vec<Scalar> = c.into_iter().map(|v| field.from_u64(v)).collect();
                if accept(&c) {
                    return Ok(hyperplane(&c));
                }
            }
            Err(Error::FieldTooSmall(format!(
                "every hyperplane through the {}-flat meets the remaining points over {field}",
                p.dim()
            )))
        }
        None => {
            for t in 0.. {
                let t = field.from_i64(t);
                let c: Vec<Scalar> = (0..k).rev().map(|e| t.pow(e as u32)).collect();
                if accept(&c) {
                    return Ok(hyperplane(&c));
                }
            }
            unreachable!()
        }
    }
}

/// Nonzero vectors in GF(q)^len whose first nonzero entry is 1, in
/// lexicographic order. These represent the points of P^(len-1)(GF(q)).
pub(crate) struct NormalizedVectors {
    q: u64,
    cur: Option<Vec<u64>>,
}

impl NormalizedVectors {
    pub(crate) fn new(q: u64, len: usize) -> Self {
        let cur = if len == 0 {
            None
        } else {
            let mut v = vec![0; len];
            v[len - 1] = 1;
            Some(v)
        };
        NormalizedVectors { q, cur }
    }
}

impl Iterator for NormalizedVectors {
    type Item = Vec<u64>;
    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.cur.clone()?;
        let v = self.cur.as_mut().unwrap();
        let lead = v.iter().position(|&x| x != 0).unwrap();
        // Increment the tail after the leading 1 as a base-q counter.
        let mut i = v.len();
        loop {
            if i == lead + 1 {
                // Tail exhausted: move the leading 1 one position left.
                if lead == 0 {
                    self.cur = None;
                } else {
                    v.iter_mut().for_each(|x| *x = 0);
                    v[lead - 1] = 1;
                }
                break;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < self.q {
                break;
            }
            v[i] = 0;
        }
        Some(out)
    }
}

/// All points of P^n over a prime field, in lexicographic order of their
/// normalized coordinates.
pub fn all_points(field: FieldSpec, ambient_dim: usize) -> Result<Vec<ProjPoint>> {
    let q = field
        .modulus()
        .ok_or_else(|| Error::InvalidParams("cannot enumerate points over Q".into()))?;
    Ok(NormalizedVectors::new(q as u64, ambient_dim + 1)
        .map(|v| ProjPoint {
            coords: v.into_iter().map(|x| field.from_u64(x)).collect(),
        })
        .collect())
}

/// Replaces intersecting pairs by their span until the configuration is skew.
pub fn merge_intersecting(cfg: &PlaneConfiguration) -> PlaneConfiguration {
    let mut planes = cfg.planes.clone();
    'outer: loop {
        for i in 0..planes.len() {
            for j in i + 1..planes.len() {
                if intersect(&planes[i], &planes[j]).is_some() {
                    let merged = span([&planes[i], &planes[j]]).expect("nonempty");
                    planes.remove(j);
                    planes[i] = merged;
                    // A merged plane may now coincide with another one.
                    let mut seen = Vec::with_capacity(planes.len());
                    for p in planes.drain(..) {
                        if !seen.contains(&p) {
                            seen.push(p);
                        }
                    }
                    planes = seen;
                    continue 'outer;
                }
            }
        }
        break;
    }
    planes.sort();
    PlaneConfiguration { planes }
}
