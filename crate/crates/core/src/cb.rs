//! Deciding the Cayley-Bacharach condition CB(r).
//!
//! A set fails CB(r) at a point `x` exactly when some degree-r form vanishes
//! on the other points but not at `x`, i.e. when removing the row of `x` from
//! the evaluation matrix lowers its rank. Equivalently, row `x` is not a
//! combination of the other rows, which happens iff `x` lies outside the
//! support of every linear dependency among the rows. One left-kernel
//! computation therefore decides the condition for all points at once.
//!
//! Conventions: the empty set satisfies CB(r) for every `r`, and CB(0) holds
//! for every set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::forms::{eval_matrix, Form, MonomialBasis, Term};
use crate::linalg;
use crate::projective::{PlaneConfiguration, PointSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Index of the point where the form does not vanish.
    pub omitted: usize,
    /// Vanishes on every other point.
    pub form: Form,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CbReport {
    pub field: FieldSpec,
    pub ambient_dim: usize,
    pub r: u32,
    pub verdict: bool,
    pub witness: Option<Witness>,
}

impl CbReport {
    /// Substitutes the witness into every point: zero everywhere except the omitted point.
    pub fn witness_is_valid(&self, gamma: &PointSet) -> bool {
        match &self.witness {
            None => self.verdict,
            Some(w) => gamma
                .iter()
                .enumerate()
                .all(|(i, p)| w.form.eval(p).is_zero() != (i == w.omitted)),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct WitnessWire {
    omitted: usize,
    form: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct CbReportWire {
    r: u32,
    verdict: bool,
    witness: Option<WitnessWire>,
    field: FieldSpec,
    ambient_dim: usize,
}

impl Serialize for CbReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CbReportWire {
            r: self.r,
            verdict: self.verdict,
            witness: self.witness.as_ref().map(|w| WitnessWire {
                omitted: w.omitted,
                form: w.form.terms(),
            }),
            field: self.field,
            ambient_dim: self.ambient_dim,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CbReport {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CbReportWire::deserialize(d)?;
        let witness = match w.witness {
            None => None,
            Some(ww) => Some(Witness {
                omitted: ww.omitted,
                form: Form::from_terms(w.field, w.ambient_dim, w.r, &ww.form).map_err(serde::de::Error::custom)?,
            }),
        };
        if witness.is_some() == w.verdict {
            return Err(serde::de::Error::custom("a witness is present iff the verdict is false"));
        }
        Ok(CbReport {
            field: w.field,
            ambient_dim: w.ambient_dim,
            r: w.r,
            verdict: w.verdict,
            witness,
        })
    }
}

/// Indices of the points at which CB(r) fails, ascending.
pub fn cb_failures(gamma: &PointSet, r: u32) -> Vec<usize> {
    if r == 0 || gamma.is_empty() {
        return Vec::new();
    }
    let m = eval_matrix(gamma, r);
    let field = gamma.field();
    let dependencies = linalg::nullspace(field, gamma.len(), &linalg::transpose(m.rows(), m.ncols()));
    let mut supported = vec![false; gamma.len()];
    for dep in &dependencies {
        for (i, c) in dep.iter().enumerate() {
            if !c.is_zero() {
                supported[i] = true;
            }
        }
    }
    (0..gamma.len()).filter(|&i| !supported[i]).collect()
}

/// Decides CB(r); on failure the witness omits the first failing point and is
/// the first echelon-basis form of the remaining points that is nonzero there.
pub fn is_cb(gamma: &PointSet, r: u32) -> CbReport {
    let mut report = CbReport {
        field: gamma.field(),
        ambient_dim: gamma.ambient_dim(),
        r,
        verdict: true,
        witness: None,
    };
    let Some(&omitted) = cb_failures(gamma, r).first() else {
        return report;
    };
    let field = gamma.field();
    let m = eval_matrix(gamma, r);
    let rest = m.without_row(omitted);
    let at_omitted = &m.rows()[omitted];
    let coeffs = linalg::nullspace(field, m.ncols(), rest.rows())
        .into_iter()
        .find(|v| !linalg::dot(field, v, at_omitted).is_zero())
        .expect("the omitted row is independent of the others");
    let form = Form::new(field, MonomialBasis::new(gamma.ambient_dim(), r), coeffs).expect("shapes agree");
    report.verdict = false;
    report.witness = Some(Witness { omitted, form });
    report
}

/// `gamma` minus every point lying on some plane of `cfg`, order preserved.
pub fn excise(gamma: &PointSet, cfg: &PlaneConfiguration) -> PointSet {
    let keep: Vec<usize> = (0..gamma.len())
        .filter(|&i| !cfg.contains(&gamma.points()[i]))
        .collect();
    gamma.subset(&keep)
}

/// Largest `r <= r_cap` with CB(r). Every verdict up to `r_cap` is computed and
/// must form an initial segment `0..=r`; anything else is reported as
/// [`Error::NonMonotone`] (possible only over very small fields).
pub fn max_cb(gamma: &PointSet, r_cap: u32) -> Result<u32> {
    let verdicts: Vec<bool> = (0..=r_cap).map(|r| cb_failures(gamma, r).is_empty()).collect();
    let best = verdicts.iter().rposition(|&v| v).expect("CB(0) always holds") as u32;
    if let Some(lower) = verdicts[..best as usize].iter().position(|&v| !v) {
        return Err(Error::NonMonotone {
            lower: lower as u32,
            upper: best,
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{span, ProjPoint};

    fn gf101() -> FieldSpec {
        FieldSpec::prime(101).unwrap()
    }

    #[test]
    fn single_point_fails_cb1_with_witness() {
        let g = PointSet::from_i64(gf101(), 2, &[&[1, 2, 3]]).unwrap();
        let rep = is_cb(&g, 1);
        assert!(!rep.verdict);
        assert_eq!(rep.witness.as_ref().unwrap().omitted, 0);
        assert!(rep.witness_is_valid(&g));
        assert_eq!(max_cb(&g, 3).unwrap(), 0);
    }

    #[test]
    fn conventions() {
        let f = gf101();
        assert!(is_cb(&PointSet::empty(f, 2), 5).verdict);
        assert_eq!(max_cb(&PointSet::empty(f, 2), 4).unwrap(), 4);
        let g = PointSet::from_i64(f, 2, &[&[1, 2, 3]]).unwrap();
        assert!(is_cb(&g, 0).verdict);
    }

    #[test]
    fn six_points_on_a_conic_are_cb2() {
        let f = gf101();
        let rows: Vec<Vec<i64>> = (1..=6).map(|t| vec![1, t, t * t]).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let g = PointSet::from_i64(f, 2, &refs).unwrap();
        assert!(is_cb(&g, 2).verdict);
        // five points on a conic do not suffice
        assert!(!is_cb(&g.subset(&[0, 1, 2, 3, 4]), 2).verdict);
    }

    #[test]
    fn collinear_points_threshold() {
        // r+2 collinear points are CB(r); r+1 are not
        let f = gf101();
        for r in 1..5u32 {
            let rows: Vec<Vec<i64>> = (0..(r as i64 + 2)).map(|t| vec![1, t, 0]).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let g = PointSet::from_i64(f, 2, &refs).unwrap();
            assert!(is_cb(&g, r).verdict);
            let rep = is_cb(&g.without(0), r);
            assert!(!rep.verdict && rep.witness_is_valid(&g.without(0)));
        }
    }

    #[test]
    fn excision_examples() {
        let f = gf101();
        let g = PointSet::from_i64(f, 3, &[&[1, 0, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 1, 1]]).unwrap();
        let l1 = span([&g.points()[0], &g.points()[1]]).unwrap();
        let l2 = span([&g.points()[2], &g.points()[3]]).unwrap();
        let both = PlaneConfiguration::new(vec![l1.clone(), l2]).unwrap();
        assert!(excise(&g, &both).is_empty());
        let one = PlaneConfiguration::new(vec![l1]).unwrap();
        assert_eq!(excise(&g, &one), g.subset(&[2, 3]));
        let far = span([
            &ProjPoint::from_i64(f, &[1, 1, 1, 1]).unwrap(),
            &ProjPoint::from_i64(f, &[1, 2, 3, 5]).unwrap(),
        ])
        .unwrap();
        assert_eq!(excise(&g, &PlaneConfiguration::new(vec![far]).unwrap()), g);
    }

    #[test]
    fn report_json_roundtrip() {
        let g = PointSet::from_i64(gf101(), 2, &[&[1, 2, 3], &[1, 0, 1]]).unwrap();
        let rep = is_cb(&g, 1);
        let back: CbReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        assert!(rep.to_json().starts_with(r#"{"r":1,"verdict":false,"witness":{"omitted":0,"form":["#));
    }
}
