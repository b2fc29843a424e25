//! Degree-r forms on P^n: monomial bases, evaluation matrices and the space of
//! forms vanishing on a point set.
//!
//! Monomials are ordered lexicographically on exponent vectors with `x0`
//! largest, so `x0^r` is always column 0. Since all monomials share the degree
//! `r` this is the graded-lex order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg;
use crate::projective::{PointSet, ProjPoint};

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialBasis {
    n: usize,
    r: u32,
    monomials: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn new(n: usize, r: u32) -> Self {
        let mut monomials = Vec::with_capacity(binomial((n as u64) + r as u64, r as u64) as usize);
        let mut cur = vec![0u32; n + 1];
        push_monomials(&mut cur, 0, r, &mut monomials);
        MonomialBasis { n, r, monomials }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, exponents: &[u32]) -> Option<usize> {
        // Descending lexicographic order.
        self.monomials
            .binary_search_by(|m| exponents.cmp(m.as_slice()))
            .ok()
    }

    /// Values of every monomial at `point`.
    pub fn evaluate(&self, point: &ProjPoint) -> Vec<Scalar> {
        let field = point.field();
        let powers: Vec<Vec<Scalar>> = point
            .coords()
            .iter()
            .map(|c| {
                let mut row = Vec::with_capacity(self.r as usize + 1);
                row.push(field.one());
                for e in 1..=self.r as usize {
                    let next = &row[e - 1] * c;
                    row.push(next);
                }
                row
            })
            .collect();
        self.monomials
            .iter()
            .map(|m| {
                let mut acc = field.one();
                for (i, &e) in m.iter().enumerate() {
                    if e > 0 {
                        acc = &acc * &powers[i][e as usize];
                        if acc.is_zero() {
                            break;
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

fn push_monomials(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos == cur.len() - 1 {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        push_monomials(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

pub fn monomial_basis(n: usize, r: u32) -> MonomialBasis {
    MonomialBasis::new(n, r)
}

/// Rows are points, columns are monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalMatrix {
    field: FieldSpec,
    basis: MonomialBasis,
    rows: Vec<Vec<Scalar>>,
}

impl EvalMatrix {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(self.field, self.ncols(), &self.rows)
    }

    /// The matrix with row `i` removed.
    pub fn without_row(&self, i: usize) -> EvalMatrix {
        let mut rows = self.rows.clone();
        rows.remove(i);
        EvalMatrix {
            field: self.field,
            basis: self.basis.clone(),
            rows,
        }
    }
}

pub fn eval_matrix(gamma: &PointSet, r: u32) -> EvalMatrix {
    let basis = MonomialBasis::new(gamma.ambient_dim(), r);
    let rows = gamma.iter().map(|p| basis.evaluate(p)).collect();
    EvalMatrix {
        field: gamma.field(),
        basis,
        rows,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProfile {
    pub rank: usize,
    /// Coefficient vectors of a basis of the forms vanishing on every row's
    /// point, in reduced echelon form.
    pub kernel_basis: Vec<Vec<Scalar>>,
}

pub fn rank_kernel(m: &EvalMatrix) -> RankProfile {
    let ech = linalg::rref(m.field, m.ncols(), &m.rows);
    RankProfile {
        rank: ech.rank(),
        kernel_basis: ech.nullspace(m.field),
    }
}

/// A homogeneous form given by its coefficients on a [`MonomialBasis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    field: FieldSpec,
    basis: MonomialBasis,
    coeffs: Vec<Scalar>,
}

impl Form {
    pub fn new(field: FieldSpec, basis: MonomialBasis, coeffs: Vec<Scalar>) -> Result<Form> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        for c in &coeffs {
            field.check(c)?;
        }
        Ok(Form { field, basis, coeffs })
    }

    /// Builds a form from `(coefficient, exponent vector)` terms.
    pub fn from_terms(field: FieldSpec, n: usize, r: u32, terms: &[Term]) -> Result<Form> {
        let basis = MonomialBasis::new(n, r);
        let mut coeffs = vec![field.zero(); basis.len()];
        for t in terms {
            let idx = basis.index_of(&t.exponents).ok_or_else(|| {
                Error::InvalidParams(format!("{:?} is not a degree-{r} monomial in {} variables", t.exponents, n + 1))
            })?;
            coeffs[idx] = &coeffs[idx] + &field.parse(&t.coeff)?;
        }
        Ok(Form { field, basis, coeffs })
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> u32 {
        self.basis.r
    }

    pub fn eval(&self, p: &ProjPoint) -> Scalar {
        linalg::dot(self.field, &self.coeffs, &self.basis.evaluate(p))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Nonzero terms, in monomial order.
    pub fn terms(&self) -> Vec<Term> {
        self.coeffs
            .iter()
            .zip(self.basis.monomials())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, m)| Term {
                coeff: c.to_string(),
                exponents: m.clone(),
            })
            .collect()
    }
}

impl std::fmt::Display for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coeff)?;
            for (i, &e) in t.exponents.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl Serialize for Form {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms().serialize(s)
    }
}

/// One monomial with its coefficient, as exchanged in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: String,
    pub exponents: Vec<u32>,
}

/// Kernel basis of `gamma` in degree `r` as forms, ready for JSON export.
pub fn vanishing_forms(gamma: &PointSet, r: u32) -> Vec<Form> {
    let m = eval_matrix(gamma, r);
    rank_kernel(&m)
        .kernel_basis
        .into_iter()
        .map(|coeffs| Form {
            field: m.field,
            basis: m.basis.clone(),
            coeffs,
        })
        .collect()
}
