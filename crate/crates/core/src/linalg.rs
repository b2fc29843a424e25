//! Exact row reduction.
//!
//! Over GF(p) this is plain Gauss-Jordan on machine residues. Over Q the rows are
//! cleared of denominators and brought to echelon form with fraction-free
//! (Bareiss) elimination; only the final back-substitution to reduced form
//! touches fractions. Both paths return the unique reduced row echelon form, so
//! echelon bases can be compared for equality directly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::field::{inv_mod, FieldSpec, Scalar};

/// Reduced row echelon form of a matrix: nonzero rows only, pivots ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Echelon {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Canonical basis of `{v : row · v = 0 for every row}`, itself in reduced echelon form.
    pub fn nullspace(&self, field: FieldSpec) -> Vec<Vec<Scalar>> {
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        let raw: Vec<Vec<Scalar>> = (0..self.ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![field.zero(); self.ncols];
                v[f] = field.one();
                for (row, &c) in self.rows.iter().zip(&self.pivots) {
                    v[c] = -&row[f];
                }
                v
            })
            .collect();
        rref(field, self.ncols, &raw).rows
    }
}

pub fn rref(field: FieldSpec, ncols: usize, rows: &[Vec<Scalar>]) -> Echelon {
    for r in rows {
        assert_eq!(r.len(), ncols, "row length does not match column count");
    }
    match field.modulus() {
        Some(p) => {
            let m = rows.iter().map(|r| residues(r)).collect();
            let (red, pivots) = rref_mod(p as u64, ncols, m);
            Echelon {
                rows: red
                    .into_iter()
                    .map(|r| r.into_iter().map(|v| field.from_u64(v)).collect())
                    .collect(),
                pivots,
                ncols,
            }
        }
        None => {
            let ints = rows.iter().map(|r| clear_denominators(r)).collect();
            let (ech, pivots) = bareiss_echelon(ints, ncols);
            let red = back_substitute(ech, &pivots);
            Echelon {
                rows: red
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|q| field.from_rational(q).expect("rational field"))
                            .collect()
                    })
                    .collect(),
                pivots,
                ncols,
            }
        }
    }
}

pub fn rank(field: FieldSpec, ncols: usize, rows: &[Vec<Scalar>]) -> usize {
    match field.modulus() {
        Some(p) => rank_mod(p as u64, ncols, rows.iter().map(|r| residues(r)).collect()),
        None => {
            let ints = rows.iter().map(|r| clear_denominators(r)).collect();
            bareiss_echelon(ints, ncols).1.len()
        }
    }
}

pub fn nullspace(field: FieldSpec, ncols: usize, rows: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    rref(field, ncols, rows).nullspace(field)
}

pub fn transpose(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    (0..ncols)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn dot(field: FieldSpec, a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = field.zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}

fn residues(row: &[Scalar]) -> Vec<u64> {
    row.iter()
        .map(|s| s.residue().expect("prime-field scalar") as u64)
        .collect()
}

/// Gauss-Jordan over GF(p); returns the nonzero reduced rows and pivot columns.
pub(crate) fn rref_mod(p: u64, ncols: usize, mut a: Vec<Vec<u64>>) -> (Vec<Vec<u64>>, Vec<usize>) {
    let m = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][c], p);
        for j in c..ncols {
            a[r][j] = a[r][j] * inv % p;
        }
        for i in 0..m {
            if i == r || a[i][c] == 0 {
                continue;
            }
            let f = a[i][c];
            for j in c..ncols {
                if a[r][j] != 0 {
                    a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Rank over GF(p) by forward elimination only.
pub(crate) fn rank_mod(p: u64, ncols: usize, mut a: Vec<Vec<u64>>) -> usize {
    let m = a.len();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][c], p);
        for i in r + 1..m {
            if a[i][c] == 0 {
                continue;
            }
            let f = a[i][c] * inv % p;
            for j in c..ncols {
                if a[r][j] != 0 {
                    a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
                }
            }
        }
        r += 1;
    }
    r
}

fn clear_denominators(row: &[Scalar]) -> Vec<BigInt> {
    let qs: Vec<&BigRational> = row
        .iter()
        .map(|s| s.as_rational().expect("rational scalar"))
        .collect();
    let lcm = qs
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    qs.iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect()
}

/// Fraction-free echelon form. Every intermediate entry is a minor of the
/// input, so the division by the previous pivot is exact.
pub(crate) fn bareiss_echelon(mut a: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let m = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..ncols {
                let num = &pivot_row[c] * &row[j] - &f * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero());
                row[j] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

fn back_substitute(ech: Vec<Vec<BigInt>>, pivots: &[usize]) -> Vec<Vec<BigRational>> {
    let mut rows: Vec<Vec<BigRational>> = ech
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    for i in (0..rows.len()).rev() {
        let c = pivots[i];
        let lead = rows[i][c].clone();
        for v in rows[i].iter_mut().skip(c) {
            *v = &*v / &lead;
        }
        let (above, from_i) = rows.split_at_mut(i);
        let pivot_row = &from_i[0];
        for row in above.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..row.len() {
                if !pivot_row[j].is_zero() {
                    row[j] = &row[j] - &f * &pivot_row[j];
                }
            }
        }
    }
    rows
}
