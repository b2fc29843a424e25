//! Exact scalars over a prime field GF(p) or the rationals.
//!
//! A [`FieldSpec`] is a small `Copy` descriptor; every [`Scalar`] remembers the
//! field it lives in so mixing fields is detected instead of silently producing
//! garbage. Scalars are always stored in canonical form: residues in `[0, p)`,
//! fractions fully reduced with a positive denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible modulus (exclusive).
pub const MAX_PRIME: u64 = 1 << 31;

/// The coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "FieldWire", into = "FieldWire")]
pub struct FieldSpec(Kind);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Prime(u32),
    Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FieldWire {
    Prime { p: u64 },
    Rational,
}

impl TryFrom<FieldWire> for FieldSpec {
    type Error = Error;
    fn try_from(w: FieldWire) -> Result<Self> {
        match w {
            FieldWire::Prime { p } => FieldSpec::prime(p),
            FieldWire::Rational => Ok(FieldSpec::rationals()),
        }
    }
}

impl From<FieldSpec> for FieldWire {
    fn from(f: FieldSpec) -> Self {
        match f.0 {
            Kind::Prime(p) => FieldWire::Prime { p: p as u64 },
            Kind::Rational => FieldWire::Rational,
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldSpec {
    /// GF(p). Rejects composite `p` and `p >= 2^31`.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= MAX_PRIME {
            return Err(Error::InvalidField(format!("modulus {p} is not below 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(FieldSpec(Kind::Prime(p as u32)))
    }

    pub fn rationals() -> Self {
        FieldSpec(Kind::Rational)
    }

    /// The modulus, or `None` for the rationals.
    pub fn modulus(&self) -> Option<u32> {
        match self.0 {
            Kind::Prime(p) => Some(p),
            Kind::Rational => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Kind::Rational)
    }

    /// Number of elements, `None` when infinite.
    pub fn size(&self) -> Option<u64> {
        self.modulus().map(u64::from)
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self.0 {
            Kind::Prime(p) => Scalar(Repr::Mod {
                v: v.rem_euclid(p as i64) as u32,
                p,
            }),
            Kind::Rational => Scalar(Repr::Rat(BigRational::from_integer(BigInt::from(v)))),
        }
    }

    /// A residue given as `u64`; reduced modulo `p` (or taken literally over Q).
    pub fn from_u64(&self, v: u64) -> Scalar {
        match self.0 {
            Kind::Prime(p) => Scalar(Repr::Mod {
                v: (v % p as u64) as u32,
                p,
            }),
            Kind::Rational => Scalar(Repr::Rat(BigRational::from_integer(BigInt::from(v)))),
        }
    }

    pub fn from_rational(&self, q: BigRational) -> Result<Scalar> {
        match self.0 {
            Kind::Prime(p) => reduce_rational(&q, p).ok_or(Error::DivisionByZero),
            Kind::Rational => Ok(Scalar(Repr::Rat(q))),
        }
    }

    /// Parses `"17"`, `"-3"` or `"num/den"`. Over GF(p) fractions are reduced mod `p`.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::ParseScalar(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (
                BigInt::from_str(n.trim()).map_err(|_| bad())?,
                BigInt::from_str(d.trim()).map_err(|_| bad())?,
            ),
            None => (BigInt::from_str(s).map_err(|_| bad())?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.from_rational(BigRational::new(num, den))
    }

    /// Decodes the scalar JSON encoding: integers for prime fields, strings otherwise.
    pub fn scalar_from_json(&self, v: &serde_json::Value) -> Result<Scalar> {
        match v {
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(self.from_i64(i)),
                None => Err(Error::ParseScalar(n.to_string())),
            },
            serde_json::Value::String(s) => self.parse(s),
            other => Err(Error::ParseScalar(other.to_string())),
        }
    }

    pub fn check(&self, s: &Scalar) -> Result<()> {
        if s.field() == *self {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Kind::Prime(p) => write!(f, "GF({p})"),
            Kind::Rational => write!(f, "Q"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;
    /// `"Q"` for the rationals, otherwise a prime modulus.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::rationals());
        }
        let p: u64 = s
            .parse()
            .map_err(|_| Error::InvalidField(format!("expected a prime or Q, got {s:?}")))?;
        FieldSpec::prime(p)
    }
}

fn reduce_rational(q: &BigRational, p: u32) -> Option<Scalar> {
    let pb = BigInt::from(p);
    let num = q.numer().mod_floor(&pb).to_u64()?;
    let den = q.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let v = num * inv_mod(den, p as u64) % p as u64;
    Some(Scalar(Repr::Mod { v: v as u32, p }))
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue via Fermat.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// An element of a [`FieldSpec`], in canonical form.
///
/// Operators (`+`, `-`, `*`, unary `-`) panic when the operands come from
/// different fields; the `checked_*` methods report [`Error::MixedFields`]
/// instead.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(Repr);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Mod { v: u32, p: u32 },
    Rat(BigRational),
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match &self.0 {
            Repr::Mod { p, .. } => FieldSpec(Kind::Prime(*p)),
            Repr::Rat(_) => FieldSpec(Kind::Rational),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Mod { v, .. } => *v == 0,
            Repr::Rat(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Mod { v, .. } => *v == 1,
            Repr::Rat(q) => q.is_one(),
        }
    }

    /// The residue, for prime-field scalars.
    pub fn residue(&self) -> Option<u32> {
        match &self.0 {
            Repr::Mod { v, .. } => Some(*v),
            Repr::Rat(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(q) => Some(q),
            Repr::Mod { .. } => None,
        }
    }

    /// Image of a rational scalar in GF(p); `None` if the denominator vanishes mod `p`.
    pub fn reduce_mod(&self, field: FieldSpec) -> Option<Scalar> {
        match (&self.0, field.0) {
            (Repr::Rat(q), Kind::Prime(p)) => reduce_rational(q, p),
            (Repr::Mod { p: a, .. }, Kind::Prime(b)) if *a == b => Some(self.clone()),
            _ => None,
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        match (&self.0, &other.0) {
            (Repr::Mod { v: a, p }, Repr::Mod { v: b, p: q }) if p == q => Ok(Scalar(Repr::Mod {
                v: ((*a as u64 + *b as u64) % *p as u64) as u32,
                p: *p,
            })),
            (Repr::Rat(a), Repr::Rat(b)) => Ok(Scalar(Repr::Rat(a + b))),
            _ => Err(Error::MixedFields),
        }
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        match (&self.0, &other.0) {
            (Repr::Mod { v: a, p }, Repr::Mod { v: b, p: q }) if p == q => Ok(Scalar(Repr::Mod {
                v: ((*a as u64 * *b as u64) % *p as u64) as u32,
                p: *p,
            })),
            (Repr::Rat(a), Repr::Rat(b)) => Ok(Scalar(Repr::Rat(a * b))),
            _ => Err(Error::MixedFields),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Mod { v, p } => Scalar(Repr::Mod {
                v: inv_mod(*v as u64, *p as u64) as u32,
                p: *p,
            }),
            Repr::Rat(q) => Scalar(Repr::Rat(q.recip())),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        if self.field() != other.field() {
            return Err(Error::MixedFields);
        }
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, mut exp: u32) -> Scalar {
        let mut acc = self.field().one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// JSON encoding: a number for prime fields, a `"num/den"` string for rationals.
    pub fn to_json(&self) -> serde_json::Value {
        match &self.0 {
            Repr::Mod { v, .. } => serde_json::Value::from(*v),
            Repr::Rat(_) => serde_json::Value::String(self.to_string()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Mod { v, .. } => write!(f, "{v}"),
            Repr::Rat(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Repr::Rat(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Mod { v, p } => Scalar(Repr::Mod {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            }),
            Repr::Rat(q) => Scalar(Repr::Rat(-q)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar operands from different fields")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
