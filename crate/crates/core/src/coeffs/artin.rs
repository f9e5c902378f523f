use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::ring::CoeffRing;
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Element `c_0 + c_1 ε + … + c_{n−1} ε^{n−1}` of the local test algebra
/// `k[ε]/(εⁿ)`. Order 1 is the base field itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArtinScalar {
    coeffs: Vec<Scalar>,
}

impl ArtinScalar {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::Precondition("artin order must be >= 1".into()));
        };
        let f = first.field();
        if coeffs.iter().any(|c| c.field() != f) {
            return Err(Error::FieldMismatch("mixed fields in artin scalar".into()));
        }
        Ok(ArtinScalar { coeffs })
    }

    pub fn from_scalar(c: Scalar, order: usize) -> Self {
        let f = c.field();
        let mut coeffs = vec![f.zero(); order.max(1)];
        coeffs[0] = c;
        ArtinScalar { coeffs }
    }

    pub fn zero(field: Field, order: usize) -> Self {
        ArtinScalar { coeffs: vec![field.zero(); order.max(1)] }
    }

    pub fn one(field: Field, order: usize) -> Self {
        Self::from_scalar(field.one(), order)
    }

    /// `c · ε^k`, zero when `k ≥ order`.
    pub fn eps_power(field: Field, order: usize, k: usize, c: Scalar) -> Self {
        let mut z = Self::zero(field, order);
        if k < z.coeffs.len() {
            z.coeffs[k] = c;
        }
        z
    }

    pub fn eps(field: Field, order: usize) -> Self {
        Self::eps_power(field, order, 1, field.one())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> Field {
        self.coeffs[0].field()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn constant(&self) -> &Scalar {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Unit iff the residue is nonzero.
    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// Lies in the maximal ideal (ε).
    pub fn in_maximal_ideal(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// ε-adic valuation; `order` for zero.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len())
    }

    fn check(&self, rhs: &Self) {
        assert_eq!(self.order(), rhs.order(), "artin order mismatch");
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::DivisionByZero);
        }
        // u = c0 (1 + w), w nilpotent: u^{-1} = c0^{-1} Σ (-w)^k
        let n = self.order();
        let c0inv = self.coeffs[0].inv()?;
        let scaled = self.scale(&c0inv);
        let one = Self::one(self.field(), n);
        let w = &scaled - &one;
        let neg_w = -&w;
        let mut acc = one.clone();
        let mut term = one;
        for _ in 1..n {
            term = &term * &neg_w;
            acc = &acc + &term;
        }
        Ok(acc.scale(&c0inv))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        ArtinScalar { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiply by ε^k.
    pub fn shift_eps(&self, k: usize) -> Self {
        let n = self.order();
        let f = self.field();
        let coeffs = (0..n).map(|i| if i >= k { self.coeffs[i - k].clone() } else { f.zero() }).collect();
        ArtinScalar { coeffs }
    }
}

impl<'a> Add<&'a ArtinScalar> for &'a ArtinScalar {
    type Output = ArtinScalar;
    fn add(self, rhs: &ArtinScalar) -> ArtinScalar {
        self.check(rhs);
        ArtinScalar { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a ArtinScalar> for &'a ArtinScalar {
    type Output = ArtinScalar;
    fn sub(self, rhs: &ArtinScalar) -> ArtinScalar {
        self.check(rhs);
        ArtinScalar { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a ArtinScalar> for &'a ArtinScalar {
    type Output = ArtinScalar;
    fn mul(self, rhs: &ArtinScalar) -> ArtinScalar {
        self.check(rhs);
        let n = self.order();
        let f = self.field();
        let mut out = vec![f.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        ArtinScalar { coeffs: out }
    }
}

impl Neg for &ArtinScalar {
    type Output = ArtinScalar;
    fn neg(self) -> ArtinScalar {
        ArtinScalar { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl CoeffRing for ArtinScalar {
    fn zero_like(&self) -> Self {
        Self::zero(self.field(), self.order())
    }
    fn one_like(&self) -> Self {
        Self::one(self.field(), self.order())
    }
    fn is_zero(&self) -> bool {
        ArtinScalar::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_int_like(&self, n: i64) -> Self {
        Self::from_scalar(self.field().from_i64(n), self.order())
    }
}

impl fmt::Display for ArtinScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 if c.is_one() => "e".to_string(),
                1 => format!("{c}e"),
                _ if c.is_one() => format!("e^{i}"),
                _ => format!("{c}e^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ArtinWire {
    order: usize,
    coeffs: Vec<Scalar>,
}

impl Serialize for ArtinScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArtinWire { order: self.order(), coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArtinScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = ArtinWire::deserialize(d)?;
        if w.order != w.coeffs.len() {
            return Err(D::Error::custom("order does not match coefficient count"));
        }
        ArtinScalar::new(w.coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::Prime(2)
    }

    #[test]
    fn unit_detection() {
        let one = ArtinScalar::one(f2(), 2);
        let e = ArtinScalar::eps(f2(), 2);
        assert!((&one + &e).is_unit());
        let e3 = ArtinScalar::eps(f2(), 3);
        assert!(!e3.is_unit());
        let sq = &e * &e;
        assert!(sq.is_zero());
        assert!(!sq.is_unit());
    }

    #[test]
    fn eps_nilpotent() {
        let n = 4;
        let e = ArtinScalar::eps(Field::Rational, n);
        assert!(e.pow(n as u32).is_zero());
        assert!(!e.pow(n as u32 - 1).is_zero());
    }

    #[test]
    fn inverse_of_unit() {
        let f = Field::Prime(5);
        let u = ArtinScalar::new(vec![f.from_i64(2), f.from_i64(3), f.from_i64(1)]).unwrap();
        let inv = u.inv().unwrap();
        assert_eq!(&u * &inv, ArtinScalar::one(f, 3));
        assert!(ArtinScalar::eps(f, 3).inv().is_err());
    }

    #[test]
    fn maximal_ideal_is_closed_exhaustive() {
        let f = Field::Prime(2);
        let all: Vec<ArtinScalar> = (0..8)
            .map(|b| {
                ArtinScalar::new((0..3).map(|k| f.from_i64((b >> k) & 1)).collect()).unwrap()
            })
            .collect();
        for a in all.iter().filter(|a| !a.is_unit()) {
            for b in &all {
                assert!(!(a * b).is_unit());
                if !b.is_unit() {
                    assert!(!(a + b).is_unit());
                }
            }
        }
    }

    #[test]
    fn json_round_trip_shape() {
        let a = ArtinScalar::eps(Field::Prime(3), 2);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"order":2,"coeffs":[{"Fp":{"p":3,"v":0}},{"Fp":{"p":3,"v":1}}]}"#);
        let back: ArtinScalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}

impl super::ring::LocalCoeff for ArtinScalar {
    fn is_unit(&self) -> bool {
        ArtinScalar::is_unit(self)
    }
    fn try_inverse(&self) -> Result<Self> {
        self.inv()
    }
    fn residue(&self) -> Scalar {
        self.coeffs[0].clone()
    }
    fn field(&self) -> Field {
        ArtinScalar::field(self)
    }
    fn from_scalar_like(&self, c: Scalar) -> Self {
        ArtinScalar::from_scalar(c, self.order())
    }
}
