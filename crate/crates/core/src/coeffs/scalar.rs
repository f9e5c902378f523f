use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::ratfn::RatFn;
use super::ring::CoeffRing;
use crate::error::{Error, Result};

/// Residue modulo a word-size prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    p: u64,
    v: u64,
}

impl Fp {
    pub fn new(p: u64, v: i64) -> Self {
        let r = v.rem_euclid(p as i64) as u64;
        Fp { p, v: r }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    fn mulmod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    fn inv(&self) -> Option<Fp> {
        if self.v == 0 {
            return None;
        }
        // Fermat: v^(p-2)
        let (mut base, mut e, mut acc) = (self.v, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::mulmod(acc, base, self.p);
            }
            base = Self::mulmod(base, base, self.p);
            e >>= 1;
        }
        Some(Fp { p: self.p, v: acc })
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A base field descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u64),
    /// ℚ(a), used for one-parameter families and their limits.
    RationalFunction,
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) && p < (1 << 31) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::Precondition(format!("{p} is not a supported prime")))
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Fp(Fp::new(*p, n)),
            Field::RationalFunction => {
                Scalar::RatFn(RatFn::constant(BigRational::from_integer(BigInt::from(n))))
            }
        }
    }

    pub fn rational(&self, n: i64, d: i64) -> Result<Scalar> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        self.from_i64(n).div(&self.from_i64(d))
    }

    /// Image of a rational number; in characteristic `p` the denominator
    /// must be prime to `p`.
    pub fn from_rational(&self, x: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Q(x.clone())),
            Field::RationalFunction => Ok(Scalar::RatFn(RatFn::constant(x.clone()))),
            Field::Prime(p) => {
                let m = BigInt::from(*p);
                let reduce = |v: &BigInt| Fp::new(*p, (((v % &m) + &m) % &m).to_i64().expect("residue fits"));
                let d = reduce(x.denom());
                if d.value() == 0 {
                    return Err(Error::DivisionByZero);
                }
                Scalar::Fp(reduce(x.numer())).div(&Scalar::Fp(d))
            }
        }
    }

    /// All elements, for finite fields.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            Field::Prime(p) => Some((0..*p as i64).map(|v| self.from_i64(v)).collect()),
            _ => None,
        }
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(*p),
            _ => None,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            _ => 0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Field::Rational => "Q".into(),
            Field::Prime(p) => p.to_string(),
            Field::RationalFunction => "Q(a)".into(),
        }
    }
}

/// An exact scalar: rational, prime-field residue, or element of ℚ(a).
///
/// Arithmetic between scalars of different fields is a programming error and
/// panics; inversion of zero is reported through [`Scalar::inv`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp(Fp),
    RatFn(RatFn),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::Fp(x) => Field::Prime(x.p),
            Scalar::RatFn(_) => Field::RationalFunction,
        }
    }

    pub fn q(n: i64, d: i64) -> Scalar {
        Scalar::Q(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn fp(p: u64, v: i64) -> Scalar {
        Scalar::Fp(Fp::new(p, v))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(x) => x.is_zero(),
            Scalar::Fp(x) => x.v == 0,
            Scalar::RatFn(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field().one()
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Q(x) => {
                if x.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Q(x.recip()))
                }
            }
            Scalar::Fp(x) => x.inv().map(Scalar::Fp).ok_or(Error::DivisionByZero),
            Scalar::RatFn(x) => x.inv().map(Scalar::RatFn),
        }
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.inv()?)
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp(a), Scalar::Fp(b)) if a.p == b.p => {
                Scalar::Fp(Fp { p: a.p, v: (a.v + b.v) % a.p })
            }
            (Scalar::RatFn(a), Scalar::RatFn(b)) => Scalar::RatFn(a.add(b)),
            _ => return Err(mismatch(self, rhs)),
        })
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp(a), Scalar::Fp(b)) if a.p == b.p => {
                Scalar::Fp(Fp { p: a.p, v: Fp::mulmod(a.v, b.v, a.p) })
            }
            (Scalar::RatFn(a), Scalar::RatFn(b)) => Scalar::RatFn(a.mul(b)),
            _ => return Err(mismatch(self, rhs)),
        })
    }

    fn neg_inner(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp(a) => Scalar::Fp(Fp { p: a.p, v: (a.p - a.v) % a.p }),
            Scalar::RatFn(a) => Scalar::RatFn(a.neg()),
        }
    }

    /// Lift a rational scalar into ℚ(a).
    pub fn to_ratfn(&self) -> Result<Scalar> {
        match self {
            Scalar::Q(x) => Ok(Scalar::RatFn(RatFn::constant(x.clone()))),
            Scalar::RatFn(_) => Ok(self.clone()),
            Scalar::Fp(_) => Err(Error::FieldMismatch("cannot lift F_p into Q(a)".into())),
        }
    }

    pub fn as_ratfn(&self) -> Option<&RatFn> {
        match self {
            Scalar::RatFn(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(r) => Some(r),
            _ => None,
        }
    }

    /// Small integer representative, for prime-field values and integral rationals.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Fp(x) => Some(x.v as i64),
            Scalar::Q(x) if x.is_integer() => x.to_integer().to_i64(),
            _ => None,
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> Error {
    Error::FieldMismatch(format!("{} vs {}", a.field().label(), b.field().label()))
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => a.cmp(b),
            (Scalar::Fp(a), Scalar::Fp(b)) => a.cmp(b),
            (Scalar::RatFn(a), Scalar::RatFn(b)) => a.cmp_key(b),
            _ => discriminant(self).cmp(&discriminant(other)),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn discriminant(s: &Scalar) -> u8 {
    match s {
        Scalar::Q(_) => 0,
        Scalar::Fp(_) => 1,
        Scalar::RatFn(_) => 2,
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(x) => write!(f, "{x}"),
            Scalar::Fp(x) => write!(f, "{}", x.v),
            Scalar::RatFn(x) => write!(f, "{}", x.display()),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar field mismatch")
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_add(&rhs.neg_inner()).expect("scalar field mismatch")
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar field mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_inner()
    }
}

impl CoeffRing for Scalar {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
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
        self.field().from_i64(n)
    }
}

// JSON wire format: {"Q": "p/q"} | {"Fp": {"p": p, "v": v}} | {"RatFn": {"num": [...], "den": [...]}}

#[derive(Serialize, Deserialize)]
struct FpWire {
    p: u64,
    v: u64,
}

#[derive(Serialize, Deserialize)]
struct RatFnWire {
    num: Vec<String>,
    den: Vec<String>,
}

#[derive(Serialize, Deserialize)]
enum ScalarWire {
    Q(String),
    Fp(FpWire),
    RatFn(RatFnWire),
}

pub(crate) fn rational_to_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        format!("{}/1", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self {
            Scalar::Q(x) => ScalarWire::Q(rational_to_string(x)),
            Scalar::Fp(x) => ScalarWire::Fp(FpWire { p: x.p, v: x.v }),
            Scalar::RatFn(r) => ScalarWire::RatFn(RatFnWire {
                num: r.numerator().iter().map(rational_to_string).collect(),
                den: r.denominator().iter().map(rational_to_string).collect(),
            }),
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = ScalarWire::deserialize(d)?;
        match wire {
            ScalarWire::Q(s) => parse_rational(&s).map(Scalar::Q).map_err(D::Error::custom),
            ScalarWire::Fp(FpWire { p, v }) => {
                if !is_prime(p) {
                    return Err(D::Error::custom(format!("{p} is not prime")));
                }
                Ok(Scalar::Fp(Fp::new(p, (v % p) as i64)))
            }
            ScalarWire::RatFn(RatFnWire { num, den }) => {
                let parse = |v: Vec<String>| -> Result<Vec<BigRational>> {
                    v.iter().map(|s| parse_rational(s)).collect()
                };
                let num = parse(num).map_err(D::Error::custom)?;
                let den = parse(den).map_err(D::Error::custom)?;
                RatFn::new(num, den).map(Scalar::RatFn).map_err(D::Error::custom)
            }
        }
    }
}

impl Scalar {
    /// Sign-aware short rendering used by equation strings.
    pub fn is_negative_rational(&self) -> bool {
        matches!(self, Scalar::Q(x) if x.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_two() {
        let f = Field::Prime(2);
        assert!((&f.one() + &f.one()).is_zero());
    }

    #[test]
    fn rational_inverse() {
        assert_eq!(Scalar::q(2, 3).inv().unwrap(), Scalar::q(3, 2));
    }

    #[test]
    fn zero_inverse_is_error() {
        assert_eq!(Field::Prime(5).zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(Scalar::q(0, 1).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn ratfn_reduction() {
        let a = Scalar::RatFn(RatFn::var());
        let one = Field::RationalFunction.one();
        let num = &(&a * &a) - &one;
        let den = &a - &one;
        assert_eq!(num.div(&den).unwrap(), &a + &one);
    }

    #[test]
    fn exhaustive_small_field_axioms() {
        for p in [2u64, 3] {
            let f = Field::Prime(p);
            let els = f.elements().unwrap();
            for a in &els {
                for b in &els {
                    for c in &els {
                        assert_eq!(&(a * b) * c, a * &(b * c));
                        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                    }
                }
                if !a.is_zero() {
                    assert!((a * &a.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn json_wire_format() {
        let s = Scalar::fp(7, 3);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"Fp":{"p":7,"v":3}}"#);
        let q = Scalar::q(-2, 4);
        assert_eq!(serde_json::to_string(&q).unwrap(), r#"{"Q":"-1/2"}"#);
        let back: Scalar = serde_json::from_str(r#"{"Q":"-1/2"}"#).unwrap();
        assert_eq!(back, q);
        let r: Scalar = serde_json::from_str(r#"{"RatFn":{"num":["0/1","1/1"],"den":["1/1"]}}"#).unwrap();
        assert_eq!(r, Scalar::RatFn(RatFn::var()));
    }
}

impl super::ring::LocalCoeff for Scalar {
    fn is_unit(&self) -> bool {
        !self.is_zero()
    }
    fn try_inverse(&self) -> Result<Self> {
        self.inv()
    }
    fn residue(&self) -> Scalar {
        self.clone()
    }
    fn field(&self) -> Field {
        Scalar::field(self)
    }
    fn from_scalar_like(&self, c: Scalar) -> Self {
        c
    }
}
