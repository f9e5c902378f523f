//! Univariate rational functions over ℚ in one indeterminate `a`.
//!
//! Numerator and denominator are dense coefficient vectors in ascending
//! degree. The stored form is canonical: coprime, denominator monic, zero is
//! `0/1`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};

pub(crate) type QPoly = Vec<BigRational>;

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn degree(p: &QPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

fn poly_add(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let mut out: QPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x + y
        })
        .collect();
    trim(&mut out);
    out
}

fn poly_neg(a: &QPoly) -> QPoly {
    a.iter().map(|c| -c.clone()).collect()
}

fn poly_mul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut rem = a.clone();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let coef = &rem[dr] / &lead;
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate() {
            rem[shift + j] -= &coef * bj;
        }
        quot[shift] = coef;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

fn make_monic(p: &mut QPoly) -> BigRational {
    let lead = p.last().cloned().unwrap_or_else(BigRational::one);
    for c in p.iter_mut() {
        *c = &*c / &lead;
    }
    lead
}

fn poly_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    if !x.is_empty() {
        make_monic(&mut x);
    }
    x
}

fn lowest_nonzero(p: &QPoly) -> Option<usize> {
    p.iter().position(|c| !c.is_zero())
}

/// Element of ℚ(a).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: QPoly,
    den: QPoly,
}

impl RatFn {
    pub fn new(num: Vec<BigRational>, den: Vec<BigRational>) -> Result<Self> {
        let mut den = den;
        trim(&mut den);
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let mut num = num;
        trim(&mut num);
        Ok(Self::normalized(num, den))
    }

    fn normalized(mut num: QPoly, mut den: QPoly) -> Self {
        if num.is_empty() {
            return RatFn { num, den: vec![BigRational::one()] };
        }
        let g = poly_gcd(&num, &den);
        if g.len() > 1 {
            num = poly_divrem(&num, &g).0;
            den = poly_divrem(&den, &g).0;
        }
        let lead = make_monic(&mut den);
        for c in num.iter_mut() {
            *c = &*c / &lead;
        }
        RatFn { num, den }
    }

    pub fn zero() -> Self {
        RatFn { num: Vec::new(), den: vec![BigRational::one()] }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            RatFn { num: vec![c], den: vec![BigRational::one()] }
        }
    }

    /// The indeterminate `a`.
    pub fn var() -> Self {
        RatFn { num: vec![BigRational::zero(), BigRational::one()], den: vec![BigRational::one()] }
    }

    pub fn numerator(&self) -> &[BigRational] {
        &self.num
    }

    pub fn denominator(&self) -> &[BigRational] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalized(poly_add(&self.num, &o.num), self.den.clone());
        }
        let n = poly_add(&poly_mul(&self.num, &o.den), &poly_mul(&o.num, &self.den));
        Self::normalized(n, poly_mul(&self.den, &o.den))
    }

    pub fn neg(&self) -> Self {
        RatFn { num: poly_neg(&self.num), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::normalized(poly_mul(&self.num, &o.num), poly_mul(&self.den, &o.den))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    /// Order of vanishing at `a = 0`; `None` for zero.
    pub fn valuation_at_zero(&self) -> Option<i64> {
        let vn = lowest_nonzero(&self.num)? as i64;
        let vd = lowest_nonzero(&self.den).unwrap_or(0) as i64;
        Some(vn - vd)
    }

    /// deg(num) − deg(den); the pole order at infinity. `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        Some(degree(&self.num)? as i64 - degree(&self.den).unwrap_or(0) as i64)
    }

    /// Multiply by `a^k` (k may be negative).
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let pad = |p: &QPoly, n: usize| {
            let mut v = vec![BigRational::zero(); n];
            v.extend(p.iter().cloned());
            v
        };
        if k > 0 {
            Self::normalized(pad(&self.num, k as usize), self.den.clone())
        } else {
            Self::normalized(self.num.clone(), pad(&self.den, (-k) as usize))
        }
    }

    /// Value at `a = 0`; requires nonnegative valuation.
    pub fn eval_at_zero(&self) -> Result<BigRational> {
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        let d0 = self.den[0].clone();
        if d0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num[0].clone() / d0)
    }

    /// Value at `a = ∞`; requires degree ≤ 0.
    pub fn eval_at_infinity(&self) -> Result<BigRational> {
        match self.degree() {
            None => Ok(BigRational::zero()),
            Some(d) if d < 0 => Ok(BigRational::zero()),
            Some(0) => Ok(self.num.last().unwrap().clone() / self.den.last().unwrap().clone()),
            Some(_) => Err(Error::DivisionByZero),
        }
    }

    pub fn eval(&self, a: &BigRational) -> Result<BigRational> {
        let ev = |p: &QPoly| p.iter().rev().fold(BigRational::zero(), |acc, c| acc * a + c);
        let d = ev(&self.den);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ev(&self.num) / d)
    }

    pub(crate) fn cmp_key(&self, other: &Self) -> Ordering {
        self.num.cmp(&other.num).then_with(|| self.den.cmp(&other.den))
    }

    pub fn display(&self) -> String {
        let show = |p: &QPoly| -> String {
            if p.is_empty() {
                return "0".into();
            }
            let mut terms = Vec::new();
            for (i, c) in p.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let cs = if c.is_negative() { format!("({c})") } else { c.to_string() };
                terms.push(match i {
                    0 => cs,
                    1 => format!("{cs}*a"),
                    _ => format!("{cs}*a^{i}"),
                });
            }
            terms.join(" + ")
        };
        if self.den.len() == 1 {
            show(&self.num)
        } else {
            format!("({})/({})", show(&self.num), show(&self.den))
        }
    }
}

#[cfg(test)]
pub(crate) fn rational_from_ints(n: i64, d: i64) -> BigRational {
    BigRational::new(num_bigint::BigInt::from(n), num_bigint::BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        rational_from_ints(n, 1)
    }

    #[test]
    fn gcd_cancellation() {
        // (a^2 - 1)/(a - 1) = a + 1
        let f = RatFn::new(vec![q(-1), q(0), q(1)], vec![q(-1), q(1)]).unwrap();
        assert_eq!(f, RatFn::new(vec![q(1), q(1)], vec![q(1)]).unwrap());
    }

    #[test]
    fn denominator_is_monic() {
        let f = RatFn::new(vec![q(1)], vec![q(0), q(2)]).unwrap();
        assert_eq!(f.denominator(), &[q(0), q(1)]);
        assert_eq!(f.numerator(), &[rational_from_ints(1, 2)]);
    }

    #[test]
    fn valuation_and_degree() {
        let f = RatFn::new(vec![q(0), q(0), q(3)], vec![q(0), q(1), q(1)]).unwrap();
        assert_eq!(f.valuation_at_zero(), Some(1));
        assert_eq!(f.degree(), Some(0));
        assert_eq!(f.eval_at_infinity().unwrap(), q(3));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(RatFn::new(vec![q(1)], vec![]), Err(Error::DivisionByZero));
    }
}
