//! Sparse multivariate polynomials over ℚ in named variables.
//!
//! Used for chart equations: derived coefficient expressions, Jacobians,
//! Hessians, branch factorization and canonical equation strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::coeffs::{CoeffRing, Field, Scalar};
use crate::error::{Error, Result};
use crate::linalg::Subspace;

/// Exponent map, variable name → positive exponent.
pub type Monomial = BTreeMap<String, u32>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn mono_degree(m: &Monomial) -> u32 {
    m.values().sum()
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (v, e) in b {
        *out.entry(v.clone()).or_insert(0) += e;
    }
    out
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        let mut m = Monomial::new();
        m.insert(name.to_string(), 1);
        let mut terms = BTreeMap::new();
        terms.insert(m, BigRational::one());
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.keys().cloned()).collect()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(mono_degree).max()
    }

    /// Lowest degree of a monomial with nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(mono_degree).min()
    }

    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            terms: self.terms.iter().filter(|(m, _)| mono_degree(m) == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn derivative(&self, var: &str) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some(&e) = m.get(var) {
                let mut m2 = m.clone();
                if e == 1 {
                    m2.remove(var);
                } else {
                    m2.insert(var.to_string(), e - 1);
                }
                out.add_term(m2, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    pub fn substitute(&self, var: &str, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let e = rest.remove(var).unwrap_or(0);
            let mut term = Poly { terms: BTreeMap::from([(rest, c.clone())]) };
            for _ in 0..e {
                term = term.mul(value);
            }
            out = out.add(&term);
        }
        out
    }

    pub fn substitute_all(&self, values: &HashMap<String, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (v, e) in m {
                let base = values.get(v).cloned().unwrap_or_else(|| Poly::var(v));
                for _ in 0..*e {
                    term = term.mul(&base);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluate at rational values; missing variables count as zero.
    pub fn eval(&self, values: &HashMap<String, BigRational>) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                let x = values.get(v).cloned().unwrap_or_else(BigRational::zero);
                for _ in 0..*e {
                    t *= &x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluate in another coefficient ring. Coefficients must be integers;
    /// missing variables are an error.
    pub fn eval_in<R: CoeffRing>(&self, values: &HashMap<String, R>, proto: &R) -> Result<R> {
        let mut acc = proto.zero_like();
        for (m, c) in &self.terms {
            if !c.is_integer() {
                return Err(Error::Precondition(format!("non-integer coefficient {c}")));
            }
            let n = c.to_integer().to_i64().ok_or_else(|| Error::Precondition("coefficient overflow".into()))?;
            let mut t = proto.from_int_like(n);
            for (v, e) in m {
                let x = values.get(v).ok_or_else(|| Error::Precondition(format!("no value for {v}")))?;
                t = t.times(&x.pow(*e));
            }
            acc = acc.plus(&t);
        }
        Ok(acc)
    }

    /// Symmetric Hessian of the quadratic part at the origin, over `vars`.
    pub fn hessian_at_origin(&self, vars: &[String]) -> Vec<Vec<BigRational>> {
        vars.iter()
            .map(|u| {
                let du = self.derivative(u);
                vars.iter()
                    .map(|w| du.derivative(w).eval(&HashMap::new()))
                    .collect()
            })
            .collect()
    }

    /// Highest exponent of `var` in any term.
    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms.keys().map(|m| m.get(var).copied().unwrap_or(0)).max().unwrap_or(0)
    }

    /// `(A, B)` with `self = A·var + B` and `A`, `B` free of `var`, when
    /// `self` has degree at most one in `var`.
    pub fn split_linear(&self, var: &str) -> Option<(Poly, Poly)> {
        if self.degree_in(var) > 1 {
            return None;
        }
        let mut a = Poly::zero();
        let mut b = Poly::zero();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            if rest.remove(var).is_some() {
                a.add_term(rest, c.clone());
            } else {
                b.add_term(rest, c.clone());
            }
        }
        Some((a, b))
    }

    /// The same polynomial with every variable renamed.
    pub fn rename_vars(&self, f: impl Fn(&str) -> String) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let m2: Monomial = m.iter().map(|(v, e)| (f(v), *e)).collect();
            out.add_term(m2, c.clone());
        }
        out
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&Monomial::new()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn jacobian_row(&self, vars: &[String]) -> Vec<Poly> {
        vars.iter().map(|v| self.derivative(v)).collect()
    }
}

/// Rank of a rational matrix.
pub fn rational_rank(m: &[Vec<BigRational>]) -> usize {
    let n = m.first().map_or(0, Vec::len);
    Subspace::span(Field::Rational, n, m.iter().map(|r| r.iter().cloned().map(Scalar::Q).collect())).rank()
}

impl CoeffRing for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero()
    }
    fn one_like(&self) -> Self {
        Poly::int(1)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn from_int_like(&self, n: i64) -> Self {
        Poly::int(n)
    }
}

fn mono_string(m: &Monomial) -> String {
    m.iter()
        .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Poly {
    /// Canonical rendering: terms by descending degree then variable order,
    /// `a*b - c` style, `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ts: Vec<(&Monomial, &BigRational)> = self.terms.iter().collect();
        ts.sort_by(|(a, _), (b, _)| mono_degree(b).cmp(&mono_degree(a)).then_with(|| a.cmp(b)));
        let mut out = String::new();
        for (k, (m, c)) in ts.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            let body = match (m.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => mono_string(m),
                (false, false) => format!("{mag}*{}", mono_string(m)),
            };
            match (k, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body)
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body)
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body)
                }
            }
        }
        write!(f, "{out}")
    }
}

/// Polynomial equation `lhs = rhs`, rendered canonically as `lhs - rhs = 0`
/// unless the right side is zero, in which case `lhs = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Poly,
    pub rhs: Poly,
}

impl Equation {
    pub fn new(lhs: Poly, rhs: Poly) -> Self {
        Equation { lhs, rhs }
    }

    pub fn vanishing(p: Poly) -> Self {
        Equation { lhs: p, rhs: Poly::zero() }
    }

    pub fn residual(&self) -> Poly {
        self.lhs.sub(&self.rhs)
    }

    pub fn holds_identically(&self) -> bool {
        self.residual().is_zero()
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.residual())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_canonical() {
        let p = Poly::var("b_1").mul(&Poly::var("c_1")).sub(&Poly::var("t"));
        assert_eq!(Equation::vanishing(p).to_string(), "b_1*c_1 - t = 0");
        assert_eq!(Poly::var("a_1").neg().to_string(), "-a_1");
    }

    #[test]
    fn derivatives_and_jacobian() {
        let p = Poly::var("b").mul(&Poly::var("c")).sub(&Poly::var("t"));
        let j = p.jacobian_row(&["b".into(), "c".into(), "t".into()]);
        assert_eq!(j[0], Poly::var("c"));
        assert_eq!(j[1], Poly::var("b"));
        assert_eq!(j[2], Poly::int(-1));
    }

    #[test]
    fn hessian_rank_of_hyperbolic_pair() {
        let p = Poly::var("x").mul(&Poly::var("y"));
        let vars = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        assert_eq!(rational_rank(&p.hessian_at_origin(&vars)), 2);
    }

    #[test]
    fn substitution() {
        let p = Poly::var("x").mul(&Poly::var("x"));
        let q = p.substitute("x", &Poly::var("y").add(&Poly::int(1)));
        assert_eq!(q.to_string(), "y^2 + 2*y + 1");
    }
}
