//! Truncated node ring `R_N = k[x,y]/(xy, x^{N+1}, y^{N+1})` and its relative
//! version over a local base where `xy = t`.
//!
//! Elements are `c + Σ b_i x^i + Σ c_j y^j` with `1 ≤ i, j ≤ N`. Monomials are
//! addressed by slot: 0 is `1`, slots `1..=N` are `x^i`, slots `N+1..=2N` are
//! `y^j`.

use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::coeffs::{ArtinScalar, CoeffRing, Field, LocalCoeff, Scalar};
use crate::error::{Error, Result};

/// The relation between `x` and `y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Relation<R> {
    /// `xy = 0`.
    Absolute,
    /// `xy = t` for a fixed non-unit `t` of the base.
    Relative(R),
}

/// Parameters of a truncated node ring: truncation order, relation and a
/// prototype coefficient fixing the base ring at runtime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeRing<R = Scalar> {
    trunc: usize,
    relation: Relation<R>,
    zero: R,
}

impl<R: CoeffRing> NodeRing<R> {
    pub fn absolute(proto: &R, trunc: usize) -> Self {
        NodeRing { trunc, relation: Relation::Absolute, zero: proto.zero_like() }
    }

    pub fn relative(t: R, trunc: usize) -> Self {
        let zero = t.zero_like();
        NodeRing { trunc, relation: Relation::Relative(t), zero }
    }

    pub fn trunc_order(&self) -> usize {
        self.trunc
    }

    pub fn relation(&self) -> &Relation<R> {
        &self.relation
    }

    pub fn is_absolute(&self) -> bool {
        matches!(self.relation, Relation::Absolute)
    }

    pub fn t(&self) -> Option<&R> {
        match &self.relation {
            Relation::Absolute => None,
            Relation::Relative(t) => Some(t),
        }
    }

    pub fn coeff_zero(&self) -> R {
        self.zero.clone()
    }

    pub fn coeff_one(&self) -> R {
        self.zero.one_like()
    }

    /// Number of monomial slots, `2N + 1`.
    pub fn slots(&self) -> usize {
        2 * self.trunc + 1
    }

    pub fn zero(&self) -> NodeSeries<R> {
        NodeSeries {
            ring: self.clone(),
            c: self.coeff_zero(),
            x: vec![self.coeff_zero(); self.trunc],
            y: vec![self.coeff_zero(); self.trunc],
        }
    }

    pub fn constant(&self, c: R) -> NodeSeries<R> {
        let mut z = self.zero();
        z.c = c;
        z
    }

    pub fn one(&self) -> NodeSeries<R> {
        self.constant(self.coeff_one())
    }

    /// `c · x^i`; zero when `i > N`.
    pub fn x_term(&self, i: usize, c: R) -> NodeSeries<R> {
        self.monomial(MonomialKind::X(i), c)
    }

    /// `c · y^j`; zero when `j > N`.
    pub fn y_term(&self, j: usize, c: R) -> NodeSeries<R> {
        self.monomial(MonomialKind::Y(j), c)
    }

    pub fn x_pow(&self, i: usize) -> NodeSeries<R> {
        self.x_term(i, self.coeff_one())
    }

    pub fn y_pow(&self, j: usize) -> NodeSeries<R> {
        self.y_term(j, self.coeff_one())
    }

    fn monomial(&self, m: MonomialKind, c: R) -> NodeSeries<R> {
        let mut z = self.zero();
        z.add_at(m, c);
        z
    }

    /// Element with the given coefficients; lists shorter than `N` are
    /// padded with zeros, longer ones are rejected.
    pub fn element(&self, c: R, x: Vec<R>, y: Vec<R>) -> Result<NodeSeries<R>> {
        if x.len() > self.trunc || y.len() > self.trunc {
            return Err(Error::TruncationTooSmall(self.trunc));
        }
        let mut z = self.zero();
        z.c = c;
        for (i, v) in x.into_iter().enumerate() {
            z.x[i] = v;
        }
        for (j, v) in y.into_iter().enumerate() {
            z.y[j] = v;
        }
        Ok(z)
    }

    /// Element from coefficients indexed by monomial slot.
    pub fn from_slots(&self, coeffs: Vec<R>) -> Result<NodeSeries<R>> {
        if coeffs.len() != self.slots() {
            return Err(Error::InvalidIndex(format!("expected {} slots, got {}", self.slots(), coeffs.len())));
        }
        let mut it = coeffs.into_iter();
        let c = it.next().expect("slot 0");
        let x: Vec<R> = it.by_ref().take(self.trunc).collect();
        let y: Vec<R> = it.collect();
        self.element(c, x, y)
    }

    pub fn with_trunc(&self, trunc: usize) -> Self {
        NodeRing { trunc, relation: self.relation.clone(), zero: self.zero.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MonomialKind {
    One,
    X(usize),
    Y(usize),
}

/// An element of a truncated node ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeSeries<R = Scalar> {
    ring: NodeRing<R>,
    c: R,
    x: Vec<R>,
    y: Vec<R>,
}

impl<R: CoeffRing> NodeSeries<R> {
    pub fn ring(&self) -> &NodeRing<R> {
        &self.ring
    }

    pub fn trunc_order(&self) -> usize {
        self.ring.trunc
    }

    pub fn const_term(&self) -> &R {
        &self.c
    }

    /// Coefficient of `x^i`, `1 ≤ i ≤ N`; zero outside that range.
    pub fn x_coeff(&self, i: usize) -> R {
        if i >= 1 && i <= self.ring.trunc {
            self.x[i - 1].clone()
        } else {
            self.ring.coeff_zero()
        }
    }

    pub fn y_coeff(&self, j: usize) -> R {
        if j >= 1 && j <= self.ring.trunc {
            self.y[j - 1].clone()
        } else {
            self.ring.coeff_zero()
        }
    }

    pub fn x_coeffs(&self) -> &[R] {
        &self.x
    }

    pub fn y_coeffs(&self) -> &[R] {
        &self.y
    }

    pub fn slot_coeffs(&self) -> Vec<R> {
        std::iter::once(self.c.clone()).chain(self.x.iter().cloned()).chain(self.y.iter().cloned()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.x.iter().all(R::is_zero) && self.y.iter().all(R::is_zero)
    }

    /// Lowest `i` with a nonzero `x^i` coefficient.
    pub fn x_order(&self) -> Option<usize> {
        self.x.iter().position(|c| !c.is_zero()).map(|i| i + 1)
    }

    pub fn y_order(&self) -> Option<usize> {
        self.y.iter().position(|c| !c.is_zero()).map(|j| j + 1)
    }

    fn add_at(&mut self, m: MonomialKind, c: R) {
        if c.is_zero() {
            return;
        }
        match m {
            MonomialKind::One => self.c = self.c.plus(&c),
            MonomialKind::X(0) | MonomialKind::Y(0) => self.c = self.c.plus(&c),
            MonomialKind::X(i) if i <= self.ring.trunc => self.x[i - 1] = self.x[i - 1].plus(&c),
            MonomialKind::Y(j) if j <= self.ring.trunc => self.y[j - 1] = self.y[j - 1].plus(&c),
            _ => {}
        }
    }

    fn terms(&self) -> impl Iterator<Item = (MonomialKind, &R)> {
        std::iter::once((MonomialKind::One, &self.c))
            .chain(self.x.iter().enumerate().map(|(i, c)| (MonomialKind::X(i + 1), c)))
            .chain(self.y.iter().enumerate().map(|(j, c)| (MonomialKind::Y(j + 1), c)))
            .filter(|(_, c)| !c.is_zero())
    }

    fn check(&self, rhs: &Self) -> Result<()> {
        if self.ring.trunc != rhs.ring.trunc {
            return Err(Error::RingMismatch(format!(
                "truncation orders {} and {}",
                self.ring.trunc, rhs.ring.trunc
            )));
        }
        if self.ring.relation != rhs.ring.relation {
            return Err(Error::RingMismatch("relation modes differ".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        Ok(NodeSeries {
            ring: self.ring.clone(),
            c: self.c.plus(&rhs.c),
            x: self.x.iter().zip(&rhs.x).map(|(a, b)| a.plus(b)).collect(),
            y: self.y.iter().zip(&rhs.y).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negated())
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map_coeffs(|c| c.times(s))
    }

    fn map_coeffs(&self, f: impl Fn(&R) -> R) -> Self {
        NodeSeries {
            ring: self.ring.clone(),
            c: f(&self.c),
            x: self.x.iter().map(&f).collect(),
            y: self.y.iter().map(&f).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        let mut out = self.ring.zero();
        let t = self.ring.t().cloned();
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                let c = ca.times(cb);
                if c.is_zero() {
                    continue;
                }
                use MonomialKind::*;
                match (ma, mb) {
                    (One, m) | (m, One) => out.add_at(m, c),
                    (X(i), X(k)) => out.add_at(X(i + k), c),
                    (Y(j), Y(l)) => out.add_at(Y(j + l), c),
                    (X(i), Y(j)) | (Y(j), X(i)) => {
                        let Some(t) = &t else { continue };
                        let k = i.min(j);
                        let c = c.times(&t.pow(k as u32));
                        if i >= j {
                            out.add_at(X(i - j), c)
                        } else {
                            out.add_at(Y(j - i), c)
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Sum; panics when the operands live in different rings.
    pub fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("node series from the same ring")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.try_sub(rhs).expect("node series from the same ring")
    }

    /// Product; panics when the operands live in different rings.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("node series from the same ring")
    }

    /// Multiply by `x^i`.
    pub fn mul_x_pow(&self, i: usize) -> Self {
        self.mul(&self.ring.x_pow(i))
    }

    pub fn mul_y_pow(&self, j: usize) -> Self {
        self.mul(&self.ring.y_pow(j))
    }

    /// `z` together with its products by `x^i` and `y^j` (`1 ≤ i, j ≤ N`),
    /// zeros and repeats removed. Spans `(z)` inside the truncation as a
    /// module over the coefficient ring.
    pub fn monomial_multiples(&self) -> Vec<Self> {
        let n = self.ring.trunc;
        let mut out: Vec<Self> = Vec::new();
        let cands = std::iter::once(self.clone())
            .chain((1..=n).map(|i| self.mul_x_pow(i)))
            .chain((1..=n).map(|j| self.mul_y_pow(j)));
        for z in cands {
            if !z.is_zero() && !out.contains(&z) {
                out.push(z);
            }
        }
        out
    }

    /// Exchange the roles of `x` and `y`.
    pub fn mirror(&self) -> Self {
        NodeSeries { ring: self.ring.clone(), c: self.c.clone(), x: self.y.clone(), y: self.x.clone() }
    }

    /// Same element in a ring of another truncation order.
    pub fn retruncate(&self, trunc: usize) -> Self {
        let ring = self.ring.with_trunc(trunc);
        let mut z = ring.constant(self.c.clone());
        for (i, c) in self.x.iter().enumerate() {
            z.add_at(MonomialKind::X(i + 1), c.clone());
        }
        for (j, c) in self.y.iter().enumerate() {
            z.add_at(MonomialKind::Y(j + 1), c.clone());
        }
        z
    }
}

impl<R: LocalCoeff> NodeSeries<R> {
    pub fn is_unit(&self) -> bool {
        self.c.is_unit()
    }

    /// Inverse of a unit by the geometric series in its non-unit part.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::DivisionByZero);
        }
        let c0inv = self.c.try_inverse()?;
        let one = self.ring.one();
        // u = c0 (1 + w) with w topologically nilpotent in the truncation.
        let w = self.scale(&c0inv).sub(&one);
        let neg_w = w.neg();
        let mut acc = one.clone();
        let mut term = one;
        let cap = 4 * (self.ring.trunc + 1) * (self.ring.trunc + 1) + 64;
        for _ in 0..cap {
            term = term.mul(&neg_w);
            if term.is_zero() {
                return Ok(acc.scale(&c0inv));
            }
            acc = acc.add(&term);
        }
        Err(Error::Invariant("geometric series did not terminate".into()))
    }
}

impl NodeSeries<Scalar> {
    pub fn field(&self) -> Field {
        self.c.field()
    }

    /// The same element with coefficients in `k[ε]/(εⁿ)`.
    pub fn lift(&self, order: usize) -> NodeSeries<ArtinScalar> {
        let f = |c: &Scalar| ArtinScalar::from_scalar(c.clone(), order);
        let relation = match &self.ring.relation {
            Relation::Absolute => Relation::Absolute,
            Relation::Relative(t) => Relation::Relative(f(t)),
        };
        NodeSeries {
            ring: NodeRing { trunc: self.ring.trunc, relation, zero: f(&self.ring.zero) },
            c: f(&self.c),
            x: self.x.iter().map(f).collect(),
            y: self.y.iter().map(f).collect(),
        }
    }

    /// Coordinates over `k` in the monomial basis.
    pub fn k_coords(&self) -> Vec<Scalar> {
        self.slot_coeffs()
    }
}

impl NodeSeries<ArtinScalar> {
    pub fn artin_order(&self) -> usize {
        self.c.order()
    }

    pub fn field(&self) -> Field {
        self.c.field()
    }

    /// Coordinates over `k`: index `slot · n + e` holds the `ε^e` coefficient
    /// of the monomial in `slot`.
    pub fn k_coords(&self) -> Vec<Scalar> {
        self.slot_coeffs().iter().flat_map(|c| c.coeffs().iter().cloned()).collect()
    }

    pub fn from_k_coords(ring: &NodeRing<ArtinScalar>, v: &[Scalar]) -> Result<Self> {
        let n = ring.coeff_zero().order();
        if v.len() != ring.slots() * n {
            return Err(Error::InvalidIndex("coordinate vector length".into()));
        }
        let coeffs = v.chunks(n).map(|ch| ArtinScalar::new(ch.to_vec())).collect::<Result<Vec<_>>>()?;
        ring.from_slots(coeffs)
    }

    /// Residue modulo `ε`, an element of the absolute or relative ring over `k`.
    pub fn residue(&self) -> NodeSeries<Scalar> {
        let f = |c: &ArtinScalar| c.constant().clone();
        let relation = match &self.ring.relation {
            Relation::Absolute => Relation::Absolute,
            Relation::Relative(t) => Relation::Relative(f(t)),
        };
        NodeSeries {
            ring: NodeRing { trunc: self.ring.trunc, relation, zero: f(&self.ring.zero) },
            c: f(&self.c),
            x: self.x.iter().map(f).collect(),
            y: self.y.iter().map(f).collect(),
        }
    }
}

/// Associate type of a nonzero non-unit: `x^α`, `y^β` or `x^α + a y^β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementType {
    pub alpha: usize,
    pub beta: usize,
    pub param: Option<Scalar>,
}

impl ElementType {
    pub fn normal_form(&self, ring: &NodeRing<Scalar>) -> NodeSeries<Scalar> {
        let one = ring.coeff_one();
        let mut z = ring.zero();
        if self.alpha > 0 {
            z = z.add(&ring.x_pow(self.alpha));
        }
        if self.beta > 0 {
            let a = self.param.clone().unwrap_or_else(|| one.clone());
            z = z.add(&ring.y_term(self.beta, a));
        }
        z
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.alpha, self.beta, &self.param) {
            (a, 0, _) => write!(f, "x^{a}"),
            (0, b, _) => write!(f, "y^{b}"),
            (a, b, Some(p)) => write!(f, "x^{a} + {p}y^{b}"),
            (a, b, None) => write!(f, "x^{a} + y^{b}"),
        }
    }
}

/// Unique associate type of `z` with a witness unit `u`, `z = u · normal_form`.
///
/// For `z` with both parts nonzero and lowest terms `b_α x^α`, `c_β y^β`, the
/// parameter is `a = c_β / b_α`; the unit has constant `b_α`, x-part
/// `(z_x / x^α) − b_α` and y-part `(z_y / (a y^β)) − b_α`.
pub fn associate_normal_form(z: &NodeSeries<Scalar>) -> Result<(ElementType, NodeSeries<Scalar>)> {
    if !z.ring.is_absolute() {
        return Err(Error::Precondition("associate normal form needs the absolute ring".into()));
    }
    if z.is_zero() {
        return Err(Error::ZeroElement);
    }
    if z.is_unit() {
        return Err(Error::UnitElement);
    }
    let ring = z.ring.clone();
    let n = ring.trunc;
    let alpha = z.x_order();
    let beta = z.y_order();
    let (ty, u) = match (alpha, beta) {
        (Some(a), None) => {
            let b0 = z.x_coeff(a);
            let mut u = ring.constant(b0);
            for k in 1..=n.saturating_sub(a) {
                u = u.add(&ring.x_term(k, z.x_coeff(a + k)));
            }
            (ElementType { alpha: a, beta: 0, param: None }, u)
        }
        (None, Some(b)) => {
            let c0 = z.y_coeff(b);
            let mut u = ring.constant(c0);
            for k in 1..=n.saturating_sub(b) {
                u = u.add(&ring.y_term(k, z.y_coeff(b + k)));
            }
            (ElementType { alpha: 0, beta: b, param: None }, u)
        }
        (Some(a), Some(b)) => {
            let b0 = z.x_coeff(a);
            let p = z.y_coeff(b).div(&b0)?;
            let pinv = p.inv()?;
            let mut u = ring.constant(b0);
            for k in 1..=n.saturating_sub(a) {
                u = u.add(&ring.x_term(k, z.x_coeff(a + k)));
            }
            for k in 1..=n.saturating_sub(b) {
                u = u.add(&ring.y_term(k, &z.y_coeff(b + k) * &pinv));
            }
            (ElementType { alpha: a, beta: b, param: Some(p) }, u)
        }
        (None, None) => unreachable!("non-unit nonzero element has a nonconstant term"),
    };
    let back = u.mul(&ty.normal_form(&ring));
    if &back != z {
        return Err(Error::Invariant(format!("normal form witness fails for {z}")));
    }
    Ok((ty, u))
}

fn coeff_prefix(s: &str) -> Option<String> {
    match s {
        "1" => Some(String::new()),
        "-1" => Some("-".into()),
        _ if s.contains('+') || s[1..].contains('-') => Some(format!("({s})")),
        _ => None,
    }
}

impl<R: CoeffRing + fmt::Display> fmt::Display for NodeSeries<R> {
    /// Renders as `c + b_1x + … + c_1y + …`, e.g. `y + 3x^2` prints as
    /// `3x^2 + y`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in self.terms() {
            let cs = c.to_string();
            let mono = match m {
                MonomialKind::One => {
                    parts.push(cs);
                    continue;
                }
                MonomialKind::X(1) => "x".to_string(),
                MonomialKind::Y(1) => "y".to_string(),
                MonomialKind::X(i) => format!("x^{i}"),
                MonomialKind::Y(j) => format!("y^{j}"),
            };
            let pre = coeff_prefix(&cs).unwrap_or(cs);
            parts.push(format!("{pre}{mono}"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        write!(f, "{out}")
    }
}

#[derive(Serialize, Deserialize)]
enum ModeWire<R> {
    #[serde(rename = "abs")]
    Abs,
    #[serde(rename = "rel_t")]
    Rel(R),
}

#[derive(Serialize, Deserialize)]
struct SeriesWire<R> {
    #[serde(rename = "N")]
    n: usize,
    mode: ModeWire<R>,
    c: R,
    x: Vec<R>,
    y: Vec<R>,
}

impl<R: CoeffRing + Serialize> Serialize for NodeSeries<R> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mode = match &self.ring.relation {
            Relation::Absolute => ModeWire::Abs,
            Relation::Relative(t) => ModeWire::Rel(t.clone()),
        };
        SeriesWire { n: self.ring.trunc, mode, c: self.c.clone(), x: self.x.clone(), y: self.y.clone() }.serialize(s)
    }
}

impl<'de, R: CoeffRing + Deserialize<'de>> Deserialize<'de> for NodeSeries<R> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SeriesWire::<R>::deserialize(d)?;
        if w.x.len() != w.n || w.y.len() != w.n {
            return Err(D::Error::custom("coefficient lists must have length N"));
        }
        let ring = match w.mode {
            ModeWire::Abs => NodeRing::absolute(&w.c, w.n),
            ModeWire::Rel(t) => NodeRing::relative(t, w.n),
        };
        ring.element(w.c, w.x, w.y).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qring(n: usize) -> NodeRing<Scalar> {
        NodeRing::absolute(&Scalar::q(0, 1), n)
    }

    fn q(n: i64) -> Scalar {
        Scalar::q(n, 1)
    }

    #[test]
    fn xy_vanishes_in_absolute_mode() {
        let r = qring(3);
        assert!(r.x_pow(1).mul(&r.y_pow(1)).is_zero());
        let p = r.one().add(&r.x_pow(1)).mul(&r.one().add(&r.y_pow(1)));
        assert_eq!(p, r.one().add(&r.x_pow(1)).add(&r.y_pow(1)));
    }

    #[test]
    fn xy_is_t_in_relative_mode() {
        let f = Field::Rational;
        let t = ArtinScalar::eps(f, 2);
        let r = NodeRing::relative(t.clone(), 3);
        assert_eq!(r.x_pow(1).mul(&r.y_pow(1)), r.constant(t.clone()));
        // x^2 y = t x, x^2 y^2 = t^2 = 0
        assert_eq!(r.x_pow(2).mul(&r.y_pow(1)), r.x_term(1, t));
        assert!(r.x_pow(2).mul(&r.y_pow(2)).is_zero());
    }

    #[test]
    fn truncation_drops_high_powers() {
        let r = qring(2);
        assert!(r.x_pow(2).mul(&r.x_pow(1)).is_zero());
    }

    #[test]
    fn mixed_modes_error() {
        let f = Field::Rational;
        let a = NodeRing::absolute(&ArtinScalar::one(f, 2), 2).x_pow(1);
        let b = NodeRing::relative(ArtinScalar::eps(f, 2), 2).x_pow(1);
        assert!(matches!(a.try_mul(&b), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn normal_form_examples() {
        let r = qring(4);
        let z = r.y_pow(1).add(&r.x_term(2, q(3)));
        let (ty, u) = associate_normal_form(&z).unwrap();
        assert_eq!(ty, ElementType { alpha: 2, beta: 1, param: Some(Scalar::q(1, 3)) });
        assert_eq!(u, r.constant(q(3)));

        let z = r.x_pow(2).add(&r.x_pow(3));
        let (ty, u) = associate_normal_form(&z).unwrap();
        assert_eq!(ty, ElementType { alpha: 2, beta: 0, param: None });
        assert_eq!(u, r.one().add(&r.x_pow(1)));

        let z = r.x_term(1, q(2)).add(&r.x_term(2, q(2))).add(&r.y_term(3, q(6)));
        let (ty, u) = associate_normal_form(&z).unwrap();
        assert_eq!(ty.param, Some(q(3)));
        assert_eq!(u.mul(&ty.normal_form(&r)), z);
    }

    #[test]
    fn normal_form_rejects_units_and_zero() {
        let r = qring(3);
        assert_eq!(associate_normal_form(&r.zero()).unwrap_err(), Error::ZeroElement);
        assert_eq!(associate_normal_form(&r.one().add(&r.x_pow(1))).unwrap_err(), Error::UnitElement);
    }

    #[test]
    fn monomial_multiples_examples() {
        let r = qring(3);
        let z = r.y_pow(1).add(&r.x_pow(2));
        let m = z.monomial_multiples();
        let expect = vec![z.clone(), r.x_pow(3), r.y_pow(2), r.y_pow(3)];
        assert_eq!(m, expect);
        let r2 = qring(2);
        assert_eq!(r2.x_pow(1).monomial_multiples(), vec![r2.x_pow(1), r2.x_pow(2)]);
    }

    #[test]
    fn inverse_of_unit() {
        let r = qring(4);
        let u = r.constant(q(2)).add(&r.x_pow(1)).add(&r.y_term(2, q(5)));
        let v = u.inverse().unwrap();
        assert_eq!(u.mul(&v), r.one());
        let t = ArtinScalar::eps(Field::Prime(3), 3);
        let rr = NodeRing::relative(t, 4);
        let u = rr.one().add(&rr.x_pow(1)).add(&rr.y_pow(1));
        assert_eq!(u.mul(&u.inverse().unwrap()), rr.one());
    }

    #[test]
    fn display_and_json() {
        let r = qring(2);
        let z = r.y_pow(1).add(&r.x_term(2, q(3)));
        assert_eq!(z.to_string(), "3x^2 + y");
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(
            s,
            r#"{"N":2,"mode":"abs","c":{"Q":"0/1"},"x":[{"Q":"0/1"},{"Q":"3/1"}],"y":[{"Q":"1/1"},{"Q":"0/1"}]}"#
        );
        let back: NodeSeries<Scalar> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
    }
}
