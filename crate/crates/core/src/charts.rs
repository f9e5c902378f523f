//! Local charts of the Hilbert scheme of the node at the points of the
//! punctual Hilbert scheme.
//!
//! Around `Q[m,i] = (x^{m−i+1}, y^i)` a deformation is `(f, g)` with
//!
//! ```text
//! f = x^{m+1−i} + Σ_{j=0}^{m−i} a_j x^j + Σ_{j=1}^{i−1} b_j y^j
//! g = y^i       + Σ_{j=0}^{m−i} c_j x^j + Σ_{j=1}^{i−1} d_j y^j
//! ```
//!
//! and flatness is equivalent to `yf − b_{i−1} g = 0 = xg − c_{m−i} f`. The
//! chart coordinates are `a_1..a_{m−i}, d_1..d_{i−1}, b_{i−1}, c_{m−i}` (and
//! `t` in the relative case). For `i = 1` there are no `b_j`; the role of
//! `b_{i−1}` is played by the constant `a_0`, so the chart coordinate is
//! named `a_0`.
//!
//! Around `C[m,i](a)` the deformation is principal,
//! `y^i + ã x^{m−i} + Σ_{j<m−i} a_j x^j + Σ_{j=1}^{i−1} b_j y^j`, with chart
//! coordinates `at = ã − a`, `a_j`, `b_j`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::coeffs::{ArtinScalar, CoeffRing, Field, Scalar};
use crate::error::{Error, Result};
use crate::ideals::{IdealType, NodeIdeal};
use crate::node_ring::{NodeRing, NodeSeries};
use crate::poly::{Equation, Poly};

/// Name of the base parameter of the relative family, `xy = t`.
pub const T_VAR: &str = "t";

pub fn var(letter: char, j: usize) -> String {
    format!("{letter}_{j}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartMode {
    #[serde(rename = "abs")]
    Absolute,
    #[serde(rename = "rel")]
    Relative,
}

/// A line of the relation system, with the index `j` it is instantiated at.
/// Line 0 is the node equation `b_{i−1} c_{m−i} = 0` (or `= t`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationLine {
    pub line: u8,
    pub j: usize,
    pub equation: Equation,
}

/// Chart at `Q[m,i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QChart {
    pub m: usize,
    pub i: usize,
    pub mode: ChartMode,
}

impl QChart {
    pub fn new(m: usize, i: usize, mode: ChartMode) -> Result<Self> {
        IdealType::q(m, i)?;
        Ok(QChart { m, i, mode })
    }

    pub fn center(&self) -> IdealType {
        IdealType::Q { m: self.m, i: self.i }
    }

    /// The coordinate playing the role of `b_{i−1}`.
    pub fn b_top(&self) -> String {
        if self.i == 1 {
            var('a', 0)
        } else {
            var('b', self.i - 1)
        }
    }

    pub fn c_top(&self) -> String {
        var('c', self.m - self.i)
    }

    fn mi(&self) -> usize {
        self.m - self.i
    }

    pub fn free_coordinates(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.mi()).map(|j| var('a', j)).collect();
        v.extend((1..self.i).map(|j| var('d', j)));
        v.push(self.b_top());
        v.push(self.c_top());
        if self.mode == ChartMode::Relative {
            v.push(T_VAR.to_string());
        }
        v
    }

    /// Every coefficient of `f` and `g`: `a_0..a_{m−i}`, `b_1..b_{i−1}`,
    /// `c_0..c_{m−i}`, `d_1..d_{i−1}`.
    pub fn coefficient_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (0..=self.mi()).map(|j| var('a', j)).collect();
        v.extend((1..self.i).map(|j| var('b', j)));
        v.extend((0..=self.mi()).map(|j| var('c', j)));
        v.extend((1..self.i).map(|j| var('d', j)));
        v
    }

    /// Dependent coefficients in terms of chart coordinates, in elimination
    /// order: `b_j = b_{i−1} d_{j+1}`, `a_0 = b_{i−1} d_1`, `c_j = c_{m−i} a_{j+1}`.
    pub fn dependent_rules(&self) -> Vec<(String, Poly)> {
        let b = Poly::var(&self.b_top());
        let c = Poly::var(&self.c_top());
        let mut out = Vec::new();
        for j in 1..self.i.saturating_sub(1) {
            out.push((var('b', j), b.mul(&Poly::var(&var('d', j + 1)))));
        }
        if self.i >= 2 {
            out.push((var('a', 0), b.mul(&Poly::var(&var('d', 1)))));
        }
        for j in 0..self.mi() {
            out.push((var('c', j), c.mul(&Poly::var(&var('a', j + 1)))));
        }
        out
    }

    /// All coefficients as polynomials in the chart coordinates.
    pub fn coefficient_polys(&self) -> BTreeMap<String, Poly> {
        let mut out: BTreeMap<String, Poly> = self.free_coordinates().iter().map(|v| (v.clone(), Poly::var(v))).collect();
        for (k, p) in self.dependent_rules() {
            out.insert(k, p);
        }
        out
    }

    /// Equations of the chart in its coordinates.
    pub fn equations(&self) -> Vec<Equation> {
        let bc = Poly::var(&self.b_top()).mul(&Poly::var(&self.c_top()));
        match self.mode {
            ChartMode::Absolute => vec![Equation::vanishing(bc)],
            ChartMode::Relative => vec![Equation::new(bc, Poly::var(T_VAR))],
        }
    }

    pub fn dimension(&self) -> usize {
        self.free_coordinates().len() - self.equations().len()
    }

    /// Coefficient `a_j`, with `a_{m−i+1} = 1` (the leading term of `f`).
    fn a(&self, j: usize) -> Poly {
        if j == self.mi() + 1 {
            Poly::int(1)
        } else {
            Poly::var(&var('a', j))
        }
    }

    /// Coefficient `d_j`, with `d_i = 1` (the leading term of `g`).
    fn d(&self, j: usize) -> Poly {
        if j == self.i {
            Poly::int(1)
        } else {
            Poly::var(&var('d', j))
        }
    }

    /// The relation system in the coefficients, line by line. In relative
    /// mode lines 3, 5, 6 carry `t` and line 0 reads `b_{i−1} c_{m−i} = t`.
    /// For `i = 1` lines 1, 2 and 6 are empty.
    pub fn relation_lines(&self) -> Vec<RelationLine> {
        let (m, i) = (self.m, self.i);
        let b = Poly::var(&self.b_top());
        let c = Poly::var(&self.c_top());
        let t = Poly::var(T_VAR);
        let rel = self.mode == ChartMode::Relative;
        let bv = |j: usize| Poly::var(&var('b', j));
        let cv = |j: usize| Poly::var(&var('c', j));
        let mut out = Vec::new();
        let mut push = |line: u8, j: usize, lhs: Poly, rhs: Poly| {
            out.push(RelationLine { line, j, equation: Equation::new(lhs, rhs) });
        };
        push(0, 0, b.mul(&c), if rel { t.clone() } else { Poly::zero() });
        if i >= 2 {
            for j in 1..=i - 2 {
                push(1, j, bv(j), b.mul(&self.d(j + 1)));
            }
            push(2, 0, b.mul(&self.d(1)), self.a(0));
        }
        let line3_top = if rel { m - i } else { m - i + 1 };
        for j in 0..line3_top {
            let rhs = if rel { t.mul(&self.a(j + 1)) } else { Poly::zero() };
            push(3, j, b.mul(&cv(j)), rhs);
        }
        for j in 0..m - i {
            push(4, j, cv(j), c.mul(&self.a(j + 1)));
        }
        let rhs5 = if rel { t.mul(&self.d(1)) } else { Poly::zero() };
        push(5, 0, c.mul(&self.a(0)), rhs5);
        if i >= 2 {
            let top6 = if rel { i - 2 } else { i - 1 };
            for j in 1..=top6 {
                let rhs = if rel { t.mul(&self.d(j + 1)) } else { Poly::zero() };
                push(6, j, c.mul(&bv(j)), rhs);
            }
        }
        out
    }

    /// `f` and `g` with symbolic coefficients.
    pub fn symbolic_generators(&self, trunc: usize) -> (NodeSeries<Poly>, NodeSeries<Poly>) {
        let ring = match self.mode {
            ChartMode::Absolute => NodeRing::absolute(&Poly::zero(), trunc),
            ChartMode::Relative => NodeRing::relative(Poly::var(T_VAR), trunc),
        };
        let (m, i) = (self.m, self.i);
        let mut f = ring.x_pow(m + 1 - i).add(&ring.constant(Poly::var(&var('a', 0))));
        for j in 1..=m - i {
            f = f.add(&ring.x_term(j, Poly::var(&var('a', j))));
        }
        for j in 1..i {
            f = f.add(&ring.y_term(j, Poly::var(&var('b', j))));
        }
        let mut g = ring.y_pow(i).add(&ring.constant(Poly::var(&var('c', 0))));
        for j in 1..=m - i {
            g = g.add(&ring.x_term(j, Poly::var(&var('c', j))));
        }
        for j in 1..i {
            g = g.add(&ring.y_term(j, Poly::var(&var('d', j))));
        }
        (f, g)
    }

    /// Coefficient identities of `yf − b_{i−1} g = 0 = xg − c_{m−i} f`
    /// computed by symbolic multiplication, deduplicated up to sign.
    pub fn derived_relations(&self) -> Vec<Equation> {
        let (f, g) = self.symbolic_generators(self.m + 2);
        let ring = f.ring().clone();
        let b = Poly::var(&self.b_top());
        let c = Poly::var(&self.c_top());
        let e1 = ring.y_pow(1).mul(&f).sub(&g.scale(&b));
        let e2 = ring.x_pow(1).mul(&g).sub(&f.scale(&c));
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for e in [e1, e2] {
            for p in e.slot_coeffs() {
                if p.is_zero() {
                    continue;
                }
                let key = canonical_sign(&p).to_string();
                if seen.insert(key) {
                    out.push(Equation::vanishing(canonical_sign(&p)));
                }
            }
        }
        out
    }

    /// The punctual locus inside the chart, `f(x,0) = x^{m−i+1}` and
    /// `g(0,y) = y^i`: the vanishing coordinates, and the residual node
    /// equation in `b_{i−1}, c_{m−i}`. At the ends `i = 1` and `i = m` the
    /// top coordinate is a constant term and vanishes too, so the residual
    /// is trivial there.
    pub fn punctual_subscheme_equations(&self) -> Result<(Vec<Equation>, Equation)> {
        if self.mode != ChartMode::Absolute {
            return Err(Error::Precondition("punctual equations are for the absolute chart".into()));
        }
        let mut v: Vec<Equation> = Vec::new();
        if self.i == 1 {
            v.push(Equation::vanishing(Poly::var(&var('a', 0))));
        }
        v.extend((1..=self.mi()).map(|j| Equation::vanishing(Poly::var(&var('a', j)))));
        if self.i == self.m {
            v.push(Equation::vanishing(Poly::var(&var('c', 0))));
        }
        v.extend((1..self.i).map(|j| Equation::vanishing(Poly::var(&var('d', j)))));
        let mut residual = self.equations().remove(0).residual();
        for e in &v {
            for x in e.residual().variables() {
                residual = residual.substitute(&x, &Poly::zero());
            }
        }
        Ok((v, Equation::vanishing(residual)))
    }

    /// Point from chart coordinates; dependent coefficients are filled in by
    /// the elimination rules, and in relative mode `t = b_{i−1} c_{m−i}`
    /// unless given.
    pub fn point(&self, coords: &BTreeMap<String, ArtinScalar>) -> Result<ChartPoint> {
        let mut values = coords.clone();
        for name in self.free_coordinates() {
            if name == T_VAR {
                continue;
            }
            if !values.contains_key(&name) {
                return Err(Error::Precondition(format!("missing coordinate {name}")));
            }
        }
        let proto = values.values().next().cloned().ok_or_else(|| Error::Precondition("no coordinates".into()))?;
        let hm: HashMap<String, ArtinScalar> = values.clone().into_iter().collect();
        for (k, p) in self.dependent_rules() {
            values.insert(k, p.eval_in(&hm, &proto)?);
        }
        if self.mode == ChartMode::Relative && !values.contains_key(T_VAR) {
            let t = values[&self.b_top()].times(&values[&self.c_top()]);
            values.insert(T_VAR.to_string(), t);
        }
        ChartPoint::new(*self, values)
    }

    /// Monomials `1, x..x^{m−i}, y..y^{i−1}`, a basis of the quotient at the
    /// center.
    pub fn standard_monomials(&self, ring: &NodeRing<ArtinScalar>) -> Vec<NodeSeries<ArtinScalar>> {
        standard_monomials(self.m, self.i, ring)
    }

    pub fn descriptor(&self) -> Value {
        json!({
            "center": self.center().to_string(),
            "mode": self.mode,
            "coords": self.free_coordinates(),
        })
    }
}

fn standard_monomials(m: usize, i: usize, ring: &NodeRing<ArtinScalar>) -> Vec<NodeSeries<ArtinScalar>> {
    let mut v = vec![ring.one()];
    v.extend((1..=m - i).map(|j| ring.x_pow(j)));
    v.extend((1..i).map(|j| ring.y_pow(j)));
    v
}

fn canonical_sign(p: &Poly) -> Poly {
    // Sign fixed by the term printed first.
    if p.to_string().starts_with('-') {
        p.neg()
    } else {
        p.clone()
    }
}

/// A coefficient assignment at a `Q`-chart, over `k` or `k[ε]/(εⁿ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    chart: QChart,
    values: BTreeMap<String, ArtinScalar>,
}

/// Outcome of checking the relation system at a point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub holds: bool,
    /// `(line, j)` of each failing identity.
    pub failures: Vec<(u8, usize)>,
}

/// Outcome of the flatness test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatnessReport {
    pub flat: bool,
    pub length: usize,
    pub expected_length: usize,
    pub standard_basis_independent: bool,
}

impl ChartPoint {
    /// Full assignment: every coefficient name, plus `t` in relative mode.
    pub fn new(chart: QChart, values: BTreeMap<String, ArtinScalar>) -> Result<Self> {
        let mut needed = chart.coefficient_names();
        if chart.mode == ChartMode::Relative {
            needed.push(T_VAR.into());
        }
        for n in &needed {
            if !values.contains_key(n) {
                return Err(Error::Precondition(format!("missing coefficient {n}")));
            }
        }
        let order = values[&needed[0]].order();
        let field = values[&needed[0]].field();
        if values.values().any(|v| v.order() != order || v.field() != field) {
            return Err(Error::RingMismatch("coefficients from different algebras".into()));
        }
        Ok(ChartPoint { chart, values })
    }

    pub fn chart(&self) -> &QChart {
        &self.chart
    }

    pub fn values(&self) -> &BTreeMap<String, ArtinScalar> {
        &self.values
    }

    pub fn value(&self, name: &str) -> &ArtinScalar {
        &self.values[name]
    }

    fn proto(&self) -> &ArtinScalar {
        self.values.values().next().expect("nonempty assignment")
    }

    pub fn artin_order(&self) -> usize {
        self.proto().order()
    }

    pub fn field(&self) -> Field {
        self.proto().field()
    }

    pub fn check_relations(&self) -> RelationReport {
        let hm: HashMap<String, ArtinScalar> = self.values.clone().into_iter().collect();
        let failures: Vec<(u8, usize)> = self
            .chart
            .relation_lines()
            .into_iter()
            .filter(|l| !l.equation.residual().eval_in(&hm, self.proto()).expect("all variables bound").is_zero())
            .map(|l| (l.line, l.j))
            .collect();
        RelationReport { holds: failures.is_empty(), failures }
    }

    /// Truncation order used for the ideal: `max(m·n, m+1)`.
    pub fn trunc_order(&self) -> usize {
        (self.chart.m * self.artin_order()).max(self.chart.m + 1)
    }

    pub fn ring(&self) -> NodeRing<ArtinScalar> {
        let n = self.trunc_order();
        match self.chart.mode {
            ChartMode::Absolute => NodeRing::absolute(self.proto(), n),
            ChartMode::Relative => NodeRing::relative(self.values[T_VAR].clone(), n),
        }
    }

    /// `f` and `g` at this point. Over `k[ε]/(εⁿ)` with `n ≥ 2` every
    /// coefficient must lie in the maximal ideal.
    pub fn synthesize(&self) -> Result<(NodeSeries<ArtinScalar>, NodeSeries<ArtinScalar>)> {
        if self.artin_order() >= 2 {
            if let Some((k, _)) = self.values.iter().find(|(_, v)| v.is_unit()) {
                return Err(Error::Precondition(format!("coefficient {k} is a unit: outside the formal chart")));
            }
        }
        let ring = self.ring();
        let (m, i) = (self.chart.m, self.chart.i);
        let v = |n: String| self.values[&n].clone();
        let mut f = ring.x_pow(m + 1 - i).add(&ring.constant(v(var('a', 0))));
        for j in 1..=m - i {
            f = f.add(&ring.x_term(j, v(var('a', j))));
        }
        for j in 1..i {
            f = f.add(&ring.y_term(j, v(var('b', j))));
        }
        let mut g = ring.y_pow(i).add(&ring.constant(v(var('c', 0))));
        for j in 1..=m - i {
            g = g.add(&ring.x_term(j, v(var('c', j))));
        }
        for j in 1..i {
            g = g.add(&ring.y_term(j, v(var('d', j))));
        }
        Ok((f, g))
    }

    pub fn ideal(&self) -> Result<NodeIdeal> {
        let (f, g) = self.synthesize()?;
        NodeIdeal::from_generators(&self.ring(), vec![f, g])
    }

    pub fn verify_flatness(&self) -> Result<FlatnessReport> {
        let ideal = self.ideal()?;
        Ok(verify_flatness(&ideal, self.chart.m, &self.chart.standard_monomials(ideal.ring())))
    }

    pub fn to_json(&self) -> Value {
        let coords: Map<String, Value> =
            self.values.iter().map(|(k, v)| (k.clone(), serde_json::to_value(v).expect("json"))).collect();
        json!({ "center": self.chart.center().to_string(), "mode": self.chart.mode, "coords": coords })
    }
}

/// Whether `R_S/I` is free of rank `m` over `S = k[ε]/(εⁿ)` with basis the
/// given standard monomials: the `k`-length must be `m·n` and the elements
/// `ε^e · s` must be independent modulo `I`.
pub fn verify_flatness(ideal: &NodeIdeal, m: usize, standard: &[NodeSeries<ArtinScalar>]) -> FlatnessReport {
    let n = ideal.artin_order();
    let length = ideal.length();
    let expected = m * n;
    let field = ideal.field();
    let mut quotient_images = crate::linalg::Subspace::zero(field, ideal.space().ambient());
    let mut independent = true;
    for s in standard {
        for e in 0..n {
            let z = s.scale(&ArtinScalar::eps_power(field, n, e, field.one()));
            let r = ideal.space().reduce(&z.k_coords());
            if !quotient_images.insert(r) {
                independent = false;
            }
        }
    }
    FlatnessReport {
        flat: length == expected && independent && standard.len() == m,
        length,
        expected_length: expected,
        standard_basis_independent: independent,
    }
}

/// Chart at `C[m,i](a)`, an affine space of dimension `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CChart {
    pub m: usize,
    pub i: usize,
    pub a: Scalar,
}

/// Name of the translated leading coordinate `ã − a`.
pub const AT_VAR: &str = "at";

impl CChart {
    pub fn new(m: usize, i: usize, a: Scalar) -> Result<Self> {
        IdealType::c(m, i, a.clone())?;
        Ok(CChart { m, i, a })
    }

    pub fn center(&self) -> IdealType {
        IdealType::C { m: self.m, i: self.i, a: self.a.clone() }
    }

    pub fn free_coordinates(&self) -> Vec<String> {
        let mut v = vec![AT_VAR.to_string()];
        v.extend((0..self.m - self.i).map(|j| var('a', j)));
        v.extend((1..self.i).map(|j| var('b', j)));
        v
    }

    pub fn equations(&self) -> Vec<Equation> {
        Vec::new()
    }

    pub fn dimension(&self) -> usize {
        self.free_coordinates().len() - self.equations().len()
    }

    /// Generator `y^i + (a + at) x^{m−i} + Σ a_j x^j + Σ b_j y^j`.
    pub fn synthesize(&self, coords: &BTreeMap<String, ArtinScalar>, trunc: usize) -> Result<NodeSeries<ArtinScalar>> {
        let get = |n: &str| coords.get(n).cloned().ok_or_else(|| Error::Precondition(format!("missing coordinate {n}")));
        let at = get(AT_VAR)?;
        let order = at.order();
        if order >= 2 {
            if let Some((k, _)) = coords.iter().find(|(_, v)| v.is_unit()) {
                return Err(Error::Precondition(format!("coordinate {k} is a unit: outside the formal chart")));
            }
        }
        let ring = NodeRing::absolute(&at, trunc);
        let lead = ArtinScalar::from_scalar(self.a.clone(), order).plus(&at);
        let mut g = ring.y_pow(self.i).add(&ring.x_term(self.m - self.i, lead));
        for j in 0..self.m - self.i {
            g = g.add(&ring.x_term(j, get(&var('a', j))?));
        }
        for j in 1..self.i {
            g = g.add(&ring.y_term(j, get(&var('b', j))?));
        }
        Ok(g)
    }

    pub fn ideal(&self, coords: &BTreeMap<String, ArtinScalar>) -> Result<NodeIdeal> {
        let order = coords.get(AT_VAR).map_or(1, ArtinScalar::order);
        let trunc = (self.m * order).max(self.m + 1);
        let g = self.synthesize(coords, trunc)?;
        let ring = g.ring().clone();
        NodeIdeal::from_generators(&ring, vec![g])
    }

    pub fn verify_flatness(&self, coords: &BTreeMap<String, ArtinScalar>) -> Result<FlatnessReport> {
        let ideal = self.ideal(coords)?;
        Ok(verify_flatness(&ideal, self.m, &standard_monomials(self.m, self.i, ideal.ring())))
    }

    pub fn descriptor(&self) -> Value {
        json!({ "center": self.center().to_string(), "mode": ChartMode::Absolute, "coords": self.free_coordinates() })
    }
}

/// Multiplicities of a closed point of a `Q`-chart over a finite field,
/// split by branch: `(on the x-axis away from 0, on the y-axis away from 0,
/// at the origin)`. Computed from the restrictions of `f`, `g` to each axis.
pub fn support_split(point: &ChartPoint) -> Result<(usize, usize, usize)> {
    if point.artin_order() != 1 || point.chart.mode != ChartMode::Absolute {
        return Err(Error::Precondition("support split needs an absolute closed point".into()));
    }
    let field = point.field();
    let elems = field.elements().ok_or_else(|| Error::Precondition("finite field required".into()))?;
    let (m, i) = (point.chart.m, point.chart.i);
    let v = |n: String| point.values[&n].constant().clone();
    // f(x,0), g(x,0), f(0,y), g(0,y) as coefficient lists.
    let mut fx = vec![v(var('a', 0))];
    fx.extend((1..=m - i).map(|j| v(var('a', j))));
    fx.push(field.one());
    let mut gx = vec![v(var('c', 0))];
    gx.extend((1..=m - i).map(|j| v(var('c', j))));
    let mut fy = vec![v(var('a', 0))];
    fy.extend((1..i).map(|j| v(var('b', j))));
    let mut gy = vec![v(var('c', 0))];
    gy.extend((1..i).map(|j| v(var('d', j))));
    gy.push(field.one());
    let local = |p: &[Scalar], q: &[Scalar], r: &Scalar| root_order(p, r).min(root_order(q, r));
    let mut on_x = 0;
    let mut on_y = 0;
    for r in elems.iter().filter(|r| !r.is_zero()) {
        on_x += local(&fx, &gx, r);
        on_y += local(&fy, &gy, r);
    }
    let zero = field.zero();
    // At the origin the local ring is the node itself; a unit generator
    // removes the point, otherwise defer to the truncated computation.
    let at_origin = if !eval_univariate(&fx, &zero).is_zero() || !eval_univariate(&gx, &zero).is_zero() {
        0
    } else {
        point.ideal()?.colength()?
    };
    Ok((on_x, on_y, at_origin))
}

fn eval_univariate(p: &[Scalar], r: &Scalar) -> Scalar {
    p.iter().rev().fold(r.field().zero(), |acc, c| &(&acc * r) + c)
}

/// Order of vanishing of `p` at `r`; `usize::MAX` for the zero polynomial.
fn root_order(p: &[Scalar], r: &Scalar) -> usize {
    let mut p: Vec<Scalar> = p.to_vec();
    while p.last().is_some_and(Scalar::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        return usize::MAX;
    }
    let mut k = 0;
    loop {
        if !eval_univariate(&p, r).is_zero() {
            return k;
        }
        // synthetic division by (x − r)
        let mut q = vec![r.field().zero(); p.len() - 1];
        let mut carry = r.field().zero();
        for idx in (1..p.len()).rev() {
            carry = &(&carry * r) + &p[idx];
            q[idx - 1] = carry.clone();
        }
        p = q;
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(chart: &QChart, f: Field, n: usize) -> BTreeMap<String, ArtinScalar> {
        chart.free_coordinates().into_iter().filter(|v| v != T_VAR).map(|v| (v, ArtinScalar::zero(f, n))).collect()
    }

    #[test]
    fn center_generators() {
        let ch = QChart::new(3, 2, ChartMode::Absolute).unwrap();
        let p = ch.point(&zeros(&ch, Field::Rational, 1)).unwrap();
        let (f, g) = p.synthesize().unwrap();
        let r = p.ring();
        assert_eq!(f, r.x_pow(2));
        assert_eq!(g, r.y_pow(2));
    }

    #[test]
    fn relative_t_from_coordinates() {
        let f = Field::Prime(5);
        let ch = QChart::new(2, 1, ChartMode::Relative).unwrap();
        let mut c = zeros(&ch, f, 3);
        c.insert("a_0".into(), ArtinScalar::eps(f, 3));
        c.insert("c_1".into(), ArtinScalar::eps(f, 3));
        let p = ch.point(&c).unwrap();
        assert_eq!(p.value(T_VAR), &ArtinScalar::eps_power(f, 3, 2, f.one()));
        assert!(p.check_relations().holds);
        assert!(p.verify_flatness().unwrap().flat);
    }

    #[test]
    fn absolute_obstruction_detected() {
        let f = Field::Prime(5);
        let ch = QChart::new(2, 1, ChartMode::Absolute).unwrap();
        let mut c = zeros(&ch, f, 3);
        c.insert("a_0".into(), ArtinScalar::eps(f, 3));
        c.insert("c_1".into(), ArtinScalar::eps(f, 3));
        let p = ch.point(&c).unwrap();
        let rep = p.check_relations();
        assert!(!rep.holds);
        assert!(rep.failures.contains(&(3, 1)));
        assert!(!p.verify_flatness().unwrap().flat);
    }

    #[test]
    fn derived_relations_match_lines() {
        for m in 1..=5 {
            for i in 1..=m {
                for mode in [ChartMode::Absolute, ChartMode::Relative] {
                    let ch = QChart::new(m, i, mode).unwrap();
                    let derived: BTreeSet<String> =
                        ch.derived_relations().iter().map(|e| canonical_sign(&e.residual()).to_string()).collect();
                    let lines: BTreeSet<String> = ch
                        .relation_lines()
                        .iter()
                        .map(|l| canonical_sign(&l.equation.residual()).to_string())
                        .collect();
                    assert_eq!(derived, lines, "m={m} i={i} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(QChart::new(4, 2, ChartMode::Absolute).unwrap().dimension(), 4);
        assert_eq!(QChart::new(4, 2, ChartMode::Relative).unwrap().dimension(), 5);
        assert_eq!(CChart::new(4, 1, Scalar::q(1, 1)).unwrap().dimension(), 4);
    }

    #[test]
    fn punctual_equations_small() {
        let (v, r) = QChart::new(3, 2, ChartMode::Absolute).unwrap().punctual_subscheme_equations().unwrap();
        let s: Vec<String> = v.iter().map(|e| e.to_string()).collect();
        assert_eq!(s, vec!["a_1 = 0", "d_1 = 0"]);
        assert_eq!(r.to_string(), "b_1*c_1 = 0");
        let (v, r) = QChart::new(2, 1, ChartMode::Absolute).unwrap().punctual_subscheme_equations().unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(r.to_string(), "0 = 0");
    }

    #[test]
    fn c_chart_points_are_flat() {
        let f = Field::Prime(3);
        let ch = CChart::new(3, 1, Scalar::fp(3, 2)).unwrap();
        let mut c: BTreeMap<String, ArtinScalar> =
            ch.free_coordinates().into_iter().map(|v| (v, ArtinScalar::zero(f, 1))).collect();
        c.insert("a_0".into(), ArtinScalar::from_scalar(Scalar::fp(3, 0), 1));
        assert!(ch.verify_flatness(&c).unwrap().flat);
        let c2: BTreeMap<String, ArtinScalar> =
            ch.free_coordinates().into_iter().map(|v| (v, ArtinScalar::eps(f, 3))).collect();
        assert!(ch.verify_flatness(&c2).unwrap().flat);
    }

    #[test]
    fn support_split_generic_point() {
        // m = 3, i = 1 on the b = 0 component: f = x (x − 1)(x − 2), and
        // g(0, y) = y + c a_1 with root y = 1.
        let s = |v: i64| ArtinScalar::from_scalar(Scalar::fp(5, v), 1);
        let ch = QChart::new(3, 1, ChartMode::Absolute).unwrap();
        let mut c = BTreeMap::new();
        // x^2 - 3x + 2 -> a_1 = 2, a_2 = -3
        c.insert("a_1".into(), s(2));
        c.insert("a_2".into(), s(-3));
        c.insert("a_0".into(), s(0));
        // c a_1 = -1  -> c = -1/2 = 2 mod 5
        c.insert("c_2".into(), s(2));
        let p = ch.point(&c).unwrap();
        assert_eq!(support_split(&p).unwrap(), (2, 1, 0));
    }
}
