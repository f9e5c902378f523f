//! The universal relative family over the chain `C̃`.
//!
//! `C̃ ⊂ (ℙ¹)^{m−1} × 𝔸¹` is cut out by `v_i u_{i+1} = t u_i v_{i+1}`, and
//! `H̃ ⊂ C̃ × 𝔸^{2m}` by
//!
//! ```text
//! a_0 u_1 = t v_1,   d_0 v_{m−1} = t u_{m−1},   a_i u_i = d_{m−i} v_i
//! ```
//!
//! It carries the generators
//!
//! ```text
//! F_0 = x^m + a_{m−1} x^{m−1} + … + a_0
//! F_i = u_i (x^{m−i} + a_{m−1} x^{m−i−1} + … + a_i)
//!     + v_i (y^i + d_{m−1} y^{i−1} + … + d_{m−i+1} y)
//! F_m = y^m + d_{m−1} y^{m−1} + … + d_0
//! ```
//!
//! For `m = 1` there is no chain and `H̃` is `a_0 d_0 = t`.
//!
//! Two models of the quotient are used. Locally at the node the ideal lives
//! in the truncated relative ring like every other ideal of the crate.
//! Globally, `S[x,y]/(xy − t)` modulo an ideal containing a monic `p(x)` and a
//! monic `q(y)` is a quotient of the span of `1, x..x^{deg p − 1},
//! y..y^{deg q − 1}`, and the kernel is the closure of the generators under
//! multiplication by `x`, `y` and `ε`.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, VecDeque};

use crate::charts::{var, CChart, ChartMode, ChartPoint, QChart, AT_VAR, T_VAR};
use crate::coeffs::{ArtinScalar, CoeffRing, Field, Scalar};
use crate::error::{Error, Result};
use crate::ideals::{IdealType, NodeIdeal};
use crate::linalg::Subspace;
use crate::node_ring::{NodeRing, NodeSeries};
use crate::poly::{Equation, Poly};

type A = ArtinScalar;

fn same_algebra(a: &A, b: &A) -> bool {
    a.field() == b.field() && a.order() == b.order()
}

/// Canonical representative `(1, v/u)` or `(u/v, 1)` of a point of `ℙ¹(S)`.
fn normalize_pair(u: &A, v: &A) -> Result<(A, A)> {
    if u.is_unit() {
        Ok((u.one_like(), v.times(&u.inv()?)))
    } else if v.is_unit() {
        Ok((u.times(&v.inv()?), v.one_like()))
    } else {
        Err(Error::Invariant("chain coordinate [u:v] with both entries non-units".into()))
    }
}

/// A point of `H̃` with values in `k[ε]/(εⁿ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalPoint {
    m: usize,
    chain: Vec<(A, A)>,
    a: Vec<A>,
    d: Vec<A>,
    t: A,
}

impl UniversalPoint {
    /// Chain pairs are normalized; every defining equation is checked.
    pub fn new(m: usize, chain: Vec<(A, A)>, a: Vec<A>, d: Vec<A>, t: A) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidIndex("m must be >= 1".into()));
        }
        if chain.len() != m - 1 || a.len() != m || d.len() != m {
            return Err(Error::Precondition(format!(
                "expected {} chain pairs and {m} values each of a, d",
                m - 1
            )));
        }
        let all = chain.iter().flat_map(|(u, v)| [u, v]).chain(&a).chain(&d);
        if all.into_iter().any(|z| !same_algebra(z, &t)) {
            return Err(Error::RingMismatch("coordinates from different algebras".into()));
        }
        let chain = chain.iter().map(|(u, v)| normalize_pair(u, v)).collect::<Result<Vec<_>>>()?;
        let p = UniversalPoint { m, chain, a, d, t };
        let bad = p.invariant_failures();
        if !bad.is_empty() {
            return Err(Error::Invariant(format!("not a point of H~: {}", bad.join(", "))));
        }
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Normalized chain pairs `(u_i, v_i)`, `i = 1..m−1`.
    pub fn chain(&self) -> &[(A, A)] {
        &self.chain
    }

    pub fn a(&self) -> &[A] {
        &self.a
    }

    pub fn d(&self) -> &[A] {
        &self.d
    }

    pub fn t(&self) -> &A {
        &self.t
    }

    pub fn field(&self) -> Field {
        self.t.field()
    }

    pub fn artin_order(&self) -> usize {
        self.t.order()
    }

    fn u(&self, i: usize) -> &A {
        &self.chain[i - 1].0
    }

    fn v(&self, i: usize) -> &A {
        &self.chain[i - 1].1
    }

    /// `a_k` with `a_m = 1`.
    fn a_ext(&self, k: usize) -> A {
        if k == self.m {
            self.t.one_like()
        } else {
            self.a[k].clone()
        }
    }

    fn d_ext(&self, k: usize) -> A {
        if k == self.m {
            self.t.one_like()
        } else {
            self.d[k].clone()
        }
    }

    /// Names of the defining equations that fail.
    pub fn invariant_failures(&self) -> Vec<String> {
        let m = self.m;
        let t = &self.t;
        let mut out = Vec::new();
        if m == 1 {
            if self.a[0].times(&self.d[0]) != *t {
                out.push("a_0d_0=t".into());
            }
            return out;
        }
        for i in 1..m - 1 {
            if self.v(i).times(self.u(i + 1)) != t.times(self.u(i)).times(self.v(i + 1)) {
                out.push(format!("v_{i}u_{}=tu_{i}v_{}", i + 1, i + 1));
            }
        }
        if self.a[0].times(self.u(1)) != t.times(self.v(1)) {
            out.push("a_0u_1=tv_1".into());
        }
        if self.d[0].times(self.v(m - 1)) != t.times(self.u(m - 1)) {
            out.push(format!("d_0v_{}=tu_{}", m - 1, m - 1));
        }
        for i in 1..m {
            if self.a[i].times(self.u(i)) != self.d[m - i].times(self.v(i)) {
                out.push(format!("a_{i}u_{i}=d_{}v_{i}", m - i));
            }
        }
        out
    }

    /// `F_i` in the global representation.
    fn generator(&self, i: usize) -> Mixed {
        let m = self.m;
        if i == 0 {
            return Mixed { c: self.a[0].clone(), x: (1..=m).map(|k| self.a_ext(k)).collect(), y: Vec::new() };
        }
        if i == m {
            return Mixed { c: self.d[0].clone(), x: Vec::new(), y: (1..=m).map(|k| self.d_ext(k)).collect() };
        }
        let (u, v) = (self.u(i), self.v(i));
        let x = (1..=m - i).map(|k| u.times(&self.a_ext(i + k))).collect();
        let y = (1..=i).map(|k| v.times(&self.d_ext(m - i + k))).collect();
        Mixed { c: u.times(&self.a[i]), x, y }
    }

    fn generators_mixed(&self) -> Vec<Mixed> {
        (0..=self.m).map(|i| self.generator(i)).collect()
    }

    /// Truncation order of the local model, `max(m·n, m+1)`.
    pub fn trunc_order(&self) -> usize {
        (self.m * self.artin_order()).max(self.m + 1)
    }

    /// The truncated relative ring `xy = t` at this point.
    pub fn local_ring(&self) -> NodeRing<A> {
        NodeRing::relative(self.t.clone(), self.trunc_order())
    }

    /// `F_0..F_m` as elements of `ring`.
    pub fn generators_in(&self, ring: &NodeRing<A>) -> Result<Vec<NodeSeries<A>>> {
        self.generators_mixed().iter().map(|g| g.in_ring(ring)).collect()
    }

    /// `F_0..F_m` in the local ring.
    pub fn universal_generators(&self) -> Result<Vec<NodeSeries<A>>> {
        self.generators_in(&self.local_ring())
    }

    pub fn local_ideal(&self) -> Result<NodeIdeal> {
        self.local_ideal_in(&self.local_ring())
    }

    pub fn local_ideal_in(&self, ring: &NodeRing<A>) -> Result<NodeIdeal> {
        NodeIdeal::from_generators(ring, self.generators_in(ring)?)
    }

    /// `k`-length of `S[x,y]/(xy − t, F_0..F_m)`.
    pub fn global_colength(&self) -> Result<usize> {
        let model = GlobalModel::new(self.generator(0).pure_x(), self.generator(self.m).pure_y(), self.t.clone())?;
        Ok(model.colength(&self.generators_mixed()))
    }

    /// The quotient of the span of `1, x..x^m, y..y^m` by the `S`-span of
    /// `F_0..F_m`: its `k`-length and the `k`-rank of the span.
    pub fn quotient_model(&self) -> QuotientModel {
        let m = self.m;
        let n = self.artin_order();
        let field = self.field();
        let slots = 2 * m + 1;
        let mut space = Subspace::zero(field, slots * n);
        for g in self.generators_mixed() {
            let mut s = vec![g.c.clone()];
            for k in 0..m {
                s.push(g.x.get(k).cloned().unwrap_or_else(|| self.t.zero_like()));
            }
            for k in 0..m {
                s.push(g.y.get(k).cloned().unwrap_or_else(|| self.t.zero_like()));
            }
            for e in 0..n {
                let eps = A::eps_power(field, n, e, field.one());
                space.insert(k_coords(&s.iter().map(|z| z.times(&eps)).collect::<Vec<_>>()));
            }
        }
        QuotientModel {
            length: slots * n - space.rank(),
            relations_rank: space.rank(),
            expected_length: m * n,
            expected_relations_rank: (m + 1) * n,
        }
    }

    /// The point of the punctual Hilbert scheme under the chain coordinate,
    /// read off from residues; `None` off the special fibre.
    pub fn punctual_type(&self) -> Option<IdealType> {
        if !self.t.in_maximal_ideal() {
            return None;
        }
        let m = self.m;
        if m == 1 {
            return Some(IdealType::Q { m: 1, i: 1 });
        }
        let is_zero = |z: &A| z.in_maximal_ideal();
        let lead = self.chain.iter().take_while(|(_, v)| is_zero(v)).count();
        if lead < m - 1 {
            let (u, v) = &self.chain[lead];
            if !is_zero(u) && !is_zero(v) {
                let a = u.constant().div(v.constant()).ok()?;
                return IdealType::c(m, lead + 1, a).ok();
            }
        }
        Some(IdealType::Q { m, i: lead + 1 })
    }

    /// Whether the reduced generator set (`F_i` at `c[m,i]`, `F_{i−1}, F_i`
    /// at `Q[m,i]`) generates the whole ideal. `None` off the special fibre.
    /// At `t = 0` the comparison is global; otherwise it is local at the node.
    pub fn local_generation(&self) -> Result<Option<bool>> {
        let Some(ty) = self.punctual_type() else { return Ok(None) };
        let idx: Vec<usize> = match ty {
            IdealType::C { i, .. } => vec![i],
            IdealType::Q { i, .. } => vec![i - 1, i],
        };
        let gens: Vec<Mixed> = idx.iter().map(|&i| self.generator(i)).collect();
        if self.t.is_zero() {
            if let Some(model) = GlobalModel::for_generators(&gens, &self.t) {
                return Ok(Some(model.colength(&gens) == self.m * self.artin_order()));
            }
        }
        let ring = self.local_ring();
        let sub = NodeIdeal::from_generators(&ring, gens.iter().map(|g| g.in_ring(&ring)).collect::<Result<_>>()?)?;
        Ok(Some(sub == self.local_ideal_in(&ring)?))
    }

    /// Coordinates of the `Q` chart around the punctual point, in relative
    /// mode.
    pub fn chart_point(&self) -> Result<ChartPoint> {
        let Some(IdealType::Q { m, i }) = self.punctual_type() else {
            return Err(Error::Precondition("point is not near a Q center".into()));
        };
        let chart = QChart::new(m, i, ChartMode::Relative)?;
        let mut c = BTreeMap::new();
        for j in 1..=m - i {
            c.insert(var('a', j), self.a[i - 1 + j].clone());
        }
        for k in 1..i {
            c.insert(var('d', k), self.d[m - i + k].clone());
        }
        let b = if i >= 2 { self.v(i - 1).times(&self.u(i - 1).inv()?) } else { self.a[0].clone() };
        let cc = if i < m { self.u(i).times(&self.v(i).inv()?) } else { self.d[0].clone() };
        c.insert(chart.b_top(), b);
        c.insert(chart.c_top(), cc);
        c.insert(T_VAR.to_string(), self.t.clone());
        chart.point(&c)
    }

    /// Coordinates of the `C` chart around the punctual point; needs `t = 0`.
    pub fn c_chart_coordinates(&self) -> Result<(CChart, BTreeMap<String, A>)> {
        let Some(IdealType::C { m, i, a }) = self.punctual_type() else {
            return Err(Error::Precondition("point is not near a c center".into()));
        };
        if !self.t.is_zero() {
            return Err(Error::Precondition("the c chart is absolute: t must vanish".into()));
        }
        let lead = self.u(i).times(&self.v(i).inv()?);
        let n = self.artin_order();
        let mut c = BTreeMap::new();
        c.insert(AT_VAR.to_string(), lead.minus(&A::from_scalar(a.clone(), n)));
        for j in 0..m - i {
            c.insert(var('a', j), lead.times(&self.a[i + j]));
        }
        for j in 1..i {
            c.insert(var('b', j), self.d[m - i + j].clone());
        }
        Ok((CChart::new(m, i, a)?, c))
    }

    /// The chart ideal and the ideal of `F_0..F_m` agree as subspaces.
    pub fn chart_consistency(&self) -> Result<bool> {
        match self.punctual_type() {
            Some(IdealType::Q { .. }) => {
                let cp = self.chart_point()?;
                let chart_ideal = cp.ideal()?;
                let ours = self.local_ideal_in(chart_ideal.ring())?;
                Ok(ours == chart_ideal)
            }
            Some(IdealType::C { .. }) => {
                let (chart, coords) = self.c_chart_coordinates()?;
                let chart_ideal = chart.ideal(&coords)?;
                let ours = self.local_ideal_in(chart_ideal.ring())?;
                Ok(ours == chart_ideal)
            }
            None => Err(Error::Precondition("point is off the special fibre".into())),
        }
    }

    /// Inverse of [`UniversalPoint::chart_point`]: the point of `H̃` with the
    /// given `Q` chart coordinates. Absolute chart points have `t = 0`.
    pub fn from_chart_point(cp: &ChartPoint) -> Result<Self> {
        let (m, i) = (cp.chart().m, cp.chart().i);
        let val = |n: String| cp.value(&n).clone();
        let t = match cp.chart().mode {
            ChartMode::Relative => cp.value(T_VAR).clone(),
            ChartMode::Absolute => val(var('a', 0)).zero_like(),
        };
        let one = t.one_like();
        if m == 1 {
            return Self::new(1, Vec::new(), vec![val(var('a', 0))], vec![val(var('c', 0))], t);
        }
        let w = if i >= 2 { val(cp.chart().b_top()) } else { t.zero_like() };
        let z = if i < m { val(cp.chart().c_top()) } else { t.zero_like() };
        let chain: Vec<(A, A)> = (1..m)
            .map(|j| if j < i { (one.clone(), t.pow((i - 1 - j) as u32).times(&w)) } else { (t.pow((j - i) as u32).times(&z), one.clone()) })
            .collect();
        let mut a = vec![t.zero_like(); m];
        let mut d = vec![t.zero_like(); m];
        for j in 0..=m - i {
            a[i - 1 + j] = val(var('a', j));
        }
        for k in 1..i {
            d[m - i + k] = val(var('d', k));
        }
        d[m - i] = val(var('c', 0));
        for j in 1..i.saturating_sub(1) {
            a[j] = chain[j - 1].1.times(&d[m - j]);
        }
        if i >= 2 {
            a[0] = t.times(&chain[0].1);
        }
        for j in i + 1..m {
            d[m - j] = chain[j - 1].0.times(&a[j]);
        }
        if i < m {
            d[0] = t.times(&chain[m - 2].0);
        }
        Self::new(m, chain, a, d, t)
    }

    /// The point whose `F_0` has the given unit roots; `F_m` has roots
    /// `t/r_j` and the chain is `[t^i : a_0]`.
    pub fn from_roots(roots: &[A], t: &A) -> Result<Self> {
        let m = roots.len();
        if m == 0 {
            return Err(Error::InvalidIndex("need at least one root".into()));
        }
        if roots.iter().any(|r| !r.is_unit()) {
            return Err(Error::Precondition("roots must be units".into()));
        }
        let a = monic_from_roots(roots);
        let inv: Vec<A> = roots.iter().map(|r| t.times(&r.inv().expect("unit"))).collect();
        let d = monic_from_roots(&inv);
        let chain = (1..m).map(|i| (t.pow(i as u32), a[0].clone())).collect();
        Self::new(m, chain, a[..m].to_vec(), d[..m].to_vec(), t.clone())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// Coefficients `c_0..c_{m−1}, 1` of `Π (x − r_j)`.
fn monic_from_roots(roots: &[A]) -> Vec<A> {
    let one = roots[0].one_like();
    let mut p = vec![one];
    for r in roots {
        let mut next = vec![r.zero_like(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] = next[k + 1].plus(c);
            next[k] = next[k].minus(&c.times(r));
        }
        p = next;
    }
    p
}

fn k_coords(slots: &[A]) -> Vec<Scalar> {
    slots.iter().flat_map(|z| z.coeffs().iter().cloned()).collect()
}

/// Element `c + Σ x[k] x^{k+1} + Σ y[k] y^{k+1}` of `S[x,y]/(xy − t)`.
#[derive(Clone, Debug)]
struct Mixed {
    c: A,
    x: Vec<A>,
    y: Vec<A>,
}

impl Mixed {
    fn times_x(&self, t: &A) -> Mixed {
        let c = self.y.first().map_or_else(|| self.c.zero_like(), |y1| t.times(y1));
        let mut x = vec![self.c.clone()];
        x.extend(self.x.iter().cloned());
        let y = self.y.iter().skip(1).map(|z| t.times(z)).collect();
        Mixed { c, x, y }
    }

    fn times_y(&self, t: &A) -> Mixed {
        let c = self.x.first().map_or_else(|| self.c.zero_like(), |x1| t.times(x1));
        let mut y = vec![self.c.clone()];
        y.extend(self.y.iter().cloned());
        let x = self.x.iter().skip(1).map(|z| t.times(z)).collect();
        Mixed { c, x, y }
    }

    fn scale(&self, s: &A) -> Mixed {
        Mixed { c: self.c.times(s), x: self.x.iter().map(|z| z.times(s)).collect(), y: self.y.iter().map(|z| z.times(s)).collect() }
    }

    /// Coefficients from degree 0 when the element is a polynomial in `x`.
    fn pure_x(&self) -> Option<Vec<A>> {
        if self.y.iter().any(|z| !z.is_zero()) {
            return None;
        }
        let mut p = vec![self.c.clone()];
        p.extend(self.x.iter().cloned());
        Some(p)
    }

    fn pure_y(&self) -> Option<Vec<A>> {
        if self.x.iter().any(|z| !z.is_zero()) {
            return None;
        }
        let mut p = vec![self.c.clone()];
        p.extend(self.y.iter().cloned());
        Some(p)
    }

    fn in_ring(&self, ring: &NodeRing<A>) -> Result<NodeSeries<A>> {
        let mut z = ring.constant(self.c.clone());
        for (k, c) in self.x.iter().enumerate() {
            z = z.add(&ring.x_term(k + 1, c.clone()));
        }
        for (k, c) in self.y.iter().enumerate() {
            z = z.add(&ring.y_term(k + 1, c.clone()));
        }
        Ok(z)
    }
}

/// Trim trailing zeros and divide by the leading coefficient, which must be
/// a unit.
fn make_monic(p: &[A]) -> Option<Vec<A>> {
    let deg = p.iter().rposition(|z| !z.is_zero())?;
    let lead = p[deg].inv().ok()?;
    Some(p[..=deg].iter().map(|z| z.times(&lead)).collect())
}

/// Remainder of `poly` modulo the monic `m`, as `deg m` coefficients.
fn reduce_pure(poly: &[A], monic: &[A]) -> Vec<A> {
    let p = monic.len() - 1;
    let mut r: Vec<A> = poly.to_vec();
    let zero = monic[0].zero_like();
    while r.len() < p {
        r.push(zero.clone());
    }
    for top in (p..r.len()).rev() {
        let c = r[top].clone();
        if c.is_zero() {
            continue;
        }
        for k in 0..=p {
            r[top - p + k] = r[top - p + k].minus(&c.times(&monic[k]));
        }
    }
    r.truncate(p);
    r
}

/// The global quotient for an ideal containing monic `px(x)` and `py(y)`.
struct GlobalModel {
    px: Vec<A>,
    py: Vec<A>,
    t: A,
}

impl GlobalModel {
    fn new(px: Option<Vec<A>>, py: Option<Vec<A>>, t: A) -> Result<Self> {
        let px = px.and_then(|p| make_monic(&p)).ok_or_else(|| Error::Precondition("no monic x-polynomial".into()))?;
        let py = py.and_then(|p| make_monic(&p)).ok_or_else(|| Error::Precondition("no monic y-polynomial".into()))?;
        if px.len() < 2 || py.len() < 2 {
            return Err(Error::UnitIdeal);
        }
        Ok(GlobalModel { px, py, t })
    }

    /// Search `g, x g, y g` for the lowest-degree monic pure elements.
    fn for_generators(gens: &[Mixed], t: &A) -> Option<Self> {
        let mut cands = Vec::new();
        for g in gens {
            cands.push(g.clone());
            cands.push(g.times_x(t));
            cands.push(g.times_y(t));
        }
        let best = |f: &dyn Fn(&Mixed) -> Option<Vec<A>>| {
            cands.iter().filter_map(|g| f(g).and_then(|p| make_monic(&p))).filter(|p| p.len() >= 2).min_by_key(Vec::len)
        };
        let px = best(&|g: &Mixed| g.pure_x())?;
        let py = best(&|g: &Mixed| g.pure_y())?;
        Some(GlobalModel { px, py, t: t.clone() })
    }

    fn p(&self) -> usize {
        self.px.len() - 1
    }

    fn q(&self) -> usize {
        self.py.len() - 1
    }

    fn slots(&self) -> usize {
        self.p() + self.q() - 1
    }

    fn nf(&self, e: &Mixed) -> Vec<A> {
        let zero = self.t.zero_like();
        let mut xs = vec![zero.clone()];
        xs.extend(e.x.iter().cloned());
        let mut ys = vec![zero];
        ys.extend(e.y.iter().cloned());
        let r = reduce_pure(&xs, &self.px);
        let s = reduce_pure(&ys, &self.py);
        let mut out = vec![e.c.plus(&r[0]).plus(&s[0])];
        out.extend(r[1..].iter().cloned());
        out.extend(s[1..].iter().cloned());
        out
    }

    fn to_mixed(&self, slots: &[A]) -> Mixed {
        let p = self.p();
        Mixed { c: slots[0].clone(), x: slots[1..p].to_vec(), y: slots[p..].to_vec() }
    }

    fn mixed_of(&self, coeffs: &[A]) -> Mixed {
        Mixed { c: coeffs[0].clone(), x: coeffs[1..].to_vec(), y: Vec::new() }
    }

    fn colength(&self, gens: &[Mixed]) -> usize {
        let n = self.t.order();
        let field = self.t.field();
        let eps = A::eps(field, n);
        let mut space = Subspace::zero(field, self.slots() * n);
        let py = Mixed { c: self.py[0].clone(), x: Vec::new(), y: self.py[1..].to_vec() };
        let mut queue: VecDeque<Vec<A>> = gens.iter().map(|g| self.nf(g)).collect();
        queue.push_back(self.nf(&self.mixed_of(&self.px).times_y(&self.t)));
        queue.push_back(self.nf(&py.times_x(&self.t)));
        while let Some(w) = queue.pop_front() {
            if !space.insert(k_coords(&w)) {
                continue;
            }
            let e = self.to_mixed(&w);
            queue.push_back(self.nf(&e.times_x(&self.t)));
            queue.push_back(self.nf(&e.times_y(&self.t)));
            if n > 1 {
                queue.push_back(self.nf(&e.scale(&eps)));
            }
        }
        self.slots() * n - space.rank()
    }
}

/// Length of the quotient of `⟨1, x..x^m, y..y^m⟩` by the span of the
/// generators, and the rank of that span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientModel {
    pub length: usize,
    pub relations_rank: usize,
    pub expected_length: usize,
    pub expected_relations_rank: usize,
}

impl QuotientModel {
    pub fn exact(&self) -> bool {
        self.length == self.expected_length && self.relations_rank == self.expected_relations_rank
    }
}

// ---------------------------------------------------------------------------
// Cycle map

/// Image of a point under the cycle map: `σ_i = a_{m−i}`, `τ_i = d_{m−i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclePoint {
    pub sigma: Vec<A>,
    pub tau: Vec<A>,
    pub t: A,
}

impl CyclePoint {
    pub fn m(&self) -> usize {
        self.sigma.len()
    }

    /// `σ_i` with `σ_0 = 1`.
    pub fn sigma_at(&self, i: usize) -> A {
        if i == 0 {
            self.t.one_like()
        } else {
            self.sigma[i - 1].clone()
        }
    }

    pub fn tau_at(&self, j: usize) -> A {
        if j == 0 {
            self.t.one_like()
        } else {
            self.tau[j - 1].clone()
        }
    }

    /// Pairs `(i, j)`, `i + j > m`, with `σ_i τ_j ≠ t σ_{i−1} τ_{j−1}`.
    pub fn literal_failures(&self) -> Vec<(usize, usize)> {
        let m = self.m();
        image_pairs(m)
            .filter(|&(i, j)| {
                self.sigma_at(i).times(&self.tau_at(j)) != self.t.times(&self.sigma_at(i - 1)).times(&self.tau_at(j - 1))
            })
            .collect()
    }

    /// Pairs `(i, j)`, `i + j > m`, with `σ_i τ_j ≠ t^{i+j−m} σ_{m−j} τ_{m−i}`.
    pub fn corrected_failures(&self) -> Vec<(usize, usize)> {
        let m = self.m();
        image_pairs(m)
            .filter(|&(i, j)| {
                let rhs = self.t.pow((i + j - m) as u32).times(&self.sigma_at(m - j)).times(&self.tau_at(m - i));
                self.sigma_at(i).times(&self.tau_at(j)) != rhs
            })
            .collect()
    }
}

fn image_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=m).flat_map(move |i| (1..=m).map(move |j| (i, j))).filter(move |&(i, j)| i + j > m)
}

pub fn cycle_map(p: &UniversalPoint) -> CyclePoint {
    let m = p.m;
    CyclePoint {
        sigma: (1..=m).map(|i| p.a[m - i].clone()).collect(),
        tau: (1..=m).map(|i| p.d[m - i].clone()).collect(),
        t: p.t.clone(),
    }
}

/// Whether some `F_q`-point of `H̃` maps to `c`, by enumerating the chain.
pub fn has_preimage(c: &CyclePoint) -> Result<bool> {
    let field = c.t.field();
    if c.t.order() != 1 {
        return Err(Error::Precondition("preimage search needs field points".into()));
    }
    let elems = field.elements().ok_or_else(|| Error::Precondition("finite field required".into()))?;
    let m = c.m();
    let a: Vec<A> = (0..m).map(|k| c.sigma_at(m - k)).collect();
    let d: Vec<A> = (0..m).map(|k| c.tau_at(m - k)).collect();
    let one = A::one(field, 1);
    let mut line: Vec<(A, A)> = elems.iter().map(|e| (one.clone(), A::from_scalar(e.clone(), 1))).collect();
    line.push((A::zero(field, 1), one.clone()));
    let count = m - 1;
    let total = line.len().pow(count as u32);
    for code in 0..total {
        let mut chain = Vec::with_capacity(count);
        let mut k = code;
        for _ in 0..count {
            chain.push(line[k % line.len()].clone());
            k /= line.len();
        }
        if UniversalPoint::new(m, chain, a.clone(), d.clone(), c.t.clone()).is_ok() {
            return Ok(true);
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Flags

/// Outcome of the flag-family check for a pair of adjacent levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagFamilyReport {
    pub holds: bool,
    pub failed: Option<String>,
    pub r: A,
    pub s: A,
}

/// Checks the relations tying a point of `H̃_m` to a point of `H̃_{m−1}`:
/// with `r = a_{m−1} − a'_{m−2}`, `s = d_{m−1} − d'_{m−2}`,
///
/// ```text
/// rs = t
/// u'_i v_i = r u_i v'_i,   v'_i u_{i+1} = s v_{i+1} u'_i       i = 1..m−2
/// a'_i u_{i+1} = s d'_{m−1−i} v_{i+1}                          i = 0..m−2
/// d'_{m−1−i} v_i = r a'_i u_i                                  i = 1..m−1
/// F_0 = F'_0 (x + r),   F_m = F'_{m−1} (y + s)
/// ```
///
/// with `a'_{m−1} = d'_{m−1} = 1`. The first failing relation is named.
pub fn verify_flag_family(upper: &UniversalPoint, lower: &UniversalPoint) -> Result<FlagFamilyReport> {
    let m = upper.m;
    if m < 2 || lower.m + 1 != m {
        return Err(Error::Precondition("levels must have lengths m and m-1 with m >= 2".into()));
    }
    if upper.t != lower.t {
        return Err(Error::Precondition("levels over different base points".into()));
    }
    let t = &upper.t;
    let r = upper.a[m - 1].minus(&lower.a_ext(m - 2));
    let s = upper.d[m - 1].minus(&lower.d_ext(m - 2));
    let mut checks: Vec<(String, A, A)> = vec![("rs=t".into(), r.times(&s), t.clone())];
    for i in 1..m.saturating_sub(1) {
        let (u, v) = (upper.u(i), upper.v(i));
        let (u1, v1) = (lower.u(i), lower.v(i));
        checks.push((format!("u'_{i}v_{i}=ru_{i}v'_{i}"), u1.times(v), r.times(u).times(v1)));
        checks.push((
            format!("v'_{i}u_{}=sv_{}u'_{i}", i + 1, i + 1),
            v1.times(upper.u(i + 1)),
            s.times(upper.v(i + 1)).times(u1),
        ));
    }
    for i in 0..m - 1 {
        checks.push((
            format!("a'_{i}u_{}=sd'_{}v_{}", i + 1, m - 1 - i, i + 1),
            lower.a_ext(i).times(upper.u(i + 1)),
            s.times(&lower.d_ext(m - 1 - i)).times(upper.v(i + 1)),
        ));
    }
    for i in 1..m {
        checks.push((
            format!("d'_{}v_{i}=ra'_{i}u_{i}", m - 1 - i),
            lower.d_ext(m - 1 - i).times(upper.v(i)),
            r.times(&lower.a_ext(i)).times(upper.u(i)),
        ));
    }
    let fails = |name: String| Ok(FlagFamilyReport { holds: false, failed: Some(name), r: r.clone(), s: s.clone() });
    for (name, lhs, rhs) in checks {
        if lhs != rhs {
            return fails(name);
        }
    }
    let f0: Vec<A> = (0..=m).map(|k| upper.a_ext(k)).collect();
    let f0_lower: Vec<A> = (0..m).map(|k| lower.a_ext(k)).collect();
    if f0 != times_linear(&f0_lower, &r) {
        return fails("F_0=F'_0(x+r)".into());
    }
    let fm: Vec<A> = (0..=m).map(|k| upper.d_ext(k)).collect();
    let fm_lower: Vec<A> = (0..m).map(|k| lower.d_ext(k)).collect();
    if fm != times_linear(&fm_lower, &s) {
        return fails(format!("F_{m}=F'_{}(y+s)", m - 1));
    }
    Ok(FlagFamilyReport { holds: true, failed: None, r, s })
}

/// Coefficients of `p(z) · (z + r)`.
fn times_linear(p: &[A], r: &A) -> Vec<A> {
    let mut out = vec![r.zero_like(); p.len() + 1];
    for (k, c) in p.iter().enumerate() {
        out[k + 1] = out[k + 1].plus(c);
        out[k] = out[k].plus(&c.times(r));
    }
    out
}

// ---------------------------------------------------------------------------
// Sampling

fn draw_scalar(field: Field, rng: &mut impl Rng) -> Result<Scalar> {
    let elems = field.elements().ok_or_else(|| Error::Precondition("finite field required".into()))?;
    Ok(elems[rng.gen_range(0..elems.len())].clone())
}

/// Random element of the maximal ideal of `k[ε]/(εⁿ)`.
pub fn draw_maximal(field: Field, order: usize, rng: &mut impl Rng) -> Result<A> {
    let mut c = vec![field.zero()];
    for _ in 1..order {
        c.push(draw_scalar(field, rng)?);
    }
    A::new(c)
}

fn draw_any(field: Field, order: usize, rng: &mut impl Rng) -> Result<A> {
    A::new((0..order).map(|_| draw_scalar(field, rng)).collect::<Result<_>>()?)
}

fn draw_nonzero(field: Field, rng: &mut impl Rng) -> Result<A> {
    loop {
        let s = draw_any(field, 1, rng)?;
        if !s.is_zero() {
            return Ok(s);
        }
    }
}

/// Fill in `a, d` over a given chain and `t`: in each pair `(a_j, d_{m−j})`
/// the coordinate not forced by a unit is drawn; `a_0`, `d_0` are solved
/// unless given.
fn solve_fibre(
    m: usize,
    chain: Vec<(A, A)>,
    t: A,
    a0: Option<A>,
    d0: Option<A>,
    draw: &mut dyn FnMut() -> Result<A>,
) -> Result<UniversalPoint> {
    let chain = chain.iter().map(|(u, v)| normalize_pair(u, v)).collect::<Result<Vec<_>>>()?;
    let mut a = vec![t.zero_like(); m];
    let mut d = vec![t.zero_like(); m];
    for j in 1..m {
        let (u, v) = &chain[j - 1];
        if u.is_unit() {
            d[m - j] = draw()?;
            a[j] = d[m - j].times(v).times(&u.inv()?);
        } else {
            a[j] = draw()?;
            d[m - j] = a[j].times(u).times(&v.inv()?);
        }
    }
    let solve_end = |given: Option<A>, unit: &A, other: &A, draw: &mut dyn FnMut() -> Result<A>| -> Result<A> {
        if let Some(g) = given {
            return Ok(g);
        }
        if unit.is_unit() {
            return Ok(t.times(other).times(&unit.inv()?));
        }
        if t.times(other).is_zero() && unit.is_zero() {
            return draw();
        }
        Err(Error::Precondition("end coordinate cannot be solved".into()))
    };
    a[0] = solve_end(a0, &chain[0].0, &chain[0].1, draw)?;
    d[0] = solve_end(d0, &chain[m - 2].1, &chain[m - 2].0, draw)?;
    UniversalPoint::new(m, chain, a, d, t)
}

/// Random `F_q`-point of `H̃`: `t` uniform; for `t ≠ 0` the chain is fixed by
/// `[1 : w]`, `w ≠ 0`, and for `t = 0` it lies on a uniformly chosen
/// component of the special fibre.
pub fn sample_field_point(m: usize, field: Field, rng: &mut impl Rng) -> Result<UniversalPoint> {
    let t = draw_any(field, 1, rng)?;
    let one = A::one(field, 1);
    let zero = A::zero(field, 1);
    if m == 1 {
        let (a0, d0) = if t.is_zero() {
            let z = draw_any(field, 1, rng)?;
            if rng.gen_bool(0.5) {
                (z, zero)
            } else {
                (zero, z)
            }
        } else {
            let a0 = draw_nonzero(field, rng)?;
            let d0 = t.times(&a0.inv()?);
            (a0, d0)
        };
        return UniversalPoint::new(1, Vec::new(), vec![a0], vec![d0], t);
    }
    let mut chain = Vec::with_capacity(m - 1);
    if t.is_zero() {
        let comp = rng.gen_range(1..m);
        for j in 1..m {
            let pair = match j.cmp(&comp) {
                std::cmp::Ordering::Less => (one.clone(), zero.clone()),
                std::cmp::Ordering::Greater => (zero.clone(), one.clone()),
                std::cmp::Ordering::Equal => {
                    let k = rng.gen_range(0..=field.order().unwrap_or(2) as usize);
                    if k == 0 {
                        (zero.clone(), one.clone())
                    } else {
                        (one.clone(), draw_any(field, 1, rng)?)
                    }
                }
            };
            chain.push(pair);
        }
    } else {
        let mut cur = (one.clone(), draw_nonzero(field, rng)?);
        for _ in 1..m {
            chain.push(cur.clone());
            cur = normalize_pair(&t.times(&cur.0), &cur.1)?;
        }
    }
    let mut draw = || draw_any(field, 1, rng);
    solve_fibre(m, chain, t, None, None, &mut draw)
}

/// Random point near `Q[m,i]` over `k[ε]/(εⁿ)`: the two chart coordinates
/// `w = v_{i−1}/u_{i−1}` and `z = u_i/v_i` (`a_0`, `d_0` at the ends) are
/// drawn from `𝔪`, `t = wz`, and the chain is propagated outwards. With
/// `absolute`, `t` is forced to vanish by zeroing `z`.
pub fn sample_near_q(m: usize, i: usize, field: Field, order: usize, absolute: bool, rng: &mut impl Rng) -> Result<UniversalPoint> {
    IdealType::q(m, i)?;
    let w = draw_maximal(field, order, rng)?;
    let z = if absolute { A::zero(field, order) } else { draw_maximal(field, order, rng)? };
    let t = w.times(&z);
    if m == 1 {
        return UniversalPoint::new(1, Vec::new(), vec![w], vec![z], t);
    }
    let one = t.one_like();
    let chain: Vec<(A, A)> = (1..m)
        .map(|j| if j < i { (one.clone(), t.pow((i - 1 - j) as u32).times(&w)) } else { (t.pow((j - i) as u32).times(&z), one.clone()) })
        .collect();
    let a0 = (i == 1).then(|| w.clone());
    let d0 = (i == m).then(|| z.clone());
    let mut draw = || draw_maximal(field, order, rng);
    solve_fibre(m, chain, t, a0, d0, &mut draw)
}

/// Random point near `c[m,i](a)`: `[u_i : v_i] = [a + δ : 1]` with `δ ∈ 𝔪`,
/// `t ∈ 𝔪` (zero with `absolute`), the rest propagated and solved.
pub fn sample_near_c(
    m: usize,
    i: usize,
    a: &Scalar,
    order: usize,
    absolute: bool,
    rng: &mut impl Rng,
) -> Result<UniversalPoint> {
    IdealType::c(m, i, a.clone())?;
    let field = a.field();
    let lead = A::from_scalar(a.clone(), order).plus(&draw_maximal(field, order, rng)?);
    let t = if absolute { A::zero(field, order) } else { draw_maximal(field, order, rng)? };
    let one = t.one_like();
    let inv = lead.inv()?;
    let chain: Vec<(A, A)> = (1..m)
        .map(|j| match j.cmp(&i) {
            std::cmp::Ordering::Less => (one.clone(), t.pow((i - j) as u32).times(&inv)),
            std::cmp::Ordering::Equal => (lead.clone(), one.clone()),
            std::cmp::Ordering::Greater => (t.pow((j - i) as u32).times(&lead), one.clone()),
        })
        .collect();
    let mut draw = || draw_maximal(field, order, rng);
    solve_fibre(m, chain, t, None, None, &mut draw)
}

// ---------------------------------------------------------------------------
// Equations as strings

fn pv(name: &str) -> Poly {
    Poly::var(name)
}

/// The defining equations and generators for given `m`, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationSet {
    pub m: usize,
    pub chain: Vec<String>,
    pub family: Vec<String>,
    pub generators: Vec<String>,
    pub image: Vec<String>,
}

pub fn equation_set(m: usize) -> Result<EquationSet> {
    if m == 0 {
        return Err(Error::InvalidIndex("m must be >= 1".into()));
    }
    let t = pv(T_VAR);
    let u = |i: usize| pv(&var('u', i));
    let v = |i: usize| pv(&var('v', i));
    let a = |k: usize| if k == m { Poly::int(1) } else { pv(&var('a', k)) };
    let d = |k: usize| if k == m { Poly::int(1) } else { pv(&var('d', k)) };
    let eq = |l: Poly, r: Poly| Equation::new(l, r).to_string();
    let chain = (1..m.saturating_sub(1)).map(|i| eq(v(i).mul(&u(i + 1)), t.mul(&u(i)).mul(&v(i + 1)))).collect();
    let mut family = Vec::new();
    if m == 1 {
        family.push(eq(a(0).mul(&d(0)), t.clone()));
    } else {
        family.push(eq(a(0).mul(&u(1)), t.mul(&v(1))));
        family.push(eq(d(0).mul(&v(m - 1)), t.mul(&u(m - 1))));
        for i in 1..m {
            family.push(eq(a(i).mul(&u(i)), d(m - i).mul(&v(i))));
        }
    }
    let x = |k: usize| if k == 0 { Poly::int(1) } else { (1..k).fold(pv("x"), |p, _| p.mul(&pv("x"))) };
    let y = |k: usize| if k == 0 { Poly::int(1) } else { (1..k).fold(pv("y"), |p, _| p.mul(&pv("y"))) };
    let mut generators = Vec::new();
    for i in 0..=m {
        let f = if i == 0 {
            (0..=m).fold(Poly::zero(), |p, k| p.add(&a(k).mul(&x(k))))
        } else if i == m {
            (0..=m).fold(Poly::zero(), |p, k| p.add(&d(k).mul(&y(k))))
        } else {
            let xs = (0..=m - i).fold(Poly::zero(), |p, k| p.add(&a(i + k).mul(&x(k))));
            let ys = (1..=i).fold(Poly::zero(), |p, k| p.add(&d(m - i + k).mul(&y(k))));
            u(i).mul(&xs).add(&v(i).mul(&ys))
        };
        generators.push(format!("F_{i} = {f}"));
    }
    let sigma = |i: usize| if i == 0 { Poly::int(1) } else { pv(&format!("sigma_{i}")) };
    let tau = |j: usize| if j == 0 { Poly::int(1) } else { pv(&format!("tau_{j}")) };
    let image = image_pairs(m).map(|(i, j)| eq(sigma(i).mul(&tau(j)), t.mul(&sigma(i - 1)).mul(&tau(j - 1)))).collect();
    Ok(EquationSet { m, chain, family, generators, image })
}

impl EquationSet {
    pub fn to_json(&self) -> Value {
        json!(self)
    }
}
