//! Finite-colength ideals of the truncated node ring, stored as subspaces of
//! the underlying `k`-vector space.
//!
//! An ideal over `k[ε]/(εⁿ)` is the `k`-span of `ε^e · x^i · g`, `ε^e · y^j · g`
//! over its generators `g`. Coordinates are those of
//! [`NodeSeries::k_coords`].

use serde_json::{json, Value};
use std::fmt;

use crate::coeffs::{rational_to_string, ArtinScalar, CoeffRing, Field, LimitPoint, LocalCoeff, RatFn, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, Subspace};
use crate::node_ring::{associate_normal_form, NodeRing, NodeSeries};

/// Type of a colength-`m` ideal of the node: `C[m,i](a) = (y^i + a x^{m−i})`
/// for `1 ≤ i ≤ m−1`, `a ≠ 0`, or `Q[m,i] = (x^{m−i+1}, y^i)` for `1 ≤ i ≤ m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdealType {
    C { m: usize, i: usize, a: Scalar },
    Q { m: usize, i: usize },
}

impl IdealType {
    pub fn c(m: usize, i: usize, a: Scalar) -> Result<Self> {
        if m < 2 || i == 0 || i >= m {
            return Err(Error::InvalidIndex(format!("C[{m},{i}] needs 1 <= i <= m-1")));
        }
        if a.is_zero() {
            return Err(Error::InvalidIndex("C-type parameter must be nonzero".into()));
        }
        Ok(IdealType::C { m, i, a })
    }

    pub fn q(m: usize, i: usize) -> Result<Self> {
        if m < 1 || i == 0 || i > m {
            return Err(Error::InvalidIndex(format!("Q[{m},{i}] needs 1 <= i <= m")));
        }
        Ok(IdealType::Q { m, i })
    }

    pub fn m(&self) -> usize {
        match self {
            IdealType::C { m, .. } | IdealType::Q { m, .. } => *m,
        }
    }

    pub fn i(&self) -> usize {
        match self {
            IdealType::C { i, .. } | IdealType::Q { i, .. } => *i,
        }
    }

    pub fn param(&self) -> Option<&Scalar> {
        match self {
            IdealType::C { a, .. } => Some(a),
            IdealType::Q { .. } => None,
        }
    }

    pub fn is_q(&self) -> bool {
        matches!(self, IdealType::Q { .. })
    }

    /// Label with the parameter stripped, e.g. `C[3,1]`.
    pub fn stratum_label(&self) -> String {
        match self {
            IdealType::C { m, i, .. } => format!("C[{m},{i}]"),
            IdealType::Q { m, i } => format!("Q[{m},{i}]"),
        }
    }

    /// Type of the ideal after exchanging `x` and `y`.
    pub fn mirror(&self) -> Self {
        match self {
            IdealType::Q { m, i } => IdealType::Q { m: *m, i: m + 1 - i },
            IdealType::C { m, i, a } => IdealType::C { m: *m, i: m - i, a: a.inv().expect("nonzero parameter") },
        }
    }
}

impl fmt::Display for IdealType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealType::C { m, i, a } => write!(f, "C[{m},{i}]({a})"),
            IdealType::Q { m, i } => write!(f, "Q[{m},{i}]"),
        }
    }
}

/// An ideal of a truncated node ring over `k` or `k[ε]/(εⁿ)`.
#[derive(Clone, Debug)]
pub struct NodeIdeal {
    ring: NodeRing<ArtinScalar>,
    generators: Vec<NodeSeries<ArtinScalar>>,
    space: Subspace,
}

impl PartialEq for NodeIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.space == other.space
    }
}

impl Eq for NodeIdeal {}

impl std::hash::Hash for NodeIdeal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.space.hash(state)
    }
}

fn eps_multiples(z: &NodeSeries<ArtinScalar>) -> impl Iterator<Item = Vec<Scalar>> + '_ {
    let n = z.artin_order();
    (0..n).map(move |e| {
        let f = z.field();
        z.scale(&ArtinScalar::eps_power(f, n, e, f.one())).k_coords()
    })
}

/// Kernel of the map from the `k`-span of monomials onto the genuine
/// quotient ring `R̃_S/(x^{N+1}, y^{N+1})` of the relative ring: there
/// `t^{N+1−k} x^k = x^{N+1} y^{N+1−k} = 0`, and likewise for `y^k`. Empty in
/// absolute mode.
fn truncation_kernel(ring: &NodeRing<ArtinScalar>) -> Vec<Vec<Scalar>> {
    let Some(t) = ring.t() else { return Vec::new() };
    let n = ring.trunc_order();
    let mut out = Vec::new();
    for k in 0..=n {
        let c = t.pow((n + 1 - k) as u32);
        if c.is_zero() {
            continue;
        }
        for z in [ring.x_term(k, c.clone()), ring.y_term(k, c)] {
            out.extend(eps_multiples(&z));
        }
    }
    out
}

impl NodeIdeal {
    /// The ideal generated by `gens` in `ring`.
    pub fn from_generators(ring: &NodeRing<ArtinScalar>, gens: Vec<NodeSeries<ArtinScalar>>) -> Result<Self> {
        for g in &gens {
            if g.ring() != ring {
                return Err(Error::RingMismatch("generator outside the ideal's ring".into()));
            }
        }
        let field = ring.coeff_zero().field();
        let dim = ring.slots() * ring.coeff_zero().order();
        let mut space = Subspace::zero(field, dim);
        for v in truncation_kernel(ring) {
            space.insert(v);
        }
        for g in &gens {
            for z in g.monomial_multiples() {
                for v in eps_multiples(&z) {
                    space.insert(v);
                }
            }
        }
        Ok(NodeIdeal { ring: ring.clone(), generators: gens, space })
    }

    /// Ideal over a field generated by series with scalar coefficients.
    pub fn from_scalar_generators(gens: &[NodeSeries<Scalar>]) -> Result<Self> {
        let first = gens.first().ok_or_else(|| Error::Precondition("no generators".into()))?;
        let ring = first.lift(1).ring().clone();
        let lifted = gens.iter().map(|g| g.lift(1)).collect();
        Self::from_generators(&ring, lifted)
    }

    /// Ideal with the given subspace, which must be stable under `x`, `y`
    /// and `ε`.
    pub fn from_subspace(ring: &NodeRing<ArtinScalar>, space: Subspace) -> Result<Self> {
        let rows: Vec<NodeSeries<ArtinScalar>> = space
            .rows()
            .iter()
            .map(|r| NodeSeries::from_k_coords(ring, r))
            .collect::<Result<_>>()?;
        let ideal = Self::from_generators(ring, rows)?;
        if ideal.space != space {
            return Err(Error::Precondition("subspace is not an ideal".into()));
        }
        Ok(ideal)
    }

    pub fn unit(ring: &NodeRing<ArtinScalar>) -> Self {
        Self::from_generators(ring, vec![ring.one()]).expect("unit ideal")
    }

    pub fn ring(&self) -> &NodeRing<ArtinScalar> {
        &self.ring
    }

    pub fn trunc_order(&self) -> usize {
        self.ring.trunc_order()
    }

    pub fn artin_order(&self) -> usize {
        self.ring.coeff_zero().order()
    }

    pub fn field(&self) -> Field {
        self.ring.coeff_zero().field()
    }

    pub fn generators(&self) -> &[NodeSeries<ArtinScalar>] {
        &self.generators
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    /// Basis of the ideal as ring elements (echelon rows).
    pub fn basis(&self) -> Vec<NodeSeries<ArtinScalar>> {
        self.space
            .rows()
            .iter()
            .map(|r| NodeSeries::from_k_coords(&self.ring, r).expect("row of own ring"))
            .collect()
    }

    /// `dim_k` of the quotient of the truncated ring.
    pub fn length(&self) -> usize {
        self.space.codim()
    }

    /// Colength over the base.
    ///
    /// Over a field: `dim_k R_N / I`, certified by `x^m, y^m ∈ I` and `m ≤ N`;
    /// otherwise the truncation is too small. Over `k[ε]/(εⁿ)`: the `k`-length
    /// divided by `n`, which is the rank when the quotient is flat.
    pub fn colength(&self) -> Result<usize> {
        let n = self.artin_order();
        let len = self.length();
        let trunc = self.trunc_order();
        if n == 1 {
            if len > trunc
                || !self.contains_element(&self.ring.x_pow(len))
                || !self.contains_element(&self.ring.y_pow(len))
            {
                return Err(Error::TruncationTooSmall(trunc));
            }
            return Ok(len);
        }
        if len % n != 0 {
            return Err(Error::Precondition(format!("length {len} is not a multiple of {n}")));
        }
        Ok(len / n)
    }

    pub fn contains_element(&self, z: &NodeSeries<ArtinScalar>) -> bool {
        self.space.contains_vector(&z.k_coords())
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &NodeIdeal) -> Result<bool> {
        self.check(other)?;
        Ok(self.space.contains(&other.space))
    }

    fn check(&self, other: &NodeIdeal) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch("ideals live in different truncated rings".into()));
        }
        Ok(())
    }

    pub fn sum(&self, other: &NodeIdeal) -> Result<NodeIdeal> {
        self.check(other)?;
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Ok(NodeIdeal { ring: self.ring.clone(), generators: gens, space: self.space.sum(&other.space) })
    }

    pub fn add_generator(&self, g: NodeSeries<ArtinScalar>) -> Result<NodeIdeal> {
        let extra = NodeIdeal::from_generators(&self.ring, vec![g])?;
        self.sum(&extra)
    }

    /// Residue of `z` modulo the ideal in echelon-reduced form.
    pub fn reduce(&self, z: &NodeSeries<ArtinScalar>) -> NodeSeries<ArtinScalar> {
        NodeSeries::from_k_coords(&self.ring, &self.space.reduce(&z.k_coords())).expect("own ring")
    }

    /// Same ideal in a ring of another truncation order. Raising the order
    /// is faithful only once the ideal contains the truncated powers.
    pub fn retruncate(&self, trunc: usize) -> Result<NodeIdeal> {
        let ring = self.ring.with_trunc(trunc);
        let gens = self.generators.iter().map(|g| g.retruncate(trunc)).collect();
        NodeIdeal::from_generators(&ring, gens)
    }

    /// Exchange `x` and `y`.
    pub fn mirror(&self) -> NodeIdeal {
        let gens = self.generators.iter().map(NodeSeries::mirror).collect();
        NodeIdeal::from_generators(&self.ring, gens).expect("same ring")
    }

    /// Standard monomial slots: free columns of the echelon basis when the
    /// base is a field.
    pub fn quotient_slots(&self) -> Vec<usize> {
        let n = self.artin_order();
        self.space.free_columns().into_iter().filter(|c| c % n == 0).map(|c| c / n).collect()
    }

    /// Residue ideal modulo `ε`, over the base field.
    pub fn residue(&self) -> NodeIdeal {
        let gens: Vec<NodeSeries<Scalar>> = self.generators.iter().map(|g| g.residue()).collect();
        if gens.is_empty() {
            let ring = self.ring.residue_ring().one().lift(1).ring().clone();
            return NodeIdeal::from_generators(&ring, vec![]).expect("empty ideal");
        }
        NodeIdeal::from_scalar_generators(&gens).expect("residue ring")
    }

    pub fn classify(&self) -> Result<IdealType> {
        classify(self)
    }

    pub fn to_json(&self) -> Value {
        let gens: Vec<Value> = if self.artin_order() == 1 {
            self.generators.iter().map(|g| serde_json::to_value(g.residue()).expect("json")).collect()
        } else {
            self.generators.iter().map(|g| serde_json::to_value(g).expect("json")).collect()
        };
        let colength = self.colength().ok();
        let ty = if self.artin_order() == 1 && self.ring.is_absolute() {
            self.classify().ok().map(|t| t.to_string())
        } else {
            None
        };
        json!({ "N": self.trunc_order(), "generators": gens, "colength": colength, "type": ty })
    }
}

impl NodeRing<ArtinScalar> {
    fn residue_ring(&self) -> NodeRing<Scalar> {
        let z = self.coeff_zero().constant().clone();
        match self.t() {
            None => NodeRing::absolute(&z, self.trunc_order()),
            Some(t) => NodeRing::relative(t.constant().clone(), self.trunc_order()),
        }
    }
}

/// Absolute ring over `field` with coefficients `k[ε]/(εⁿ)`, `n = order`.
pub fn artin_ring(field: Field, order: usize, trunc: usize) -> NodeRing<ArtinScalar> {
    NodeRing::absolute(&ArtinScalar::zero(field, order), trunc)
}

/// Absolute ring over the field itself.
pub fn field_ring(field: Field, trunc: usize) -> NodeRing<ArtinScalar> {
    artin_ring(field, 1, trunc)
}

#[cfg(test)]
fn lift1(c: Scalar) -> ArtinScalar {
    ArtinScalar::from_scalar(c, 1)
}

/// Generators of the canonical ideal of a given type.
pub fn canonical_generators(t: &IdealType, ring: &NodeRing<ArtinScalar>) -> Vec<NodeSeries<ArtinScalar>> {
    match t {
        IdealType::Q { m, i } => vec![ring.x_pow(m - i + 1), ring.y_pow(*i)],
        IdealType::C { m, i, a } => {
            let a = ring.coeff_one().from_scalar_like(a.clone());
            vec![ring.y_pow(*i).add(&ring.x_term(m - i, a))]
        }
    }
}

/// The canonical ideal of type `t` over `field` at truncation `trunc ≥ m`.
pub fn canonical_ideal(t: &IdealType, field: Field, trunc: usize) -> Result<NodeIdeal> {
    let (m, i) = (t.m(), t.i());
    match t {
        IdealType::Q { .. } => IdealType::q(m, i)?,
        IdealType::C { a, .. } => {
            if a.field() != field {
                return Err(Error::FieldMismatch("parameter field differs from requested field".into()));
            }
            IdealType::c(m, i, a.clone())?
        }
    };
    if trunc < m {
        return Err(Error::TruncationTooSmall(trunc));
    }
    let ring = field_ring(field, trunc);
    NodeIdeal::from_generators(&ring, canonical_generators(t, &ring))
}

fn require_field_absolute(ideal: &NodeIdeal) -> Result<()> {
    if ideal.artin_order() != 1 || !ideal.ring.is_absolute() {
        return Err(Error::Precondition("classification needs an absolute ideal over a field".into()));
    }
    Ok(())
}

/// Type of a finite-colength ideal by matching against canonical ideals.
///
/// For each `i` the parameter of a candidate `C[m,i](a)` is solved from the
/// residues of `y^i` and `x^{m−i}`; every candidate is confirmed by equality
/// with the regenerated canonical ideal.
pub fn classify(ideal: &NodeIdeal) -> Result<IdealType> {
    require_field_absolute(ideal)?;
    let m = ideal.colength()?;
    if m == 0 {
        return Err(Error::UnitIdeal);
    }
    let field = ideal.field();
    let trunc = ideal.trunc_order();
    let ring = ideal.ring.clone();
    for i in 1..=m {
        let t = IdealType::Q { m, i };
        if canonical_ideal(&t, field, trunc)? == *ideal {
            return Ok(t);
        }
    }
    for i in 1..m {
        let ry = ideal.space.reduce(&ring.y_pow(i).k_coords());
        let rx = ideal.space.reduce(&ring.x_pow(m - i).k_coords());
        let Some(k) = rx.iter().position(|c| !c.is_zero()) else { continue };
        // y^i ≡ λ x^{m−i} means y^i − λ x^{m−i} ∈ I, so a = −λ.
        let lambda = ry[k].div(&rx[k])?;
        if lambda.is_zero() || ry.iter().zip(&rx).any(|(u, v)| u != &(&lambda * v)) {
            continue;
        }
        let t = IdealType::C { m, i, a: -&lambda };
        if canonical_ideal(&t, field, trunc)? == *ideal {
            return Ok(t);
        }
    }
    Err(Error::ClassificationFailure(format!("no type of colength {m} matches")))
}

/// Type of an ideal from its elements' associate types: the smallest pure
/// powers `x^α₀`, `y^β₀` in the ideal, together with any basis element of
/// mixed type `x^α + p y^β` with `α < α₀`, `β < β₀`.
pub fn classify_by_elements(ideal: &NodeIdeal) -> Result<IdealType> {
    require_field_absolute(ideal)?;
    let m = ideal.colength()?;
    if m == 0 {
        return Err(Error::UnitIdeal);
    }
    let ring = ideal.ring.clone();
    let min_power = |f: &dyn Fn(usize) -> NodeSeries<ArtinScalar>| {
        (1..=ring.trunc_order()).find(|&k| ideal.contains_element(&f(k)))
    };
    let alpha0 = min_power(&|k| ring.x_pow(k)).ok_or(Error::TruncationTooSmall(ring.trunc_order()))?;
    let beta0 = min_power(&|k| ring.y_pow(k)).ok_or(Error::TruncationTooSmall(ring.trunc_order()))?;
    for row in ideal.basis() {
        let z = row.residue();
        let (ty, _) = associate_normal_form(&z)?;
        if ty.alpha > 0 && ty.beta > 0 && ty.alpha < alpha0 && ty.beta < beta0 {
            let p = ty.param.clone().expect("mixed type has a parameter");
            let t = IdealType::c(ty.alpha + ty.beta, ty.beta, p.inv()?)?;
            if t.m() != m {
                return Err(Error::ClassificationFailure(format!("mixed element {z} has degree {} but colength {m}", t.m())));
            }
            return Ok(t);
        }
    }
    if alpha0 + beta0 - 1 != m {
        return Err(Error::ClassificationFailure(format!(
            "monomial ideal (x^{alpha0}, y^{beta0}) has colength {} not {m}",
            alpha0 + beta0 - 1
        )));
    }
    IdealType::q(m, beta0)
}

/// Both classification paths, which must agree.
pub fn classify_cross_checked(ideal: &NodeIdeal) -> Result<IdealType> {
    let a = classify(ideal)?;
    let b = classify_by_elements(ideal)?;
    if a != b {
        return Err(Error::CrossCheck(format!("template match {a} but element types give {b}")));
    }
    Ok(a)
}

fn ratfn_order(f: &RatFn, point: LimitPoint) -> Option<i64> {
    match point {
        LimitPoint::Zero => f.valuation_at_zero(),
        LimitPoint::Infinity => f.degree().map(|d| -d),
    }
}

fn normalize_row(row: &[Scalar], point: LimitPoint) -> Result<Vec<Scalar>> {
    let fns: Vec<&RatFn> = row.iter().map(|s| s.as_ratfn().expect("Q(a) entries")).collect();
    let mu = fns.iter().filter_map(|f| ratfn_order(f, point)).min().ok_or(Error::ZeroVector)?;
    let k = match point {
        LimitPoint::Zero => -mu,
        LimitPoint::Infinity => mu,
    };
    Ok(fns.iter().map(|f| Scalar::RatFn(f.shift(k))).collect())
}

fn evaluate_row(row: &[Scalar], point: LimitPoint) -> Result<Vec<Scalar>> {
    row.iter()
        .map(|s| {
            let f = s.as_ratfn().expect("Q(a) entries");
            let v = match point {
                LimitPoint::Zero => f.eval_at_zero(),
                LimitPoint::Infinity => f.eval_at_infinity(),
            }?;
            Ok(Scalar::Q(v))
        })
        .collect()
}

/// Limit in the Grassmannian of a subspace of `ℚ(a)^d` as `a → point`.
///
/// Rows are rescaled to be regular with a unit entry and evaluated; while the
/// evaluations are dependent, a dependent combination of rows (which vanishes
/// at the point) replaces one of them and is rescaled again.
pub fn subspace_limit(space: &Subspace, point: LimitPoint) -> Result<Subspace> {
    let d = space.ambient();
    let mut rows: Vec<Vec<Scalar>> = space.rows().iter().map(|r| normalize_row(r, point)).collect::<Result<_>>()?;
    let r = rows.len();
    let cap = 64 * (d + 1) * (r + 1);
    for _ in 0..cap {
        let evals: Vec<Vec<Scalar>> = rows.iter().map(|row| evaluate_row(row, point)).collect::<Result<_>>()?;
        let lim = Subspace::span(Field::Rational, d, evals.iter().cloned());
        if lim.rank() == r {
            return Ok(lim);
        }
        let cols: Vec<Vec<Scalar>> = (0..d).map(|j| evals.iter().map(|e| e[j].clone()).collect()).collect();
        let lambda = nullspace(Field::Rational, r, &cols).into_iter().next().expect("dependent rows");
        let k = lambda.iter().position(|c| !c.is_zero()).expect("nonzero relation");
        let mut comb = vec![Field::RationalFunction.zero(); d];
        for (row, l) in rows.iter().zip(&lambda) {
            if l.is_zero() {
                continue;
            }
            let lf = l.to_ratfn()?;
            for (c, v) in comb.iter_mut().zip(row) {
                *c = &*c + &(&lf * v);
            }
        }
        rows[k] = normalize_row(&comb, point)?;
    }
    Err(Error::Invariant("Grassmannian limit did not stabilize".into()))
}

/// Flat limit of the family `C[m,i](a)`, `a` an indeterminate, as `a → 0` or
/// `a → ∞`. The result is an ideal over ℚ at truncation `m + 1`.
pub fn flat_limit(m: usize, i: usize, point: LimitPoint) -> Result<NodeIdeal> {
    let a = Scalar::RatFn(RatFn::var());
    let t = IdealType::c(m, i, a)?;
    let trunc = m + 1;
    let fam = canonical_ideal(&t, Field::RationalFunction, trunc)?;
    let lim = subspace_limit(fam.space(), point)?;
    NodeIdeal::from_subspace(&field_ring(Field::Rational, trunc), lim)
}

/// `Ann(J/I) = {z : zJ ⊆ I}` for `I ⊆ J` with `J/I` of length one over the
/// base, by solving the linear conditions on `z`.
pub fn annihilator_quotient(i: &NodeIdeal, j: &NodeIdeal) -> Result<NodeIdeal> {
    if !j.contains(i)? {
        return Err(Error::Precondition("first ideal must be contained in the second".into()));
    }
    let n = i.artin_order();
    if i.length() != j.length() + n {
        return Err(Error::Precondition("quotient must have length one over the base".into()));
    }
    let ring = i.ring.clone();
    let field = i.field();
    let dim = ring.slots() * n;
    let jrows = j.basis();
    // Column s of the linear map is the image of the s-th basis vector of
    // the ring: its products with J's basis, reduced modulo I.
    let images: Vec<Vec<Scalar>> = (0..dim)
        .map(|s| {
            let mut e = vec![field.zero(); dim];
            e[s] = field.one();
            let z = NodeSeries::from_k_coords(&ring, &e).expect("basis vector");
            jrows.iter().flat_map(|w| i.space.reduce(&z.mul(w).k_coords())).collect()
        })
        .collect();
    let nrows = images.first().map_or(0, Vec::len);
    let matrix: Vec<Vec<Scalar>> = (0..nrows).map(|r| images.iter().map(|col| col[r].clone()).collect()).collect();
    let kernel = nullspace(field, dim, &matrix);
    let ann = NodeIdeal::from_subspace(&ring, Subspace::span(field, dim, kernel))?;
    if ann.length() != n {
        return Err(Error::Invariant(format!("annihilator has length {} over k, expected {n}", ann.length())));
    }
    Ok(ann)
}

/// Parameter rendered as in labels.
pub fn param_string(a: &Scalar) -> String {
    match a {
        Scalar::Q(r) => rational_to_string(r),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::q(n, 1)
    }

    fn ideal(gens: Vec<NodeSeries<ArtinScalar>>, ring: &NodeRing<ArtinScalar>) -> NodeIdeal {
        NodeIdeal::from_generators(ring, gens).unwrap()
    }

    #[test]
    fn colength_examples() {
        let r = field_ring(Field::Rational, 4);
        let i = ideal(vec![r.x_pow(3), r.y_pow(1)], &r);
        assert_eq!(i.colength().unwrap(), 3);
        assert_eq!(i.quotient_slots(), vec![0, 1, 2]);
        assert_eq!(ideal(vec![r.x_pow(2), r.y_pow(2)], &r).colength().unwrap(), 3);
        assert_eq!(ideal(vec![r.x_pow(1), r.y_pow(1)], &r).colength().unwrap(), 1);
        assert_eq!(NodeIdeal::unit(&r).colength().unwrap(), 0);
        let r3 = field_ring(Field::Rational, 3);
        assert_eq!(ideal(vec![r3.y_pow(1).add(&r3.x_pow(2))], &r3).colength().unwrap(), 3);
    }

    #[test]
    fn colength_is_stable_under_truncation() {
        for n in 3..8 {
            let r = field_ring(Field::Rational, n);
            assert_eq!(ideal(vec![r.y_pow(1).add(&r.x_pow(2))], &r).colength().unwrap(), 3);
        }
    }

    #[test]
    fn zero_ideal_needs_larger_truncation() {
        let r = field_ring(Field::Rational, 3);
        assert_eq!(ideal(vec![], &r).colength(), Err(Error::TruncationTooSmall(3)));
    }

    #[test]
    fn containment_examples() {
        let r = field_ring(Field::Rational, 4);
        let a = q(5);
        let big = ideal(vec![r.x_pow(2), r.y_pow(1)], &r);
        let c = ideal(vec![r.y_pow(1).add(&r.x_term(2, lift1(a)))], &r);
        assert!(big.contains(&c).unwrap());
        let q32 = ideal(vec![r.x_pow(2), r.y_pow(2)], &r);
        assert!(big.contains(&q32).unwrap());
        let other = ideal(vec![r.x_pow(1), r.y_pow(2)], &r);
        assert!(!other.contains(&ideal(vec![r.y_pow(1).add(&r.x_pow(2))], &r)).unwrap());
    }

    #[test]
    fn classify_examples() {
        let r = field_ring(Field::Rational, 5);
        let i = ideal(vec![r.y_pow(1).add(&r.x_term(3, lift1(q(2))))], &r);
        assert_eq!(classify_cross_checked(&i).unwrap(), IdealType::C { m: 4, i: 1, a: q(2) });
        let i = ideal(vec![r.x_pow(2), r.y_pow(2)], &r);
        assert_eq!(classify_cross_checked(&i).unwrap(), IdealType::Q { m: 3, i: 2 });
        let i = ideal(vec![r.x_pow(1), r.y_pow(1)], &r);
        assert_eq!(classify_cross_checked(&i).unwrap(), IdealType::Q { m: 1, i: 1 });
    }

    #[test]
    fn canonical_round_trip() {
        let f = Field::Prime(5);
        for m in 1..=5 {
            for i in 1..=m {
                let t = IdealType::q(m, i).unwrap();
                assert_eq!(classify_cross_checked(&canonical_ideal(&t, f, m + 1).unwrap()).unwrap(), t);
            }
            for i in 1..m {
                for a in 1..5 {
                    let t = IdealType::c(m, i, Scalar::fp(5, a)).unwrap();
                    assert_eq!(classify_cross_checked(&canonical_ideal(&t, f, m + 1).unwrap()).unwrap(), t);
                }
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let r = field_ring(Field::Rational, 6);
        let q53 = canonical_ideal(&IdealType::q(5, 3).unwrap(), Field::Rational, 6).unwrap();
        assert_eq!(q53, ideal(vec![r.x_pow(3), r.y_pow(3)], &r));
        assert!(IdealType::q(3, 4).is_err());
        assert!(IdealType::c(3, 3, q(1)).is_err());
        assert!(IdealType::c(3, 1, q(0)).is_err());
    }

    #[test]
    fn flat_limits_small_cases() {
        let r = field_ring(Field::Rational, 4);
        assert_eq!(flat_limit(3, 1, LimitPoint::Zero).unwrap(), ideal(vec![r.x_pow(3), r.y_pow(1)], &r));
        assert_eq!(flat_limit(3, 1, LimitPoint::Infinity).unwrap(), ideal(vec![r.x_pow(2), r.y_pow(2)], &r));
        let r3 = field_ring(Field::Rational, 3);
        assert_eq!(flat_limit(2, 1, LimitPoint::Zero).unwrap(), ideal(vec![r3.x_pow(2), r3.y_pow(1)], &r3));
    }

    #[test]
    fn annihilator_examples() {
        let r = field_ring(Field::Rational, 3);
        let maxi = ideal(vec![r.x_pow(1), r.y_pow(1)], &r);
        let i = ideal(vec![r.x_pow(2), r.y_pow(1)], &r);
        assert_eq!(annihilator_quotient(&i, &maxi).unwrap(), maxi);
        let c = ideal(vec![r.y_pow(1).add(&r.x_term(1, lift1(q(3))))], &r);
        let ann = annihilator_quotient(&c, &maxi).unwrap();
        assert_eq!(ann.colength().unwrap(), 1);
        assert!(annihilator_quotient(&maxi, &i).is_err());
    }

    #[test]
    fn mirror_types() {
        let f = Field::Prime(7);
        let t = IdealType::c(5, 2, Scalar::fp(7, 3)).unwrap();
        let i = canonical_ideal(&t, f, 6).unwrap();
        assert_eq!(classify(&i.mirror()).unwrap(), t.mirror());
        let t = IdealType::q(5, 2).unwrap();
        assert_eq!(classify(&canonical_ideal(&t, f, 6).unwrap().mirror()).unwrap(), t.mirror());
    }

    #[test]
    fn json_shape() {
        let i = canonical_ideal(&IdealType::q(2, 1).unwrap(), Field::Prime(3), 2).unwrap();
        let v = i.to_json();
        assert_eq!(v["colength"], 2);
        assert_eq!(v["type"], "Q[2,1]");
        assert_eq!(v["generators"][0]["mode"], "abs");
    }
}
