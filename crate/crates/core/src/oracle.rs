//! Brute-force ground truth over prime fields.
//!
//! Ideals of colength `k` are found level by level: every colength-`k`
//! ideal `I` lies in some colength-`(k−1)` ideal `J` with `J/I ≅ k` (take
//! `J = I + (s)` for a socle element `s` of `R/I`), and then `𝔪J ⊆ I`. So the
//! ideals one level down from `J` are exactly the preimages of hyperplanes of
//! `J/𝔪J`. Nothing here uses the classification of ideals; types are attached
//! afterwards as labels.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::coeffs::{Field, LimitPoint, Scalar};
use crate::error::{Error, Result};
use crate::ideals::{classify, field_ring, flat_limit, IdealType, NodeIdeal};
use crate::linalg::Subspace;
use crate::node_ring::{NodeRing, NodeSeries};
use crate::par;
use crate::ArtinScalar;

pub const CACHE_SCHEMA: u32 = 1;

/// Explicit limits; exceeding one is an error, never a silent truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub max_colength: usize,
    pub max_ideals: usize,
    pub max_tuples: u64,
    pub max_chains: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_colength: 6, max_ideals: 200_000, max_tuples: 3_000_000, max_chains: 1_000_000 }
    }
}

fn prime_field(q: u64) -> Result<Field> {
    Field::prime(q).map_err(|_| Error::Precondition(format!("oracle needs a prime field, got q={q}")))
}

fn check_colength(m: usize, cfg: &OracleConfig) -> Result<()> {
    if m == 0 {
        return Err(Error::Precondition("colength must be positive".into()));
    }
    if m > cfg.max_colength {
        return Err(Error::ResourceCap(format!("colength {m} exceeds max_colength {}", cfg.max_colength)));
    }
    Ok(())
}

fn row_series(ring: &NodeRing<ArtinScalar>, v: &[Scalar]) -> NodeSeries<ArtinScalar> {
    NodeSeries::from_k_coords(ring, v).expect("coordinates of own ring")
}

/// `𝔪 · J` as a subspace.
fn maximal_times(ideal: &NodeIdeal) -> Subspace {
    let ring = ideal.ring();
    let mut s = Subspace::zero(ideal.field(), ideal.space().ambient());
    for r in ideal.space().rows() {
        let z = row_series(ring, r);
        s.insert(z.mul_x_pow(1).k_coords());
        s.insert(z.mul_y_pow(1).k_coords());
    }
    s
}

/// Minimal number of generators, `dim I/𝔪I`.
pub fn min_generators(ideal: &NodeIdeal) -> usize {
    ideal.space().rank() - maximal_times(ideal).rank()
}

/// All ideals `I ⊂ J` with `dim J/I = 1`.
pub fn hyperplane_subideals(j: &NodeIdeal) -> Result<Vec<NodeIdeal>> {
    let field = j.field();
    let elems = field.elements().ok_or_else(|| Error::Precondition("finite field required".into()))?;
    let mj = maximal_times(j);
    let mut reach = mj.clone();
    let mut lift: Vec<Vec<Scalar>> = Vec::new();
    for r in j.space().rows() {
        if reach.insert(r.clone()) {
            lift.push(r.clone());
        }
    }
    let g = lift.len();
    let q = elems.len();
    let mut out = Vec::new();
    // Functional φ on J/𝔪J, normalized so its first nonzero entry (at p) is 1;
    // ker φ is spanned by e_k (k < p) and e_k − φ_k e_p (k > p).
    for p in 0..g {
        let tail = g - 1 - p;
        let total = q.pow(tail as u32);
        for code in 0..total {
            let mut c = code;
            let mut space = mj.clone();
            for (k, e) in lift.iter().enumerate() {
                if k < p {
                    space.insert(e.clone());
                } else if k > p {
                    let phi = &elems[c % q];
                    c /= q;
                    let v: Vec<Scalar> = e.iter().zip(&lift[p]).map(|(a, b)| a - &(phi * b)).collect();
                    space.insert(v);
                }
            }
            out.push(NodeIdeal::from_subspace(j.ring(), space)?);
        }
    }
    Ok(out)
}

fn sort_dedup(ideals: Vec<NodeIdeal>) -> Vec<NodeIdeal> {
    let mut map: BTreeMap<Subspace, NodeIdeal> = BTreeMap::new();
    for i in ideals {
        map.entry(i.space().clone()).or_insert(i);
    }
    map.into_values().collect()
}

/// Every finite-colength ideal at the node of colength `1..=depth`, in the
/// ring truncated at `N = depth`. Entry `k − 1` holds colength `k`, sorted by
/// echelon basis.
pub fn enumerate_levels(q: u64, depth: usize, cfg: &OracleConfig) -> Result<Vec<Vec<NodeIdeal>>> {
    let field = prime_field(q)?;
    check_colength(depth, cfg)?;
    let ring = field_ring(field, depth);
    let mut current = vec![NodeIdeal::unit(&ring)];
    let mut levels = Vec::with_capacity(depth);
    let mut total = 0usize;
    for k in 1..=depth {
        let children = par::map(&current, hyperplane_subideals);
        let mut next = Vec::new();
        for c in children {
            next.extend(c?);
        }
        let next = sort_dedup(next);
        total += next.len();
        if total > cfg.max_ideals {
            return Err(Error::ResourceCap(format!(
                "ideal enumeration stopped at colength {k} after {total} ideals (max_ideals {})",
                cfg.max_ideals
            )));
        }
        levels.push(next.clone());
        current = next;
    }
    Ok(levels)
}

/// All colength-`m` ideals at the node over `F_q` with at most `g`
/// generators, in the truncation `N = m`.
pub fn enumerate_ideals(q: u64, m: usize, g: usize, cfg: &OracleConfig) -> Result<Vec<NodeIdeal>> {
    if g == 0 {
        return Err(Error::Precondition("need at least one generator".into()));
    }
    let levels = enumerate_levels(q, m, cfg)?;
    Ok(levels[m - 1].iter().filter(|i| min_generators(i) <= g).cloned().collect())
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    r as u64
}

/// Independent cross-check: ideals generated by sets of at most `g` elements
/// of `𝔪`, each taken up to scalars, keeping those of colength exactly `m`.
pub fn enumerate_by_generators(q: u64, m: usize, g: usize, cfg: &OracleConfig) -> Result<Vec<NodeIdeal>> {
    let field = prime_field(q)?;
    check_colength(m, cfg)?;
    if g == 0 {
        return Err(Error::Precondition("need at least one generator".into()));
    }
    let ring = field_ring(field, m);
    let elems = field.elements().expect("finite field");
    let dim = ring.slots();
    // Projective points of 𝔪: coordinate 0 is the constant term.
    let mut points: Vec<Vec<Scalar>> = Vec::new();
    for p in 1..dim {
        let tail = dim - 1 - p;
        for code in 0..(q as usize).pow(tail as u32) {
            let mut c = code;
            let mut v = vec![field.zero(); dim];
            v[p] = field.one();
            for slot in v.iter_mut().skip(p + 1) {
                *slot = elems[c % q as usize].clone();
                c /= q as usize;
            }
            points.push(v);
        }
    }
    let e = points.len() as u64;
    let tuples: u64 = (1..=g as u64).map(|k| binomial(e, k)).fold(0u64, |a, b| a.saturating_add(b));
    if tuples > cfg.max_tuples {
        return Err(Error::ResourceCap(format!(
            "{tuples} generator sets exceed max_tuples {} (q={q}, m={m}, g={g})",
            cfg.max_tuples
        )));
    }
    let gens: Vec<NodeSeries<ArtinScalar>> = points.iter().map(|v| row_series(&ring, v)).collect();
    let xm = ring.x_pow(m).k_coords();
    let ym = ring.y_pow(m).k_coords();
    let keep = |ideal: &NodeIdeal| {
        ideal.length() == m && ideal.space().contains_vector(&xm) && ideal.space().contains_vector(&ym)
    };
    // Blocks indexed by the first generator; remaining ones have larger index.
    let blocks = par::map_range(gens.len(), |first| {
        let mut found = BTreeSet::new();
        let mut stack: Vec<usize> = vec![first];
        let visit = |set: &[usize], found: &mut BTreeSet<Subspace>| -> Result<()> {
            let ideal = NodeIdeal::from_generators(&ring, set.iter().map(|&k| gens[k].clone()).collect())?;
            if keep(&ideal) {
                found.insert(ideal.space().clone());
            }
            Ok(())
        };
        visit(&stack, &mut found)?;
        // Odometer over increasing index sequences extending `first`.
        loop {
            if stack.len() < g && *stack.last().unwrap() + 1 < gens.len() {
                let next = stack.last().unwrap() + 1;
                stack.push(next);
            } else {
                loop {
                    if stack.len() == 1 {
                        return Ok(found);
                    }
                    let top = stack.pop().unwrap() + 1;
                    if top < gens.len() {
                        stack.push(top);
                        break;
                    }
                }
            }
            visit(&stack, &mut found)?;
        }
    });
    let mut all = BTreeSet::new();
    for b in blocks {
        all.extend(b?);
    }
    all.into_iter().map(|s| NodeIdeal::from_subspace(&ring, s)).collect()
}

/// One ideal in an incidence graph.
#[derive(Clone, Debug)]
pub struct IncidenceNode {
    pub colength: usize,
    pub index: usize,
    pub ideal: NodeIdeal,
    pub ty: Option<IdealType>,
}

impl IncidenceNode {
    pub fn label(&self) -> String {
        match &self.ty {
            Some(t) => t.to_string(),
            None => format!("L{}#{}", self.colength, self.index),
        }
    }
}

/// Containment `lower ⊂ upper` between adjacent colength levels, given as
/// `(level position, node index)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IncidenceEdge {
    pub lower: (usize, usize),
    pub upper: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct IncidenceGraph {
    pub q: u64,
    pub trunc: usize,
    pub levels: Vec<usize>,
    pub nodes: Vec<Vec<IncidenceNode>>,
    pub edges: Vec<IncidenceEdge>,
}

/// Containment graph between the ideals of the given colengths. Levels must
/// be distinct; edges join levels whose colengths differ by one and are
/// decided by subspace containment.
pub fn incidence_graph(q: u64, levels: &[usize], cfg: &OracleConfig) -> Result<IncidenceGraph> {
    let depth = *levels.iter().max().ok_or_else(|| Error::Precondition("no levels".into()))?;
    if levels.iter().collect::<BTreeSet<_>>().len() != levels.len() || levels.contains(&0) {
        return Err(Error::Precondition("levels must be distinct positive colengths".into()));
    }
    let all = enumerate_levels(q, depth, cfg)?;
    let nodes: Vec<Vec<IncidenceNode>> = levels
        .iter()
        .map(|&k| {
            all[k - 1]
                .iter()
                .enumerate()
                .map(|(index, ideal)| IncidenceNode { colength: k, index, ideal: ideal.clone(), ty: classify(ideal).ok() })
                .collect()
        })
        .collect();
    let mut edges = Vec::new();
    for (lp, &lk) in levels.iter().enumerate() {
        for (up, &uk) in levels.iter().enumerate() {
            if uk + 1 != lk {
                continue;
            }
            let found = par::map(&nodes[lp], |lo| {
                nodes[up]
                    .iter()
                    .filter(|hi| hi.ideal.space().contains(lo.ideal.space()))
                    .map(|hi| IncidenceEdge { lower: (lp, lo.index), upper: (up, hi.index) })
                    .collect::<Vec<_>>()
            });
            edges.extend(found.into_iter().flatten());
        }
    }
    edges.sort();
    Ok(IncidenceGraph { q, trunc: depth, levels: levels.to_vec(), nodes, edges })
}

impl IncidenceGraph {
    pub fn level_position(&self, colength: usize) -> Option<usize> {
        self.levels.iter().position(|&k| k == colength)
    }

    pub fn find(&self, ty: &IdealType) -> Option<(usize, usize)> {
        let lp = self.level_position(ty.m())?;
        self.nodes[lp].iter().position(|n| n.ty.as_ref() == Some(ty)).map(|i| (lp, i))
    }

    pub fn node(&self, at: (usize, usize)) -> &IncidenceNode {
        &self.nodes[at.0][at.1]
    }

    /// Super-ideals one colength down.
    pub fn successors(&self, at: (usize, usize)) -> Vec<&IncidenceNode> {
        self.edges.iter().filter(|e| e.lower == at).map(|e| self.node(e.upper)).collect()
    }

    pub fn out_degree(&self, at: (usize, usize)) -> usize {
        self.edges.iter().filter(|e| e.lower == at).count()
    }

    pub fn in_degree(&self, at: (usize, usize)) -> usize {
        self.edges.iter().filter(|e| e.upper == at).count()
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph incidence_q{} {{\n  rankdir=BT;\n", self.q);
        for (lp, level) in self.nodes.iter().enumerate() {
            s.push_str(&format!("  subgraph level_{} {{ rank=same;", self.levels[lp]));
            for n in level {
                s.push_str(&format!(" n{}_{} [label=\"{}\"];", lp, n.index, n.label()));
            }
            s.push_str(" }\n");
        }
        for e in &self.edges {
            s.push_str(&format!("  n{}_{} -> n{}_{};\n", e.lower.0, e.lower.1, e.upper.0, e.upper.1));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .flatten()
            .map(|n| json!({"colength": n.colength, "index": n.index, "label": n.label(), "ideal": n.ideal.to_json()}))
            .collect();
        json!({
            "q": self.q,
            "trunc": self.trunc,
            "levels": self.levels,
            "nodes": nodes,
            "edges": self.edges.iter().map(|e| json!({
                "lower": [self.levels[e.lower.0], e.lower.1],
                "upper": [self.levels[e.upper.0], e.upper.1],
            })).collect::<Vec<_>>(),
        })
    }
}

/// Chains `I_m ⊂ I_{m−1} ⊂ ⋯ ⊂ I_{m−len+1}` of ideals at the node with
/// consecutive colengths, listed by type from the bottom level up.
pub fn partial_flag_chains(q: u64, m: usize, len: usize, cfg: &OracleConfig) -> Result<Vec<Vec<IdealType>>> {
    if len == 0 || len > m {
        return Err(Error::Precondition(format!("flag length {len} must be in 1..={m}")));
    }
    let levels = enumerate_levels(q, m, cfg)?;
    let types: Vec<Vec<IdealType>> = levels
        .iter()
        .map(|l| l.iter().map(classify).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut paths: Vec<Vec<usize>> = (0..levels[m - 1].len()).map(|a| vec![a]).collect();
    for k in ((m + 1 - len)..m).rev() {
        // Colength-k ideals containing each colength-(k+1) ideal.
        let up: Vec<Vec<usize>> = par::map(&levels[k], |lo| {
            levels[k - 1]
                .iter()
                .enumerate()
                .filter(|(_, hi)| hi.space().contains(lo.space()))
                .map(|(j, _)| j)
                .collect()
        });
        let mut next = Vec::new();
        for p in &paths {
            for &j in &up[*p.last().unwrap()] {
                let mut longer = p.clone();
                longer.push(j);
                next.push(longer);
            }
            if next.len() > cfg.max_chains {
                return Err(Error::ResourceCap(format!("more than {} flag chains", cfg.max_chains)));
            }
        }
        paths = next;
    }
    Ok(paths
        .into_iter()
        .map(|p| p.iter().enumerate().map(|(pos, &ix)| types[m - 1 - pos][ix].clone()).collect())
        .collect())
}

/// Complete chains `I_m ⊂ I_{m−1} ⊂ ⋯ ⊂ I_1 = 𝔪`.
pub fn flag_chains(q: u64, m: usize, cfg: &OracleConfig) -> Result<Vec<Vec<IdealType>>> {
    partial_flag_chains(q, m, m, cfg)
}

/// Chains with a common per-level stratum pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternGroup {
    pub pattern: Vec<String>,
    pub count: usize,
    pub c_levels: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagCensus {
    pub q: u64,
    pub m: usize,
    pub len: usize,
    pub chain_count: usize,
    pub groups: Vec<PatternGroup>,
    /// Patterns not in the closure of any other pattern.
    pub components: Vec<Vec<String>>,
    /// Every group has `(q−1)^{#C levels}` points, i.e. the C parameters
    /// along a chain vary independently.
    pub product_structure: bool,
}

/// Endpoints of the curve `C[k,i]` as `a → 0` and `a → ∞`, computed as
/// flat limits.
fn curve_endpoints(k: usize, i: usize) -> Result<[String; 2]> {
    let z = classify(&flat_limit(k, i, LimitPoint::Zero)?)?;
    let w = classify(&flat_limit(k, i, LimitPoint::Infinity)?)?;
    Ok([z.stratum_label(), w.stratum_label()])
}

fn specializes(lower: &[String], upper: &[String], ends: &BTreeMap<String, [String; 2]>) -> bool {
    lower != upper
        && lower.iter().zip(upper).all(|(l, u)| l == u || ends.get(u).is_some_and(|e| e.contains(l)))
}

/// Census of the punctual full flags: chains grouped by pattern, and the
/// maximal patterns under specialization of C-levels to their endpoints.
pub fn flag_point_census(q: u64, m: usize, cfg: &OracleConfig) -> Result<FlagCensus> {
    partial_flag_census(q, m, m, cfg)
}

/// As [`flag_point_census`] for the chains of `len` consecutive levels
/// starting at colength `m`.
///
/// Along a chain each C-level parameter can be varied alone (containments
/// only depend on types), so a pattern's closure consists of the patterns
/// obtained by sending some C-levels to their endpoints. The group sizes
/// `(q−1)^{#C}` recorded in `product_structure` confirm this on the data.
pub fn partial_flag_census(q: u64, m: usize, len: usize, cfg: &OracleConfig) -> Result<FlagCensus> {
    let chains = partial_flag_chains(q, m, len, cfg)?;
    let mut groups: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    let mut ends = BTreeMap::new();
    for c in &chains {
        for t in c {
            if let IdealType::C { m: k, i, .. } = t {
                let label = t.stratum_label();
                if !ends.contains_key(&label) {
                    ends.insert(label, curve_endpoints(*k, *i)?);
                }
            }
        }
        *groups.entry(c.iter().map(IdealType::stratum_label).collect()).or_default() += 1;
    }
    let groups: Vec<PatternGroup> = groups
        .into_iter()
        .map(|(pattern, count)| {
            let c_levels = pattern.iter().filter(|l| l.starts_with('C')).count();
            PatternGroup { pattern, count, c_levels }
        })
        .collect();
    let product_structure = groups.iter().all(|g| g.count as u64 == (q - 1).pow(g.c_levels as u32));
    let components = groups
        .iter()
        .filter(|g| !groups.iter().any(|h| specializes(&g.pattern, &h.pattern, &ends)))
        .map(|g| g.pattern.clone())
        .collect();
    Ok(FlagCensus { q, m, len, chain_count: chains.len(), groups, components, product_structure })
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema: u32,
    version: String,
    config: OracleConfig,
    census: FlagCensus,
}

fn cache_path(dir: &Path, q: u64, m: usize, len: usize) -> PathBuf {
    dir.join(format!("census-q{q}-m{m}-len{len}.json"))
}

/// Census through an on-disk JSON cache. Entries with another schema,
/// version or config are recomputed; `refresh` forces recomputation.
pub fn cached_census(
    dir: &Path,
    q: u64,
    m: usize,
    len: usize,
    cfg: &OracleConfig,
    refresh: bool,
) -> Result<FlagCensus> {
    let path = cache_path(dir, q, m, len);
    if !refresh {
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(file) = serde_json::from_str::<CacheFile>(&text) {
                if file.schema == CACHE_SCHEMA && file.version == crate::VERSION && file.config == *cfg {
                    return Ok(file.census);
                }
            }
        }
    }
    let census = partial_flag_census(q, m, len, cfg)?;
    let file = CacheFile { schema: CACHE_SCHEMA, version: crate::VERSION.into(), config: cfg.clone(), census };
    fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
    let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&path, text).map_err(|e| Error::Io(e.to_string()))?;
    Ok(file.census)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::canonical_ideal;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    fn types(ideals: &[NodeIdeal]) -> BTreeSet<IdealType> {
        ideals.iter().map(|i| classify(i).unwrap()).collect()
    }

    #[test]
    fn counts_over_small_fields() {
        for (q, maxm) in [(2u64, 5usize), (3, 5), (5, 4)] {
            for m in 1..=maxm {
                let got = enumerate_ideals(q, m, 2, &cfg()).unwrap();
                assert_eq!(got.len(), m + (m - 1) * (q as usize - 1), "q={q} m={m}");
            }
        }
    }

    #[test]
    fn binary_colength_two() {
        let got = enumerate_ideals(2, 2, 2, &cfg()).unwrap();
        let f = Field::prime(2).unwrap();
        let want: BTreeSet<IdealType> =
            [IdealType::q(2, 1).unwrap(), IdealType::q(2, 2).unwrap(), IdealType::c(2, 1, f.one()).unwrap()].into();
        assert_eq!(types(&got), want);
        let unique = enumerate_ideals(2, 1, 2, &cfg()).unwrap();
        assert!(enumerate_ideals(2, 1, 1, &cfg()).unwrap().is_empty());
        assert_eq!(unique.len(), 1);
        assert_eq!(classify(&unique[0]).unwrap(), IdealType::q(1, 1).unwrap());
    }

    #[test]
    fn two_and_three_generators_agree() {
        for q in [2u64, 3] {
            for m in 1..=4 {
                assert_eq!(enumerate_ideals(q, m, 2, &cfg()).unwrap(), enumerate_ideals(q, m, 3, &cfg()).unwrap());
            }
        }
    }

    #[test]
    fn generator_search_matches_levels() {
        for (q, m, g) in [(2u64, 1usize, 1usize), (2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3), (2, 3, 3), (3, 3, 2)] {
            let by_gens = enumerate_by_generators(q, m, g, &cfg()).unwrap();
            let by_levels = enumerate_ideals(q, m, g, &cfg()).unwrap();
            assert_eq!(by_gens, by_levels, "q={q} m={m} g={g}");
        }
    }

    #[test]
    fn canonical_ideals_all_appear() {
        for q in [2u64, 3, 5] {
            let f = Field::prime(q).unwrap();
            for m in 1..=4 {
                let got: BTreeSet<Subspace> =
                    enumerate_ideals(q, m, 2, &cfg()).unwrap().iter().map(|i| i.space().clone()).collect();
                let mut want = BTreeSet::new();
                for i in 1..=m {
                    want.insert(canonical_ideal(&IdealType::q(m, i).unwrap(), f, m).unwrap().space().clone());
                }
                for i in 1..m {
                    for a in f.elements().unwrap().into_iter().filter(|a| !a.is_zero()) {
                        let t = IdealType::c(m, i, a).unwrap();
                        want.insert(canonical_ideal(&t, f, m).unwrap().space().clone());
                    }
                }
                assert_eq!(got, want, "q={q} m={m}");
            }
        }
    }

    #[test]
    fn caps_are_errors() {
        let tight = OracleConfig { max_ideals: 4, ..cfg() };
        assert!(matches!(enumerate_ideals(3, 3, 2, &tight), Err(Error::ResourceCap(_))));
        let few = OracleConfig { max_tuples: 10, ..cfg() };
        assert!(matches!(enumerate_by_generators(2, 2, 2, &few), Err(Error::ResourceCap(_))));
        assert!(matches!(enumerate_ideals(2, 9, 2, &cfg()), Err(Error::ResourceCap(_))));
        assert!(matches!(enumerate_ideals(4, 2, 2, &cfg()), Err(Error::Precondition(_))));
    }

    #[test]
    fn incidence_degrees() {
        let g = incidence_graph(2, &[3, 2], &cfg()).unwrap();
        let f = Field::prime(2).unwrap();
        let c = g.find(&IdealType::c(3, 1, f.one()).unwrap()).unwrap();
        assert_eq!(g.out_degree(c), 1);
        assert_eq!(g.successors(c)[0].ty, Some(IdealType::q(2, 1).unwrap()));
        let q32 = g.find(&IdealType::q(3, 2).unwrap()).unwrap();
        let mut succ: Vec<String> = g.successors(q32).iter().map(|n| n.label()).collect();
        succ.sort();
        assert_eq!(succ, ["C[2,1](1)", "Q[2,1]", "Q[2,2]"]);
        for (i, want) in [(1, "Q[2,1]"), (3, "Q[2,2]")] {
            let at = g.find(&IdealType::q(3, i).unwrap()).unwrap();
            assert_eq!(g.successors(at).iter().map(|n| n.label()).collect::<Vec<_>>(), [want]);
        }
        let h = incidence_graph(3, &[2, 1], &cfg()).unwrap();
        assert!(h.nodes[0].iter().all(|n| h.out_degree((0, n.index)) == 1));
        assert!(g.to_dot().contains("->"));
    }

    #[test]
    fn census_small() {
        let c2 = flag_point_census(2, 2, &cfg()).unwrap();
        assert_eq!(c2.chain_count, 3);
        assert_eq!(c2.components, vec![vec!["C[2,1]".to_string(), "Q[1,1]".into()]]);
        for q in [2u64, 3] {
            let c3 = flag_point_census(q, 3, &cfg()).unwrap();
            assert_eq!(c3.components.len(), 3, "q={q}");
            assert!(c3.product_structure);
        }
    }

    #[test]
    fn partial_census_counts() {
        for m in 2..=5 {
            let pairs = partial_flag_census(2, m, 2, &cfg()).unwrap();
            assert_eq!(pairs.components.len(), 2 * m - 3, "pairs m={m}");
        }
        for m in 3..=5 {
            let triples = partial_flag_census(2, m, 3, &cfg()).unwrap();
            assert_eq!(triples.components.len(), 2 * m - 3, "triples m={m}");
        }
    }

    #[test]
    fn full_census_at_five_has_non_column_strata() {
        let c = flag_point_census(2, 5, &cfg()).unwrap();
        assert_eq!(c.components.len(), 9);
        let odd: Vec<&Vec<String>> =
            c.components.iter().filter(|p| p[0].starts_with('C') && p[3].starts_with('C')).collect();
        assert_eq!(odd.len(), 2);
        assert!(odd.iter().all(|p| p[2] == "Q[3,2]"));
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("nodehilb-cache-{}", std::process::id()));
        let a = cached_census(&dir, 2, 3, 3, &cfg(), true).unwrap();
        let b = cached_census(&dir, 2, 3, 3, &cfg(), false).unwrap();
        assert_eq!(a, b);
        fs::remove_dir_all(&dir).ok();
    }
}
