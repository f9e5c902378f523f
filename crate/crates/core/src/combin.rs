//! Combinatorial models of the component structure: punctual chains, the
//! germ chain of the local Hilbert scheme, flag chains and the components of
//! the punctual full-flag scheme, plus global counts for nodal curves.
//!
//! A punctual stratum is described by its per-level pattern: one `C[k,i]` or
//! `Q[k,i]` label per colength, from the deepest level up. `C[k,i]` closes up
//! by adding its endpoints `Q[k,i]` and `Q[k,i+1]`; closures and meets of
//! strata are computed levelwise.
//!
//! Label grammar:
//!
//! ```text
//! label   = kind "[" ints [ ";" ints ] "]" ;
//! kind    = "C" | "Q" | "D" ;
//! ints    = int { "," int } ;
//! ```
//!
//! `C[m,i]`, `Q[m,i]`, `D[m,i]` are curves, points and germs; `D[m,m-1;i,i']`
//! is a germ of the pair flag scheme; `C[m,m-2,...;i,i-1,...]` is a product
//! of curves across levels (a single level is written `C[m;i]`).

use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::coeffs::Field;
use crate::error::{Error, Result};
use crate::ideals::IdealType;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentLabel {
    C { m: usize, i: usize },
    Q { m: usize, i: usize },
    D { m: usize, i: usize },
    DPair { m: usize, i: usize, ip: usize },
    Product { levels: Vec<usize>, indices: Vec<usize> },
}

impl ComponentLabel {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidIndex(s));
        match self {
            ComponentLabel::C { m, i } if *i == 0 || i >= m => bad(format!("C[{m},{i}]")),
            ComponentLabel::Q { m, i } if *i == 0 || i > m => bad(format!("Q[{m},{i}]")),
            ComponentLabel::D { m, i } if i > m || *m == 0 => bad(format!("D[{m},{i}]")),
            ComponentLabel::DPair { m, i, ip } => {
                if *m < 2 || *i > *m || *ip + 1 > *m || *ip > *i || *ip + 1 < *i {
                    bad(self.to_string())
                } else {
                    Ok(())
                }
            }
            ComponentLabel::Product { levels, indices } => {
                if levels.is_empty() || levels.len() != indices.len() {
                    return bad(self.to_string());
                }
                if levels.windows(2).any(|w| w[0] <= w[1]) {
                    return bad(format!("{self}: levels must decrease"));
                }
                for (&k, &i) in levels.iter().zip(indices) {
                    ComponentLabel::C { m: k, i }.validate()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of curve factors.
    pub fn dimension(&self) -> usize {
        match self {
            ComponentLabel::C { .. } => 1,
            ComponentLabel::Q { .. } => 0,
            ComponentLabel::D { m, .. } => *m,
            ComponentLabel::DPair { m, .. } => *m,
            ComponentLabel::Product { levels, .. } => levels.len(),
        }
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentLabel::C { m, i } => write!(f, "C[{m},{i}]"),
            ComponentLabel::Q { m, i } => write!(f, "Q[{m},{i}]"),
            ComponentLabel::D { m, i } => write!(f, "D[{m},{i}]"),
            ComponentLabel::DPair { m, i, ip } => write!(f, "D[{m},{};{i},{ip}]", m - 1),
            ComponentLabel::Product { levels, indices } => write!(f, "C[{};{}]", join(levels), join(indices)),
        }
    }
}

fn parse_ints(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index {t:?}"))))
        .collect()
}

impl FromStr for ComponentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse(format!("bad component label {s:?}"));
        let kind = s.chars().next().ok_or_else(err)?;
        let body = s.get(1..).and_then(|r| r.strip_prefix('[')).and_then(|r| r.strip_suffix(']')).ok_or_else(err)?;
        let label = match body.split_once(';') {
            None => {
                let v = parse_ints(body)?;
                let [m, i] = v[..] else { return Err(err()) };
                match kind {
                    'C' => ComponentLabel::C { m, i },
                    'Q' => ComponentLabel::Q { m, i },
                    'D' => ComponentLabel::D { m, i },
                    _ => return Err(err()),
                }
            }
            Some((a, b)) => {
                let (levels, indices) = (parse_ints(a)?, parse_ints(b)?);
                match kind {
                    'C' => ComponentLabel::Product { levels, indices },
                    'D' => {
                        let (&[m, m1], &[i, ip]) = (&levels[..], &indices[..]) else { return Err(err()) };
                        if m1 + 1 != m {
                            return Err(err());
                        }
                        ComponentLabel::DPair { m, i, ip }
                    }
                    _ => return Err(err()),
                }
            }
        };
        label.validate()?;
        Ok(label)
    }
}

impl Serialize for ComponentLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

// ---------------------------------------------------------------------------
// Patterns

/// Stratum of a punctual Hilbert scheme at one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stratum {
    C(usize, usize),
    Q(usize, usize),
}

impl Stratum {
    pub fn of(t: &IdealType) -> Self {
        match t {
            IdealType::C { m, i, .. } => Stratum::C(*m, *i),
            IdealType::Q { m, i } => Stratum::Q(*m, *i),
        }
    }

    /// The stratum and the strata in its closure.
    pub fn closure(self) -> Vec<Stratum> {
        match self {
            Stratum::C(k, i) => vec![self, Stratum::Q(k, i), Stratum::Q(k, i + 1)],
            Stratum::Q(..) => vec![self],
        }
    }

    pub fn is_curve(self) -> bool {
        matches!(self, Stratum::C(..))
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stratum::C(k, i) => write!(f, "C[{k},{i}]"),
            Stratum::Q(k, i) => write!(f, "Q[{k},{i}]"),
        }
    }
}

/// Per-level strata of a flag stratum, deepest level first.
pub type Pattern = Vec<Stratum>;

pub fn pattern_strings(p: &[Stratum]) -> Vec<String> {
    p.iter().map(ToString::to_string).collect()
}

/// Whether consecutive levels can be nested: `lower ⊂ upper` with colengths
/// `k+1`, `k`.
pub fn nests(lower: Stratum, upper: Stratum) -> bool {
    match (lower, upper) {
        (Stratum::C(k, i), Stratum::Q(k1, j)) => k1 + 1 == k && i == j,
        (Stratum::Q(k, i), Stratum::C(k1, j)) => k1 + 1 == k && j + 1 == i,
        (Stratum::Q(k, i), Stratum::Q(k1, j)) => k1 + 1 == k && (j == i || j + 1 == i) && j >= 1 && j <= k1,
        (Stratum::C(..), Stratum::C(..)) => false,
    }
}

/// Fills the `Q` levels of a pattern on colengths `top, top−1, …, top−len+1`
/// whose curve levels are given. Each gap is forced by its neighbours.
pub fn complete_pattern(top: usize, len: usize, curves: &[(usize, usize)]) -> Result<Pattern> {
    let bottom = top + 1 - len;
    let mut slots: Vec<Option<Stratum>> = vec![None; len];
    let pos = |k: usize| top - k;
    for &(k, i) in curves {
        if k < bottom || k > top {
            return Err(Error::InvalidIndex(format!("curve level {k} outside {bottom}..={top}")));
        }
        slots[pos(k)] = Some(Stratum::C(k, i));
    }
    for _ in 0..len {
        for k in bottom..=top {
            if slots[pos(k)].is_some() {
                continue;
            }
            let below = if k < top { slots[pos(k + 1)] } else { None };
            let above = if k > bottom { slots[pos(k - 1)] } else { None };
            let fill = match (below, above) {
                (Some(Stratum::C(_, i)), _) => Some(Stratum::Q(k, i)),
                (_, Some(Stratum::C(_, j))) => Some(Stratum::Q(k, j + 1)),
                (Some(Stratum::Q(_, l)), _) if l == 1 => Some(Stratum::Q(k, 1)),
                (Some(Stratum::Q(_, l)), _) if l == k + 1 => Some(Stratum::Q(k, k)),
                _ => None,
            };
            slots[pos(k)] = fill;
        }
    }
    let p: Pattern = slots
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidIndex(format!("pattern with curves {curves:?} is not determined")))?;
    if p.windows(2).any(|w| !nests(w[0], w[1])) {
        return Err(Error::InvalidIndex(format!("curves {curves:?} do not nest")));
    }
    Ok(p)
}

/// Pattern of a curve or product label on `len` levels below `top`.
pub fn label_pattern(label: &ComponentLabel, top: usize, len: usize) -> Result<Pattern> {
    match label {
        ComponentLabel::C { m, i } => complete_pattern(top, len, &[(*m, *i)]),
        ComponentLabel::Product { levels, indices } => {
            let curves: Vec<(usize, usize)> = levels.iter().copied().zip(indices.iter().copied()).collect();
            complete_pattern(top, len, &curves)
        }
        ComponentLabel::Q { m, i } if len == 1 && *m == top => Ok(vec![Stratum::Q(*m, *i)]),
        _ => Err(Error::Precondition(format!("{label} has no punctual pattern"))),
    }
}

/// Meet of the closures of two strata: the levelwise intersection, its
/// maximal patterns and their dimension. `None` if they are disjoint.
pub fn closure_meet(a: &[Stratum], b: &[Stratum]) -> Option<(Vec<Pattern>, usize)> {
    let mut per_level = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let bx: BTreeSet<Stratum> = x.closure().into_iter().collect();
        let common: Vec<Stratum> = y.closure().into_iter().filter(|s| bx.contains(s)).collect();
        if common.is_empty() {
            return None;
        }
        // A shared curve dominates its endpoints.
        let top: Vec<Stratum> = match common.iter().find(|s| s.is_curve()) {
            Some(c) => vec![*c],
            None => common,
        };
        per_level.push(top);
    }
    let dim = per_level.iter().filter(|l| l[0].is_curve()).count();
    let mut out: Vec<Pattern> = vec![Vec::new()];
    for level in &per_level {
        out = out
            .into_iter()
            .flat_map(|p| {
                level.iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(*s);
                    q
                })
            })
            .collect();
    }
    Some((out, dim))
}

// ---------------------------------------------------------------------------
// Chain graphs

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainComponent {
    pub label: ComponentLabel,
    pub dim: usize,
    /// Per-level strata for punctual components.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<String>>,
    /// Generic point `(points on the x-axis, points on the y-axis)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attachment {
    pub left: usize,
    pub right: usize,
    pub locus: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainGraph {
    pub name: String,
    pub components: Vec<ChainComponent>,
    pub attachments: Vec<Attachment>,
}

impl ChainGraph {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Components of positive dimension.
    pub fn curve_count(&self) -> usize {
        self.components.iter().filter(|c| c.dim > 0).count()
    }

    pub fn labels(&self) -> Vec<String> {
        self.components.iter().map(|c| c.label.to_string()).collect()
    }

    /// Attachments join exactly the consecutive components.
    pub fn is_path(&self) -> bool {
        let n = self.components.len();
        let got: BTreeSet<(usize, usize)> =
            self.attachments.iter().map(|a| (a.left.min(a.right), a.left.max(a.right))).collect();
        let want: BTreeSet<(usize, usize)> = (1..n).map(|k| (k - 1, k)).collect();
        got == want
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("graph \"{}\" {{\n", self.name);
        for (k, c) in self.components.iter().enumerate() {
            s.push_str(&format!("  c{k} [label=\"{}\\ndim {}\"];\n", c.label, c.dim));
        }
        for a in &self.attachments {
            s.push_str(&format!("  c{} -- c{} [label=\"{}\"];\n", a.left, a.right, a.locus));
        }
        s.push_str("}\n");
        s
    }

    /// One line: components joined by their attachment loci when the graph
    /// is a path, else a component list followed by the attachments.
    pub fn to_ascii(&self) -> String {
        if self.is_path() {
            let mut s = String::new();
            for (k, c) in self.components.iter().enumerate() {
                if k > 0 {
                    let a = self.attachments.iter().find(|a| a.left.max(a.right) == k).expect("path edge");
                    s.push_str(&format!(" -({})- ", a.locus));
                }
                s.push_str(&c.label.to_string());
            }
            s.push('\n');
            return s;
        }
        let mut s = self.labels().join(" ") + "\n";
        for a in &self.attachments {
            s.push_str(&format!("  {} x {} at {} (dim {})\n", self.components[a.left].label, self.components[a.right].label, a.locus, a.dim));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn punctual_component(label: ComponentLabel, top: usize, len: usize) -> Result<(ChainComponent, Pattern)> {
    let pattern = label_pattern(&label, top, len)?;
    let dim = pattern.iter().filter(|s| s.is_curve()).count();
    let projection = pattern.iter().map(|s| if s.is_curve() { format!("{s}") } else { format!("pt {s}") }).collect::<Vec<_>>().join(" x ");
    Ok((
        ChainComponent { label, dim, pattern: Some(pattern_strings(&pattern)), signature: None, projection: Some(projection) },
        pattern,
    ))
}

/// Attachments between all pairs of punctual components whose closures meet.
fn meet_attachments(patterns: &[Pattern]) -> Vec<Attachment> {
    let mut out = Vec::new();
    for a in 0..patterns.len() {
        for b in a + 1..patterns.len() {
            if let Some((locus, dim)) = closure_meet(&patterns[a], &patterns[b]) {
                let locus = locus.iter().map(|p| pattern_strings(p).join("<")).collect::<Vec<_>>().join(" | ");
                out.push(Attachment { left: a, right: b, locus, dim });
            }
        }
    }
    out
}

fn punctual_graph(name: String, labels: Vec<ComponentLabel>, top: usize, len: usize) -> Result<ChainGraph> {
    let mut components = Vec::new();
    let mut patterns = Vec::new();
    for l in labels {
        let (c, p) = punctual_component(l, top, len)?;
        components.push(c);
        patterns.push(p);
    }
    let attachments = meet_attachments(&patterns);
    Ok(ChainGraph { name, components, attachments })
}

/// The punctual Hilbert scheme: curves `C[m,1], …, C[m,m−1]` meeting at
/// `Q[m,2], …, Q[m,m−1]`; a point for `m = 1`.
pub fn punctual_chain(m: usize) -> Result<ChainGraph> {
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let name = format!("punctual-{m}");
    if m == 1 {
        let (c, _) = punctual_component(ComponentLabel::Q { m: 1, i: 1 }, 1, 1)?;
        return Ok(ChainGraph { name, components: vec![ChainComponent { dim: 0, ..c }], attachments: Vec::new() });
    }
    punctual_graph(name, (1..m).map(|i| ComponentLabel::C { m, i }).collect(), m, 1)
}

/// The local Hilbert scheme as a chain of `m`-dimensional germs `D[m,0..m]`;
/// `D[m,i]` generically has `m−i` points on the x-axis and `i` on the y-axis.
pub fn hilb_component_graph(m: usize) -> Result<ChainGraph> {
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let support = |i: usize| match i {
        0 => format!("pt {}", ComponentLabel::Q { m, i: 1 }),
        i if i == m => format!("pt {}", ComponentLabel::Q { m, i: m }),
        i => format!("{}", ComponentLabel::C { m, i }),
    };
    let components = (0..=m)
        .map(|i| ChainComponent {
            label: ComponentLabel::D { m, i },
            dim: m,
            pattern: None,
            signature: Some((m - i, i)),
            projection: Some(format!("supported on {}", support(i))),
        })
        .collect();
    let attachments = (1..=m)
        .map(|i| {
            let locus = if m == 1 { "Q[1,1]".to_string() } else { format!("Q[{m},{i}]") };
            Attachment { left: i - 1, right: i, locus, dim: m - 1 }
        })
        .collect();
    Ok(ChainGraph { name: format!("hilb-{m}"), components, attachments })
}

/// The punctual pair flag scheme for colengths `(m, m−1)`: `2m−3` curves
/// alternating between the levels.
pub fn flag_chain_graph(m: usize) -> Result<ChainGraph> {
    if m < 2 {
        return Err(Error::Precondition("pair flags need m >= 2".into()));
    }
    let mut labels = Vec::new();
    for i in 1..m {
        labels.push(ComponentLabel::C { m, i });
        if i + 1 < m {
            labels.push(ComponentLabel::C { m: m - 1, i });
        }
    }
    punctual_graph(format!("flag-{m}"), labels, m, 2)
}

/// The punctual flag scheme for colengths `(m, m−1, m−2)`: the outer curves
/// `C[m,1], C[m−1,1], …, C[m−1,m−2], C[m,m−1]` with the products
/// `C[m,m−2;i,i−1]` alternating with `C[m−1,i]` in between.
pub fn triple_chain_graph(m: usize) -> Result<ChainGraph> {
    if m < 3 {
        return Err(Error::Precondition("triple flags need m >= 3".into()));
    }
    let mut labels = vec![ComponentLabel::C { m, i: 1 }];
    for i in 1..=m - 2 {
        if i >= 2 {
            labels.push(ComponentLabel::Product { levels: vec![m, m - 2], indices: vec![i, i - 1] });
        }
        labels.push(ComponentLabel::C { m: m - 1, i });
    }
    labels.push(ComponentLabel::C { m, i: m - 1 });
    punctual_graph(format!("triple-{m}"), labels, m, 3)
}

/// Germs `D[m,m−1;i,i']`, `0 ≤ i ≤ m`, `i−1 ≤ i' ≤ i`, `i' ≤ m−1`, joined
/// when `|i−j| + |i'−j'| ≤ 1`.
pub fn flag_germ_graph(m: usize) -> Result<ChainGraph> {
    if m < 2 {
        return Err(Error::Precondition("pair flags need m >= 2".into()));
    }
    let mut components = Vec::new();
    for i in 0..=m {
        for ip in i.saturating_sub(1)..=i.min(m - 1) {
            components.push(ChainComponent {
                label: ComponentLabel::DPair { m, i, ip },
                dim: m,
                pattern: None,
                signature: None,
                projection: Some(format!("D[{m},{i}] x D[{},{ip}]", m - 1)),
            });
        }
    }
    let mut attachments = Vec::new();
    for a in 0..components.len() {
        for b in a + 1..components.len() {
            if germ_rule(&components[a].label, &components[b].label) {
                attachments.push(Attachment { left: a, right: b, locus: String::new(), dim: m - 1 });
            }
        }
    }
    Ok(ChainGraph { name: format!("flag-germs-{m}"), components, attachments })
}

/// The stated meeting rule for pair-flag germs.
pub fn germ_rule(a: &ComponentLabel, b: &ComponentLabel) -> bool {
    match (a, b) {
        (ComponentLabel::DPair { i, ip, .. }, ComponentLabel::DPair { i: j, ip: jp, .. }) => {
            i.abs_diff(*j) + ip.abs_diff(*jp) <= 1
        }
        _ => false,
    }
}

/// How the index depth of the full-flag components is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JReading {
    /// One component per column of the triangle, as deep as the column goes.
    #[default]
    Column,
    /// The stated `min` formulas for both families, taken at face value.
    Literal,
    /// Every depth `0..=j` of every column.
    Range,
}

fn column_product(top: usize, i: usize, j: usize) -> ComponentLabel {
    ComponentLabel::Product {
        levels: (0..=j).map(|l| top - 2 * l).collect(),
        indices: (0..=j).map(|l| i - l).collect(),
    }
}

/// Components of the punctual full-flag scheme as products of curves
/// stacked in the columns of the triangle.
pub fn fhilb_components(m: usize, reading: JReading) -> Result<Vec<ComponentLabel>> {
    if m < 2 {
        return Err(Error::Precondition("full flags need m >= 2".into()));
    }
    let mut out = Vec::new();
    for (top, half) in [(m, m / 2), (m - 1, (m - 1) / 2)] {
        if top < 2 {
            continue;
        }
        for i in 1..top {
            // Column depth: rows top, top−2, … while the index stays inside.
            let deep = (i - 1).min(top - i - 1);
            match reading {
                JReading::Column => out.push(column_product(top, i, deep)),
                JReading::Range => out.extend((0..=deep).map(|j| column_product(top, i, j))),
                JReading::Literal => {
                    let slack = if top == m { m as i64 - i as i64 - 1 } else { m as i64 - i as i64 - 3 };
                    let j = (half as i64).min(i as i64 - 1).min(slack);
                    if j >= 0 {
                        out.push(column_product(top, i, j as usize));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Full-flag components as a graph of punctual strata with closure meets.
pub fn fhilb_graph(m: usize, reading: JReading) -> Result<ChainGraph> {
    punctual_graph(format!("fhilb-{m}"), fhilb_components(m, reading)?, m, m)
}

/// The triangle of punctual chains `Hilb⁰_k`, `k = 2..m`, one row per `k`,
/// segments `-` joined at nodes `·`.
pub fn triangle_ascii(m: usize) -> String {
    let mut s = String::new();
    for k in 2..=m {
        s.push_str(&" ".repeat(m - k));
        s.push_str(&vec!["-"; k - 1].join("·"));
        s.push('\n');
    }
    s
}

/// The colength-`(m−1)` ideals containing an ideal of type `t`; over a
/// finite field the `C` family is listed point by point.
pub fn predicted_super_ideals(t: &IdealType, field: Field) -> Result<Vec<IdealType>> {
    let m = t.m();
    if m < 2 {
        return Ok(Vec::new());
    }
    Ok(match t {
        IdealType::C { i, .. } => vec![IdealType::q(m - 1, *i)?],
        IdealType::Q { i, .. } if *i == 1 => vec![IdealType::q(m - 1, 1)?],
        IdealType::Q { i, .. } if *i == m => vec![IdealType::q(m - 1, m - 1)?],
        IdealType::Q { i, .. } => {
            let elems = field.elements().ok_or_else(|| Error::Precondition("finite field required".into()))?;
            let mut v = vec![IdealType::q(m - 1, *i)?, IdealType::q(m - 1, i - 1)?];
            for a in elems.into_iter().filter(|a| !a.is_zero()) {
                v.push(IdealType::c(m - 1, i - 1, a)?);
            }
            v
        }
    })
}

// ---------------------------------------------------------------------------
// Nodal curves

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Factor {
    Point,
    /// Rational chain with this many components.
    Chain { length: usize },
    /// Two smooth components of this dimension meeting transversely.
    NormalCrossing { dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalCounts {
    pub components: u128,
    pub cycle_fibre: Vec<Factor>,
    pub local_model: Vec<Factor>,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

/// Counts for `Hilb_m` of a curve with `nodes` nodes and `c` components, at a
/// point of colength `multiplicities[j]` at node `j`.
pub fn global_counts(m: usize, nodes: usize, c: usize, multiplicities: &[usize]) -> Result<GlobalCounts> {
    if c == 0 {
        return Err(Error::Precondition("a curve has at least one component".into()));
    }
    if multiplicities.len() != nodes {
        return Err(Error::Precondition(format!("{} multiplicities for {nodes} nodes", multiplicities.len())));
    }
    let total: usize = multiplicities.iter().sum();
    if total > m {
        return Err(Error::Precondition(format!("multiplicities sum to {total} > m = {m}")));
    }
    let components = binomial((m + c - 1) as u64, m as u64);
    let cycle_fibre = multiplicities
        .iter()
        .map(|&k| if k <= 1 { Factor::Point } else { Factor::Chain { length: k - 1 } })
        .collect();
    let local_model =
        multiplicities.iter().map(|&k| if k == 0 { Factor::Point } else { Factor::NormalCrossing { dim: k } }).collect();
    Ok(GlobalCounts { components, cycle_fibre, local_model })
}

impl GlobalCounts {
    pub fn to_json(&self) -> Value {
        json!({
            "components": self.components.to_string(),
            "cycle_fibre": self.cycle_fibre,
            "local_model": self.local_model,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_grammar_round_trips() {
        for s in ["C[4,2]", "Q[3,1]", "D[5,2]", "D[4,3;2,1]", "C[5,3;2,1]", "C[2;1]", "C[6,4,2;3,2,1]"] {
            let l: ComponentLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert_eq!("C[ 5 , 3 ; 2 , 1 ]".parse::<ComponentLabel>().unwrap().to_string(), "C[5,3;2,1]");
        for bad in ["C[4,4]", "Q[3,0]", "C[5,3;2]", "D[4,2;1,1]", "X[1,1]", "C[3,5;1,1]", "C4,2"] {
            assert!(bad.parse::<ComponentLabel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn punctual_chain_shapes() {
        let g = punctual_chain(4).unwrap();
        assert_eq!(g.to_ascii().trim(), "C[4,1] -(Q[4,2])- C[4,2] -(Q[4,3])- C[4,3]");
        assert_eq!(punctual_chain(2).unwrap().attachments.len(), 0);
        let p = punctual_chain(1).unwrap();
        assert_eq!((p.len(), p.curve_count()), (1, 0));
        for m in 1..=12 {
            let g = punctual_chain(m).unwrap();
            assert_eq!(g.curve_count(), m - 1);
            assert!(g.is_path());
            assert!(g.attachments.iter().all(|a| a.dim == 0));
        }
    }

    #[test]
    fn germ_chain() {
        let g = hilb_component_graph(3).unwrap();
        assert_eq!(g.labels(), ["D[3,0]", "D[3,1]", "D[3,2]", "D[3,3]"]);
        assert!(g.attachments.iter().all(|a| a.dim == 2));
        assert_eq!(hilb_component_graph(5).unwrap().components[2].signature, Some((3, 2)));
        assert_eq!(hilb_component_graph(1).unwrap().len(), 2);
        for m in 1..=12 {
            let g = hilb_component_graph(m).unwrap();
            assert_eq!(g.len(), m + 1);
            assert!(g.is_path());
        }
    }

    #[test]
    fn pair_and_triple_chains() {
        assert_eq!(flag_chain_graph(3).unwrap().labels(), ["C[3,1]", "C[2,1]", "C[3,2]"]);
        assert_eq!(flag_chain_graph(2).unwrap().len(), 1);
        let t5 = triple_chain_graph(5).unwrap();
        assert_eq!(t5.labels(), ["C[5,1]", "C[4,1]", "C[5,3;2,1]", "C[4,2]", "C[5,3;3,2]", "C[4,3]", "C[5,4]"]);
        let dims: Vec<usize> = t5.components.iter().map(|c| c.dim).collect();
        assert_eq!(dims, [1, 1, 2, 1, 2, 1, 1]);
        assert_eq!(triple_chain_graph(3).unwrap().labels(), ["C[3,1]", "C[2,1]", "C[3,2]"]);
        for m in 2..=12 {
            let g = flag_chain_graph(m).unwrap();
            assert_eq!(g.len(), 2 * m - 3);
            assert!(g.is_path(), "pair m={m}");
            assert!(g.attachments.iter().all(|a| a.dim == 0));
        }
        for m in 3..=12 {
            let g = triple_chain_graph(m).unwrap();
            assert_eq!(g.len(), 2 * m - 3);
            assert!(g.is_path(), "triple m={m}");
        }
    }

    #[test]
    fn pair_chain_attachment_points() {
        let g = flag_chain_graph(4).unwrap();
        let loci: Vec<&str> = g.attachments.iter().map(|a| a.locus.as_str()).collect();
        assert_eq!(loci, ["Q[4,2]<Q[3,1]", "Q[4,2]<Q[3,2]", "Q[4,3]<Q[3,2]", "Q[4,3]<Q[3,3]"]);
    }

    #[test]
    fn full_flag_columns() {
        let labels = |m, r| fhilb_components(m, r).unwrap().iter().map(|l| l.to_string()).collect::<Vec<_>>();
        assert_eq!(labels(2, JReading::Column), ["C[2;1]"]);
        assert_eq!(labels(4, JReading::Column), ["C[4;1]", "C[4,2;2,1]", "C[4;3]", "C[3;1]", "C[3;2]"]);
        assert_eq!(labels(5, JReading::Column).len(), 7);
        // The literal second-family bound loses the mirror of C[3;1] at m=4.
        assert_eq!(labels(4, JReading::Literal), ["C[4;1]", "C[4,2;2,1]", "C[4;3]", "C[3;1]"]);
        assert!(labels(4, JReading::Range).contains(&"C[4;2]".to_string()));
        let g = fhilb_graph(3, JReading::Column).unwrap();
        assert_eq!(g.labels(), ["C[3;1]", "C[3;2]", "C[2;1]"]);
    }

    #[test]
    fn meeting_rule_fails_at_the_triple_point() {
        use crate::charts::ChartMode;
        use crate::flags::flag_chart_equation;
        for m in 3..=5 {
            for i in 2..m {
                let centers = [IdealType::q(m, i).unwrap(), IdealType::q(m - 1, i).unwrap()];
                let model = flag_chart_equation(&centers, ChartMode::Absolute).unwrap();
                let germs: Vec<ComponentLabel> = model
                    .branches
                    .iter()
                    .map(|b| {
                        let c = b.component.clone().unwrap();
                        ComponentLabel::DPair { m, i: c[0], ip: c[1] }
                    })
                    .collect();
                assert_eq!(germs.len(), 3);
                let violations: Vec<(String, String)> = (0..3)
                    .flat_map(|a| (a + 1..3).map(move |b| (a, b)))
                    .filter(|&(a, b)| !germ_rule(&germs[a], &germs[b]))
                    .map(|(a, b)| (germs[a].to_string(), germs[b].to_string()))
                    .collect();
                let mut pair = [violations[0].0.clone(), violations[0].1.clone()];
                pair.sort();
                assert_eq!(violations.len(), 1, "m={m} i={i}");
                assert_eq!(pair, [format!("D[{m},{};{},{}]", m - 1, i - 1, i - 1), format!("D[{m},{};{i},{i}]", m - 1)]);
            }
        }
    }

    #[test]
    fn triangle_rows() {
        assert_eq!(triangle_ascii(4), "  -\n -·-\n-·-·-\n");
    }

    #[test]
    fn predicted_neighbours() {
        let f = Field::prime(3).unwrap();
        assert_eq!(predicted_super_ideals(&IdealType::q(3, 2).unwrap(), f).unwrap().len(), 4);
        assert_eq!(predicted_super_ideals(&IdealType::q(3, 1).unwrap(), f).unwrap(), [IdealType::q(2, 1).unwrap()]);
        assert_eq!(predicted_super_ideals(&IdealType::c(3, 2, f.one()).unwrap(), f).unwrap(), [IdealType::q(2, 2).unwrap()]);
    }

    fn stars_and_bars(m: usize, c: usize) -> u128 {
        // Multisets of size m from c kinds, enumerated as weakly increasing words.
        fn go(left: usize, from: usize, c: usize) -> u128 {
            if left == 0 {
                return 1;
            }
            (from..c).map(|k| go(left - 1, k, c)).sum()
        }
        go(m, 0, c)
    }

    #[test]
    fn nodal_curve_counts() {
        assert_eq!(global_counts(3, 1, 2, &[3]).unwrap().components, 4);
        for m in 1..=8 {
            for c in 1..=8 {
                assert_eq!(global_counts(m, 0, c, &[]).unwrap().components, stars_and_bars(m, c), "m={m} c={c}");
            }
        }
        let g = global_counts(5, 3, 2, &[3, 1, 0]).unwrap();
        assert_eq!(g.cycle_fibre, [Factor::Chain { length: 2 }, Factor::Point, Factor::Point]);
        assert_eq!(g.local_model[0], Factor::NormalCrossing { dim: 3 });
        assert!(global_counts(2, 1, 1, &[3]).is_err());
        assert!(global_counts(2, 2, 1, &[1]).is_err());
        assert!(global_counts(2, 0, 0, &[]).is_err());
    }
}
