//! One test per acceptance criterion. Each prints a single line
//! `criterion N PASS|FAIL title: detail [tolerance]` to stderr, uncaptured,
//! then asserts.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use nodehilb::combin::{fhilb_components, global_counts, punctual_chain, Factor, JReading};
use nodehilb::flags::{punctual_display, punctual_flag_equations};
use nodehilb::oracle::OracleConfig;
use nodehilb::suites::{
    chart_consistency, component_counts, flag_family_chart, flag_family_split, flat_limits, flatness_exhaustive,
    flatness_random, full_flags, incidence, node_chart, oracle_classification, punctual_flag_display,
    punctual_projection, quadric_rank, relative_jacobian, relative_pair_chart, run_all, triple_point,
    universal_samples, Assertion, RunConfig,
};
use nodehilb::Field;

const SEED: u64 = 20_240_601;

fn f(q: u64) -> Field {
    Field::prime(q).unwrap()
}

/// Prints the criterion line and fails the test on any non-passing item.
fn verdict(n: usize, title: &str, tolerance: &str, items: &[Assertion], extra: &[(bool, String)]) {
    let failing: Vec<String> = items
        .iter()
        .filter(|a| !a.passed())
        .map(|a| format!("{} ({})", a.line(), a.detail))
        .chain(extra.iter().filter(|(ok, _)| !ok).map(|(_, s)| s.clone()))
        .collect();
    let ok = failing.is_empty();
    let checked = items.len() + extra.len();
    let detail = if ok {
        format!("{checked} checks")
    } else {
        let mut names: Vec<&str> =
            items.iter().filter(|a| !a.passed()).map(|a| a.name.as_str()).chain(extra.iter().filter(|e| !e.0).map(|e| e.1.as_str())).collect();
        names.truncate(6);
        format!("{} of {checked} checks failing: {}", failing.len(), names.join("; "))
    };
    let line = format!("criterion {n} {} {title}: {detail} [{tolerance}]\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {n} failed:\n{}", failing.join("\n"));
}

#[test]
fn criterion_01_classification_completeness() {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    let mut items = Vec::new();
    for q in [2, 3] {
        for m in 1..=5 {
            items.push(oracle_classification(q, m, &cfg, m + 1));
        }
    }
    let elapsed = start.elapsed();
    let timing = (elapsed < Duration::from_secs(60), format!("runtime {:.1}s", elapsed.as_secs_f64()));
    verdict(1, "classification completeness", "exact counts; runtime < 60 s", &items, &[timing]);
}

#[test]
fn criterion_02_flat_limits() {
    let items: Vec<_> = (2..=6).map(flat_limits).collect();
    verdict(2, "flat limits", "exact subspace equality", &items, &[]);
}

#[test]
fn criterion_03_chart_flatness_equivalence() {
    let mut items: Vec<_> = (1..=3).map(|m| flatness_exhaustive(m, f(2), 2)).collect();
    for m in [4, 5] {
        items.push(flatness_random(m, f(3), 4, 500, SEED));
    }
    // both outcomes must occur, or the equivalence is vacuous
    let mixed: Vec<(bool, String)> = items
        .iter()
        .map(|a| {
            let (cases, flat) = (a.detail["cases"].as_u64().unwrap_or(0), a.detail["flat"].as_u64().unwrap_or(0));
            (flat > 0 && flat < cases, format!("{}: {flat} flat of {cases}", a.name))
        })
        .collect();
    verdict(3, "chart/flatness equivalence", "zero discrepancies", &items, &mixed);
}

#[test]
fn criterion_04_node_and_smoothness() {
    let mut items = Vec::new();
    for m in 1..=6 {
        items.push(node_chart(m));
        items.push(relative_jacobian(m));
    }
    for m in 2..=6 {
        items.push(relative_pair_chart(m));
    }
    verdict(4, "node and smoothness structure", "exact ranks and dimensions", &items, &[]);
}

#[test]
fn criterion_05_incidence() {
    let cfg = OracleConfig::default();
    let mut items = Vec::new();
    for q in [2, 3] {
        for m in 2..=5 {
            items.push(incidence(q, m, &cfg));
        }
    }
    verdict(5, "incidence", "exact neighbour sets", &items, &[]);
}

#[test]
fn criterion_06_triple_point_and_quadric() {
    let mut items = Vec::new();
    for m in 3..=8 {
        items.push(triple_point(m));
        items.push(quadric_rank(m));
    }
    let ranks: Vec<(bool, String)> = items
        .iter()
        .filter(|a| a.name.starts_with("quadric-rank"))
        .flat_map(|a| {
            let charts = a.detail["charts"].as_array().cloned().unwrap_or_default();
            let ok = !charts.is_empty() && charts.iter().all(|c| c["hessian_rank"] == 4);
            [(ok, format!("{}: hessian rank 4 at every chart", a.name))]
        })
        .collect();
    verdict(6, "triple point and quadric", "exact rank over Q", &items, &ranks);
}

/// Evaluates `{m-i-1}` style subscripts of the template.
fn instantiate(template: &str, m: i64, i: i64) -> String {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').unwrap() + open;
        let expr = &rest[open + 1..close];
        let mut value = 0;
        let mut sign = 1;
        let mut token = String::new();
        for c in expr.chars().chain(std::iter::once('+')) {
            if c == '+' || c == '-' {
                if !token.is_empty() {
                    value += sign
                        * match token.as_str() {
                            "m" => m,
                            "i" => i,
                            t => t.parse::<i64>().unwrap(),
                        };
                    token.clear();
                }
                sign = if c == '+' { 1 } else { -1 };
            } else {
                token.push(c);
            }
        }
        out.push_str(&value.to_string());
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    out
}

#[test]
fn criterion_07_punctual_flags() {
    let golden = include_str!("golden/punctual_flags.txt");
    let mut lines = golden.lines();
    let template = lines.next().unwrap().strip_prefix("template ").unwrap();
    let mut extra = Vec::new();
    let mut seen = BTreeSet::new();
    for line in lines {
        let mut parts = line.splitn(3, ' ');
        let m: usize = parts.next().unwrap().parse().unwrap();
        let i: usize = parts.next().unwrap().parse().unwrap();
        let want = parts.next().unwrap();
        let derived = punctual_display(&punctual_flag_equations(m, i).unwrap());
        let ok = derived == want && instantiate(template, m as i64, i as i64) == want;
        extra.push((ok, format!("golden (Q[{m},{i}], Q[{},{i}]): derived {derived:?}", m - 1)));
        seen.insert((m, i));
    }
    let full: BTreeSet<(usize, usize)> = (3..=7).flat_map(|m| (2..m).map(move |i| (m, i))).collect();
    extra.push((seen == full, format!("golden covers {} of {} centers", seen.len(), full.len())));
    let cfg = OracleConfig::default();
    let mut items: Vec<_> = (3..=7).map(punctual_flag_display).collect();
    for q in [2, 3] {
        for m in 3..=4 {
            items.push(punctual_projection(q, m, &cfg));
        }
    }
    verdict(7, "punctual flag structure", "verbatim strings; exact point sets", &items, &extra);
}

#[test]
fn criterion_08_universal_family() {
    let mut items = Vec::new();
    let mut points = 0;
    for m in 1..=5 {
        let batch = universal_samples(m, f(5), 250, SEED);
        points += batch[0].detail["points"].as_u64().unwrap_or(0);
        items.extend(batch);
    }
    for m in 2..=5 {
        items.push(flag_family_chart(m, f(5), 120, SEED));
    }
    for m in 2..=4 {
        items.push(flag_family_split(m, f(5)));
    }
    let quota = (points >= 1000, format!("{points} sampled points"));
    verdict(8, "universal family", "exact equality over F_5", &items, &[quota]);
}

#[test]
fn criterion_09_chart_universal_consistency() {
    let mut items = Vec::new();
    for q in [2, 3] {
        for m in 1..=4 {
            items.push(chart_consistency(m, f(q), 200, SEED));
        }
    }
    verdict(9, "chart/universal consistency", "exact subspace equality", &items, &[]);
}

#[test]
fn criterion_10_component_combinatorics() {
    let mut items: Vec<_> = (1..=12).map(component_counts).collect();
    let cfg = RunConfig { field: f(2), ..RunConfig::default() };
    for m in 2..=4 {
        items.push(full_flags(&cfg, 2, m));
    }
    let counts = (2..=4)
        .map(|m| {
            let got = fhilb_components(m, JReading::Column).unwrap().len();
            let census = items.iter().find(|a| a.name == format!("full-flags q=2 m={m}")).unwrap();
            (census.passed(), format!("fhilb m={m}: {got} components"))
        })
        .collect::<Vec<_>>();
    verdict(10, "component combinatorics", "exact counts", &items, &counts);
}

/// Multisets of size `m` from `c` colours, built one by one as
/// nondecreasing colour sequences.
fn multisets(m: usize, c: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn go(m: usize, c: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for k in from..c {
            cur.push(k);
            go(m, c, k, cur, out);
            cur.pop();
        }
    }
    go(m, c, 0, &mut cur, &mut out);
    out
}

#[test]
fn criterion_11_nodal_curves() {
    let mut extra = Vec::new();
    for m in 1..=8 {
        for c in 1..=8 {
            let want = multisets(m, c).len() as u128;
            let got = global_counts(m, 0, c, &[]).unwrap().components;
            extra.push((got == want, format!("m={m} c={c}: {got} vs {want}")));
        }
    }
    for mults in [vec![3], vec![2, 2], vec![1, 4], vec![0, 2, 3], vec![5, 1, 2]] {
        let total: usize = mults.iter().sum();
        let g = global_counts(total, mults.len(), 2, &mults).unwrap();
        for (fac, &k) in g.cycle_fibre.iter().zip(&mults) {
            let ok = match fac {
                Factor::Point => k <= 1,
                Factor::Chain { length } => k >= 2 && *length == k - 1 && punctual_chain(k).unwrap().curve_count() == k - 1,
                Factor::NormalCrossing { .. } => false,
            };
            extra.push((ok, format!("cycle fibre factor at multiplicity {k}")));
        }
    }
    verdict(11, "nodal curves", "exact counts", &[], &extra);
}

#[test]
fn criterion_12_determinism() {
    let cfg = RunConfig { m: 3, samples: 20, seed: SEED, ..RunConfig::default() };
    let a = run_all(&cfg).to_json_string();
    let b = run_all(&cfg).to_json_string();
    let extra = [(a == b && !a.is_empty(), format!("reports of {} bytes identical", a.len()))];
    verdict(12, "determinism", "byte-identical", &[], &extra);
}
