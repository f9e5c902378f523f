use std::collections::BTreeSet;

use nodehilb::combin::{
    fhilb_components, fhilb_graph, flag_chain_graph, label_pattern, pattern_strings, predicted_super_ideals,
    triple_chain_graph, ChainGraph, JReading,
};
use nodehilb::oracle::{flag_point_census, incidence_graph, partial_flag_census, FlagCensus, OracleConfig};
use nodehilb::Field;

fn patterns(g: &ChainGraph) -> BTreeSet<Vec<String>> {
    g.components.iter().map(|c| c.pattern.clone().unwrap()).collect()
}

fn census_patterns(c: &FlagCensus) -> BTreeSet<Vec<String>> {
    c.components.iter().cloned().collect()
}

fn census_dims(c: &FlagCensus) -> BTreeSet<(Vec<String>, usize)> {
    c.groups.iter().filter(|g| c.components.contains(&g.pattern)).map(|g| (g.pattern.clone(), g.c_levels)).collect()
}

#[test]
fn pair_chain_matches_census() {
    let cfg = OracleConfig::default();
    for q in [2u64, 3] {
        for m in 2..=5 {
            let c = partial_flag_census(q, m, 2, &cfg).unwrap();
            assert_eq!(patterns(&flag_chain_graph(m).unwrap()), census_patterns(&c), "q={q} m={m}");
        }
    }
}

#[test]
fn triple_chain_matches_census() {
    let cfg = OracleConfig::default();
    for m in 3..=5 {
        let g = triple_chain_graph(m).unwrap();
        let c = partial_flag_census(2, m, 3, &cfg).unwrap();
        assert_eq!(patterns(&g), census_patterns(&c), "m={m}");
        let dims: BTreeSet<(Vec<String>, usize)> =
            g.components.iter().map(|k| (k.pattern.clone().unwrap(), k.dim)).collect();
        assert_eq!(dims, census_dims(&c), "m={m}");
    }
}

#[test]
fn full_flags_match_census_up_to_four() {
    let cfg = OracleConfig::default();
    for q in [2u64, 3] {
        for m in 2..=4 {
            let c = flag_point_census(q, m, &cfg).unwrap();
            assert!(c.product_structure);
            let g = fhilb_graph(m, JReading::Column).unwrap();
            assert_eq!(patterns(&g), census_patterns(&c), "q={q} m={m}");
        }
    }
}

#[test]
fn full_flags_at_five_exceed_the_columns() {
    let c = flag_point_census(2, 5, &OracleConfig::default()).unwrap();
    let columns = patterns(&fhilb_graph(5, JReading::Column).unwrap());
    let census = census_patterns(&c);
    assert!(columns.is_subset(&census));
    let extra: Vec<&Vec<String>> = census.difference(&columns).collect();
    assert_eq!(extra.len(), 2);
    for e in extra {
        assert!(e[0].starts_with("C[5,") && e[1].starts_with("Q[4,") && e[2] == "Q[3,2]" && e[3] == "C[2,1]");
    }
}

#[test]
fn total_pattern_grammar_matches_chains() {
    for m in 2..=6 {
        for l in fhilb_components(m, JReading::Column).unwrap() {
            let p = label_pattern(&l, m, m).unwrap();
            assert_eq!(p.len(), m);
            assert_eq!(pattern_strings(&p).last().unwrap(), "Q[1,1]");
        }
    }
}

#[test]
fn incidence_matches_prediction() {
    let cfg = OracleConfig::default();
    for q in [2u64, 3] {
        let field = Field::prime(q).unwrap();
        for m in 2..=4 {
            let g = incidence_graph(q, &[m, m - 1], &cfg).unwrap();
            for n in &g.nodes[0] {
                let t = n.ty.clone().unwrap();
                let got: BTreeSet<_> = g.successors((0, n.index)).iter().map(|s| s.ty.clone().unwrap()).collect();
                let want: BTreeSet<_> = predicted_super_ideals(&t, field).unwrap().into_iter().collect();
                assert_eq!(got, want, "q={q} {t}");
            }
        }
    }
}
