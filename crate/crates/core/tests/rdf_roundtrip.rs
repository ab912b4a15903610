mod common;

use common::{rio_ntriples, rio_turtle, rng, random_graph};
use proptest::prelude::*;
use udc_core::model::builtin_prefixes;
use udc_core::rdf::{serialize_ntriples, serialize_turtle};
use udc_core::{Graph, Term, Triple};

fn diff(a: &Graph, b: &Graph) -> Vec<String> {
    let only = |x: &Graph, y: &Graph, tag: &str| x.iter().filter(|t| !y.contains(t)).map(|t| format!("{tag} {t:?}")).collect::<Vec<_>>();
    let mut out = only(a, b, "parsed-only");
    out.extend(only(b, a, "written-only"));
    out
}

#[test]
fn five_hundred_graphs_reparse_equal() {
    let prefixes = builtin_prefixes();
    let mut r = rng(0x5eed_0005);
    for i in 0..500 {
        let g = random_graph(&mut r, 50);
        let nt = serialize_ntriples(&g);
        assert!(nt.is_ascii(), "graph {i}: N-Triples output must be ASCII");
        let back = rio_ntriples(&nt).unwrap();
        assert!(back == g, "graph {i}: {:?}", diff(&back, &g));
        let ttl = serialize_turtle(&g, &prefixes);
        let back = rio_turtle(&ttl).unwrap();
        assert!(back == g, "graph {i}: {:?}\n{ttl}", diff(&back, &g));
    }
}

#[test]
fn empty_graph() {
    let g = Graph::new();
    assert_eq!(serialize_ntriples(&g), "");
    assert_eq!(rio_turtle(&serialize_turtle(&g, &builtin_prefixes())).unwrap(), g);
}

#[test]
fn ntriples_lines_are_sorted_and_stable() {
    let mut r = rng(7);
    let g = random_graph(&mut r, 50);
    let nt = serialize_ntriples(&g);
    let lines: Vec<&str> = nt.lines().collect();
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
    let mut v: Vec<Triple> = g.iter().cloned().collect();
    v.reverse();
    let rebuilt: Graph = v.into_iter().collect();
    assert_eq!(serialize_ntriples(&rebuilt), nt);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn arbitrary_literals_survive(lex in "\\PC{0,24}", ctl in proptest::collection::vec(0u32..0x20, 0..3)) {
        let mut s = lex;
        s.extend(ctl.into_iter().filter_map(char::from_u32));
        let g: Graph = [Triple::new("http://example.org/s", "http://example.org/p", Term::string(s))].into_iter().collect();
        prop_assert_eq!(rio_ntriples(&serialize_ntriples(&g)).unwrap(), g.clone());
        prop_assert_eq!(rio_turtle(&serialize_turtle(&g, &builtin_prefixes())).unwrap(), g);
    }
}
