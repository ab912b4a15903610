//! Generators and independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rio_api::model as rio;
use rio_api::parser::TriplesParser;
use rio_turtle::{NTriplesParser, TurtleError, TurtleParser};

use udc_core::mapping::{default_mapping, map_entry, UuidMode};
use udc_core::model::{ValueRange, RDF_TYPE, XSD_STRING};
use udc_core::rdf::{sparql_delete_subjects, sync_script};
use udc_core::record::{Agent, Modality, ResourceRef};
use udc_core::store::{LedgerRow, SaveFault, ENTRIES_DIR};
use udc_core::search::{bm25_term, doc_tokens, facet_values, FacetCount, FacetField, Index, Query};
use udc_core::synth::sample_value;
use udc_core::{builtin_model, parse_entry, Catalogue, CatalogueEntry, Error, Graph, MaturityModel, Term, Triple, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn workspace_file(rel: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------- graphs

const IRI_TAILS: [&str; 10] = ["a", "b/c", "d-frag", "caf\u{e9}", "\u{65e5}\u{672c}", "x%20y", "q?k=v&w=1", "t_1", "\u{1F600}", "end."];
const NAMESPACES: [&str; 5] = [
    "http://purl.org/dc/terms/",
    "http://www.w3.org/ns/dcat#",
    "http://example.org/",
    "urn:example:",
    "https://data.example.ca/ns/",
];
const LEXICALS: [&str; 12] = [
    "",
    "plain",
    "with \"quotes\"",
    "back\\slash",
    "line\nbreak",
    "tab\there",
    "cr\rhere",
    "caf\u{e9}",
    "\u{1F600} emoji",
    "trailing space ",
    "'single'",
    "\u{7}bell",
];

fn random_iri(r: &mut ChaCha8Rng) -> String {
    let ns = NAMESPACES.choose(r).unwrap();
    let frag = if !ns.ends_with('#') && r.gen_bool(0.2) { "#f" } else { "" };
    format!("{ns}{}{}{frag}", IRI_TAILS.choose(r).unwrap(), r.gen_range(0..4))
}

fn random_object(r: &mut ChaCha8Rng) -> Term {
    let lex = LEXICALS.choose(r).unwrap().to_string();
    match r.gen_range(0..6) {
        0 | 1 => Term::Iri(random_iri(r)),
        2 => Term::string(lex),
        3 => Term::lang(lex, *["en", "fr-CA", "oj"].choose(r).unwrap()),
        4 => Term::typed(r.gen_range(-50i32..5000).to_string(), "http://www.w3.org/2001/XMLSchema#integer"),
        _ => Term::typed(lex, "http://example.org/dt/custom"),
    }
}

/// A graph of at most `max` triples over awkward IRIs and literals.
pub fn random_graph(r: &mut ChaCha8Rng, max: usize) -> Graph {
    let n = r.gen_range(0..=max);
    let subjects: Vec<String> = (0..r.gen_range(1..6)).map(|_| random_iri(r)).collect();
    let mut g = Graph::new();
    for _ in 0..n {
        let s = subjects.choose(r).unwrap().clone();
        let p = if r.gen_bool(0.15) { RDF_TYPE.to_string() } else { random_iri(r) };
        g.insert(Triple::new(s, p, random_object(r)));
    }
    g
}

fn from_rio(t: &rio::Triple<'_>) -> Result<Triple, String> {
    let s = match t.subject {
        rio::Subject::NamedNode(n) => n.iri.to_string(),
        other => return Err(format!("unexpected subject {other}")),
    };
    let o = match t.object {
        rio::Term::NamedNode(n) => Term::Iri(n.iri.to_string()),
        rio::Term::Literal(rio::Literal::Simple { value }) => Term::typed(value, XSD_STRING),
        rio::Term::Literal(rio::Literal::LanguageTaggedString { value, language }) => Term::lang(value, language),
        rio::Term::Literal(rio::Literal::Typed { value, datatype }) => Term::typed(value, datatype.iri),
        other => return Err(format!("unexpected object {other}")),
    };
    Ok(Triple::new(s, t.predicate.iri, o))
}

fn collect<P: TriplesParser<Error = TurtleError>>(mut p: P) -> Result<Graph, String> {
    let mut g = Graph::new();
    let mut bad = None;
    p.parse_all(&mut |t| {
        match from_rio(&t) {
            Ok(t) => {
                g.insert(t);
            }
            Err(e) => bad = Some(e),
        }
        Ok(()) as Result<(), TurtleError>
    })
    .map_err(|e| e.to_string())?;
    bad.map_or(Ok(g), Err)
}

/// Parses N-Triples with rio.
pub fn rio_ntriples(text: &str) -> Result<Graph, String> {
    collect(NTriplesParser::new(text.as_bytes()))
}

/// Parses Turtle with rio.
pub fn rio_turtle(text: &str) -> Result<Graph, String> {
    collect(TurtleParser::new(text.as_bytes(), None))
}

// ---------------------------------------------------------------- SPARQL

/// Triple store that understands only `INSERT DATA { n-triples }` and
/// `DELETE WHERE { <s> ?p ?o . }`, with statements joined by ` ;` + newline.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateOracle {
    pub triples: BTreeSet<Triple>,
}

impl UpdateOracle {
    pub fn apply(&mut self, script: &str) {
        if script.trim().is_empty() {
            return;
        }
        for stmt in script.trim_end().split(" ;\n") {
            if let Some(body) = stmt.strip_prefix("INSERT DATA {\n") {
                let body = body.strip_suffix('}').unwrap_or_else(|| panic!("unterminated insert: {stmt:?}"));
                let g = rio_ntriples(body).unwrap_or_else(|e| panic!("insert body: {e}\n{body}"));
                self.triples.extend(g.iter().cloned());
            } else if let Some(rest) = stmt.strip_prefix("DELETE WHERE { ") {
                let subj = rest.strip_suffix(" ?p ?o . }").unwrap_or_else(|| panic!("bad delete: {stmt:?}"));
                let probe = rio_ntriples(&format!("{subj} <urn:p> <urn:o> .\n")).unwrap();
                let s = probe.iter().next().unwrap().subject.clone();
                self.triples.retain(|t| t.subject != s);
            } else {
                panic!("unsupported statement: {stmt:?}");
            }
        }
    }

    pub fn about(&self, subjects: &BTreeSet<String>) -> BTreeSet<Triple> {
        self.triples.iter().filter(|t| subjects.contains(&t.subject)).cloned().collect()
    }
}

// ---------------------------------------------------------------- entries

const WORDS: [&str; 16] = [
    "bike", "lane", "transit", "housing", "permit", "tree", "canopy", "zoning", "bylaw", "ridership", "toronto", "ward", "census", "water", "parcel", "noise",
];
const THEMES: [&str; 4] = ["Transportation", "Housing", "Environment", "Health"];
const FORMATS: [&str; 5] = ["CSV", "PDF", "JSON", "SHP", "XLSX"];
const ORGS: [&str; 4] = ["City of Toronto", "Region of Peel", "Metrolinx", "TTC"];

fn phrase(r: &mut ChaCha8Rng, max: usize) -> String {
    let n = r.gen_range(0..=max);
    let mut words: Vec<&str> = (0..n).map(|_| *WORDS.choose(r).unwrap()).collect();
    if r.gen_bool(0.1) {
        words.push("Caf\u{e9}-\u{e9}t\u{e9}!");
    }
    words.join(" ")
}

/// Entry over a small vocabulary so that queries and facets collide often.
pub fn search_entry(r: &mut ChaCha8Rng, id: &str) -> CatalogueEntry {
    let mut e = CatalogueEntry::new(id).unwrap();
    if r.gen_bool(0.9) {
        e.push("title", Value::text(phrase(r, 4)));
    }
    if r.gen_bool(0.7) {
        e.push("description", Value::text(phrase(r, 12)));
    }
    for _ in 0..r.gen_range(0..4) {
        e.push("keyword", Value::text(*WORDS.choose(r).unwrap()));
    }
    for _ in 0..r.gen_range(0..3) {
        e.push("theme", Value::text(*THEMES.choose(r).unwrap()));
    }
    if r.gen_bool(0.3) {
        e.push("format", Value::text(*FORMATS.choose(r).unwrap()));
    }
    for i in 0..r.gen_range(0..3) {
        e.resources.push(ResourceRef {
            name: format!("r{i}"),
            url: format!("http://example.org/{id}/{i}"),
            format: r.gen_bool(0.8).then(|| FORMATS.choose(r).unwrap().to_string()),
            description: None,
        });
    }
    match r.gen_range(0..3) {
        0 => e.organization = Some(ORGS.choose(r).unwrap().to_string()),
        1 => e.push(
            "publisher",
            Value::Agent(Agent {
                name: ORGS.choose(r).unwrap().to_string(),
                email: None,
                indigenous: false,
            }),
        ),
        _ => {}
    }
    if r.gen_bool(0.6) {
        e.push("accessCategory", Value::Token(["open", "closed", "service"].choose(r).unwrap().to_string()));
    }
    e
}

pub fn search_corpus(r: &mut ChaCha8Rng, max: usize) -> Vec<CatalogueEntry> {
    let n = r.gen_range(0..=max);
    (0..n).map(|i| search_entry(r, &format!("d{i:03}"))).collect()
}

fn facet_pool(field: FacetField) -> Vec<String> {
    let v: &[&str] = match field {
        FacetField::Theme => &THEMES,
        FacetField::Tags => &WORDS,
        FacetField::Format => &FORMATS,
        FacetField::Organization => &ORGS,
        FacetField::AccessCategory => &["open", "closed", "service"],
    };
    let mut out: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    out.push("absent-value".into());
    out
}

pub fn random_query(r: &mut ChaCha8Rng) -> Query {
    let mut q = Query::all();
    q.text = match r.gen_range(0..5) {
        0 => None,
        1 => Some("  !! ".into()),
        _ => Some(phrase(r, 3)),
    };
    for _ in 0..r.gen_range(0..3) {
        let f = *FacetField::ALL.choose(r).unwrap();
        let pool = facet_pool(f);
        let vals: BTreeSet<String> = (0..r.gen_range(1..3)).map(|_| pool.choose(r).unwrap().clone()).collect();
        q.filters.push((f, vals));
    }
    q
}

/// Linear-scan search: every entry is checked against every filter, and
/// BM25 is recomputed from raw token counts.
pub fn oracle_search(entries: &[CatalogueEntry], q: &Query) -> Vec<(String, f64)> {
    let docs: Vec<(&CatalogueEntry, Vec<String>)> = entries.iter().map(|e| (e, doc_tokens(e))).collect();
    let n = docs.len();
    let avgdl = docs.iter().map(|d| d.1.len()).sum::<usize>() as f64 / n.max(1) as f64;
    let passes = |e: &CatalogueEntry| {
        q.filters
            .iter()
            .all(|(f, accepted)| facet_values(e, *f).iter().any(|v| accepted.contains(v)))
    };
    let qt: Vec<String> = {
        let s: BTreeSet<String> = q.text.as_deref().map(udc_core::search::tokenize).unwrap_or_default().into_iter().collect();
        s.into_iter().collect()
    };
    let mut out = Vec::new();
    for (e, toks) in &docs {
        if !passes(e) {
            continue;
        }
        if qt.is_empty() {
            out.push((e.id.clone(), 0.0));
            continue;
        }
        let mut score = 0.0;
        let mut hit = false;
        for t in &qt {
            let tf = toks.iter().filter(|x| *x == t).count() as u32;
            if tf == 0 {
                continue;
            }
            let df = docs.iter().filter(|d| d.1.contains(t)).count();
            score += bm25_term(n, df, tf, toks.len(), avgdl);
            hit = true;
        }
        if hit {
            out.push((e.id.clone(), score));
        }
    }
    if !qt.is_empty() {
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    } else {
        out.sort_by(|a, b| a.0.cmp(&b.0));
    }
    out
}

pub fn oracle_facets(entries: &[CatalogueEntry], q: &Query, fields: &[FacetField]) -> BTreeMap<FacetField, Vec<FacetCount>> {
    let ids: BTreeSet<String> = oracle_search(entries, q).into_iter().map(|h| h.0).collect();
    fields
        .iter()
        .map(|&f| {
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for e in entries.iter().filter(|e| ids.contains(&e.id)) {
                for v in facet_values(e, f) {
                    *counts.entry(v).or_default() += 1;
                }
            }
            let mut list: Vec<FacetCount> = counts.into_iter().map(|(value, count)| FacetCount { value, count }).collect();
            list.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
            (f, list)
        })
        .collect()
}

// ---------------------------------------------------------------- catalogue

const TEXTS: [&str; 6] = ["Bike lanes", "caf\u{e9} \u{1F600}", "quote \" and \\ slash", "multi\nline", "\u{65e5}\u{672c}\u{8a9e}", "x"];

/// An entry whose values all survive a JSON round trip through the model.
pub fn storable_entry(r: &mut ChaCha8Rng, model: &MaturityModel, id: &str) -> CatalogueEntry {
    let mut e = CatalogueEntry::new(id).unwrap();
    e.revision = r.gen_range(0..5);
    e.modality = *[Modality::Unspecified, Modality::Tabular, Modality::Rdf, Modality::Both].choose(r).unwrap();
    if r.gen_bool(0.5) {
        e.organization = Some(ORGS.choose(r).unwrap().to_string());
    }
    for p in model.properties() {
        if !r.gen_bool(0.3) {
            continue;
        }
        for _ in 0..r.gen_range(1..3) {
            let v = match p.range {
                ValueRange::PlainText | ValueRange::LangText if r.gen_bool(0.5) => Value::text(*TEXTS.choose(r).unwrap()),
                _ => sample_value(p, r.gen_range(0..10_000)),
            };
            e.push(&p.key, v);
        }
    }
    for i in 0..r.gen_range(0..3) {
        e.resources.push(ResourceRef {
            name: format!("file {i}"),
            url: format!("https://example.org/{id}/{i}.csv"),
            format: r.gen_bool(0.5).then(|| "CSV".to_string()),
            description: r.gen_bool(0.3).then(|| TEXTS.choose(r).unwrap().to_string()),
        });
    }
    e
}

pub fn model() -> MaturityModel {
    builtin_model()
}

/// Compares index and oracle on `queries` random queries over one random
/// corpus; returns the number of facet-consistency violations.
pub fn check_corpus(seed: u64, queries: usize) -> usize {
    let mut r = rng(seed);
    let corpus = search_corpus(&mut r, 200);
    let index = Index::build(&corpus).unwrap();
    let mut violations = 0;
    for _ in 0..queries {
        let q = random_query(&mut r);
        let got: Vec<(String, f64)> = index.search(&q).into_iter().map(|h| (h.id, h.score)).collect();
        assert_eq!(got, oracle_search(&corpus, &q), "seed {seed} query {q:?}");
        let counts = index.facet_counts(&q, &FacetField::ALL);
        assert_eq!(counts, oracle_facets(&corpus, &q, &FacetField::ALL), "seed {seed} query {q:?}");
        for (f, list) in &counts {
            for fc in list {
                let mut narrowed = q.clone();
                narrowed.filters.push((*f, [fc.value.clone()].into()));
                if index.query(&narrowed).len() != fc.count {
                    violations += 1;
                }
            }
        }
    }
    violations
}

// ---------------------------------------------------------------- sync

pub fn sync(cat: &mut Catalogue, store: &mut UpdateOracle, id: &str) -> String {
    let cfg = default_mapping();
    let m = map_entry(&cfg, cat.get(id).unwrap(), UuidMode::Deterministic).unwrap();
    let script = sync_script(&m.root, cat.previous_minted(id), &m.graph);
    store.apply(&script);
    cat.record_sync(id, &m.root, &m.minted).unwrap();
    script
}

pub fn delete(cat: &mut Catalogue, store: &mut UpdateOracle, id: &str) {
    let row = cat.ledger[id].clone();
    let mut subjects = vec![row.entry_iri];
    subjects.extend(row.last_minted);
    cat.tombstone(id).unwrap();
    store.apply(&sparql_delete_subjects(&subjects));
    cat.record_sync(id, "", &[]).unwrap();
}

pub fn enrich(r: &mut impl Rng, e: &mut CatalogueEntry) {
    if r.gen_bool(0.5) {
        e.push(
            "creator",
            Value::Agent(Agent {
                name: "Open Data Team".into(),
                email: r.gen_bool(0.5).then(|| "od@example.org".into()),
                indigenous: false,
            }),
        );
    }
    if r.gen_bool(0.5) {
        e.push("issued", Value::Date("2021-02-03".into()));
    }
}

pub fn expected(e: &CatalogueEntry) -> BTreeSet<udc_core::Triple> {
    map_entry(&default_mapping(), e, UuidMode::Deterministic).unwrap().graph.iter().cloned().collect()
}

/// One randomized history: sync, resync, revise, delete. Panics on any
/// divergence from the union of current mappings.
pub fn sync_history(seed: u64) {
    let mut r = rng(seed);
    let mut cat = Catalogue::new("/nonexistent");
    let mut store = UpdateOracle::default();
    let ids: Vec<String> = (0..r.gen_range(1..5)).map(|i| format!("e{i}")).collect();
    for id in &ids {
        let mut e = search_entry(&mut r, id);
        enrich(&mut r, &mut e);
        cat.upsert(e);
        sync(&mut cat, &mut store, id);
    }
    let target = ids[0].clone();
    let once = store.clone();
    sync(&mut cat, &mut store, &target);
    assert_eq!(store, once, "seed {seed}: second application changed the store");

    // New revision with a different minted set: stale nodes must go.
    let mut e = search_entry(&mut r, &target);
    enrich(&mut r, &mut e);
    cat.upsert(e.clone());
    sync(&mut cat, &mut store, &target);
    let after_one = store.clone();
    sync(&mut cat, &mut store, &target);
    assert_eq!(store, after_one, "seed {seed}");
    let all: BTreeSet<_> = cat.entries.values().flat_map(expected).collect();
    assert_eq!(store.triples, all, "seed {seed}: store differs from the union of current mappings");

    delete(&mut cat, &mut store, &target);
    let row_subjects: BTreeSet<String> = {
        let m = map_entry(&default_mapping(), &e, UuidMode::Deterministic).unwrap();
        std::iter::once(m.root).chain(m.minted).collect()
    };
    assert!(store.about(&row_subjects).is_empty(), "seed {seed}: deleted entry left triples");
    assert!(!cat.ledger.contains_key(&target));
    let rest: BTreeSet<_> = cat.entries.values().flat_map(expected).collect();
    assert_eq!(store.triples, rest, "seed {seed}");
}

pub fn random_catalogue(seed: u64, root: &std::path::Path) -> Catalogue {
    let m = model();
    let mut r = rng(seed);
    let mut c = Catalogue::new(root);
    for i in 0..r.gen_range(0..8) {
        let id = format!("ds-{}", r.gen_range(0..12) + i * 12);
        let e = storable_entry(&mut r, &m, &id);
        c.entries.insert(e.id.clone(), e);
    }
    let ids: Vec<String> = c.entries.keys().cloned().collect();
    for id in &ids {
        if r.gen_bool(0.5) {
            continue;
        }
        c.ledger.insert(
            id.clone(),
            LedgerRow {
                entry_iri: format!("http://data.urbandatacentre.ca/catalogue/{id}"),
                last_minted: (0..r.gen_range(0..3)).map(|n| format!("http://data.urbandatacentre.ca/creator/{id}-{n}")).collect(),
                last_synced_revision: r.gen_range(0..4),
            },
        );
    }
    c
}

/// Saves one random catalogue over another, crashing after `after` files with
/// `partial` bytes of the next one written. Every entry file left on disk
/// must be a complete old or new version.
pub fn interrupted_save(seed: u64, after: usize, partial: usize) -> Result<(), String> {
    let dir = tempfile::tempdir().unwrap();
    let old = random_catalogue(seed, dir.path());
    old.save().map_err(|e| e.to_string())?;
    let mut new = random_catalogue(seed ^ 0xdead_beef, dir.path());
    for (id, e) in &old.entries {
        if !new.entries.contains_key(id) && seed.is_multiple_of(2) {
            new.entries.insert(id.clone(), e.clone());
        }
    }
    let res = new.save_with_fault(SaveFault { after_files: after, partial_bytes: partial });
    if !matches!(res, Ok(()) | Err(Error::Interrupted)) {
        return Err(format!("unexpected save result {res:?}"));
    }
    let m = model();
    for item in std::fs::read_dir(dir.path().join(ENTRIES_DIR)).unwrap() {
        let path = item.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if name.starts_with('.') {
            continue;
        }
        let id = name.strip_suffix(".json").unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let on_disk = parse_entry(&text, &m).map_err(|e| format!("torn file {name}: {e}"))?;
        if old.entries.get(id) != Some(&on_disk) && new.entries.get(id) != Some(&on_disk) {
            return Err(format!("{name} is neither the old nor the new version"));
        }
    }
    let loaded = Catalogue::load(dir.path(), &m).map_err(|e| e.to_string())?;
    for (id, e) in &loaded.entries {
        if old.entries.get(id) != Some(e) && new.entries.get(id) != Some(e) {
            return Err(format!("loaded {id} is neither version"));
        }
    }
    if res.is_ok() && loaded != new {
        return Err("completed save does not load back".into());
    }
    Ok(())
}
