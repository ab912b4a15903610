//! RDF terms and graphs, canonical N-Triples, Turtle and SPARQL Update text.

pub mod endpoint;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{is_absolute_iri, PrefixMap, RDF_LANG_STRING, RDF_TYPE, XSD_STRING};

pub use endpoint::{push_update, Auth, EndpointConfig};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Literal {
        lexical: String,
        datatype: String,
        language: Option<String>,
    },
}

impl Term {
    /// Checked IRI term.
    pub fn iri(s: impl Into<String>) -> Result<Self> {
        let s = s.into();
        if is_absolute_iri(&s) {
            Ok(Term::Iri(s))
        } else {
            Err(Error::InvalidIri(s))
        }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Self::typed(lexical, XSD_STRING)
    }

    pub fn typed(lexical: impl Into<String>, datatype: &str) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: datatype.to_string(),
            language: None,
        }
    }

    /// Language-tagged literal; tags compare case-insensitively, so they are
    /// kept lowercased.
    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: RDF_LANG_STRING.to_string(),
            language: Some(tag.into().to_ascii_lowercase()),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            Term::Literal { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Term) -> Self {
        Self {
            subject: subject.into(),
            predicate: predicate.into(),
            object,
        }
    }
}

/// Duplicate-free set of triples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        self.triples.insert(t)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn subjects(&self) -> BTreeSet<&str> {
        self.triples.iter().map(|t| t.subject.as_str()).collect()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Self {
            triples: iter.into_iter().collect(),
        }
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter)
    }
}

fn escape_into(out: &mut String, s: &str, in_iri: bool) {
    for c in s.chars() {
        match c {
            '"' if !in_iri => out.push_str("\\\""),
            '\\' if !in_iri => out.push_str("\\\\"),
            '\n' if !in_iri => out.push_str("\\n"),
            '\r' if !in_iri => out.push_str("\\r"),
            '\t' if !in_iri => out.push_str("\\t"),
            c if c.is_ascii() && !c.is_ascii_control() => out.push(c),
            c if (c as u32) <= 0xFFFF => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => {
                let _ = write!(out, "\\U{:08X}", c as u32);
            }
        }
    }
}

fn nt_iri(out: &mut String, iri: &str) {
    out.push('<');
    escape_into(out, iri, true);
    out.push('>');
}

fn nt_term(out: &mut String, t: &Term) {
    match t {
        Term::Iri(s) => nt_iri(out, s),
        Term::Literal { lexical, datatype, language } => {
            out.push('"');
            escape_into(out, lexical, false);
            out.push('"');
            match language {
                Some(l) => {
                    out.push('@');
                    out.push_str(l);
                }
                None => {
                    out.push_str("^^");
                    nt_iri(out, datatype);
                }
            }
        }
    }
}

/// One N-Triples line without the trailing newline.
pub fn ntriples_line(t: &Triple) -> String {
    let mut s = String::new();
    nt_iri(&mut s, &t.subject);
    s.push(' ');
    nt_iri(&mut s, &t.predicate);
    s.push(' ');
    nt_term(&mut s, &t.object);
    s.push_str(" .");
    s
}

fn sorted_lines(g: &Graph) -> Vec<String> {
    let mut lines: Vec<String> = g.iter().map(ntriples_line).collect();
    lines.sort_unstable();
    lines
}

/// Canonical N-Triples: escaped ASCII, lines sorted bytewise.
pub fn serialize_ntriples(g: &Graph) -> String {
    sorted_lines(g).into_iter().map(|l| l + "\n").collect()
}

fn is_pn_local(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !s.ends_with('.')
}

struct TurtleWriter<'a> {
    prefixes: &'a PrefixMap,
    used: BTreeSet<String>,
}

impl TurtleWriter<'_> {
    fn iri(&mut self, iri: &str) -> String {
        if let Some((p, local)) = self.prefixes.compact(iri) {
            if is_pn_local(local) {
                self.used.insert(p.to_string());
                return format!("{p}:{local}");
            }
        }
        let mut s = String::new();
        nt_iri(&mut s, iri);
        s
    }

    fn term(&mut self, t: &Term) -> String {
        match t {
            Term::Iri(s) => self.iri(s),
            Term::Literal { lexical, datatype, language } => {
                let mut s = String::from("\"");
                escape_into(&mut s, lexical, false);
                s.push('"');
                match language {
                    Some(l) => {
                        s.push('@');
                        s.push_str(l);
                    }
                    None if datatype == XSD_STRING => {}
                    None => {
                        s.push_str("^^");
                        s.push_str(&self.iri(datatype));
                    }
                }
                s
            }
        }
    }
}

/// Turtle grouped by subject with `;` and `,` abbreviations. Only prefixes
/// that occur in the body are declared.
pub fn serialize_turtle(g: &Graph, prefixes: &PrefixMap) -> String {
    let mut by_subject: BTreeMap<&str, BTreeMap<&str, Vec<&Term>>> = BTreeMap::new();
    for t in g.iter() {
        by_subject.entry(&t.subject).or_default().entry(&t.predicate).or_default().push(&t.object);
    }
    let mut w = TurtleWriter {
        prefixes,
        used: BTreeSet::new(),
    };
    let mut blocks = Vec::new();
    for (s, preds) in by_subject {
        let mut block = w.iri(s);
        let n = preds.len();
        for (i, (p, objs)) in preds.into_iter().enumerate() {
            let pred = if p == RDF_TYPE { "a".to_string() } else { w.iri(p) };
            let mut objs: Vec<(String, String)> = objs
                .into_iter()
                .map(|o| {
                    let mut key = String::new();
                    nt_term(&mut key, o);
                    (key, w.term(o))
                })
                .collect();
            objs.sort();
            let objs: Vec<String> = objs.into_iter().map(|(_, t)| t).collect();
            let sep = if i == 0 { " " } else { "    " };
            let _ = write!(block, "{sep}{pred} {}{}", objs.join(", "), if i + 1 == n { " .\n" } else { " ;\n" });
        }
        blocks.push(block);
    }
    if blocks.is_empty() {
        return String::new();
    }
    let mut out = String::new();
    for p in &w.used {
        let _ = writeln!(out, "@prefix {p}: <{}> .", prefixes.get(p).unwrap());
    }
    if !w.used.is_empty() {
        out.push('\n');
    }
    out.push_str(&blocks.join("\n"));
    out
}

pub fn sparql_insert(g: &Graph) -> String {
    let mut s = String::from("INSERT DATA {\n");
    for l in sorted_lines(g) {
        s.push_str(&l);
        s.push('\n');
    }
    s.push('}');
    s
}

pub fn sparql_delete_subjects(subjects: &[String]) -> String {
    subjects
        .iter()
        .map(|s| {
            let mut q = String::from("DELETE WHERE { ");
            nt_iri(&mut q, s);
            q.push_str(" ?p ?o . }");
            q
        })
        .collect::<Vec<_>>()
        .join(" ;\n")
}

/// Deletes everything about the entry and its previously minted nodes, then
/// inserts the new graph. An empty graph yields the delete part only.
pub fn sync_script(entry_iri: &str, prev_minted: &[String], new_graph: &Graph) -> String {
    let mut subjects = vec![entry_iri.to_string()];
    for m in prev_minted {
        if !subjects.contains(m) {
            subjects.push(m.clone());
        }
    }
    let delete = sparql_delete_subjects(&subjects);
    if new_graph.is_empty() {
        delete
    } else {
        format!("{delete} ;\n{}", sparql_insert(new_graph))
    }
}
