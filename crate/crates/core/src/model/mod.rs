//! The maturity model schema.
//!
//! A [`MaturityModel`] partitions a set of [`PropertySpec`]s into at most six
//! ordered levels. Every property belongs to exactly one [`Category`] and is
//! bound to an RDF property through a CURIE under the model's [`PrefixMap`].

mod builtin;
mod config;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use indexmap::IndexMap;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtin::{builtin_model, builtin_prefixes, CKAN_FIELDS, CUADR_NS};
pub use config::load_model_config;

pub const MAX_LEVELS: usize = 6;

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

fn prefix_name_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[a-z][a-z0-9]*$").unwrap())
}

fn scheme_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^([A-Za-z][A-Za-z0-9+.\-]*):(.*)$").unwrap())
}

/// Characters that may never appear unescaped inside an IRI reference.
fn forbidden_iri_char(c: char) -> bool {
    c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

fn percent_escapes_ok(s: &str) -> bool {
    let b = s.as_bytes();
    b.iter().enumerate().filter(|(_, c)| **c == b'%').all(|(i, _)| b.len() > i + 2 && b[i + 1].is_ascii_hexdigit() && b[i + 2].is_ascii_hexdigit())
}

/// True for absolute IRIs: a scheme followed by a non-empty remainder free of
/// characters that IRI references disallow.
pub fn is_absolute_iri(s: &str) -> bool {
    match scheme_re().captures(s) {
        Some(caps) => {
            let rest = caps.get(2).unwrap().as_str();
            !rest.is_empty() && !rest.chars().any(forbidden_iri_char) && rest.matches('#').count() <= 1 && percent_escapes_ok(rest)
        }
        None => false,
    }
}

/// Absolute IRIs as opposed to CURIEs: hierarchical (`scheme://`) or one of
/// the opaque schemes catalogue data actually carries.
fn looks_like_iri(token: &str) -> bool {
    let Some(caps) = scheme_re().captures(token) else {
        return false;
    };
    let scheme = caps.get(1).unwrap().as_str().to_ascii_lowercase();
    let rest = caps.get(2).unwrap().as_str();
    rest.starts_with("//") || matches!(scheme.as_str(), "urn" | "mailto" | "tag" | "doi")
}

/// Ordered prefix → namespace bindings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PrefixMap {
    entries: IndexMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `name` to `namespace`, replacing any previous binding.
    pub fn insert(&mut self, name: &str, namespace: &str) -> Result<()> {
        if !prefix_name_re().is_match(name) {
            return Err(Error::InvalidPrefix {
                name: name.to_string(),
                reason: "prefix names must match [a-z][a-z0-9]*".into(),
            });
        }
        if !is_absolute_iri(namespace) {
            return Err(Error::InvalidPrefix {
                name: name.to_string(),
                reason: format!("namespace `{namespace}` is not an absolute IRI"),
            });
        }
        if !(namespace.ends_with('/') || namespace.ends_with('#')) {
            return Err(Error::InvalidPrefix {
                name: name.to_string(),
                reason: format!("namespace `{namespace}` must end in `/` or `#`"),
            });
        }
        self.entries.insert(name.to_string(), namespace.to_string());
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.entries.get(name).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Expands a CURIE, passing absolute IRIs through unchanged.
    pub fn expand(&self, token: &str) -> Result<String> {
        resolve_curie(self, token)
    }

    /// Splits `iri` into the prefix whose namespace is the longest match and
    /// the remaining local part.
    pub fn compact<'a>(&'a self, iri: &'a str) -> Option<(&'a str, &'a str)> {
        self.iter()
            .filter(|(_, ns)| iri.starts_with(ns))
            .max_by_key(|(_, ns)| ns.len())
            .map(|(p, ns)| (p, &iri[ns.len()..]))
    }
}

/// Expands `token` (`prefix:local` or an absolute IRI) against `prefixes`.
pub fn resolve_curie(prefixes: &PrefixMap, token: &str) -> Result<String> {
    if looks_like_iri(token) {
        return if is_absolute_iri(token) {
            Ok(token.to_string())
        } else {
            Err(Error::MalformedCurie(token.to_string()))
        };
    }
    let Some((prefix, local)) = token.split_once(':') else {
        return Err(Error::MalformedCurie(token.to_string()));
    };
    if !prefix_name_re().is_match(prefix) || local.chars().any(forbidden_iri_char) {
        return Err(Error::MalformedCurie(token.to_string()));
    }
    match prefixes.get(prefix) {
        Some(ns) => Ok(format!("{ns}{local}")),
        None => Err(Error::UnknownPrefix(prefix.to_string())),
    }
}

/// The seven closed information categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Content,
    Access,
    Ownership,
    Provenance,
    TemporalGeospatial,
    Statistical,
    Quality,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Content,
        Category::Access,
        Category::Ownership,
        Category::Provenance,
        Category::TemporalGeospatial,
        Category::Statistical,
        Category::Quality,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::Content => "Content",
            Category::Access => "Access",
            Category::Ownership => "Ownership",
            Category::Provenance => "Provenance",
            Category::TemporalGeospatial => "TemporalGeospatial",
            Category::Statistical => "Statistical",
            Category::Quality => "Quality",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Ok(match norm.as_str() {
            "content" => Category::Content,
            "access" => Category::Access,
            "ownership" => Category::Ownership,
            "provenance" => Category::Provenance,
            "temporalgeospatial" | "tempgeo" | "temporal" | "geospatial" => Category::TemporalGeospatial,
            "statistical" | "statistics" => Category::Statistical,
            "quality" => Category::Quality,
            _ => return Err(Error::MalformedDocument(format!("unknown category `{s}`"))),
        })
    }
}

/// The value restriction of a property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueRange {
    PlainText,
    LangText,
    Boolean,
    Date,
    DateTime,
    Decimal,
    Duration,
    PositiveInteger,
    ResourceIri,
    Concept,
    Agent,
    Location,
    PeriodOfTime,
    Enumerated(Vec<String>),
    Document,
    MediaType,
    Policy,
    License,
    DataService,
    DatasetRef,
    QualityAnnotation,
    QualityDimension,
    ProvenanceStatement,
    ProvEntity,
    LinguisticSystem,
    AdministrativeArea,
}

impl ValueRange {
    /// An enumeration over `tokens`, lowercased; rejects empty or repeated sets.
    pub fn enumerated<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for t in tokens {
            let t = t.as_ref().trim().to_lowercase();
            if t.is_empty() || !seen.insert(t.clone()) {
                return Err(Error::MalformedDocument(format!("enumeration token `{t}` is empty or repeated")));
            }
            out.push(t);
        }
        if out.is_empty() {
            return Err(Error::MalformedDocument("enumeration needs at least one token".into()));
        }
        Ok(ValueRange::Enumerated(out))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ValueRange::PlainText => "PlainText",
            ValueRange::LangText => "LangText",
            ValueRange::Boolean => "Boolean",
            ValueRange::Date => "Date",
            ValueRange::DateTime => "DateTime",
            ValueRange::Decimal => "Decimal",
            ValueRange::Duration => "Duration",
            ValueRange::PositiveInteger => "PositiveInteger",
            ValueRange::ResourceIri => "ResourceIri",
            ValueRange::Concept => "Concept",
            ValueRange::Agent => "Agent",
            ValueRange::Location => "Location",
            ValueRange::PeriodOfTime => "PeriodOfTime",
            ValueRange::Enumerated(_) => "Enumerated",
            ValueRange::Document => "Document",
            ValueRange::MediaType => "MediaType",
            ValueRange::Policy => "Policy",
            ValueRange::License => "License",
            ValueRange::DataService => "DataService",
            ValueRange::DatasetRef => "DatasetRef",
            ValueRange::QualityAnnotation => "QualityAnnotation",
            ValueRange::QualityDimension => "QualityDimension",
            ValueRange::ProvenanceStatement => "ProvenanceStatement",
            ValueRange::ProvEntity => "ProvEntity",
            ValueRange::LinguisticSystem => "LinguisticSystem",
            ValueRange::AdministrativeArea => "AdministrativeArea",
        }
    }

    /// Parses a kind name; `Enumerated` needs its tokens and is built with
    /// [`ValueRange::enumerated`] instead.
    pub fn from_kind_name(name: &str) -> Option<Self> {
        const SIMPLE: [ValueRange; 25] = [
            ValueRange::PlainText,
            ValueRange::LangText,
            ValueRange::Boolean,
            ValueRange::Date,
            ValueRange::DateTime,
            ValueRange::Decimal,
            ValueRange::Duration,
            ValueRange::PositiveInteger,
            ValueRange::ResourceIri,
            ValueRange::Concept,
            ValueRange::Agent,
            ValueRange::Location,
            ValueRange::PeriodOfTime,
            ValueRange::Document,
            ValueRange::MediaType,
            ValueRange::Policy,
            ValueRange::License,
            ValueRange::DataService,
            ValueRange::DatasetRef,
            ValueRange::QualityAnnotation,
            ValueRange::QualityDimension,
            ValueRange::ProvenanceStatement,
            ValueRange::ProvEntity,
            ValueRange::LinguisticSystem,
            ValueRange::AdministrativeArea,
        ];
        SIMPLE.into_iter().find(|r| r.kind_name().eq_ignore_ascii_case(name))
    }

    /// Ranges whose values must be absolute IRIs.
    pub fn requires_iri(&self) -> bool {
        matches!(self, ValueRange::ResourceIri | ValueRange::Document | ValueRange::DatasetRef)
    }

    /// Ranges that accept either an IRI reference or opaque text.
    pub fn accepts_reference(&self) -> bool {
        matches!(
            self,
            ValueRange::Concept
                | ValueRange::Policy
                | ValueRange::License
                | ValueRange::DataService
                | ValueRange::QualityAnnotation
                | ValueRange::QualityDimension
                | ValueRange::ProvenanceStatement
                | ValueRange::ProvEntity
                | ValueRange::LinguisticSystem
                | ValueRange::MediaType
        )
    }
}

impl fmt::Display for ValueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueRange::Enumerated(tokens) => write!(f, "Enumerated{{{}}}", tokens.join(", ")),
            other => f.write_str(other.kind_name()),
        }
    }
}

impl Serialize for ValueRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ValueRange::Enumerated(tokens) => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("enumerated", tokens)?;
                m.end()
            }
            other => s.serialize_str(other.kind_name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cardinality {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "n")]
    Unbounded,
}

/// One metadata property of the model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertySpec {
    pub key: String,
    pub label: String,
    pub description: String,
    pub curie: String,
    pub category: Category,
    pub level: u8,
    pub range: ValueRange,
    pub max_cardinality: Cardinality,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub_property_of: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaturityLevel {
    pub number: u8,
    pub title: String,
    pub name: String,
    pub fields: Vec<String>,
}

/// Levels, categories and property bindings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaturityModel {
    pub prefixes: PrefixMap,
    pub levels: Vec<MaturityLevel>,
    properties: IndexMap<String, PropertySpec>,
}

impl MaturityModel {
    /// Assembles a model, checking the level partition and that every CURIE
    /// resolves. Each spec's `level` is overwritten by the level listing it.
    pub fn new(prefixes: PrefixMap, levels: Vec<MaturityLevel>, specs: Vec<PropertySpec>) -> Result<Self> {
        if levels.is_empty() || levels.len() > MAX_LEVELS {
            return Err(Error::MalformedDocument(format!(
                "a model has 1 to {MAX_LEVELS} levels, found {}",
                levels.len()
            )));
        }
        let mut properties = IndexMap::new();
        for spec in specs {
            if properties.contains_key(&spec.key) {
                return Err(Error::DuplicateFieldKey(spec.key));
            }
            properties.insert(spec.key.clone(), spec);
        }
        let mut listed = HashSet::new();
        for (i, level) in levels.iter().enumerate() {
            if level.number as usize != i + 1 {
                return Err(Error::MalformedDocument(format!(
                    "level #{} is numbered {}",
                    i + 1,
                    level.number
                )));
            }
            for key in &level.fields {
                if !listed.insert(key.clone()) {
                    return Err(Error::DuplicateFieldKey(key.clone()));
                }
                match properties.get_mut(key) {
                    Some(spec) => spec.level = level.number,
                    None => return Err(Error::MalformedDocument(format!("level {} lists unknown field `{key}`", level.number))),
                }
            }
        }
        if let Some(orphan) = properties.keys().find(|k| !listed.contains(*k)) {
            return Err(Error::MalformedDocument(format!("field `{orphan}` is not assigned to a level")));
        }
        for spec in properties.values() {
            prefixes.expand(&spec.curie)?;
            if let Some(sup) = &spec.sub_property_of {
                prefixes.expand(sup)?;
            }
        }
        // Keep properties in level order so iteration matches display order.
        let mut ordered = IndexMap::with_capacity(properties.len());
        for level in &levels {
            for key in &level.fields {
                let (k, v) = properties.shift_remove_entry(key).unwrap();
                ordered.insert(k, v);
            }
        }
        Ok(Self {
            prefixes,
            levels,
            properties: ordered,
        })
    }

    pub fn property(&self, key: &str) -> Option<&PropertySpec> {
        self.properties.get(key)
    }

    /// All properties in level order, then row order within a level.
    pub fn properties(&self) -> impl Iterator<Item = &PropertySpec> {
        self.properties.values()
    }

    pub fn property_count(&self) -> usize {
        self.properties.len()
    }

    pub fn level(&self, number: u8) -> Option<&MaturityLevel> {
        self.levels.get((number as usize).checked_sub(1)?)
    }

    /// Resolved IRI of a property.
    pub fn property_iri(&self, key: &str) -> Option<String> {
        self.property(key).and_then(|s| self.prefixes.expand(&s.curie).ok())
    }

    /// Properties filtered by level and/or category, in model order.
    pub fn properties_by(&self, level: Option<u32>, category: Option<Category>) -> Result<Vec<&PropertySpec>> {
        if let Some(l) = level {
            if !(1..=MAX_LEVELS as u32).contains(&l) || l as usize > self.levels.len() {
                return Err(Error::LevelOutOfRange(l));
            }
        }
        Ok(self
            .properties()
            .filter(|p| level.is_none_or(|l| p.level as u32 == l))
            .filter(|p| category.is_none_or(|c| p.category == c))
            .collect())
    }
}

/// Free-function form of [`MaturityModel::properties_by`].
pub fn properties_by(model: &MaturityModel, level: Option<u32>, category: Option<Category>) -> Result<Vec<&PropertySpec>> {
    model.properties_by(level, category)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_examples() {
        let p = builtin_prefixes();
        assert_eq!(resolve_curie(&p, "dct:title").unwrap(), "http://purl.org/dc/terms/title");
        assert_eq!(resolve_curie(&p, "http://example.org/x").unwrap(), "http://example.org/x");
        assert_eq!(resolve_curie(&p, "zzz:thing"), Err(Error::UnknownPrefix("zzz".into())));
        assert!(matches!(resolve_curie(&p, "no colon"), Err(Error::MalformedCurie(_))));
        assert!(matches!(resolve_curie(&p, "dct:has space"), Err(Error::MalformedCurie(_))));
        assert!(matches!(resolve_curie(&p, "http://bad iri"), Err(Error::MalformedCurie(_))));
        assert_eq!(resolve_curie(&p, "urn:isbn:123").unwrap(), "urn:isbn:123");
    }

    #[test]
    fn prefix_invariants() {
        let mut p = PrefixMap::new();
        assert!(p.insert("ex", "http://example.org/").is_ok());
        assert!(p.insert("Ex", "http://example.org/").is_err());
        assert!(p.insert("ex2", "http://example.org").is_err());
        assert!(p.insert("ex3", "example.org/").is_err());
    }

    #[test]
    fn compact_prefers_longest_namespace() {
        let mut p = PrefixMap::new();
        p.insert("a", "http://x.org/").unwrap();
        p.insert("b", "http://x.org/ns#").unwrap();
        assert_eq!(p.compact("http://x.org/ns#k"), Some(("b", "k")));
        assert_eq!(p.compact("http://x.org/k"), Some(("a", "k")));
        assert_eq!(p.compact("http://y.org/k"), None);
    }

    #[test]
    fn enumerations_reject_duplicates() {
        assert!(ValueRange::enumerated(["open", "Open"]).is_err());
        assert!(ValueRange::enumerated(Vec::<String>::new()).is_err());
        assert_eq!(
            ValueRange::enumerated(["Open", "closed"]).unwrap(),
            ValueRange::Enumerated(vec!["open".into(), "closed".into()])
        );
    }

    #[test]
    fn category_parsing() {
        assert_eq!("Temporal/Geospatial".parse::<Category>().unwrap(), Category::TemporalGeospatial);
        assert_eq!("quality".parse::<Category>().unwrap(), Category::Quality);
        assert!("colour".parse::<Category>().is_err());
    }
}
