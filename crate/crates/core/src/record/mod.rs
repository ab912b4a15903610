//! Catalogue entries, their typed values, and validation against the model.
//!
//! Entries travel as JSON:
//!
//! ```json
//! { "id": "bridges-2024", "organization": "City of Toronto", "revision": 3,
//!   "fields": { "title": ["Bridges"], "issued": ["2024-02-07"],
//!               "creator": [{"name": "Roads Dept", "email": "roads@example.org"}] },
//!   "resources": [{"name": "data", "url": "http://example.org/b.csv", "format": "CSV"}] }
//! ```
//!
//! Scalars are strings and are coerced to the field's range when the
//! conversion is lossless; anything else stays text and is flagged later by
//! [`validate_entry`].

pub mod lexical;
pub mod media_types;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;
use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::model::{is_absolute_iri, MaturityModel, ValueRange};

pub use validate::{validate_entry, validate_value, IssueCode, Severity, ValidationIssue};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Agent {
    pub name: String,
    pub email: Option<String>,
    /// Marks an Indigenous agent.
    pub indigenous: bool,
}

/// A time span; each bound is an `xsd:date` or `xsd:dateTime` lexical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Period {
    pub start: Option<String>,
    pub end: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Location {
    pub label: String,
    pub region_code: Option<String>,
}

/// One typed metadata value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Value {
    Text { text: String, lang: Option<String> },
    Bool(bool),
    Date(String),
    DateTime(String),
    Decimal(String),
    Duration(String),
    PosInt(u64),
    Iri(String),
    Token(String),
    Agent(Agent),
    Period(Period),
    Location(Location),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text { text: s.into(), lang: None }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Text { .. } => "text",
            Value::Bool(_) => "boolean",
            Value::Date(_) => "date",
            Value::DateTime(_) => "dateTime",
            Value::Decimal(_) => "decimal",
            Value::Duration(_) => "duration",
            Value::PosInt(_) => "positive integer",
            Value::Iri(_) => "IRI",
            Value::Token(_) => "token",
            Value::Agent(_) => "agent",
            Value::Period(_) => "period",
            Value::Location(_) => "location",
        }
    }

    /// Whether the value carries information: non-blank text, any boolean.
    pub fn is_filled(&self) -> bool {
        let nb = |s: &str| !s.trim().is_empty();
        match self {
            Value::Text { text, .. } => nb(text),
            Value::Bool(_) | Value::PosInt(_) => true,
            Value::Date(s) | Value::DateTime(s) | Value::Decimal(s) | Value::Duration(s) | Value::Iri(s) | Value::Token(s) => nb(s),
            Value::Agent(a) => nb(&a.name) || a.email.as_deref().is_some_and(nb),
            Value::Period(p) => p.start.as_deref().is_some_and(nb) || p.end.as_deref().is_some_and(nb),
            Value::Location(l) => nb(&l.label) || l.region_code.as_deref().is_some_and(nb),
        }
    }

    /// Plain-text rendering: agent name, location label, `start/end`.
    pub fn display_text(&self) -> String {
        match self {
            Value::Text { text, .. } => text.clone(),
            Value::Bool(b) => b.to_string(),
            Value::PosInt(n) => n.to_string(),
            Value::Date(s) | Value::DateTime(s) | Value::Decimal(s) | Value::Duration(s) | Value::Iri(s) | Value::Token(s) => s.clone(),
            Value::Agent(a) => a.name.clone(),
            Value::Location(l) => l.label.clone(),
            Value::Period(p) => format!("{}/{}", p.start.as_deref().unwrap_or(""), p.end.as_deref().unwrap_or("")),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_text())
    }
}

/// An attached distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceRef {
    pub name: String,
    pub url: String,
    pub format: Option<String>,
    pub description: Option<String>,
}

/// Which statistical block of the model applies to an entry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Tabular,
    Rdf,
    Both,
    #[default]
    Unspecified,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Tabular => "tabular",
            Modality::Rdf => "rdf",
            Modality::Both => "both",
            Modality::Unspecified => "unspecified",
        }
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tabular" => Modality::Tabular,
            "rdf" => Modality::Rdf,
            "both" => Modality::Both,
            "unspecified" => Modality::Unspecified,
            _ => return Err(Error::MalformedDocument(format!("unknown modality `{s}`"))),
        })
    }
}

/// One catalogued dataset's metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogueEntry {
    pub id: String,
    pub organization: Option<String>,
    pub revision: u64,
    pub modality: Modality,
    pub fields: BTreeMap<String, Vec<Value>>,
    pub resources: Vec<ResourceRef>,
}

fn slug_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[a-z0-9][a-z0-9-]*$").unwrap())
}

pub fn is_valid_id(id: &str) -> bool {
    slug_re().is_match(id)
}

impl CatalogueEntry {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if !is_valid_id(&id) {
            return Err(Error::MalformedDocument(format!("entry id `{id}` must match [a-z0-9][a-z0-9-]*")));
        }
        Ok(Self {
            id,
            organization: None,
            revision: 0,
            modality: Modality::Unspecified,
            fields: BTreeMap::new(),
            resources: Vec::new(),
        })
    }

    pub fn values(&self, key: &str) -> &[Value] {
        self.fields.get(key).map_or(&[], Vec::as_slice)
    }

    pub fn push(&mut self, key: &str, value: Value) {
        self.fields.entry(key.to_string()).or_default().push(value);
    }

    /// Whether `key` holds at least one filled value.
    pub fn is_filled(&self, key: &str) -> bool {
        self.values(key).iter().any(Value::is_filled)
    }

    /// Canonical JSON form, the inverse of [`parse_entry`].
    pub fn to_json(&self) -> Json {
        let mut obj = Map::new();
        obj.insert("id".into(), json!(self.id));
        if let Some(org) = &self.organization {
            obj.insert("organization".into(), json!(org));
        }
        obj.insert("revision".into(), json!(self.revision));
        if self.modality != Modality::Unspecified {
            obj.insert("modality".into(), json!(self.modality.as_str()));
        }
        let fields: Map<String, Json> = self
            .fields
            .iter()
            .map(|(k, vs)| (k.clone(), Json::Array(vs.iter().map(value_to_json).collect())))
            .collect();
        obj.insert("fields".into(), Json::Object(fields));
        if !self.resources.is_empty() {
            let res = self
                .resources
                .iter()
                .map(|r| {
                    let mut o = Map::new();
                    o.insert("name".into(), json!(r.name));
                    o.insert("url".into(), json!(r.url));
                    if let Some(f) = &r.format {
                        o.insert("format".into(), json!(f));
                    }
                    if let Some(d) = &r.description {
                        o.insert("description".into(), json!(d));
                    }
                    Json::Object(o)
                })
                .collect();
            obj.insert("resources".into(), Json::Array(res));
        }
        Json::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("entry JSON is serializable");
        s.push('\n');
        s
    }
}

fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Text { text, lang: None } => json!(text),
        Value::Text { text, lang: Some(l) } => json!({"text": text, "lang": l}),
        Value::Bool(b) => json!(b),
        Value::PosInt(n) => json!(n.to_string()),
        Value::Date(s) | Value::DateTime(s) | Value::Decimal(s) | Value::Duration(s) | Value::Iri(s) | Value::Token(s) => json!(s),
        Value::Agent(a) => {
            let mut o = Map::new();
            o.insert("name".into(), json!(a.name));
            if let Some(e) = &a.email {
                o.insert("email".into(), json!(e));
            }
            if a.indigenous {
                o.insert("indigenous".into(), json!(true));
            }
            Json::Object(o)
        }
        Value::Period(p) => {
            let mut o = Map::new();
            if let Some(s) = &p.start {
                o.insert("start".into(), json!(s));
            }
            if let Some(e) = &p.end {
                o.insert("end".into(), json!(e));
            }
            Json::Object(o)
        }
        Value::Location(l) => {
            let mut o = Map::new();
            o.insert("label".into(), json!(l.label));
            if let Some(c) = &l.region_code {
                o.insert("region_code".into(), json!(c));
            }
            Json::Object(o)
        }
    }
}

fn hierarchical_iri(s: &str) -> bool {
    is_absolute_iri(s) && (s.contains("://") || s.starts_with("urn:") || s.starts_with("mailto:"))
}

/// Converts a string to the value kind of `range` when nothing is lost;
/// otherwise returns it as text.
pub fn coerce_str(range: Option<&ValueRange>, s: &str) -> Value {
    use ValueRange as R;
    let Some(range) = range else {
        return Value::text(s);
    };
    match range {
        R::PlainText | R::LangText => Value::text(s),
        R::Boolean => lexical::parse_boolean(s).map_or_else(|| Value::text(s), Value::Bool),
        R::Date if lexical::is_date(s) => Value::Date(s.to_string()),
        R::DateTime if lexical::is_date(s) => Value::Date(s.to_string()),
        R::DateTime if lexical::is_datetime(s) => Value::DateTime(s.to_string()),
        R::Decimal if lexical::is_decimal(s) => Value::Decimal(s.to_string()),
        R::Duration if lexical::is_duration(s) => Value::Duration(s.to_string()),
        R::PositiveInteger => match lexical::parse_integer(s) {
            // Only canonical forms convert; "+5" or "007" would not survive a round trip.
            Some(n) if n > 0 && n <= u64::MAX as i128 && n.to_string() == s => Value::PosInt(n as u64),
            _ => Value::text(s),
        },
        r if r.requires_iri() && is_absolute_iri(s) => Value::Iri(s.to_string()),
        r if r.accepts_reference() && hierarchical_iri(s) => Value::Iri(s.to_string()),
        R::Enumerated(_) => Value::Token(s.trim().to_lowercase()),
        R::Agent => Value::Agent(Agent {
            name: s.to_string(),
            email: None,
            indigenous: false,
        }),
        R::AdministrativeArea if hierarchical_iri(s) => Value::Iri(s.to_string()),
        R::Location | R::AdministrativeArea => Value::Location(Location {
            label: s.to_string(),
            region_code: None,
        }),
        R::PeriodOfTime => match s.split_once('/') {
            Some((a, b)) if (a.is_empty() || lexical::temporal_key(a).is_some()) && (b.is_empty() || lexical::temporal_key(b).is_some()) && !(a.is_empty() && b.is_empty()) => {
                Value::Period(Period {
                    start: (!a.is_empty()).then(|| a.to_string()),
                    end: (!b.is_empty()).then(|| b.to_string()),
                })
            }
            _ => Value::text(s),
        },
        _ => Value::text(s),
    }
}

fn opt_str(o: &Map<String, Json>, key: &str) -> Result<Option<String>> {
    match o.get(key) {
        None | Some(Json::Null) => Ok(None),
        Some(Json::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(Error::MalformedDocument(format!("`{key}` must be a string, found {other}"))),
    }
}

fn json_to_value(range: Option<&ValueRange>, v: &Json) -> Result<Value> {
    match v {
        Json::String(s) => Ok(coerce_str(range, s)),
        Json::Bool(b) => Ok(Value::Bool(*b)),
        Json::Number(n) => Ok(coerce_str(range, &n.to_string())),
        Json::Object(o) => {
            if o.contains_key("text") {
                let text = opt_str(o, "text")?.unwrap_or_default();
                Ok(Value::Text { text, lang: opt_str(o, "lang")? })
            } else if o.contains_key("name") || o.contains_key("email") || o.contains_key("indigenous") {
                let indigenous = match o.get("indigenous") {
                    None | Some(Json::Null) => false,
                    Some(Json::Bool(b)) => *b,
                    Some(_) => return Err(Error::MalformedDocument("`indigenous` must be a boolean".into())),
                };
                Ok(Value::Agent(Agent {
                    name: opt_str(o, "name")?.unwrap_or_default(),
                    email: opt_str(o, "email")?,
                    indigenous,
                }))
            } else if o.contains_key("start") || o.contains_key("end") {
                Ok(Value::Period(Period {
                    start: opt_str(o, "start")?,
                    end: opt_str(o, "end")?,
                }))
            } else if o.contains_key("label") || o.contains_key("region_code") {
                Ok(Value::Location(Location {
                    label: opt_str(o, "label")?.unwrap_or_default(),
                    region_code: opt_str(o, "region_code")?,
                }))
            } else {
                Err(Error::MalformedDocument(format!("unrecognised value object {v}")))
            }
        }
        Json::Null | Json::Array(_) => Err(Error::MalformedDocument(format!("unsupported value {v}"))),
    }
}

fn parse_resource(v: &Json) -> Result<ResourceRef> {
    let o = v
        .as_object()
        .ok_or_else(|| Error::MalformedDocument("resources must be objects".into()))?;
    let url = opt_str(o, "url")?.ok_or_else(|| Error::MalformedDocument("resource without `url`".into()))?;
    if !is_absolute_iri(&url) {
        return Err(Error::MalformedDocument(format!("resource url `{url}` is not absolute")));
    }
    Ok(ResourceRef {
        name: opt_str(o, "name")?.unwrap_or_default(),
        url,
        format: opt_str(o, "format")?.filter(|f| !f.trim().is_empty()),
        description: opt_str(o, "description")?,
    })
}

/// Parses an entry document, coercing values by the model's ranges.
pub fn parse_entry(text: &str, model: &MaturityModel) -> Result<CatalogueEntry> {
    let doc: Json = serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    entry_from_json(&doc, model)
}

pub fn entry_from_json(doc: &Json, model: &MaturityModel) -> Result<CatalogueEntry> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::MalformedDocument("entry must be a JSON object".into()))?;
    if let Some(k) = obj
        .keys()
        .find(|k| !matches!(k.as_str(), "id" | "organization" | "revision" | "modality" | "fields" | "resources"))
    {
        return Err(Error::MalformedDocument(format!("unexpected key `{k}`")));
    }
    let id = opt_str(obj, "id")?.ok_or_else(|| Error::MissingId("id".into()))?;
    let mut entry = CatalogueEntry::new(id)?;
    entry.organization = opt_str(obj, "organization")?;
    entry.revision = match obj.get("revision") {
        None | Some(Json::Null) => 0,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| Error::MalformedDocument("`revision` must be a non-negative integer".into()))?,
    };
    if let Some(m) = opt_str(obj, "modality")? {
        entry.modality = m.parse()?;
    }
    match obj.get("fields") {
        None | Some(Json::Null) => {}
        Some(Json::Object(fields)) => {
            for (key, raw) in fields {
                let range = model.property(key).map(|s| &s.range);
                let values = match raw {
                    Json::Array(items) => items.iter().map(|v| json_to_value(range, v)).collect::<Result<Vec<_>>>()?,
                    single => vec![json_to_value(range, single)?],
                };
                entry.fields.insert(key.clone(), values);
            }
        }
        Some(_) => return Err(Error::MalformedDocument("`fields` must be an object".into())),
    }
    match obj.get("resources") {
        None | Some(Json::Null) => {}
        Some(Json::Array(items)) => {
            entry.resources = items.iter().map(parse_resource).collect::<Result<_>>()?;
        }
        Some(_) => return Err(Error::MalformedDocument("`resources` must be an array".into())),
    }
    Ok(entry)
}
