//! Template-driven conversion of catalogue entries into RDF graphs.
//!
//! A mapping document looks like JSON-LD: a `@context` of prefixes, a root
//! node with `@id` and `@type`, and predicate keys whose values are literal
//! templates (`"{ckanField.title}"` or `{"@type": "xsd:date", "@value": ..}`),
//! IRI templates (`{"@id": ..}`) or nested nodes. Template strings are parsed
//! once at load time.

mod template;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use serde_json::{Map, Value as Json};
use uuid::Uuid;

use crate::error::{Error, Result};
use crate::model::{is_absolute_iri, resolve_curie, PrefixMap, RDF_NS, RDF_TYPE, XSD_STRING};
use crate::rdf::{Graph, Term, Triple};
use crate::record::{lexical, CatalogueEntry, Value};

pub use template::{Expr, Segment, Template};

/// Namespace of the name-based UUIDs minted by `generate_uuid`.
pub const UUID_NAMESPACE: Uuid = uuid::uuid!("6f0c6f4e-3a1e-5b52-9d0e-2c8f3f1d7a10");

pub const DEFAULT_MAPPING: &str = include_str!("../../data/default_mapping.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyTemplate {
    Literal { datatype: String, value: Template, path: String },
    Iri { value: Template, path: String },
    Node(NodeTemplate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTemplate {
    /// Location of the node in the document, e.g. `dct:creator`.
    pub path: String,
    pub id: Template,
    pub rdf_type: Option<String>,
    /// `(predicate IRI, key as written, template)` in document order.
    pub properties: Vec<(String, String, PropertyTemplate)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingConfig {
    pub context: PrefixMap,
    pub root: NodeTemplate,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedDocument(msg.into())
}

fn join_path(parent: &str, key: &str) -> String {
    if parent.is_empty() {
        key.to_string()
    } else {
        format!("{parent}/{key}")
    }
}

fn as_str<'a>(v: &'a Json, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| malformed(format!("`{path}` must be a string")))
}

fn parse_node(obj: &Map<String, Json>, path: &str, ctx: &PrefixMap) -> Result<NodeTemplate> {
    let id = match obj.get("@id") {
        Some(v) => Template::parse(as_str(v, &join_path(path, "@id"))?)?,
        None => return Err(Error::MissingId(join_path(path, "@id"))),
    };
    let rdf_type = obj
        .get("@type")
        .map(|t| resolve_curie(ctx, as_str(t, &join_path(path, "@type"))?))
        .transpose()?;
    let mut properties = Vec::new();
    for (key, v) in obj {
        match key.as_str() {
            "@id" | "@type" => continue,
            "@context" if path.is_empty() => continue,
            k if k.starts_with('@') => return Err(malformed(format!("unsupported keyword `{k}` in `{}`", join_path(path, k)))),
            _ => {}
        }
        let pred = resolve_curie(ctx, key)?;
        let here = join_path(path, key);
        properties.push((pred, key.clone(), parse_property(v, &here, ctx)?));
    }
    Ok(NodeTemplate {
        path: path.to_string(),
        id,
        rdf_type,
        properties,
    })
}

fn parse_property(v: &Json, path: &str, ctx: &PrefixMap) -> Result<PropertyTemplate> {
    match v {
        Json::String(s) => Ok(PropertyTemplate::Literal {
            datatype: XSD_STRING.to_string(),
            value: Template::parse(s)?,
            path: path.to_string(),
        }),
        Json::Object(o) if o.contains_key("@value") => {
            if let Some(k) = o.keys().find(|k| *k != "@value" && *k != "@type") {
                return Err(malformed(format!("unexpected `{k}` beside `@value` in `{path}`")));
            }
            let datatype = match o.get("@type") {
                Some(t) => resolve_curie(ctx, as_str(t, path)?)?,
                None => XSD_STRING.to_string(),
            };
            Ok(PropertyTemplate::Literal {
                datatype,
                value: Template::parse(as_str(&o["@value"], path)?)?,
                path: join_path(path, "@value"),
            })
        }
        Json::Object(o) if o.len() == 1 && o.contains_key("@id") => Ok(PropertyTemplate::Iri {
            value: Template::parse(as_str(&o["@id"], path)?)?,
            path: join_path(path, "@id"),
        }),
        Json::Object(o) => Ok(PropertyTemplate::Node(parse_node(o, path, ctx)?)),
        _ => Err(malformed(format!("`{path}` must be a string or an object"))),
    }
}

/// Parses a mapping document with a top-level `mappings` object.
pub fn parse_mapping(text: &str) -> Result<MappingConfig> {
    let doc: Json = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let m = doc
        .get("mappings")
        .and_then(Json::as_object)
        .ok_or_else(|| malformed("missing `mappings` object"))?;
    let mut context = PrefixMap::new();
    if let Some(c) = m.get("@context") {
        let c = c.as_object().ok_or_else(|| malformed("`@context` must be an object"))?;
        for (name, ns) in c {
            context.insert(name, as_str(ns, "@context")?)?;
        }
    }
    if context.get("rdf").is_none() {
        context.insert("rdf", RDF_NS)?;
    }
    let root = parse_node(m, "", &context)?;
    if root.rdf_type.is_none() {
        return Err(malformed("root node needs `@type`"));
    }
    Ok(MappingConfig { context, root })
}

/// The mapping shipped with the engine, covering the built-in model.
pub fn default_mapping() -> MappingConfig {
    static CFG: OnceLock<MappingConfig> = OnceLock::new();
    CFG.get_or_init(|| parse_mapping(DEFAULT_MAPPING).expect("bundled mapping parses")).clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UuidMode {
    #[default]
    Deterministic,
    Random,
}

/// Where a helper is being called from.
#[derive(Debug, Clone)]
pub struct HelperScope<'a> {
    pub entry_id: &'a str,
    /// Document path of the template, e.g. `dct:creator/@id`.
    pub template_path: &'a str,
    /// Position of this call among the helper calls of the template.
    pub call_index: usize,
    pub uuid_mode: UuidMode,
}

pub type Helper = fn(&[String], &HelperScope<'_>) -> std::result::Result<String, String>;

/// Name-based UUID for a call site: `entry_id/template_path`, then `#n` for
/// the n-th call in the same template (n ≥ 1), then `/arg` per argument.
pub fn uuid_name(scope: &HelperScope<'_>, args: &[String]) -> String {
    let mut name = format!("{}/{}", scope.entry_id, scope.template_path);
    if scope.call_index > 0 {
        name.push_str(&format!("#{}", scope.call_index));
    }
    for a in args {
        name.push('/');
        name.push_str(a);
    }
    name
}

fn generate_uuid(args: &[String], scope: &HelperScope<'_>) -> std::result::Result<String, String> {
    Ok(match scope.uuid_mode {
        UuidMode::Deterministic => Uuid::new_v5(&UUID_NAMESPACE, uuid_name(scope, args).as_bytes()),
        UuidMode::Random => Uuid::new_v4(),
    }
    .to_string())
}

fn year_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\d{4}$").unwrap())
}

fn to_date(args: &[String], _: &HelperScope<'_>) -> std::result::Result<String, String> {
    let [s] = args else {
        return Err(format!("expects 1 argument, got {}", args.len()));
    };
    let s = s.trim();
    if lexical::is_date(s) {
        Ok(s.to_string())
    } else if lexical::is_datetime(s) {
        Ok(s[..10].to_string())
    } else if year_re().is_match(s) {
        Ok(format!("{s}-01-01"))
    } else {
        Err(format!("`{s}` is not a date, dateTime or year"))
    }
}

/// Bare paths that stand for a differently named entry field.
const FIELD_ALIASES: [(&str, &str); 1] = [("published_date", "issued")];

/// Everything template expansion reads for one entry.
pub struct EvalContext<'a> {
    pub entry: &'a CatalogueEntry,
    pub ckan_view: BTreeMap<&'static str, Vec<String>>,
    helpers: BTreeMap<String, Helper>,
    pub uuid_mode: UuidMode,
}

fn filled_texts(entry: &CatalogueEntry, key: &str) -> Vec<String> {
    entry.values(key).iter().filter(|v| v.is_filled()).map(Value::display_text).collect()
}

/// The CKAN-style field dictionary exposed as `ckanField`.
pub fn ckan_view(entry: &CatalogueEntry) -> BTreeMap<&'static str, Vec<String>> {
    let creator_email: Vec<String> = entry
        .values("creator")
        .iter()
        .filter_map(|v| match v {
            Value::Agent(a) => a.email.clone().filter(|e| !e.trim().is_empty()),
            _ => None,
        })
        .collect();
    let organization = match &entry.organization {
        Some(o) if !o.trim().is_empty() => vec![o.clone()],
        _ => filled_texts(entry, "publisher"),
    };
    BTreeMap::from([
        ("id", vec![entry.id.clone()]),
        ("name", vec![entry.id.clone()]),
        ("title", filled_texts(entry, "title")),
        ("notes", filled_texts(entry, "description")),
        ("tags", filled_texts(entry, "keyword")),
        ("author", filled_texts(entry, "creator")),
        ("author_email", creator_email),
        ("url", filled_texts(entry, "landingPage")),
        ("organization", organization),
        ("license_id", filled_texts(entry, "license")),
        ("visibility", filled_texts(entry, "access_visibility")),
    ])
}

fn subfield(v: &Value, name: &str) -> Option<String> {
    let s = match (v, name) {
        (Value::Agent(a), "name") => Some(a.name.clone()),
        (Value::Agent(a), "email") => a.email.clone(),
        (Value::Agent(a), "indigenous") => Some(a.indigenous.to_string()),
        (Value::Period(p), "start") => p.start.clone(),
        (Value::Period(p), "end") => p.end.clone(),
        (Value::Location(l), "label") => Some(l.label.clone()),
        (Value::Location(l), "region_code") => l.region_code.clone(),
        (Value::Text { text, .. }, "text") => Some(text.clone()),
        (Value::Text { lang, .. }, "lang") => lang.clone(),
        _ => None,
    };
    s.filter(|s| !s.trim().is_empty())
}

impl<'a> EvalContext<'a> {
    pub fn new(entry: &'a CatalogueEntry, uuid_mode: UuidMode) -> Self {
        let mut helpers: BTreeMap<String, Helper> = BTreeMap::new();
        helpers.insert("generate_uuid".into(), generate_uuid);
        helpers.insert("to_date".into(), to_date);
        Self {
            entry,
            ckan_view: ckan_view(entry),
            helpers,
            uuid_mode,
        }
    }

    /// Adds or replaces a helper.
    pub fn register(&mut self, name: &str, f: Helper) {
        self.helpers.insert(name.to_string(), f);
    }

    fn path_values(&self, path: &[String]) -> Vec<String> {
        if path[0] == "ckanField" {
            return match path {
                [_, key] => self.ckan_view.get(key.as_str()).cloned().unwrap_or_default(),
                _ => vec![],
            };
        }
        let mut key = path[0].as_str();
        if !self.entry.fields.contains_key(key) {
            if let Some((_, to)) = FIELD_ALIASES.iter().find(|(from, _)| *from == key) {
                key = to;
            }
        }
        let values = self.entry.values(key).iter().filter(|v| v.is_filled());
        match path {
            [_] => values.map(Value::display_text).collect(),
            [_, sub] => values.filter_map(|v| subfield(v, sub)).collect(),
            _ => vec![],
        }
    }

    fn eval(&self, e: &Expr, tpl: &Template, path: &str, calls: &mut usize) -> Result<Vec<String>> {
        match e {
            Expr::Path(p) => Ok(self.path_values(p)),
            Expr::Call(name, args) => {
                let f = *self.helpers.get(name).ok_or_else(|| Error::UnknownHelper(name.clone()))?;
                let call_index = *calls;
                *calls += 1;
                let mut arg_values = Vec::with_capacity(args.len());
                for a in args {
                    arg_values.push(self.eval(a, tpl, path, calls)?);
                }
                if arg_values.iter().any(Vec::is_empty) {
                    return Ok(vec![]);
                }
                let multi: Vec<usize> = (0..arg_values.len()).filter(|&i| arg_values[i].len() > 1).collect();
                if multi.len() > 1 {
                    return Err(Error::MultiValueAmbiguity(tpl.source.clone()));
                }
                let rounds = multi.first().map_or(1, |&i| arg_values[i].len());
                let scope = HelperScope {
                    entry_id: &self.entry.id,
                    template_path: path,
                    call_index,
                    uuid_mode: self.uuid_mode,
                };
                (0..rounds)
                    .map(|r| {
                        let args: Vec<String> = arg_values.iter().map(|v| if v.len() > 1 { v[r].clone() } else { v[0].clone() }).collect();
                        f(&args, &scope).map_err(|reason| Error::HelperFailure {
                            name: name.clone(),
                            reason,
                        })
                    })
                    .collect()
            }
        }
    }

    /// Expands a template found at document path `path`. An empty result
    /// means the template is absent for this entry.
    pub fn expand(&self, tpl: &Template, path: &str) -> Result<Vec<String>> {
        let mut calls = 0;
        let mut parts: Vec<Vec<String>> = Vec::new();
        for seg in &tpl.segments {
            match seg {
                Segment::Text(t) => parts.push(vec![t.clone()]),
                Segment::Placeholder(e) => parts.push(self.eval(e, tpl, path, &mut calls)?),
            }
        }
        if parts.iter().any(Vec::is_empty) {
            return Ok(vec![]);
        }
        let multi: Vec<usize> = (0..parts.len()).filter(|&i| parts[i].len() > 1).collect();
        if multi.len() > 1 {
            return Err(Error::MultiValueAmbiguity(tpl.source.clone()));
        }
        let rounds = multi.first().map_or(1, |&i| parts[i].len());
        Ok((0..rounds)
            .map(|r| parts.iter().map(|p| if p.len() > 1 { p[r].as_str() } else { p[0].as_str() }).collect())
            .collect())
    }
}

/// Result of mapping one entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappedEntry {
    pub root: String,
    pub graph: Graph,
    /// Non-root subjects in emission order.
    pub minted: Vec<String>,
}

fn single_iri(ctx: &EvalContext<'_>, tpl: &Template, path: &str) -> Result<Option<String>> {
    let mut v = ctx.expand(tpl, path)?;
    match v.len() {
        0 => Ok(None),
        1 => {
            let iri = v.pop().unwrap();
            if is_absolute_iri(&iri) {
                Ok(Some(iri))
            } else {
                Err(Error::InvalidIri(iri))
            }
        }
        _ => Err(Error::MultiValueAmbiguity(tpl.source.clone())),
    }
}

/// Emits the node's own triples (without its type) and the minted IRIs below it.
fn emit_children(node: &NodeTemplate, subject: &str, ctx: &EvalContext<'_>, out: &mut Vec<Triple>, minted: &mut Vec<String>) -> Result<()> {
    for (pred, _, pt) in &node.properties {
        match pt {
            PropertyTemplate::Literal { datatype, value, path } => {
                for v in ctx.expand(value, path)? {
                    out.push(Triple::new(subject, pred.clone(), Term::typed(v, datatype)));
                }
            }
            PropertyTemplate::Iri { value, path } => {
                for v in ctx.expand(value, path)? {
                    out.push(Triple::new(subject, pred.clone(), Term::iri(v)?));
                }
            }
            PropertyTemplate::Node(child) => {
                let Some(iri) = single_iri(ctx, &child.id, &join_path(&child.path, "@id"))? else {
                    continue;
                };
                let mut inner = Vec::new();
                let mut inner_minted = Vec::new();
                emit_children(child, &iri, ctx, &mut inner, &mut inner_minted)?;
                if inner.is_empty() {
                    continue;
                }
                out.push(Triple::new(subject, pred.clone(), Term::Iri(iri.clone())));
                if let Some(t) = &child.rdf_type {
                    out.push(Triple::new(iri.clone(), RDF_TYPE, Term::Iri(t.clone())));
                }
                out.extend(inner);
                minted.push(iri);
                minted.extend(inner_minted);
            }
        }
    }
    Ok(())
}

/// The subject IRI the mapping gives `entry`.
pub fn root_iri(config: &MappingConfig, entry: &CatalogueEntry) -> Result<String> {
    let ctx = EvalContext::new(entry, UuidMode::Deterministic);
    single_iri(&ctx, &config.root.id, "@id")?.ok_or_else(|| Error::MissingId("@id".into()))
}

pub fn map_with(config: &MappingConfig, ctx: &EvalContext<'_>) -> Result<MappedEntry> {
    let root = single_iri(ctx, &config.root.id, "@id")?.ok_or_else(|| Error::MissingId("@id".into()))?;
    let mut triples = Vec::new();
    if let Some(t) = &config.root.rdf_type {
        triples.push(Triple::new(root.clone(), RDF_TYPE, Term::Iri(t.clone())));
    }
    let mut minted = Vec::new();
    emit_children(&config.root, &root, ctx, &mut triples, &mut minted)?;
    let mut seen = std::collections::BTreeSet::new();
    minted.retain(|m| m != &root && seen.insert(m.clone()));
    Ok(MappedEntry {
        root,
        graph: triples.into_iter().collect(),
        minted,
    })
}

pub fn map_entry(config: &MappingConfig, entry: &CatalogueEntry, uuid_mode: UuidMode) -> Result<MappedEntry> {
    map_with(config, &EvalContext::new(entry, uuid_mode))
}
