use std::collections::HashSet;

use serde_json::{Map, Value as Json};

use super::builtin::{builtin_prefixes, builtin_spec, CKAN_FIELDS};
use super::{Cardinality, Category, MaturityLevel, MaturityModel, PropertySpec, ValueRange};
use crate::error::{Error, Result};

/// Loads a model from a JSON document with a top-level `maturity_model`
/// array of `{title, name, fields}` levels.
///
/// A field is either `{"ckanField": <name>}`, binding a built-in property, or
/// `{"name": .., "label": ..}` with optional `category`, `curie`, `range`,
/// `description` and `cardinality`, introducing a new property.
pub fn load_model_config(text: &str) -> Result<MaturityModel> {
    let doc: Json = serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    let levels_json = doc
        .get("maturity_model")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::MalformedDocument("missing `maturity_model` array".into()))?;

    let prefixes = builtin_prefixes();
    let mut levels = Vec::new();
    let mut specs: Vec<PropertySpec> = Vec::new();
    let mut seen_ckan = HashSet::new();
    let mut field_no = 0usize;

    for (i, level_json) in levels_json.iter().enumerate() {
        let obj = level_json
            .as_object()
            .ok_or_else(|| Error::MalformedDocument(format!("level #{} is not an object", i + 1)))?;
        let title = str_key(obj, "title")?.unwrap_or_default();
        let name = str_key(obj, "name")?.unwrap_or_else(|| format!("maturity_level_{}", i + 1));
        let fields_json = obj
            .get("fields")
            .and_then(Json::as_array)
            .ok_or_else(|| Error::MalformedDocument(format!("level #{} has no `fields` array", i + 1)))?;

        let number = u8::try_from(i + 1).map_err(|_| Error::MalformedDocument("too many levels".into()))?;
        let mut keys = Vec::new();
        for field in fields_json {
            field_no += 1;
            let f = field
                .as_object()
                .ok_or_else(|| Error::MalformedDocument(format!("field #{field_no} is not an object")))?;
            let spec = if let Some(ckan) = str_key(f, "ckanField")? {
                if !seen_ckan.insert(ckan.clone()) {
                    return Err(Error::DuplicateFieldKey(ckan));
                }
                let (_, key) = CKAN_FIELDS
                    .iter()
                    .find(|(c, _)| *c == ckan)
                    .ok_or_else(|| Error::UnknownCkanField(ckan.clone()))?;
                // author and author_email both fill the creator agent.
                if specs.iter().any(|s| s.key == *key) && CKAN_FIELDS.iter().filter(|(_, k)| k == key).count() > 1 {
                    continue;
                }
                builtin_spec(key).expect("CKAN binding targets a built-in key")
            } else if let Some(name) = str_key(f, "name")? {
                custom_spec(f, name, &prefixes)?
            } else {
                return Err(Error::ConfigMissingKey(field_no));
            };
            if specs.iter().any(|s| s.key == spec.key) {
                return Err(Error::DuplicateFieldKey(spec.key));
            }
            keys.push(spec.key.clone());
            specs.push(PropertySpec { level: number, ..spec });
        }
        levels.push(MaturityLevel {
            number,
            title,
            name,
            fields: keys,
        });
    }
    MaturityModel::new(prefixes, levels, specs)
}

fn str_key(obj: &Map<String, Json>, key: &str) -> Result<Option<String>> {
    match obj.get(key) {
        None | Some(Json::Null) => Ok(None),
        Some(Json::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(Error::MalformedDocument(format!("`{key}` must be a string"))),
    }
}

fn custom_spec(f: &Map<String, Json>, name: String, prefixes: &super::PrefixMap) -> Result<PropertySpec> {
    if name.trim().is_empty() {
        return Err(Error::MalformedDocument("field `name` is empty".into()));
    }
    let label = str_key(f, "label")?.unwrap_or_else(|| name.clone());
    let category = match str_key(f, "category")? {
        Some(c) => c.parse::<Category>()?,
        None => Category::Content,
    };
    let curie = str_key(f, "curie")?.unwrap_or_else(|| format!("cuadr:{name}"));
    prefixes.expand(&curie)?;
    let range = match f.get("range") {
        None | Some(Json::Null) => ValueRange::PlainText,
        Some(Json::String(kind)) => ValueRange::from_kind_name(kind)
            .ok_or_else(|| Error::MalformedDocument(format!("unknown range `{kind}`")))?,
        Some(Json::Object(o)) => match o.get("enumerated").and_then(Json::as_array) {
            Some(tokens) => {
                let tokens: Option<Vec<&str>> = tokens.iter().map(Json::as_str).collect();
                ValueRange::enumerated(tokens.ok_or_else(|| Error::MalformedDocument("enumeration tokens must be strings".into()))?)?
            }
            None => return Err(Error::MalformedDocument("range object needs an `enumerated` array".into())),
        },
        Some(_) => return Err(Error::MalformedDocument("`range` must be a string or object".into())),
    };
    let max_cardinality = match str_key(f, "cardinality")?.as_deref() {
        None | Some("n") => Cardinality::Unbounded,
        Some("1") => Cardinality::One,
        Some(other) => return Err(Error::MalformedDocument(format!("cardinality `{other}` is not `1` or `n`"))),
    };
    Ok(PropertySpec {
        key: name,
        description: str_key(f, "description")?.unwrap_or_else(|| label.clone()),
        label,
        curie,
        category,
        level: 1,
        range,
        max_cardinality,
        sub_property_of: str_key(f, "sub_property_of")?,
    })
}
