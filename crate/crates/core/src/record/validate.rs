use serde::Serialize;

use super::{lexical, media_types, CatalogueEntry, Value};
use crate::model::{is_absolute_iri, Cardinality, MaturityModel, PropertySpec, ValueRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum IssueCode {
    TypeMismatch,
    EnumViolation,
    Cardinality,
    MalformedIri,
    MalformedDate,
    MalformedDecimal,
    MalformedDuration,
    NonPositive,
    UnknownField,
    PeriodInverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub field_key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_index: Option<usize>,
    pub code: IssueCode,
    pub severity: Severity,
    pub message: String,
}

impl ValidationIssue {
    fn error(spec: &PropertySpec, code: IssueCode, message: String) -> Self {
        Self {
            field_key: spec.key.clone(),
            value_index: None,
            code,
            severity: Severity::Error,
            message,
        }
    }
}

fn mismatch(spec: &PropertySpec, v: &Value) -> ValidationIssue {
    ValidationIssue::error(
        spec,
        IssueCode::TypeMismatch,
        format!("expected {}, found {}", spec.range, v.kind_name()),
    )
}

fn check_temporal(spec: &PropertySpec, s: &str, date_only: bool) -> Option<ValidationIssue> {
    let ok = lexical::is_date(s) || (!date_only && lexical::is_datetime(s));
    (!ok).then(|| ValidationIssue::error(spec, IssueCode::MalformedDate, format!("`{s}` is not an xsd:date{}", if date_only { "" } else { " or xsd:dateTime" })))
}

/// Checks one value against its property's range. Unknown media types are
/// reported with warning severity.
pub fn validate_value(spec: &PropertySpec, v: &Value) -> Vec<ValidationIssue> {
    use ValueRange as R;
    let issue = |code, msg: String| vec![ValidationIssue::error(spec, code, msg)];
    match (&spec.range, v) {
        (R::PlainText, Value::Text { lang: None, .. }) => vec![],
        (R::LangText, Value::Text { lang: None, .. }) => vec![],
        (R::LangText, Value::Text { lang: Some(l), .. }) if lexical::is_language_tag(l) => vec![],
        (R::Boolean, Value::Bool(_)) => vec![],
        (R::Date, Value::Date(s)) => check_temporal(spec, s, true).into_iter().collect(),
        (R::Date, Value::DateTime(s) | Value::Text { text: s, .. }) => check_temporal(spec, s, true).into_iter().collect(),
        (R::DateTime, Value::Date(s) | Value::DateTime(s) | Value::Text { text: s, .. }) => {
            check_temporal(spec, s, false).into_iter().collect()
        }
        (R::Decimal, Value::Decimal(s) | Value::Text { text: s, .. }) if !lexical::is_decimal(s) => {
            issue(IssueCode::MalformedDecimal, format!("`{s}` is not an xsd:decimal"))
        }
        (R::Decimal, Value::Decimal(_)) => vec![],
        (R::Duration, Value::Duration(s) | Value::Text { text: s, .. }) if !lexical::is_duration(s) => {
            issue(IssueCode::MalformedDuration, format!("`{s}` is not an xsd:duration"))
        }
        (R::Duration, Value::Duration(_)) => vec![],
        (R::PositiveInteger, Value::PosInt(0)) => issue(IssueCode::NonPositive, "value must be at least 1".into()),
        (R::PositiveInteger, Value::PosInt(_)) => vec![],
        (R::PositiveInteger, Value::Text { text, .. }) => match lexical::parse_integer(text.trim()) {
            Some(n) if n <= 0 => issue(IssueCode::NonPositive, format!("`{text}` is not positive")),
            _ => vec![mismatch(spec, v)],
        },
        (r, Value::Iri(s)) if (r.requires_iri() || r.accepts_reference() || *r == R::AdministrativeArea) && !is_absolute_iri(s) => {
            issue(IssueCode::MalformedIri, format!("`{s}` is not an absolute IRI"))
        }
        (r, Value::Iri(_)) if r.requires_iri() || r.accepts_reference() || *r == R::AdministrativeArea => vec![],
        (r, Value::Text { text, .. }) if r.requires_iri() => issue(IssueCode::MalformedIri, format!("`{text}` is not an absolute IRI")),
        (R::MediaType, Value::Text { text: s, .. } | Value::Token(s)) => {
            if media_types::is_known_format(s) {
                vec![]
            } else {
                vec![ValidationIssue {
                    severity: Severity::Warning,
                    ..ValidationIssue::error(spec, IssueCode::EnumViolation, format!("`{s}` is not a known media type or extension"))
                }]
            }
        }
        (r, Value::Text { lang: None, .. }) if r.accepts_reference() => vec![],
        (R::Agent, Value::Agent(_)) => vec![],
        (R::Location | R::AdministrativeArea, Value::Location(_)) => vec![],
        (R::AdministrativeArea, Value::Text { lang: None, .. }) => vec![],
        (R::PeriodOfTime, Value::Period(p)) => {
            let mut out: Vec<ValidationIssue> = [&p.start, &p.end]
                .into_iter()
                .flatten()
                .filter_map(|s| check_temporal(spec, s, false))
                .collect();
            if out.is_empty() {
                if let (Some(a), Some(b)) = (&p.start, &p.end) {
                    if lexical::temporal_key(a) > lexical::temporal_key(b) {
                        out.push(ValidationIssue::error(spec, IssueCode::PeriodInverted, format!("period starts ({a}) after it ends ({b})")));
                    }
                }
            }
            out
        }
        (R::Enumerated(tokens), Value::Token(t) | Value::Text { text: t, .. }) => {
            if tokens.iter().any(|k| k == &t.trim().to_lowercase()) {
                vec![]
            } else {
                issue(IssueCode::EnumViolation, format!("`{t}` is not one of {{{}}}", tokens.join(", ")))
            }
        }
        _ => vec![mismatch(spec, v)],
    }
}

/// All issues of an entry, ordered by field key then value index.
/// Missing fields are not issues.
pub fn validate_entry(model: &MaturityModel, entry: &CatalogueEntry) -> Vec<ValidationIssue> {
    let mut out = Vec::new();
    for (key, values) in &entry.fields {
        let Some(spec) = model.property(key) else {
            out.push(ValidationIssue {
                field_key: key.clone(),
                value_index: None,
                code: IssueCode::UnknownField,
                severity: Severity::Error,
                message: format!("`{key}` is not a property of the model"),
            });
            continue;
        };
        for (i, v) in values.iter().enumerate() {
            out.extend(validate_value(spec, v).into_iter().map(|is| ValidationIssue {
                value_index: Some(i),
                ..is
            }));
        }
        if spec.max_cardinality == Cardinality::One && values.len() >= 2 {
            out.push(ValidationIssue::error(
                spec,
                IssueCode::Cardinality,
                format!("at most one value allowed, found {}", values.len()),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_model;
    use crate::record::{parse_entry, Agent, Period};

    fn codes(key: &str, v: Value) -> Vec<IssueCode> {
        let m = builtin_model();
        validate_value(m.property(key).unwrap(), &v).into_iter().map(|i| i.code).collect()
    }

    #[test]
    fn value_examples() {
        assert_eq!(codes("accessCategory", Value::Token("open".into())), []);
        assert_eq!(codes("accessCategory", Value::Token("partial".into())), [IssueCode::EnumViolation]);
        assert_eq!(codes("hasRDA_A1_04D", Value::text("yes")), [IssueCode::TypeMismatch]);
    }

    #[test]
    fn range_checks() {
        assert_eq!(codes("issued", Value::text("07/02/2024")), [IssueCode::MalformedDate]);
        assert_eq!(codes("issued", Value::DateTime("2024-01-01T00:00:00Z".into())), []);
        assert_eq!(codes("rows", Value::text("0")), [IssueCode::NonPositive]);
        assert_eq!(codes("rows", Value::text("-4")), [IssueCode::NonPositive]);
        assert_eq!(codes("rows", Value::text("many")), [IssueCode::TypeMismatch]);
        assert_eq!(codes("rows", Value::PosInt(0)), [IssueCode::NonPositive]);
        assert_eq!(codes("spatialResolutionInMeters", Value::text("ten")), [IssueCode::MalformedDecimal]);
        assert_eq!(codes("temporalResolution", Value::text("hourly")), [IssueCode::MalformedDuration]);
        assert_eq!(codes("accessURL", Value::text("www.example")), [IssueCode::MalformedIri]);
        assert_eq!(codes("accessURL", Value::Iri("http://e.org".into())), []);
        assert_eq!(codes("theme", Value::text("Transportation")), []);
        assert_eq!(codes("identifier", Value::Text { text: "x".into(), lang: Some("en".into()) }), [IssueCode::TypeMismatch]);
        assert_eq!(codes("title", Value::Text { text: "x".into(), lang: Some("en".into()) }), []);
        assert_eq!(codes("title", Value::Bool(true)), [IssueCode::TypeMismatch]);
        assert_eq!(
            codes("creator", Value::Agent(Agent { name: "A".into(), email: None, indigenous: true })),
            []
        );
        assert_eq!(
            codes("temporal", Value::Period(Period { start: Some("2022-01-01".into()), end: Some("2021-01-01".into()) })),
            [IssueCode::PeriodInverted]
        );
        assert_eq!(
            codes("temporal", Value::Period(Period { start: Some("soon".into()), end: None })),
            [IssueCode::MalformedDate]
        );
    }

    #[test]
    fn unknown_format_is_warning() {
        let m = builtin_model();
        let issues = validate_value(m.property("format").unwrap(), &Value::text("html, pdf"));
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].severity, Severity::Warning);
        assert!(validate_value(m.property("format").unwrap(), &Value::text("CSV")).is_empty());
    }

    #[test]
    fn entry_examples() {
        let m = builtin_model();
        let empty = parse_entry(r#"{"id":"e"}"#, &m).unwrap();
        assert!(validate_entry(&m, &empty).is_empty());
        let two = parse_entry(r#"{"id":"e","fields":{"versionInfo":["1","2"]}}"#, &m).unwrap();
        let issues = validate_entry(&m, &two);
        assert_eq!(issues.iter().map(|i| i.code).collect::<Vec<_>>(), [IssueCode::Cardinality]);
        let bad = parse_entry(r#"{"id":"e","fields":{"issued":["07/02/2024"]}}"#, &m).unwrap();
        assert_eq!(validate_entry(&m, &bad).iter().map(|i| i.code).collect::<Vec<_>>(), [IssueCode::MalformedDate]);
    }

    #[test]
    fn order_and_unknown_fields() {
        let m = builtin_model();
        let e = parse_entry(
            r#"{"id":"e","fields":{"zeta":["?"],"rows":["0","x"],"accessCategory":["nope"]}}"#,
            &m,
        )
        .unwrap();
        let got: Vec<(String, Option<usize>, IssueCode)> = validate_entry(&m, &e)
            .into_iter()
            .map(|i| (i.field_key, i.value_index, i.code))
            .collect();
        assert_eq!(
            got,
            [
                ("accessCategory".to_string(), Some(0), IssueCode::EnumViolation),
                ("rows".to_string(), Some(0), IssueCode::NonPositive),
                ("rows".to_string(), Some(1), IssueCode::TypeMismatch),
                ("zeta".to_string(), None, IssueCode::UnknownField),
            ]
        );
    }
}
