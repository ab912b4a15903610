use std::sync::OnceLock;

use super::{Cardinality, Category, MaturityLevel, MaturityModel, PrefixMap, PropertySpec, ValueRange};

/// Namespace for properties the model introduces itself.
pub const CUADR_NS: &str = "http://data.urbandatacentre.ca/";

const PREFIXES: [(&str, &str); 20] = [
    ("adms", "http://www.w3.org/ns/adms#"),
    ("cc", "http://creativecommons.org/ns#"),
    ("cuadr", CUADR_NS),
    ("dc", "http://purl.org/dc/elements/1.1/"),
    ("dcat", "http://www.w3.org/ns/dcat#"),
    ("dct", "http://purl.org/dc/terms/"),
    ("dqv", "http://www.w3.org/ns/dqv#"),
    ("fair", "http://ontology.eil.utoronto.ca/fair#"),
    ("foaf", "http://xmlns.com/foaf/0.1/"),
    ("oa", "http://www.w3.org/ns/oa#"),
    ("odrl", "http://www.w3.org/ns/odrl/2/"),
    ("owl", "http://www.w3.org/2002/07/owl#"),
    ("prov", "http://www.w3.org/ns/prov#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("sc", "https://schema.org/"),
    ("skos", "http://www.w3.org/2004/02/skos/core#"),
    ("vann", "http://purl.org/vocab/vann/"),
    ("vcard", "http://www.w3.org/2006/vcard/ns#"),
    ("void", "http://rdfs.org/ns/void#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
];

/// CKAN form fields a model configuration may bind with `ckanField`, and the
/// built-in property each one fills.
pub const CKAN_FIELDS: [(&str, &str); 10] = [
    ("id", "identifier"),
    ("title", "title"),
    ("notes", "description"),
    ("tags", "keyword"),
    ("author", "creator"),
    ("author_email", "creator"),
    ("url", "landingPage"),
    ("organization", "publisher"),
    ("visibility", "access_visibility"),
    ("license_id", "license"),
];

const LEVEL_TITLES: [(&str, &str); 6] = [
    ("Maturity Level 1 (Basic Information)", "maturity_level_1"),
    ("Maturity Level 2 (Access and Ownership)", "maturity_level_2"),
    ("Maturity Level 3 (Content, Versioning and Resolution)", "maturity_level_3"),
    ("Maturity Level 4 (Individual and Indigenous Data)", "maturity_level_4"),
    ("Maturity Level 5 (FAIR Principles)", "maturity_level_5"),
    ("Maturity Level 6 (Statistics and Quality)", "maturity_level_6"),
];

use Category::*;
use ValueRange as R;

struct Row {
    key: &'static str,
    label: &'static str,
    description: &'static str,
    curie: &'static str,
    category: Category,
    level: u8,
    range: fn() -> ValueRange,
    single: bool,
    sub_property_of: Option<&'static str>,
}

macro_rules! row {
    ($lvl:expr, $cat:expr, $key:expr, $label:expr, $desc:expr, $curie:expr, $range:expr) => {
        row!($lvl, $cat, $key, $label, $desc, $curie, $range, false, None)
    };
    ($lvl:expr, $cat:expr, $key:expr, $label:expr, $desc:expr, $curie:expr, $range:expr, $single:expr) => {
        row!($lvl, $cat, $key, $label, $desc, $curie, $range, $single, None)
    };
    ($lvl:expr, $cat:expr, $key:expr, $label:expr, $desc:expr, $curie:expr, $range:expr, $single:expr, $sup:expr) => {
        Row {
            key: $key,
            label: $label,
            description: $desc,
            curie: $curie,
            category: $cat,
            level: $lvl,
            range: $range,
            single: $single,
            sub_property_of: $sup,
        }
    };
}

fn access_categories() -> ValueRange {
    ValueRange::Enumerated(vec!["open".into(), "closed".into(), "service".into()])
}

#[rustfmt::skip]
const ROWS: [Row; 57] = [
    // Level 1
    row!(1, Content, "theme", "Domain / Topic", "Domain or topic of the dataset being catalogued.", "dcat:theme", || R::Concept),
    row!(1, Content, "title", "Title", "Title of the dataset.", "dct:title", || R::LangText),
    row!(1, Content, "description", "Description", "A description of the dataset.", "dct:description", || R::LangText),
    row!(1, Content, "keyword", "Keywords", "Keywords or tags categorizing the dataset.", "dcat:keyword", || R::LangText),
    row!(1, Provenance, "issued", "Published date", "Date the dataset was published.", "dct:issued", || R::DateTime, true),
    row!(1, TemporalGeospatial, "temporal", "Time period", "Time period the data spans.", "dct:temporal", || R::PeriodOfTime),
    row!(1, TemporalGeospatial, "spatial", "Geospatial area", "Geospatial area the data spans.", "dct:spatial", || R::Location),
    // Level 2
    row!(2, Content, "identifier", "Identifier", "Unique identifier for the dataset, often assigned by creator or publisher.", "dct:identifier", || R::PlainText),
    row!(2, Access, "accessCategory", "Access category", "Access category: open, closed or service.", "cuadr:accessCategory", access_categories, true),
    row!(2, Access, "license", "License", "License the dataset is released under.", "dct:license", || R::License, true),
    row!(2, Access, "accessURL", "Access URL", "Where the dataset can be accessed.", "dcat:accessURL", || R::ResourceIri),
    row!(2, Access, "access_visibility", "Visibility", "What organization or community the dataset is visible to.", "dct:description", || R::LangText),
    row!(2, Access, "accessService", "Access service", "Access service specification.", "dcat:accessService", || R::DataService),
    row!(2, Ownership, "rightsHolder", "Owner", "Owner of the dataset.", "dct:rightsHolder", || R::Agent),
    row!(2, Ownership, "contactPoint", "Contact point", "Contact point for the dataset.", "dcat:contactPoint", || R::Agent),
    row!(2, Ownership, "publisher", "Publisher", "Entity responsible for making the dataset available.", "dct:publisher", || R::Agent, true),
    row!(2, Ownership, "creator", "Creator", "Entity primarily responsible for producing the dataset.", "dct:creator", || R::Agent, true),
    // Level 3
    row!(3, Content, "landingPage", "Documentation", "Documentation page for the dataset.", "dcat:landingPage", || R::Document),
    row!(3, Content, "language", "Language", "Language of the dataset.", "dct:language", || R::LinguisticSystem),
    row!(3, Content, "hasRDA_F1_01D", "Persistent identifier", "Data is identified by a persistent identifier.", "fair:hasRDA_F1_01D", || R::Boolean),
    row!(3, Content, "hasRDA_F1_02D", "Globally unique identifier", "Data is identified by a globally unique identifier.", "fair:hasRDA_F1_02D", || R::Boolean),
    row!(3, Access, "format", "Format", "Format (file type if relevant).", "dct:format", || R::MediaType),
    row!(3, Access, "downloadURL", "Download URL", "URL for a downloadable file.", "dcat:downloadURL", || R::ResourceIri),
    row!(3, Provenance, "versionInfo", "Version", "Version of the dataset.", "owl:versionInfo", || R::PlainText, true),
    row!(3, Provenance, "versionNotes", "Version notes", "Version notes.", "adms:versionNotes", || R::LangText),
    row!(3, Provenance, "isVersionOf", "Is version of", "Link to the dataset this one is a version of.", "dct:isVersionOf", || R::DatasetRef),
    row!(3, Provenance, "hasVersion", "Has version", "Link to datasets that are versions of this one.", "dct:hasVersion", || R::DatasetRef),
    row!(3, Provenance, "provenance", "Provenance", "Provenance of the data.", "dct:provenance", || R::ProvenanceStatement),
    row!(3, Provenance, "wasQuotedFrom", "Provenance document", "Provenance document location.", "prov:wasQuotedFrom", || R::ProvEntity),
    row!(3, TemporalGeospatial, "temporalResolution", "Temporal resolution", "Temporal resolution.", "dcat:temporalResolution", || R::Duration),
    row!(3, TemporalGeospatial, "spatialResolutionInMeters", "Spatial resolution (m)", "Spatial resolution in meters.", "dcat:spatialResolutionInMeters", || R::Decimal),
    row!(3, TemporalGeospatial, "spatialResolutionInRegion", "Spatial resolution (region)", "Spatial resolution in geographical regions.", "cuadr:spatialResolutionInRegion", || R::AdministrativeArea),
    // Level 4
    row!(4, Content, "containsIndividualData", "Individual data", "Contains data about individuals.", "cuadr:containsIndividualData", || R::Boolean),
    row!(4, Content, "containsIdentifiableIndividualData", "Identifiable individual data", "Contains data about identifiable individuals.", "cuadr:containsIdentifiableIndividualData", || R::Boolean),
    row!(4, Content, "containsIndigenousData", "Indigenous data", "Contains Indigenous data.", "cuadr:containsIndigenousData", || R::Boolean),
    row!(4, Access, "hasPolicy", "Limits on use", "Limits on use beyond the license (e.g. academic purposes).", "odrl:hasPolicy", || R::Policy),
    row!(4, Ownership, "indigenousRightsHolder", "Indigenous rights holder", "Indigenous community permission (who gave permission).", "cuadr:indigenousRightsHolder", || R::Agent, false, Some("dct:rightsHolder")),
    row!(4, TemporalGeospatial, "spatialIndigenousCommunity", "Indigenous communities", "Indigenous communities from which data is derived.", "cuadr:spatialIndigenousCommunity", || R::Location, false, Some("dct:spatial")),
    // Level 5
    row!(5, Content, "hasRDA_R1_3_01D", "Community standard", "Data complies with a community standard.", "fair:hasRDA_R1_3_01D", || R::Boolean),
    row!(5, Content, "hasRDA_I1_01D", "Standardised representation", "Data uses knowledge representation expressed in standardised format.", "fair:hasRDA_I1_01D", || R::Boolean),
    row!(5, Content, "hasRDA_I1_02D", "Machine-understandable representation", "Data uses machine-understandable knowledge representation.", "fair:hasRDA_I1_02D", || R::Boolean),
    row!(5, Content, "hasRDA_I2_01D", "FAIR vocabularies", "Data uses FAIR-compliant vocabularies.", "fair:hasRDA_I2_01D", || R::Boolean),
    row!(5, Content, "hasRDA_I3_01D", "References to other data", "Data includes references to other data.", "fair:hasRDA_I3_01D", || R::Boolean),
    row!(5, Access, "hasRDA_A1_2_01D", "Authenticated protocol", "Data is accessible through an access protocol that supports authentication and authorisation.", "fair:hasRDA_A1_2_01D", || R::Boolean),
    row!(5, Access, "hasRDA_A1_02D", "Manual access", "Data can be accessed manually (i.e. with human intervention).", "fair:hasRDA_A1_02D", || R::Boolean),
    row!(5, Access, "hasRDA_A1_03D", "Resolvable identifier", "Data identifier resolves to a digital object.", "fair:hasRDA_A1_03D", || R::Boolean),
    row!(5, Access, "hasRDA_A1_04D", "Standardised protocol", "Data is accessible through standardised protocol.", "fair:hasRDA_A1_04D", || R::Boolean),
    row!(5, Access, "hasRDA_A1_05D", "Automatic access", "Data can be accessed automatically (i.e. by a computer program).", "fair:hasRDA_A1_05D", || R::Boolean),
    row!(5, Access, "hasRDA_A1_1_01D", "Free access protocol", "Data is accessible through a free access protocol.", "fair:hasRDA_A1_1_01D", || R::Boolean),
    // Level 6
    row!(6, Statistical, "rows", "Rows", "If tabular dataset, number of rows.", "void:rows", || R::PositiveInteger),
    row!(6, Statistical, "columns", "Columns", "If tabular dataset, number of columns.", "void:columns", || R::PositiveInteger),
    row!(6, Statistical, "cells", "Cells", "If tabular dataset, the number of filled-in data cells.", "void:cells", || R::PositiveInteger),
    row!(6, Statistical, "triples", "Triples", "If RDF dataset, total number of triples.", "void:triples", || R::PositiveInteger),
    row!(6, Statistical, "classes", "Classes", "If RDF dataset, total number of entities in the dataset.", "void:classes", || R::PositiveInteger),
    row!(6, Statistical, "properties", "Properties", "If RDF dataset, total number of properties in the dataset.", "void:properties", || R::PositiveInteger),
    row!(6, Quality, "hasQualityAnnotation", "Quality annotation", "Description of data quality.", "dqv:hasQualityAnnotation", || R::QualityAnnotation),
    row!(6, Quality, "inDimension", "Quality dimension", "Metrics for data quality, like completeness or accuracy.", "dqv:inDimension", || R::QualityDimension),
];

/// The model's prefix table.
pub fn builtin_prefixes() -> PrefixMap {
    let mut p = PrefixMap::new();
    for (name, ns) in PREFIXES {
        p.insert(name, ns).expect("built-in prefix table is valid");
    }
    p
}

pub(super) fn builtin_spec(key: &str) -> Option<PropertySpec> {
    ROWS.iter().find(|r| r.key == key).map(spec_of)
}

fn spec_of(r: &Row) -> PropertySpec {
    PropertySpec {
        key: r.key.to_string(),
        label: r.label.to_string(),
        description: r.description.to_string(),
        curie: r.curie.to_string(),
        category: r.category,
        level: r.level,
        range: (r.range)(),
        max_cardinality: if r.single { Cardinality::One } else { Cardinality::Unbounded },
        sub_property_of: r.sub_property_of.map(str::to_string),
    }
}

/// The full six-level, 57-property model.
pub fn builtin_model() -> MaturityModel {
    static MODEL: OnceLock<MaturityModel> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            let levels = LEVEL_TITLES
                .iter()
                .enumerate()
                .map(|(i, (title, name))| MaturityLevel {
                    number: i as u8 + 1,
                    title: title.to_string(),
                    name: name.to_string(),
                    fields: ROWS.iter().filter(|r| r.level as usize == i + 1).map(|r| r.key.to_string()).collect(),
                })
                .collect();
            MaturityModel::new(builtin_prefixes(), levels, ROWS.iter().map(spec_of).collect())
                .expect("built-in model is consistent")
        })
        .clone()
}
