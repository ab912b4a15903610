//! FAIR indicator tiers and DCAT-AP conformance over built-in model entries.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::record::{CatalogueEntry, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Essential,
    Important,
    Useful,
    Unspecified,
}

impl Tier {
    pub const ALL: [Tier; 4] = [Tier::Essential, Tier::Important, Tier::Useful, Tier::Unspecified];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FairIndicator {
    pub rda_id: &'static str,
    pub field_key: &'static str,
    pub facet: char,
    pub tier: Tier,
}

const fn ind(rda_id: &'static str, field_key: &'static str, facet: char, tier: Tier) -> FairIndicator {
    FairIndicator { rda_id, field_key, facet, tier }
}

pub const FAIR_INDICATORS: [FairIndicator; 13] = [
    ind("RDA-A1-02D", "hasRDA_A1_02D", 'A', Tier::Essential),
    ind("RDA-A1-03D", "hasRDA_A1_03D", 'A', Tier::Essential),
    ind("RDA-A1-04D", "hasRDA_A1_04D", 'A', Tier::Essential),
    ind("RDA-R1.3-01D", "hasRDA_R1_3_01D", 'R', Tier::Essential),
    ind("RDA-A1-05D", "hasRDA_A1_05D", 'A', Tier::Important),
    ind("RDA-A1.1-01D", "hasRDA_A1_1_01D", 'A', Tier::Important),
    ind("RDA-I1-01D", "hasRDA_I1_01D", 'I', Tier::Important),
    ind("RDA-I1-02D", "hasRDA_I1_02D", 'I', Tier::Important),
    ind("RDA-A1.2-01D", "hasRDA_A1_2_01D", 'A', Tier::Useful),
    ind("RDA-I2-01D", "hasRDA_I2_01D", 'I', Tier::Useful),
    ind("RDA-I3-01D", "hasRDA_I3_01D", 'I', Tier::Useful),
    ind("RDA-F1-01D", "hasRDA_F1_01D", 'F', Tier::Unspecified),
    ind("RDA-F1-02D", "hasRDA_F1_02D", 'F', Tier::Unspecified),
];

/// Tiered indicators that have no field in the model.
pub const NOT_MODELED: &str = "metadata-level (M) indicators, RDA-R1.3-02D and RDA-I3-02D are not modeled";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Count {
    pub n: u32,
    pub of: u32,
}

impl Count {
    pub fn coverage(&self) -> f64 {
        if self.of == 0 {
            0.0
        } else {
            self.n as f64 / self.of as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairReport {
    #[serde(skip)]
    pub asserted_true: BTreeSet<&'static str>,
    pub essential: Count,
    pub important: Count,
    pub useful: Count,
    pub unspecified: Count,
}

impl FairReport {
    pub fn count(&self, tier: Tier) -> Count {
        match tier {
            Tier::Essential => self.essential,
            Tier::Important => self.important,
            Tier::Useful => self.useful,
            Tier::Unspecified => self.unspecified,
        }
    }
}

fn asserted(entry: &CatalogueEntry, key: &str) -> bool {
    entry.values(key).iter().any(|v| matches!(v, Value::Bool(true)))
}

pub fn fair_report(entry: &CatalogueEntry) -> FairReport {
    let mut asserted_true = BTreeSet::new();
    let mut counts = [Count { n: 0, of: 0 }; 4];
    for i in FAIR_INDICATORS {
        let c = &mut counts[i.tier as usize];
        c.of += 1;
        if asserted(entry, i.field_key) {
            c.n += 1;
            asserted_true.insert(i.rda_id);
        }
    }
    FairReport {
        asserted_true,
        essential: counts[0],
        important: counts[1],
        useful: counts[2],
        unspecified: counts[3],
    }
}

pub const DCAT_MANDATORY: [&str; 2] = ["title", "description"];
pub const DCAT_RECOMMENDED: [&str; 7] = ["contactPoint", "keyword", "publisher", "spatial", "temporal", "theme", "distribution"];
pub const DCAT_OPTIONAL: [&str; 15] = [
    "accessCategory",
    "creator",
    "hasVersion",
    "identifier",
    "isVersionOf",
    "landingPage",
    "language",
    "issued",
    "provenance",
    "spatialResolutionInMeters",
    "temporalResolution",
    "versionInfo",
    "versionNotes",
    "license",
    "format",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DcatApReport {
    pub mandatory: bool,
    pub missing: Vec<String>,
    pub recommended: Count,
    pub optional: Count,
}

fn dcat_present(entry: &CatalogueEntry, key: &str) -> bool {
    match key {
        "distribution" => !entry.resources.is_empty(),
        "format" => {
            entry.is_filled("format")
                || entry.resources.iter().any(|r| r.format.as_deref().is_some_and(|f| !f.trim().is_empty()))
        }
        _ => entry.is_filled(key),
    }
}

fn tally(entry: &CatalogueEntry, keys: &[&str]) -> Count {
    Count {
        n: keys.iter().filter(|k| dcat_present(entry, k)).count() as u32,
        of: keys.len() as u32,
    }
}

pub fn dcat_ap_report(entry: &CatalogueEntry) -> DcatApReport {
    let missing: Vec<String> = DCAT_MANDATORY.iter().filter(|k| !entry.is_filled(k)).map(|k| k.to_string()).collect();
    DcatApReport {
        mandatory: missing.is_empty(),
        missing,
        recommended: tally(entry, &DCAT_RECOMMENDED),
        optional: tally(entry, &DCAT_OPTIONAL),
    }
}

/// Combined JSON report: `{fair:{..}, dcat_ap:{..}, not_modeled}`.
pub fn conformance_json(entry: &CatalogueEntry) -> serde_json::Value {
    serde_json::json!({
        "fair": fair_report(entry),
        "dcat_ap": dcat_ap_report(entry),
        "not_modeled": NOT_MODELED,
    })
}
