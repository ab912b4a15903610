//! Completion fractions per entry and descriptive statistics per corpus.
//!
//! A field counts as filled when it holds at least one value that is
//! non-blank after trimming; booleans count whenever they are set, false
//! included. Corpus means and population standard deviations are computed
//! exactly over rationals and only converted to floating point at the end.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{builtin_model, Category, MaturityModel, PropertySpec};
use crate::record::{CatalogueEntry, Modality};

pub const TABULAR_STAT_FIELDS: [&str; 3] = ["rows", "columns", "cells"];
pub const RDF_STAT_FIELDS: [&str; 3] = ["triples", "classes", "properties"];
pub const INDIGENOUS_LEVEL4_FIELDS: [&str; 3] = ["containsIndigenousData", "indigenousRightsHolder", "spatialIndigenousCommunity"];

/// `filled` out of `total` fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Fraction {
    pub filled: u32,
    pub total: u32,
}

impl Fraction {
    pub fn new(filled: u32, total: u32) -> Self {
        assert!(total >= 1 && filled <= total, "fraction {filled}/{total} out of range");
        Self { filled, total }
    }

    pub fn value(&self) -> Ratio<u32> {
        Ratio::new(self.filled, self.total)
    }

    pub fn percent(&self) -> f64 {
        100.0 * self.filled as f64 / self.total as f64
    }

    /// Percentage rounded half-up to a whole number.
    pub fn display_percent(&self) -> u32 {
        (self.filled * 200 + self.total) / (2 * self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletionReport {
    pub entry_id: String,
    pub per_level: BTreeMap<u8, Fraction>,
    pub per_category: BTreeMap<Category, Fraction>,
    pub overall: Fraction,
    /// Keys of the filled fields that entered the denominators, in model order.
    pub filled_fields: Vec<String>,
}

fn excluded_by_modality(spec: &PropertySpec, modality: Modality) -> bool {
    if spec.category != Category::Statistical {
        return false;
    }
    match modality {
        Modality::Tabular => RDF_STAT_FIELDS.contains(&spec.key.as_str()),
        Modality::Rdf => TABULAR_STAT_FIELDS.contains(&spec.key.as_str()),
        Modality::Both | Modality::Unspecified => false,
    }
}

/// Completion of one entry. With `modality_aware`, the statistical fields of
/// the modality the entry does not declare leave the denominators.
pub fn completion(model: &MaturityModel, entry: &CatalogueEntry, modality_aware: bool) -> CompletionReport {
    let mut levels: BTreeMap<u8, (u32, u32)> = BTreeMap::new();
    let mut cats: BTreeMap<Category, (u32, u32)> = BTreeMap::new();
    let mut filled_fields = Vec::new();
    for spec in model.properties() {
        if modality_aware && excluded_by_modality(spec, entry.modality) {
            continue;
        }
        let filled = entry.is_filled(&spec.key) as u32;
        if filled == 1 {
            filled_fields.push(spec.key.clone());
        }
        for slot in [levels.entry(spec.level).or_default(), cats.entry(spec.category).or_default()] {
            slot.0 += filled;
            slot.1 += 1;
        }
    }
    let filled: u32 = levels.values().map(|(f, _)| f).sum();
    let total: u32 = levels.values().map(|(_, t)| t).sum();
    CompletionReport {
        entry_id: entry.id.clone(),
        per_level: levels.into_iter().map(|(k, (f, t))| (k, Fraction::new(f, t))).collect(),
        per_category: cats.into_iter().map(|(k, (f, t))| (k, Fraction::new(f, t))).collect(),
        overall: Fraction::new(filled, total.max(1)),
        filled_fields,
    }
}

/// Mean (percent) and population standard deviation (percentage points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScopeStat {
    pub mean_pct: f64,
    pub std_pp: f64,
    pub n: usize,
}

/// Exact accumulator for fractions: per denominator, sum of numerators and
/// of their squares.
#[derive(Default)]
struct Moments {
    by_total: BTreeMap<u32, (u64, u64)>,
    n: usize,
}

impl Moments {
    fn push(&mut self, f: Fraction) {
        let slot = self.by_total.entry(f.total).or_default();
        slot.0 += f.filled as u64;
        slot.1 += (f.filled as u64).pow(2);
        self.n += 1;
    }

    fn stat(&self) -> ScopeStat {
        let n = BigInt::from(self.n);
        let mut sum = BigRational::zero();
        let mut sum_sq = BigRational::zero();
        for (&t, &(s, s2)) in &self.by_total {
            sum += BigRational::new(BigInt::from(s), BigInt::from(t));
            sum_sq += BigRational::new(BigInt::from(s2), BigInt::from(t) * BigInt::from(t));
        }
        let mean = sum / n.clone();
        let var = sum_sq / n - mean.clone() * mean.clone();
        let hundred = BigRational::from_integer(BigInt::from(100));
        ScopeStat {
            mean_pct: (mean * hundred).to_f64().unwrap_or(f64::NAN),
            std_pp: 100.0 * var.to_f64().unwrap_or(0.0).max(0.0).sqrt(),
            n: self.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub n: usize,
    pub per_level: BTreeMap<u8, ScopeStat>,
    pub per_category: BTreeMap<Category, ScopeStat>,
}

/// Mean and population standard deviation of every level and category
/// percentage across `reports`.
pub fn corpus_report(reports: &[CompletionReport]) -> Result<CorpusReport> {
    if reports.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut levels: BTreeMap<u8, Moments> = BTreeMap::new();
    let mut cats: BTreeMap<Category, Moments> = BTreeMap::new();
    for r in reports {
        for (&l, &f) in &r.per_level {
            levels.entry(l).or_default().push(f);
        }
        for (&c, &f) in &r.per_category {
            cats.entry(c).or_default().push(f);
        }
    }
    Ok(CorpusReport {
        n: reports.len(),
        per_level: levels.into_iter().map(|(k, m)| (k, m.stat())).collect(),
        per_category: cats.into_iter().map(|(k, m)| (k, m.stat())).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level4Split {
    pub indigenous: ScopeStat,
    pub non_indigenous: ScopeStat,
}

/// Fill rates of the Indigenous Level-4 fields against the other Level-4
/// fields, from reports computed against the built-in model.
pub fn split_level4_stats(reports: &[CompletionReport]) -> Result<Level4Split> {
    if reports.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let model = builtin_model();
    let other: Vec<&str> = model
        .properties_by(Some(4), None)?
        .into_iter()
        .map(|p| p.key.as_str())
        .filter(|k| !INDIGENOUS_LEVEL4_FIELDS.contains(k))
        .collect();
    let mut ind = Moments::default();
    let mut non = Moments::default();
    for r in reports {
        let count = |keys: &[&str]| r.filled_fields.iter().filter(|f| keys.contains(&f.as_str())).count() as u32;
        ind.push(Fraction::new(count(&INDIGENOUS_LEVEL4_FIELDS), INDIGENOUS_LEVEL4_FIELDS.len() as u32));
        non.push(Fraction::new(count(&other), other.len() as u32));
    }
    Ok(Level4Split {
        indigenous: ind.stat(),
        non_indigenous: non.stat(),
    })
}

/// `(indigenous, non-Indigenous)` mean fill rates in percent.
pub fn split_level4(reports: &[CompletionReport]) -> Result<(f64, f64)> {
    let s = split_level4_stats(reports)?;
    Ok((s.indigenous.mean_pct, s.non_indigenous.mean_pct))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportScope {
    Level,
    Category,
}

pub const CSV_HEADER: &str = "scope,name,mean_pct,std_pp,n";

/// CSV rendering: one row per level or category, then the Level-4 split rows
/// when given.
pub fn report_csv(report: &CorpusReport, scope: ReportScope, split: Option<&Level4Split>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut row = |scope: &str, name: &str, s: &ScopeStat| {
        let _ = writeln!(out, "{scope},{name},{:.3},{:.3},{}", s.mean_pct, s.std_pp, s.n);
    };
    match scope {
        ReportScope::Level => report.per_level.iter().for_each(|(l, s)| row("level", &l.to_string(), s)),
        ReportScope::Category => report.per_category.iter().for_each(|(c, s)| row("category", c.label(), s)),
    }
    if let Some(sp) = split {
        row("level4_split", "indigenous", &sp.indigenous);
        row("level4_split", "non_indigenous", &sp.non_indigenous);
    }
    out
}

#[derive(Serialize)]
struct JsonRow<'a> {
    name: String,
    #[serde(flatten)]
    stat: &'a ScopeStat,
}

/// JSON rendering with the same content as [`report_csv`].
pub fn report_json(report: &CorpusReport, scope: ReportScope, split: Option<&Level4Split>) -> serde_json::Value {
    let rows: Vec<JsonRow<'_>> = match scope {
        ReportScope::Level => report.per_level.iter().map(|(l, s)| JsonRow { name: l.to_string(), stat: s }).collect(),
        ReportScope::Category => report.per_category.iter().map(|(c, s)| JsonRow { name: c.label().to_string(), stat: s }).collect(),
    };
    let mut v = serde_json::json!({
        "n": report.n,
        "scope": match scope { ReportScope::Level => "level", ReportScope::Category => "category" },
        "rows": rows,
    });
    if let Some(sp) = split {
        v["level4_split"] = serde_json::json!({ "indigenous": sp.indigenous, "non_indigenous": sp.non_indigenous });
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{parse_entry, Value};

    fn entry(fields: &str) -> CatalogueEntry {
        parse_entry(&format!(r#"{{"id":"e","fields":{{{fields}}}}}"#), &builtin_model()).unwrap()
    }

    #[test]
    fn level_one_complete() {
        let m = builtin_model();
        let e = entry(r#""theme":["T"],"title":["t"],"description":["d"],"keyword":["k"],"issued":["2024-01-01"],"temporal":["2020-01-01/2021-01-01"],"spatial":["Ontario"]"#);
        let r = completion(&m, &e, false);
        assert_eq!(r.per_level[&1], Fraction::new(7, 7));
        assert_eq!(r.per_level[&1].value(), Ratio::from_integer(1));
        assert_eq!(r.overall, Fraction::new(7, 57));
    }

    #[test]
    fn empty_entry_scores_zero() {
        let m = builtin_model();
        let r = completion(&m, &entry(""), false);
        assert!(r.per_level.values().chain(r.per_category.values()).all(|f| f.filled == 0));
        assert_eq!(r.overall.total, 57);
    }

    #[test]
    fn false_counts_as_filled() {
        let r = completion(&builtin_model(), &entry(r#""containsIndigenousData":["false"]"#), false);
        assert_eq!(r.per_level[&4], Fraction::new(1, 6));
    }

    #[test]
    fn blank_text_is_not_filled() {
        let r = completion(&builtin_model(), &entry(r#""title":["  "]"#), false);
        assert_eq!(r.per_level[&1].filled, 0);
    }

    #[test]
    fn partition_sums_agree() {
        let r = completion(&builtin_model(), &entry(r#""title":["a"],"rows":["3"],"hasPolicy":["p"]"#), false);
        let by_level: u32 = r.per_level.values().map(|f| f.filled).sum();
        let by_cat: u32 = r.per_category.values().map(|f| f.filled).sum();
        assert_eq!((by_level, by_cat, r.overall.filled), (3, 3, 3));
    }

    #[test]
    fn modality_drops_other_block() {
        let m = builtin_model();
        let mut e = entry(r#""rows":["3"],"columns":["4"]"#);
        e.modality = Modality::Tabular;
        let aware = completion(&m, &e, true);
        assert_eq!(aware.per_level[&6], Fraction::new(2, 5));
        assert_eq!(aware.per_category[&Category::Statistical], Fraction::new(2, 3));
        assert_eq!(completion(&m, &e, false).per_level[&6], Fraction::new(2, 8));
        e.modality = Modality::Both;
        assert_eq!(completion(&m, &e, true).per_level[&6], Fraction::new(2, 8));
    }

    #[test]
    fn display_rounding() {
        assert_eq!(Fraction::new(5, 12).display_percent(), 42);
        assert_eq!(Fraction::new(8, 11).display_percent(), 73);
        assert_eq!(Fraction::new(1, 8).display_percent(), 13);
        assert_eq!(Fraction::new(1, 2).display_percent(), 50);
    }

    #[test]
    fn corpus_examples() {
        let m = builtin_model();
        let full = entry(r#""theme":["T"],"title":["t"],"description":["d"],"keyword":["k"],"issued":["2024-01-01"],"temporal":["2020-01-01/2021-01-01"],"spatial":["Ontario"]"#);
        let one = corpus_report(&[completion(&m, &full, false)]).unwrap();
        assert_eq!(one.per_level[&1].mean_pct, 100.0);
        assert!(one.per_level.values().chain(one.per_category.values()).all(|s| s.std_pp == 0.0));

        let two = corpus_report(&[completion(&m, &full, false), completion(&m, &entry(""), false)]).unwrap();
        assert_eq!(two.per_level[&1].mean_pct, 50.0);
        assert_eq!(two.per_level[&1].std_pp, 50.0);
        assert_eq!(corpus_report(&[]), Err(Error::EmptyCorpus));
    }

    #[test]
    fn split_examples() {
        let m = builtin_model();
        let non = entry(r#""containsIndividualData":["true"],"containsIdentifiableIndividualData":["false"],"hasPolicy":["academic only"]"#);
        let r = completion(&m, &non, false);
        assert_eq!(split_level4(&[r.clone(), r]).unwrap(), (0.0, 100.0));
        let mut all = non.clone();
        all.push("containsIndigenousData", Value::Bool(false));
        all.push("indigenousRightsHolder", Value::text("Band council"));
        all.push("spatialIndigenousCommunity", Value::text("Treaty 6"));
        assert_eq!(split_level4(&[completion(&m, &all, false)]).unwrap(), (100.0, 100.0));
        assert_eq!(split_level4(&[]), Err(Error::EmptyCorpus));
    }

    #[test]
    fn csv_layout() {
        let m = builtin_model();
        let rep = corpus_report(&[completion(&m, &entry(r#""title":["t"]"#), false)]).unwrap();
        let csv = report_csv(&rep, ReportScope::Level, None);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "level,1,14.286,0.000,1");
        assert_eq!(lines.len(), 7);
        let csv = report_csv(&rep, ReportScope::Category, None);
        assert!(csv.contains("\ncategory,TemporalGeospatial,0.000,0.000,1\n"));
    }
}
