//! In-process text and facet index with BM25 ranking and result-scoped facet
//! counts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::record::{CatalogueEntry, Value};

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FacetField {
    #[serde(rename = "theme")]
    Theme,
    #[serde(rename = "tags")]
    Tags,
    #[serde(rename = "format")]
    Format,
    #[serde(rename = "organization")]
    Organization,
    #[serde(rename = "accessCategory")]
    AccessCategory,
}

impl FacetField {
    pub const ALL: [FacetField; 5] = [
        FacetField::Theme,
        FacetField::Tags,
        FacetField::Format,
        FacetField::Organization,
        FacetField::AccessCategory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FacetField::Theme => "theme",
            FacetField::Tags => "tags",
            FacetField::Format => "format",
            FacetField::Organization => "organization",
            FacetField::AccessCategory => "accessCategory",
        }
    }
}

impl fmt::Display for FacetField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FacetField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFacetField(s.to_string()))
    }
}

/// Lowercased alphanumeric runs.
pub fn tokenize(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn texts<'a>(entry: &'a CatalogueEntry, key: &str) -> impl Iterator<Item = String> + 'a {
    entry.values(key).iter().filter(|v| v.is_filled()).map(Value::display_text)
}

/// Tokens of the concatenated title, description and keywords.
pub fn doc_tokens(entry: &CatalogueEntry) -> Vec<String> {
    ["title", "description", "keyword"]
        .iter()
        .flat_map(|k| texts(entry, k))
        .flat_map(|t| tokenize(&t))
        .collect()
}

/// Verbatim facet values carried by an entry.
pub fn facet_values(entry: &CatalogueEntry, field: FacetField) -> BTreeSet<String> {
    match field {
        FacetField::Theme => texts(entry, "theme").collect(),
        FacetField::Tags => texts(entry, "keyword").collect(),
        FacetField::AccessCategory => texts(entry, "accessCategory").collect(),
        FacetField::Format => texts(entry, "format")
            .chain(entry.resources.iter().filter_map(|r| r.format.clone()).filter(|f| !f.trim().is_empty()))
            .collect(),
        FacetField::Organization => match &entry.organization {
            Some(o) if !o.trim().is_empty() => BTreeSet::from([o.clone()]),
            _ => texts(entry, "publisher").collect(),
        },
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Query {
    pub text: Option<String>,
    pub filters: Vec<(FacetField, BTreeSet<String>)>,
}

impl Query {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn text(t: impl Into<String>) -> Self {
        Self {
            text: Some(t.into()),
            filters: vec![],
        }
    }

    /// Adds a filter by field name.
    pub fn filter<I, S>(mut self, field: &str, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.filters.push((field.parse()?, values.into_iter().map(Into::into).collect()));
        Ok(self)
    }

    /// Unique query tokens in sorted order; empty means no text constraint.
    pub fn tokens(&self) -> Vec<String> {
        let set: BTreeSet<String> = self.text.as_deref().map(tokenize).unwrap_or_default().into_iter().collect();
        set.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacetCount {
    pub value: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hit {
    pub id: String,
    pub score: f64,
}

#[derive(Debug, Clone, Default)]
struct Doc {
    len: usize,
    tf: HashMap<String, u32>,
    facets: BTreeMap<FacetField, BTreeSet<String>>,
}

#[derive(Debug, Clone, Default)]
pub struct Index {
    docs: BTreeMap<String, Doc>,
    postings: HashMap<String, BTreeMap<String, u32>>,
    facets: BTreeMap<FacetField, BTreeMap<String, BTreeSet<String>>>,
    total_len: usize,
}

/// BM25 term weight for one document.
pub fn bm25_term(n_docs: usize, df: usize, tf: u32, dl: usize, avgdl: f64) -> f64 {
    let idf = ((n_docs as f64 - df as f64 + 0.5) / (df as f64 + 0.5) + 1.0).ln();
    let tf = tf as f64;
    idf * tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * dl as f64 / avgdl))
}

impl Index {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn build<'a>(entries: impl IntoIterator<Item = &'a CatalogueEntry>) -> Result<Self> {
        let mut ix = Self::new();
        for e in entries {
            ix.add(e)?;
        }
        Ok(ix)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.docs.contains_key(id)
    }

    pub fn add(&mut self, entry: &CatalogueEntry) -> Result<()> {
        if self.docs.contains_key(&entry.id) {
            return Err(Error::DuplicateId(entry.id.clone()));
        }
        let tokens = doc_tokens(entry);
        let mut doc = Doc {
            len: tokens.len(),
            ..Doc::default()
        };
        for t in tokens {
            *doc.tf.entry(t).or_default() += 1;
        }
        for (t, &n) in &doc.tf {
            self.postings.entry(t.clone()).or_default().insert(entry.id.clone(), n);
        }
        for f in FacetField::ALL {
            let vals = facet_values(entry, f);
            for v in &vals {
                self.facets.entry(f).or_default().entry(v.clone()).or_default().insert(entry.id.clone());
            }
            doc.facets.insert(f, vals);
        }
        self.total_len += doc.len;
        self.docs.insert(entry.id.clone(), doc);
        Ok(())
    }

    /// Returns whether the id was present.
    pub fn remove(&mut self, id: &str) -> bool {
        let Some(doc) = self.docs.remove(id) else {
            return false;
        };
        self.total_len -= doc.len;
        for t in doc.tf.keys() {
            if let Some(p) = self.postings.get_mut(t) {
                p.remove(id);
                if p.is_empty() {
                    self.postings.remove(t);
                }
            }
        }
        for (f, vals) in &doc.facets {
            for v in vals {
                let by_value = self.facets.get_mut(f).unwrap();
                let ids = by_value.get_mut(v).unwrap();
                ids.remove(id);
                if ids.is_empty() {
                    by_value.remove(v);
                }
            }
        }
        true
    }

    /// Replaces the entry with the same id, or adds it.
    pub fn update(&mut self, entry: &CatalogueEntry) {
        self.remove(&entry.id);
        self.add(entry).expect("id was just removed");
    }

    fn candidates(&self, q: &Query) -> BTreeSet<&str> {
        let mut out: Option<BTreeSet<&str>> = None;
        for (f, accepted) in &q.filters {
            let by_value = self.facets.get(f);
            let matched: BTreeSet<&str> = accepted
                .iter()
                .filter_map(|v| by_value.and_then(|m| m.get(v)))
                .flatten()
                .map(String::as_str)
                .collect();
            out = Some(match out {
                None => matched,
                Some(prev) => prev.intersection(&matched).copied().collect(),
            });
        }
        out.unwrap_or_else(|| self.docs.keys().map(String::as_str).collect())
    }

    /// Ranked hits: BM25 order with ties by id when the query has text,
    /// otherwise id order with zero scores.
    pub fn search(&self, q: &Query) -> Vec<Hit> {
        let cands = self.candidates(q);
        let tokens = q.tokens();
        if tokens.is_empty() {
            return cands.into_iter().map(|id| Hit { id: id.to_string(), score: 0.0 }).collect();
        }
        let n = self.docs.len();
        let avgdl = self.total_len as f64 / n.max(1) as f64;
        let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
        for t in &tokens {
            let Some(p) = self.postings.get(t) else { continue };
            for (id, &tf) in p {
                if cands.contains(id.as_str()) {
                    let w = bm25_term(n, p.len(), tf, self.docs[id].len, avgdl);
                    *scores.entry(id.as_str()).or_default() += w;
                }
            }
        }
        let mut hits: Vec<Hit> = scores.into_iter().map(|(id, score)| Hit { id: id.to_string(), score }).collect();
        hits.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
        hits
    }

    pub fn query(&self, q: &Query) -> Vec<String> {
        self.search(q).into_iter().map(|h| h.id).collect()
    }

    /// Value counts over the results of `q`, sorted by count descending then
    /// value ascending.
    pub fn facet_counts(&self, q: &Query, fields: &[FacetField]) -> BTreeMap<FacetField, Vec<FacetCount>> {
        let results = self.query(q);
        fields
            .iter()
            .map(|&f| {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for id in &results {
                    for v in &self.docs[id].facets[&f] {
                        *counts.entry(v).or_default() += 1;
                    }
                }
                let mut list: Vec<FacetCount> = counts
                    .into_iter()
                    .map(|(value, count)| FacetCount { value: value.to_string(), count })
                    .collect();
                list.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
                (f, list)
            })
            .collect()
    }

    /// Facet counts with fields given by name.
    pub fn facet_counts_by_name(&self, q: &Query, fields: &[&str]) -> Result<BTreeMap<FacetField, Vec<FacetCount>>> {
        let fields = fields.iter().map(|f| f.parse()).collect::<Result<Vec<FacetField>>>()?;
        Ok(self.facet_counts(q, &fields))
    }
}
