//! Deterministic synthetic corpora with prescribed per-field fill rates.
//!
//! Rates are fitted to level and category targets by iterative proportional
//! fitting over the free fields, with levels projected last so level means
//! come out exact. Fill counts are integerized per level by largest
//! remainder and spread over entries by a fixed per-field offset.

use std::collections::BTreeMap;

use crate::model::{builtin_model, Category, MaturityModel, PropertySpec, ValueRange};
use crate::record::{Agent, CatalogueEntry, Location, Period, Value};

pub const LEVEL_TARGETS: [(u8, f64); 6] = [(1, 92.0), (2, 61.0), (3, 48.0), (4, 46.0), (5, 83.0), (6, 13.0)];

pub const CATEGORY_TARGETS: [(Category, f64); 7] = [
    (Category::Content, 80.0),
    (Category::Access, 80.0),
    (Category::Ownership, 45.0),
    (Category::Provenance, 18.0),
    (Category::TemporalGeospatial, 58.0),
    (Category::Statistical, 10.0),
    (Category::Quality, 24.0),
];

pub const INDIGENOUS_RATE: f64 = 9.0;
pub const NON_INDIGENOUS_RATE: f64 = 83.0;

/// Fixed Level-4 rates: the Indigenous fields at 9%, the others at 83%.
pub fn level4_rates() -> BTreeMap<String, f64> {
    let m = builtin_model();
    m.properties_by(Some(4), None)
        .expect("level 4 exists")
        .into_iter()
        .map(|p| {
            let r = if crate::scoring::INDIGENOUS_LEVEL4_FIELDS.contains(&p.key.as_str()) { INDIGENOUS_RATE } else { NON_INDIGENOUS_RATE };
            (p.key.clone(), r)
        })
        .collect()
}

/// Scales the free fields in `keys` so their rates plus the fixed ones sum
/// to `target_mean` over the whole group, respecting the 0–100 bounds.
fn fit_group(rates: &mut BTreeMap<String, f64>, keys: &[&str], fixed: &BTreeMap<String, f64>, target_mean: f64) {
    let target = target_mean * keys.len() as f64 - keys.iter().filter_map(|k| fixed.get(*k)).sum::<f64>();
    let free: Vec<&str> = keys.iter().copied().filter(|k| !fixed.contains_key(*k)).collect();
    for _ in 0..16 {
        let capped: Vec<&str> = free.iter().copied().filter(|k| rates[*k] >= 100.0).collect();
        let open: Vec<&str> = free.iter().copied().filter(|k| rates[*k] < 100.0).collect();
        let open_sum: f64 = open.iter().map(|k| rates[*k]).sum();
        let want = target - 100.0 * capped.len() as f64;
        if open.is_empty() || open_sum <= 0.0 || (open_sum - want).abs() < 1e-12 {
            return;
        }
        let s = want.max(0.0) / open_sum;
        for k in open {
            let r = rates.get_mut(k).unwrap();
            *r = (*r * s).clamp(0.0, 100.0);
        }
    }
}

/// Category targets made consistent with the level targets: levels and
/// categories that share fields form blocks, and within each block every
/// category target moves by the same amount until both sides carry the
/// same total fill.
pub fn reconcile_categories(model: &MaturityModel, levels: &[(u8, f64)], categories: &[(Category, f64)]) -> Vec<(Category, f64)> {
    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    fn find(p: &mut BTreeMap<String, String>, x: &str) -> String {
        let up = p.entry(x.to_string()).or_insert_with(|| x.to_string()).clone();
        if up == x {
            return up;
        }
        let root = find(p, &up);
        p.insert(x.to_string(), root.clone());
        root
    }
    for p in model.properties() {
        let (a, b) = (find(&mut parent, &format!("L{}", p.level)), find(&mut parent, &format!("C{}", p.category)));
        parent.insert(a, b);
    }
    let size = |pred: &dyn Fn(&PropertySpec) -> bool| model.properties().filter(|p| pred(p)).count() as f64;
    let mut level_mass: BTreeMap<String, f64> = BTreeMap::new();
    for &(l, t) in levels {
        *level_mass.entry(find(&mut parent, &format!("L{l}"))).or_default() += t * size(&|p| p.level == l);
    }
    let mut cat_mass: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for &(c, t) in categories {
        let n = size(&|p| p.category == c);
        let slot = cat_mass.entry(find(&mut parent, &format!("C{c}"))).or_default();
        slot.0 += t * n;
        slot.1 += n;
    }
    categories
        .iter()
        .map(|&(c, t)| {
            let block = find(&mut parent, &format!("C{c}"));
            let (mass, n) = cat_mass[&block];
            let shift = level_mass.get(&block).map_or(0.0, |lm| (lm - mass) / n);
            (c, t + shift)
        })
        .collect()
}

/// Per-field fill rates (percent) approaching the level and category
/// targets; level means are met exactly when reachable.
pub fn fit_rates(
    model: &MaturityModel,
    levels: &[(u8, f64)],
    categories: &[(Category, f64)],
    fixed: &BTreeMap<String, f64>,
) -> BTreeMap<String, f64> {
    let mut rates: BTreeMap<String, f64> = model
        .properties()
        .map(|p| (p.key.clone(), fixed.get(&p.key).copied().unwrap_or(50.0)))
        .collect();
    let keys_of = |pred: &dyn Fn(&PropertySpec) -> bool| -> Vec<&str> { model.properties().filter(|p| pred(p)).map(|p| p.key.as_str()).collect() };
    let level_keys: Vec<(Vec<&str>, f64)> = levels.iter().map(|&(l, t)| (keys_of(&|p| p.level == l), t)).collect();
    let cat_keys: Vec<(Vec<&str>, f64)> = categories.iter().map(|&(c, t)| (keys_of(&|p| p.category == c), t)).collect();
    for _ in 0..500 {
        for (k, t) in &cat_keys {
            fit_group(&mut rates, k, fixed, *t);
        }
        for (k, t) in &level_keys {
            fit_group(&mut rates, k, fixed, *t);
        }
    }
    rates
}

/// Number of entries (out of `n`) filling each field. Within each level the
/// counts sum to the level target exactly (rounded to whole fills).
pub fn fill_counts(model: &MaturityModel, rates: &BTreeMap<String, f64>, levels: &[(u8, f64)], n: usize) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for &(l, target) in levels {
        let keys: Vec<&str> = model.properties().filter(|p| p.level == l).map(|p| p.key.as_str()).collect();
        let total = (target / 100.0 * n as f64 * keys.len() as f64).round() as usize;
        let exact: Vec<f64> = keys.iter().map(|k| rates[*k] / 100.0 * n as f64).collect();
        let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
        let mut missing = total.saturating_sub(counts.iter().sum());
        for &i in order.iter().cycle().take(keys.len() * 4) {
            if missing == 0 {
                break;
            }
            if counts[i] < n {
                counts[i] += 1;
                missing -= 1;
            }
        }
        for (k, c) in keys.into_iter().zip(counts) {
            out.insert(k.to_string(), c);
        }
    }
    out
}

/// A valid value for `spec`, varied by `i`.
pub fn sample_value(spec: &PropertySpec, i: usize) -> Value {
    const THEMES: [&str; 4] = ["Transportation", "Housing", "Bylaws", "Culture and Tourism"];
    use ValueRange as R;
    match &spec.range {
        R::PlainText => Value::text(format!("{}-{i}", spec.key)),
        R::LangText => Value::text(format!("{} {}", spec.label, i % 97)),
        R::Boolean => Value::Bool(!i.is_multiple_of(3)),
        R::Date | R::DateTime => Value::Date(format!("20{:02}-{:02}-{:02}", 10 + i % 15, 1 + i % 12, 1 + i % 28)),
        R::Decimal => Value::Decimal(format!("{}.5", 1 + i % 500)),
        R::Duration => Value::Duration(["P1D", "PT1H", "P1M", "P1Y"][i % 4].into()),
        R::PositiveInteger => Value::PosInt(1 + (i as u64 * 37) % 100_000),
        R::ResourceIri | R::Document | R::DatasetRef => Value::Iri(format!("http://example.org/{}/{i}", spec.key)),
        R::Concept => Value::text(THEMES[i % THEMES.len()]),
        R::Agent => Value::Agent(Agent {
            name: format!("Agent {}", i % 53),
            email: i.is_multiple_of(2).then(|| format!("agent{}@example.org", i % 53)),
            indigenous: spec.key == "indigenousRightsHolder",
        }),
        R::Location | R::AdministrativeArea => Value::Location(Location {
            label: ["Toronto", "Ottawa", "Vancouver", "Montreal"][i % 4].into(),
            region_code: None,
        }),
        R::PeriodOfTime => Value::Period(Period {
            start: Some(format!("20{:02}-01-01", 10 + i % 10)),
            end: Some(format!("20{:02}-12-31", 20 + i % 5)),
        }),
        R::Enumerated(tokens) => Value::Token(tokens[i % tokens.len()].clone()),
        R::MediaType => Value::text(["CSV", "JSON", "PDF", "XLSX", "GeoJSON"][i % 5]),
        R::LinguisticSystem => Value::text(["en", "fr"][i % 2]),
        _ => Value::text(format!("{} {}", spec.label, i % 11)),
    }
}

/// `n` entries in which each field is filled by exactly `counts[key]`
/// entries, laid out as a contiguous run (mod `n`) from a per-field offset.
pub fn corpus(model: &MaturityModel, counts: &BTreeMap<String, usize>, n: usize) -> Vec<CatalogueEntry> {
    let width = n.to_string().len().max(4);
    let mut entries: Vec<CatalogueEntry> = (0..n)
        .map(|i| CatalogueEntry::new(format!("synth-{i:0width$}")).expect("synthetic ids are slugs"))
        .collect();
    for (fi, spec) in model.properties().enumerate() {
        let count = counts.get(&spec.key).copied().unwrap_or(0).min(n);
        let offset = (fi * 7919) % n.max(1);
        for k in 0..count {
            let i = (offset + k) % n;
            entries[i].push(&spec.key, sample_value(spec, i));
        }
    }
    entries
}

/// Corpus of `n` entries whose level means and Level-4 split follow the
/// evaluation targets.
pub fn evaluation_corpus(n: usize) -> Vec<CatalogueEntry> {
    let m = builtin_model();
    let cats = reconcile_categories(&m, &LEVEL_TARGETS, &CATEGORY_TARGETS);
    let rates = fit_rates(&m, &LEVEL_TARGETS, &cats, &level4_rates());
    corpus(&m, &fill_counts(&m, &rates, &LEVEL_TARGETS, n), n)
}
