//! Directory-backed catalogue, sync ledger and CKAN package import.
//!
//! ```text
//! <root>/entries/<id>.json
//! <root>/ledger.json
//! <root>/catalogue.lock
//! ```
//!
//! Every file is replaced by writing a temporary sibling and renaming it over
//! the target, so readers only ever see complete files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::{Error, Result};
use crate::model::MaturityModel;
use crate::record::{coerce_str, entry_from_json, is_valid_id, Agent, CatalogueEntry, ResourceRef, Value};

pub const ENTRIES_DIR: &str = "entries";
pub const LEDGER_FILE: &str = "ledger.json";
pub const LOCK_FILE: &str = "catalogue.lock";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub entry_iri: String,
    pub last_minted: Vec<String>,
    pub last_synced_revision: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalogue {
    root: PathBuf,
    pub entries: BTreeMap<String, CatalogueEntry>,
    pub ledger: BTreeMap<String, LedgerRow>,
}

/// Exclusive write access to a catalogue directory, released on drop.
#[derive(Debug)]
pub struct CatalogueLock {
    path: PathBuf,
}

impl Drop for CatalogueLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub fn lock(root: &Path) -> Result<CatalogueLock> {
    let path = root.join(LOCK_FILE);
    match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
        Ok(mut f) => {
            let _ = writeln!(f, "{}", std::process::id());
            Ok(CatalogueLock { path })
        }
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked(path)),
        Err(e) => Err(Error::io(path, e)),
    }
}

/// Where a simulated crash interrupts [`Catalogue::save_with_fault`].
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaveFault {
    /// Files fully replaced before the crash.
    pub after_files: usize,
    /// Bytes of the next file written to its temporary before the crash.
    pub partial_bytes: usize,
}

fn atomic_write(path: &Path, bytes: &[u8], fault: Option<usize>) -> Result<()> {
    let dir = path.parent().expect("catalogue files have a parent");
    let mut tmp = tempfile::Builder::new()
        .prefix(".udc-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(|e| Error::io(dir, e))?;
    if let Some(n) = fault {
        tmp.write_all(&bytes[..n.min(bytes.len())]).map_err(|e| Error::io(tmp.path(), e))?;
        // A crashed process leaves its temporary behind.
        let _ = tmp.into_temp_path().keep();
        return Err(Error::Interrupted);
    }
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_json(path: &Path) -> Result<Json> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedFile {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

impl Catalogue {
    /// Empty in-memory catalogue rooted at `root`; nothing is written.
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            entries: BTreeMap::new(),
            ledger: BTreeMap::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn load(root: impl Into<PathBuf>, model: &MaturityModel) -> Result<Self> {
        let mut c = Self::new(root);
        let dir = c.root.join(ENTRIES_DIR);
        let listing = fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut files: Vec<PathBuf> = Vec::new();
        for item in listing {
            let path = item.map_err(|e| Error::io(&dir, e))?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.ends_with(".json") && !name.starts_with('.') {
                files.push(path);
            }
        }
        files.sort();
        for path in files {
            let entry = entry_from_json(&read_json(&path)?, model).map_err(|e| match e {
                Error::MalformedDocument(reason) => Error::MalformedFile { path: path.clone(), reason },
                other => Error::MalformedFile {
                    path: path.clone(),
                    reason: other.to_string(),
                },
            })?;
            if path.file_stem().and_then(|s| s.to_str()) != Some(entry.id.as_str()) {
                return Err(Error::IdMismatch { path, found: entry.id });
            }
            c.entries.insert(entry.id.clone(), entry);
        }
        let ledger = c.root.join(LEDGER_FILE);
        if ledger.exists() {
            c.ledger = serde_json::from_value(read_json(&ledger)?).map_err(|e| Error::MalformedFile {
                path: ledger.clone(),
                reason: e.to_string(),
            })?;
        }
        Ok(c)
    }

    /// Loads `root`, creating an empty catalogue there if it has none.
    pub fn open_or_create(root: impl Into<PathBuf>, model: &MaturityModel) -> Result<Self> {
        let root = root.into();
        let dir = root.join(ENTRIES_DIR);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Self::load(root, model)
    }

    pub fn save(&self) -> Result<()> {
        self.save_inner(None)
    }

    /// Saves but stops as if the process died at `fault`.
    #[doc(hidden)]
    pub fn save_with_fault(&self, fault: SaveFault) -> Result<()> {
        self.save_inner(Some(fault))
    }

    fn save_inner(&self, fault: Option<SaveFault>) -> Result<()> {
        let dir = self.root.join(ENTRIES_DIR);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut written = 0usize;
        let mut write = |path: &Path, bytes: &[u8]| {
            let crash = fault.filter(|f| f.after_files == written).map(|f| f.partial_bytes);
            written += 1;
            atomic_write(path, bytes, crash)
        };
        for e in self.entries.values() {
            write(&dir.join(format!("{}.json", e.id)), e.to_json_string().as_bytes())?;
        }
        let mut ledger = serde_json::to_string_pretty(&self.ledger).expect("ledger is serializable");
        ledger.push('\n');
        write(&self.root.join(LEDGER_FILE), ledger.as_bytes())?;
        for item in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let path = item.map_err(|e| Error::io(&dir, e))?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if let Some(id) = name.strip_suffix(".json") {
                if !name.starts_with('.') && !self.entries.contains_key(id) {
                    fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&CatalogueEntry> {
        self.entries.get(id).ok_or_else(|| Error::UnknownEntry(id.to_string()))
    }

    /// Inserts or replaces an entry. A replacement that changes content bumps
    /// the revision past the stored one. Returns whether anything changed.
    pub fn upsert(&mut self, mut entry: CatalogueEntry) -> bool {
        match self.entries.get(&entry.id) {
            Some(old) => {
                let mut same = entry.clone();
                same.revision = old.revision;
                if &same == old {
                    return false;
                }
                entry.revision = entry.revision.max(old.revision + 1);
            }
            None => entry.revision = entry.revision.max(1),
        }
        self.entries.insert(entry.id.clone(), entry);
        true
    }

    /// Removes the entry; its ledger row stays until the deletion is synced.
    pub fn tombstone(&mut self, id: &str) -> Result<CatalogueEntry> {
        self.entries.remove(id).ok_or_else(|| Error::UnknownEntry(id.to_string()))
    }

    /// Ids removed locally whose graph data has not been deleted yet.
    pub fn tombstoned(&self) -> BTreeSet<&str> {
        self.ledger.keys().filter(|id| !self.entries.contains_key(*id)).map(String::as_str).collect()
    }

    /// Records a sync: the minted list and revision for a live entry, or the
    /// end of a tombstoned entry's row once its deletion has been emitted.
    pub fn record_sync(&mut self, id: &str, entry_iri: &str, minted: &[String]) -> Result<()> {
        match self.entries.get(id) {
            Some(e) => {
                self.ledger.insert(
                    id.to_string(),
                    LedgerRow {
                        entry_iri: entry_iri.to_string(),
                        last_minted: minted.to_vec(),
                        last_synced_revision: e.revision,
                    },
                );
                Ok(())
            }
            None if self.ledger.remove(id).is_some() => Ok(()),
            None => Err(Error::UnknownEntry(id.to_string())),
        }
    }

    pub fn previous_minted(&self, id: &str) -> &[String] {
        self.ledger.get(id).map_or(&[], |r| r.last_minted.as_slice())
    }
}

fn nonblank(v: Option<&Json>) -> Option<String> {
    v.and_then(Json::as_str).map(str::trim).filter(|s| !s.is_empty()).map(str::to_string)
}

/// Converts a CKAN `package_show` result into an entry. Extras whose key is
/// a model field are coerced by that field's range; other extras are dropped
/// and reported in the returned warnings.
pub fn import_ckan(package_json: &str, model: &MaturityModel) -> Result<(CatalogueEntry, Vec<String>)> {
    let doc: Json = serde_json::from_str(package_json).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    let pkg = match doc.get("result") {
        Some(r @ Json::Object(_)) if doc.get("success").is_some() => r,
        _ => &doc,
    };
    let obj = pkg
        .as_object()
        .ok_or_else(|| Error::MalformedDocument("CKAN package must be a JSON object".into()))?;
    let name = nonblank(obj.get("name")).ok_or(Error::MissingName)?;
    let id = name.to_lowercase().replace('_', "-");
    if !is_valid_id(&id) {
        return Err(Error::MalformedDocument(format!("CKAN name `{name}` is not a usable entry id")));
    }
    let mut entry = CatalogueEntry::new(id)?;
    let mut warnings = Vec::new();
    let put = |entry: &mut CatalogueEntry, key: &str, raw: Option<String>| {
        if let Some(s) = raw {
            entry.push(key, coerce_str(model.property(key).map(|p| &p.range), &s));
        }
    };
    put(&mut entry, "title", nonblank(obj.get("title")));
    put(&mut entry, "description", nonblank(obj.get("notes")));
    if let Some(tags) = obj.get("tags").and_then(Json::as_array) {
        for t in tags {
            put(&mut entry, "keyword", nonblank(t.get("name")).or_else(|| nonblank(Some(t))));
        }
    }
    let author = nonblank(obj.get("author"));
    let email = nonblank(obj.get("author_email"));
    if author.is_some() || email.is_some() {
        entry.push(
            "creator",
            Value::Agent(Agent {
                name: author.unwrap_or_default(),
                email,
                indigenous: false,
            }),
        );
    }
    put(&mut entry, "license", nonblank(obj.get("license_id")).or_else(|| nonblank(obj.get("license_url"))));
    entry.organization = obj.get("organization").and_then(|o| nonblank(o.get("title")));
    put(&mut entry, "issued", nonblank(obj.get("metadata_created")));
    put(&mut entry, "landingPage", nonblank(obj.get("url")));
    if let Some(res) = obj.get("resources").and_then(Json::as_array) {
        for r in res {
            entry.resources.push(ResourceRef {
                name: nonblank(r.get("name")).unwrap_or_default(),
                url: nonblank(r.get("url")).unwrap_or_default(),
                format: nonblank(r.get("format")),
                description: nonblank(r.get("description")),
            });
        }
    }
    if let Some(extras) = obj.get("extras").and_then(Json::as_array) {
        for x in extras {
            let Some(key) = nonblank(x.get("key")) else { continue };
            let value = match x.get("value") {
                Some(Json::String(s)) => Some(s.trim().to_string()).filter(|s| !s.is_empty()),
                Some(Json::Bool(b)) => Some(b.to_string()),
                Some(Json::Number(n)) => Some(n.to_string()),
                _ => None,
            };
            if model.property(&key).is_some() {
                put(&mut entry, &key, value);
            } else {
                warnings.push(format!("extra `{key}` is not a model field; dropped"));
            }
        }
    }
    Ok((entry, warnings))
}
