//! `udc`: batch front end for the metadata maturity engine.
//!
//! [`run`] parses an argument vector, writes machine-readable output to `out`
//! and diagnostics to `err`, and returns the process exit code.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use udc_core::fairness::{conformance_json, dcat_ap_report, fair_report, NOT_MODELED};
use udc_core::mapping::{default_mapping, map_entry, parse_mapping, root_iri, MappingConfig, UuidMode};
use udc_core::rdf::endpoint::{parse_token, push_update, EndpointConfig, ENV_ENDPOINT, ENV_TOKEN};
use udc_core::rdf::{serialize_ntriples, serialize_turtle, sparql_delete_subjects, sync_script};
use udc_core::record::Severity;
use udc_core::scoring::{completion, corpus_report, report_csv, report_json, split_level4_stats, CompletionReport, Fraction, ReportScope};
use udc_core::search::{FacetField, Index, Query};
use udc_core::store::{import_ckan, lock, Catalogue};
use udc_core::{builtin_model, parse_entry, validate_entry, Category, Error, MaturityModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_FINDINGS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "udc", version, about = "Metadata maturity model engine for urban dataset catalogues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect the maturity model.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Add or replace catalogue entries.
    Ingest(IngestArgs),
    /// Check entries against the model.
    Validate(ValidateArgs),
    /// Completion of one entry.
    Score(ScoreArgs),
    /// Corpus completion statistics.
    Report(ReportArgs),
    /// FAIR indicator tiers and DCAT-AP conformance of one entry.
    Fair(FairArgs),
    /// Map one entry to RDF.
    Map(MapArgs),
    /// Emit or apply SPARQL Update scripts for entries.
    Sync(SyncArgs),
    /// Remove an entry and its graph data.
    Delete(DeleteArgs),
    /// Text search with facet counts.
    Search(SearchArgs),
}

#[derive(Debug, Subcommand)]
enum ModelCommand {
    Show(ModelShowArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RdfFormat {
    Nt,
    Ttl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum By {
    Level,
    Category,
}

#[derive(Debug, Args)]
struct ModelShowArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    level: Option<u32>,
    #[arg(long)]
    category: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: TableFormat,
}

#[derive(Debug, Args)]
struct CatalogueArg {
    #[arg(long, value_name = "DIR")]
    catalogue: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("input").required(true).multiple(true))]
struct IngestArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    #[arg(long, value_name = "FILE", group = "input")]
    entry: Vec<PathBuf>,
    #[arg(long, value_name = "FILE", group = "input")]
    ckan: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    ids: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: TextFormat,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    id: String,
    #[arg(long)]
    modality_aware: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    #[arg(long, value_enum)]
    by: By,
    #[arg(long)]
    split_level4: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    #[arg(long)]
    modality_aware: bool,
}

#[derive(Debug, Args)]
struct FairArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    id: String,
    #[arg(long)]
    dcat_ap: bool,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Name-based UUIDs (the default).
    #[arg(long, conflicts_with = "seed_random")]
    seed_deterministic: bool,
    /// Random UUIDs.
    #[arg(long)]
    seed_random: bool,
}

impl SeedArgs {
    fn mode(&self) -> UuidMode {
        if self.seed_random {
            UuidMode::Random
        } else {
            UuidMode::Deterministic
        }
    }
}

#[derive(Debug, Args)]
struct MapArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    /// Mapping configuration; the bundled default when omitted.
    #[arg(long, value_name = "FILE")]
    mapping: Option<PathBuf>,
    id: String,
    #[arg(long, value_enum, default_value = "nt")]
    format: RdfFormat,
    #[command(flatten)]
    seed: SeedArgs,
}

#[derive(Debug, Args)]
struct TargetArgs {
    /// Write the script to FILE instead of standard output.
    #[arg(long, value_name = "FILE", conflicts_with = "apply")]
    out: Option<PathBuf>,
    /// Send the script to the endpoint and update the ledger.
    #[arg(long)]
    apply: bool,
    #[arg(long, value_name = "URL", requires = "apply")]
    endpoint: Option<String>,
    /// Bearer token, or `user:password` for basic credentials.
    #[arg(long, value_name = "TOKEN", requires = "apply")]
    token: Option<String>,
}

#[derive(Debug, Args)]
struct SyncArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    #[arg(long, value_name = "FILE")]
    mapping: Option<PathBuf>,
    ids: Vec<String>,
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    seed: SeedArgs,
}

#[derive(Debug, Args)]
struct DeleteArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    id: String,
    #[command(flatten)]
    target: TargetArgs,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    cat: CatalogueArg,
    #[arg(long)]
    query: Option<String>,
    /// FIELD=VALUE; repeated values of one field are alternatives.
    #[arg(long, value_name = "FIELD=VALUE")]
    filter: Vec<String>,
    /// Comma-separated facet fields to count.
    #[arg(long, value_delimiter = ',', value_name = "F1,F2")]
    facets: Vec<String>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownFacetField(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        message: format!("{}: {e}", path.display()),
    }
}

type CmdResult = Result<i32, Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, s: &str) -> Result<(), Failure> {
        self.out.write_all(s.as_bytes()).map_err(|e| Failure {
            code: EXIT_FAILURE,
            message: format!("standard output: {e}"),
        })
    }

    fn json(&mut self, v: &Json) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
        s.push('\n');
        self.print(&s)
    }

    fn warn(&mut self, s: &str) {
        let _ = writeln!(self.err, "udc: {s}");
    }
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io { out, err };
    let model = builtin_model();
    let result = match cli.command {
        Command::Model(ModelCommand::Show(a)) => model_show(&model, a, &mut io),
        Command::Ingest(a) => ingest(&model, a, &mut io),
        Command::Validate(a) => validate(&model, a, &mut io),
        Command::Score(a) => score(&model, a, &mut io),
        Command::Report(a) => report(&model, a, &mut io),
        Command::Fair(a) => fair(&model, a, &mut io),
        Command::Map(a) => map(&model, a, &mut io),
        Command::Sync(a) => sync(&model, a, &mut io),
        Command::Delete(a) => delete(&model, a, &mut io),
        Command::Search(a) => search(&model, a, &mut io),
    };
    let _ = io.out.flush();
    match result {
        Ok(code) => code,
        Err(f) => {
            io.warn(&f.message);
            f.code
        }
    }
}

fn load(model: &MaturityModel, cat: &CatalogueArg) -> Result<Catalogue, Failure> {
    Ok(Catalogue::load(&cat.catalogue, model)?)
}

fn model_show(model: &MaturityModel, a: ModelShowArgs, io: &mut Io<'_>) -> CmdResult {
    let category = a.category.as_deref().map(str::parse::<Category>).transpose().map_err(|e| usage(e.to_string()))?;
    let props = model.properties_by(a.level, category).map_err(|e| usage(e.to_string()))?;
    match a.format {
        TableFormat::Json => {
            let prefixes: BTreeMap<&str, &str> = model.prefixes.iter().collect();
            io.json(&json!({ "prefixes": prefixes, "properties": props }))?;
        }
        TableFormat::Table => {
            let mut s = String::from("level\tcategory\tkey\tcurie\trange\tcardinality\n");
            for p in props {
                let card = match p.max_cardinality {
                    udc_core::model::Cardinality::One => "1",
                    udc_core::model::Cardinality::Unbounded => "n",
                };
                s.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\n", p.level, p.category, p.key, p.curie, p.range, card));
            }
            io.print(&s)?;
        }
    }
    Ok(EXIT_OK)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn ingest(model: &MaturityModel, a: IngestArgs, io: &mut Io<'_>) -> CmdResult {
    let root = &a.cat.catalogue;
    fs::create_dir_all(root).map_err(|e| io_failure(root, e))?;
    let _guard = lock(root)?;
    let mut cat = Catalogue::open_or_create(root, model)?;
    let mut incoming = Vec::new();
    for path in &a.entry {
        let entry = parse_entry(&read(path)?, model).map_err(|e| Failure::from(e).context(path))?;
        incoming.push(entry);
    }
    for path in &a.ckan {
        let (entry, warnings) = import_ckan(&read(path)?, model).map_err(|e| Failure::from(e).context(path))?;
        for w in warnings {
            io.warn(&format!("{}: {w}", path.display()));
        }
        incoming.push(entry);
    }
    let mut lines = String::new();
    for entry in incoming {
        let id = entry.id.clone();
        let issues = validate_entry(model, &entry);
        if !issues.is_empty() {
            io.warn(&format!("{id}: {} validation issue(s); run `udc validate`", issues.len()));
        }
        let existed = cat.entries.contains_key(&id);
        let status = match (existed, cat.upsert(entry)) {
            (false, _) => "created",
            (true, true) => "updated",
            (true, false) => "unchanged",
        };
        lines.push_str(&format!("{id}\t{status}\t{}\n", cat.entries[&id].revision));
    }
    cat.save()?;
    io.print(&lines)?;
    Ok(EXIT_OK)
}

impl Failure {
    fn context(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

fn selected<'a>(cat: &'a Catalogue, ids: &[String]) -> Result<Vec<&'a udc_core::CatalogueEntry>, Failure> {
    if ids.is_empty() {
        return Ok(cat.entries.values().collect());
    }
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    ids.iter().map(|id| cat.get(id).map_err(Failure::from)).collect()
}

fn validate(model: &MaturityModel, a: ValidateArgs, io: &mut Io<'_>) -> CmdResult {
    let cat = load(model, &a.cat)?;
    let mut any = false;
    let mut text = String::new();
    let mut docs = Vec::new();
    for entry in selected(&cat, &a.ids)? {
        let issues = validate_entry(model, entry);
        any |= !issues.is_empty();
        for i in &issues {
            let sev = match i.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            let idx = i.value_index.map(|n| format!("[{n}]")).unwrap_or_default();
            text.push_str(&format!("{}\t{}{idx}\t{sev}\t{:?}\t{}\n", entry.id, i.field_key, i.code, i.message));
        }
        docs.push(json!({ "id": entry.id, "issues": issues }));
    }
    match a.format {
        TextFormat::Text => io.print(&text)?,
        TextFormat::Json => io.json(&Json::Array(docs))?,
    }
    Ok(if any { EXIT_FINDINGS } else { EXIT_OK })
}

fn fraction_json(f: &Fraction) -> Json {
    json!({ "filled": f.filled, "total": f.total, "percent": f.display_percent() })
}

fn completion_json(r: &CompletionReport) -> Json {
    let levels: serde_json::Map<String, Json> = r.per_level.iter().map(|(l, f)| (l.to_string(), fraction_json(f))).collect();
    let cats: serde_json::Map<String, Json> = r.per_category.iter().map(|(c, f)| (c.to_string(), fraction_json(f))).collect();
    json!({
        "id": r.entry_id,
        "overall": fraction_json(&r.overall),
        "per_level": levels,
        "per_category": cats,
        "filled_fields": r.filled_fields,
    })
}

fn score(model: &MaturityModel, a: ScoreArgs, io: &mut Io<'_>) -> CmdResult {
    let cat = load(model, &a.cat)?;
    let r = completion(model, cat.get(&a.id)?, a.modality_aware);
    io.json(&completion_json(&r))?;
    Ok(EXIT_OK)
}

fn report(model: &MaturityModel, a: ReportArgs, io: &mut Io<'_>) -> CmdResult {
    let cat = load(model, &a.cat)?;
    let reports: Vec<CompletionReport> = cat.entries.values().map(|e| completion(model, e, a.modality_aware)).collect();
    let corpus = corpus_report(&reports)?;
    let split = if a.split_level4 { Some(split_level4_stats(&reports)?) } else { None };
    let scope = match a.by {
        By::Level => ReportScope::Level,
        By::Category => ReportScope::Category,
    };
    match a.format {
        ReportFormat::Csv => io.print(&report_csv(&corpus, scope, split.as_ref()))?,
        ReportFormat::Json => io.json(&report_json(&corpus, scope, split.as_ref()))?,
    }
    Ok(EXIT_OK)
}

fn fair(model: &MaturityModel, a: FairArgs, io: &mut Io<'_>) -> CmdResult {
    let cat = load(model, &a.cat)?;
    let entry = cat.get(&a.id)?;
    if a.dcat_ap {
        let mut doc = conformance_json(entry);
        doc["id"] = json!(entry.id);
        io.json(&doc)?;
        return Ok(if dcat_ap_report(entry).mandatory { EXIT_OK } else { EXIT_FINDINGS });
    }
    io.json(&json!({ "id": entry.id, "fair": fair_report(entry), "not_modeled": NOT_MODELED }))?;
    Ok(EXIT_OK)
}

fn mapping(path: Option<&Path>) -> Result<MappingConfig, Failure> {
    match path {
        Some(p) => parse_mapping(&read(p)?).map_err(|e| Failure::from(e).context(p)),
        None => Ok(default_mapping()),
    }
}

fn map(model: &MaturityModel, a: MapArgs, io: &mut Io<'_>) -> CmdResult {
    let config = mapping(a.mapping.as_deref())?;
    let cat = load(model, &a.cat)?;
    let mapped = map_entry(&config, cat.get(&a.id)?, a.seed.mode())?;
    let text = match a.format {
        RdfFormat::Nt => serialize_ntriples(&mapped.graph),
        RdfFormat::Ttl => serialize_turtle(&mapped.graph, &config.context),
    };
    io.print(&text)?;
    Ok(EXIT_OK)
}

fn endpoint(t: &TargetArgs) -> Result<EndpointConfig, Failure> {
    let mut cfg = match &t.endpoint {
        Some(url) => {
            let mut c = EndpointConfig::new(url.clone());
            c.auth = std::env::var(ENV_TOKEN).ok().filter(|s| !s.is_empty()).map(|s| parse_token(&s));
            c
        }
        None => EndpointConfig::from_env().ok_or_else(|| Failure {
            code: EXIT_FAILURE,
            message: format!("--apply needs --endpoint or {ENV_ENDPOINT}"),
        })?,
    };
    if let Some(tok) = &t.token {
        cfg.auth = Some(parse_token(tok));
    }
    Ok(cfg)
}

/// Delivers `script` per the target flags. Returns whether it reached the
/// endpoint, so the caller knows to update the ledger.
fn deliver(t: &TargetArgs, script: &str, io: &mut Io<'_>) -> Result<bool, Failure> {
    if t.apply {
        let cfg = endpoint(t)?;
        if !script.is_empty() {
            push_update(&cfg, script)?;
        }
        return Ok(true);
    }
    match &t.out {
        Some(path) => fs::write(path, script).map_err(|e| io_failure(path, e))?,
        None => io.print(script)?,
    }
    Ok(false)
}

fn join_scripts(parts: &[String]) -> String {
    let mut s = parts.join(" ;\n");
    if !s.is_empty() {
        s.push('\n');
    }
    s
}

fn sync(model: &MaturityModel, a: SyncArgs, io: &mut Io<'_>) -> CmdResult {
    let config = mapping(a.mapping.as_deref())?;
    let root = &a.cat.catalogue;
    let _guard = if a.target.apply { Some(lock(root)?) } else { None };
    let mut cat = load(model, &a.cat)?;
    let gone: Vec<String> = cat.tombstoned().into_iter().map(str::to_string).collect();
    let ids: Vec<String> = if a.ids.is_empty() {
        let mut all: Vec<String> = cat.entries.keys().cloned().chain(gone.iter().cloned()).collect();
        all.sort();
        all
    } else {
        let mut ids = a.ids.clone();
        ids.sort();
        ids.dedup();
        for id in &ids {
            if !cat.entries.contains_key(id) && !gone.contains(id) {
                return Err(Error::UnknownEntry(id.clone()).into());
            }
        }
        ids
    };
    let mut scripts = Vec::new();
    let mut records: Vec<(String, String, Vec<String>)> = Vec::new();
    for id in ids {
        match cat.entries.get(&id) {
            Some(entry) => {
                let mapped = map_entry(&config, entry, a.seed.mode())?;
                scripts.push(sync_script(&mapped.root, cat.previous_minted(&id), &mapped.graph));
                records.push((id, mapped.root, mapped.minted));
            }
            None => {
                let row = &cat.ledger[&id];
                let mut subjects = vec![row.entry_iri.clone()];
                subjects.extend(row.last_minted.iter().cloned());
                scripts.push(sparql_delete_subjects(&subjects));
                records.push((id, String::new(), Vec::new()));
            }
        }
    }
    if deliver(&a.target, &join_scripts(&scripts), io)? {
        for (id, iri, minted) in &records {
            cat.record_sync(id, iri, minted)?;
        }
        cat.save()?;
        io.print(&format!("synced {} entr{}\n", records.len(), if records.len() == 1 { "y" } else { "ies" }))?;
    }
    Ok(EXIT_OK)
}

fn delete(model: &MaturityModel, a: DeleteArgs, io: &mut Io<'_>) -> CmdResult {
    let root = &a.cat.catalogue;
    let _guard = lock(root)?;
    let mut cat = load(model, &a.cat)?;
    let entry = cat.get(&a.id)?.clone();
    let entry_iri = match cat.ledger.get(&a.id) {
        Some(row) => row.entry_iri.clone(),
        None => root_iri(&default_mapping(), &entry)?,
    };
    let mut subjects = vec![entry_iri];
    subjects.extend(cat.previous_minted(&a.id).iter().cloned());
    let script = join_scripts(&[sparql_delete_subjects(&subjects)]);
    cat.tombstone(&a.id)?;
    if deliver(&a.target, &script, io)? && cat.ledger.contains_key(&a.id) {
        cat.record_sync(&a.id, "", &[])?;
    }
    cat.save()?;
    Ok(EXIT_OK)
}

fn search(model: &MaturityModel, a: SearchArgs, io: &mut Io<'_>) -> CmdResult {
    let cat = load(model, &a.cat)?;
    let index = Index::build(cat.entries.values())?;
    let mut grouped: BTreeMap<FacetField, Vec<String>> = BTreeMap::new();
    for f in &a.filter {
        let (field, value) = f.split_once('=').ok_or_else(|| usage(format!("--filter `{f}` is not FIELD=VALUE")))?;
        grouped.entry(field.trim().parse()?).or_default().push(value.to_string());
    }
    let mut q = Query {
        text: a.query.clone(),
        filters: Vec::new(),
    };
    for (field, values) in grouped {
        q = q.filter(field.name(), values)?;
    }
    let fields: Vec<FacetField> = a.facets.iter().filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse()).collect::<Result<_, _>>()?;
    let hits: Vec<Json> = index.search(&q).into_iter().map(|h| json!({ "id": h.id, "score": h.score })).collect();
    let facets: serde_json::Map<String, Json> = index
        .facet_counts(&q, &fields)
        .into_iter()
        .map(|(f, counts)| (f.name().to_string(), json!(counts)))
        .collect();
    io.json(&json!({ "total": hits.len(), "hits": hits, "facets": facets }))?;
    Ok(EXIT_OK)
}
