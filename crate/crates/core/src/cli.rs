//! The `afrnet` command line: `ingest`, `extract`, `match`, `sweep`,
//! `stats` and `plotdata`.
//!
//! Settings resolve as flag, then environment (`AFRNET_MODEL_PATH`,
//! `AFRNET_JOBS`), then a `key = value` config file given by `--config`,
//! then built-in defaults.
//!
//! Exit codes: 0 success, 1 other failure, 2 missing dataset category,
//! 3 output already present without `--force`, 4 model load failure,
//! 5 caches from different extractors, 64 bad command-line usage.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{
    augment, category_counts, convert_format, find_category_dir, list_image_files, load_category,
    load_image, relabel, AugmentOp, CategoryCounts, ImageFormat, Level, Manifest, MANIFEST_FILE,
};
use crate::eval::{
    self, emit_plot_data, emit_report, parse_report, stats_from_reports, EmbeddingSet, ReportFormat, SweepConfig,
    ThresholdReport,
};
use crate::features::{self, batch_count, batch_extract, cache_load, cache_save, BaselineExtractor, Extractor};
use crate::matcher::{self, GroundTruth};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MISSING_CATEGORY: i32 = 2;
pub const EXIT_OUTPUT_EXISTS: i32 = 3;
pub const EXIT_MODEL_LOAD: i32 = 4;
pub const EXIT_EXTRACTOR_MISMATCH: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

pub const JOBS_ENV: &str = "AFRNET_JOBS";

pub const REPORT_STEM: &str = "report";
pub const PLOT_FILE: &str = "plotdata.csv";
pub const STATS_FILE: &str = "stats.json";
pub const INGEST_SUMMARY_FILE: &str = "ingest.json";

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn failure(e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_FAILURE, e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "afrnet", version, about = "Altered fingerprint matching and threshold analysis")]
pub struct Cli {
    /// Flat `key = value` settings file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relabel and convert a SOCOFing-style tree into numbered PNGs with manifests.
    Ingest(IngestArgs),
    /// Embed every ingested image and write one cache per category.
    Extract(ExtractArgs),
    /// Dump per-pair decisions for each mode and threshold.
    Match(MatchArgs),
    /// Threshold sweep: report, plot data and statistics.
    Sweep(SweepArgs),
    /// Correlations and confidence intervals from a report CSV.
    Stats(FixtureArgs),
    /// Plot-ready long-format CSV from a report CSV.
    Plotdata(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overwrite an existing ingest.
    #[arg(long)]
    pub force: bool,
    /// Zero timestamps for byte-identical reruns.
    #[arg(long)]
    pub deterministic: bool,
    /// Also write augmented copies to `<Category>-aug/`.
    #[arg(long)]
    pub augment: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Ingested dataset root (output of `ingest`).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Directory for the `<Category>.afre` caches.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `baseline` or `backbone`.
    #[arg(long)]
    pub extractor: Option<String>,
    #[arg(long)]
    pub model_path: Option<PathBuf>,
    #[arg(long)]
    pub batch_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Directory holding `<Category>.afre` caches.
    #[arg(long)]
    pub caches: Option<PathBuf>,
    /// Ingested dataset root, for genuine/impostor labels.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated, e.g. `0.92,0.82,0.72`.
    #[arg(long)]
    pub thresholds: Option<String>,
    /// Comma-separated subset of `easy,medium,hard`.
    #[arg(long)]
    pub modes: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub caches: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub thresholds: Option<String>,
    #[arg(long)]
    pub modes: Option<String>,
    /// Comma-separated report formats: `csv`, `json`.
    #[arg(long)]
    pub format: Option<String>,
    /// Report CSV whose rows feed the statistics instead of this sweep.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Zero wall times for byte-identical reruns.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    /// Report CSV to read; defaults to the bundled published table.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed `--config` file.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::new(EXIT_USAGE, format!("config line {}: expected key = value", i + 1)))?;
            values.insert(k.trim().replace('-', "_"), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(EXIT_USAGE, format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

struct Resolver {
    file: ConfigFile,
}

impl Resolver {
    /// flag > env > config file > none
    fn pick<T: FromStr>(&self, flag: Option<T>, env: Option<&str>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        let parse = |raw: &str, origin: &str| {
            raw.parse::<T>()
                .map(Some)
                .map_err(|e| CliError::new(EXIT_USAGE, format!("bad {key} from {origin}: {e}")))
        };
        if let Some(var) = env {
            if let Ok(raw) = std::env::var(var) {
                if !raw.is_empty() {
                    return parse(&raw, var);
                }
            }
        }
        match self.file.get(key) {
            Some(raw) => parse(raw, "config file"),
            None => Ok(None),
        }
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.pick(flag, None, key)?
            .ok_or_else(|| CliError::new(EXIT_USAGE, format!("--{} is required", key.replace('_', "-"))))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractorChoice {
    Baseline,
    Backbone(Option<PathBuf>),
}

/// Settings shared by the pipeline stages.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset_root: Option<PathBuf>,
    pub output_root: Option<PathBuf>,
    pub extractor: ExtractorChoice,
    pub batch_size: usize,
    pub thresholds: Vec<f64>,
    pub modes: Vec<Level>,
    pub seed: u64,
    pub formats: Vec<ReportFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset_root: None,
            output_root: None,
            extractor: ExtractorChoice::Baseline,
            batch_size: 32,
            thresholds: eval::DEFAULT_THRESHOLDS.to_vec(),
            modes: Level::ALTERED.to_vec(),
            seed: 42,
            formats: vec![ReportFormat::Csv],
        }
    }
}

fn parse_list<T: FromStr>(raw: &str, what: &str) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| CliError::new(EXIT_USAGE, format!("bad {what} {s:?}: {e}")))
        })
        .collect()
}

fn resolve_thresholds(r: &Resolver, flag: Option<String>) -> CliResult<Vec<f64>> {
    match r.pick(flag, None, "thresholds")? {
        None => Ok(RunConfig::default().thresholds),
        Some(raw) => {
            let t: Vec<f64> = parse_list(&raw, "threshold")?;
            for &v in &t {
                matcher::check_threshold(v).map_err(|e| CliError::new(EXIT_USAGE, e.to_string()))?;
            }
            if t.is_empty() {
                return Err(CliError::new(EXIT_USAGE, "empty threshold list"));
            }
            Ok(t)
        }
    }
}

fn resolve_modes(r: &Resolver, flag: Option<String>) -> CliResult<Vec<Level>> {
    match r.pick(flag, None, "modes")? {
        None => Ok(Level::ALTERED.to_vec()),
        Some(raw) => {
            let modes: Vec<Level> = parse_list(&raw, "mode")?;
            if modes.is_empty() || modes.iter().any(|m| !m.is_altered()) {
                return Err(CliError::new(EXIT_USAGE, format!("modes must be a subset of easy,medium,hard: {raw:?}")));
            }
            Ok(modes)
        }
    }
}

fn resolve_formats(r: &Resolver, flag: Option<String>) -> CliResult<Vec<ReportFormat>> {
    match r.pick(flag, None, "format")? {
        None => Ok(RunConfig::default().formats),
        Some(raw) => {
            let mut f: Vec<ReportFormat> = parse_list(&raw, "format")?;
            f.dedup();
            Ok(f)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::failure(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable");
    v.push(b'\n');
    v
}

fn emit(out: &mut (dyn Write + Send), line: impl AsRef<str>) -> CliResult<()> {
    writeln!(out, "{}", line.as_ref()).map_err(CliError::failure)
}

/// Parse `args` (including the program name) and run the command, writing
/// progress to `out`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send)) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(out, "{e}").map_err(CliError::failure)
                }
                _ => Err(CliError::new(EXIT_USAGE, e.to_string())),
            };
        }
    };
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let resolver = Resolver { file };
    let jobs: Option<usize> = resolver.pick(cli.jobs, Some(JOBS_ENV), "jobs")?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = jobs {
            if j == 0 {
                return Err(CliError::new(EXIT_USAGE, "--jobs must be >= 1"));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(CliError::failure)?
    };
    pool.install(|| match cli.command {
        Command::Ingest(a) => cmd_ingest(&resolver, a, out),
        Command::Extract(a) => cmd_extract(&resolver, a, out),
        Command::Match(a) => cmd_match(&resolver, a, out),
        Command::Sweep(a) => cmd_sweep(&resolver, a, out),
        Command::Stats(a) => cmd_stats(&resolver, a, out),
        Command::Plotdata(a) => cmd_plotdata(&resolver, a, out),
    })
}

/// Run with process arguments and return the exit code, printing errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout();
    match run(args, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message.trim_end());
            e.code
        }
    }
}

#[derive(Debug, Serialize)]
struct IngestSummary {
    created_at: u64,
    counts: CategoryCounts,
}

fn default_augment_ops() -> Vec<AugmentOp> {
    vec![
        AugmentOp::Rotate { degrees: 10.0 },
        AugmentOp::Rotate { degrees: -10.0 },
        AugmentOp::Scale { factor: 1.1 },
        AugmentOp::FlipHorizontal,
        AugmentOp::GaussianNoise { sigma: 2.0 },
    ]
}

fn cmd_ingest(r: &Resolver, a: IngestArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let src: PathBuf = r.require(a.dataset, "dataset")?;
    let dst: PathBuf = r.require(a.out, "out")?;
    let seed: u64 = r.pick(a.seed, None, "seed")?.unwrap_or(RunConfig::default().seed);

    let mut dirs = Vec::new();
    let mut missing = Vec::new();
    for level in Level::ALL {
        match find_category_dir(&src, level) {
            Some(d) => dirs.push((level, d)),
            None => missing.push(level.as_str()),
        }
    }
    if !missing.is_empty() {
        return Err(CliError::new(
            EXIT_MISSING_CATEGORY,
            format!("{}: missing category directories: {}", src.display(), missing.join(", ")),
        ));
    }
    let already = dst.join(INGEST_SUMMARY_FILE).exists()
        || Level::ALL.iter().any(|l| dst.join(l.as_str()).join(MANIFEST_FILE).exists());
    if already && !a.force {
        return Err(CliError::new(
            EXIT_OUTPUT_EXISTS,
            format!("{} already holds an ingest; pass --force to overwrite", dst.display()),
        ));
    }

    let created_at = if a.deterministic {
        0
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    };
    let mut manifests = Vec::new();
    for (level, dir) in dirs {
        let listing = list_image_files(&dir).map_err(CliError::failure)?;
        let cat_out = dst.join(level.as_str());
        if cat_out.exists() {
            std::fs::remove_dir_all(&cat_out).map_err(CliError::failure)?;
        }
        std::fs::create_dir_all(&cat_out).map_err(CliError::failure)?;
        let manifest = if listing.is_empty() {
            Manifest::empty(created_at)
        } else {
            relabel(&listing, level).map_err(CliError::failure)?.with_created_at(created_at)
        };
        let aug_dir = dst.join(format!("{}-aug", level.as_str()));
        if a.augment {
            std::fs::create_dir_all(&aug_dir).map_err(CliError::failure)?;
        }
        manifest
            .entries
            .par_iter()
            .enumerate()
            .try_for_each(|(i, e)| -> Result<(), CliError> {
                let pixels = load_image(&dir.join(&e.source_name)).map_err(CliError::failure)?;
                let png = convert_format(&pixels, ImageFormat::Png).map_err(CliError::failure)?;
                write_file(&cat_out.join(&e.record_id), &png)?;
                if a.augment {
                    let stem = e.record_id.trim_end_matches(".png");
                    let variants = augment(&pixels, &default_augment_ops(), seed.wrapping_add(i as u64))
                        .map_err(CliError::failure)?;
                    for (k, v) in variants.iter().enumerate() {
                        let png = convert_format(v, ImageFormat::Png).map_err(CliError::failure)?;
                        write_file(&aug_dir.join(format!("{stem}_{k}.png")), &png)?;
                    }
                }
                Ok(())
            })?;
        let mut buf = Vec::new();
        manifest.write_csv(&mut buf).map_err(CliError::failure)?;
        write_file(&cat_out.join(MANIFEST_FILE), &buf)?;
        manifests.push(manifest);
    }
    let counts = category_counts(&manifests);
    write_file(
        &dst.join(INGEST_SUMMARY_FILE),
        &to_json(&IngestSummary {
            created_at,
            counts: counts.clone(),
        }),
    )?;
    for level in Level::ALL {
        emit(out, format!("{level}: {}", counts.get(level)))?;
    }
    emit(out, format!("total {}", counts.total))
}

fn open_extractor(r: &Resolver, a: &ExtractArgs) -> CliResult<Box<dyn Extractor>> {
    let choice: String = r
        .pick(a.extractor.clone(), None, "extractor")?
        .unwrap_or_else(|| "baseline".into());
    match choice.as_str() {
        "baseline" => Ok(Box::new(BaselineExtractor)),
        "backbone" => {
            let path: Option<PathBuf> = r.pick(a.model_path.clone(), Some(features::MODEL_PATH_ENV), "model_path")?;
            let path = path.ok_or_else(|| {
                CliError::new(
                    EXIT_MODEL_LOAD,
                    format!("backbone extractor needs --model-path or {}", features::MODEL_PATH_ENV),
                )
            })?;
            load_backbone(&path)
        }
        other => Err(CliError::new(EXIT_USAGE, format!("unknown extractor {other:?} (baseline|backbone)"))),
    }
}

#[cfg(feature = "backbone")]
fn load_backbone(path: &Path) -> CliResult<Box<dyn Extractor>> {
    features::BackboneExtractor::load(path)
        .map(|b| Box::new(b) as Box<dyn Extractor>)
        .map_err(|e| CliError::new(EXIT_MODEL_LOAD, e.to_string()))
}

#[cfg(not(feature = "backbone"))]
fn load_backbone(path: &Path) -> CliResult<Box<dyn Extractor>> {
    Err(CliError::new(
        EXIT_MODEL_LOAD,
        format!("{}: built without the `backbone` feature", path.display()),
    ))
}

fn ingested_category(root: &Path, level: Level) -> CliResult<PathBuf> {
    let dir = root.join(level.as_str());
    if dir.join(MANIFEST_FILE).is_file() {
        Ok(dir)
    } else {
        Err(CliError::new(
            EXIT_MISSING_CATEGORY,
            format!("{}: no {} manifest (run ingest first)", root.display(), level),
        ))
    }
}

fn cache_path(dir: &Path, level: Level) -> PathBuf {
    dir.join(format!("{}.afre", level.as_str()))
}

fn cmd_extract(r: &Resolver, a: ExtractArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let root: PathBuf = r.require(a.dataset.clone(), "dataset")?;
    let dst: PathBuf = r.require(a.out.clone(), "out")?;
    let batch_size: usize = r.pick(a.batch_size, None, "batch_size")?.unwrap_or(32);
    if batch_size == 0 {
        return Err(CliError::new(EXIT_USAGE, "--batch-size must be >= 1"));
    }
    let dirs = Level::ALL
        .iter()
        .map(|&l| ingested_category(&root, l).map(|d| (l, d)))
        .collect::<CliResult<Vec<_>>>()?;
    let extractor = open_extractor(r, &a)?;
    for (level, dir) in dirs {
        let (_, records) = load_category(&dir).map_err(CliError::failure)?;
        let vectors = batch_extract(&records, extractor.as_ref(), batch_size).map_err(CliError::failure)?;
        let path = cache_path(&dst, level);
        std::fs::create_dir_all(&dst).map_err(CliError::failure)?;
        cache_save(&vectors, &path).map_err(CliError::failure)?;
        emit(
            out,
            format!(
                "{level}: {} records, {} batches of up to {batch_size}, dim {} ({})",
                records.len(),
                batch_count(records.len(), batch_size),
                extractor.dim(),
                extractor.id()
            ),
        )?;
    }
    Ok(())
}

fn load_caches(dir: &Path, modes: &[Level]) -> CliResult<(EmbeddingSet, String)> {
    let mut set = EmbeddingSet::new();
    let mut id: Option<String> = None;
    for &level in std::iter::once(&Level::Real).chain(modes) {
        let path = cache_path(dir, level);
        if !path.is_file() {
            return Err(CliError::new(EXIT_MISSING_CATEGORY, format!("missing cache {}", path.display())));
        }
        let vectors = cache_load(&path).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
        if let Some(first) = vectors.first() {
            match &id {
                None => id = Some(first.extractor_id().to_string()),
                Some(i) if i != first.extractor_id() => {
                    return Err(CliError::new(
                        EXIT_EXTRACTOR_MISMATCH,
                        format!("{} was built by {:?}, other caches by {:?}", path.display(), first.extractor_id(), i),
                    ))
                }
                _ => {}
            }
        }
        set.insert(level, vectors);
    }
    Ok((set, id.unwrap_or_default()))
}

fn load_ground_truth(root: &Path, modes: &[Level]) -> CliResult<GroundTruth> {
    let read = |l: Level| -> CliResult<Manifest> {
        let path = ingested_category(root, l)?.join(MANIFEST_FILE);
        let f = std::fs::File::open(&path).map_err(CliError::failure)?;
        Manifest::read_csv(f).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
    };
    let real = read(Level::Real)?;
    let mut gt = GroundTruth::new();
    for &m in modes {
        let altered = read(m)?;
        gt.extend(GroundTruth::from_manifests(&real, &altered));
    }
    Ok(gt)
}

fn cmd_match(r: &Resolver, a: MatchArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let caches: PathBuf = r.require(a.caches, "caches")?;
    let dst: PathBuf = r.require(a.out, "out")?;
    let thresholds = resolve_thresholds(r, a.thresholds)?;
    let config = SweepConfig {
        thresholds,
        modes: resolve_modes(r, a.modes)?,
        extractor_id: None,
    }
    .normalized()
    .map_err(|e| CliError::new(EXIT_USAGE, e.to_string()))?;
    let (set, _) = load_caches(&caches, &config.modes)?;
    let dataset: Option<PathBuf> = r.pick(a.dataset, None, "dataset")?;
    let gt = dataset.map(|d| load_ground_truth(&d, &config.modes)).transpose()?;
    for &mode in &config.modes {
        for &t in &config.thresholds {
            let decisions = matcher::match_all(&set[&Level::Real], &set[&mode], t, gt.as_ref()).map_err(CliError::failure)?;
            let mut buf = Vec::new();
            matcher::write_decisions_csv(&decisions, &mut buf).map_err(CliError::failure)?;
            let name = format!("decisions_{}_{}.csv", mode.as_str().to_ascii_lowercase(), t);
            write_file(&dst.join(&name), &buf)?;
            let matched = decisions.iter().filter(|d| d.matched).count();
            emit(out, format!("{mode} @ {t}: {matched} matched / {} pairs -> {name}", decisions.len()))?;
        }
    }
    Ok(())
}

fn read_report_file(path: &Path) -> CliResult<Vec<ThresholdReport>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
    let format = if path.extension().and_then(|e| e.to_str()) == Some("json") {
        ReportFormat::Json
    } else {
        ReportFormat::Csv
    };
    parse_report(&bytes, format).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

fn fixture_rows(path: Option<PathBuf>) -> CliResult<Vec<ThresholdReport>> {
    match path {
        Some(p) => read_report_file(&p),
        None => Ok(eval::reference_results()),
    }
}

fn write_stats(dst: &Path, rows: &[ThresholdReport], out: &mut (dyn Write + Send)) -> CliResult<()> {
    let summary = stats_from_reports(rows);
    write_file(&dst.join(STATS_FILE), &to_json(&summary))?;
    for c in &summary.correlations {
        emit(out, format!("{} vs {}: r = {:.4}, p = {:.6} (n = {})", c.x_name, c.y_name, c.r, c.p_value, c.n))?;
    }
    for ci in &summary.intervals {
        let mode = ci.mode.map(|m| m.to_string()).unwrap_or_default();
        emit(
            out,
            format!(
                "{mode}: mean {}, std {}, 95% CI [{}, {}]",
                crate::fixed(ci.mean, 2),
                crate::fixed(ci.sample_std, 2),
                crate::fixed(ci.lower, 2),
                crate::fixed(ci.upper, 2)
            ),
        )?;
    }
    Ok(())
}

fn cmd_sweep(r: &Resolver, a: SweepArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let dst: PathBuf = r.require(a.out, "out")?;
    let formats = resolve_formats(r, a.format)?;
    let caches: Option<PathBuf> = r.pick(a.caches, None, "caches")?;
    let fixture: Option<PathBuf> = a.fixture;
    if caches.is_none() && fixture.is_none() {
        return Err(CliError::new(EXIT_USAGE, "sweep needs --caches (and optionally --fixture)"));
    }
    let mut rows = None;
    if let Some(caches) = caches {
        let config = SweepConfig {
            thresholds: resolve_thresholds(r, a.thresholds)?,
            modes: resolve_modes(r, a.modes)?,
            extractor_id: None,
        }
        .normalized()
        .map_err(|e| CliError::new(EXIT_USAGE, e.to_string()))?;
        let (set, id) = load_caches(&caches, &config.modes)?;
        let dataset: Option<PathBuf> = r.pick(a.dataset, None, "dataset")?;
        let gt = dataset.map(|d| load_ground_truth(&d, &config.modes)).transpose()?;
        let config = SweepConfig {
            extractor_id: Some(id),
            ..config
        };
        let mut reports = eval::sweep(&config, &set, gt.as_ref()).map_err(CliError::failure)?;
        if a.deterministic {
            for rep in &mut reports {
                rep.wall_time_s = 0.0;
            }
        }
        for f in &formats {
            write_file(&dst.join(format!("{REPORT_STEM}.{}", f.extension())), &emit_report(&reports, *f))?;
        }
        write_file(&dst.join(PLOT_FILE), &emit_plot_data(&reports).map_err(CliError::failure)?)?;
        for rep in &reports {
            emit(
                out,
                format!(
                    "{} @ {}: matched {}, unmatched {}, accuracy {}%",
                    rep.mode,
                    rep.threshold,
                    rep.matched_pairs,
                    rep.unmatched_pairs,
                    crate::fixed(rep.paper_accuracy_pct, 2)
                ),
            )?;
        }
        rows = Some(reports);
    }
    let stat_rows = match fixture {
        Some(p) => {
            let f = read_report_file(&p)?;
            if rows.is_none() {
                write_file(&dst.join(PLOT_FILE), &emit_plot_data(&f).map_err(CliError::failure)?)?;
            }
            f
        }
        None => rows.unwrap_or_default(),
    };
    write_stats(&dst, &stat_rows, out)
}

fn cmd_stats(r: &Resolver, a: FixtureArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let dst: PathBuf = r.require(a.out, "out")?;
    let rows = fixture_rows(a.fixture)?;
    write_stats(&dst, &rows, out)
}

fn cmd_plotdata(r: &Resolver, a: FixtureArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let dst: PathBuf = r.require(a.out, "out")?;
    let rows = fixture_rows(a.fixture)?;
    write_file(&dst.join(PLOT_FILE), &emit_plot_data(&rows).map_err(CliError::failure)?)?;
    emit(out, format!("{} rows -> {}", rows.len(), dst.join(PLOT_FILE).display()))
}
