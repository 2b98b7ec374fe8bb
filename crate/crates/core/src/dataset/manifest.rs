use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    load_image, parse_socofing_name, AlterationLevel, DatasetError, FingerprintRecord, IdentityKey,
    Level, MethodTag,
};

pub const MANIFEST_FILE: &str = "manifest.csv";

const HEADER: [&str; 8] = [
    "source_name",
    "record_id",
    "subject",
    "gender",
    "hand",
    "finger",
    "level",
    "method_tag",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub source_name: String,
    pub record_id: String,
    pub identity: IdentityKey,
    pub alteration: AlterationLevel,
}

/// Relabel record for one category directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    /// Unix seconds; zero in deterministic runs.
    pub created_at: u64,
    pub category_counts: BTreeMap<Level, usize>,
}

impl Manifest {
    fn from_entries(entries: Vec<ManifestEntry>, created_at: u64) -> Self {
        let mut category_counts = BTreeMap::new();
        for e in &entries {
            *category_counts.entry(e.alteration.level()).or_insert(0) += 1;
        }
        Self {
            entries,
            created_at,
            category_counts,
        }
    }

    /// A category with no images.
    pub fn empty(created_at: u64) -> Self {
        Self::from_entries(Vec::new(), created_at)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn with_created_at(mut self, created_at: u64) -> Self {
        self.created_at = created_at;
        self
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DatasetError> {
        let mut w = csv::WriterBuilder::new().from_writer(writer);
        let csv_err = |e: csv::Error| DatasetError::Manifest(e.to_string());
        w.write_record(HEADER).map_err(csv_err)?;
        for e in &self.entries {
            let subject = e.identity.subject_id().to_string();
            let gender = e.identity.gender.to_string();
            let hand = e.identity.hand.to_string();
            let tag = e.alteration.method_tag().map(|t| t.to_string()).unwrap_or_default();
            w.write_record([
                e.source_name.as_str(),
                e.record_id.as_str(),
                subject.as_str(),
                gender.as_str(),
                hand.as_str(),
                e.identity.finger.as_str(),
                e.alteration.level().as_str(),
                tag.as_str(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a manifest and checks each row against its own `source_name`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, DatasetError> {
        let mut r = csv::Reader::from_reader(reader);
        let bad = |m: String| DatasetError::Manifest(m);
        let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if headers.iter().ne(HEADER) {
            return Err(bad(format!("unexpected header {:?}", headers)));
        }
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for row in r.records() {
            let row = row.map_err(|e| bad(e.to_string()))?;
            let level: Level = row[6].parse().map_err(bad)?;
            let (identity, alteration) = parse_socofing_name(&row[0], level)?;
            let tag = if row[7].is_empty() {
                None
            } else {
                Some(row[7].parse::<MethodTag>().map_err(|_| bad(format!("bad tag {:?}", &row[7])))?)
            };
            let consistent = row[2] == identity.subject_id().to_string()
                && row[3] == identity.gender.to_string()
                && row[4] == identity.hand.to_string()
                && &row[5] == identity.finger.as_str()
                && tag == alteration.method_tag();
            if !consistent {
                return Err(bad(format!("row for {:?} disagrees with its filename", &row[0])));
            }
            if !seen.insert((level, row[1].to_string())) {
                return Err(bad(format!("record id {:?} repeated", &row[1])));
            }
            entries.push(ManifestEntry {
                source_name: row[0].to_string(),
                record_id: row[1].to_string(),
                identity,
                alteration,
            });
        }
        Ok(Self::from_entries(entries, 0))
    }
}

/// Number the listing `1.png, 2.png, ...` in lexicographic order of source name.
pub fn relabel(listing: &[String], category: Level) -> Result<Manifest, DatasetError> {
    if listing.is_empty() {
        return Err(DatasetError::EmptyListing);
    }
    let mut sorted: Vec<&String> = listing.iter().collect();
    sorted.sort();
    if let Some(pair) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(DatasetError::DuplicateSource(pair[0].clone()));
    }
    let entries = sorted
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let (identity, alteration) = parse_socofing_name(name, category)?;
            Ok(ManifestEntry {
                source_name: name.clone(),
                record_id: format!("{}.png", i + 1),
                identity,
                alteration,
            })
        })
        .collect::<Result<Vec<_>, DatasetError>>()?;
    Ok(Manifest::from_entries(entries, 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub counts: BTreeMap<Level, usize>,
    pub total: usize,
}

impl CategoryCounts {
    pub fn get(&self, level: Level) -> usize {
        self.counts.get(&level).copied().unwrap_or(0)
    }
}

pub fn category_counts(manifests: &[Manifest]) -> CategoryCounts {
    let mut counts: BTreeMap<Level, usize> = Level::ALL.iter().map(|&l| (l, 0)).collect();
    for m in manifests {
        for (level, n) in &m.category_counts {
            *counts.entry(*level).or_insert(0) += n;
        }
    }
    let total = counts.values().sum();
    CategoryCounts { counts, total }
}

/// Locate the directory for `level` under `root`, accepting the common
/// spellings (`Easy`, `Easy_Altered`, `Altered-Easy`, any case).
pub fn find_category_dir(root: &Path, level: Level) -> Option<PathBuf> {
    let exact = root.join(level.as_str());
    if exact.is_dir() {
        return Some(exact);
    }
    let mut candidates: Vec<PathBuf> = std::fs::read_dir(root)
        .ok()?
        .filter_map(Result::ok)
        .filter(|e| e.path().is_dir())
        .filter(|e| {
            e.file_name()
                .to_str()
                .and_then(|n| n.parse::<Level>().ok())
                .is_some_and(|l| l == level)
        })
        .map(|e| e.path())
        .collect();
    candidates.sort();
    candidates.into_iter().next()
}

/// Basenames of `.bmp` / `.png` files directly inside `dir`, sorted.
pub fn list_image_files(dir: &Path) -> Result<Vec<String>, DatasetError> {
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if !entry.file_type()?.is_file() {
            continue;
        }
        let Some(name) = entry.file_name().to_str().map(str::to_string) else {
            continue;
        };
        let lower = name.to_ascii_lowercase();
        if lower.ends_with(".bmp") || lower.ends_with(".png") {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

/// Load the relabeled PNGs of one category directory through its manifest.
pub fn load_category(dir: &Path) -> Result<(Manifest, Vec<FingerprintRecord>), DatasetError> {
    let manifest = Manifest::read_csv(std::fs::File::open(dir.join(MANIFEST_FILE))?)?;
    let records = manifest
        .entries
        .iter()
        .map(|e| {
            Ok(FingerprintRecord {
                record_id: e.record_id.clone(),
                identity: e.identity,
                alteration: e.alteration.clone(),
                pixels: load_image(&dir.join(&e.record_id))?,
                source_name: e.source_name.clone(),
            })
        })
        .collect::<Result<Vec<_>, DatasetError>>()?;
    Ok((manifest, records))
}
