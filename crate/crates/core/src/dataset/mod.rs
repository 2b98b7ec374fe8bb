//! SOCOFing-style fingerprint dataset handling: filename metadata, relabeling
//! manifests, PNG conversion, seeded splits and augmentation.

mod augment;
mod convert;
mod manifest;
mod naming;
mod split;
pub mod synthetic;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pixels::GrayMatrix;

pub use augment::{augment, AugmentOp};
pub use convert::{convert_format, decode_png, load_image, ImageFormat};
pub use manifest::{
    category_counts, find_category_dir, list_image_files, load_category, relabel, CategoryCounts,
    Manifest, ManifestEntry, MANIFEST_FILE,
};
pub use naming::{parse_socofing_name, socofing_name, MethodTag};
pub use split::split;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("unparseable fingerprint filename {0:?}")]
    UnparseableName(String),
    #[error("unknown alteration tag {tag:?} in {name:?}")]
    UnknownAlterationTag { name: String, tag: String },
    #[error("{name:?} does not belong in category {category}")]
    CategoryMismatch { name: String, category: Level },
    #[error("source {0:?} listed more than once")]
    DuplicateSource(String),
    #[error("empty source listing")]
    EmptyListing,
    #[error("cannot encode a {width}x{height} image")]
    EncodeFailure { width: usize, height: usize },
    #[error("image decode failed: {0}")]
    Decode(String),
    #[error("train fraction {0} outside (0, 1)")]
    InvalidFraction(f64),
    #[error("nothing to split")]
    EmptyInput,
    #[error("bad augmentation parameter: {0}")]
    BadParameter(String),
    #[error("invalid identity: {0}")]
    InvalidIdentity(String),
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    M,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Hand {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Finger {
    Thumb,
    Index,
    Middle,
    Ring,
    Little,
}

impl Finger {
    pub const ALL: [Finger; 5] = [
        Finger::Thumb,
        Finger::Index,
        Finger::Middle,
        Finger::Ring,
        Finger::Little,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Finger::Thumb => "thumb",
            Finger::Index => "index",
            Finger::Middle => "middle",
            Finger::Ring => "ring",
            Finger::Little => "little",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::M => "M",
            Gender::F => "F",
        })
    }
}

impl fmt::Display for Hand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hand::Left => "Left",
            Hand::Right => "Right",
        })
    }
}

impl fmt::Display for Finger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "M" => Ok(Gender::M),
            "F" => Ok(Gender::F),
            _ => Err(()),
        }
    }
}

impl FromStr for Hand {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "Left" => Ok(Hand::Left),
            "Right" => Ok(Hand::Right),
            _ => Err(()),
        }
    }
}

impl FromStr for Finger {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Finger::ALL.into_iter().find(|f| f.as_str() == s).ok_or(())
    }
}

/// Which finger a print came from. Two prints are a genuine pair iff their
/// keys are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IdentityKey {
    subject_id: u32,
    pub gender: Gender,
    pub hand: Hand,
    pub finger: Finger,
}

impl IdentityKey {
    pub fn new(subject_id: u32, gender: Gender, hand: Hand, finger: Finger) -> Result<Self, DatasetError> {
        if subject_id == 0 {
            return Err(DatasetError::InvalidIdentity("subject_id must be >= 1".into()));
        }
        Ok(Self {
            subject_id,
            gender,
            hand,
            finger,
        })
    }

    pub fn subject_id(&self) -> u32 {
        self.subject_id
    }
}

/// Alteration category. Directory names on disk use the `Display` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    Real,
    Easy,
    Medium,
    Hard,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Real, Level::Easy, Level::Medium, Level::Hard];
    pub const ALTERED: [Level; 3] = [Level::Easy, Level::Medium, Level::Hard];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Real => "Real",
            Level::Easy => "Easy",
            Level::Medium => "Medium",
            Level::Hard => "Hard",
        }
    }

    pub fn is_altered(self) -> bool {
        self != Level::Real
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "real" => Ok(Level::Real),
            "easy" | "easy_altered" | "altered-easy" => Ok(Level::Easy),
            "medium" | "medium_altered" | "altered-medium" => Ok(Level::Medium),
            "hard" | "hard_altered" | "altered-hard" => Ok(Level::Hard),
            _ => Err(format!("unknown category {s:?}")),
        }
    }
}

/// Alteration tier plus the method suffix parsed from the source filename.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlterationLevel {
    level: Level,
    method_tag: Option<MethodTag>,
}

impl AlterationLevel {
    pub fn real() -> Self {
        Self {
            level: Level::Real,
            method_tag: None,
        }
    }

    pub fn altered(level: Level, method_tag: MethodTag) -> Result<Self, DatasetError> {
        if level == Level::Real {
            return Err(DatasetError::InvalidIdentity(
                "Real prints carry no alteration method".into(),
            ));
        }
        Ok(Self {
            level,
            method_tag: Some(method_tag),
        })
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn method_tag(&self) -> Option<MethodTag> {
        self.method_tag
    }
}

/// `category/record_id`, e.g. `Real/6.png`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordRef {
    pub category: Level,
    pub record_id: String,
}

impl RecordRef {
    pub fn new(category: Level, record_id: impl Into<String>) -> Self {
        Self {
            category,
            record_id: record_id.into(),
        }
    }
}

impl fmt::Display for RecordRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.category, self.record_id)
    }
}

impl FromStr for RecordRef {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (cat, id) = s
            .split_once('/')
            .ok_or_else(|| format!("record reference {s:?} lacks a category"))?;
        if id.is_empty() || id.contains('/') {
            return Err(format!("bad record id in {s:?}"));
        }
        Ok(RecordRef::new(cat.parse()?, id))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintRecord {
    pub record_id: String,
    pub identity: IdentityKey,
    pub alteration: AlterationLevel,
    pub pixels: GrayMatrix,
    pub source_name: String,
}

impl FingerprintRecord {
    pub fn record_ref(&self) -> RecordRef {
        RecordRef::new(self.alteration.level(), self.record_id.clone())
    }
}
