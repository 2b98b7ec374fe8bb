use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AlterationLevel, DatasetError, Finger, Gender, Hand, IdentityKey, Level};

/// SOCOFing alteration method suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MethodTag {
    /// Obliteration.
    Obl,
    /// Central rotation.
    CR,
    /// Z-cut.
    Zcut,
}

impl MethodTag {
    pub const ALL: [MethodTag; 3] = [MethodTag::Obl, MethodTag::CR, MethodTag::Zcut];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::Obl => "Obl",
            MethodTag::CR => "CR",
            MethodTag::Zcut => "Zcut",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        MethodTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or(())
    }
}

/// Parse `<subject>__<M|F>_<Left|Right>_<finger>_finger[_<Obl|CR|Zcut>].<ext>`.
///
/// The filename only names the alteration method; the easy/medium/hard tier
/// comes from the directory, so the caller passes the category the file was
/// found in. A tagged name in `Real`, or an untagged name in an altered
/// category, is a [`DatasetError::CategoryMismatch`].
pub fn parse_socofing_name(
    filename: &str,
    category: Level,
) -> Result<(IdentityKey, AlterationLevel), DatasetError> {
    let bad = || DatasetError::UnparseableName(filename.to_string());
    let (stem, ext) = filename.rsplit_once('.').ok_or_else(bad)?;
    if ext.is_empty() || stem.contains('/') {
        return Err(bad());
    }
    let (subject, rest) = stem.split_once("__").ok_or_else(bad)?;
    if subject.is_empty() || !subject.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let subject_id: u32 = subject.parse().map_err(|_| bad())?;

    let tokens: Vec<&str> = rest.split('_').collect();
    if tokens.len() < 4 || tokens.len() > 5 || tokens[3] != "finger" {
        return Err(bad());
    }
    let gender: Gender = tokens[0].parse().map_err(|_| bad())?;
    let hand: Hand = tokens[1].parse().map_err(|_| bad())?;
    let finger: Finger = tokens[2].parse().map_err(|_| bad())?;
    let identity = IdentityKey::new(subject_id, gender, hand, finger).map_err(|_| bad())?;

    let method = match tokens.get(4) {
        None => None,
        Some(tag) => Some(
            tag.parse::<MethodTag>()
                .map_err(|_| DatasetError::UnknownAlterationTag {
                    name: filename.to_string(),
                    tag: tag.to_string(),
                })?,
        ),
    };

    let alteration = match (category, method) {
        (Level::Real, None) => AlterationLevel::real(),
        (level, Some(tag)) if level.is_altered() => AlterationLevel::altered(level, tag)?,
        _ => {
            return Err(DatasetError::CategoryMismatch {
                name: filename.to_string(),
                category,
            })
        }
    };
    Ok((identity, alteration))
}

/// Inverse of [`parse_socofing_name`] (without extension handling beyond `ext`).
pub fn socofing_name(identity: &IdentityKey, method: Option<MethodTag>, ext: &str) -> String {
    let mut s = format!(
        "{}__{}_{}_{}_finger",
        identity.subject_id(),
        identity.gender,
        identity.hand,
        identity.finger
    );
    if let Some(tag) = method {
        s.push('_');
        s.push_str(tag.as_str());
    }
    s.push('.');
    s.push_str(ext);
    s
}
