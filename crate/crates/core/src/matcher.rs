//! Cosine similarity between embeddings, threshold decisions and all-pairs
//! matching of a real gallery against an altered probe set.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{IdentityKey, Manifest, RecordRef};
use crate::features::EmbeddingVector;
use crate::report_fmt::fixed;

#[derive(Debug, Error, PartialEq)]
pub enum MatchError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("zero-magnitude vector {0}")]
    ZeroVector(String),
    #[error("threshold {0} outside (0, 1)")]
    BadThreshold(f64),
    #[error("empty gallery")]
    EmptyGallery,
    #[error("empty {0} set")]
    EmptyInput(&'static str),
    #[error("vectors from more than one extractor: {0:?} and {1:?}")]
    MixedExtractors(String, String),
    #[error("pair ({real}, {altered}): {source}")]
    Pair {
        real: String,
        altered: String,
        #[source]
        source: Box<MatchError>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub real_ref: RecordRef,
    pub altered_ref: RecordRef,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchDecision {
    pub score: SimilarityScore,
    pub threshold: f64,
    pub matched: bool,
    pub genuine: Option<bool>,
}

/// Euclidean norm, accumulated in f64.
pub fn magnitude(values: &[f32]) -> f64 {
    values.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt()
}

/// Cosine of the angle between two raw vectors, clamped to `[-1, 1]`.
pub fn cosine_values(a: &[f32], b: &[f32]) -> Result<f64, MatchError> {
    if a.len() != b.len() {
        return Err(MatchError::DimMismatch(a.len(), b.len()));
    }
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (f64::from(x), f64::from(y));
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 {
        return Err(MatchError::ZeroVector("left".into()));
    }
    if nb == 0.0 {
        return Err(MatchError::ZeroVector("right".into()));
    }
    // na * nb is commutative in IEEE arithmetic, so cos(a,b) == cos(b,a) bit-for-bit
    Ok((dot / (na * nb).sqrt()).clamp(-1.0, 1.0))
}

pub fn cosine(real: &EmbeddingVector, altered: &EmbeddingVector) -> Result<SimilarityScore, MatchError> {
    let value = cosine_values(real.values(), altered.values()).map_err(|e| match e {
        MatchError::ZeroVector(side) => MatchError::ZeroVector(if side == "left" {
            real.record_ref.to_string()
        } else {
            altered.record_ref.to_string()
        }),
        e => e,
    })?;
    Ok(SimilarityScore {
        real_ref: real.record_ref.clone(),
        altered_ref: altered.record_ref.clone(),
        value,
    })
}

pub fn check_threshold(threshold: f64) -> Result<(), MatchError> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(MatchError::BadThreshold(threshold))
    }
}

/// A pair matches only if its score strictly exceeds the threshold.
pub fn decide(score: SimilarityScore, threshold: f64) -> Result<MatchDecision, MatchError> {
    check_threshold(threshold)?;
    Ok(MatchDecision {
        matched: score.value > threshold,
        score,
        threshold,
        genuine: None,
    })
}

/// Genuine/impostor labels for (real, altered) pairs.
#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    labels: HashMap<(RecordRef, RecordRef), bool>,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, real: RecordRef, altered: RecordRef, genuine: bool) {
        self.labels.insert((real, altered), genuine);
    }

    pub fn get(&self, real: &RecordRef, altered: &RecordRef) -> Option<bool> {
        self.labels.get(&(real.clone(), altered.clone())).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn extend(&mut self, other: GroundTruth) {
        self.labels.extend(other.labels);
    }

    /// Label every pair across the two manifests: genuine iff identities match.
    pub fn from_manifests(real: &Manifest, altered: &Manifest) -> Self {
        let refs = |m: &Manifest| -> Vec<(RecordRef, IdentityKey)> {
            m.entries
                .iter()
                .map(|e| (RecordRef::new(e.alteration.level(), e.record_id.clone()), e.identity))
                .collect()
        };
        let mut gt = Self::new();
        let alts = refs(altered);
        for (r, rid) in refs(real) {
            for (a, aid) in &alts {
                gt.insert(r.clone(), a.clone(), rid == *aid);
            }
        }
        gt
    }
}

fn uniform_extractor<'a>(sets: &[&'a [EmbeddingVector]]) -> Result<Option<&'a str>, MatchError> {
    let mut id: Option<&str> = None;
    for v in sets.iter().flat_map(|s| s.iter()) {
        match id {
            None => id = Some(v.extractor_id()),
            Some(i) if i != v.extractor_id() => {
                return Err(MatchError::MixedExtractors(i.to_string(), v.extractor_id().to_string()))
            }
            _ => {}
        }
    }
    Ok(id)
}

/// Every (real, altered) score, real-major.
pub fn score_grid(reals: &[EmbeddingVector], altereds: &[EmbeddingVector]) -> Result<Vec<SimilarityScore>, MatchError> {
    if reals.is_empty() {
        return Err(MatchError::EmptyInput("real"));
    }
    if altereds.is_empty() {
        return Err(MatchError::EmptyInput("altered"));
    }
    uniform_extractor(&[reals, altereds])?;
    let n = altereds.len();
    (0..reals.len() * n)
        .into_par_iter()
        .map(|k| {
            let (r, a) = (&reals[k / n], &altereds[k % n]);
            cosine(r, a).map_err(|e| MatchError::Pair {
                real: r.record_ref.to_string(),
                altered: a.record_ref.to_string(),
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn match_all(
    reals: &[EmbeddingVector],
    altereds: &[EmbeddingVector],
    threshold: f64,
    ground_truth: Option<&GroundTruth>,
) -> Result<Vec<MatchDecision>, MatchError> {
    check_threshold(threshold)?;
    let scores = score_grid(reals, altereds)?;
    scores
        .into_iter()
        .map(|s| {
            let genuine = ground_truth.and_then(|gt| gt.get(&s.real_ref, &s.altered_ref));
            let mut d = decide(s, threshold)?;
            d.genuine = genuine;
            Ok(d)
        })
        .collect()
}

/// Highest-scoring gallery entry; ties go to the smallest record id.
pub fn best_match(altered: &EmbeddingVector, reals: &[EmbeddingVector]) -> Result<(RecordRef, SimilarityScore), MatchError> {
    let mut best: Option<SimilarityScore> = None;
    for r in reals {
        let s = cosine(r, altered)?;
        let better = match &best {
            None => true,
            Some(b) => match s.value.partial_cmp(&b.value) {
                Some(Ordering::Greater) => true,
                Some(Ordering::Equal) => s.real_ref.record_id < b.real_ref.record_id,
                _ => false,
            },
        };
        if better {
            best = Some(s);
        }
    }
    let best = best.ok_or(MatchError::EmptyGallery)?;
    Ok((best.real_ref.clone(), best))
}

/// `real_ref,altered_ref,similarity,threshold,matched,genuine`
pub fn write_decisions_csv<W: Write>(decisions: &[MatchDecision], mut w: W) -> std::io::Result<()> {
    writeln!(w, "real_ref,altered_ref,similarity,threshold,matched,genuine")?;
    for d in decisions {
        let genuine = d.genuine.map(|g| g.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            d.score.real_ref,
            d.score.altered_ref,
            fixed(d.score.value, 4),
            d.threshold,
            d.matched,
            genuine
        )?;
    }
    w.flush()
}
