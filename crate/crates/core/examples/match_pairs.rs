//! Exhaustive real x altered matching at one threshold, with ground truth.

use afrnet::dataset::synthetic::{generate, SyntheticConfig};
use afrnet::dataset::{FingerprintRecord, Level, RecordRef};
use afrnet::eval::gt_metrics;
use afrnet::features::{batch_extract, BaselineExtractor};
use afrnet::matcher::{best_match, match_all, GroundTruth};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let threshold: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.82);
    let images = generate(&SyntheticConfig::default());
    let pick = |level: Level| -> Vec<FingerprintRecord> {
        images
            .iter()
            .filter(|i| i.category == level)
            .enumerate()
            .map(|(n, i)| {
                let (identity, alteration) = afrnet::dataset::parse_socofing_name(&i.file_name, level).unwrap();
                FingerprintRecord {
                    record_id: format!("{}.png", n + 1),
                    identity,
                    alteration,
                    pixels: i.pixels.clone(),
                    source_name: i.file_name.clone(),
                }
            })
            .collect()
    };
    let (reals, easy) = (pick(Level::Real), pick(Level::Easy));
    let mut gt = GroundTruth::new();
    for r in &reals {
        for a in &easy {
            gt.insert(r.record_ref(), a.record_ref(), r.identity == a.identity);
        }
    }
    let rv = batch_extract(&reals, &BaselineExtractor, 16)?;
    let av = batch_extract(&easy, &BaselineExtractor, 16)?;
    let decisions = match_all(&rv, &av, threshold, Some(&gt))?;
    let matched = decisions.iter().filter(|d| d.matched).count();
    let m = gt_metrics(&decisions)?;
    println!("threshold {threshold}: {matched} of {} pairs matched", decisions.len());
    println!("precision {:?} recall {:?} f1 {:?}", m.precision, m.recall, m.f1);

    let (best, score) = best_match(&av[0], &rv)?;
    let truth = easy[0].identity;
    let owner = reals.iter().find(|r| r.identity == truth).map(|r| RecordRef::new(Level::Real, r.record_id.clone()));
    println!("{} best matches {best} ({:.4}); true owner {:?}", av[0].record_ref, score.value, owner);
    Ok(())
}
