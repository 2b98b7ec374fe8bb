//! Sweep thresholds over all three altered tiers and print the report CSV
//! plus the derived statistics.

use afrnet::dataset::synthetic::{generate, SyntheticConfig};
use afrnet::dataset::{parse_socofing_name, FingerprintRecord, Level};
use afrnet::eval::{emit_report, stats_from_reports, sweep, EmbeddingSet, ReportFormat, SweepConfig};
use afrnet::features::{batch_extract, BaselineExtractor};
use afrnet::matcher::GroundTruth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let images = generate(&SyntheticConfig::default());
    let mut records = std::collections::BTreeMap::<Level, Vec<FingerprintRecord>>::new();
    for i in &images {
        let list = records.entry(i.category).or_default();
        let (identity, alteration) = parse_socofing_name(&i.file_name, i.category)?;
        list.push(FingerprintRecord {
            record_id: format!("{}.png", list.len() + 1),
            identity,
            alteration,
            pixels: i.pixels.clone(),
            source_name: i.file_name.clone(),
        });
    }
    let mut gt = GroundTruth::new();
    for r in &records[&Level::Real] {
        for level in Level::ALTERED {
            for a in &records[&level] {
                gt.insert(r.record_ref(), a.record_ref(), r.identity == a.identity);
            }
        }
    }
    let mut set = EmbeddingSet::new();
    for (level, recs) in &records {
        set.insert(*level, batch_extract(recs, &BaselineExtractor, 32)?);
    }
    let config = SweepConfig {
        thresholds: vec![0.95, 0.92, 0.9, 0.85, 0.82, 0.72],
        ..SweepConfig::default()
    };
    let reports = sweep(&config, &set, Some(&gt))?;
    print!("{}", String::from_utf8(emit_report(&reports, ReportFormat::Csv))?);
    println!("{}", serde_json::to_string_pretty(&stats_from_reports(&reports))?);
    Ok(())
}
