//! Correlations and per-mode confidence intervals over the published
//! nine-row results table, and its plot-data form.

use afrnet::eval::{emit_plot_data, stats_from_reports, reference_results};
use afrnet::fixed;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = reference_results();
    let summary = stats_from_reports(&rows);
    for c in &summary.correlations {
        println!("{} ~ {}: r = {}, p = {:.2e}", c.x_name, c.y_name, fixed(c.r, 4), c.p_value);
    }
    for ci in &summary.intervals {
        println!(
            "{:?}: mean {} sd {} 95% [{}, {}]",
            ci.mode.expect("per-mode interval"),
            fixed(ci.mean, 2),
            fixed(ci.sample_std, 2),
            fixed(ci.lower, 2),
            fixed(ci.upper, 2)
        );
    }
    let plot = String::from_utf8(emit_plot_data(&rows)?)?;
    println!("{}", plot.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}
