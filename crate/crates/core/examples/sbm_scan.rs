//! Scans a hierarchical SBM and compares the selected scales with the
//! planted levels.
//!
//! ```text
//! cargo run --release -p multistab-core --example sbm_scan -- [seed]
//! ```

use multistab_core::analysis::nvi;
use multistab_core::{multiscale_sbm, run_scan, Partition, SbmParams, ScanConfig};

fn main() -> multistab_core::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let (graph, truth) = multiscale_sbm(&SbmParams::default(), seed)?;
    let config = ScanConfig::default();
    let scan = run_scan(&graph, &config)?;
    let levels: Vec<Partition> = truth.levels.clone();

    println!("idx  log10_t  communities  quality     nvi_t   block_nvi  nvi_to_levels");
    for (i, s) in scan.scales.iter().enumerate() {
        let to_levels: Vec<String> = levels
            .iter()
            .map(|l| format!("{:.3}", nvi(&s.best_partition, l).unwrap()))
            .collect();
        let mark = if scan.selection.selected.contains(&i) { "*" } else { " " };
        println!(
            "{mark}{i:>3}  {:>7.3}  {:>11}  {:>9.5}  {:>6.3}  {:>9.4}  {}",
            s.log_scale,
            s.n_communities(),
            s.best_quality,
            s.nvi,
            scan.block_nvi[i],
            to_levels.join(" ")
        );
    }
    println!("selected: {:?} (fallback: {})", scan.selection.selected, scan.selection.fallback);
    Ok(())
}
