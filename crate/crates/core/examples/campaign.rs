//! A seeded campaign, its determinism, and single-record replay.
//!
//! Run with `cargo run --release --example campaign`.

use cb_lab::campaign::{replay_record, run_campaign, CampaignSpec, Target};
use cb_lab::cover::DEFAULT_NODE_BUDGET;
use cb_lab::{FieldSpec, Result};

fn main() -> Result<()> {
    let spec = CampaignSpec::new(Target::Conjecture, vec![1, 2, 3], vec![1, 2, 3], FieldSpec::prime(101)?, 10, 2024);
    let report = run_campaign(&spec)?;
    let s = &report.summary;
    println!("{} trials, {} passed, {} violations, {} draws discarded", s.trials, s.passed, s.violations, s.discarded_draws);
    println!("family mix: {:?}", s.family_mix);

    let again = run_campaign(&spec)?;
    println!("rerun identical: {}", report.deterministic_json() == again.deterministic_json());

    let rec = &report.records[17];
    println!("record {}: d={} r={} {:?}", rec.index, rec.d, rec.r, rec.verdicts);
    let replay = replay_record(rec, DEFAULT_NODE_BUDGET)?;
    println!("replayed: points match {:?}, verdicts match {}", replay.points_match, replay.verdicts_match);

    // Other targets use the same spec shape.
    for target in [Target::Excision, Target::Monotonicity, Target::Balancing, Target::Tightness] {
        let spec = CampaignSpec { target, ..spec.clone() };
        let rep = run_campaign(&spec)?;
        let s = &rep.summary;
        println!("{target:?}: {} passed, {} skipped, {} violations of {}", s.passed, s.skipped, s.violations, s.trials);
    }
    Ok(())
}
