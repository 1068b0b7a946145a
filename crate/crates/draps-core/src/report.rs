//! Side-by-side evaluation of several strategies on one scenario.
//!
//! Every strategy replays the same arrival schedule and demand traces;
//! only the placement and migration decisions differ. The headline
//! figure is the peak cluster bottleneck: the strategy that keeps the
//! worst worker/resource pair lowest wins.

use serde::Serialize;

use crate::error::Result;
use crate::scheduler::SchedulerKind;
use crate::sim::{run, RunOutput, Scenario};

/// One strategy's results, reduced to the comparable figures.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub scheduler: SchedulerKind,
    pub peak_nu: f64,
    pub final_nu: f64,
    pub kills: u64,
    pub migrations: u64,
    pub rejected: u64,
    pub worker_overloads: u64,
    pub heartbeat_bytes: u64,
}

impl CompareRow {
    fn from_run(output: &RunOutput) -> Self {
        let s = &output.summary;
        CompareRow {
            scheduler: s.scheduler,
            peak_nu: s.peak_nu,
            final_nu: s.final_nu,
            kills: s.kills,
            migrations: s.migrations,
            rejected: s.rejected,
            worker_overloads: s.worker_overloads,
            heartbeat_bytes: s.heartbeat_bytes,
        }
    }
}

/// The cross-strategy comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    /// Strategy with the lowest peak bottleneck; ties go to the earlier
    /// entry in the canonical strategy order.
    pub winner: SchedulerKind,
}

impl CompareReport {
    pub fn from_runs(outputs: &[RunOutput]) -> Self {
        assert!(!outputs.is_empty(), "a comparison needs at least one run");
        let rows: Vec<CompareRow> = outputs.iter().map(CompareRow::from_run).collect();
        let mut winner = &rows[0];
        for row in &rows[1..] {
            let better = row.peak_nu < winner.peak_nu
                || (row.peak_nu == winner.peak_nu && row.scheduler < winner.scheduler);
            if better {
                winner = row;
            }
        }
        let winner = winner.scheduler;
        CompareReport { rows, winner }
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization is infallible");
        text.push('\n');
        text
    }

    pub fn row(&self, scheduler: SchedulerKind) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.scheduler == scheduler)
    }
}

/// Runs `scenario` once per strategy (same seed, same schedule) and
/// returns the outputs in the order given.
pub fn compare(scenario: &Scenario, schedulers: &[SchedulerKind]) -> Result<Vec<RunOutput>> {
    let mut outputs = Vec::with_capacity(schedulers.len());
    for &scheduler in schedulers {
        let variant = scenario.clone().with_scheduler(scheduler);
        outputs.push(run(&variant)?);
    }
    Ok(outputs)
}
