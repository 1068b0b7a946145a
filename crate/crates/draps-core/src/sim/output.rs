//! Run outputs: the metrics CSV, the events CSV and the summary.
//!
//! Output is rendered to strings with stable formatting — floats print
//! in shortest round-trip form — so identical runs produce byte-identical
//! files, and values parsed back from the CSVs compare exactly against
//! the in-memory results.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::metrics::UtilizationRecord;
use crate::scheduler::SchedulerKind;

use super::event::EventLog;

pub const METRICS_HEADER: &str =
    "tick_s,worker,mem_util,cpu_util,net_util,blk_util,worker_max,n_containers,alive";
pub const EVENTS_HEADER: &str = "tick_s,event,container,service,from_worker,to_worker,detail";

/// Seconds elapsed at `tick`, printed without trailing zeros (whole
/// seconds print as integers).
fn tick_s(tick: u64, tick_seconds: f64) -> String {
    format!("{}", tick as f64 * tick_seconds)
}

pub fn metrics_csv(records: &[UtilizationRecord], tick_seconds: f64) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            tick_s(r.tick, tick_seconds),
            r.worker,
            r.ratios.memory,
            r.ratios.cpu,
            r.ratios.network,
            r.ratios.block_io,
            r.worker_max,
            r.n_containers,
            r.alive,
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn events_csv(events: &EventLog, tick_seconds: f64) -> String {
    let mut out = String::with_capacity(48 * (events.len() + 1));
    out.push_str(EVENTS_HEADER);
    out.push('\n');
    let opt = |s: Option<String>| s.unwrap_or_default();
    for e in events.iter() {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            tick_s(e.tick, tick_seconds),
            e.kind.as_str(),
            opt(e.container.as_ref().map(|c| c.to_string())),
            opt(e.service.as_ref().map(|s| s.to_string())),
            opt(e.from_worker.as_ref().map(|w| w.to_string())),
            opt(e.to_worker.as_ref().map(|w| w.to_string())),
            e.detail,
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// End-of-run totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scheduler: SchedulerKind,
    pub ticks: u64,
    /// Cluster-wide peak ratio at the final tick.
    pub final_nu: f64,
    /// Highest cluster-wide ratio seen at any tick.
    pub peak_nu: f64,
    /// Kill events (overload cascades plus migration source removals).
    pub kills: u64,
    pub migrations: u64,
    /// Arrivals no strategy could place.
    pub rejected: u64,
    pub worker_overloads: u64,
    /// Cumulative heartbeat payload bytes over the run.
    pub heartbeat_bytes: u64,
    /// Containers per worker at the final tick.
    pub final_containers: BTreeMap<String, usize>,
    /// Highest memory utilization each worker ever reached.
    pub peak_memory_util: BTreeMap<String, f64>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut json =
            serde_json::to_string_pretty(self).expect("summary serialization cannot fail");
        json.push('\n');
        json
    }

    /// Worker with the highest peak memory utilization, with that peak.
    pub fn most_loaded_by_memory(&self) -> Option<(&str, f64)> {
        self.peak_memory_util
            .iter()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("utilizations are finite"))
            .map(|(w, &v)| (w.as_str(), v))
    }
}
