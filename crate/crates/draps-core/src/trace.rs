//! Ingestion of container usage logs in docker-stats CSV form.
//!
//! The input format is one row per container per sampling instant:
//!
//! ```text
//! tick_s,container,service,cpu_pct,mem_bytes,net_rx_bytes,net_tx_bytes,blk_read_bytes,blk_write_bytes
//! ```
//!
//! `cpu_pct` is percent of one core (200 = two full cores) and
//! `mem_bytes` is a gauge. The network and block columns are cumulative
//! byte counters, as a stats endpoint reports them; ingestion converts
//! them to rates by first-differencing consecutive rows of the same
//! container. The first row of a container has no predecessor, so its
//! rates are zero.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::demand::DemandTrace;
use crate::error::{Error, Result};
use crate::model::{ContainerId, Resources, ServiceId};

/// Expected header, in order.
pub const STATS_HEADER: [&str; 9] = [
    "tick_s",
    "container",
    "service",
    "cpu_pct",
    "mem_bytes",
    "net_rx_bytes",
    "net_tx_bytes",
    "blk_read_bytes",
    "blk_write_bytes",
];

/// One parsed row, still in counter form.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub tick_s: f64,
    pub container: ContainerId,
    pub service: ServiceId,
    pub cpu_pct: f64,
    pub mem_bytes: f64,
    pub net_rx_bytes: f64,
    pub net_tx_bytes: f64,
    pub blk_read_bytes: f64,
    pub blk_write_bytes: f64,
    /// 1-based line in the source file, for diagnostics.
    pub line: u64,
}

/// A parsed usage log.
#[derive(Debug, Clone, Default)]
pub struct StatsLog {
    rows: Vec<StatsRow>,
}

fn bad_line(line: u64, message: impl Into<String>) -> Error {
    Error::Trace {
        line,
        message: message.into(),
    }
}

fn parse_field(raw: &str, name: &str, line: u64) -> Result<f64> {
    let value: f64 = raw
        .trim()
        .parse()
        .map_err(|_| bad_line(line, format!("column `{name}` is not a number: `{raw}`")))?;
    if !value.is_finite() || value < 0.0 {
        return Err(bad_line(
            line,
            format!("column `{name}` must be finite and non-negative, got {value}"),
        ));
    }
    Ok(value)
}

impl StatsLog {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_reader(file)
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let header = rdr.headers()?.clone();
        let expected: Vec<&str> = STATS_HEADER.to_vec();
        let actual: Vec<&str> = header.iter().collect();
        if actual != expected {
            return Err(bad_line(
                1,
                format!(
                    "unexpected header: got `{}`, want `{}`",
                    actual.join(","),
                    expected.join(",")
                ),
            ));
        }

        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record
                .position()
                .map(|p| p.line())
                .unwrap_or(rows.len() as u64 + 2);
            if record.len() != STATS_HEADER.len() {
                return Err(bad_line(
                    line,
                    format!("expected {} columns, got {}", STATS_HEADER.len(), record.len()),
                ));
            }
            let container = record[1].to_string();
            let service = record[2].to_string();
            if container.is_empty() || service.is_empty() {
                return Err(bad_line(line, "container and service must be non-empty"));
            }
            rows.push(StatsRow {
                tick_s: parse_field(&record[0], "tick_s", line)?,
                container: ContainerId::new(container),
                service: ServiceId::new(service),
                cpu_pct: parse_field(&record[3], "cpu_pct", line)?,
                mem_bytes: parse_field(&record[4], "mem_bytes", line)?,
                net_rx_bytes: parse_field(&record[5], "net_rx_bytes", line)?,
                net_tx_bytes: parse_field(&record[6], "net_tx_bytes", line)?,
                blk_read_bytes: parse_field(&record[7], "blk_read_bytes", line)?,
                blk_write_bytes: parse_field(&record[8], "blk_write_bytes", line)?,
                line,
            });
        }
        if rows.is_empty() {
            return Err(bad_line(1, "no data rows"));
        }
        let log = StatsLog { rows };
        log.validate_monotonic()?;
        Ok(log)
    }

    /// Each container's rows must advance in time and its cumulative
    /// byte counters must never decrease; anything else means the log
    /// was corrupted or mis-concatenated.
    fn validate_monotonic(&self) -> Result<()> {
        for rows in self.per_container().values() {
            for pair in rows.windows(2) {
                let (prev, cur) = (pair[0], pair[1]);
                if cur.tick_s <= prev.tick_s {
                    return Err(bad_line(
                        cur.line,
                        format!(
                            "tick_s {} for container `{}` does not increase past {}",
                            cur.tick_s, cur.container, prev.tick_s
                        ),
                    ));
                }
                for (name, a, b) in [
                    ("net_rx_bytes", prev.net_rx_bytes, cur.net_rx_bytes),
                    ("net_tx_bytes", prev.net_tx_bytes, cur.net_tx_bytes),
                    ("blk_read_bytes", prev.blk_read_bytes, cur.blk_read_bytes),
                    ("blk_write_bytes", prev.blk_write_bytes, cur.blk_write_bytes),
                ] {
                    if b < a {
                        return Err(bad_line(
                            cur.line,
                            format!("cumulative counter `{name}` decreased from {a} to {b}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> &[StatsRow] {
        &self.rows
    }

    /// Services present in the log, in id order.
    pub fn services(&self) -> Vec<ServiceId> {
        let mut ids: Vec<ServiceId> = self.rows.iter().map(|r| r.service.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Rows grouped per container, preserving file order within each
    /// group (which `validate_monotonic` has checked is time order).
    fn per_container(&self) -> BTreeMap<(ServiceId, ContainerId), Vec<&StatsRow>> {
        let mut grouped: BTreeMap<(ServiceId, ContainerId), Vec<&StatsRow>> = BTreeMap::new();
        for row in &self.rows {
            grouped
                .entry((row.service.clone(), row.container.clone()))
                .or_default()
                .push(row);
        }
        grouped
    }

    /// Converts each container's rows to usage vectors: memory and CPU
    /// taken directly (CPU rescaled from percent to core-fraction), I/O
    /// counters first-differenced into bytes/second.
    fn container_series(&self) -> BTreeMap<(ServiceId, ContainerId), Vec<(f64, Resources)>> {
        let grouped = self.per_container();
        let mut series = BTreeMap::new();
        for ((service, container), rows) in grouped {
            let mut samples = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let (network, block_io) = if i == 0 {
                    (0.0, 0.0)
                } else {
                    let prev = rows[i - 1];
                    let dt = row.tick_s - prev.tick_s;
                    (
                        ((row.net_rx_bytes + row.net_tx_bytes)
                            - (prev.net_rx_bytes + prev.net_tx_bytes))
                            / dt,
                        ((row.blk_read_bytes + row.blk_write_bytes)
                            - (prev.blk_read_bytes + prev.blk_write_bytes))
                            / dt,
                    )
                };
                samples.push((
                    row.tick_s,
                    Resources::new(row.mem_bytes, row.cpu_pct / 100.0, network, block_io),
                ));
            }
            series.insert((service, container), samples);
        }
        series
    }

    /// All usage vectors per service as a flat list, containers in id
    /// order and each container's samples in time order. This is the
    /// sample population that per-service averages are taken over.
    pub fn usage_samples(&self) -> BTreeMap<ServiceId, Vec<Resources>> {
        let mut out: BTreeMap<ServiceId, Vec<Resources>> = BTreeMap::new();
        for ((service, _), samples) in self.container_series() {
            out.entry(service)
                .or_default()
                .extend(samples.into_iter().map(|(_, u)| u));
        }
        out
    }

    /// One replayable demand trace per service, keyed by the service id.
    ///
    /// When a service has several containers in the log, samples at the
    /// same instant are averaged, so the trace describes one typical
    /// replica.
    pub fn demand_traces(&self) -> Result<BTreeMap<ServiceId, DemandTrace>> {
        let series = self.container_series();
        let mut per_service: BTreeMap<ServiceId, BTreeMap<u64, Vec<Resources>>> = BTreeMap::new();
        for ((service, _), samples) in series {
            let buckets = per_service.entry(service).or_default();
            for (tick, usage) in samples {
                // Non-negative floats order the same as their bit
                // patterns, so the bits make a cheap ordered key.
                buckets.entry(tick.to_bits()).or_default().push(usage);
            }
        }

        let mut traces = BTreeMap::new();
        for (service, buckets) in per_service {
            let ticks: Vec<f64> = buckets.keys().map(|&b| f64::from_bits(b)).collect();
            let interval = if ticks.len() >= 2 {
                ticks[1] - ticks[0]
            } else {
                1.0
            };
            let samples: Vec<Resources> = buckets
                .values()
                .map(|group| Resources::mean(group).expect("bucket is non-empty"))
                .collect();
            let trace = DemandTrace::new(service.as_str(), interval, samples)?;
            traces.insert(service, trace);
        }
        Ok(traces)
    }
}
