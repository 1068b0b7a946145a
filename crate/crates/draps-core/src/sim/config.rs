//! Scenario configuration: the JSON document describing a run, and its
//! validated in-memory form.
//!
//! A scenario names the workers (with capacities), the services (each
//! bound to a demand trace), the demand traces themselves — inline or
//! loaded from usage-log CSV files — and the arrival schedule. Runtime
//! knobs (tick length, heartbeat period, alert threshold, warmup/window
//! sizes, filters, seed) all have defaults matching a five-second
//! heartbeat regime.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::demand::{DemandConfig, DemandTrace};
use crate::error::{Error, Result};
use crate::model::{Resources, ServiceId, ServiceMode, ServiceSpec, TraceId, WorkerNode};
use crate::scheduler::{FilterSet, SchedulerKind};
use crate::trace::StatsLog;

fn default_tick_seconds() -> f64 {
    1.0
}

fn default_heartbeat_period() -> u64 {
    5
}

fn default_alert_threshold() -> f64 {
    0.10
}

fn default_alert_cooldown() -> u64 {
    3
}

fn default_warmup_samples() -> usize {
    12
}

fn default_window_samples() -> usize {
    6
}

fn default_count() -> u64 {
    1
}

fn default_mode() -> ServiceMode {
    ServiceMode::Replicated
}

/// Scenario document as it appears on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Wall-clock seconds per simulation tick.
    #[serde(default = "default_tick_seconds")]
    pub tick_seconds: f64,
    /// Number of ticks to simulate.
    pub max_ticks: u64,
    /// Seed for the random strategy; everything else is deterministic.
    #[serde(default)]
    pub seed: u64,
    pub scheduler: SchedulerKind,
    /// Ticks between heartbeats; also the worker-side averaging window.
    #[serde(default = "default_heartbeat_period")]
    pub heartbeat_period_ticks: u64,
    /// Remaining-fraction threshold below which a worker alerts.
    #[serde(default = "default_alert_threshold")]
    pub alert_threshold: f64,
    /// Alert rate limit, in heartbeat periods.
    #[serde(default = "default_alert_cooldown")]
    pub alert_cooldown_heartbeats: u64,
    #[serde(default = "default_warmup_samples")]
    pub warmup_samples: usize,
    #[serde(default = "default_window_samples")]
    pub window_samples: usize,
    #[serde(default)]
    pub filters: FilterSet,
    pub workers: Vec<WorkerConfig>,
    pub services: Vec<ServiceConfig>,
    /// Traces defined inline.
    #[serde(default)]
    pub traces: Vec<TraceConfig>,
    /// Usage-log CSV files to ingest as traces, one trace per service
    /// column value. Paths are relative to the scenario file.
    #[serde(default)]
    pub trace_files: Vec<PathBuf>,
    #[serde(default)]
    pub arrivals: Vec<ArrivalConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkerConfig {
    pub id: String,
    pub capacity: Resources,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub plugins: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub id: String,
    #[serde(default = "default_mode")]
    pub mode: ServiceMode,
    /// Trace replayed by each container of this service.
    pub trace: String,
    #[serde(default)]
    pub reservation: Option<Resources>,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub required_plugins: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub id: String,
    pub sample_interval_s: f64,
    /// Samples as `[memory, cpu, network, block_io]` quadruples.
    pub samples: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalConfig {
    pub tick: u64,
    pub service: String,
    #[serde(default = "default_count")]
    pub count: u64,
}

impl ScenarioConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_json(&text)
    }
}

/// One entry of the resolved arrival schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrival {
    pub tick: u64,
    pub service: ServiceId,
    pub count: u64,
}

/// A validated scenario, traces resolved and ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub tick_seconds: f64,
    pub max_ticks: u64,
    pub seed: u64,
    pub scheduler: SchedulerKind,
    pub heartbeat_period_ticks: u64,
    pub alert_threshold: f64,
    /// Cooldown in ticks (configured in heartbeat periods).
    pub alert_cooldown_ticks: u64,
    pub demand: DemandConfig,
    pub filters: FilterSet,
    pub workers: Vec<WorkerNode>,
    pub services: BTreeMap<ServiceId, ServiceSpec>,
    pub traces: BTreeMap<TraceId, DemandTrace>,
    /// Sorted by tick; entries at the same tick keep declaration order.
    pub arrivals: Vec<Arrival>,
}

impl Scenario {
    /// Loads and validates a scenario file, resolving trace file paths
    /// relative to the scenario's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let config = ScenarioConfig::from_path(path)?;
        Self::resolve(config, path.parent())
    }

    /// Validates a parsed configuration and resolves its traces.
    pub fn resolve(config: ScenarioConfig, base_dir: Option<&Path>) -> Result<Self> {
        let fail = |msg: String| Err(Error::Config(msg));

        if config.max_ticks == 0 {
            return fail("max_ticks must be at least 1".into());
        }
        if !(config.tick_seconds.is_finite() && config.tick_seconds > 0.0) {
            return fail("tick_seconds must be positive".into());
        }
        if config.heartbeat_period_ticks == 0 {
            return fail("heartbeat_period_ticks must be at least 1".into());
        }
        if !(config.alert_threshold > 0.0 && config.alert_threshold < 1.0) {
            return fail("alert_threshold must lie strictly between 0 and 1".into());
        }
        if config.warmup_samples == 0 || config.window_samples == 0 {
            return fail("warmup_samples and window_samples must be at least 1".into());
        }
        if config.workers.is_empty() {
            return fail("at least one worker is required".into());
        }

        let mut workers = Vec::with_capacity(config.workers.len());
        let mut worker_ids = BTreeSet::new();
        for wc in &config.workers {
            if !worker_ids.insert(wc.id.clone()) {
                return fail(format!("duplicate worker id `{}`", wc.id));
            }
            let mut node = WorkerNode::new(wc.id.as_str(), wc.capacity)?;
            node.labels = wc.labels.iter().cloned().collect();
            node.plugins = wc.plugins.iter().cloned().collect();
            workers.push(node);
        }

        // Traces: inline definitions plus ingested usage logs.
        let mut traces: BTreeMap<TraceId, DemandTrace> = BTreeMap::new();
        for tc in &config.traces {
            let samples: Vec<Resources> = tc
                .samples
                .iter()
                .map(|&[m, c, n, b]| Resources::new(m, c, n, b))
                .collect();
            let trace = DemandTrace::new(tc.id.as_str(), tc.sample_interval_s, samples)?;
            if traces.insert(trace.id.clone(), trace).is_some() {
                return fail(format!("duplicate trace id `{}`", tc.id));
            }
        }
        for file in &config.trace_files {
            let path = match base_dir {
                Some(dir) if file.is_relative() => dir.join(file),
                _ => file.clone(),
            };
            let log = StatsLog::from_path(&path).map_err(|e| {
                Error::Config(format!("trace file `{}`: {e}", path.display()))
            })?;
            for (service, trace) in log.demand_traces()? {
                let id = TraceId::new(service.as_str());
                if traces.insert(id, trace).is_some() {
                    return fail(format!(
                        "trace `{service}` from `{}` collides with an existing trace",
                        path.display()
                    ));
                }
            }
        }

        let mut services = BTreeMap::new();
        for sc in &config.services {
            let id = ServiceId::new(sc.id.as_str());
            let trace_id = TraceId::new(sc.trace.as_str());
            if !traces.contains_key(&trace_id) {
                return fail(format!(
                    "service `{}` references undefined trace `{}`",
                    sc.id, sc.trace
                ));
            }
            if let Some(reservation) = &sc.reservation {
                reservation.validate(&format!("reservation of service `{}`", sc.id))?;
            }
            let spec = ServiceSpec {
                id: id.clone(),
                mode: sc.mode,
                trace: trace_id,
                reservation: sc.reservation,
                constraints: sc.constraints.iter().cloned().collect(),
                required_plugins: sc.required_plugins.iter().cloned().collect(),
            };
            if services.insert(id, spec).is_some() {
                return fail(format!("duplicate service id `{}`", sc.id));
            }
        }

        let mut arrivals = Vec::with_capacity(config.arrivals.len());
        for ac in &config.arrivals {
            let service = ServiceId::new(ac.service.as_str());
            if !services.contains_key(&service) {
                return fail(format!(
                    "arrival at tick {} references undefined service `{}`",
                    ac.tick, ac.service
                ));
            }
            if ac.count == 0 {
                return fail(format!(
                    "arrival at tick {} has count 0",
                    ac.tick
                ));
            }
            if ac.tick >= config.max_ticks {
                return fail(format!(
                    "arrival at tick {} is beyond max_ticks {}",
                    ac.tick, config.max_ticks
                ));
            }
            arrivals.push(Arrival {
                tick: ac.tick,
                service,
                count: ac.count,
            });
        }
        // Stable sort: same-tick arrivals keep their declared order.
        arrivals.sort_by_key(|a| a.tick);

        Ok(Scenario {
            tick_seconds: config.tick_seconds,
            max_ticks: config.max_ticks,
            seed: config.seed,
            scheduler: config.scheduler,
            heartbeat_period_ticks: config.heartbeat_period_ticks,
            alert_threshold: config.alert_threshold,
            alert_cooldown_ticks: config
                .alert_cooldown_heartbeats
                .saturating_mul(config.heartbeat_period_ticks),
            demand: DemandConfig {
                warmup_samples: config.warmup_samples,
                window_samples: config.window_samples,
            },
            filters: config.filters,
            workers,
            services,
            traces,
            arrivals,
        })
    }

    pub fn with_scheduler(mut self, scheduler: SchedulerKind) -> Self {
        self.scheduler = scheduler;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn trace_for(&self, service: &ServiceSpec) -> &DemandTrace {
        self.traces
            .get(&service.trace)
            .expect("service traces are resolved during validation")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "max_ticks": 10,
            "scheduler": "spread",
            "workers": [
                {"id": "w1", "capacity": {"memory": 4e9, "cpu": 1.0, "network": 1e8, "block_io": 1e8}}
            ],
            "services": [
                {"id": "svc", "trace": "flat"}
            ],
            "traces": [
                {"id": "flat", "sample_interval_s": 5.0, "samples": [[1e8, 0.01, 0.0, 0.0]]}
            ],
            "arrivals": [
                {"tick": 0, "service": "svc"}
            ]
        })
    }

    fn resolve(value: serde_json::Value) -> Result<Scenario> {
        Scenario::resolve(ScenarioConfig::from_json(&value.to_string())?, None)
    }

    #[test]
    fn minimal_scenario_resolves_with_defaults() {
        let sc = resolve(minimal_json()).unwrap();
        assert_eq!(sc.tick_seconds, 1.0);
        assert_eq!(sc.heartbeat_period_ticks, 5);
        assert_eq!(sc.alert_threshold, 0.10);
        assert_eq!(sc.alert_cooldown_ticks, 15, "3 heartbeat periods");
        assert_eq!(sc.demand.warmup_samples, 12);
        assert_eq!(sc.demand.window_samples, 6);
        assert_eq!(sc.filters, FilterSet::default());
        assert_eq!(sc.arrivals.len(), 1);
        assert_eq!(sc.arrivals[0].count, 1, "count defaults to 1");
    }

    #[test]
    fn unresolved_trace_reference_is_rejected() {
        let mut v = minimal_json();
        v["services"][0]["trace"] = "ghost".into();
        let err = resolve(v).unwrap_err();
        assert!(err.to_string().contains("undefined trace"), "got: {err}");
    }

    #[test]
    fn unknown_arrival_service_is_rejected() {
        let mut v = minimal_json();
        v["arrivals"][0]["service"] = "ghost".into();
        assert!(resolve(v).is_err());
    }

    #[test]
    fn arrival_beyond_horizon_is_rejected() {
        let mut v = minimal_json();
        v["arrivals"][0]["tick"] = 10.into();
        assert!(resolve(v).is_err());
    }

    #[test]
    fn duplicate_worker_id_is_rejected() {
        let mut v = minimal_json();
        let w = v["workers"][0].clone();
        v["workers"].as_array_mut().unwrap().push(w);
        assert!(resolve(v).is_err());
    }

    #[test]
    fn threshold_must_be_a_proper_fraction() {
        let mut v = minimal_json();
        v["alert_threshold"] = 1.0.into();
        assert!(resolve(v).is_err());
        let mut v = minimal_json();
        v["alert_threshold"] = 0.5.into();
        assert!(resolve(v).is_ok());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v = minimal_json();
        v["surprise"] = 1.into();
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn same_tick_arrivals_keep_declaration_order() {
        let mut v = minimal_json();
        v["services"] = serde_json::json!([
            {"id": "a", "trace": "flat"},
            {"id": "b", "trace": "flat"}
        ]);
        v["arrivals"] = serde_json::json!([
            {"tick": 3, "service": "b"},
            {"tick": 0, "service": "a"},
            {"tick": 3, "service": "a"}
        ]);
        let sc = resolve(v).unwrap();
        let order: Vec<(u64, String)> = sc
            .arrivals
            .iter()
            .map(|a| (a.tick, a.service.to_string()))
            .collect();
        assert_eq!(
            order,
            vec![(0, "a".into()), (3, "b".into()), (3, "a".into())]
        );
    }
}
