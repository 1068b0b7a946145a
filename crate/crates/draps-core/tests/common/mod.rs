//! Shared helpers for the integration test targets: fixture loading,
//! programmatic scenario construction and the invariant checks that both
//! the acceptance suite and the property suite exercise.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use draps_core::demand::KnownServiceRegistry;
use draps_core::model::{Resources, ServiceId, WorkerId};
use draps_core::scheduler::SchedulerKind;
use draps_core::sim::{
    self, EventKind, RunOutput, Scenario, ScenarioConfig,
};

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

pub fn load_scenario(name: &str) -> Scenario {
    Scenario::load(fixture(&format!("scenarios/{name}")))
        .unwrap_or_else(|e| panic!("fixture scenario `{name}` must load: {e}"))
}

/// Plain-data description of a scenario, easy for property tests to
/// generate. `build` turns it into a validated `Scenario`.
#[derive(Debug, Clone)]
pub struct Sketch {
    /// Per-worker capacity quadruples `[memory, cpu, network, block_io]`.
    pub worker_caps: Vec<[f64; 4]>,
    /// Per-service demand traces: (sample interval seconds, samples).
    pub traces: Vec<(f64, Vec<[f64; 4]>)>,
    /// (tick, service index, count) triples; ticks must stay below `max_ticks`.
    pub arrivals: Vec<(u64, usize, u64)>,
    pub scheduler: SchedulerKind,
    pub seed: u64,
    pub max_ticks: u64,
}

pub fn build(sketch: &Sketch) -> Scenario {
    let workers: Vec<serde_json::Value> = sketch
        .worker_caps
        .iter()
        .enumerate()
        .map(|(i, [m, c, n, b])| {
            serde_json::json!({
                "id": format!("w{}", i + 1),
                "capacity": {"memory": m, "cpu": c, "network": n, "block_io": b}
            })
        })
        .collect();
    let services: Vec<serde_json::Value> = (0..sketch.traces.len())
        .map(|j| serde_json::json!({"id": format!("svc{j}"), "trace": format!("svc{j}")}))
        .collect();
    let traces: Vec<serde_json::Value> = sketch
        .traces
        .iter()
        .enumerate()
        .map(|(j, (interval, samples))| {
            serde_json::json!({
                "id": format!("svc{j}"),
                "sample_interval_s": interval,
                "samples": samples
            })
        })
        .collect();
    let arrivals: Vec<serde_json::Value> = sketch
        .arrivals
        .iter()
        .map(|&(tick, svc, count)| {
            serde_json::json!({
                "tick": tick,
                "service": format!("svc{}", svc % sketch.traces.len()),
                "count": count
            })
        })
        .collect();
    let doc = serde_json::json!({
        "max_ticks": sketch.max_ticks,
        "seed": sketch.seed,
        "scheduler": sketch.scheduler.as_str(),
        "workers": workers,
        "services": services,
        "traces": traces,
        "arrivals": arrivals
    });
    let config = ScenarioConfig::from_json(&doc.to_string()).expect("sketch JSON is well-formed");
    Scenario::resolve(config, None).expect("sketch describes a valid scenario")
}

/// Permutes which service arrives in which slot while keeping the tick
/// schedule fixed — the "same workload, different order" transformation.
pub fn shuffle_arrivals(mut scenario: Scenario, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut services: Vec<ServiceId> = scenario
        .arrivals
        .iter()
        .map(|a| a.service.clone())
        .collect();
    for i in (1..services.len()).rev() {
        let j = rng.gen_range(0..=i);
        services.swap(i, j);
    }
    for (arrival, service) in scenario.arrivals.iter_mut().zip(services) {
        arrival.service = service;
    }
    scenario
}

/// Highest per-worker peak memory utilization of a run.
pub fn most_loaded_peak_memory(output: &RunOutput) -> f64 {
    output
        .summary
        .peak_memory_util
        .values()
        .copied()
        .fold(0.0, f64::max)
}

/// Two runs of the same scenario must be byte-identical in every output.
pub fn check_determinism(scenario: &Scenario) {
    let a = sim::run(scenario).expect("first run succeeds");
    let b = sim::run(scenario).expect("second run succeeds");
    assert_eq!(a.metrics_csv(), b.metrics_csv(), "metrics differ between reruns");
    assert_eq!(a.events_csv(), b.events_csv(), "events differ between reruns");
    assert_eq!(a.summary_json(), b.summary_json(), "summaries differ between reruns");
}

/// Every container is on at most one worker, and the event algebra
/// accounts for every hosted container: placements plus migrations minus
/// kills equals the final population.
pub fn check_conservation(output: &RunOutput) {
    let places = output.events.count(EventKind::Place) as i64;
    let migrates = output.events.count(EventKind::Migrate) as i64;
    let kills = output.events.count(EventKind::Kill) as i64;
    let final_total: i64 = output
        .summary
        .final_containers
        .values()
        .map(|&n| n as i64)
        .sum();
    assert_eq!(
        final_total,
        places + migrates - kills,
        "final population must equal placements + migrations - kills"
    );
}

/// A migration that lands back on the alerting worker would be a no-op
/// that burns a container restart; the engine must never emit one.
pub fn check_no_self_migration(output: &RunOutput) {
    for event in output.events.iter() {
        if event.kind == EventKind::Migrate {
            assert_ne!(
                event.from_worker, event.to_worker,
                "migration must leave the alerting worker"
            );
        }
    }
}

/// Gives every service a reservation equal to its trace's componentwise
/// peak. With the resource filter on, admitted demand can then never
/// exceed capacity, so no overload is possible.
pub fn with_peak_reservations(mut scenario: Scenario) -> Scenario {
    let peaks: BTreeMap<ServiceId, Resources> = scenario
        .services
        .values()
        .map(|spec| (spec.id.clone(), scenario.trace_for(spec).peak()))
        .collect();
    for spec in scenario.services.values_mut() {
        spec.reservation = Some(peaks[&spec.id]);
    }
    scenario
}

/// Registry scale-invariance helper: feed `samples` (scaled by `factor`)
/// for one service and report its dominant kind under `limits`.
pub fn dominant_of_scaled(
    samples: &[Resources],
    factor: f64,
    limits: &Resources,
) -> draps_core::model::ResourceKind {
    let mut registry = KnownServiceRegistry::new(Default::default());
    let service = ServiceId::new("svc");
    registry.register(service.clone());
    let container = draps_core::model::ContainerId::new("svc.1");
    for (i, sample) in samples.iter().enumerate() {
        registry
            .record_usage(&service, &container, *sample * factor, i as u64)
            .expect("samples are valid");
    }
    registry
        .dominant_resource(&service, limits)
        .expect("service has samples")
}

/// Sums each worker's final-tick demand ratios from the metrics rows of
/// the last tick and returns the cluster maximum — an independent way to
/// recompute ν from the emitted CSV data.
pub fn recompute_final_nu(output: &RunOutput) -> f64 {
    let last_tick = output.metrics.iter().map(|r| r.tick).max().expect("runs emit metrics");
    output
        .metrics
        .iter()
        .filter(|r| r.tick == last_tick && r.alive)
        .map(|r| r.worker_max)
        .fold(0.0, f64::max)
}

pub fn worker_id(name: &str) -> WorkerId {
    WorkerId::new(name)
}

/// Proptest strategies over [`Sketch`], shared by the property suite and
/// the acceptance suite's invariant criterion.
pub mod gen {
    use super::*;
    use proptest::prelude::*;

    fn capacity_quad() -> impl Strategy<Value = [f64; 4]> {
        (2e9..16e9f64, 1.0..8.0f64, 1e7..1e9f64, 1e7..1e9f64)
            .prop_map(|(m, c, n, b)| [m, c, n, b])
    }

    fn demand_quad() -> impl Strategy<Value = [f64; 4]> {
        (5e7..2e9f64, 0.01..1.0f64, 0.0..5e5f64, 0.0..5e5f64)
            .prop_map(|(m, c, n, b)| [m, c, n, b])
    }

    fn trace() -> impl Strategy<Value = (f64, Vec<[f64; 4]>)> {
        (2.0..10.0f64, prop::collection::vec(demand_quad(), 1..=5))
    }

    pub fn sketch(schedulers: &'static [SchedulerKind]) -> impl Strategy<Value = Sketch> {
        (
            prop::collection::vec(capacity_quad(), 1..=3),
            prop::collection::vec(trace(), 1..=3),
            prop::collection::vec((0u64..30, 0usize..3, 1u64..=2), 1..=8),
            prop::sample::select(schedulers),
            any::<u64>(),
            30u64..=50,
        )
            .prop_map(
                |(worker_caps, traces, arrivals, scheduler, seed, max_ticks)| Sketch {
                    worker_caps,
                    traces,
                    arrivals,
                    scheduler,
                    seed,
                    max_ticks,
                },
            )
    }
}
