//! The simulation engine: a single-threaded, deterministic tick loop.
//!
//! Each tick runs a fixed sequence of phases:
//!
//! 1. demand replay — running containers consume the next step of their
//!    trace, charged to their current worker;
//! 2. overload check — any worker whose memory demand exceeds capacity
//!    kills everything it hosts (the engine's out-of-memory behavior);
//! 3. self-examination — workers raise alerts when a resource is nearly
//!    exhausted (resource-aware mode only);
//! 4. heartbeats — on period boundaries workers report to the manager,
//!    which updates its usage knowledge and availability view;
//! 5. migrations — the manager answers this tick's alerts by moving the
//!    blamed containers, starting the replacement before killing the
//!    original;
//! 6. arrivals — scheduled containers are placed by the configured
//!    strategy, the manager's view updating after every placement;
//! 7. metrics — per-worker utilization is recorded.
//!
//! All iteration follows ascending ids and the only randomness is the
//! seeded RNG consumed by the random strategy, so a scenario always
//! produces byte-identical output.

pub mod config;
pub mod event;
pub mod heartbeat;
pub mod output;

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::demand::KnownServiceRegistry;
use crate::error::Result;
use crate::metrics::{cluster_nu, UtilizationRecord};
use crate::migration::{handle_alert, AlertMsg, BottleneckMonitor, MigrationOutcome};
use crate::model::{
    Cluster, ContainerId, ContainerInstance, ContainerState, PlacementOutcome, Resources,
    ServiceId, ServiceMode, ServiceSpec, WorkerId,
};
use crate::scheduler::{self, SchedulerKind};

pub use config::{Arrival, Scenario, ScenarioConfig};
pub use event::{Event, EventKind, EventLog};
pub use heartbeat::{HeartbeatMsg, HEARTBEAT_HEADER_BYTES, HEARTBEAT_PER_CONTAINER_BYTES};
pub use output::{events_csv, metrics_csv, Summary, EVENTS_HEADER, METRICS_HEADER};

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: Summary,
    pub metrics: Vec<UtilizationRecord>,
    pub events: EventLog,
    pub tick_seconds: f64,
}

impl RunOutput {
    pub fn metrics_csv(&self) -> String {
        metrics_csv(&self.metrics, self.tick_seconds)
    }

    pub fn events_csv(&self) -> String {
        events_csv(&self.events, self.tick_seconds)
    }

    pub fn summary_json(&self) -> String {
        self.summary.to_json()
    }

    /// Writes `metrics.csv`, `events.csv` and `summary.json` into `dir`,
    /// creating it if needed.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("metrics.csv"), self.metrics_csv())?;
        std::fs::write(dir.join("events.csv"), self.events_csv())?;
        std::fs::write(dir.join("summary.json"), self.summary_json())?;
        Ok(())
    }
}

/// Runs a scenario to completion.
pub fn run(scenario: &Scenario) -> Result<RunOutput> {
    Simulation::new(scenario).run()
}

struct Simulation<'a> {
    sc: &'a Scenario,
    cluster: Cluster,
    registry: KnownServiceRegistry,
    monitor: BottleneckMonitor,
    rng: ChaCha8Rng,
    /// Manager's availability view, refreshed by heartbeats and debited
    /// by placements (resource-aware mode only).
    availability: BTreeMap<WorkerId, Resources>,
    /// Sum of granted reservations per worker.
    reserved: BTreeMap<WorkerId, Resources>,
    /// Worker-side sliding usage window per container.
    windows: BTreeMap<ContainerId, VecDeque<Resources>>,
    /// This tick's demand attributions: (worker, container, usage).
    /// Overload kills retract entries; a migration adds the target's copy
    /// while keeping the source's, deliberately double-counting the
    /// hand-over tick.
    ledger: Vec<(WorkerId, ContainerId, Resources)>,
    /// This tick's usage per running container.
    usage_now: BTreeMap<ContainerId, Resources>,
    alerts: VecDeque<AlertMsg>,
    arrivals_by_tick: BTreeMap<u64, Vec<(ServiceId, u64)>>,
    next_seq: BTreeMap<ServiceId, u64>,
    events: EventLog,
    metrics: Vec<UtilizationRecord>,
    peak_nu: f64,
    final_nu: f64,
    peak_memory: BTreeMap<WorkerId, f64>,
    kills: u64,
    migrations: u64,
    rejected: u64,
    worker_overloads: u64,
    heartbeat_bytes: u64,
}

impl<'a> Simulation<'a> {
    fn new(sc: &'a Scenario) -> Self {
        let mut cluster = Cluster::new();
        for worker in &sc.workers {
            cluster
                .add_worker(worker.clone())
                .expect("scenario validation rejects duplicate workers");
        }
        let mut registry = KnownServiceRegistry::new(sc.demand);
        for service in sc.services.keys() {
            registry.register(service.clone());
        }
        let mut arrivals_by_tick: BTreeMap<u64, Vec<(ServiceId, u64)>> = BTreeMap::new();
        for a in &sc.arrivals {
            arrivals_by_tick
                .entry(a.tick)
                .or_default()
                .push((a.service.clone(), a.count));
        }
        let peak_memory = sc
            .workers
            .iter()
            .map(|w| (w.id.clone(), 0.0))
            .collect();

        Simulation {
            sc,
            cluster,
            registry,
            monitor: BottleneckMonitor::new(sc.alert_threshold, sc.alert_cooldown_ticks),
            rng: ChaCha8Rng::seed_from_u64(sc.seed),
            availability: BTreeMap::new(),
            reserved: BTreeMap::new(),
            windows: BTreeMap::new(),
            ledger: Vec::new(),
            usage_now: BTreeMap::new(),
            alerts: VecDeque::new(),
            arrivals_by_tick,
            next_seq: BTreeMap::new(),
            events: EventLog::default(),
            metrics: Vec::new(),
            peak_nu: 0.0,
            final_nu: 0.0,
            peak_memory,
            kills: 0,
            migrations: 0,
            rejected: 0,
            worker_overloads: 0,
            heartbeat_bytes: 0,
        }
    }

    fn draps_mode(&self) -> bool {
        self.sc.scheduler == SchedulerKind::Draps
    }

    fn run(mut self) -> Result<RunOutput> {
        for tick in 0..self.sc.max_ticks {
            self.replay_demand(tick);
            self.check_overloads(tick);
            if self.draps_mode() {
                self.examine_workers(tick)?;
            }
            self.heartbeats(tick);
            if self.draps_mode() {
                self.handle_alerts(tick)?;
            }
            self.place_arrivals(tick)?;
            self.record_metrics(tick)?;
        }

        let final_containers = self
            .cluster
            .workers()
            .map(|w| (w.id.to_string(), w.container_count()))
            .collect();
        let peak_memory_util = self
            .peak_memory
            .iter()
            .map(|(w, &v)| (w.to_string(), v))
            .collect();
        let summary = Summary {
            scheduler: self.sc.scheduler,
            ticks: self.sc.max_ticks,
            final_nu: self.final_nu,
            peak_nu: self.peak_nu,
            kills: self.kills,
            migrations: self.migrations,
            rejected: self.rejected,
            worker_overloads: self.worker_overloads,
            heartbeat_bytes: self.heartbeat_bytes,
            final_containers,
            peak_memory_util,
        };
        Ok(RunOutput {
            summary,
            metrics: self.metrics,
            events: self.events,
            tick_seconds: self.sc.tick_seconds,
        })
    }

    /// Phase 1: every running container draws its next trace step.
    fn replay_demand(&mut self, _tick: u64) {
        self.ledger.clear();
        self.usage_now.clear();

        let running: Vec<(ContainerId, ServiceId, WorkerId, u64)> = self
            .cluster
            .running()
            .map(|c| {
                (
                    c.id.clone(),
                    c.service.clone(),
                    c.worker.clone().expect("running containers are placed"),
                    c.phase_offset,
                )
            })
            .collect();

        let window = self.sc.heartbeat_period_ticks as usize;
        for (id, service, worker, offset) in running {
            let spec = &self.sc.services[&service];
            let usage = self
                .sc
                .trace_for(spec)
                .sample_at(offset, self.sc.tick_seconds);
            self.ledger.push((worker, id.clone(), usage));
            self.usage_now.insert(id.clone(), usage);
            let buf = self.windows.entry(id.clone()).or_default();
            buf.push_back(usage);
            while buf.len() > window {
                buf.pop_front();
            }
            self.cluster
                .container_mut(&id)
                .expect("container exists")
                .phase_offset += 1;
        }
    }

    /// Phase 2: memory demand strictly above capacity kills every
    /// container on the worker. The worker itself survives and keeps
    /// accepting work — which is exactly how a count-based strategy ends
    /// up refilling it.
    fn check_overloads(&mut self, tick: u64) {
        let worker_ids: Vec<WorkerId> =
            self.cluster.workers().map(|w| w.id.clone()).collect();
        for wid in worker_ids {
            let worker = self.cluster.worker(&wid).expect("worker exists");
            let demand: f64 = self
                .ledger
                .iter()
                .filter(|(w, _, _)| *w == wid)
                .map(|(_, _, u)| u.memory)
                .sum();
            if demand <= worker.capacity.memory {
                continue;
            }

            self.worker_overloads += 1;
            self.events.push(Event {
                tick,
                kind: EventKind::WorkerOverload,
                container: None,
                service: None,
                from_worker: Some(wid.clone()),
                to_worker: None,
                detail: format!(
                    "memory demand {} exceeds capacity {}",
                    demand, worker.capacity.memory
                ),
            });

            let victims: Vec<ContainerId> = worker.hosted.iter().cloned().collect();
            for victim in victims {
                let service = self
                    .cluster
                    .container(&victim)
                    .expect("hosted containers exist")
                    .service
                    .clone();
                self.events.push(Event {
                    tick,
                    kind: EventKind::Kill,
                    container: Some(victim.clone()),
                    service: Some(service.clone()),
                    from_worker: Some(wid.clone()),
                    to_worker: None,
                    detail: "memory overload".to_string(),
                });
                self.remove_container(&victim, &service, &wid);
                // The killed containers' demand vanishes with them: the
                // tick's metrics show the emptied worker.
                self.ledger.retain(|(_, c, _)| *c != victim);
                self.usage_now.remove(&victim);
                self.kills += 1;
            }
        }
    }

    /// Phase 3: workers inspect their own load and raise alerts.
    fn examine_workers(&mut self, tick: u64) -> Result<()> {
        let worker_ids: Vec<WorkerId> = self
            .cluster
            .alive_workers()
            .map(|w| w.id.clone())
            .collect();
        for wid in worker_ids {
            let worker = self.cluster.worker(&wid).expect("worker exists");
            let usages: BTreeMap<ContainerId, Resources> = worker
                .hosted
                .iter()
                .filter_map(|c| self.usage_now.get(c).map(|u| (c.clone(), *u)))
                .collect();
            if let Some(alert) = self.monitor.self_examine(worker, &usages, tick)? {
                let service = self
                    .cluster
                    .container(&alert.container)
                    .expect("alerted container exists")
                    .service
                    .clone();
                self.events.push(Event {
                    tick,
                    kind: EventKind::Alert,
                    container: Some(alert.container.clone()),
                    service: Some(service),
                    from_worker: Some(wid.clone()),
                    to_worker: None,
                    detail: alert.bottleneck.label().to_string(),
                });
                self.alerts.push_back(alert);
            }
        }
        Ok(())
    }

    /// Phase 4: on period boundaries every alive worker reports in. The
    /// resource-aware manager learns per-container usage and remaining
    /// availability; the baseline manager only pays for node state.
    fn heartbeats(&mut self, tick: u64) {
        if tick % self.sc.heartbeat_period_ticks != 0 {
            return;
        }
        let detailed = self.draps_mode();
        let worker_ids: Vec<WorkerId> = self
            .cluster
            .alive_workers()
            .map(|w| w.id.clone())
            .collect();
        for wid in worker_ids {
            let worker = self.cluster.worker(&wid).expect("worker exists");
            let msg = if detailed {
                let mut container_usage = BTreeMap::new();
                for c in &worker.hosted {
                    let Some(window) = self.windows.get(c) else {
                        continue;
                    };
                    if window.is_empty() {
                        continue;
                    }
                    let samples: Vec<Resources> = window.iter().copied().collect();
                    let avg = Resources::mean(&samples).expect("window is non-empty");
                    container_usage.insert(c.clone(), avg);
                }
                let used = container_usage
                    .values()
                    .fold(Resources::zero(), |acc, &u| acc + u);
                HeartbeatMsg {
                    worker: wid.clone(),
                    tick,
                    available: Some(worker.capacity.saturating_sub(&used)),
                    container_usage,
                }
            } else {
                HeartbeatMsg {
                    worker: wid.clone(),
                    tick,
                    container_usage: BTreeMap::new(),
                    available: None,
                }
            };
            self.heartbeat_bytes += msg.payload_bytes();

            if detailed {
                for (container, usage) in &msg.container_usage {
                    let service = self
                        .cluster
                        .container(container)
                        .expect("reported containers exist")
                        .service
                        .clone();
                    self.registry
                        .record_usage(&service, container, *usage, tick)
                        .expect("scenario services are registered");
                }
                self.availability.insert(
                    wid.clone(),
                    msg.available.expect("detailed heartbeats carry availability"),
                );
            }
        }
    }

    /// Phase 5: the manager resolves this tick's alerts into migrations.
    /// The replacement starts on the target before the original dies, so
    /// the hand-over tick counts the demand on both workers.
    fn handle_alerts(&mut self, tick: u64) -> Result<()> {
        while let Some(alert) = self.alerts.pop_front() {
            // An earlier migration or an overload kill may have raced
            // this alert within the tick.
            let still_valid = self
                .cluster
                .container(&alert.container)
                .is_some_and(|c| {
                    c.state == ContainerState::Running
                        && c.worker.as_ref() == Some(&alert.worker)
                });
            if !still_valid {
                self.events.push(Event {
                    tick,
                    kind: EventKind::MigrateAbort,
                    container: Some(alert.container.clone()),
                    service: None,
                    from_worker: Some(alert.worker.clone()),
                    to_worker: None,
                    detail: "stale-alert".to_string(),
                });
                continue;
            }

            let decision =
                handle_alert(&alert, &self.cluster, &mut self.registry, &self.availability)?;
            let target = match decision.outcome {
                MigrationOutcome::Target(t) => t,
                MigrationOutcome::NoCandidate => {
                    self.events.push(Event {
                        tick,
                        kind: EventKind::MigrateAbort,
                        container: Some(decision.container),
                        service: Some(decision.service),
                        from_worker: Some(decision.from),
                        to_worker: None,
                        detail: "no-worker".to_string(),
                    });
                    continue;
                }
            };

            let service = decision.service.clone();
            let spec = &self.sc.services[&service];

            // The chosen target must still be able to honor the
            // container's reservation, otherwise moving it would break
            // the guarantee the resource filter gave at placement time.
            if self.sc.filters.resource {
                if let Some(reservation) = &spec.reservation {
                    let already = self
                        .reserved
                        .get(&target)
                        .copied()
                        .unwrap_or_else(Resources::zero);
                    let capacity = self
                        .cluster
                        .worker(&target)
                        .expect("target chosen from cluster workers")
                        .capacity;
                    if !(already + *reservation).all_le(&capacity) {
                        self.events.push(Event {
                            tick,
                            kind: EventKind::MigrateAbort,
                            container: Some(decision.container),
                            service: Some(service),
                            from_worker: Some(decision.from),
                            to_worker: Some(target),
                            detail: "no-capacity".to_string(),
                        });
                        continue;
                    }
                }
            }

            let old_id = decision.container.clone();
            let from = decision.from.clone();
            let usage = self
                .usage_now
                .get(&old_id)
                .copied()
                .unwrap_or_else(Resources::zero);
            let offset = self
                .cluster
                .container(&old_id)
                .expect("validated above")
                .phase_offset;

            // Start the replacement on the target...
            let new_id = self.next_container_id(&service);
            let mut replacement = ContainerInstance::new(new_id.clone(), service.clone());
            replacement.phase_offset = offset;
            self.cluster
                .spawn(replacement)
                .expect("generated ids are unique");
            self.cluster
                .place(&new_id, &target)
                .expect("target exists and container is fresh");
            self.ledger.push((target.clone(), new_id.clone(), usage));
            self.usage_now.insert(new_id.clone(), usage);
            self.windows.insert(new_id.clone(), VecDeque::new());
            self.debit_availability(&target, usage);
            if let Some(reservation) = &spec.reservation {
                self.add_reservation(&target, *reservation);
            }
            self.events.push(Event {
                tick,
                kind: EventKind::Migrate,
                container: Some(old_id.clone()),
                service: Some(service.clone()),
                from_worker: Some(from.clone()),
                to_worker: Some(target.clone()),
                detail: new_id.to_string(),
            });

            // ...then kill the original. Its demand stays on the source's
            // ledger for this tick: tearing down is not free.
            self.remove_container(&old_id, &service, &from);
            self.events.push(Event {
                tick,
                kind: EventKind::Kill,
                container: Some(old_id),
                service: Some(service),
                from_worker: Some(from),
                to_worker: None,
                detail: "migrated".to_string(),
            });
            self.migrations += 1;
            self.kills += 1;
        }
        Ok(())
    }

    /// Phase 6: scheduled arrivals are placed one at a time, each
    /// placement updating the manager's view before the next.
    fn place_arrivals(&mut self, tick: u64) -> Result<()> {
        let Some(entries) = self.arrivals_by_tick.get(&tick).cloned() else {
            return Ok(());
        };
        for (service, count) in entries {
            let spec = self.sc.services[&service].clone();
            for _ in 0..count {
                match spec.mode {
                    ServiceMode::Replicated => self.place_one(tick, &spec)?,
                    ServiceMode::Global => self.place_global(tick, &spec)?,
                }
            }
        }
        Ok(())
    }

    fn place_one(&mut self, tick: u64, spec: &ServiceSpec) -> Result<()> {
        let container = self.next_container_id(&spec.id);
        self.cluster
            .spawn(ContainerInstance::new(container.clone(), spec.id.clone()))
            .expect("generated ids are unique");
        let decision = scheduler::place(
            self.sc.scheduler,
            &container,
            spec,
            &self.cluster,
            &mut self.registry,
            &self.availability,
            &self.reserved,
            self.sc.filters,
            &mut self.rng,
        );
        match decision.outcome {
            PlacementOutcome::Assigned(worker) => self.admit(tick, spec, &container, &worker)?,
            PlacementOutcome::Rejected(reason) => {
                self.events.push(Event {
                    tick,
                    kind: EventKind::Reject,
                    container: Some(container),
                    service: Some(spec.id.clone()),
                    from_worker: None,
                    to_worker: None,
                    detail: reason.to_string(),
                });
                self.rejected += 1;
            }
        }
        Ok(())
    }

    /// A global service puts one replica on every worker that passes the
    /// filters.
    fn place_global(&mut self, tick: u64, spec: &ServiceSpec) -> Result<()> {
        let candidates: Vec<WorkerId> = scheduler::apply_filters(
            spec,
            self.cluster.workers(),
            &self.reserved,
            self.sc.filters,
        )
        .into_iter()
        .map(|w| w.id.clone())
        .collect();
        if candidates.is_empty() {
            let container = self.next_container_id(&spec.id);
            self.cluster
                .spawn(ContainerInstance::new(container.clone(), spec.id.clone()))
                .expect("generated ids are unique");
            self.events.push(Event {
                tick,
                kind: EventKind::Reject,
                container: Some(container),
                service: Some(spec.id.clone()),
                from_worker: None,
                to_worker: None,
                detail: "no-worker".to_string(),
            });
            self.rejected += 1;
            return Ok(());
        }
        for worker in candidates {
            let container = self.next_container_id(&spec.id);
            self.cluster
                .spawn(ContainerInstance::new(container.clone(), spec.id.clone()))
                .expect("generated ids are unique");
            self.admit(tick, spec, &container, &worker)?;
        }
        Ok(())
    }

    /// Commits an assignment: cluster state, reservations, availability
    /// debit and the place event.
    fn admit(
        &mut self,
        tick: u64,
        spec: &ServiceSpec,
        container: &ContainerId,
        worker: &WorkerId,
    ) -> Result<()> {
        self.cluster.place(container, worker)?;
        if let Some(reservation) = &spec.reservation {
            self.add_reservation(worker, *reservation);
        }
        if self.draps_mode() {
            // Debit the freshest estimate of what the newcomer will
            // consume, so same-tick arrivals don't all pile onto the
            // same worker: the service's observed average if known, its
            // reservation otherwise, nothing when neither exists yet.
            let estimate = self
                .registry
                .average_demand(&spec.id)
                .ok()
                .filter(|_| self.registry.is_known(&spec.id))
                .or(spec.reservation)
                .unwrap_or_else(Resources::zero);
            self.debit_availability(worker, estimate);
        }
        self.events.push(Event {
            tick,
            kind: EventKind::Place,
            container: Some(container.clone()),
            service: Some(spec.id.clone()),
            from_worker: None,
            to_worker: Some(worker.clone()),
            detail: String::new(),
        });
        Ok(())
    }

    /// Phase 7: per-worker utilization from this tick's ledger.
    fn record_metrics(&mut self, tick: u64) -> Result<()> {
        let mut sums: BTreeMap<WorkerId, Resources> = self
            .cluster
            .workers()
            .map(|w| (w.id.clone(), Resources::zero()))
            .collect();
        for (worker, _, usage) in &self.ledger {
            *sums.get_mut(worker).expect("ledger workers exist") += *usage;
        }

        let mut tick_records = Vec::with_capacity(sums.len());
        for worker in self.cluster.workers() {
            let ratios = sums[&worker.id]
                .normalized(&worker.capacity)
                .expect("capacities are strictly positive");
            let record = UtilizationRecord::new(
                tick,
                worker.id.clone(),
                ratios,
                worker.container_count(),
                worker.alive,
            );
            let peak = self
                .peak_memory
                .get_mut(&worker.id)
                .expect("all workers tracked");
            *peak = peak.max(ratios.memory);
            tick_records.push(record);
        }

        let nu = cluster_nu(&tick_records)?;
        self.final_nu = nu;
        self.peak_nu = self.peak_nu.max(nu);
        self.metrics.extend(tick_records);

        if let Err(message) = self.cluster.audit() {
            panic!("cluster bookkeeping violated at tick {tick}: {message}");
        }
        Ok(())
    }

    /// Tears down a container everywhere: cluster, windows, registry
    /// buffers and its reservation.
    fn remove_container(&mut self, container: &ContainerId, service: &ServiceId, worker: &WorkerId) {
        self.cluster
            .kill(container)
            .expect("caller validated the container");
        self.windows.remove(container);
        if self.draps_mode() {
            self.registry.retire_container(service, container);
        }
        if let Some(reservation) = self.sc.services[service].reservation {
            if let Some(total) = self.reserved.get_mut(worker) {
                *total = total.saturating_sub(&reservation);
            }
        }
    }

    fn debit_availability(&mut self, worker: &WorkerId, amount: Resources) {
        let capacity = self
            .cluster
            .worker(worker)
            .expect("worker exists")
            .capacity;
        let current = self.availability.get(worker).copied().unwrap_or(capacity);
        self.availability
            .insert(worker.clone(), current.saturating_sub(&amount));
    }

    fn add_reservation(&mut self, worker: &WorkerId, reservation: Resources) {
        let entry = self
            .reserved
            .entry(worker.clone())
            .or_insert_with(Resources::zero);
        *entry += reservation;
    }

    fn next_container_id(&mut self, service: &ServiceId) -> ContainerId {
        let seq = self.next_seq.entry(service.clone()).or_insert(0);
        *seq += 1;
        ContainerId::new(format!("{service}.{seq:04}"))
    }
}
