//! Overload alerts and migration target selection.
//!
//! Workers watch their own load: when the remaining fraction of some
//! resource drops below a threshold, the worker raises an alert naming
//! the tight resource and the container consuming the most of it. The
//! manager answers an alert by picking a destination for that container
//! among the other alive workers — preferring workers that do not
//! already run a replica of the same service, and ranking them by
//! available capacity in the service's dominant resource (or in the
//! alerted resource while the service is still unknown).

use std::collections::BTreeMap;
use std::fmt;

use crate::demand::KnownServiceRegistry;
use crate::error::{Error, Result};
use crate::metrics::utilization;
use crate::model::{
    Cluster, ContainerId, ContainerState, ResourceKind, Resources, ServiceId, WorkerId, WorkerNode,
};

/// A worker's cry for help: some resource is nearly exhausted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlertMsg {
    pub worker: WorkerId,
    /// The kind with the least remaining capacity.
    pub bottleneck: ResourceKind,
    /// The container using the most of that kind on this worker.
    pub container: ContainerId,
    pub tick: u64,
}

/// Per-worker self-examination with alert rate limiting.
///
/// A worker alerts when `1 - utilization < threshold` for any kind, at
/// most once per cooldown window, so a persistently tight worker does
/// not flood the manager while a migration is already underway.
#[derive(Debug, Clone)]
pub struct BottleneckMonitor {
    threshold: f64,
    cooldown_ticks: u64,
    last_alert: BTreeMap<WorkerId, u64>,
}

impl BottleneckMonitor {
    pub fn new(threshold: f64, cooldown_ticks: u64) -> Self {
        BottleneckMonitor {
            threshold,
            cooldown_ticks,
            last_alert: BTreeMap::new(),
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Examines one worker given the current usage of its containers.
    ///
    /// Returns an alert when some kind's remaining fraction is below the
    /// threshold and the cooldown window has passed. The bottleneck is
    /// the kind with the least remaining capacity (canonical order on
    /// ties); the blamed container is the heaviest user of that kind
    /// (ascending id on ties).
    pub fn self_examine(
        &mut self,
        worker: &WorkerNode,
        usages: &BTreeMap<ContainerId, Resources>,
        tick: u64,
    ) -> Result<Option<AlertMsg>> {
        let ratios = utilization(worker, usages)?;
        let bottleneck = ratios.argmax_kind();
        let remaining = 1.0 - ratios.get(bottleneck);
        if remaining >= self.threshold {
            return Ok(None);
        }

        if let Some(&last) = self.last_alert.get(&worker.id) {
            if tick.saturating_sub(last) < self.cooldown_ticks {
                return Ok(None);
            }
        }

        // Scan in ascending container id order; strict > keeps the
        // earliest id among equals.
        let mut costly: Option<(&ContainerId, f64)> = None;
        for (id, usage) in usages {
            let v = usage.get(bottleneck);
            match costly {
                None => costly = Some((id, v)),
                Some((_, best)) if v > best => costly = Some((id, v)),
                _ => {}
            }
        }
        let Some((container, _)) = costly else {
            // No containers: nothing to migrate, however tight the
            // worker claims to be.
            return Ok(None);
        };

        self.last_alert.insert(worker.id.clone(), tick);
        Ok(Some(AlertMsg {
            worker: worker.id.clone(),
            bottleneck,
            container: container.clone(),
            tick,
        }))
    }
}

/// Where an alerted container should go.
#[derive(Debug, Clone, PartialEq)]
pub struct MigrationDecision {
    pub container: ContainerId,
    pub service: ServiceId,
    pub from: WorkerId,
    pub outcome: MigrationOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MigrationOutcome {
    Target(WorkerId),
    /// No other alive worker exists to take the container.
    NoCandidate,
}

impl fmt::Display for MigrationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MigrationOutcome::Target(w) => write!(f, "{w}"),
            MigrationOutcome::NoCandidate => f.write_str("no-worker"),
        }
    }
}

/// Chooses a destination for the container named in `alert`.
///
/// Candidates are the alive workers other than the alerting one. When
/// at least one candidate runs no replica of the service, replica-free
/// candidates are preferred (spreading the service); when every
/// candidate already runs one, all of them stay in play. The winner has
/// the most available capacity in the service's dominant resource if
/// the service is known, otherwise in the alerted bottleneck kind.
/// Ties go to the ascending worker id.
pub fn handle_alert(
    alert: &AlertMsg,
    cluster: &Cluster,
    registry: &mut KnownServiceRegistry,
    availability: &BTreeMap<WorkerId, Resources>,
) -> Result<MigrationDecision> {
    let source = cluster
        .worker(&alert.worker)
        .ok_or_else(|| Error::UnknownWorker(alert.worker.clone()))?;
    if !source.alive {
        return Err(Error::WorkerNotAlive(alert.worker.clone()));
    }
    let container = cluster
        .container(&alert.container)
        .ok_or_else(|| Error::UnknownContainer(alert.container.clone()))?;
    if container.state != ContainerState::Running
        || container.worker.as_ref() != Some(&alert.worker)
    {
        return Err(Error::NotHosted {
            container: alert.container.clone(),
            worker: alert.worker.clone(),
        });
    }
    let service = container.service.clone();

    let candidates: Vec<&WorkerNode> = cluster
        .alive_workers()
        .filter(|w| w.id != alert.worker)
        .collect();
    if candidates.is_empty() {
        return Ok(MigrationDecision {
            container: alert.container.clone(),
            service,
            from: alert.worker.clone(),
            outcome: MigrationOutcome::NoCandidate,
        });
    }

    let replica_free: Vec<&WorkerNode> = candidates
        .iter()
        .copied()
        .filter(|w| !cluster.hosts_replica(&w.id, &service))
        .collect();
    // The replica-free pool is preferred; when the service already runs
    // everywhere (or the pool somehow emptied), fall back to everyone.
    let pool: &[&WorkerNode] = if replica_free.is_empty() {
        &candidates
    } else {
        &replica_free
    };

    // Rank by the dominant resource when the service's demand profile is
    // known; otherwise the alerted kind is the best signal available.
    let kind = if registry.is_known(&service) {
        registry
            .dominant_resource(&service, &cluster.alive_capacity())
            .ok()
            .unwrap_or(alert.bottleneck)
    } else {
        alert.bottleneck
    };

    let mut best: Option<(&WorkerNode, f64)> = None;
    for &w in pool {
        let avail = availability
            .get(&w.id)
            .copied()
            .unwrap_or(w.capacity)
            .get(kind);
        match best {
            None => best = Some((w, avail)),
            Some((_, b)) if avail > b => best = Some((w, avail)),
            _ => {}
        }
    }
    let target = best.map(|(w, _)| w.id.clone()).expect("pool is non-empty");

    Ok(MigrationDecision {
        container: alert.container.clone(),
        service,
        from: alert.worker.clone(),
        outcome: MigrationOutcome::Target(target),
    })
}
