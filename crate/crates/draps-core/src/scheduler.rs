//! Placement: candidate filtering and the four strategies.
//!
//! Filtering is shared by every strategy: dead workers are never
//! candidates, and the ready/resource/plugin/constraint filters narrow
//! the list further when enabled. The baseline strategies then pick by
//! hosted-container count (spread: fewest, binpack: most) or uniformly
//! at random. The resource-aware strategy picks by the manager's
//! availability view: workers with the most room in the service's
//! dominant resource (once the service is known), or the best average
//! availability fraction before that.
//!
//! Every tie breaks towards the ascending worker id, which keeps runs
//! reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::demand::KnownServiceRegistry;
use crate::model::{
    Cluster, ContainerId, PlacementDecision, PlacementOutcome, RejectReason, Resources,
    ServiceSpec, WorkerId, WorkerNode,
};

/// Which candidate filters are active. All of them by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterSet {
    /// Exclude workers not accepting new tasks.
    pub ready: bool,
    /// Exclude workers whose reservations cannot fit the task's.
    pub resource: bool,
    /// Exclude workers missing a required plugin.
    pub plugin: bool,
    /// Exclude workers missing a required label.
    pub constraint: bool,
}

impl Default for FilterSet {
    fn default() -> Self {
        FilterSet {
            ready: true,
            resource: true,
            plugin: true,
            constraint: true,
        }
    }
}

impl FilterSet {
    /// Every filter disabled; only aliveness still applies.
    pub fn none() -> Self {
        FilterSet {
            ready: false,
            resource: false,
            plugin: false,
            constraint: false,
        }
    }
}

/// Placement strategy selector.
///
/// The declaration order doubles as the tie-break order when comparison
/// reports pick a winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerKind {
    Spread,
    Binpack,
    Random,
    Draps,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 4] = [
        SchedulerKind::Spread,
        SchedulerKind::Binpack,
        SchedulerKind::Random,
        SchedulerKind::Draps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerKind::Spread => "spread",
            SchedulerKind::Binpack => "binpack",
            SchedulerKind::Random => "random",
            SchedulerKind::Draps => "draps",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spread" => Ok(SchedulerKind::Spread),
            "binpack" => Ok(SchedulerKind::Binpack),
            "random" => Ok(SchedulerKind::Random),
            "draps" => Ok(SchedulerKind::Draps),
            other => Err(format!(
                "unknown scheduler `{other}` (expected spread, binpack, random or draps)"
            )),
        }
    }
}

/// Applies the enabled filters and returns surviving workers in
/// ascending id order. `reserved` carries the sum of reservations
/// already granted per worker, which the resource filter adds the
/// task's own reservation to.
pub fn apply_filters<'a>(
    task: &ServiceSpec,
    workers: impl IntoIterator<Item = &'a WorkerNode>,
    reserved: &BTreeMap<WorkerId, Resources>,
    filters: FilterSet,
) -> Vec<&'a WorkerNode> {
    let mut candidates: Vec<&WorkerNode> = workers
        .into_iter()
        .filter(|w| w.alive)
        .filter(|w| !filters.ready || w.ready)
        .filter(|w| {
            if !filters.resource {
                return true;
            }
            match &task.reservation {
                None => true,
                Some(reservation) => {
                    let already = reserved
                        .get(&w.id)
                        .copied()
                        .unwrap_or_else(Resources::zero);
                    (already + *reservation).all_le(&w.capacity)
                }
            }
        })
        .filter(|w| !filters.plugin || task.required_plugins.is_subset(&w.plugins))
        .filter(|w| !filters.constraint || task.constraints.is_subset(&w.labels))
        .collect();
    candidates.sort_by(|a, b| a.id.cmp(&b.id));
    candidates
}

/// Fewest hosted containers wins; ties go to the ascending worker id.
pub fn place_spread<'a>(candidates: &[&'a WorkerNode]) -> Option<&'a WorkerNode> {
    candidates
        .iter()
        .copied()
        .min_by(|a, b| {
            a.container_count()
                .cmp(&b.container_count())
                .then_with(|| a.id.cmp(&b.id))
        })
}

/// Most hosted containers wins; ties go to the ascending worker id.
pub fn place_binpack<'a>(candidates: &[&'a WorkerNode]) -> Option<&'a WorkerNode> {
    // Scan in id order, replacing only on a strictly higher count, so
    // the smallest id among the maxima is kept.
    let mut best: Option<&WorkerNode> = None;
    for &w in candidates {
        match best {
            None => best = Some(w),
            Some(b) if w.container_count() > b.container_count() => best = Some(w),
            _ => {}
        }
    }
    best
}

/// Uniform choice among candidates, driven by the caller's seeded RNG.
pub fn place_random<'a>(
    candidates: &[&'a WorkerNode],
    rng: &mut impl Rng,
) -> Option<&'a WorkerNode> {
    if candidates.is_empty() {
        return None;
    }
    Some(candidates[rng.gen_range(0..candidates.len())])
}

/// Availability of `worker` as the manager last saw it. Before the
/// first heartbeat nothing has been reported, so a fresh worker counts
/// as fully available.
fn availability_of(
    worker: &WorkerNode,
    availability: &BTreeMap<WorkerId, Resources>,
) -> Resources {
    availability
        .get(&worker.id)
        .copied()
        .unwrap_or(worker.capacity)
}

/// Picks the candidate with the most available capacity in `score`'s
/// terms; ties go to the ascending id (candidates are id-sorted and
/// only a strictly better score displaces the incumbent).
fn argmax_candidate<'a>(
    candidates: &[&'a WorkerNode],
    score: impl Fn(&WorkerNode) -> f64,
) -> Option<&'a WorkerNode> {
    let mut best: Option<(&WorkerNode, f64)> = None;
    for &w in candidates {
        let s = score(w);
        match best {
            None => best = Some((w, s)),
            Some((_, b)) if s > b => best = Some((w, s)),
            _ => {}
        }
    }
    best.map(|(w, _)| w)
}

/// Resource-aware placement.
///
/// Candidates pass the same filters as the baselines. If the service is
/// known (enough usage history), the candidate with the most *absolute*
/// availability in the service's dominant resource wins. Otherwise the
/// candidate with the highest mean availability *fraction* across all
/// four kinds wins — with nothing known about the service, the emptiest
/// worker overall is the safest bet.
#[allow(clippy::too_many_arguments)]
pub fn place_draps(
    container: &ContainerId,
    task: &ServiceSpec,
    cluster: &Cluster,
    registry: &mut KnownServiceRegistry,
    availability: &BTreeMap<WorkerId, Resources>,
    reserved: &BTreeMap<WorkerId, Resources>,
    filters: FilterSet,
) -> PlacementDecision {
    let candidates = apply_filters(task, cluster.workers(), reserved, filters);
    if candidates.is_empty() {
        return PlacementDecision {
            container: container.clone(),
            outcome: PlacementOutcome::Rejected(RejectReason::NoWorker),
        };
    }

    // A non-empty candidate list implies at least one alive worker, so
    // the system-wide limits are strictly positive and the dominant-
    // resource computation cannot fail on limits. It can still lack
    // samples (known flag set but every container retired), in which
    // case the service is treated as unknown again.
    let limits = cluster.alive_capacity();
    let dominant = if registry.is_known(&task.id) {
        registry.dominant_resource(&task.id, &limits).ok()
    } else {
        None
    };

    let chosen = match dominant {
        Some(kind) => argmax_candidate(&candidates, |w| {
            availability_of(w, availability).get(kind)
        }),
        None => argmax_candidate(&candidates, |w| {
            availability_of(w, availability)
                .normalized(&w.capacity)
                .expect("worker capacities are strictly positive")
                .mean_over_kinds()
        }),
    };

    PlacementDecision {
        container: container.clone(),
        outcome: match chosen {
            Some(w) => PlacementOutcome::Assigned(w.id.clone()),
            None => PlacementOutcome::Rejected(RejectReason::NoWorker),
        },
    }
}

/// Runs the configured strategy for one container. This is the single
/// entry point the simulator (and test harnesses) use, so every strategy
/// sees identical filtering.
#[allow(clippy::too_many_arguments)]
pub fn place(
    strategy: SchedulerKind,
    container: &ContainerId,
    task: &ServiceSpec,
    cluster: &Cluster,
    registry: &mut KnownServiceRegistry,
    availability: &BTreeMap<WorkerId, Resources>,
    reserved: &BTreeMap<WorkerId, Resources>,
    filters: FilterSet,
    rng: &mut impl Rng,
) -> PlacementDecision {
    if strategy == SchedulerKind::Draps {
        return place_draps(
            container,
            task,
            cluster,
            registry,
            availability,
            reserved,
            filters,
        );
    }
    let candidates = apply_filters(task, cluster.workers(), reserved, filters);
    let chosen = match strategy {
        SchedulerKind::Spread => place_spread(&candidates),
        SchedulerKind::Binpack => place_binpack(&candidates),
        SchedulerKind::Random => place_random(&candidates, rng),
        SchedulerKind::Draps => unreachable!("handled above"),
    };
    PlacementDecision {
        container: container.clone(),
        outcome: match chosen {
            Some(w) => PlacementOutcome::Assigned(w.id.clone()),
            None => PlacementOutcome::Rejected(RejectReason::NoWorker),
        },
    }
}
