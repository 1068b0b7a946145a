//! Cluster domain model: resource vectors, workers, services, containers.
//!
//! Everything the scheduler and simulator reason about is expressed in
//! four resource dimensions with fixed canonical order: memory (bytes),
//! CPU (fraction of one core, so 2.0 means two full cores), network
//! (bytes/second) and block I/O (bytes/second). The canonical order
//! decides every tie-break involving resource kinds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The four resource dimensions, in canonical order.
///
/// The order is load-bearing: argmax ties (dominant-resource selection,
/// bottleneck detection) resolve to the earliest kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceKind {
    Memory,
    Cpu,
    Network,
    BlockIo,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 4] = [
        ResourceKind::Memory,
        ResourceKind::Cpu,
        ResourceKind::Network,
        ResourceKind::BlockIo,
    ];

    /// Short lowercase label used in CSV columns and CLI output.
    pub fn label(self) -> &'static str {
        match self {
            ResourceKind::Memory => "memory",
            ResourceKind::Cpu => "cpu",
            ResourceKind::Network => "network",
            ResourceKind::BlockIo => "block_io",
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A quantity per resource kind: a demand, a capacity, or a ratio.
///
/// Components must be finite and non-negative; inputs are validated where
/// they enter the system (trace ingestion, scenario loading) via
/// [`ResourceVector::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResourceVector<T> {
    pub memory: T,
    pub cpu: T,
    pub network: T,
    pub block_io: T,
}

/// Concrete resource vector used by the simulator.
pub type Resources = ResourceVector<f64>;

impl<T: Scalar> ResourceVector<T> {
    pub fn new(memory: T, cpu: T, network: T, block_io: T) -> Self {
        ResourceVector {
            memory,
            cpu,
            network,
            block_io,
        }
    }

    pub fn zero() -> Self {
        Self::splat(T::zero())
    }

    /// Vector with every component set to `value`.
    pub fn splat(value: T) -> Self {
        ResourceVector {
            memory: value,
            cpu: value,
            network: value,
            block_io: value,
        }
    }

    pub fn get(&self, kind: ResourceKind) -> T {
        self[kind]
    }

    pub fn set(&mut self, kind: ResourceKind, value: T) {
        self[kind] = value;
    }

    /// Checks that every component is finite and `>= 0`, naming the
    /// offending component in the error.
    pub fn validate(&self, context: &str) -> Result<()> {
        for kind in ResourceKind::ALL {
            let v = self[kind];
            if !v.is_finite() || v < T::zero() {
                return Err(Error::InvalidComponent {
                    context: context.to_string(),
                    kind,
                });
            }
        }
        Ok(())
    }

    /// True when every component is strictly positive (required of
    /// capacities and normalization limits).
    pub fn all_positive(&self) -> bool {
        ResourceKind::ALL.iter().all(|&k| self[k] > T::zero())
    }

    /// Component-wise `<=`, the shape of a capacity-fit check.
    pub fn all_le(&self, other: &Self) -> bool {
        ResourceKind::ALL.iter().all(|&k| self[k] <= other[k])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> ResourceVector<U> {
        ResourceVector {
            memory: f(self.memory),
            cpu: f(self.cpu),
            network: f(self.network),
            block_io: f(self.block_io),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        ResourceVector {
            memory: f(self.memory, other.memory),
            cpu: f(self.cpu, other.cpu),
            network: f(self.network, other.network),
            block_io: f(self.block_io, other.block_io),
        }
    }

    /// Component-wise subtraction clamped at zero. Demand can transiently
    /// exceed capacity, but "available" never goes negative.
    pub fn saturating_sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| (a - b).max(T::zero()))
    }

    /// Component-wise ratio against `limits`: the load a demand places on
    /// a capacity. Components may exceed 1.0 when demand exceeds the
    /// limit. Errors if any limit component is not strictly positive.
    pub fn normalized(&self, limits: &Self) -> Result<Self> {
        for kind in ResourceKind::ALL {
            if limits[kind] <= T::zero() {
                return Err(Error::NonPositiveLimit(kind));
            }
        }
        Ok(self.zip_with(limits, |v, l| v / l))
    }

    /// Component-wise arithmetic mean of a non-empty sample set.
    pub fn mean(samples: &[Self]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        let n = T::from_usize(samples.len()).expect("sample count fits in scalar");
        let sum = samples
            .iter()
            .fold(Self::zero(), |acc, s| acc.zip_with(s, |a, b| a + b));
        Ok(sum.map(|v| v / n))
    }

    /// Largest component value.
    pub fn max_component(&self) -> T {
        ResourceKind::ALL
            .iter()
            .map(|&k| self[k])
            .fold(T::neg_infinity(), T::max)
    }

    /// Kind with the largest component; ties resolve to the earliest kind
    /// in canonical order (strict `>` while scanning).
    pub fn argmax_kind(&self) -> ResourceKind {
        let mut best = ResourceKind::Memory;
        for kind in ResourceKind::ALL {
            if self[kind] > self[best] {
                best = kind;
            }
        }
        best
    }

    /// True when at least two components tie for the maximum.
    pub fn argmax_is_tied(&self) -> bool {
        let max = self.max_component();
        ResourceKind::ALL.iter().filter(|&&k| self[k] == max).count() > 1
    }

    /// Arithmetic mean of the four components (used to rank workers by
    /// average availability fraction).
    pub fn mean_over_kinds(&self) -> T {
        let four = T::from_usize(4).expect("4 fits in scalar");
        (self.memory + self.cpu + self.network + self.block_io) / four
    }

    /// Casts each component to `f64` for reporting.
    pub fn to_f64(&self) -> ResourceVector<f64> {
        self.map(|v| num_traits::ToPrimitive::to_f64(&v).unwrap_or(f64::NAN))
    }
}

impl<T> Index<ResourceKind> for ResourceVector<T> {
    type Output = T;

    fn index(&self, kind: ResourceKind) -> &T {
        match kind {
            ResourceKind::Memory => &self.memory,
            ResourceKind::Cpu => &self.cpu,
            ResourceKind::Network => &self.network,
            ResourceKind::BlockIo => &self.block_io,
        }
    }
}

impl<T> IndexMut<ResourceKind> for ResourceVector<T> {
    fn index_mut(&mut self, kind: ResourceKind) -> &mut T {
        match kind {
            ResourceKind::Memory => &mut self.memory,
            ResourceKind::Cpu => &mut self.cpu,
            ResourceKind::Network => &mut self.network,
            ResourceKind::BlockIo => &mut self.block_io,
        }
    }
}

impl<T: Scalar> Add for ResourceVector<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl<T: Scalar> AddAssign for ResourceVector<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> Mul<T> for ResourceVector<T> {
    type Output = Self;

    fn mul(self, rhs: T) -> Self {
        self.map(|v| v * rhs)
    }
}

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

string_id! {
    /// Worker identifier. Ordering is lexicographic; every "ascending
    /// worker id" tie-break in the schedulers relies on it.
    WorkerId
}
string_id! {
    /// Service identifier.
    ServiceId
}
string_id! {
    /// Container identifier, unique across the whole run.
    ContainerId
}
string_id! {
    /// Demand trace identifier, referenced by services.
    TraceId
}

/// Replication mode of a service.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceMode {
    /// A fixed number of replicas, started via the arrival schedule.
    Replicated,
    /// One replica on every worker.
    Global,
}

/// Static description of a service: what it runs and what it asks for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceSpec {
    pub id: ServiceId,
    pub mode: ServiceMode,
    /// Demand trace replayed by every container of this service.
    pub trace: TraceId,
    /// Optional resource reservation, enforced by the resource filter.
    pub reservation: Option<Resources>,
    /// Labels a hosting worker must carry (constraint filter).
    pub constraints: BTreeSet<String>,
    /// Plugins a hosting worker must provide (plugin filter).
    pub required_plugins: BTreeSet<String>,
}

impl ServiceSpec {
    /// Replicated service with no reservation and no placement
    /// restrictions — the common case in tests.
    pub fn replicated(id: impl Into<ServiceId>, trace: impl Into<TraceId>) -> Self {
        ServiceSpec {
            id: id.into(),
            mode: ServiceMode::Replicated,
            trace: trace.into(),
            reservation: None,
            constraints: BTreeSet::new(),
            required_plugins: BTreeSet::new(),
        }
    }
}

/// A machine in the cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerNode {
    pub id: WorkerId,
    /// Total capacity per kind; every component strictly positive.
    pub capacity: Resources,
    /// Whether the node accepts new tasks (ready filter).
    pub ready: bool,
    /// Whether the node is up at all. Dead workers never receive work.
    pub alive: bool,
    pub labels: BTreeSet<String>,
    pub plugins: BTreeSet<String>,
    /// Containers currently running here. Maintained by [`Cluster`].
    pub hosted: BTreeSet<ContainerId>,
}

impl WorkerNode {
    pub fn new(id: impl Into<WorkerId>, capacity: Resources) -> Result<Self> {
        let id = id.into();
        capacity.validate(&format!("capacity of worker `{id}`"))?;
        if !capacity.all_positive() {
            return Err(Error::Config(format!(
                "worker `{id}` has a zero capacity component"
            )));
        }
        Ok(WorkerNode {
            id,
            capacity,
            ready: true,
            alive: true,
            labels: BTreeSet::new(),
            plugins: BTreeSet::new(),
            hosted: BTreeSet::new(),
        })
    }

    pub fn container_count(&self) -> usize {
        self.hosted.len()
    }
}

/// Lifecycle state of a container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainerState {
    /// Created but not placed (arrival awaiting placement, or rejected).
    Pending,
    /// Placed and consuming demand on its worker.
    Running,
    /// Removed, either by migration or by an overload kill.
    Killed,
}

/// One container replica.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainerInstance {
    pub id: ContainerId,
    pub service: ServiceId,
    pub worker: Option<WorkerId>,
    /// Ticks of its demand trace already consumed. A migrated replacement
    /// starts from its predecessor's offset rather than replaying the
    /// trace from the beginning.
    pub phase_offset: u64,
    pub state: ContainerState,
}

impl ContainerInstance {
    pub fn new(id: impl Into<ContainerId>, service: impl Into<ServiceId>) -> Self {
        ContainerInstance {
            id: id.into(),
            service: service.into(),
            worker: None,
            phase_offset: 0,
            state: ContainerState::Pending,
        }
    }
}

/// Why a placement attempt produced no assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    /// No worker survived the filters (or the cluster has none alive).
    NoWorker,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::NoWorker => f.write_str("no-worker"),
        }
    }
}

/// Outcome of asking a strategy to place one container.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementDecision {
    pub container: ContainerId,
    pub outcome: PlacementOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlacementOutcome {
    Assigned(WorkerId),
    Rejected(RejectReason),
}

/// Workers plus containers, with the bookkeeping that keeps them
/// consistent: a running container is hosted by exactly one worker, and
/// hosted sets list exactly the running containers placed there.
#[derive(Debug, Clone, Default)]
pub struct Cluster {
    workers: BTreeMap<WorkerId, WorkerNode>,
    containers: BTreeMap<ContainerId, ContainerInstance>,
}

impl Cluster {
    pub fn new() -> Self {
        Cluster::default()
    }

    pub fn add_worker(&mut self, worker: WorkerNode) -> Result<()> {
        if self.workers.contains_key(&worker.id) {
            return Err(Error::DuplicateId(worker.id.to_string()));
        }
        self.workers.insert(worker.id.clone(), worker);
        Ok(())
    }

    /// Registers a new (pending) container.
    pub fn spawn(&mut self, container: ContainerInstance) -> Result<()> {
        if self.containers.contains_key(&container.id) {
            return Err(Error::DuplicateId(container.id.to_string()));
        }
        self.containers.insert(container.id.clone(), container);
        Ok(())
    }

    /// Moves a pending container onto `worker` and marks it running.
    pub fn place(&mut self, container: &ContainerId, worker: &WorkerId) -> Result<()> {
        if !self.workers.contains_key(worker) {
            return Err(Error::UnknownWorker(worker.clone()));
        }
        let inst = self
            .containers
            .get_mut(container)
            .ok_or_else(|| Error::UnknownContainer(container.clone()))?;
        if inst.worker.is_some() {
            return Err(Error::AlreadyPlaced {
                container: container.clone(),
            });
        }
        inst.worker = Some(worker.clone());
        inst.state = ContainerState::Running;
        self.workers
            .get_mut(worker)
            .expect("worker existence checked above")
            .hosted
            .insert(container.clone());
        Ok(())
    }

    /// Kills a container, releasing its slot on whatever worker hosted
    /// it. Returns that worker, or `None` if the container was pending.
    pub fn kill(&mut self, container: &ContainerId) -> Result<Option<WorkerId>> {
        let inst = self
            .containers
            .get_mut(container)
            .ok_or_else(|| Error::UnknownContainer(container.clone()))?;
        let former = inst.worker.take();
        inst.state = ContainerState::Killed;
        if let Some(ref worker) = former {
            self.workers
                .get_mut(worker)
                .ok_or_else(|| Error::UnknownWorker(worker.clone()))?
                .hosted
                .remove(container);
        }
        Ok(former)
    }

    pub fn worker(&self, id: &WorkerId) -> Option<&WorkerNode> {
        self.workers.get(id)
    }

    pub fn worker_mut(&mut self, id: &WorkerId) -> Option<&mut WorkerNode> {
        self.workers.get_mut(id)
    }

    /// Workers in ascending id order.
    pub fn workers(&self) -> impl Iterator<Item = &WorkerNode> {
        self.workers.values()
    }

    pub fn alive_workers(&self) -> impl Iterator<Item = &WorkerNode> {
        self.workers.values().filter(|w| w.alive)
    }

    pub fn container(&self, id: &ContainerId) -> Option<&ContainerInstance> {
        self.containers.get(id)
    }

    pub fn container_mut(&mut self, id: &ContainerId) -> Option<&mut ContainerInstance> {
        self.containers.get_mut(id)
    }

    /// Containers in ascending id order.
    pub fn containers(&self) -> impl Iterator<Item = &ContainerInstance> {
        self.containers.values()
    }

    pub fn running(&self) -> impl Iterator<Item = &ContainerInstance> {
        self.containers
            .values()
            .filter(|c| c.state == ContainerState::Running)
    }

    /// Sum of capacities over alive workers: the system-wide limit vector
    /// that dominant-resource ratios are measured against.
    pub fn alive_capacity(&self) -> Resources {
        self.alive_workers()
            .fold(Resources::zero(), |acc, w| acc + w.capacity)
    }

    /// Whether `worker` hosts a running replica of `service`.
    pub fn hosts_replica(&self, worker: &WorkerId, service: &ServiceId) -> bool {
        self.workers
            .get(worker)
            .map(|w| {
                w.hosted.iter().any(|c| {
                    self.containers
                        .get(c)
                        .is_some_and(|inst| &inst.service == service)
                })
            })
            .unwrap_or(false)
    }

    /// Internal consistency check: every running container is hosted by
    /// exactly the worker it names, and hosted sets contain nothing else.
    /// Violations indicate a bookkeeping bug, so this returns a
    /// human-readable description for assertions.
    pub fn audit(&self) -> std::result::Result<(), String> {
        for inst in self.containers.values() {
            match (&inst.state, &inst.worker) {
                (ContainerState::Running, Some(w)) => {
                    let hosted = self
                        .workers
                        .get(w)
                        .map(|node| node.hosted.contains(&inst.id))
                        .unwrap_or(false);
                    if !hosted {
                        return Err(format!(
                            "running container `{}` missing from hosted set of `{w}`",
                            inst.id
                        ));
                    }
                }
                (ContainerState::Running, None) => {
                    return Err(format!("running container `{}` has no worker", inst.id));
                }
                (_, Some(w)) => {
                    return Err(format!(
                        "non-running container `{}` still assigned to `{w}`",
                        inst.id
                    ));
                }
                (_, None) => {}
            }
        }
        for worker in self.workers.values() {
            for c in &worker.hosted {
                let ok = self
                    .containers
                    .get(c)
                    .is_some_and(|inst| {
                        inst.state == ContainerState::Running
                            && inst.worker.as_ref() == Some(&worker.id)
                    });
                if !ok {
                    return Err(format!(
                        "hosted set of `{}` lists `{c}` which is not running there",
                        worker.id
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec4(m: f64, c: f64, n: f64, b: f64) -> Resources {
        Resources::new(m, c, n, b)
    }

    #[test]
    fn canonical_kind_order_is_fixed() {
        assert_eq!(
            ResourceKind::ALL,
            [
                ResourceKind::Memory,
                ResourceKind::Cpu,
                ResourceKind::Network,
                ResourceKind::BlockIo
            ]
        );
    }

    #[test]
    fn normalized_divides_componentwise() {
        let demand = vec4(2.0, 1.0, 50.0, 10.0);
        let limits = vec4(8.0, 4.0, 100.0, 40.0);
        let ratios = demand.normalized(&limits).unwrap();
        assert_eq!(ratios, vec4(0.25, 0.25, 0.5, 0.25));
    }

    #[test]
    fn normalized_allows_ratios_above_one() {
        let ratios = vec4(12.0, 0.0, 0.0, 0.0)
            .normalized(&vec4(8.0, 1.0, 1.0, 1.0))
            .unwrap();
        assert_eq!(ratios.memory, 1.5, "overload must stay visible, not clamp");
    }

    #[test]
    fn normalized_rejects_zero_limit() {
        let err = vec4(1.0, 1.0, 1.0, 1.0)
            .normalized(&vec4(8.0, 0.0, 1.0, 1.0))
            .unwrap_err();
        assert!(matches!(err, Error::NonPositiveLimit(ResourceKind::Cpu)));
    }

    #[test]
    fn mean_of_singleton_is_identity() {
        let v = vec4(3.0, 1.0, 2.0, 4.0);
        assert_eq!(Resources::mean(&[v]).unwrap(), v);
    }

    #[test]
    fn mean_of_empty_errors() {
        assert!(matches!(
            Resources::mean(&[]).unwrap_err(),
            Error::EmptySamples
        ));
    }

    #[test]
    fn argmax_ties_resolve_in_canonical_order() {
        let v = vec4(0.5, 0.5, 0.1, 0.5);
        assert_eq!(v.argmax_kind(), ResourceKind::Memory);
        assert!(v.argmax_is_tied());
        let w = vec4(0.1, 0.5, 0.5, 0.2);
        assert_eq!(w.argmax_kind(), ResourceKind::Cpu);
    }

    #[test]
    fn saturating_sub_clamps_at_zero() {
        let a = vec4(1.0, 1.0, 1.0, 1.0);
        let b = vec4(2.0, 0.5, 1.0, 0.0);
        assert_eq!(a.saturating_sub(&b), vec4(0.0, 0.5, 0.0, 1.0));
    }

    #[test]
    fn validate_names_the_bad_component() {
        let v = vec4(1.0, f64::NAN, 0.0, 0.0);
        let err = v.validate("test vector").unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidComponent {
                kind: ResourceKind::Cpu,
                ..
            }
        ));
        assert!(vec4(0.0, 0.0, 0.0, 0.0).validate("zero").is_ok());
        assert!(vec4(-1.0, 0.0, 0.0, 0.0).validate("neg").is_err());
    }

    #[test]
    fn generic_math_works_on_f32() {
        let v = ResourceVector::<f32>::new(2.0, 1.0, 4.0, 8.0);
        let limits = ResourceVector::<f32>::splat(8.0);
        let r = v.normalized(&limits).unwrap();
        assert_eq!(r.max_component(), 1.0);
        assert_eq!(r.argmax_kind(), ResourceKind::BlockIo);
    }

    #[test]
    fn worker_capacity_must_be_strictly_positive() {
        assert!(WorkerNode::new("w1", vec4(4.0, 1.0, 1.0, 1.0)).is_ok());
        assert!(WorkerNode::new("w1", vec4(4.0, 0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn cluster_place_and_kill_keep_hosted_sets_consistent() {
        let mut cluster = Cluster::new();
        cluster
            .add_worker(WorkerNode::new("w1", Resources::splat(10.0)).unwrap())
            .unwrap();
        cluster
            .spawn(ContainerInstance::new("svc.0001", "svc"))
            .unwrap();
        let c = ContainerId::new("svc.0001");
        let w = WorkerId::new("w1");

        cluster.place(&c, &w).unwrap();
        assert_eq!(cluster.worker(&w).unwrap().container_count(), 1);
        assert_eq!(cluster.container(&c).unwrap().state, ContainerState::Running);
        cluster.audit().unwrap();

        // Double placement is a bug in the caller.
        assert!(matches!(
            cluster.place(&c, &w),
            Err(Error::AlreadyPlaced { .. })
        ));

        let former = cluster.kill(&c).unwrap();
        assert_eq!(former, Some(w.clone()));
        assert_eq!(cluster.worker(&w).unwrap().container_count(), 0);
        assert_eq!(cluster.container(&c).unwrap().state, ContainerState::Killed);
        cluster.audit().unwrap();
    }

    #[test]
    fn alive_capacity_skips_dead_workers() {
        let mut cluster = Cluster::new();
        cluster
            .add_worker(WorkerNode::new("w1", Resources::splat(4.0)).unwrap())
            .unwrap();
        let mut dead = WorkerNode::new("w2", Resources::splat(16.0)).unwrap();
        dead.alive = false;
        cluster.add_worker(dead).unwrap();
        assert_eq!(cluster.alive_capacity(), Resources::splat(4.0));
    }

    #[test]
    fn hosts_replica_matches_by_service() {
        let mut cluster = Cluster::new();
        cluster
            .add_worker(WorkerNode::new("w1", Resources::splat(10.0)).unwrap())
            .unwrap();
        cluster
            .spawn(ContainerInstance::new("a.0001", "a"))
            .unwrap();
        cluster
            .place(&ContainerId::new("a.0001"), &WorkerId::new("w1"))
            .unwrap();
        let w1 = WorkerId::new("w1");
        assert!(cluster.hosts_replica(&w1, &ServiceId::new("a")));
        assert!(!cluster.hosts_replica(&w1, &ServiceId::new("b")));
    }
}
