//! Load metrics: per-worker utilization, the cluster-wide peak ratio ν,
//! constraint audits, and an exhaustive oracle for the smallest instances.
//!
//! ν (nu) is the highest single resource ratio anywhere in the cluster:
//! `max` over alive workers of `max` over kinds of demand/capacity. The
//! schedulers try to keep it low; the oracle computes the true optimum by
//! enumerating every assignment, which is what heuristic results are
//! judged against in tests.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{
    Cluster, ContainerId, ContainerState, ResourceKind, ResourceVector, Resources, WorkerId,
    WorkerNode,
};
use crate::scalar::Scalar;

/// One worker's load at one instant, as emitted into the metrics CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilizationRecord {
    pub tick: u64,
    pub worker: WorkerId,
    /// Demand/capacity per kind; components above 1.0 mean overload.
    pub ratios: Resources,
    /// Largest ratio on this worker.
    pub worker_max: f64,
    pub n_containers: usize,
    pub alive: bool,
}

impl UtilizationRecord {
    pub fn new(
        tick: u64,
        worker: WorkerId,
        ratios: Resources,
        n_containers: usize,
        alive: bool,
    ) -> Self {
        let worker_max = ratios.max_component();
        UtilizationRecord {
            tick,
            worker,
            ratios,
            worker_max,
            n_containers,
            alive,
        }
    }
}

/// Sums usage vectors and normalizes by `capacity`.
pub fn utilization_ratios<T: Scalar>(
    capacity: &ResourceVector<T>,
    usages: impl IntoIterator<Item = ResourceVector<T>>,
) -> Result<ResourceVector<T>> {
    let total = usages
        .into_iter()
        .fold(ResourceVector::zero(), |acc, u| acc + u);
    total.normalized(capacity)
}

/// Utilization of one worker given the current usage of its containers.
///
/// Every key in `usages` must be hosted by `worker`; attributing another
/// worker's container here is a bookkeeping error, not a zero.
pub fn utilization(
    worker: &WorkerNode,
    usages: &BTreeMap<ContainerId, Resources>,
) -> Result<Resources> {
    for id in usages.keys() {
        if !worker.hosted.contains(id) {
            return Err(Error::NotHosted {
                container: id.clone(),
                worker: worker.id.clone(),
            });
        }
    }
    utilization_ratios(&worker.capacity, usages.values().copied())
}

/// Cluster-wide ν over a set of per-worker records from the same
/// instant: the worst single ratio on any alive worker.
pub fn cluster_nu(records: &[UtilizationRecord]) -> Result<f64> {
    records
        .iter()
        .filter(|r| r.alive)
        .map(|r| r.worker_max)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        })
        .ok_or(Error::NoAliveWorkers)
}

/// A broken placement or capacity constraint found by [`check_constraints`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A running container is hosted by no worker.
    Unplaced { container: ContainerId },
    /// A container appears in more than one hosted set.
    MultiplyPlaced { container: ContainerId, hosts: usize },
    /// A worker's total demand exceeds capacity in some kind.
    OverCapacity {
        worker: WorkerId,
        kind: ResourceKind,
        ratio: f64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Unplaced { container } => {
                write!(f, "running container `{container}` is unplaced")
            }
            Violation::MultiplyPlaced { container, hosts } => {
                write!(f, "container `{container}` hosted by {hosts} workers")
            }
            Violation::OverCapacity {
                worker,
                kind,
                ratio,
            } => {
                write!(f, "worker `{worker}` over capacity on {kind}: {ratio:.4}")
            }
        }
    }
}

/// Audits a cluster snapshot against the placement constraints: every
/// running container on exactly one worker, and no worker over capacity
/// given `usages` (containers without a usage entry count as zero).
pub fn check_constraints(
    cluster: &Cluster,
    usages: &BTreeMap<ContainerId, Resources>,
) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut host_counts: BTreeMap<&ContainerId, usize> = BTreeMap::new();
    for worker in cluster.workers() {
        for container in &worker.hosted {
            *host_counts.entry(container).or_default() += 1;
        }
    }
    for inst in cluster.containers() {
        if inst.state != ContainerState::Running {
            continue;
        }
        match host_counts.get(&inst.id).copied().unwrap_or(0) {
            0 => violations.push(Violation::Unplaced {
                container: inst.id.clone(),
            }),
            1 => {}
            hosts => violations.push(Violation::MultiplyPlaced {
                container: inst.id.clone(),
                hosts,
            }),
        }
    }

    for worker in cluster.workers() {
        let hosted_usage = worker
            .hosted
            .iter()
            .filter_map(|c| usages.get(c))
            .copied();
        let ratios = utilization_ratios(&worker.capacity, hosted_usage)
            .expect("worker capacities are strictly positive by construction");
        for kind in ResourceKind::ALL {
            if ratios[kind] > 1.0 {
                violations.push(Violation::OverCapacity {
                    worker: worker.id.clone(),
                    kind,
                    ratio: ratios[kind],
                });
            }
        }
    }

    violations
}

/// Largest instance the exhaustive oracle accepts: |workers|^|containers|
/// assignments are enumerated, so these bounds keep the worst case at
/// 4^12 (about 17 million) evaluations.
pub const ORACLE_MAX_CONTAINERS: usize = 12;
pub const ORACLE_MAX_WORKERS: usize = 4;

/// Result of the exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome<T> {
    /// Best achievable ν.
    pub nu: T,
    /// Worker index per container achieving it (first optimum in
    /// enumeration order, so the result is deterministic).
    pub assignment: Vec<usize>,
    /// Whether that optimum satisfies every capacity constraint. When no
    /// assignment does, the least-bad one is returned with `false`.
    pub feasible: bool,
}

/// Optimal ν by brute force: every container-to-worker assignment is
/// evaluated. Feasible assignments (all ratios ≤ 1) are preferred; among
/// equally feasible ones the smaller ν wins.
pub fn brute_force_optimal_nu<T: Scalar>(
    demands: &[ResourceVector<T>],
    capacities: &[ResourceVector<T>],
) -> Result<OracleOutcome<T>> {
    if capacities.is_empty() {
        return Err(Error::NoAliveWorkers);
    }
    if demands.len() > ORACLE_MAX_CONTAINERS || capacities.len() > ORACLE_MAX_WORKERS {
        return Err(Error::InstanceTooLarge {
            containers: demands.len(),
            workers: capacities.len(),
            max_containers: ORACLE_MAX_CONTAINERS,
            max_workers: ORACLE_MAX_WORKERS,
        });
    }
    for (i, d) in demands.iter().enumerate() {
        d.validate(&format!("oracle demand {i}"))?;
    }
    for (j, c) in capacities.iter().enumerate() {
        c.validate(&format!("oracle capacity {j}"))?;
        if !c.all_positive() {
            return Err(Error::NonPositiveLimit(
                ResourceKind::ALL
                    .into_iter()
                    .find(|&k| c[k] <= T::zero())
                    .expect("some component is non-positive"),
            ));
        }
    }

    if demands.is_empty() {
        return Ok(OracleOutcome {
            nu: T::zero(),
            assignment: vec![],
            feasible: true,
        });
    }

    let n_workers = capacities.len();
    let mut assignment = vec![0usize; demands.len()];
    let mut best: Option<OracleOutcome<T>> = None;

    loop {
        // Evaluate the current assignment.
        let mut loads = vec![ResourceVector::<T>::zero(); n_workers];
        for (i, &j) in assignment.iter().enumerate() {
            loads[j] += demands[i];
        }
        let mut nu = T::zero();
        for (j, load) in loads.iter().enumerate() {
            for kind in ResourceKind::ALL {
                nu = nu.max(load[kind] / capacities[j][kind]);
            }
        }
        let feasible = nu <= T::one();

        let better = match &best {
            None => true,
            Some(b) => (feasible && !b.feasible) || (feasible == b.feasible && nu < b.nu),
        };
        if better {
            best = Some(OracleOutcome {
                nu,
                assignment: assignment.clone(),
                feasible,
            });
        }

        // Odometer step: container 0 is the fastest digit.
        let mut pos = 0;
        loop {
            assignment[pos] += 1;
            if assignment[pos] < n_workers {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
            if pos == assignment.len() {
                return Ok(best.expect("at least one assignment was evaluated"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ContainerInstance, WorkerNode};

    const GIB: f64 = 1024.0 * 1024.0 * 1024.0;

    fn mem(v: f64) -> Resources {
        Resources::new(v, 0.0, 0.0, 0.0)
    }

    fn cap(mem: f64) -> Resources {
        Resources::new(mem, 4.0, 1e9, 1e9)
    }

    #[test]
    fn utilization_sums_and_normalizes() {
        let mut worker = WorkerNode::new("w1", cap(8.0 * GIB)).unwrap();
        worker.hosted.insert(ContainerId::new("a.0001"));
        worker.hosted.insert(ContainerId::new("b.0001"));
        let usages = BTreeMap::from([
            (ContainerId::new("a.0001"), mem(2.0 * GIB)),
            (ContainerId::new("b.0001"), mem(2.0 * GIB)),
        ]);
        let ratios = utilization(&worker, &usages).unwrap();
        assert_eq!(ratios.memory, 0.5);
        assert_eq!(ratios.cpu, 0.0);
    }

    #[test]
    fn utilization_rejects_foreign_containers() {
        let worker = WorkerNode::new("w1", cap(8.0 * GIB)).unwrap();
        let usages = BTreeMap::from([(ContainerId::new("other.0001"), mem(GIB))]);
        assert!(matches!(
            utilization(&worker, &usages).unwrap_err(),
            Error::NotHosted { .. }
        ));
    }

    #[test]
    fn cluster_nu_is_max_over_alive_workers() {
        let records = vec![
            UtilizationRecord::new(0, WorkerId::new("w1"), mem(0.3), 1, true),
            UtilizationRecord::new(0, WorkerId::new("w2"), mem(0.9), 2, false),
            UtilizationRecord::new(0, WorkerId::new("w3"), mem(0.7), 1, true),
        ];
        // The 0.9 belongs to a dead worker and must not count.
        assert_eq!(cluster_nu(&records).unwrap(), 0.7);
    }

    #[test]
    fn cluster_nu_with_no_alive_workers_errors() {
        let records = vec![UtilizationRecord::new(
            0,
            WorkerId::new("w1"),
            mem(0.5),
            1,
            false,
        )];
        assert!(matches!(
            cluster_nu(&records).unwrap_err(),
            Error::NoAliveWorkers
        ));
    }

    #[test]
    fn check_constraints_flags_overcapacity() {
        let mut cluster = Cluster::new();
        cluster
            .add_worker(WorkerNode::new("w1", cap(4.0 * GIB)).unwrap())
            .unwrap();
        cluster
            .spawn(ContainerInstance::new("s.0001", "s"))
            .unwrap();
        cluster
            .place(&ContainerId::new("s.0001"), &WorkerId::new("w1"))
            .unwrap();
        let usages = BTreeMap::from([(ContainerId::new("s.0001"), mem(5.0 * GIB))]);
        let violations = check_constraints(&cluster, &usages);
        assert_eq!(violations.len(), 1);
        assert!(matches!(
            violations[0],
            Violation::OverCapacity {
                kind: ResourceKind::Memory,
                ..
            }
        ));
    }

    #[test]
    fn check_constraints_passes_a_consistent_snapshot() {
        let mut cluster = Cluster::new();
        cluster
            .add_worker(WorkerNode::new("w1", cap(4.0 * GIB)).unwrap())
            .unwrap();
        cluster
            .spawn(ContainerInstance::new("s.0001", "s"))
            .unwrap();
        cluster
            .place(&ContainerId::new("s.0001"), &WorkerId::new("w1"))
            .unwrap();
        let usages = BTreeMap::from([(ContainerId::new("s.0001"), mem(GIB))]);
        assert!(check_constraints(&cluster, &usages).is_empty());
    }

    #[test]
    fn oracle_single_container_single_worker() {
        let out = brute_force_optimal_nu(&[mem(2.0)], &[cap(8.0)]).unwrap();
        assert_eq!(out.assignment, vec![0]);
        assert_eq!(out.nu, 0.25);
        assert!(out.feasible);
    }

    // Two workers with 4 and 8 GiB of memory, three containers of
    // 3 GiB each. Enumerating all 2^3 assignments by hand: the best
    // split puts one container on the small worker (3/4) and two on the
    // large one (6/8), both exactly 0.75. Anything else reaches 1.125
    // or worse.
    #[test]
    fn oracle_reproduces_hand_enumerated_optimum() {
        let demands = vec![mem(3.0 * GIB); 3];
        let capacities = vec![cap(4.0 * GIB), cap(8.0 * GIB)];
        let out = brute_force_optimal_nu(&demands, &capacities).unwrap();
        assert_eq!(out.nu, 0.75, "optimum must be exact, not approximate");
        assert!(out.feasible);
        // The returned assignment must actually achieve that ν.
        let mut loads = [0.0f64; 2];
        for (i, &j) in out.assignment.iter().enumerate() {
            loads[j] += demands[i].memory;
        }
        let achieved = (loads[0] / (4.0 * GIB)).max(loads[1] / (8.0 * GIB));
        assert_eq!(achieved, 0.75);
    }

    #[test]
    fn oracle_reports_least_bad_when_infeasible() {
        // One container that exceeds every worker's memory.
        let out = brute_force_optimal_nu(&[mem(10.0)], &[cap(4.0), cap(8.0)]).unwrap();
        assert!(!out.feasible);
        assert_eq!(out.nu, 1.25, "least-bad assignment picks the 8.0 worker");
        assert_eq!(out.assignment, vec![1]);
    }

    #[test]
    fn oracle_rejects_oversized_instances() {
        let demands = vec![mem(1.0); ORACLE_MAX_CONTAINERS + 1];
        let err = brute_force_optimal_nu(&demands, &[cap(8.0)]).unwrap_err();
        assert!(matches!(err, Error::InstanceTooLarge { .. }));
    }

    #[test]
    fn oracle_handles_empty_container_set() {
        let out = brute_force_optimal_nu::<f64>(&[], &[cap(8.0)]).unwrap();
        assert_eq!(out.nu, 0.0);
        assert!(out.feasible);
    }

    #[test]
    fn oracle_is_generic_over_scalar_type() {
        let demands = vec![ResourceVector::<f32>::new(3.0, 0.0, 0.0, 0.0); 3];
        let capacities = vec![
            ResourceVector::<f32>::new(4.0, 1.0, 1.0, 1.0),
            ResourceVector::<f32>::new(8.0, 1.0, 1.0, 1.0),
        ];
        let out = brute_force_optimal_nu(&demands, &capacities).unwrap();
        assert_eq!(out.nu, 0.75f32);
    }
}
