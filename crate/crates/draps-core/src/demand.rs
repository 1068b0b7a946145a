//! Demand traces and the manager's per-service usage knowledge.
//!
//! Containers replay time-varying demand from a [`DemandTrace`]. On the
//! manager side, a [`KnownServiceRegistry`] buffers recent usage samples
//! (reported via heartbeats) per container, flips a service to "known"
//! once enough history has accumulated, and derives the service's average
//! demand and dominant resource from that history.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{ContainerId, ResourceKind, Resources, ServiceId, TraceId};

/// Time-varying demand, replayed by every container of a service.
///
/// Samples are absolute usage vectors, one per `sample_interval_s`
/// seconds. Replay past the end holds the final sample, which models a
/// workload that has reached steady state.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandTrace {
    pub id: TraceId,
    pub sample_interval_s: f64,
    samples: Vec<Resources>,
}

impl DemandTrace {
    pub fn new(
        id: impl Into<TraceId>,
        sample_interval_s: f64,
        samples: Vec<Resources>,
    ) -> Result<Self> {
        let id = id.into();
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        if !(sample_interval_s.is_finite() && sample_interval_s > 0.0) {
            return Err(Error::Config(format!(
                "trace `{id}` has non-positive sample interval"
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            s.validate(&format!("trace `{id}` sample {i}"))?;
        }
        Ok(DemandTrace {
            id,
            sample_interval_s,
            samples,
        })
    }

    /// Constant demand: a single sample held forever.
    pub fn constant(id: impl Into<TraceId>, demand: Resources) -> Result<Self> {
        Self::new(id, 1.0, vec![demand])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Resources] {
        &self.samples
    }

    /// Demand after the container has consumed `offset_ticks` ticks of
    /// `tick_seconds` each. The sample index is the elapsed time divided
    /// by the sample interval, clamped to the final sample.
    pub fn sample_at(&self, offset_ticks: u64, tick_seconds: f64) -> Resources {
        let elapsed = offset_ticks as f64 * tick_seconds;
        let idx = (elapsed / self.sample_interval_s).floor() as usize;
        self.samples[idx.min(self.samples.len() - 1)]
    }

    /// Component-wise maximum over all samples: the tightest reservation
    /// that is never exceeded during replay.
    pub fn peak(&self) -> Resources {
        self.samples
            .iter()
            .fold(Resources::zero(), |acc, s| acc.zip_with(s, f64::max))
    }
}

/// Tunables for service knowledge accumulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandConfig {
    /// Total samples a service must accumulate before it counts as known.
    pub warmup_samples: usize,
    /// Recent samples retained per container; older ones age out.
    pub window_samples: usize,
}

impl Default for DemandConfig {
    fn default() -> Self {
        // At a 5-tick heartbeat cadence, 6 retained samples cover about
        // half a minute of history per container.
        DemandConfig {
            warmup_samples: 12,
            window_samples: 6,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct ServiceHistory {
    /// Sliding window of (tick, usage) per container, newest at the back.
    per_container: BTreeMap<ContainerId, VecDeque<(u64, Resources)>>,
    /// Cumulative samples ever recorded; drives the known flag.
    total_recorded: usize,
    /// Dominant kind as of the last computation, for inspection.
    cached_dominant: Option<ResourceKind>,
}

/// The manager's view of which services it has seen enough of to trust.
///
/// Services must be registered before usage can be recorded for them.
/// A service becomes *known* once `warmup_samples` usage samples have
/// been recorded across all of its containers; from then on its average
/// demand and dominant resource are considered meaningful.
#[derive(Debug, Clone, Default)]
pub struct KnownServiceRegistry {
    config: DemandConfig,
    services: BTreeMap<ServiceId, ServiceHistory>,
}

impl KnownServiceRegistry {
    pub fn new(config: DemandConfig) -> Self {
        KnownServiceRegistry {
            config,
            services: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> DemandConfig {
        self.config
    }

    pub fn register(&mut self, service: impl Into<ServiceId>) {
        self.services.entry(service.into()).or_default();
    }

    pub fn contains(&self, service: &ServiceId) -> bool {
        self.services.contains_key(service)
    }

    /// Records one usage sample for a container of `service`, trimming
    /// that container's window to the configured length.
    pub fn record_usage(
        &mut self,
        service: &ServiceId,
        container: &ContainerId,
        usage: Resources,
        tick: u64,
    ) -> Result<()> {
        usage.validate(&format!("usage sample for `{container}`"))?;
        let window = self.config.window_samples;
        let history = self
            .services
            .get_mut(service)
            .ok_or_else(|| Error::UnknownService(service.clone()))?;
        let buf = history.per_container.entry(container.clone()).or_default();
        buf.push_back((tick, usage));
        while buf.len() > window {
            buf.pop_front();
        }
        history.total_recorded += 1;
        Ok(())
    }

    /// Drops a container's buffered samples (it was killed or migrated
    /// away, so its window would otherwise go stale forever). The
    /// cumulative sample count is unaffected: knowledge, once earned,
    /// persists.
    pub fn retire_container(&mut self, service: &ServiceId, container: &ContainerId) {
        if let Some(history) = self.services.get_mut(service) {
            history.per_container.remove(container);
        }
    }

    /// Cumulative samples ever recorded for `service`.
    pub fn sample_count(&self, service: &ServiceId) -> usize {
        self.services
            .get(service)
            .map(|h| h.total_recorded)
            .unwrap_or(0)
    }

    /// True once the service has accumulated at least `warmup_samples`
    /// samples in total.
    pub fn is_known(&self, service: &ServiceId) -> bool {
        self.sample_count(service) >= self.config.warmup_samples
    }

    /// Services currently known, in id order.
    pub fn known_services(&self) -> Vec<ServiceId> {
        self.services
            .keys()
            .filter(|s| self.is_known(s))
            .cloned()
            .collect()
    }

    /// Average demand of `service`: the component-wise mean over every
    /// buffered sample of every container. Errors if the service is
    /// unregistered or has no buffered samples.
    pub fn average_demand(&self, service: &ServiceId) -> Result<Resources> {
        let history = self
            .services
            .get(service)
            .ok_or_else(|| Error::UnknownService(service.clone()))?;
        let samples: Vec<Resources> = history
            .per_container
            .values()
            .flat_map(|buf| buf.iter().map(|(_, u)| *u))
            .collect();
        if samples.is_empty() {
            return Err(Error::NoUsageData(service.clone()));
        }
        Resources::mean(&samples)
    }

    /// Dominant resource of `service`: the kind where its average demand
    /// is largest relative to the system-wide limits (ties resolve in
    /// canonical kind order). The result is cached on the history for
    /// inspection via [`cached_dominant`](Self::cached_dominant).
    pub fn dominant_resource(
        &mut self,
        service: &ServiceId,
        limits: &Resources,
    ) -> Result<ResourceKind> {
        let average = self.average_demand(service)?;
        let dominant = average.normalized(limits)?.argmax_kind();
        self.services
            .get_mut(service)
            .expect("service existence checked by average_demand")
            .cached_dominant = Some(dominant);
        Ok(dominant)
    }

    /// Dominant kind as of the last [`dominant_resource`](Self::dominant_resource)
    /// call, if any.
    pub fn cached_dominant(&self, service: &ServiceId) -> Option<ResourceKind> {
        self.services
            .get(service)
            .and_then(|h| h.cached_dominant)
    }
}
