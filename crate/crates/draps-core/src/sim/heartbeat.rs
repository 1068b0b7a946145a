//! Worker-to-manager heartbeats and their byte cost.
//!
//! Both manager flavors receive a heartbeat from every alive worker each
//! period. A baseline heartbeat carries only node state and costs the
//! fixed header. A resource-aware heartbeat additionally reports each
//! hosted container's windowed average usage and the worker's available
//! capacity, paying a fixed per-container increment — the bandwidth
//! price of the richer placement signal.

use std::collections::BTreeMap;

use crate::model::{ContainerId, Resources, WorkerId};

/// Bytes for node state common to both flavors.
pub const HEARTBEAT_HEADER_BYTES: u64 = 64;
/// Additional bytes per reported container (id + four usage floats).
pub const HEARTBEAT_PER_CONTAINER_BYTES: u64 = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct HeartbeatMsg {
    pub worker: WorkerId,
    pub tick: u64,
    /// Windowed average usage per hosted container. Empty in baseline
    /// mode, where the manager is not told about per-container usage.
    pub container_usage: BTreeMap<ContainerId, Resources>,
    /// Capacity minus windowed usage, as the worker sees it. `None` in
    /// baseline mode.
    pub available: Option<Resources>,
}

impl HeartbeatMsg {
    /// Wire cost: header plus the per-container increments.
    pub fn payload_bytes(&self) -> u64 {
        HEARTBEAT_HEADER_BYTES
            + HEARTBEAT_PER_CONTAINER_BYTES * self.container_usage.len() as u64
    }
}
