//! Run event log: every placement, rejection, alert, migration and kill.

use crate::model::{ContainerId, ServiceId, WorkerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Place,
    Reject,
    Alert,
    Migrate,
    MigrateAbort,
    Kill,
    WorkerOverload,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Place => "place",
            EventKind::Reject => "reject",
            EventKind::Alert => "alert",
            EventKind::Migrate => "migrate",
            EventKind::MigrateAbort => "migrate_abort",
            EventKind::Kill => "kill",
            EventKind::WorkerOverload => "worker_overload",
        }
    }
}

/// One logged event. Fields that do not apply to the kind stay empty in
/// the CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub tick: u64,
    pub kind: EventKind,
    pub container: Option<ContainerId>,
    pub service: Option<ServiceId>,
    pub from_worker: Option<WorkerId>,
    pub to_worker: Option<WorkerId>,
    pub detail: String,
}

/// Append-only event log in simulation order.
#[derive(Debug, Clone, Default)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn push(&mut self, event: Event) {
        debug_assert!(
            self.events.last().map_or(true, |e| e.tick <= event.tick),
            "events must be appended in tick order"
        );
        self.events.push(event);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}
