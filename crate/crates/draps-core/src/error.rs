use thiserror::Error;

use crate::model::{ContainerId, ResourceKind, ServiceId, WorkerId};

/// Errors produced by the library.
///
/// Invalid numeric inputs (non-finite or negative components, zero
/// capacities) are rejected at the boundary where they enter, so the
/// arithmetic deeper in never has to re-check them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: component {kind} is non-finite or negative")]
    InvalidComponent {
        context: String,
        kind: ResourceKind,
    },

    #[error("limit for {0} must be positive")]
    NonPositiveLimit(ResourceKind),

    #[error("cannot aggregate an empty sample set")]
    EmptySamples,

    #[error("unknown service `{0}`")]
    UnknownService(ServiceId),

    #[error("no usage samples recorded for service `{0}`")]
    NoUsageData(ServiceId),

    #[error("unknown container `{0}`")]
    UnknownContainer(ContainerId),

    #[error("unknown worker `{0}`")]
    UnknownWorker(WorkerId),

    #[error("worker `{0}` is not alive")]
    WorkerNotAlive(WorkerId),

    #[error("container `{container}` is not hosted by worker `{worker}`")]
    NotHosted {
        container: ContainerId,
        worker: WorkerId,
    },

    #[error("container `{container}` is already placed")]
    AlreadyPlaced { container: ContainerId },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("no alive workers")]
    NoAliveWorkers,

    #[error("instance too large for exhaustive search: {containers} containers x {workers} workers (max {max_containers}x{max_workers})")]
    InstanceTooLarge {
        containers: usize,
        workers: usize,
        max_containers: usize,
        max_workers: usize,
    },

    #[error("invalid scenario: {0}")]
    Config(String),

    #[error("trace line {line}: {message}")]
    Trace { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
