//! Simulation library for resource-aware container scheduling.
//!
//! The crate models a small heterogeneous cluster in which replicated
//! services arrive over time and draw time-varying amounts of four
//! resources: memory, CPU, network bandwidth and block I/O. Four
//! placement strategies can drive it:
//!
//! * `spread` — fewest containers first (the common orchestrator default);
//! * `binpack` — most containers first;
//! * `random` — uniform over the feasible workers;
//! * `draps` — dominant-resource-aware placement plus alert-driven
//!   migration of the heaviest container away from saturated workers.
//!
//! The headline metric is the cluster bottleneck ν: the worst
//! demand-to-capacity ratio across alive workers and resource kinds.
//! Lower is better — a low ν means no single worker is about to tip
//! over, which is what keeps response times flat under load spikes.
//!
//! The building blocks are exported directly: [`model`] holds the
//! cluster state machine, [`demand`] the trace replay and the manager's
//! usage knowledge, [`scheduler`] the placement strategies, [`migration`]
//! the alert/relocation logic, [`metrics`] the ν accounting plus a
//! brute-force optimum for small instances, and [`sim`] ties them into a
//! deterministic tick loop. [`report`] runs several strategies on one
//! scenario and picks the winner.
//!
//! Resource arithmetic is generic over the float width via [`Scalar`];
//! the simulator itself runs on `f64` through the [`Resources`] alias,
//! with [`Resources32`] available where a packed `f32` vector suffices.

pub mod demand;
pub mod error;
pub mod metrics;
pub mod migration;
pub mod model;
pub mod report;
pub mod scalar;
pub mod scheduler;
pub mod sim;
pub mod trace;

pub use error::{Error, Result};
pub use model::{ResourceKind, ResourceVector};
pub use scalar::Scalar;

/// Double-precision resource vector used throughout the simulator.
pub type Resources = model::Resources;
/// Single-precision variant for callers that trade accuracy for size.
pub type Resources32 = ResourceVector<f32>;
