//! Property tests over generated scenarios and sample sets. These are
//! the development-time versions of the invariant criterion in the
//! acceptance suite, split out so a violation shrinks to a minimal
//! counterexample.

mod common;

use proptest::prelude::*;

use draps_core::model::Resources;
use draps_core::scheduler::SchedulerKind;
use draps_core::sim::{self, EventKind};

use common::{
    build, check_conservation, check_determinism, check_no_self_migration, dominant_of_scaled,
    gen, recompute_final_nu, with_peak_reservations,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Identical scenarios produce byte-identical outputs, whatever the
    /// strategy — the whole engine is deterministic given the seed.
    #[test]
    fn reruns_are_byte_identical(sketch in gen::sketch(&SchedulerKind::ALL)) {
        check_determinism(&build(&sketch));
    }

    /// Containers are conserved: placements plus migrations minus kills
    /// equals the final hosted population, and no container is ever on
    /// two workers (the engine audits that every tick and panics
    /// otherwise).
    #[test]
    fn containers_are_conserved(sketch in gen::sketch(&SchedulerKind::ALL)) {
        let output = sim::run(&build(&sketch)).expect("generated scenarios run");
        check_conservation(&output);
    }

    /// The summary's final ν matches a recomputation from the emitted
    /// metrics rows, so the CSV is a faithful record of the run.
    #[test]
    fn final_nu_matches_the_metrics_rows(sketch in gen::sketch(&SchedulerKind::ALL)) {
        let output = sim::run(&build(&sketch)).expect("generated scenarios run");
        prop_assert_eq!(output.summary.final_nu, recompute_final_nu(&output));
    }

    /// Migrations never land back on the alerting worker, and the event
    /// stream stays balanced when they happen.
    #[test]
    fn migrations_never_self_target(sketch in gen::sketch(&[SchedulerKind::Draps])) {
        let output = sim::run(&build(&sketch)).expect("generated scenarios run");
        check_no_self_migration(&output);
        check_conservation(&output);
        // Every migration is paired with exactly one kill of the old
        // instance on the source worker.
        let migrates = output.events.count(EventKind::Migrate) as u64;
        prop_assert_eq!(output.summary.migrations, migrates);
        prop_assert!(output.summary.kills >= migrates);
    }

    /// With reservations set to each trace's componentwise peak, the
    /// resource filter admits only what fits, so no memory overload can
    /// ever happen — under any strategy and any arrival order.
    #[test]
    fn peak_reservations_prevent_overloads(sketch in gen::sketch(&SchedulerKind::ALL)) {
        let scenario = with_peak_reservations(build(&sketch));
        let output = sim::run(&scenario).expect("generated scenarios run");
        prop_assert_eq!(output.summary.worker_overloads, 0);
    }

    /// Scaling every usage sample of a service by the same positive
    /// constant never changes its dominant resource kind.
    #[test]
    fn dominant_kind_is_scale_invariant(
        samples in prop::collection::vec(
            (1e3..1e9f64, 0.01..8.0f64, 0.0..1e8f64, 0.0..1e8f64)
                .prop_map(|(m, c, n, b)| Resources::new(m, c, n, b)),
            1..=6,
        ),
        exp in -8i32..=8,
    ) {
        let limits = Resources::new(32e9, 16.0, 1e9, 1e9);
        let base = dominant_of_scaled(&samples, 1.0, &limits);
        let scaled = dominant_of_scaled(&samples, 2f64.powi(exp), &limits);
        prop_assert_eq!(base, scaled);
    }

    /// The dominant kind also ignores the order samples arrive in.
    #[test]
    fn dominant_kind_ignores_sample_order(
        mut samples in prop::collection::vec(
            (1e3..1e9f64, 0.01..8.0f64, 0.0..1e8f64, 0.0..1e8f64)
                .prop_map(|(m, c, n, b)| Resources::new(m, c, n, b)),
            2..=6,
        ),
    ) {
        let limits = Resources::new(32e9, 16.0, 1e9, 1e9);
        let forward = dominant_of_scaled(&samples, 1.0, &limits);
        samples.reverse();
        let reversed = dominant_of_scaled(&samples, 1.0, &limits);
        prop_assert_eq!(forward, reversed);
    }
}
