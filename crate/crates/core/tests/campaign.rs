use dupsim::radio::{Direction, Scenario};
use dupsim::sim::{run_campaign, run_iteration, run_iteration_detailed, RunConfig};
use proptest::prelude::*;

fn small(scenario: Scenario, direction: Direction) -> RunConfig {
    RunConfig {
        scenario,
        direction,
        iterations: 3,
        packets_per_user: 100,
        ..RunConfig::default()
    }
}

#[test]
fn infinite_thresholds_give_all_or_nothing() {
    for s in Scenario::ALL {
        for d in [Direction::Downlink, Direction::Uplink] {
            let easy = run_iteration(
                &RunConfig {
                    beta_db: f64::NEG_INFINITY,
                    ..small(s, d)
                },
                0,
            )
            .unwrap();
            assert_eq!(easy.delivered_within, easy.generated, "{s} {d:?}");
            assert_eq!(easy.network_pdr, 1.0);
            assert_eq!(easy.redundant_retx, 0);
            let hard = run_iteration(
                &RunConfig {
                    beta_db: f64::INFINITY,
                    ..small(s, d)
                },
                0,
            )
            .unwrap();
            assert_eq!(hard.lost, hard.generated);
            assert_eq!(hard.network_pdr, 0.0);
        }
    }
}

#[test]
fn campaigns_do_not_depend_on_the_thread_count() {
    let cfg = RunConfig {
        iterations: 6,
        ..small(Scenario::S3, Direction::Uplink)
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_campaign(&cfg).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.iterations, four.iterations);
    assert_eq!(one.iterations.len(), 6);
}

#[test]
fn scenarios_are_paired_on_the_same_drop() {
    let a = dupsim::sim::World::build(&small(Scenario::S1, Direction::Downlink), 2).unwrap();
    let b = dupsim::sim::World::build(&small(Scenario::S3, Direction::Uplink), 2).unwrap();
    assert_eq!(a.topology.dump(None), b.topology.dump(None));
}

#[test]
fn only_dual_and_ca_scenarios_duplicate() {
    for s in Scenario::ALL {
        let r = run_iteration(&small(s, Direction::Downlink), 1).unwrap();
        match s {
            Scenario::S1 | Scenario::S2 => assert_eq!((r.duplicated, r.dual_ues), (0, 0)),
            Scenario::S1Ca => assert_eq!(r.duplicated, 100 * r.per_ue_pdr.len() as u64),
            Scenario::S3 => assert_eq!(r.duplicated, 100 * r.dual_ues as u64),
        }
    }
}

#[test]
fn cross_leg_discard_is_sound_on_radio_traces() {
    for s in [Scenario::S1Ca, Scenario::S3] {
        for d in [Direction::Downlink, Direction::Uplink] {
            let off = small(s, d);
            let on = RunConfig {
                cross_leg_discard: true,
                ..off.clone()
            };
            let (ra, a) = run_iteration_detailed(&off, 0).unwrap();
            let (rb, b) = run_iteration_detailed(&on, 0).unwrap();
            for (x, y) in a.ues.iter().zip(&b.ues) {
                assert_eq!(x.latencies, y.latencies);
            }
            assert!(ra.redundant_retx > 0, "{s} {d:?}");
            assert!(rb.redundant_retx < ra.redundant_retx, "{s} {d:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_iteration_conserves_packets(
        seed in any::<u64>(),
        s in prop::sample::select(Scenario::ALL.to_vec()),
        uplink in any::<bool>(),
        xn in 0u8..8,
        beta in -5.0f64..20.0,
    ) {
        let cfg = RunConfig {
            master_seed: seed,
            beta_db: beta,
            xn_latency_ms: xn as f64,
            packets_per_user: 40,
            ..small(s, if uplink { Direction::Uplink } else { Direction::Downlink })
        };
        let r = run_iteration(&cfg, 0).unwrap();
        prop_assert!(r.conserves());
        prop_assert!((0.0..=1.0).contains(&r.network_pdr));
        prop_assert!(r.per_ue_pdr.iter().all(|p| (0.0..=1.0).contains(p)));
        if let Some(e) = r.duplication_efficiency {
            prop_assert!((0.0..=1.0).contains(&e));
        }
    }
}
