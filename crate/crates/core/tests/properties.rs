use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swarmdiff::dynamics::{integrate_combined, linspace, mdl_blend, MacroParams};
use swarmdiff::mobility::{levy_quantile, Pose, Walker};
use swarmdiff::sim::{detect_encounters, detect_encounters_brute, run, World};
use swarmdiff::{SimConfig, WalkPolicy};

fn policy() -> impl Strategy<Value = WalkPolicy> {
    prop_oneof![
        (0.0..=1.0f64).prop_map(WalkPolicy::crw),
        (0.0..=1.0f64, 0.05..20.0f64).prop_map(|(rho, leg)| WalkPolicy::Crw { rho, leg }),
        (1.05..3.0f64).prop_map(WalkPolicy::levy),
        (0.0..=1.0f64, 1.05..3.0f64).prop_map(|(r, a)| WalkPolicy::hybrid(r, a)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walkers_stay_in_the_arena(walk in policy(), seed in any::<u64>(), arena in 5.0..300.0f64, speed in 0.01..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = Walker::new(Pose { x: arena / 2.0, y: arena / 3.0, heading: 0.3 });
        for _ in 0..5000 {
            w.advance(&walk, speed, 1.0, arena, &mut rng).unwrap();
            let p = w.pose();
            prop_assert!((0.0..=arena).contains(&p.x) && (0.0..=arena).contains(&p.y), "{p:?}");
            prop_assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&p.heading));
        }
    }

    #[test]
    fn spatial_hash_matches_brute_force(
        pts in prop::collection::vec((0.0..100.0f64, 0.0..100.0f64), 0..120),
        range in 0.1..150.0f64,
    ) {
        prop_assert_eq!(detect_encounters(&pts, range), detect_encounters_brute(&pts, range));
    }

    #[test]
    fn levy_quantile_within_support(u in 0.0..1.0f64, alpha in 1.01..4.0f64, lo in 0.1..10.0f64, span in 0.0..500.0f64) {
        let x = levy_quantile(u, alpha, lo, lo + span);
        prop_assert!(x >= lo && x <= lo + span, "{x}");
    }

    #[test]
    fn model_curves_bounded_and_monotone(lambda in 0.0..=1.0f64, tau in 10.0..5000.0f64, n in 2usize..500) {
        let p = MacroParams::for_swarm(n, lambda, tau, 0.0);
        let grid = linspace(0.0, 12.0 * tau, 300);
        let ode = integrate_combined(&p, &grid).unwrap();
        for w in ode.windows(2) {
            prop_assert!(w[1] >= w[0] && w[1] <= 1.0);
        }
        for &t in &grid {
            let b = mdl_blend(t, &p);
            prop_assert!(b > 0.0 && b <= 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_deterministic_and_curves_well_formed(seed in any::<u64>(), n in 2usize..30, walk in policy()) {
        let cfg = SimConfig {
            n,
            arena: 80.0,
            duration: 3000.0,
            msg_period: 500.0,
            msg_window: 1500.0,
            walk,
            seed,
            ..SimConfig::default()
        };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        prop_assert_eq!(&a.encounters, &b.encounters);
        prop_assert_eq!(&a.curves, &b.curves);
        for c in &a.curves {
            prop_assert_eq!(c.samples[0].informed, 1);
            for w in c.samples.windows(2) {
                prop_assert!(w[1].t >= w[0].t && w[1].informed > w[0].informed);
            }
            prop_assert!(c.final_informed() <= n);
        }
    }

    #[test]
    fn message_sets_never_shrink(seed in any::<u64>()) {
        let cfg = SimConfig { n: 12, arena: 60.0, duration: 2000.0, msg_period: 300.0, msg_window: 1200.0, seed, ..SimConfig::default() };
        let mut world = World::new(cfg.clone()).unwrap();
        let k = cfg.message_count();
        let mut held = vec![false; cfg.n * k];
        for _ in 0..cfg.ticks() {
            world.step().unwrap();
            for r in 0..cfg.n {
                for m in 0..k {
                    let now = world.holds(r, m);
                    prop_assert!(now || !held[r * k + m]);
                    held[r * k + m] = now;
                }
            }
        }
    }
}
