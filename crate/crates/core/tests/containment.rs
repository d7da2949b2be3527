//! Long-horizon containment: a million ticks per walk family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swarmdiff::mobility::{Pose, Walker};
use swarmdiff::WalkPolicy;

#[test]
fn million_ticks_inside_arena() {
    let arena = 200.0;
    for (k, walk) in [
        WalkPolicy::crw(0.7),
        WalkPolicy::Crw {
            rho: 0.2,
            leg: 0.05,
        },
        WalkPolicy::levy(1.4),
        WalkPolicy::hybrid(0.6, 1.8),
    ]
    .iter()
    .enumerate()
    {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        // A fast walker so the boundary is hit often.
        let mut w = Walker::new(Pose {
            x: 199.99,
            y: 0.01,
            heading: 0.0,
        });
        for _ in 0..1_000_000 {
            w.advance(walk, 3.0, 1.0, arena, &mut rng).unwrap();
            let p = w.pose();
            assert!(
                (0.0..=arena).contains(&p.x) && (0.0..=arena).contains(&p.y),
                "{walk}: {p:?}"
            );
        }
    }
}
