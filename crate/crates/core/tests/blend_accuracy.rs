//! Sup-norm gap between the blended closed form and the integrated combined
//! model. Bound: 0.05 for every blend weight on the default grid.

use swarmdiff::dynamics::{integrate_combined, linspace, mdl_blend, MacroParams};

fn sup_gap(lambda: f64) -> f64 {
    let p = MacroParams::for_swarm(20, lambda, 1000.0, 0.0);
    let grid = linspace(0.0, 10_000.0, 1000);
    let ode = integrate_combined(&p, &grid).unwrap();
    grid.iter()
        .zip(&ode)
        .map(|(&t, &i)| (mdl_blend(t, &p) - i).abs())
        .fold(0.0, f64::max)
}

#[test]
fn endpoints_are_exact() {
    assert!(sup_gap(0.0) < 1e-6);
    assert!(sup_gap(1.0) < 1e-6);
}

#[test]
fn blend_within_sup_bound_for_every_lambda() {
    let worst: Vec<(f64, f64)> = (0..=20)
        .map(|k| k as f64 / 20.0)
        .map(|l| (l, sup_gap(l)))
        .collect();
    let bad: Vec<_> = worst.iter().filter(|(_, g)| *g > 0.05).collect();
    assert!(bad.is_empty(), "sup-norm gap above 0.05 at {bad:?}");
}
