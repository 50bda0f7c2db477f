//! Shared test support: synthetic trajectories, the closed-form
//! minimum-distance oracle for piecewise-linear flights, and random model
//! generation for solver cross-checks.

#![allow(dead_code)]

use rand::Rng;
use wta_core::dynamics::{Outcome, Trajectory};
use wta_core::interference::CandidateId;
use wta_core::milp::{AssignmentModel, Candidate};
use wta_core::Vec3;

/// Constant-velocity straight-line trajectory over `[t0, t0 + duration]`.
pub fn linear_flight(start: Vec3, velocity: Vec3, t0: f64, duration: f64, dt: f64) -> Trajectory {
    let steps = (duration / dt).round().max(1.0) as usize;
    let samples: Vec<(Vec3, Vec3)> =
        (0..=steps).map(|i| (start + velocity * (i as f64 * dt), velocity)).collect();
    Trajectory::from_samples(t0, dt, samples, Outcome::Intercept, None)
}

/// Exact minimum separation of two piecewise-linear interpolants over the
/// overlap of their windows.
///
/// Splits the overlap at every sample breakpoint of either trajectory; within
/// one interval both positions move linearly, so the squared distance is a
/// quadratic whose clamped vertex gives the interval minimum. This is the
/// independent reference the grid-based physical check is validated against.
pub fn min_distance_oracle(a: (&Trajectory, f64), b: (&Trajectory, f64)) -> Option<f64> {
    let (ta, shift_a) = a;
    let (tb, shift_b) = b;
    let start = (ta.t0() + shift_a).max(tb.t0() + shift_b);
    let end = (ta.terminal_time() + shift_a).min(tb.terminal_time() + shift_b);
    if start > end {
        return None;
    }

    // Breakpoints of both trajectories inside the overlap.
    let mut cuts = vec![start, end];
    for (traj, shift) in [(ta, shift_a), (tb, shift_b)] {
        for i in 0..traj.len() {
            let t = traj.t0() + i as f64 * traj.dt() + shift;
            if t > start && t < end {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let pos = |traj: &Trajectory, shift: f64, t: f64| traj.state_at(t - shift).0;
    let mut best = f64::INFINITY;
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let h = hi - lo;
        let r0 = pos(tb, shift_b, lo) - pos(ta, shift_a, lo);
        let r1 = pos(tb, shift_b, hi) - pos(ta, shift_a, hi);
        best = best.min(r0.norm()).min(r1.norm());
        if h > 0.0 {
            let vrel = (r1 - r0) / h;
            let v_sq = vrel.norm_sq();
            if v_sq > 0.0 {
                let t_star = (-r0.dot(vrel) / v_sq).clamp(0.0, h);
                best = best.min((r0 + vrel * t_star).norm());
            }
        }
    }
    Some(best)
}

/// Random constant-velocity trajectory pair with overlapping windows, scaled
/// to pass near each other so threshold checks get exercised on both sides.
pub fn random_linear_pair(rng: &mut impl Rng) -> (Trajectory, Trajectory) {
    let dt = 0.05;
    let duration = rng.gen_range(5.0..20.0);
    let start_a = Vec3::new(
        rng.gen_range(-2000.0..2000.0),
        rng.gen_range(-2000.0..2000.0),
        rng.gen_range(-6000.0..-3000.0),
    );
    // b starts somewhere near a's mid-flight point so close approaches happen
    let vel = |rng: &mut dyn rand::RngCore| {
        Vec3::new(
            rng.gen_range(-300.0..300.0),
            rng.gen_range(-300.0..300.0),
            rng.gen_range(-100.0..100.0),
        )
    };
    let va = vel(rng);
    let offset = Vec3::new(
        rng.gen_range(-400.0..400.0),
        rng.gen_range(-400.0..400.0),
        rng.gen_range(-200.0..200.0),
    );
    let start_b = start_a + va * (duration / 2.0) + offset;
    let vb = vel(rng);
    let t0_a = rng.gen_range(0.0..5.0);
    let t0_b = rng.gen_range(0.0..5.0);
    (
        linear_flight(start_a, va, t0_a, duration, dt),
        linear_flight(start_b, vb, t0_b, rng.gen_range(5.0..20.0), dt),
    )
}

/// Random assignment model with up to `max_vars` variables, conflict density
/// up to 50% and random caps, for solver-vs-oracle equivalence checks.
pub fn random_model(seed: u64, max_vars: usize) -> AssignmentModel {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n_targets = rng.gen_range(1..=4usize);
    let n_farms = rng.gen_range(1..=3usize);
    let n_vars = rng.gen_range(1..=max_vars);
    let mut candidates = Vec::new();
    for v in 0..n_vars {
        candidates.push(Candidate {
            id: CandidateId {
                farm: rng.gen_range(0..n_farms),
                target: rng.gen_range(0..n_targets),
                pip: v,
            },
            launch_time: rng.gen_range(0.0..12.0),
            impact_time: 60.0,
        });
    }
    let density = rng.gen_range(0.0..0.5);
    let mut extra = Vec::new();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            if rng.gen_bool(density) {
                extra.push((candidates[i].id, candidates[j].id));
            }
        }
    }
    let magazines = (0..n_farms)
        .map(|_| if rng.gen_bool(0.4) { Some(rng.gen_range(0..=4)) } else { None })
        .collect();
    let delay = if rng.gen_bool(0.5) { 1.0 } else { 1e-4 };
    let value = rng.gen_range(2..=3) as f64;
    AssignmentModel::from_parts(
        candidates,
        (0..n_farms).map(|f| format!("f{f}")).collect(),
        (0..n_targets).map(|t| format!("t{t}")).collect(),
        vec![value; n_targets],
        1.0,
        2,
        magazines,
        vec![delay; n_farms],
        &extra,
    )
    .unwrap()
}

/// A deliberately small scenario for fast full-pipeline tests: three
/// launchers, four PIPs per target, coarse integration.
pub fn small_scenario_toml() -> String {
    r#"
schema_version = 1
pips_per_target = 4

[[enemy_launchers]]
id = "e1"
position = [-12000.0, 32000.0, 0.0]
shot_times = [0.0]

[[enemy_launchers]]
id = "e2"
position = [0.0, 36000.0, 0.0]
shot_times = [0.0]

[[enemy_launchers]]
id = "e3"
position = [12000.0, 32000.0, 0.0]
shot_times = [0.0]

[[weapon_farms]]
id = "f1"
position = [250.0, 0.0, 0.0]

[[weapon_farms]]
id = "f2"
position = [-250.0, 0.0, 0.0]

[dynamics]
integration_dt = 0.02

[interference]
check_sample_dt = 0.1
"#
    .to_string()
}
