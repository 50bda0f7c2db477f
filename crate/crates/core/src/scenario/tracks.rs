//! Ballistic target track generation.
//!
//! Targets fly drag-free gravity arcs from their launcher to the defended
//! asset. The flight time of each target is drawn from the configured range
//! and the impact point is offset inside a disk around the aim point, both
//! from a single seeded generator, so the whole track set is a pure function
//! of (scenario, seed).

use super::Scenario;
use crate::dynamics::{Outcome, Trajectory};
use crate::vec3::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// One incoming target: identity, launch instant and sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetTrack {
    /// `t<launcher>_<shot>`, e.g. `t3_1` for the first shot of launcher 3.
    pub target_id: String,
    pub source_launcher_id: String,
    /// 0-based launcher position in the scenario ordering.
    pub launcher_index: usize,
    /// 0-based shot group of this target.
    pub shot_index: usize,
    /// Absolute launch time, seconds.
    pub launch_time: f64,
    pub trajectory: Trajectory,
    /// log of the initial target value (2 for the built-in cases).
    pub value_log: f64,
}

impl TargetTrack {
    /// Absolute time the target reaches its impact point.
    pub fn impact_time(&self) -> f64 {
        self.trajectory.terminal_time()
    }
}

#[derive(Debug, Error)]
pub enum TrackError {
    #[error("target {target_id}: trajectory never enters the altitude band [{band_min}, {band_max}] m (apogee {apogee:.1} m)")]
    NeverInBand { target_id: String, band_min: f64, band_max: f64, apogee: f64 },
}

/// Generates one track per (launcher, shot time), ordered by shot group then
/// launcher number — the ordering used for target numbering throughout.
///
/// Deterministic: identical (scenario, seed) pairs give bitwise-identical
/// tracks.
pub fn generate_target_tracks(
    scenario: &Scenario,
    seed: u64,
) -> Result<Vec<TargetTrack>, TrackError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gravity = scenario.dynamics_params.gravity;
    let dt = scenario.target_motion.sample_dt;
    let (t_min, t_max) = scenario.target_motion.flight_time_range;
    let offset_radius = scenario.target_motion.impact_offset_radius;
    let (band_min, band_max) = scenario.intercept_altitude_band;

    let max_shots =
        scenario.enemy_launchers.iter().map(|l| l.shot_times.len()).max().unwrap_or(0);

    let mut tracks = Vec::with_capacity(scenario.target_count());
    for shot in 0..max_shots {
        for (launcher_index, launcher) in scenario.enemy_launchers.iter().enumerate() {
            let Some(&launch_time) = launcher.shot_times.get(shot) else { continue };

            // Draw order is fixed by the (shot, launcher) iteration order.
            let flight_time = if t_max > t_min {
                rng.gen_range(t_min..t_max)
            } else {
                t_min
            };
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let radius = offset_radius * rng.gen_range(0.0f64..1.0).sqrt();
            let offset = Vec3::new(radius * angle.cos(), radius * angle.sin(), 0.0);

            let target_id = format!("t{}_{}", launcher_index + 1, shot + 1);
            let apogee = gravity * flight_time * flight_time / 8.0;
            if apogee <= band_max {
                return Err(TrackError::NeverInBand {
                    target_id,
                    band_min,
                    band_max,
                    apogee,
                });
            }

            let impact = launcher.aim_point + offset;
            let trajectory =
                ballistic_arc(launcher.position, impact, launch_time, flight_time, gravity, dt);

            tracks.push(TargetTrack {
                target_id,
                source_launcher_id: launcher.id.clone(),
                launcher_index,
                shot_index: shot,
                launch_time,
                trajectory,
                value_log: scenario.target_value_log,
            });
        }
    }
    Ok(tracks)
}

/// Drag-free arc from `from` to `to` lasting `flight_time`: linear horizontal
/// motion plus the parabola `altitude(τ) = g·τ·(T-τ)/2` (z down, so the apogee
/// is `gT²/8` above the endpoints).
fn ballistic_arc(
    from: Vec3,
    to: Vec3,
    launch_time: f64,
    flight_time: f64,
    gravity: f64,
    dt: f64,
) -> Trajectory {
    let steps = (flight_time / dt).ceil() as usize;
    // Stretch dt slightly so the final sample lands exactly on impact.
    let dt = flight_time / steps as f64;
    let horizontal_velocity = Vec3::new((to.x - from.x) / flight_time, (to.y - from.y) / flight_time, 0.0);
    let base_z = from.z;
    let dz = (to.z - from.z) / flight_time;

    let samples: Vec<(Vec3, Vec3)> = (0..=steps)
        .map(|i| {
            let tau = i as f64 * dt;
            let altitude = 0.5 * gravity * tau * (flight_time - tau);
            let position = Vec3::new(
                from.x + horizontal_velocity.x * tau,
                from.y + horizontal_velocity.y * tau,
                base_z + dz * tau - altitude,
            );
            let vz = dz - 0.5 * gravity * (flight_time - 2.0 * tau);
            let velocity = Vec3::new(horizontal_velocity.x, horizontal_velocity.y, vz);
            (position, velocity)
        })
        .collect();

    Trajectory::from_samples(launch_time, dt, samples, Outcome::Intercept, None)
}
