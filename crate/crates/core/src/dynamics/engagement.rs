//! Closed-loop engagement simulation against a fixed intercept point, plus a
//! per-(farm, PIP) time-of-flight cache.

use super::model::{command_derivatives, derivatives, ppn_command, rk4_step, Attitude};
use super::{DynamicsError, DynamicsParams, MissileState, Outcome, Trajectory};
use crate::scenario::WeaponFarm;
use crate::vec3::Vec3;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Bearing cone (cosine) inside which the closing phase is considered
/// established; closest-approach detection arms only after that.
const ARMED_BEARING_COS: f64 = 0.707;

/// Minimum distance from a point to the segment `a..b`.
fn point_segment_distance(point: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq <= 0.0 {
        return point.distance(a);
    }
    let s = ((point - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    point.distance(a + ab * s)
}

/// Simulates one engagement: boost at the farm's fixed launch attitude, then
/// pure proportional navigation toward the (stationary) intercept point.
///
/// Time is measured from launch (`t0 = 0`). The flight terminates with
/// outcome `Intercept` when the closest approach drops below the miss
/// tolerance, `Miss` when the distance starts opening again after an
/// established closing phase, or `Timeout` at the max flight time. Points
/// below the farm or beyond the configured max range are reported as
/// `Timeout` without simulating.
pub fn simulate_engagement(
    farm: &WeaponFarm,
    pip_position: Vec3,
    params: &DynamicsParams,
) -> Trajectory {
    let initial = MissileState { position: farm.position, velocity: Vec3::ZERO, time: 0.0 };
    let out_of_envelope = pip_position.z >= farm.position.z
        || farm.position.distance(pip_position) > params.max_range;
    if out_of_envelope {
        return Trajectory::from_samples(
            0.0,
            params.integration_dt,
            vec![(initial.position, initial.velocity)],
            Outcome::Timeout,
            Some(initial.position.distance(pip_position)),
        );
    }

    let dt = params.integration_dt;
    let max_steps = (params.max_flight_time / dt).ceil() as usize;
    let boost_attitude = Attitude::level(farm.launch_angles.0, farm.launch_angles.1);

    let mut samples = vec![(initial.position, initial.velocity)];
    let mut state = initial;
    let mut min_distance = state.position.distance(pip_position);
    let mut armed = false;
    let mut min_since_armed = f64::INFINITY;
    let mut outcome = Outcome::Timeout;

    for _ in 0..max_steps {
        let boosting = state.time < params.boost_duration;
        let step = if boosting {
            rk4_step(&state, dt, |s| derivatives(s, &boost_attitude, params))
        } else {
            rk4_step(&state, dt, |s| {
                let cmd = match ppn_command(s, pip_position, Vec3::ZERO, params) {
                    Ok(cmd) => cmd,
                    // On top of the point already; coast through and let the
                    // intercept check pick it up.
                    Err(DynamicsError::ZeroRange) => Vec3::ZERO,
                    Err(e) => return Err(e),
                };
                command_derivatives(s, cmd, params)
            })
        };
        let next = match step {
            Ok(next) => next,
            // Divergence ends the flight as a timeout at the last good state.
            Err(_) => break,
        };

        let segment_min = point_segment_distance(pip_position, state.position, next.position);
        min_distance = min_distance.min(segment_min);
        state = next;
        samples.push((state.position, state.velocity));

        if segment_min < params.miss_tolerance {
            outcome = Outcome::Intercept;
            break;
        }

        if !boosting {
            let distance = state.position.distance(pip_position);
            if !armed {
                if let (Some(ev), Some(rv)) = (
                    state.velocity.normalized(1e-9),
                    (pip_position - state.position).normalized(1e-9),
                ) {
                    armed = ev.dot(rv) > ARMED_BEARING_COS;
                }
            }
            if armed {
                min_since_armed = min_since_armed.min(distance);
                let hysteresis = 10.0 + 20.0 * dt * state.speed();
                if distance > min_since_armed + hysteresis {
                    outcome = Outcome::Miss;
                    break;
                }
            }
        }
    }

    Trajectory::from_samples(0.0, dt, samples, outcome, Some(min_distance))
}

/// Integrates the guided (post-boost) closed loop for exactly `duration`,
/// re-evaluating the navigation command inside every integrator substage so
/// the right-hand side stays smooth. Used for convergence measurements.
pub fn simulate_guided_segment(
    initial: &MissileState,
    target: Vec3,
    params: &DynamicsParams,
    duration: f64,
    dt: f64,
) -> Result<MissileState, DynamicsError> {
    let steps = (duration / dt).round() as usize;
    let mut state = *initial;
    for _ in 0..steps {
        state = rk4_step(&state, dt, |s| {
            let cmd = match ppn_command(s, target, Vec3::ZERO, params) {
                Ok(cmd) => cmd,
                Err(DynamicsError::ZeroRange) => Vec3::ZERO,
                Err(e) => return Err(e),
            };
            command_derivatives(s, cmd, params)
        })?;
    }
    Ok(state)
}

/// Result of one simulated (farm, PIP) engagement.
#[derive(Debug, Clone)]
pub struct EngagementResult {
    pub trajectory: Arc<Trajectory>,
    /// Flight duration on intercept, `None` when the point is unreachable.
    pub time_of_flight: Option<f64>,
}

impl EngagementResult {
    fn from_trajectory(trajectory: Trajectory) -> Self {
        let time_of_flight =
            (trajectory.outcome == Outcome::Intercept).then(|| trajectory.duration());
        EngagementResult { trajectory: Arc::new(trajectory), time_of_flight }
    }
}

/// Cache of engagement simulations keyed by `(farm index, PIP index)`.
///
/// Either populate it in one parallel pre-pass with [`Self::populate`] or let
/// callers fill it lazily; both are safe for concurrent readers.
pub struct EngagementCache {
    farms: Vec<WeaponFarm>,
    params: DynamicsParams,
    entries: RwLock<HashMap<(usize, usize), Arc<EngagementResult>>>,
}

impl EngagementCache {
    pub fn new(farms: Vec<WeaponFarm>, params: DynamicsParams) -> Self {
        EngagementCache { farms, params, entries: RwLock::new(HashMap::new()) }
    }

    pub fn farms(&self) -> &[WeaponFarm] {
        &self.farms
    }

    pub fn params(&self) -> &DynamicsParams {
        &self.params
    }

    /// Simulates every (farm, PIP) pair in parallel and stores the results.
    pub fn populate(&self, pip_positions: &[Vec3]) {
        let jobs: Vec<(usize, usize)> = (0..self.farms.len())
            .flat_map(|f| (0..pip_positions.len()).map(move |p| (f, p)))
            .collect();
        let results: Vec<((usize, usize), Arc<EngagementResult>)> = jobs
            .into_par_iter()
            .map(|(f, p)| {
                let traj = simulate_engagement(&self.farms[f], pip_positions[p], &self.params);
                ((f, p), Arc::new(EngagementResult::from_trajectory(traj)))
            })
            .collect();
        let mut map = self.entries.write().unwrap();
        for (key, value) in results {
            map.insert(key, value);
        }
    }

    /// Cached engagement for `(farm_index, pip_index)`, simulating on miss.
    pub fn get_or_compute(
        &self,
        farm_index: usize,
        pip_index: usize,
        pip_position: Vec3,
    ) -> Arc<EngagementResult> {
        if let Some(hit) = self.entries.read().unwrap().get(&(farm_index, pip_index)) {
            return Arc::clone(hit);
        }
        let traj = simulate_engagement(&self.farms[farm_index], pip_position, &self.params);
        let result = Arc::new(EngagementResult::from_trajectory(traj));
        let mut map = self.entries.write().unwrap();
        Arc::clone(map.entry((farm_index, pip_index)).or_insert(result))
    }

    /// Flight duration for the pair, `None` when unreachable.
    pub fn time_of_flight(
        &self,
        farm_index: usize,
        pip_index: usize,
        pip_position: Vec3,
    ) -> Option<f64> {
        self.get_or_compute(farm_index, pip_index, pip_position).time_of_flight
    }
}
