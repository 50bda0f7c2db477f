//! 3-DOF point-mass flight model for the defending weapon: a short boost at a
//! fixed launch attitude followed by pure proportional navigation toward a
//! fixed intercept point.
//!
//! The frame is z-down, so gravity appears as `+g` on the vertical velocity
//! derivative and altitude is `-z`. Flight-path elevation γ is positive for a
//! climbing (z-decreasing) vehicle.

mod engagement;
mod model;

pub use engagement::{
    simulate_engagement, simulate_guided_segment, EngagementCache, EngagementResult,
};
pub use model::{derivatives, integrate_step, ppn_command, Attitude, Control, StateDerivative};

use crate::scenario::ValidationError;
use crate::vec3::Vec3;
use thiserror::Error;

/// Instantaneous vehicle state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissileState {
    /// Position in meters, z down.
    pub position: Vec3,
    /// Velocity in m/s.
    pub velocity: Vec3,
    /// Time since launch, seconds.
    pub time: f64,
}

impl MissileState {
    pub fn altitude(&self) -> f64 {
        -self.position.z
    }

    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.velocity.is_finite() && self.time.is_finite()
    }
}

/// Atmosphere model used for dynamic pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AirDensityModel {
    /// Fixed density in kg/m³.
    Constant(f64),
    /// `sea_level * exp(-altitude / scale_height)`.
    Exponential { sea_level: f64, scale_height: f64 },
}

impl AirDensityModel {
    pub fn density(&self, altitude: f64) -> f64 {
        match *self {
            AirDensityModel::Constant(rho) => rho,
            AirDensityModel::Exponential { sea_level, scale_height } => {
                sea_level * (-altitude / scale_height).exp()
            }
        }
    }
}

/// Physical and numerical parameters of the weapon model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsParams {
    /// Vehicle mass, kg (constant; no fuel burn is modeled).
    pub mass: f64,
    /// Boost thrust, newtons, applied while `time < boost_duration`.
    pub thrust: f64,
    pub boost_duration: f64,
    /// Drag / side / normal trim coefficients.
    pub c_d: f64,
    pub c_y: f64,
    pub c_n: f64,
    /// Aerodynamic reference area, m².
    pub reference_area: f64,
    pub air_density: AirDensityModel,
    /// Gravitational acceleration, m/s².
    pub gravity: f64,
    /// Proportional navigation gain N.
    pub nav_constant: f64,
    /// Fixed integration step, seconds.
    pub integration_dt: f64,
    /// Distance at which an engagement counts as an intercept, meters.
    pub miss_tolerance: f64,
    /// Engagements longer than this time out, seconds.
    pub max_flight_time: f64,
    /// Lateral acceleration saturation in g units.
    pub max_lateral_accel_g: f64,
    /// Intercept points farther than this from the farm are not attempted, meters.
    pub max_range: f64,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams {
            mass: 150.0,
            thrust: 30_000.0,
            boost_duration: 3.0,
            c_d: 0.3,
            c_y: 0.0,
            c_n: 0.0,
            reference_area: 0.05,
            air_density: AirDensityModel::Constant(1.225),
            gravity: 9.81,
            nav_constant: 4.0,
            integration_dt: 0.01,
            miss_tolerance: 5.0,
            max_flight_time: 120.0,
            max_lateral_accel_g: 30.0,
            max_range: 40_000.0,
        }
    }
}

impl DynamicsParams {
    pub fn max_lateral_accel(&self) -> f64 {
        self.max_lateral_accel_g * self.gravity
    }

    pub(crate) fn validate(&self) -> Result<(), Vec<ValidationError>> {
        let mut errors = Vec::new();
        let mut check = |ok: bool, field: &str, message: &str| {
            if !ok {
                errors.push(ValidationError {
                    field: format!("dynamics.{field}"),
                    message: message.to_string(),
                });
            }
        };
        check(self.mass > 0.0, "mass", "must be > 0");
        check(self.boost_duration >= 0.0, "boost_duration", "must be >= 0");
        check(self.nav_constant >= 2.0, "nav_constant", "must be >= 2");
        check(self.integration_dt > 0.0, "integration_dt", "must be > 0");
        check(self.reference_area >= 0.0, "reference_area", "must be >= 0");
        check(self.miss_tolerance > 0.0, "miss_tolerance", "must be > 0");
        check(self.max_flight_time > 0.0, "max_flight_time", "must be > 0");
        check(self.max_lateral_accel_g > 0.0, "max_lateral_accel_g", "must be > 0");
        check(self.max_range > 0.0, "max_range", "must be > 0");
        check(self.gravity >= 0.0, "gravity", "must be >= 0");
        let rho_ok = match self.air_density {
            AirDensityModel::Constant(rho) => rho >= 0.0,
            AirDensityModel::Exponential { sea_level, scale_height } => {
                sea_level >= 0.0 && scale_height > 0.0
            }
        };
        check(rho_ok, "air_density", "densities must be >= 0, scale height > 0");
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

/// How a simulated flight ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Closest approach dropped below the miss tolerance.
    Intercept,
    /// Passed closest approach without reaching the tolerance.
    Miss,
    /// Max flight time exhausted (or the point was out of envelope).
    Timeout,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Intercept => "intercept",
            Outcome::Miss => "miss",
            Outcome::Timeout => "timeout",
        }
    }
}

/// A time-ordered sequence of states sampled on a uniform grid.
///
/// `t0` anchors the trajectory on its timeline; sample `i` is at
/// `t0 + i * dt`. Target tracks use absolute scenario time while engagement
/// trajectories are simulated with `t0 = 0` and shifted by their launch time
/// where needed.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    t0: f64,
    dt: f64,
    positions: Vec<Vec3>,
    velocities: Vec<Vec3>,
    pub outcome: Outcome,
    /// Refined closest-approach distance to the aim point, when simulated.
    pub miss_distance: Option<f64>,
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("non-finite state component at t = {time}")]
    NonFinite { time: f64 },
    #[error("zero relative range: collision already occurred")]
    ZeroRange,
}

impl Trajectory {
    /// Builds a trajectory from raw samples. Panics if `samples` is empty or
    /// `dt <= 0`.
    pub fn from_samples(
        t0: f64,
        dt: f64,
        samples: Vec<(Vec3, Vec3)>,
        outcome: Outcome,
        miss_distance: Option<f64>,
    ) -> Self {
        assert!(!samples.is_empty(), "trajectory needs at least one sample");
        assert!(dt > 0.0, "sample spacing must be positive");
        let (positions, velocities) = samples.into_iter().unzip();
        Trajectory { t0, dt, positions, velocities, outcome, miss_distance }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of the last sample.
    pub fn terminal_time(&self) -> f64 {
        self.t0 + (self.len() - 1) as f64 * self.dt
    }

    /// Flight duration from first to last sample.
    pub fn duration(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    pub fn state(&self, i: usize) -> MissileState {
        MissileState {
            position: self.positions[i],
            velocity: self.velocities[i],
            time: self.t0 + i as f64 * self.dt,
        }
    }

    pub fn first(&self) -> MissileState {
        self.state(0)
    }

    pub fn last(&self) -> MissileState {
        self.state(self.len() - 1)
    }

    pub fn states(&self) -> impl Iterator<Item = MissileState> + '_ {
        (0..self.len()).map(|i| self.state(i))
    }

    /// Position and velocity at time `t`, linearly interpolated between the
    /// neighbouring samples. `t` is clamped to the trajectory window.
    pub fn state_at(&self, t: f64) -> (Vec3, Vec3) {
        let s = ((t - self.t0) / self.dt).clamp(0.0, (self.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.len() - 2).min(self.len() - 1);
        if self.len() == 1 {
            return (self.positions[0], self.velocities[0]);
        }
        let frac = s - i as f64;
        (
            self.positions[i].lerp(self.positions[i + 1], frac),
            self.velocities[i].lerp(self.velocities[i + 1], frac),
        )
    }

    pub fn position_at(&self, t: f64) -> Vec3 {
        self.state_at(t).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_trajectory() -> Trajectory {
        let samples: Vec<(Vec3, Vec3)> = (0..11)
            .map(|i| (Vec3::new(i as f64 * 2.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)))
            .collect();
        Trajectory::from_samples(5.0, 1.0, samples, Outcome::Intercept, None)
    }

    #[test]
    fn interpolation_is_exact_on_a_line() {
        let t = line_trajectory();
        assert_eq!(t.terminal_time(), 15.0);
        let (p, v) = t.state_at(7.25);
        assert!((p.x - 4.5).abs() < 1e-12);
        assert_eq!(v, Vec3::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn state_at_clamps_to_window() {
        let t = line_trajectory();
        assert_eq!(t.position_at(0.0), t.first().position);
        assert_eq!(t.position_at(99.0), t.last().position);
    }

    #[test]
    fn density_models() {
        let c = AirDensityModel::Constant(1.225);
        assert_eq!(c.density(10_000.0), 1.225);
        let e = AirDensityModel::Exponential { sea_level: 1.225, scale_height: 8500.0 };
        assert!(e.density(8500.0) < 1.225 * 0.37);
        assert!((e.density(0.0) - 1.225).abs() < 1e-12);
    }
}
