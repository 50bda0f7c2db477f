//! Scenario definition, validation, file I/O and target track generation.
//!
//! A scenario describes the enemy launchers, the defending weapon farms, the
//! protected asset and the discretization / interference / dynamics
//! parameters for one engagement. Scenarios are loaded from a versioned TOML
//! document (see [`file`]) or built procedurally via
//! [`build_w_formation_scenario`].

mod builder;
mod file;
mod tracks;

pub use builder::{build_w_formation_scenario, UnknownCase};
pub use file::{load_scenario, load_scenario_file, to_document_string, SCHEMA_VERSION};
pub use tracks::{generate_target_tracks, TargetTrack, TrackError};

use crate::dynamics::DynamicsParams;
use crate::vec3::Vec3;
use thiserror::Error;

/// One enemy launcher with its shot schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct EnemyLauncher {
    pub id: String,
    /// Position in meters, z down (ground launchers have z = 0).
    pub position: Vec3,
    /// Launch instants in seconds, one per target, strictly increasing.
    pub shot_times: Vec<f64>,
    /// Point the launcher aims its targets at (the defended asset).
    pub aim_point: Vec3,
}

/// One defending weapon farm.
#[derive(Debug, Clone, PartialEq)]
pub struct WeaponFarm {
    pub id: String,
    pub position: Vec3,
    /// Minimum spacing between consecutive launches from this farm, seconds.
    pub launch_delay: f64,
    /// Rounds available, `None` for an unlimited magazine.
    pub magazine: Option<u32>,
    /// Fixed launch attitude (elevation γ₀, azimuth ψ₀), radians.
    pub launch_angles: (f64, f64),
}

/// Thresholds for the pairwise interference predicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceParams {
    /// Physical interference distance, meters.
    pub d_pif: f64,
    /// Seeker interference distance, meters.
    pub d_sif: f64,
    /// Seeker field-of-view half angle, radians.
    pub sigma_fov: f64,
    /// Time grid used when scanning trajectory pairs, seconds.
    pub check_sample_dt: f64,
}

/// Parameters of the synthetic ballistic target motion.
///
/// The flight time of each target is drawn from `flight_time_range` and the
/// impact point is offset laterally by a seeded draw inside
/// `impact_offset_radius`, so distinct targets get distinct predicted impact
/// points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetMotionParams {
    pub flight_time_range: (f64, f64),
    /// Track sample spacing, seconds.
    pub sample_dt: f64,
    /// Radius of the uniform impact-point offset disk, meters.
    pub impact_offset_radius: f64,
}

/// A full engagement scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub enemy_launchers: Vec<EnemyLauncher>,
    pub weapon_farms: Vec<WeaponFarm>,
    pub asset_position: Vec3,
    /// Intercept altitude band `[min, max]` in meters of altitude (positive up).
    pub intercept_altitude_band: (f64, f64),
    /// Number of PIPs per target track.
    pub pips_per_target: usize,
    /// Default launch-delay τ for farms that do not override it, seconds.
    pub defender_launch_delay: f64,
    /// Cap on weapons assigned to a single target (n_t).
    pub max_weapons_per_target: u32,
    /// Minimum gap between consecutive shots of one enemy launcher, seconds.
    pub enemy_launch_delay: f64,
    /// log of the initial target value, identical for every target.
    pub target_value_log: f64,
    pub interference_params: InterferenceParams,
    pub target_motion: TargetMotionParams,
    pub dynamics_params: DynamicsParams,
}

/// A single failed scenario invariant, naming the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {message}")]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario document: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported schema_version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("invalid scenario: {}", format_validation_errors(.0))]
    Invalid(Vec<ValidationError>),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_validation_errors(errors: &[ValidationError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

impl Scenario {
    /// Total number of targets across all launchers and shot groups.
    pub fn target_count(&self) -> usize {
        self.enemy_launchers.iter().map(|l| l.shot_times.len()).sum()
    }

    /// Checks every scenario invariant, returning the full list of failures.
    pub fn validate(&self) -> Result<(), Vec<ValidationError>> {
        let mut errors = Vec::new();
        let mut err = |field: &str, message: String| {
            errors.push(ValidationError { field: field.to_string(), message });
        };

        if self.enemy_launchers.is_empty() {
            err("enemy_launchers", "no enemy launchers".into());
        }
        if self.weapon_farms.is_empty() {
            err("weapon_farms", "no weapon farms".into());
        }

        let (band_min, band_max) = self.intercept_altitude_band;
        if !(band_min > 0.0 && band_max > 0.0 && band_min < band_max) {
            err(
                "intercept_altitude_band",
                format!("band [{band_min}, {band_max}] must satisfy 0 < min < max"),
            );
        }
        if self.pips_per_target < 2 {
            err("pips_per_target", format!("{} < 2", self.pips_per_target));
        }
        if !(self.defender_launch_delay > 0.0) {
            err("defender_launch_delay", "must be > 0".into());
        }
        if self.max_weapons_per_target < 1 {
            err("max_weapons_per_target", "must be >= 1".into());
        }
        if !(self.enemy_launch_delay > 0.0) {
            err("enemy_launch_delay", "must be > 0".into());
        }
        if !(self.target_value_log >= 0.0) {
            err("target_value_log", "must be >= 0".into());
        }

        let mut seen = std::collections::HashSet::new();
        for launcher in &self.enemy_launchers {
            if !seen.insert(launcher.id.clone()) {
                err("enemy_launchers.id", format!("duplicate id {:?}", launcher.id));
            }
            if launcher.shot_times.is_empty() {
                err("enemy_launchers.shot_times", format!("{}: empty", launcher.id));
            }
            for w in launcher.shot_times.windows(2) {
                if w[1] - w[0] < self.enemy_launch_delay {
                    err(
                        "enemy_launchers.shot_times",
                        format!(
                            "{}: gap {} s below enemy launch delay {} s",
                            launcher.id,
                            w[1] - w[0],
                            self.enemy_launch_delay
                        ),
                    );
                }
            }
            if !launcher.position.is_finite() || !launcher.aim_point.is_finite() {
                err("enemy_launchers.position", format!("{}: non-finite", launcher.id));
            }
        }

        let mut seen = std::collections::HashSet::new();
        for farm in &self.weapon_farms {
            if !seen.insert(farm.id.clone()) {
                err("weapon_farms.id", format!("duplicate id {:?}", farm.id));
            }
            if !(farm.launch_delay > 0.0) {
                err("weapon_farms.launch_delay", format!("{}: must be > 0", farm.id));
            }
            let (gamma, psi) = farm.launch_angles;
            use std::f64::consts::{FRAC_PI_2, PI};
            if !(gamma > -FRAC_PI_2 && gamma <= FRAC_PI_2) {
                err("weapon_farms.launch_angles", format!("{}: elevation out of (-90, 90]", farm.id));
            }
            if !(psi > -PI && psi <= PI) {
                err("weapon_farms.launch_angles", format!("{}: azimuth out of (-180, 180]", farm.id));
            }
        }

        let ip = &self.interference_params;
        if !(ip.d_pif > 0.0) {
            err("interference.d_pif", "must be > 0".into());
        }
        if !(ip.d_sif >= ip.d_pif) {
            err("interference.d_sif", format!("{} < d_pif {}", ip.d_sif, ip.d_pif));
        }
        if !(ip.sigma_fov > 0.0 && ip.sigma_fov < std::f64::consts::FRAC_PI_2) {
            err("interference.sigma_fov", "must be in (0, 90) degrees".into());
        }
        if !(ip.check_sample_dt > 0.0) {
            err("interference.check_sample_dt", "must be > 0".into());
        }

        let tm = &self.target_motion;
        if !(tm.flight_time_range.0 > 0.0 && tm.flight_time_range.0 <= tm.flight_time_range.1) {
            err("target_motion.flight_time_range", "must satisfy 0 < min <= max".into());
        }
        if !(tm.sample_dt > 0.0) {
            err("target_motion.sample_dt", "must be > 0".into());
        }
        if !(tm.impact_offset_radius >= 0.0) {
            err("target_motion.impact_offset_radius", "must be >= 0".into());
        }

        if let Err(mut dyn_errors) = self.dynamics_params.validate() {
            errors.append(&mut dyn_errors);
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_case_validates() {
        let s = build_w_formation_scenario(1).unwrap();
        assert!(s.validate().is_ok());
    }

    #[test]
    fn empty_launchers_reports_named_error() {
        let mut s = build_w_formation_scenario(1).unwrap();
        s.enemy_launchers.clear();
        let errors = s.validate().unwrap_err();
        assert!(errors.iter().any(|e| e.message == "no enemy launchers"));
    }

    #[test]
    fn shot_time_gap_below_delay_is_rejected() {
        let mut s = build_w_formation_scenario(1).unwrap();
        s.enemy_launchers[0].shot_times = vec![0.0, 1.0]; // delay is 2 s
        let errors = s.validate().unwrap_err();
        assert!(errors.iter().any(|e| e.field == "enemy_launchers.shot_times"));
    }

    #[test]
    fn duplicate_farm_id_is_rejected() {
        let mut s = build_w_formation_scenario(1).unwrap();
        let dup = s.weapon_farms[0].clone();
        s.weapon_farms.push(dup);
        let errors = s.validate().unwrap_err();
        assert!(errors.iter().any(|e| e.field == "weapon_farms.id"));
    }

    #[test]
    fn inverted_band_is_rejected() {
        let mut s = build_w_formation_scenario(1).unwrap();
        s.intercept_altitude_band = (5000.0, 4000.0);
        assert!(s.validate().is_err());
    }
}
