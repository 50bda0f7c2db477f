//! Scenario file format: versioned TOML with distances in meters, times in
//! seconds and angles in degrees. Angles are converted to radians on load.
//!
//! Every field except `schema_version` and `enemy_launchers`/`weapon_farms`
//! entries may be omitted; omitted fields take the documented defaults.

use super::{
    EnemyLauncher, InterferenceParams, Scenario, ScenarioError, TargetMotionParams, WeaponFarm,
};
use crate::dynamics::{AirDensityModel, DynamicsParams};
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioDoc {
    schema_version: u32,
    #[serde(default)]
    enemy_launchers: Vec<LauncherDoc>,
    #[serde(default)]
    weapon_farms: Vec<FarmDoc>,
    #[serde(default = "zero3")]
    asset_position: [f64; 3],
    #[serde(default = "default_band")]
    intercept_altitude_band: [f64; 2],
    #[serde(default = "default_pips")]
    pips_per_target: usize,
    #[serde(default = "default_defender_delay")]
    defender_launch_delay: f64,
    #[serde(default = "default_max_per_target")]
    max_weapons_per_target: u32,
    #[serde(default = "default_enemy_delay")]
    enemy_launch_delay: f64,
    #[serde(default = "default_value_log")]
    target_value_log: f64,
    #[serde(default)]
    interference: InterferenceDoc,
    #[serde(default)]
    target_motion: TargetMotionDoc,
    #[serde(default)]
    dynamics: DynamicsDoc,
}

fn zero3() -> [f64; 3] {
    [0.0; 3]
}
fn default_band() -> [f64; 2] {
    [4000.0, 5000.0]
}
fn default_pips() -> usize {
    30
}
fn default_defender_delay() -> f64 {
    1.0
}
fn default_max_per_target() -> u32 {
    2
}
fn default_enemy_delay() -> f64 {
    2.0
}
fn default_value_log() -> f64 {
    2.0
}

#[derive(Debug, Serialize, Deserialize)]
struct LauncherDoc {
    id: String,
    position: [f64; 3],
    shot_times: Vec<f64>,
    #[serde(default = "zero3")]
    aim_point: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
struct FarmDoc {
    id: String,
    position: [f64; 3],
    /// Defaults to the scenario-level `defender_launch_delay`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    launch_delay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    magazine: Option<u32>,
    /// (elevation, azimuth) in degrees.
    #[serde(default = "default_launch_angles")]
    launch_angles_deg: [f64; 2],
}

fn default_launch_angles() -> [f64; 2] {
    [60.0, 0.0]
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default)]
struct InterferenceDoc {
    d_pif: f64,
    d_sif: f64,
    sigma_fov_deg: f64,
    check_sample_dt: f64,
}

impl Default for InterferenceDoc {
    fn default() -> Self {
        let p = InterferenceParams::default();
        InterferenceDoc {
            d_pif: p.d_pif,
            d_sif: p.d_sif,
            sigma_fov_deg: p.sigma_fov.to_degrees(),
            check_sample_dt: p.check_sample_dt,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default)]
struct TargetMotionDoc {
    flight_time_range: [f64; 2],
    sample_dt: f64,
    impact_offset_radius: f64,
}

impl Default for TargetMotionDoc {
    fn default() -> Self {
        let p = TargetMotionParams::default();
        TargetMotionDoc {
            flight_time_range: [p.flight_time_range.0, p.flight_time_range.1],
            sample_dt: p.sample_dt,
            impact_offset_radius: p.impact_offset_radius,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default)]
struct DynamicsDoc {
    mass: f64,
    thrust: f64,
    boost_duration: f64,
    c_d: f64,
    c_y: f64,
    c_n: f64,
    reference_area: f64,
    air_density: AirDensityDoc,
    gravity: f64,
    nav_constant: f64,
    integration_dt: f64,
    miss_tolerance: f64,
    max_flight_time: f64,
    max_lateral_accel_g: f64,
    max_range: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum AirDensityDoc {
    /// Constant density in kg/m³.
    Constant(f64),
    Exponential { sea_level: f64, scale_height: f64 },
}

impl Default for DynamicsDoc {
    fn default() -> Self {
        DynamicsDoc::from_params(&DynamicsParams::default())
    }
}

impl DynamicsDoc {
    fn from_params(p: &DynamicsParams) -> Self {
        DynamicsDoc {
            mass: p.mass,
            thrust: p.thrust,
            boost_duration: p.boost_duration,
            c_d: p.c_d,
            c_y: p.c_y,
            c_n: p.c_n,
            reference_area: p.reference_area,
            air_density: match p.air_density {
                AirDensityModel::Constant(rho) => AirDensityDoc::Constant(rho),
                AirDensityModel::Exponential { sea_level, scale_height } => {
                    AirDensityDoc::Exponential { sea_level, scale_height }
                }
            },
            gravity: p.gravity,
            nav_constant: p.nav_constant,
            integration_dt: p.integration_dt,
            miss_tolerance: p.miss_tolerance,
            max_flight_time: p.max_flight_time,
            max_lateral_accel_g: p.max_lateral_accel_g,
            max_range: p.max_range,
        }
    }

    fn into_params(self) -> DynamicsParams {
        DynamicsParams {
            mass: self.mass,
            thrust: self.thrust,
            boost_duration: self.boost_duration,
            c_d: self.c_d,
            c_y: self.c_y,
            c_n: self.c_n,
            reference_area: self.reference_area,
            air_density: match self.air_density {
                AirDensityDoc::Constant(rho) => AirDensityModel::Constant(rho),
                AirDensityDoc::Exponential { sea_level, scale_height } => {
                    AirDensityModel::Exponential { sea_level, scale_height }
                }
            },
            gravity: self.gravity,
            nav_constant: self.nav_constant,
            integration_dt: self.integration_dt,
            miss_tolerance: self.miss_tolerance,
            max_flight_time: self.max_flight_time,
            max_lateral_accel_g: self.max_lateral_accel_g,
            max_range: self.max_range,
        }
    }
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn arr3(v: Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// Parses and validates a scenario document.
///
/// Returns the validated [`Scenario`] or the full list of validation errors;
/// omitted fields take the documented defaults.
pub fn load_scenario(document: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = toml::from_str(document)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ScenarioError::SchemaVersion {
            found: doc.schema_version,
            expected: SCHEMA_VERSION,
        });
    }

    let defender_launch_delay = doc.defender_launch_delay;
    let scenario = Scenario {
        enemy_launchers: doc
            .enemy_launchers
            .into_iter()
            .map(|l| EnemyLauncher {
                id: l.id,
                position: vec3(l.position),
                shot_times: l.shot_times,
                aim_point: vec3(l.aim_point),
            })
            .collect(),
        weapon_farms: doc
            .weapon_farms
            .into_iter()
            .map(|f| WeaponFarm {
                id: f.id,
                position: vec3(f.position),
                launch_delay: f.launch_delay.unwrap_or(defender_launch_delay),
                magazine: f.magazine,
                launch_angles: (
                    f.launch_angles_deg[0].to_radians(),
                    f.launch_angles_deg[1].to_radians(),
                ),
            })
            .collect(),
        asset_position: vec3(doc.asset_position),
        intercept_altitude_band: (doc.intercept_altitude_band[0], doc.intercept_altitude_band[1]),
        pips_per_target: doc.pips_per_target,
        defender_launch_delay,
        max_weapons_per_target: doc.max_weapons_per_target,
        enemy_launch_delay: doc.enemy_launch_delay,
        target_value_log: doc.target_value_log,
        interference_params: InterferenceParams {
            d_pif: doc.interference.d_pif,
            d_sif: doc.interference.d_sif,
            sigma_fov: doc.interference.sigma_fov_deg.to_radians(),
            check_sample_dt: doc.interference.check_sample_dt,
        },
        target_motion: TargetMotionParams {
            flight_time_range: (
                doc.target_motion.flight_time_range[0],
                doc.target_motion.flight_time_range[1],
            ),
            sample_dt: doc.target_motion.sample_dt,
            impact_offset_radius: doc.target_motion.impact_offset_radius,
        },
        dynamics_params: doc.dynamics.into_params(),
    };

    scenario.validate().map_err(ScenarioError::Invalid)?;
    Ok(scenario)
}

/// Loads a scenario from a file path.
pub fn load_scenario_file(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    load_scenario(&text)
}

/// Serializes a scenario back to its document form (angles in degrees).
///
/// `load_scenario(to_document_string(s))` reproduces `s` exactly.
pub fn to_document_string(scenario: &Scenario) -> String {
    let doc = ScenarioDoc {
        schema_version: SCHEMA_VERSION,
        enemy_launchers: scenario
            .enemy_launchers
            .iter()
            .map(|l| LauncherDoc {
                id: l.id.clone(),
                position: arr3(l.position),
                shot_times: l.shot_times.clone(),
                aim_point: arr3(l.aim_point),
            })
            .collect(),
        weapon_farms: scenario
            .weapon_farms
            .iter()
            .map(|f| FarmDoc {
                id: f.id.clone(),
                position: arr3(f.position),
                launch_delay: Some(f.launch_delay),
                magazine: f.magazine,
                launch_angles_deg: [
                    f.launch_angles.0.to_degrees(),
                    f.launch_angles.1.to_degrees(),
                ],
            })
            .collect(),
        asset_position: arr3(scenario.asset_position),
        intercept_altitude_band: [
            scenario.intercept_altitude_band.0,
            scenario.intercept_altitude_band.1,
        ],
        pips_per_target: scenario.pips_per_target,
        defender_launch_delay: scenario.defender_launch_delay,
        max_weapons_per_target: scenario.max_weapons_per_target,
        enemy_launch_delay: scenario.enemy_launch_delay,
        target_value_log: scenario.target_value_log,
        interference: InterferenceDoc {
            d_pif: scenario.interference_params.d_pif,
            d_sif: scenario.interference_params.d_sif,
            sigma_fov_deg: scenario.interference_params.sigma_fov.to_degrees(),
            check_sample_dt: scenario.interference_params.check_sample_dt,
        },
        target_motion: TargetMotionDoc {
            flight_time_range: [
                scenario.target_motion.flight_time_range.0,
                scenario.target_motion.flight_time_range.1,
            ],
            sample_dt: scenario.target_motion.sample_dt,
            impact_offset_radius: scenario.target_motion.impact_offset_radius,
        },
        dynamics: DynamicsDoc::from_params(&scenario.dynamics_params),
    };
    toml::to_string_pretty(&doc).expect("scenario serialization cannot fail")
}
