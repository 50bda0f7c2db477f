//! Procedural construction of the built-in W-formation scenarios.

use super::{EnemyLauncher, InterferenceParams, Scenario, TargetMotionParams, WeaponFarm};
use crate::dynamics::DynamicsParams;
use crate::vec3::Vec3;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("unknown built-in case {0} (expected 1 or 2)")]
pub struct UnknownCase(pub u32);

/// Builds one of the two built-in scenarios: six enemy launchers in a W
/// formation firing at the origin, defended by two farms at x = ±250 m.
///
/// Case 1 gives every launcher a single shot at t = 0; case 2 adds a second
/// shot 2 s later, doubling the target count. Launchers are numbered left to
/// right (increasing x); farm `f1` sits on the +x side.
pub fn build_w_formation_scenario(case: u32) -> Result<Scenario, UnknownCase> {
    let shot_times = match case {
        1 => vec![0.0],
        2 => vec![0.0, 2.0],
        other => return Err(UnknownCase(other)),
    };

    // Launcher line-up drawing the W: x from -25 km to +25 km in 10 km steps,
    // y alternating 40 km / 30 km so the formation is asymmetric relative to
    // the two farms.
    let xs_km = [-25.0, -15.0, -5.0, 5.0, 15.0, 25.0];
    let enemy_launchers = xs_km
        .iter()
        .enumerate()
        .map(|(i, &x_km)| {
            let y_km = if i % 2 == 0 { 40.0 } else { 30.0 };
            EnemyLauncher {
                id: format!("e{}", i + 1),
                position: Vec3::new(x_km * 1000.0, y_km * 1000.0, 0.0),
                shot_times: shot_times.clone(),
                aim_point: Vec3::ZERO,
            }
        })
        .collect();

    let farm = |id: &str, x: f64| WeaponFarm {
        id: id.to_string(),
        position: Vec3::new(x, 0.0, 0.0),
        launch_delay: 1.0,
        magazine: None,
        launch_angles: (60f64.to_radians(), 0.0),
    };

    Ok(Scenario {
        enemy_launchers,
        weapon_farms: vec![farm("f1", 250.0), farm("f2", -250.0)],
        asset_position: Vec3::ZERO,
        intercept_altitude_band: (4000.0, 5000.0),
        pips_per_target: 30,
        defender_launch_delay: 1.0,
        max_weapons_per_target: 2,
        enemy_launch_delay: 2.0,
        target_value_log: 2.0,
        interference_params: InterferenceParams::default(),
        target_motion: TargetMotionParams::default(),
        dynamics_params: DynamicsParams::default(),
    })
}

impl Default for InterferenceParams {
    fn default() -> Self {
        InterferenceParams {
            d_pif: 50.0,
            d_sif: 2000.0,
            sigma_fov: 8f64.to_radians(),
            check_sample_dt: 0.05,
        }
    }
}

impl Default for TargetMotionParams {
    fn default() -> Self {
        TargetMotionParams {
            flight_time_range: (70.0, 90.0),
            sample_dt: 0.05,
            impact_offset_radius: 150.0,
        }
    }
}
