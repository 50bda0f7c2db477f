//! Equations of motion, guidance law and the fixed-step integrator.
//!
//! The translational dynamics resolve three body-channel forces onto the
//! inertial axes through the flight-path angles (γ, ψ):
//!
//! * axial: `Tx - D` along the velocity axis,
//! * side: `Tx·tanβ + Y` along the horizontal perpendicular,
//! * normal: `Tx·tanα + N` along the in-plane perpendicular ("up"),
//!
//! with `Tx = T / sqrt(1 + tan²α + tan²β)` and `+g` added on the z (down)
//! axis. Aerodynamic magnitudes are `C · Q · S_ref` with Q the dynamic
//! pressure.

use super::{DynamicsError, DynamicsParams, MissileState};
use crate::vec3::Vec3;

/// Flight-path attitude and incidence angles, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attitude {
    /// Elevation of the velocity axis, positive climbing.
    pub gamma: f64,
    /// Azimuth of the velocity axis, measured from +x toward +y.
    pub psi: f64,
    /// Angle of attack.
    pub alpha: f64,
    /// Sideslip angle.
    pub beta: f64,
}

impl Attitude {
    pub fn level(gamma: f64, psi: f64) -> Self {
        Attitude { gamma, psi, alpha: 0.0, beta: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.gamma.is_finite()
            && self.psi.is_finite()
            && self.alpha.is_finite()
            && self.beta.is_finite()
    }
}

/// Time derivative of a [`MissileState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub velocity: Vec3,
    pub acceleration: Vec3,
}

/// Control input for one integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control {
    /// Fly at a fixed attitude (boost phase, test harnesses).
    Attitude(Attitude),
    /// Realize a commanded acceleration perpendicular to the velocity,
    /// saturated at the configured lateral limit (guided phase).
    LateralAccel(Vec3),
}

/// Velocity-axis unit vector for flight-path angles (γ, ψ), z down.
fn axial_dir(gamma: f64, psi: f64) -> Vec3 {
    Vec3::new(gamma.cos() * psi.cos(), gamma.cos() * psi.sin(), -gamma.sin())
}

/// Horizontal perpendicular ("left" of the azimuth).
fn side_dir(psi: f64) -> Vec3 {
    Vec3::new(-psi.sin(), psi.cos(), 0.0)
}

/// In-plane perpendicular pointing away from the ground ("up").
fn normal_dir(gamma: f64, psi: f64) -> Vec3 {
    Vec3::new(-gamma.sin() * psi.cos(), -gamma.sin() * psi.sin(), -gamma.cos())
}

fn dynamic_pressure(params: &DynamicsParams, state: &MissileState) -> f64 {
    let rho = params.air_density.density(state.altitude());
    0.5 * rho * state.velocity.norm_sq()
}

/// Thrust magnitude at flight time `t` (boost then coast).
pub(crate) fn thrust_at(params: &DynamicsParams, t: f64) -> f64 {
    if t < params.boost_duration {
        params.thrust
    } else {
        0.0
    }
}

/// State derivative under a fixed attitude.
///
/// The three inertial acceleration components follow the channel-force
/// resolution in the module docs; with all forces zero this reduces to free
/// fall `(0, 0, g)`.
pub fn derivatives(
    state: &MissileState,
    attitude: &Attitude,
    params: &DynamicsParams,
) -> Result<StateDerivative, DynamicsError> {
    if !state.is_finite() || !attitude.is_finite() {
        return Err(DynamicsError::NonFinite { time: state.time });
    }
    let q = dynamic_pressure(params, state);
    let drag = params.c_d * q * params.reference_area;
    let side_trim = params.c_y * q * params.reference_area;
    let normal_trim = params.c_n * q * params.reference_area;

    let tan_a = attitude.alpha.tan();
    let tan_b = attitude.beta.tan();
    let thrust_axial = thrust_at(params, state.time) / (1.0 + tan_a * tan_a + tan_b * tan_b).sqrt();

    let f_axial = thrust_axial - drag;
    let f_side = thrust_axial * tan_b + side_trim;
    let f_normal = thrust_axial * tan_a + normal_trim;

    let acceleration = (axial_dir(attitude.gamma, attitude.psi) * f_axial
        + side_dir(attitude.psi) * f_side
        + normal_dir(attitude.gamma, attitude.psi) * f_normal)
        / params.mass
        + Vec3::new(0.0, 0.0, params.gravity);

    Ok(StateDerivative { velocity: state.velocity, acceleration })
}

/// Clamps `a` to the plane perpendicular to `velocity` and to magnitude
/// `limit`.
pub(crate) fn clamp_lateral(a: Vec3, velocity: Vec3, limit: f64) -> Vec3 {
    let perp = match velocity.normalized(1e-9) {
        Some(ev) => a - ev * a.dot(ev),
        None => a,
    };
    let n = perp.norm();
    if n > limit {
        perp * (limit / n)
    } else {
        perp
    }
}

/// State derivative while realizing a commanded lateral acceleration.
///
/// Thrust (if any) and drag act along the velocity axis; the commanded
/// acceleration is projected perpendicular to the velocity and saturated at
/// `max_lateral_accel` before being applied.
pub(crate) fn command_derivatives(
    state: &MissileState,
    commanded: Vec3,
    params: &DynamicsParams,
) -> Result<StateDerivative, DynamicsError> {
    if !state.is_finite() || !commanded.is_finite() {
        return Err(DynamicsError::NonFinite { time: state.time });
    }
    let q = dynamic_pressure(params, state);
    let drag = params.c_d * q * params.reference_area;
    let axial_accel = (thrust_at(params, state.time) - drag) / params.mass;

    let along = state
        .velocity
        .normalized(1e-9)
        .map(|ev| ev * axial_accel)
        .unwrap_or(Vec3::ZERO);
    let lateral = clamp_lateral(commanded, state.velocity, params.max_lateral_accel());

    Ok(StateDerivative {
        velocity: state.velocity,
        acceleration: along + lateral + Vec3::new(0.0, 0.0, params.gravity),
    })
}

/// Pure proportional navigation acceleration command toward a (possibly
/// moving) target point, plus compensation of the gravity component
/// perpendicular to the velocity (magnitude `g·cosγ`).
///
/// `Ω = (r × v_rel) / |r|²`, `a = N · Ω × V_M`, with `r` the missile-to-target
/// vector. The returned command is perpendicular to the missile velocity.
pub fn ppn_command(
    state: &MissileState,
    target_position: Vec3,
    target_velocity: Vec3,
    params: &DynamicsParams,
) -> Result<Vec3, DynamicsError> {
    let r = target_position - state.position;
    let range_sq = r.norm_sq();
    if range_sq <= 1e-12 {
        return Err(DynamicsError::ZeroRange);
    }
    let v_rel = target_velocity - state.velocity;
    let omega = r.cross(v_rel) / range_sq;
    let pn = omega.cross(state.velocity) * params.nav_constant;

    // Cancel the gravity component perpendicular to the velocity; the axial
    // component stays (a PN autopilot has no axial authority after boost).
    let gravity = Vec3::new(0.0, 0.0, params.gravity);
    let compensation = match state.velocity.normalized(1e-9) {
        Some(ev) => -(gravity - ev * gravity.dot(ev)),
        None => Vec3::ZERO,
    };
    Ok(pn + compensation)
}

/// One classic fourth-order Runge-Kutta step of a state-dependent derivative.
pub(crate) fn rk4_step<F>(
    state: &MissileState,
    dt: f64,
    mut f: F,
) -> Result<MissileState, DynamicsError>
where
    F: FnMut(&MissileState) -> Result<StateDerivative, DynamicsError>,
{
    let probe = |s: &MissileState, k: &StateDerivative, h: f64| MissileState {
        position: s.position + k.velocity * h,
        velocity: s.velocity + k.acceleration * h,
        time: s.time + h,
    };

    let k1 = f(state)?;
    let k2 = f(&probe(state, &k1, dt * 0.5))?;
    let k3 = f(&probe(state, &k2, dt * 0.5))?;
    let k4 = f(&probe(state, &k3, dt))?;

    let next = MissileState {
        position: state.position
            + (k1.velocity + k2.velocity * 2.0 + k3.velocity * 2.0 + k4.velocity) * (dt / 6.0),
        velocity: state.velocity
            + (k1.acceleration + k2.acceleration * 2.0 + k3.acceleration * 2.0 + k4.acceleration)
                * (dt / 6.0),
        time: state.time + dt,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(DynamicsError::NonFinite { time: next.time })
    }
}

/// Advances the state by `dt` under a control input held constant for the
/// step. Deterministic; reports divergence (non-finite result) as an error.
pub fn integrate_step(
    state: &MissileState,
    control: &Control,
    params: &DynamicsParams,
    dt: f64,
) -> Result<MissileState, DynamicsError> {
    assert!(dt > 0.0, "integration step must be positive");
    match control {
        Control::Attitude(att) => rk4_step(state, dt, |s| derivatives(s, att, params)),
        Control::LateralAccel(cmd) => rk4_step(state, dt, |s| command_derivatives(s, *cmd, params)),
    }
}
