//! Planning toolkit for assigning guided interceptors to predicted intercept
//! points (PIPs) on incoming ballistic targets.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`scenario`] — declarative scenario files, the built-in W-formation
//!    cases, and ballistic target track generation.
//! 2. [`dynamics`] — 3-DOF point-mass interceptor simulation with a boost
//!    phase followed by pure proportional navigation.
//! 3. [`pip`] — discretization of each target track into a PIP set inside the
//!    intercept altitude band, with per-farm launch times and feasibility.
//! 4. [`interference`] — pairwise physical and seeker interference checks over
//!    candidate trajectories, assembled into a conflict table.
//! 5. [`milp`] — the binary assignment model over feasible (farm, PIP)
//!    candidates, solved exactly by branch and bound.
//!
//! [`pipeline`] orchestrates the stages end to end and writes the artifact
//! files consumed by plotting and reporting tools.
//!
//! # Axis convention
//!
//! All positions use a right-handed frame with **z positive downward** (NED
//! style). Ground objects sit at `z = 0` and altitude is `-z`. Altitude bands
//! and exported "altitude" values are positive-up; raw `z` columns in exports
//! follow the internal convention.

pub mod dynamics;
pub mod interference;
pub mod milp;
pub mod pip;
pub mod pipeline;
pub mod scenario;
pub mod vec3;

pub use vec3::Vec3;
