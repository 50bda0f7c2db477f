//! Discretization of target tracks into predicted-intercept-point (PIP) sets
//! and per-farm launch-time/feasibility computation.
//!
//! Each track is cut where it descends through the intercept altitude band
//! and sampled at `pips_per_target` points uniformly spaced in arc length.
//! Every (farm, PIP) pair is then simulated to get its time of flight; the
//! launch time is `impact_time - time_of_flight` and the pair is feasible
//! when the engagement intercepts and the launch time is not in the past.
//! Infeasible pairs stay in the set, flagged, so table indices always match
//! the full `pips_per_target × targets` layout.

use crate::dynamics::{EngagementCache, Trajectory};
use crate::interference::CandidateId;
use crate::scenario::{Scenario, TargetTrack};
use crate::vec3::Vec3;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// Per-farm launch data of one PIP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarmPipData {
    /// Reachable and launchable (launch time >= 0).
    pub feasible: bool,
    /// `impact_time - time_of_flight`, present whenever the point is reachable.
    pub launch_time: Option<f64>,
    pub time_of_flight: Option<f64>,
}

/// One predicted intercept point on a target track.
#[derive(Debug, Clone, PartialEq)]
pub struct PipPoint {
    pub target_id: String,
    /// 0-based target position in the scenario ordering.
    pub target_index: usize,
    /// 0-based index along the descending track (0 = band entry).
    pub index: usize,
    pub position: Vec3,
    /// Absolute time the target reaches this point, seconds.
    pub impact_time: f64,
    /// Indexed like the scenario's farm list.
    pub farm_data: Vec<FarmPipData>,
}

impl PipPoint {
    pub fn altitude(&self) -> f64 {
        -self.position.z
    }
}

/// The full PIP set of a scenario, ordered by (target, index).
#[derive(Debug, Clone, PartialEq)]
pub struct PipSet {
    pub farm_ids: Vec<String>,
    pub target_ids: Vec<String>,
    pub pips_per_target: usize,
    pub pips: Vec<PipPoint>,
    /// Consecutive PIP spacing per target, meters.
    pub spacings: Vec<f64>,
    /// One entry per target whose spacing fell below the physical
    /// interference distance.
    pub spacing_warnings: Vec<String>,
}

impl PipSet {
    pub fn len(&self) -> usize {
        self.pips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pips.is_empty()
    }

    pub fn global_index(&self, target_index: usize, pip_index: usize) -> usize {
        target_index * self.pips_per_target + pip_index
    }

    pub fn pip(&self, target_index: usize, pip_index: usize) -> &PipPoint {
        &self.pips[self.global_index(target_index, pip_index)]
    }

    /// All feasible (farm, PIP) candidates in deterministic order.
    pub fn feasible_candidates(&self) -> impl Iterator<Item = CandidateId> + '_ {
        (0..self.farm_ids.len()).flat_map(move |farm| {
            self.pips.iter().filter_map(move |pip| {
                pip.farm_data[farm].feasible.then_some(CandidateId {
                    farm,
                    target: pip.target_index,
                    pip: pip.index,
                })
            })
        })
    }

    pub fn launch_time(&self, id: &CandidateId) -> Option<f64> {
        self.pip(id.target, id.pip).farm_data[id.farm].launch_time
    }

    /// Span of feasible launch times for one (farm, target) pair, `None` when
    /// no PIP of the target is feasible from the farm.
    pub fn launch_window(&self, farm: usize, target: usize) -> Option<(f64, f64)> {
        let mut window: Option<(f64, f64)> = None;
        for i in 0..self.pips_per_target {
            let data = &self.pip(target, i).farm_data[farm];
            if !data.feasible {
                continue;
            }
            let t = data.launch_time.unwrap();
            window = Some(match window {
                None => (t, t),
                Some((lo, hi)) => (lo.min(t), hi.max(t)),
            });
        }
        window
    }
}

/// Stored trajectory of one feasible candidate, anchored at its launch time.
#[derive(Debug, Clone)]
pub struct CandidateFlight {
    /// Simulated with t0 = 0; shift by `launch_time` for absolute time.
    pub trajectory: Arc<Trajectory>,
    pub launch_time: f64,
}

/// Trajectories of all feasible candidates, keyed by candidate id.
#[derive(Debug, Clone, Default)]
pub struct EngagementStore {
    pub flights: BTreeMap<CandidateId, CandidateFlight>,
}

impl EngagementStore {
    pub fn get(&self, id: &CandidateId) -> Option<&CandidateFlight> {
        self.flights.get(id)
    }
}

#[derive(Debug, Error)]
pub enum PipError {
    #[error("target {target_id}: track never descends through the altitude band [{band_min}, {band_max}] m")]
    NotInBand { target_id: String, band_min: f64, band_max: f64 },
    #[error("pips_per_target must be >= 2, got {0}")]
    TooFewPips(usize),
}

/// Positions and impact times of one discretized track.
#[derive(Debug, Clone)]
pub struct TrackDiscretization {
    /// `(position, impact_time)` per PIP, index 0 at band entry.
    pub points: Vec<(Vec3, f64)>,
    /// Uniform consecutive spacing, meters.
    pub spacing: f64,
    /// Arc length of the in-band descending segment, meters.
    pub path_length: f64,
}

/// Cuts the descending in-band segment of `track` and places `n` points on it
/// uniformly in arc length (endpoints on the band boundaries).
pub fn discretize_track(
    track: &TargetTrack,
    band: (f64, f64),
    n: usize,
) -> Result<TrackDiscretization, PipError> {
    if n < 2 {
        return Err(PipError::TooFewPips(n));
    }
    let (band_min, band_max) = band;
    let traj = &track.trajectory;
    let not_in_band = || PipError::NotInBand {
        target_id: track.target_id.clone(),
        band_min,
        band_max,
    };

    let altitudes: Vec<f64> = traj.states().map(|s| s.altitude()).collect();
    let apogee_index =
        altitudes.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap();

    // Descending crossing time of `level`, by linear interpolation between
    // the bracketing samples.
    let crossing = |level: f64| -> Option<f64> {
        for i in apogee_index..altitudes.len().saturating_sub(1) {
            if altitudes[i] >= level && altitudes[i + 1] < level {
                let frac = (altitudes[i] - level) / (altitudes[i] - altitudes[i + 1]);
                return Some(traj.t0() + (i as f64 + frac) * traj.dt());
            }
        }
        None
    };
    let t_enter = crossing(band_max).ok_or_else(not_in_band)?;
    let t_exit = crossing(band_min).ok_or_else(not_in_band)?;

    // Polyline over the in-band segment: interpolated endpoints plus every
    // sample strictly between them.
    let mut polyline: Vec<(f64, Vec3)> = vec![(t_enter, traj.position_at(t_enter))];
    for i in 0..traj.len() {
        let t = traj.t0() + i as f64 * traj.dt();
        if t <= t_enter {
            continue;
        }
        if t >= t_exit {
            break;
        }
        polyline.push((t, traj.state(i).position));
    }
    polyline.push((t_exit, traj.position_at(t_exit)));

    let mut cumulative = vec![0.0];
    for pair in polyline.windows(2) {
        let d = pair[0].1.distance(pair[1].1);
        cumulative.push(cumulative.last().unwrap() + d);
    }
    let path_length = *cumulative.last().unwrap();

    let mut points = Vec::with_capacity(n);
    let mut segment = 0;
    for k in 0..n {
        let target_s = path_length * k as f64 / (n - 1) as f64;
        while segment + 2 < cumulative.len() && cumulative[segment + 1] < target_s {
            segment += 1;
        }
        let seg_len = cumulative[segment + 1] - cumulative[segment];
        let frac = if seg_len > 0.0 { (target_s - cumulative[segment]) / seg_len } else { 0.0 };
        let (t_a, p_a) = polyline[segment];
        let (t_b, p_b) = polyline[segment + 1];
        points.push((p_a.lerp(p_b, frac), t_a + (t_b - t_a) * frac));
    }

    Ok(TrackDiscretization { points, spacing: path_length / (n - 1) as f64, path_length })
}

/// Output of [`build_pip_set`]: the PIP set plus the stored feasible-candidate
/// trajectories used by the interference stage.
#[derive(Debug)]
pub struct PipBuild {
    pub pip_set: PipSet,
    pub store: EngagementStore,
}

/// Discretizes every track and computes per-farm launch data for every
/// (farm, PIP) pair. Tracks must already be in the scenario target order.
///
/// Unreachable pairs are flagged infeasible, never fatal.
pub fn build_pip_set(scenario: &Scenario, tracks: &[TargetTrack]) -> Result<PipBuild, PipError> {
    let n = scenario.pips_per_target;
    let band = scenario.intercept_altitude_band;

    let mut pips = Vec::with_capacity(tracks.len() * n);
    let mut spacings = Vec::with_capacity(tracks.len());
    let mut spacing_warnings = Vec::new();
    for (target_index, track) in tracks.iter().enumerate() {
        let disc = discretize_track(track, band, n)?;
        if disc.spacing < scenario.interference_params.d_pif {
            spacing_warnings.push(format!(
                "target {}: PIP spacing {:.1} m below physical interference distance {:.1} m",
                track.target_id, disc.spacing, scenario.interference_params.d_pif
            ));
        }
        spacings.push(disc.spacing);
        for (index, (position, impact_time)) in disc.points.into_iter().enumerate() {
            pips.push(PipPoint {
                target_id: track.target_id.clone(),
                target_index,
                index,
                position,
                impact_time,
                farm_data: Vec::new(),
            });
        }
    }

    let cache = EngagementCache::new(scenario.weapon_farms.clone(), scenario.dynamics_params);
    let positions: Vec<Vec3> = pips.iter().map(|p| p.position).collect();
    cache.populate(&positions);

    let mut store = EngagementStore::default();
    for (global, pip) in pips.iter_mut().enumerate() {
        for farm in 0..scenario.weapon_farms.len() {
            let result = cache.get_or_compute(farm, global, pip.position);
            let time_of_flight = result.time_of_flight;
            let launch_time = time_of_flight.map(|tof| pip.impact_time - tof);
            let feasible = matches!(launch_time, Some(t) if t >= 0.0);
            pip.farm_data.push(FarmPipData { feasible, launch_time, time_of_flight });
            if feasible {
                store.flights.insert(
                    CandidateId { farm, target: pip.target_index, pip: pip.index },
                    CandidateFlight {
                        trajectory: Arc::clone(&result.trajectory),
                        launch_time: launch_time.unwrap(),
                    },
                );
            }
        }
    }

    let pip_set = PipSet {
        farm_ids: scenario.weapon_farms.iter().map(|f| f.id.clone()).collect(),
        target_ids: tracks.iter().map(|t| t.target_id.clone()).collect(),
        pips_per_target: n,
        pips,
        spacings,
        spacing_warnings,
    };
    Ok(PipBuild { pip_set, store })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Outcome, Trajectory};
    use crate::scenario::{build_w_formation_scenario, generate_target_tracks};

    /// Straight constant-speed descent through the band, for closed-form
    /// spacing checks.
    fn straight_track(t0: f64, speed: f64) -> TargetTrack {
        // from altitude 7000 m straight down-range: direction (3, 0, 4)/5
        // (z down), so altitude falls 4/5 of the path length.
        let dir = Vec3::new(0.6, 0.0, 0.8);
        let start = Vec3::new(0.0, 0.0, -7000.0);
        let dt = 0.05;
        let steps = (7000.0 / (0.8 * speed) / dt).ceil() as usize;
        let samples: Vec<(Vec3, Vec3)> =
            (0..=steps).map(|i| (start + dir * (speed * i as f64 * dt), dir * speed)).collect();
        TargetTrack {
            target_id: "s1".into(),
            source_launcher_id: "e1".into(),
            launcher_index: 0,
            shot_index: 0,
            launch_time: t0,
            trajectory: Trajectory::from_samples(t0, dt, samples, Outcome::Intercept, None),
            value_log: 2.0,
        }
    }

    #[test]
    fn straight_track_has_closed_form_spacing() {
        let track = straight_track(0.0, 500.0);
        let disc = discretize_track(&track, (4000.0, 5000.0), 30).unwrap();
        // altitude drop 1000 m at slope 0.8 → path length 1250 m
        assert!((disc.path_length - 1250.0).abs() < 1e-6);
        let expected = 1250.0 / 29.0;
        assert!((disc.spacing - expected).abs() < 1e-9);
        for pair in disc.points.windows(2) {
            let d = pair[0].0.distance(pair[1].0);
            assert!((d - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn two_pips_are_exactly_the_band_crossings() {
        let track = straight_track(0.0, 500.0);
        let disc = discretize_track(&track, (4000.0, 5000.0), 2).unwrap();
        assert_eq!(disc.points.len(), 2);
        assert!((-disc.points[0].0.z - 5000.0).abs() < 1e-6);
        assert!((-disc.points[1].0.z - 4000.0).abs() < 1e-6);
    }

    #[test]
    fn ballistic_track_pips_stay_in_band_with_increasing_times() {
        let scenario = build_w_formation_scenario(1).unwrap();
        let tracks = generate_target_tracks(&scenario, 9).unwrap();
        let disc = discretize_track(&tracks[0], scenario.intercept_altitude_band, 30).unwrap();
        assert_eq!(disc.points.len(), 30);
        for pair in disc.points.windows(2) {
            assert!(pair[1].1 > pair[0].1, "impact times must increase");
        }
        for (p, _) in &disc.points {
            let alt = -p.z;
            assert!((4000.0 - 1e-6..=5000.0 + 1e-6).contains(&alt), "altitude {alt}");
        }
    }

    #[test]
    fn track_below_band_is_an_error() {
        let track = straight_track(0.0, 500.0);
        match discretize_track(&track, (8000.0, 9000.0), 5) {
            Err(PipError::NotInBand { target_id, .. }) => assert_eq!(target_id, "s1"),
            other => panic!("expected NotInBand, got {other:?}"),
        }
    }

    fn small_scenario() -> Scenario {
        let mut s = build_w_formation_scenario(1).unwrap();
        s.pips_per_target = 4;
        s.dynamics_params.integration_dt = 0.02;
        s
    }

    #[test]
    fn pip_count_is_pips_per_target_times_targets() {
        let scenario = small_scenario();
        let tracks = generate_target_tracks(&scenario, 2).unwrap();
        let build = build_pip_set(&scenario, &tracks).unwrap();
        assert_eq!(build.pip_set.len(), 4 * 6);
        assert_eq!(build.pip_set.target_ids.len(), 6);
    }

    #[test]
    fn feasible_candidates_have_stored_intercepting_flights() {
        let scenario = small_scenario();
        let tracks = generate_target_tracks(&scenario, 2).unwrap();
        let build = build_pip_set(&scenario, &tracks).unwrap();
        let mut feasible = 0;
        for id in build.pip_set.feasible_candidates() {
            feasible += 1;
            let flight = build.store.get(&id).expect("flight stored");
            assert_eq!(flight.trajectory.outcome, Outcome::Intercept);
            let pip = build.pip_set.pip(id.target, id.pip);
            let terminal = flight.trajectory.last().position;
            assert!(
                terminal.distance(pip.position) < 3.0 * scenario.dynamics_params.miss_tolerance
            );
            // launch + tof reproduces the impact time
            let data = pip.farm_data[id.farm];
            let err =
                (data.launch_time.unwrap() + data.time_of_flight.unwrap() - pip.impact_time).abs();
            assert!(err < 1e-9);
        }
        assert!(feasible > 0, "desk scenario should have feasible candidates");
    }

    #[test]
    fn early_impact_time_makes_both_farms_infeasible() {
        let scenario = small_scenario();
        // Track enters the band a couple of seconds after scenario start:
        // any positive time of flight puts the launch in the past.
        let track = straight_track(0.0, 1500.0);
        let build = build_pip_set(&scenario, &[track]).unwrap();
        for pip in &build.pip_set.pips {
            assert!(pip.impact_time < 6.0);
            for data in &pip.farm_data {
                assert!(!data.feasible);
            }
        }
    }

    fn assert_launch_monotone_where_tof_is_flat(set: &PipSet) -> usize {
        let mut premise_held = 0;
        for farm in 0..set.farm_ids.len() {
            for target in 0..set.target_ids.len() {
                for i in 0..set.pips_per_target - 1 {
                    let a = set.pip(target, i);
                    let b = set.pip(target, i + 1);
                    let (Some(tof_a), Some(tof_b)) = (
                        a.farm_data[farm].time_of_flight,
                        b.farm_data[farm].time_of_flight,
                    ) else {
                        continue;
                    };
                    let impact_gap = b.impact_time - a.impact_time;
                    if (tof_b - tof_a).abs() < impact_gap {
                        premise_held += 1;
                        let la = a.farm_data[farm].launch_time.unwrap();
                        let lb = b.farm_data[farm].launch_time.unwrap();
                        assert!(lb > la, "farm {farm} target {target} index {i}");
                    }
                }
            }
        }
        premise_held
    }

    #[test]
    fn launch_time_increases_with_index_when_tof_varies_slowly() {
        // Sweep the generated set; the premise holds only where the slant
        // range varies slower than the impact times.
        let scenario = small_scenario();
        let tracks = generate_target_tracks(&scenario, 2).unwrap();
        let set = build_pip_set(&scenario, &tracks).unwrap().pip_set;
        assert_launch_monotone_where_tof_is_flat(&set);

        // A steep slow descent far from the farms keeps the slant range
        // nearly constant across adjacent PIPs, so the premise must hold.
        let dir = Vec3::new(0.0, 0.0, 1.0);
        let start = Vec3::new(8000.0, 0.0, -7000.0);
        let dt = 0.05;
        let speed: f64 = 150.0;
        let steps = (7000.0 / speed / dt).ceil() as usize;
        let samples: Vec<(Vec3, Vec3)> =
            (0..=steps).map(|i| (start + dir * (speed * i as f64 * dt), dir * speed)).collect();
        let vertical = TargetTrack {
            target_id: "v1".into(),
            source_launcher_id: "e1".into(),
            launcher_index: 0,
            shot_index: 0,
            launch_time: 0.0,
            trajectory: Trajectory::from_samples(0.0, dt, samples, Outcome::Intercept, None),
            value_log: 2.0,
        };
        let set = build_pip_set(&scenario, &[vertical]).unwrap().pip_set;
        assert!(assert_launch_monotone_where_tof_is_flat(&set) > 0);
    }
}
