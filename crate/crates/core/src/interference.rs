//! Pairwise interference predicates and the conflict table they populate.
//!
//! Two flights interfere *physically* when they pass within `d_pif` of each
//! other at some common instant, and via their *seekers* when at some common
//! instant they are within `d_sif` AND the angle between the relative
//! position and the relative velocity is below the seeker field-of-view half
//! angle. Both predicates are scanned on a fixed time grid over the overlap
//! of the two flight windows, with linear interpolation between trajectory
//! samples. The predicates are symmetric in the pair ordering; the seeker
//! angle is checked for both orderings and either one triggers.

use crate::dynamics::Trajectory;
use crate::pip::{EngagementStore, PipSet};
use crate::scenario::Scenario;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::fmt;

/// Identity of one assignment candidate: a farm committed to one PIP.
///
/// All three components are indices into the scenario ordering (farms as
/// listed, targets in shot-group-major order, PIPs along the descending
/// track).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId {
    pub farm: usize,
    pub target: usize,
    pub pip: usize,
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}:t{}:p{}", self.farm + 1, self.target + 1, self.pip)
    }
}

/// Kind of interference between two candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferenceKind {
    Physical,
    Seeker,
}

impl InterferenceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InterferenceKind::Physical => "physical",
            InterferenceKind::Seeker => "seeker",
        }
    }
}

/// A trajectory anchored on the shared scenario timeline.
#[derive(Debug, Clone, Copy)]
pub struct FlightPath<'a> {
    pub trajectory: &'a Trajectory,
    /// Added to the trajectory's own time base (launch time for engagement
    /// trajectories simulated from t = 0; zero for absolute-time tracks).
    pub shift: f64,
}

impl<'a> FlightPath<'a> {
    pub fn new(trajectory: &'a Trajectory, shift: f64) -> Self {
        FlightPath { trajectory, shift }
    }

    /// Absolute flight window `[launch, terminal]`.
    pub fn window(&self) -> (f64, f64) {
        (self.shift + self.trajectory.t0(), self.shift + self.trajectory.terminal_time())
    }

    fn state_at(&self, t: f64) -> (crate::vec3::Vec3, crate::vec3::Vec3) {
        self.trajectory.state_at(t - self.shift)
    }
}

/// Scans the overlap window of two flights on a `dt` grid (window end always
/// included) and reports which predicates fired anywhere.
fn scan_pair(
    a: &FlightPath,
    b: &FlightPath,
    d_pif: f64,
    d_sif: f64,
    sigma_fov: f64,
    dt: f64,
) -> (bool, bool) {
    let (a_start, a_end) = a.window();
    let (b_start, b_end) = b.window();
    let start = a_start.max(b_start);
    let end = a_end.min(b_end);
    if start > end {
        return (false, false);
    }

    let cos_sigma = sigma_fov.cos();
    let mut physical = false;
    let mut seeker = false;
    let mut k = 0u64;
    loop {
        let t = (start + k as f64 * dt).min(end);
        let (pa, va) = a.state_at(t);
        let (pb, vb) = b.state_at(t);
        let r = pb - pa;
        let v = vb - va;
        let range = r.norm();

        if range < d_pif {
            physical = true;
        }
        if !seeker && range < d_sif {
            let speed = v.norm();
            if range < 1e-9 || speed < 1e-9 {
                // Degenerate geometry: fall back to the distance condition.
                seeker = true;
            } else {
                // angle(r, v) < σ for either ordering; negating both r and v
                // leaves the cosine unchanged, so one evaluation covers both.
                let cos_angle = r.dot(v) / (range * speed);
                if cos_angle > cos_sigma {
                    seeker = true;
                }
            }
        }
        if (physical && seeker) || t >= end {
            break;
        }
        k += 1;
    }
    (physical, seeker)
}

/// Physical interference: some common instant with separation below `d_pif`.
pub fn check_physical(a: &FlightPath, b: &FlightPath, d_pif: f64, dt: f64) -> bool {
    scan_pair(a, b, d_pif, 0.0, 0.0, dt).0
}

/// Seeker interference: some common instant within `d_sif` and inside the
/// field-of-view cone around the relative velocity.
pub fn check_seeker(a: &FlightPath, b: &FlightPath, d_sif: f64, sigma_fov: f64, dt: f64) -> bool {
    scan_pair(a, b, 0.0, d_sif, sigma_fov, dt).1
}

/// Symmetric conflict relation over assignment candidates, split by kind.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InterferenceTable {
    /// Unordered pairs, stored with the smaller id first.
    pub physical: BTreeSet<(CandidateId, CandidateId)>,
    pub seeker: BTreeSet<(CandidateId, CandidateId)>,
    pub candidate_count: usize,
    /// Pairs actually scanned.
    pub evaluated_pairs: u64,
    /// Same-farm pairs skipped because the launch-delay constraint already
    /// forbids selecting both.
    pub skipped_delay_pairs: u64,
}

fn ordered(a: CandidateId, b: CandidateId) -> (CandidateId, CandidateId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl InterferenceTable {
    pub fn contains(&self, kind: InterferenceKind, a: CandidateId, b: CandidateId) -> bool {
        let key = ordered(a, b);
        match kind {
            InterferenceKind::Physical => self.physical.contains(&key),
            InterferenceKind::Seeker => self.seeker.contains(&key),
        }
    }

    /// Union of both kinds as conflict pairs.
    pub fn all_pairs(&self) -> BTreeSet<(CandidateId, CandidateId)> {
        self.physical.union(&self.seeker).copied().collect()
    }
}

/// Evaluates both predicates for every unordered pair of feasible candidates,
/// across farms and within a farm.
///
/// Same-farm pairs whose launch times violate the farm's launch delay are
/// skipped (the delay constraint already excludes them) unless `include_all`
/// is set for full table exports; pairs with exactly equal same-farm launch
/// times are never related by the table.
pub fn build_interference_table(
    pip_set: &PipSet,
    store: &EngagementStore,
    scenario: &Scenario,
    include_all: bool,
) -> InterferenceTable {
    let params = &scenario.interference_params;
    let candidates: Vec<CandidateId> = store.flights.keys().copied().collect();

    let mut jobs: Vec<(usize, usize)> = Vec::new();
    let mut skipped_delay_pairs = 0u64;
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let (a, b) = (candidates[i], candidates[j]);
            if a.farm == b.farm {
                let ta = store.flights[&a].launch_time;
                let tb = store.flights[&b].launch_time;
                if ta == tb {
                    skipped_delay_pairs += 1;
                    continue;
                }
                let delay = scenario.weapon_farms[a.farm].launch_delay;
                if (ta - tb).abs() < delay && !include_all {
                    skipped_delay_pairs += 1;
                    continue;
                }
            }
            jobs.push((i, j));
        }
    }

    let hits: Vec<((usize, usize), (bool, bool))> = jobs
        .into_par_iter()
        .map(|(i, j)| {
            let fa = &store.flights[&candidates[i]];
            let fb = &store.flights[&candidates[j]];
            let pa = FlightPath::new(&fa.trajectory, fa.launch_time);
            let pb = FlightPath::new(&fb.trajectory, fb.launch_time);
            let flags = scan_pair(
                &pa,
                &pb,
                params.d_pif,
                params.d_sif,
                params.sigma_fov,
                params.check_sample_dt,
            );
            ((i, j), flags)
        })
        .collect();

    let mut table = InterferenceTable {
        candidate_count: candidates.len(),
        evaluated_pairs: hits.len() as u64,
        skipped_delay_pairs,
        ..InterferenceTable::default()
    };
    for ((i, j), (physical, seeker)) in hits {
        let pair = ordered(candidates[i], candidates[j]);
        if physical {
            table.physical.insert(pair);
        }
        if seeker {
            table.seeker.insert(pair);
        }
    }
    debug_assert!(pip_set.farm_ids.len() == scenario.weapon_farms.len());
    table
}

/// Summary counts and fractions of an interference table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceStats {
    pub candidate_count: usize,
    pub evaluated_pairs: u64,
    pub skipped_delay_pairs: u64,
    pub physical_count: u64,
    pub seeker_count: u64,
    pub physical_fraction: f64,
    pub seeker_fraction: f64,
}

pub fn interference_stats(table: &InterferenceTable) -> InterferenceStats {
    let physical_count = table.physical.len() as u64;
    let seeker_count = table.seeker.len() as u64;
    let denom = table.evaluated_pairs.max(1) as f64;
    InterferenceStats {
        candidate_count: table.candidate_count,
        evaluated_pairs: table.evaluated_pairs,
        skipped_delay_pairs: table.skipped_delay_pairs,
        physical_count,
        seeker_count,
        physical_fraction: if table.evaluated_pairs == 0 { 0.0 } else { physical_count as f64 / denom },
        seeker_fraction: if table.evaluated_pairs == 0 { 0.0 } else { seeker_count as f64 / denom },
    }
}

/// Dense 0/1 conflict matrix between the full PIP layouts of two farms, rows
/// and columns in global PIP order (targets in scenario order, then index).
/// Infeasible candidates keep their rows as zeros.
pub fn heatmap(
    table: &InterferenceTable,
    pip_set: &PipSet,
    kind: InterferenceKind,
    farm_a: usize,
    farm_b: usize,
) -> Vec<Vec<u8>> {
    let n = pip_set.len();
    let mut matrix = vec![vec![0u8; n]; n];
    let set = match kind {
        InterferenceKind::Physical => &table.physical,
        InterferenceKind::Seeker => &table.seeker,
    };
    for &(a, b) in set {
        for (x, y) in [(a, b), (b, a)] {
            if x.farm == farm_a && y.farm == farm_b {
                let row = pip_set.global_index(x.target, x.pip);
                let col = pip_set.global_index(y.target, y.pip);
                matrix[row][col] = 1;
            }
        }
    }
    matrix
}
