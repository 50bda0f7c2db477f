//! Acceptance suite. Each test exercises one gate criterion end to end and
//! prints one PASS line with the measured numbers.
//!
//! The two built-in cases are built once per test binary (tracks, PIP set,
//! interference table) and shared across criteria.

mod common;

use common::{min_distance_oracle, random_linear_pair, random_model};
use once_cell::sync::Lazy;
use rand::SeedableRng;
use std::time::Instant;
use wta_core::dynamics::{
    integrate_step, simulate_guided_segment, Attitude, Control, DynamicsParams, MissileState,
    Outcome,
};
use wta_core::interference::{
    build_interference_table, check_physical, interference_stats, FlightPath, InterferenceTable,
};
use wta_core::milp::{
    brute_force_oracle, build_model, evaluate_objective, solve_exact, verify_selection,
    AssignmentModel, Budget, Candidate,
};
use wta_core::pip::{build_pip_set, EngagementStore, PipSet};
use wta_core::pipeline::{run_pipeline, RunMode, RunOptions, ScenarioSource};
use wta_core::scenario::{build_w_formation_scenario, generate_target_tracks, Scenario};
use wta_core::interference::CandidateId;
use wta_core::Vec3;

const SEED: u64 = 0;

struct CaseArtifacts {
    scenario: Scenario,
    pip_set: PipSet,
    store: EngagementStore,
    table: InterferenceTable,
    /// Tracks + discretization + trajectory simulation time, seconds.
    build_seconds: f64,
}

fn build_case(case: u32) -> CaseArtifacts {
    let scenario = build_w_formation_scenario(case).unwrap();
    let start = Instant::now();
    let tracks = generate_target_tracks(&scenario, SEED).unwrap();
    let build = build_pip_set(&scenario, &tracks).unwrap();
    let build_seconds = start.elapsed().as_secs_f64();
    let table = build_interference_table(&build.pip_set, &build.store, &scenario, false);
    CaseArtifacts { scenario, pip_set: build.pip_set, store: build.store, table, build_seconds }
}

static CASE1: Lazy<CaseArtifacts> = Lazy::new(|| build_case(1));
static CASE2: Lazy<CaseArtifacts> = Lazy::new(|| build_case(2));

/// Synthetic model with `targets` targets and two unconstrained farms, enough
/// candidates for any coverage pattern.
fn coverage_model(targets: usize) -> AssignmentModel {
    let mut candidates = Vec::new();
    for target in 0..targets {
        for pip in 0..2 {
            candidates.push(Candidate {
                id: CandidateId { farm: pip % 2, target, pip },
                launch_time: (target * 2 + pip) as f64 * 10.0,
                impact_time: 100.0,
            });
        }
    }
    AssignmentModel::from_parts(
        candidates,
        vec!["f1".into(), "f2".into()],
        (0..targets).map(|t| format!("t{}", t + 1)).collect(),
        vec![2.0; targets],
        1.0,
        2,
        vec![None, None],
        vec![1.0, 1.0],
        &[],
    )
    .unwrap()
}

/// Selection covering targets with the given per-target counts.
fn coverage_selection(model: &AssignmentModel, counts: &[u32]) -> Vec<u32> {
    let mut selection = Vec::new();
    for (v, c) in model.candidates.iter().enumerate() {
        let taken = selection
            .iter()
            .filter(|&&s| model.candidates[s as usize].id.target == c.id.target)
            .count() as u32;
        if taken < counts[c.id.target] {
            selection.push(v as u32);
        }
    }
    selection
}

#[test]
fn criterion_1_objective_arithmetic() {
    let start = Instant::now();

    // (6 targets, 10 assigned, all covered) → 3
    let m6 = coverage_model(6);
    let sel = coverage_selection(&m6, &[2, 2, 2, 2, 1, 1]);
    assert_eq!(sel.len(), 10);
    assert_eq!(evaluate_objective(&m6, &sel), 3.0);

    // (6 targets, 8 assigned, all covered) → 5
    let sel = coverage_selection(&m6, &[2, 2, 1, 1, 1, 1]);
    assert_eq!(sel.len(), 8);
    assert_eq!(evaluate_objective(&m6, &sel), 5.0);

    // (12 targets, 14 assigned, all covered) → 11
    let m12 = coverage_model(12);
    let sel = coverage_selection(&m12, &[2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
    assert_eq!(sel.len(), 14);
    assert_eq!(evaluate_objective(&m12, &sel), 11.0);

    // (12 targets, 12 assigned, at least one uncovered) → 14
    let sel = coverage_selection(&m12, &[2, 2, 2, 2, 2, 2, 0, 0, 0, 0, 0, 0]);
    assert_eq!(sel.len(), 12);
    assert_eq!(evaluate_objective(&m12, &sel), 14.0);

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "criterion 1 took {elapsed:.3} s");
    println!("ACCEPTANCE 1 objective-arithmetic: PASS (10->3, 8->5, 14->11, 12->14 in {elapsed:.3} s)");
}

#[test]
fn criterion_2_solver_exactness_on_500_random_models() {
    let start = Instant::now();
    let mut max_vars_seen = 0;
    for seed in 0..500 {
        let model = random_model(seed, 14);
        max_vars_seen = max_vars_seen.max(model.num_vars());
        let solution = solve_exact(&model, &Budget::default());
        let oracle = brute_force_oracle(&model);
        assert!(solution.stats.proven_optimal, "seed {seed} not proven");
        assert_eq!(
            solution.objective, oracle.objective,
            "objective mismatch on seed {seed} ({} vars)",
            model.num_vars()
        );
        assert!(
            verify_selection(&model, &solution.selected_vars).is_empty(),
            "infeasible selection on seed {seed}"
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "criterion 2 took {elapsed:.1} s");
    println!(
        "ACCEPTANCE 2 solver-exactness: PASS (500 models, up to {max_vars_seen} vars, {elapsed:.1} s)"
    );
}

#[test]
fn criterion_3_pip_counts() {
    let case1 = &*CASE1;
    let case2 = &*CASE2;
    assert_eq!(case1.pip_set.len(), 180, "case 1 must discretize to 180 PIPs");
    assert_eq!(case2.pip_set.len(), 360, "case 2 must discretize to 360 PIPs");
    assert!(case1.build_seconds < 30.0, "case 1 build took {:.1} s", case1.build_seconds);
    assert!(case2.build_seconds < 30.0, "case 2 build took {:.1} s", case2.build_seconds);
    println!(
        "ACCEPTANCE 3 pip-counts: PASS (180 / 360 in {:.1} s / {:.1} s)",
        case1.build_seconds, case2.build_seconds
    );
}

/// Supporting check: every target group holds at most 30 PIPs × 2 farms = 60
/// variables, and every PIP altitude stays inside the band.
#[test]
fn case1_model_structure() {
    let case1 = &*CASE1;
    let model = build_model(&case1.pip_set, Some(&case1.table), &case1.scenario).unwrap();
    for t in 0..model.num_targets() {
        let group = model.candidates.iter().filter(|c| c.id.target == t).count();
        assert!(group <= 60, "target {t} group has {group} variables");
    }
    let (band_min, band_max) = case1.scenario.intercept_altitude_band;
    for pip in &case1.pip_set.pips {
        let alt = pip.altitude();
        assert!(alt >= band_min - 1e-6 && alt <= band_max + 1e-6, "altitude {alt}");
    }
}

/// Supporting check: refining the pair-scan grid on the desk scenario never
/// drops a physical pair.
#[test]
fn desk_grid_refinement_keeps_physical_pairs() {
    let case1 = &*CASE1;
    let mut refined_scenario = case1.scenario.clone();
    refined_scenario.interference_params.check_sample_dt /= 2.0;
    let refined =
        build_interference_table(&case1.pip_set, &case1.store, &refined_scenario, false);
    assert!(
        case1.table.physical.is_subset(&refined.physical),
        "halving the check grid removed physical pairs"
    );
}

#[test]
fn criterion_4_physical_check_vs_closed_form_oracle() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC4);
    let threshold = 50.0;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 100 {
        attempts += 1;
        assert!(attempts < 20_000, "could not sample enough margin-respecting pairs");
        let (a, b) = random_linear_pair(&mut rng);
        let Some(oracle) = min_distance_oracle((&a, 0.0), (&b, 0.0)) else { continue };
        if (oracle - threshold).abs() < 2.0 {
            continue;
        }
        accepted += 1;
        let grid = check_physical(
            &FlightPath::new(&a, 0.0),
            &FlightPath::new(&b, 0.0),
            threshold,
            0.01,
        );
        assert_eq!(
            grid,
            oracle < threshold,
            "disagreement at oracle distance {oracle:.2} m"
        );
    }
    println!("ACCEPTANCE 4 interference-oracle: PASS (100 pairs, 0 disagreements)");
}

#[test]
fn criterion_5_dynamics_checks() {
    // (a) free-fall integration error < 1e-9 relative over 100 steps
    let params = DynamicsParams {
        thrust: 0.0,
        boost_duration: 0.0,
        c_d: 0.0,
        ..DynamicsParams::default()
    };
    let mut state = MissileState { position: Vec3::ZERO, velocity: Vec3::ZERO, time: 0.0 };
    let control = Control::Attitude(Attitude::level(0.0, 0.0));
    for _ in 0..100 {
        state = integrate_step(&state, &control, &params, 0.01).unwrap();
    }
    let expected = 0.5 * params.gravity; // ½ g t² at t = 1 s
    let rel_error = (state.position.z - expected).abs() / expected;
    assert!(rel_error < 1e-9, "free-fall error {rel_error:e}");

    // (b) convergence order >= 3.5 under dt halving on a smooth engagement
    // (coasting flight with the default aero model; quadratic drag keeps the
    // truncation error above the round-off floor)
    let coast = DynamicsParams { thrust: 0.0, boost_duration: 0.0, ..DynamicsParams::default() };
    let initial = MissileState {
        position: Vec3::ZERO,
        velocity: Vec3::new(580.0, 30.0, -120.0),
        time: 0.0,
    };
    let target = Vec3::new(20_000.0, 3000.0, -5000.0);
    let run = |dt: f64| simulate_guided_segment(&initial, target, &coast, 5.0, dt).unwrap();
    let e1 = (run(0.02).position - run(0.01).position).norm();
    let e2 = (run(0.01).position - run(0.005).position).norm();
    let order = (e1 / e2).log2();
    assert!(order >= 3.5, "convergence order {order:.2}");

    // (c) PPN intercepts every feasible desk-scenario PIP within tolerance
    let case1 = &*CASE1;
    let tolerance = case1.scenario.dynamics_params.miss_tolerance;
    let mut checked = 0;
    let mut worst_miss = 0.0f64;
    for (id, flight) in &case1.store.flights {
        assert_eq!(flight.trajectory.outcome, Outcome::Intercept, "candidate {id}");
        let miss = flight.trajectory.miss_distance.unwrap();
        assert!(miss < tolerance, "candidate {id} missed by {miss:.2} m");
        worst_miss = worst_miss.max(miss);
        checked += 1;
    }
    assert!(checked > 0);
    println!(
        "ACCEPTANCE 5 dynamics: PASS (free-fall {rel_error:.1e}, order {order:.2}, {checked} intercepts, worst miss {worst_miss:.2} m)"
    );
}

#[test]
fn criterion_6_interference_structure() {
    let case1 = &*CASE1;
    let stats = interference_stats(&case1.table);
    assert!(stats.physical_count > 0, "case 1 must show physical interference");
    assert!(
        stats.seeker_fraction >= 10.0 * stats.physical_fraction,
        "seeker fraction {:.4} not 10x physical fraction {:.4}",
        stats.seeker_fraction,
        stats.physical_fraction
    );

    // Side structure: a candidate is "own-side" when its farm and its
    // target's launcher sit on the same side of the x = 0 plane. Physical
    // conflicts must come from crossing assignments only.
    let farm_side: Vec<f64> =
        case1.scenario.weapon_farms.iter().map(|f| f.position.x.signum()).collect();
    let target_side: Vec<f64> = (0..case1.pip_set.target_ids.len())
        .map(|t| {
            // target t's launcher: tracks are launcher-ordered in case 1
            case1.scenario.enemy_launchers[t].position.x.signum()
        })
        .collect();
    let own_side = |c: &CandidateId| farm_side[c.farm] == target_side[c.target];

    let mut both_own = 0;
    let mut with_crossing = 0;
    let mut both_crossing = 0;
    for (a, b) in &case1.table.physical {
        if a.farm == b.farm {
            continue;
        }
        match (own_side(a), own_side(b)) {
            (true, true) => both_own += 1,
            (false, false) => {
                both_crossing += 1;
                with_crossing += 1;
            }
            _ => with_crossing += 1,
        }
    }
    assert_eq!(both_own, 0, "own-side assignment pairs must not interfere physically");
    assert!(with_crossing > 0, "crossing assignments must produce physical conflicts");
    println!(
        "ACCEPTANCE 6 interference-structure: PASS (physical {:.3}%, seeker {:.3}%, ratio {:.0}x; {} crossing-involved physical pairs ({} fully crossing), 0 own-side)",
        100.0 * stats.physical_fraction,
        100.0 * stats.seeker_fraction,
        stats.seeker_fraction / stats.physical_fraction,
        with_crossing,
        both_crossing
    );
}

#[test]
fn criterion_7_with_without_ordering() {
    let mut lines = Vec::new();
    for (name, case, budget, prove) in [
        ("case 1", &*CASE1, Budget { max_nodes: Some(50_000_000), max_seconds: Some(540.0) }, true),
        ("case 2", &*CASE2, Budget::nodes(1_500_000), false),
    ] {
        let with_model = build_model(&case.pip_set, Some(&case.table), &case.scenario).unwrap();
        let with = solve_exact(&with_model, &budget);
        let without_model = build_model(&case.pip_set, None, &case.scenario).unwrap();
        let without = solve_exact(&without_model, &budget);

        assert!(
            with.objective >= without.objective,
            "{name}: objective with {} < without {}",
            with.objective,
            without.objective
        );
        assert!(
            with.weapons_assigned() <= without.weapons_assigned(),
            "{name}: weapons with {} > without {}",
            with.weapons_assigned(),
            without.weapons_assigned()
        );
        if prove {
            assert!(
                with.stats.proven_optimal || with.stats.gap <= 1.0,
                "{name}: interference solve neither proven nor within gap 1 (gap {})",
                with.stats.gap
            );
            assert!(without.stats.proven_optimal, "{name}: cap-only solve must prove");
        }
        lines.push(format!(
            "{name}: with {} weapons obj {} ({}), without {} weapons obj {}",
            with.weapons_assigned(),
            with.objective,
            if with.stats.proven_optimal { "optimal".into() } else { format!("gap {}", with.stats.gap) },
            without.weapons_assigned(),
            without.objective
        ));
    }
    println!("ACCEPTANCE 7 interference-ordering: PASS ({})", lines.join("; "));
}

#[test]
fn criterion_8_byte_identical_reruns() {
    let run = |dir: &std::path::Path| {
        let options = RunOptions {
            seed: 11,
            out_dir: dir.to_path_buf(),
            mode: RunMode::Compare,
            budget: Budget::nodes(2_000_000),
            table_include_all: false,
            dump_trajectories: false,
        };
        run_pipeline(&ScenarioSource::BuiltinCase(1), &options).unwrap();
    };
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run(dir_a.path());
    run(dir_b.path());

    let collect = |root: &std::path::Path| {
        let mut files = std::collections::BTreeMap::new();
        for entry in walkdir::WalkDir::new(root) {
            let entry = entry.unwrap();
            if entry.file_type().is_file() {
                let rel = entry.path().strip_prefix(root).unwrap().to_path_buf();
                files.insert(rel, std::fs::read(entry.path()).unwrap());
            }
        }
        files
    };
    let a = collect(dir_a.path());
    let b = collect(dir_b.path());
    assert_eq!(
        a.keys().collect::<Vec<_>>(),
        b.keys().collect::<Vec<_>>(),
        "directory layouts differ"
    );
    let mut bytes = 0usize;
    for (path, content) in &a {
        assert_eq!(content, &b[path], "file {} differs between runs", path.display());
        bytes += content.len();
    }
    println!(
        "ACCEPTANCE 8 determinism: PASS ({} files, {} bytes, byte-identical)",
        a.len(),
        bytes
    );
}
