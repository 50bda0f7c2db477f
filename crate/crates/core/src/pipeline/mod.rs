//! End-to-end pipeline: scenario → tracks → PIP set → interference table →
//! assignment model → solution, with every stage output written to a fixed,
//! versioned output-directory layout.
//!
//! Layout (v1):
//!
//! ```text
//! out/
//!   scenario.snapshot        # reloadable scenario document
//!   pips.tsv                 # PIP set with per-farm launch data
//!   interference.pairs.tsv   # sparse conflict pair list (unless skipped)
//!   heatmap_<kind>_<fa>_<fb>.tsv
//!   trajectories/            # per-engagement dumps (opt-in)
//!   model.lp-text            # assignment program, LP interchange text
//!   solution.tsv             # selected assignments
//!   schedule.tsv             # launch windows + launch dots (plot data)
//!   report.toml              # machine-readable run report
//! ```
//!
//! In compare mode the solver stage runs twice (with and without the
//! interference conflicts) and the per-mode files move into `with/` and
//! `without/` subdirectories.
//!
//! Stage timings are returned in the [`RunReport`] and printed by the CLI but
//! never written into the output directory, so two identical seeded runs
//! produce byte-identical directories.

mod artifacts;

pub use artifacts::emit_schedule_plot_data;

use crate::interference::{build_interference_table, interference_stats, InterferenceStats};
use crate::milp::{
    build_model, evaluate_objective, solve_exact, verify_selection, AssignmentModel, Budget,
    ModelError, Solution,
};
use crate::pip::{build_pip_set, PipBuild, PipError};
use crate::scenario::{
    build_w_formation_scenario, load_scenario_file, Scenario, ScenarioError, TrackError,
};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

/// Where the scenario comes from.
#[derive(Debug, Clone)]
pub enum ScenarioSource {
    BuiltinCase(u32),
    File(PathBuf),
    Value(Box<Scenario>),
}

/// Which solver runs the pipeline performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    WithInterference,
    NoInterference,
    /// Solve both and report the pair.
    Compare,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub mode: RunMode,
    pub budget: Budget,
    /// Keep same-farm pairs already excluded by the launch delay in the
    /// interference table (full-table exports).
    pub table_include_all: bool,
    pub dump_trajectories: bool,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunOptions {
            seed: 0,
            out_dir: out_dir.into(),
            mode: RunMode::WithInterference,
            budget: Budget::default(),
            table_include_all: false,
            dump_trajectories: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("scenario stage: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("track stage: {0}")]
    Tracks(#[from] TrackError),
    #[error("pip stage: {0}")]
    Pips(#[from] PipError),
    #[error("model stage: {0}")]
    Model(#[from] ModelError),
    #[error("report stage: {0}")]
    Io(#[from] std::io::Error),
    #[error("builtin scenario: {0}")]
    BuiltinCase(#[from] crate::scenario::UnknownCase),
}

/// Summary of one solver run.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionSummary {
    pub mode: String,
    pub variables: usize,
    pub conflict_pairs: usize,
    pub weapons_assigned: usize,
    pub objective: f64,
    pub max_remaining: f64,
    pub proven_optimal: bool,
    pub gap: f64,
    pub nodes: u64,
    /// Weapons fired per farm, scenario farm order.
    pub farm_counts: Vec<usize>,
}

impl SolutionSummary {
    fn new(mode: &str, model: &AssignmentModel, solution: &Solution) -> Self {
        let mut farm_counts = vec![0usize; model.farm_ids.len()];
        for id in &solution.selected {
            farm_counts[id.farm] += 1;
        }
        SolutionSummary {
            mode: mode.to_string(),
            variables: model.num_vars(),
            conflict_pairs: model.conflicts.len(),
            weapons_assigned: solution.weapons_assigned(),
            objective: solution.objective,
            max_remaining: solution.max_remaining,
            proven_optimal: solution.stats.proven_optimal,
            gap: solution.stats.gap,
            nodes: solution.stats.nodes,
            farm_counts,
        }
    }
}

/// Wall-clock seconds per stage; informational only (stdout, never files).
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    pub tracks: f64,
    pub pips: f64,
    pub interference: f64,
    pub solve: f64,
    pub write: f64,
    pub total: f64,
}

/// Everything a run produced, plus the in-memory artifacts for callers that
/// keep processing (tests, comparisons).
#[derive(Debug)]
pub struct RunReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub target_count: usize,
    pub pip_count: usize,
    pub feasible_candidates: usize,
    pub min_pip_spacing: f64,
    /// Widest feasible launch window over (farm, target) pairs.
    pub max_launch_window: f64,
    pub warnings: Vec<String>,
    pub interference: Option<InterferenceStats>,
    pub with_interference: Option<SolutionSummary>,
    pub without_interference: Option<SolutionSummary>,
    pub timings: StageTimings,
}

impl RunReport {
    /// The solution summary of a single-mode run.
    pub fn primary_solution(&self) -> &SolutionSummary {
        self.with_interference
            .as_ref()
            .or(self.without_interference.as_ref())
            .expect("a run always solves at least one model")
    }
}

fn resolve_scenario(source: &ScenarioSource) -> Result<Scenario, PipelineError> {
    match source {
        ScenarioSource::BuiltinCase(case) => Ok(build_w_formation_scenario(*case)?),
        ScenarioSource::File(path) => Ok(load_scenario_file(path)?),
        ScenarioSource::Value(s) => {
            s.validate().map_err(ScenarioError::Invalid)?;
            Ok((**s).clone())
        }
    }
}

/// Runs the full pipeline and writes all artifacts under `options.out_dir`.
///
/// The `--no-interference` mode skips table construction entirely; compare
/// mode solves the model twice, with and without the conflict pairs.
pub fn run_pipeline(
    source: &ScenarioSource,
    options: &RunOptions,
) -> Result<RunReport, PipelineError> {
    let t_start = Instant::now();
    let mut timings = StageTimings::default();
    let scenario = resolve_scenario(source)?;

    let t = Instant::now();
    let tracks = crate::scenario::generate_target_tracks(&scenario, options.seed)?;
    timings.tracks = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let PipBuild { pip_set, store } = build_pip_set(&scenario, &tracks)?;
    timings.pips = t.elapsed().as_secs_f64();

    let mut warnings = pip_set.spacing_warnings.clone();
    let mut max_launch_window = 0.0f64;
    for farm in 0..pip_set.farm_ids.len() {
        for target in 0..pip_set.target_ids.len() {
            if let Some((lo, hi)) = pip_set.launch_window(farm, target) {
                max_launch_window = max_launch_window.max(hi - lo);
            }
        }
    }
    if max_launch_window > 6.0 {
        warnings.push(format!(
            "widest (farm, target) launch window is {max_launch_window:.1} s (> 6 s)"
        ));
    }

    let t = Instant::now();
    let table = match options.mode {
        RunMode::NoInterference => None,
        _ => Some(build_interference_table(
            &pip_set,
            &store,
            &scenario,
            options.table_include_all,
        )),
    };
    timings.interference = t.elapsed().as_secs_f64();
    let stats = table.as_ref().map(interference_stats);

    let t = Instant::now();
    let solve_one = |with_table: bool| -> Result<(AssignmentModel, Solution), PipelineError> {
        let model = build_model(&pip_set, if with_table { table.as_ref() } else { None }, &scenario)?;
        let solution = solve_exact(&model, &options.budget);
        let violations = verify_selection(&model, &solution.selected_vars);
        assert!(violations.is_empty(), "solver returned an infeasible selection: {violations:?}");
        let recomputed = evaluate_objective(&model, &solution.selected_vars);
        assert_eq!(solution.objective, recomputed, "objective recomputation mismatch");
        Ok((model, solution))
    };

    let mut with_run = None;
    let mut without_run = None;
    match options.mode {
        RunMode::WithInterference => with_run = Some(solve_one(true)?),
        RunMode::NoInterference => without_run = Some(solve_one(false)?),
        RunMode::Compare => {
            with_run = Some(solve_one(true)?);
            without_run = Some(solve_one(false)?);
        }
    }
    timings.solve = t.elapsed().as_secs_f64();

    let with_interference = with_run
        .as_ref()
        .map(|(m, s)| SolutionSummary::new("with_interference", m, s));
    let without_interference = without_run
        .as_ref()
        .map(|(m, s)| SolutionSummary::new("without_interference", m, s));

    let report = RunReport {
        seed: options.seed,
        target_count: tracks.len(),
        pip_count: pip_set.len(),
        feasible_candidates: store.flights.len(),
        min_pip_spacing: pip_set.spacings.iter().copied().fold(f64::INFINITY, f64::min),
        max_launch_window,
        warnings,
        interference: stats,
        with_interference,
        without_interference,
        timings,
        scenario,
    };

    let t = Instant::now();
    artifacts::write_all(
        options,
        &report,
        &pip_set,
        &store,
        table.as_ref(),
        with_run.as_ref(),
        without_run.as_ref(),
    )?;
    let mut report = report;
    report.timings.write = t.elapsed().as_secs_f64();
    report.timings.total = t_start.elapsed().as_secs_f64();
    Ok(report)
}
