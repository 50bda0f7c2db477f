//! Artifact file writers. Tabular text is tab-separated with a header row;
//! floats print in Rust's shortest round-trip form so every value can be
//! parsed back bit-exactly.

use super::{RunOptions, RunReport, SolutionSummary};
use crate::interference::{heatmap, InterferenceKind, InterferenceTable};
use crate::milp::{export_lp, AssignmentModel, Solution};
use crate::pip::{EngagementStore, PipSet};
use crate::scenario::to_document_string;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io;

pub(super) fn write_all(
    options: &RunOptions,
    report: &RunReport,
    pip_set: &PipSet,
    store: &EngagementStore,
    table: Option<&InterferenceTable>,
    with_run: Option<&(AssignmentModel, Solution)>,
    without_run: Option<&(AssignmentModel, Solution)>,
) -> io::Result<()> {
    let out = &options.out_dir;
    fs::create_dir_all(out)?;

    fs::write(out.join("scenario.snapshot"), to_document_string(&report.scenario))?;
    fs::write(out.join("pips.tsv"), pips_tsv(pip_set))?;

    if let Some(table) = table {
        fs::write(out.join("interference.pairs.tsv"), pairs_tsv(table, pip_set))?;
        for kind in [InterferenceKind::Physical, InterferenceKind::Seeker] {
            for fa in 0..pip_set.farm_ids.len() {
                for fb in fa..pip_set.farm_ids.len() {
                    let name = format!(
                        "heatmap_{}_{}_{}.tsv",
                        kind.as_str(),
                        pip_set.farm_ids[fa],
                        pip_set.farm_ids[fb]
                    );
                    fs::write(out.join(name), heatmap_tsv(table, pip_set, kind, fa, fb))?;
                }
            }
        }
    }

    if options.dump_trajectories {
        let dir = out.join("trajectories");
        fs::create_dir_all(&dir)?;
        for (id, flight) in &store.flights {
            let name = format!(
                "{}_{}_p{}.tsv",
                pip_set.farm_ids[id.farm], pip_set.target_ids[id.target], id.pip
            );
            fs::write(dir.join(name), trajectory_tsv(flight))?;
        }
    }

    // Per-mode artifacts: at the root for single-mode runs, in with/ and
    // without/ subdirectories for compare runs.
    let compare = with_run.is_some() && without_run.is_some();
    let write_mode = |run: &(AssignmentModel, Solution), sub: &str| -> io::Result<()> {
        let dir = if compare { out.join(sub) } else { out.clone() };
        fs::create_dir_all(&dir)?;
        let (model, solution) = run;
        fs::write(dir.join("model.lp-text"), export_lp(model))?;
        fs::write(dir.join("solution.tsv"), solution_tsv(model, solution))?;
        fs::write(dir.join("schedule.tsv"), emit_schedule_plot_data(solution, pip_set))?;
        Ok(())
    };
    if let Some(run) = with_run {
        write_mode(run, "with")?;
    }
    if let Some(run) = without_run {
        write_mode(run, "without")?;
    }

    fs::write(out.join("report.toml"), report_toml(report))?;
    Ok(())
}

fn pips_tsv(pip_set: &PipSet) -> String {
    let mut out = String::from("target_id\ti\tx\ty\tz\timpact_time");
    for farm in &pip_set.farm_ids {
        let _ = write!(out, "\tfeasible_{farm}\tlaunch_time_{farm}\ttof_{farm}");
    }
    out.push('\n');
    for pip in &pip_set.pips {
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            pip.target_id, pip.index, pip.position.x, pip.position.y, pip.position.z,
            pip.impact_time
        );
        for data in &pip.farm_data {
            let _ = write!(
                out,
                "\t{}\t{}\t{}",
                data.feasible as u8,
                data.launch_time.unwrap_or(f64::NAN),
                data.time_of_flight.unwrap_or(f64::NAN)
            );
        }
        out.push('\n');
    }
    out
}

fn pairs_tsv(table: &InterferenceTable, pip_set: &PipSet) -> String {
    let mut out = String::from("kind\tfarm_a\ttarget_a\ti_a\tfarm_b\ttarget_b\ti_b\n");
    for (kind, set) in
        [(InterferenceKind::Physical, &table.physical), (InterferenceKind::Seeker, &table.seeker)]
    {
        for (a, b) in set {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                kind.as_str(),
                pip_set.farm_ids[a.farm],
                pip_set.target_ids[a.target],
                a.pip,
                pip_set.farm_ids[b.farm],
                pip_set.target_ids[b.target],
                b.pip
            );
        }
    }
    out
}

fn heatmap_tsv(
    table: &InterferenceTable,
    pip_set: &PipSet,
    kind: InterferenceKind,
    farm_a: usize,
    farm_b: usize,
) -> String {
    let matrix = heatmap(table, pip_set, kind, farm_a, farm_b);
    let mut out = String::with_capacity(matrix.len() * (matrix.len() * 2 + 1));
    for row in matrix {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join("\t"));
    }
    out
}

fn trajectory_tsv(flight: &crate::pip::CandidateFlight) -> String {
    let mut out = String::from("t\tx\ty\tz\tVx\tVy\tVz\n");
    for state in flight.trajectory.states() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            state.time + flight.launch_time,
            state.position.x,
            state.position.y,
            state.position.z,
            state.velocity.x,
            state.velocity.y,
            state.velocity.z
        );
    }
    out
}

fn solution_tsv(model: &AssignmentModel, solution: &Solution) -> String {
    let mut rows: Vec<&crate::milp::Candidate> = solution
        .selected_vars
        .iter()
        .map(|&v| &model.candidates[v as usize])
        .collect();
    rows.sort_by(|a, b| (a.id.farm, a.launch_time).partial_cmp(&(b.id.farm, b.launch_time)).unwrap());
    let mut out = String::from("farm\ttarget\tpip\tlaunch_time\timpact_time\n");
    for c in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            model.farm_ids[c.id.farm],
            model.target_ids[c.id.target],
            c.id.pip,
            c.launch_time,
            c.impact_time
        );
    }
    out
}

/// Plot data behind the launch-schedule figure: one `interval` row per
/// (farm, target) pair with feasible candidates (the span of feasible launch
/// times) and one `dot` row per selected assignment.
pub fn emit_schedule_plot_data(solution: &Solution, pip_set: &PipSet) -> String {
    let mut out = String::from("kind\tfarm\ttarget\tpip\tlaunch_min\tlaunch_max\n");
    for farm in 0..pip_set.farm_ids.len() {
        for target in 0..pip_set.target_ids.len() {
            if let Some((lo, hi)) = pip_set.launch_window(farm, target) {
                let _ = writeln!(
                    out,
                    "interval\t{}\t{}\t-\t{}\t{}",
                    pip_set.farm_ids[farm], pip_set.target_ids[target], lo, hi
                );
            }
        }
    }
    for id in &solution.selected {
        let launch = pip_set.launch_time(id).unwrap();
        let _ = writeln!(
            out,
            "dot\t{}\t{}\t{}\t{}\t{}",
            pip_set.farm_ids[id.farm], pip_set.target_ids[id.target], id.pip, launch, launch
        );
    }
    out
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    schema_version: u32,
    scenario: ScenarioSection,
    pips: PipSection,
    warnings: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    interference: Option<InterferenceSection>,
    solutions: Vec<&'a SolutionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<CompareSection>,
}

#[derive(Serialize)]
struct ScenarioSection {
    seed: u64,
    launchers: usize,
    farms: usize,
    targets: usize,
    pips_per_target: usize,
    max_weapons_per_target: u32,
    defender_launch_delay: f64,
}

#[derive(Serialize)]
struct PipSection {
    total: usize,
    feasible_candidates: usize,
    min_spacing: f64,
    max_launch_window: f64,
}

#[derive(Serialize)]
struct InterferenceSection {
    candidates: usize,
    evaluated_pairs: u64,
    skipped_delay_pairs: u64,
    physical_pairs: u64,
    seeker_pairs: u64,
    physical_fraction: f64,
    seeker_fraction: f64,
}

#[derive(Serialize)]
struct CompareSection {
    objective_with: f64,
    objective_without: f64,
    weapons_with: usize,
    weapons_without: usize,
    /// Conflicts only restrict the feasible set: objective must not drop and
    /// the assignment count must not grow.
    restriction_consistent: bool,
}

fn report_toml(report: &RunReport) -> String {
    let compare = match (&report.with_interference, &report.without_interference) {
        (Some(w), Some(wo)) => Some(CompareSection {
            objective_with: w.objective,
            objective_without: wo.objective,
            weapons_with: w.weapons_assigned,
            weapons_without: wo.weapons_assigned,
            restriction_consistent: w.objective >= wo.objective
                && w.weapons_assigned <= wo.weapons_assigned,
        }),
        _ => None,
    };
    let doc = ReportDoc {
        schema_version: 1,
        scenario: ScenarioSection {
            seed: report.seed,
            launchers: report.scenario.enemy_launchers.len(),
            farms: report.scenario.weapon_farms.len(),
            targets: report.target_count,
            pips_per_target: report.scenario.pips_per_target,
            max_weapons_per_target: report.scenario.max_weapons_per_target,
            defender_launch_delay: report.scenario.defender_launch_delay,
        },
        pips: PipSection {
            total: report.pip_count,
            feasible_candidates: report.feasible_candidates,
            min_spacing: report.min_pip_spacing,
            max_launch_window: report.max_launch_window,
        },
        warnings: &report.warnings,
        interference: report.interference.map(|s| InterferenceSection {
            candidates: s.candidate_count,
            evaluated_pairs: s.evaluated_pairs,
            skipped_delay_pairs: s.skipped_delay_pairs,
            physical_pairs: s.physical_count,
            seeker_pairs: s.seeker_count,
            physical_fraction: s.physical_fraction,
            seeker_fraction: s.seeker_fraction,
        }),
        solutions: report
            .with_interference
            .iter()
            .chain(report.without_interference.iter())
            .collect(),
        compare,
    };
    toml::to_string_pretty(&doc).expect("report serialization cannot fail")
}
