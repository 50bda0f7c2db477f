//! Command-line front end: runs the planning pipeline from a scenario file or
//! a built-in case and writes all stage artifacts to the output directory.

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use wta_core::milp::Budget;
use wta_core::pipeline::{
    run_pipeline, PipelineError, RunMode, RunOptions, RunReport, ScenarioSource,
};

#[derive(Debug, Parser)]
#[command(
    name = "wta",
    version,
    about = "Interceptor-to-PIP assignment planning with interference deconfliction"
)]
struct Args {
    /// Scenario document (TOML). Mutually exclusive with --builtin-case.
    #[arg(long, value_name = "PATH", conflicts_with = "builtin_case")]
    scenario: Option<PathBuf>,

    /// Built-in W-formation scenario: 1 (single wave) or 2 (two waves).
    #[arg(long, value_name = "1|2")]
    builtin_case: Option<u32>,

    /// Skip the interference table; solve with caps and launch delays only.
    #[arg(long, conflicts_with = "compare")]
    no_interference: bool,

    /// Solve both with and without interference constraints and report both.
    #[arg(long)]
    compare: bool,

    /// Seed for the stochastic stages (target impact-point offsets).
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory for all artifacts.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Solver budget as NODES,SECONDS; either side may be left empty
    /// (e.g. "5000000,600", "5000000," or ",120").
    #[arg(long, value_name = "NODES,SECONDS")]
    solver_budget: Option<String>,

    /// Keep same-farm pairs already excluded by the launch delay in the
    /// interference table (full-table exports).
    #[arg(long)]
    table_include_all: bool,

    /// Write per-engagement trajectory dumps under trajectories/.
    #[arg(long)]
    dump_trajectories: bool,
}

fn parse_budget(text: &str) -> Result<Budget> {
    let (nodes, seconds) = match text.split_once(',') {
        Some((n, s)) => (n.trim(), s.trim()),
        None => (text.trim(), ""),
    };
    let max_nodes = if nodes.is_empty() {
        None
    } else {
        Some(nodes.parse::<u64>().with_context(|| format!("bad node budget {nodes:?}"))?)
    };
    let max_seconds = if seconds.is_empty() {
        None
    } else {
        Some(seconds.parse::<f64>().with_context(|| format!("bad time budget {seconds:?}"))?)
    };
    Ok(Budget { max_nodes, max_seconds })
}

fn run(args: Args) -> Result<RunReport> {
    let source = match (&args.scenario, args.builtin_case) {
        (Some(path), None) => ScenarioSource::File(path.clone()),
        (None, Some(case)) => ScenarioSource::BuiltinCase(case),
        (None, None) => bail!("one of --scenario or --builtin-case is required"),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    let mode = if args.compare {
        RunMode::Compare
    } else if args.no_interference {
        RunMode::NoInterference
    } else {
        RunMode::WithInterference
    };
    let budget = match &args.solver_budget {
        Some(text) => parse_budget(text)?,
        None => Budget::default(),
    };
    let options = RunOptions {
        seed: args.seed,
        out_dir: args.out.clone(),
        mode,
        budget,
        table_include_all: args.table_include_all,
        dump_trajectories: args.dump_trajectories,
    };
    run_pipeline(&source, &options).map_err(|e| anyhow!(e))
}

fn print_report(report: &RunReport, out: &std::path::Path) {
    println!(
        "scenario: {} launchers, {} farms, {} targets (seed {})",
        report.scenario.enemy_launchers.len(),
        report.scenario.weapon_farms.len(),
        report.target_count,
        report.seed
    );
    println!(
        "pips: {} total, {} feasible (farm, pip) candidates, min spacing {:.1} m",
        report.pip_count, report.feasible_candidates, report.min_pip_spacing
    );
    if let Some(stats) = &report.interference {
        println!(
            "interference: {} physical ({:.2}%), {} seeker ({:.2}%) of {} pairs ({} delay-excluded)",
            stats.physical_count,
            100.0 * stats.physical_fraction,
            stats.seeker_count,
            100.0 * stats.seeker_fraction,
            stats.evaluated_pairs,
            stats.skipped_delay_pairs
        );
    }
    for summary in report.with_interference.iter().chain(report.without_interference.iter()) {
        let status = if summary.proven_optimal {
            "optimal".to_string()
        } else {
            format!("gap {:.3}", summary.gap)
        };
        println!(
            "solution [{}]: {} weapons, objective {} ({status}, {} nodes, {} vars, {} conflicts)",
            summary.mode,
            summary.weapons_assigned,
            summary.objective,
            summary.nodes,
            summary.variables,
            summary.conflict_pairs
        );
    }
    for warning in &report.warnings {
        println!("warning: {warning}");
    }
    let t = &report.timings;
    println!(
        "timings: tracks {:.2}s, pips {:.2}s, interference {:.2}s, solve {:.2}s, write {:.2}s, total {:.2}s",
        t.tracks, t.pips, t.interference, t.solve, t.write, t.total
    );
    println!("artifacts: {}", out.display());
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out = args.out.clone();
    match run(args) {
        Ok(report) => {
            print_report(&report, &out);
            ExitCode::SUCCESS
        }
        Err(error) => {
            eprintln!("error: {error:#}");
            // Validation problems get a distinct exit code.
            let validation = error
                .downcast_ref::<PipelineError>()
                .map(|e| matches!(e, PipelineError::Scenario(_)))
                .unwrap_or(false);
            ExitCode::from(if validation { 2 } else { 1 })
        }
    }
}
