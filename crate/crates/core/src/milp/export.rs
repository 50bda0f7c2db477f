//! Model dump in the LP text interchange format, so third-party solvers can
//! cross-check the assignment program.
//!
//! The max term is linearized explicitly: per-target slack `s_t` carries the
//! remaining log value through `s_t + δ·Σθ = v_t`, and the epigraph variable
//! `z >= s_t` joins the objective.

use super::model::AssignmentModel;
use std::fmt::Write;

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

fn var_name(model: &AssignmentModel, v: usize) -> String {
    let c = &model.candidates[v];
    format!(
        "x_{}_{}_p{}",
        sanitize(&model.farm_ids[c.id.farm]),
        sanitize(&model.target_ids[c.id.target]),
        c.id.pip
    )
}

fn slack_name(model: &AssignmentModel, t: usize) -> String {
    format!("s_{}", sanitize(&model.target_ids[t]))
}

fn coeff(value: f64) -> String {
    if (value - 1.0).abs() < 1e-12 {
        String::new()
    } else {
        format!("{value} ")
    }
}

/// Renders the model as an LP-format string (minimize; binaries declared).
pub fn export_lp(model: &AssignmentModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ interference-constrained assignment model");
    let _ = writeln!(
        out,
        "\\ {} binary candidates, {} targets, {} conflict pairs",
        model.num_vars(),
        model.num_targets(),
        model.conflicts.len()
    );
    let _ = writeln!(out, "Minimize");
    let mut objective: Vec<String> =
        (0..model.num_targets()).map(|t| slack_name(model, t)).collect();
    objective.push("z".to_string());
    let _ = writeln!(out, " obj: {}", objective.join(" + "));

    let _ = writeln!(out, "Subject To");
    // Remaining-value definitions: s_t + δ Σ θ = v_t
    for t in 0..model.num_targets() {
        let mut terms = vec![slack_name(model, t)];
        for (v, c) in model.candidates.iter().enumerate() {
            if c.id.target == t {
                terms.push(format!("{}{}", coeff(model.kill_decrement), var_name(model, v)));
            }
        }
        let _ = writeln!(
            out,
            " value_{}: {} = {}",
            sanitize(&model.target_ids[t]),
            terms.join(" + "),
            model.target_values[t]
        );
    }
    // Epigraph: z >= s_t
    for t in 0..model.num_targets() {
        let _ = writeln!(
            out,
            " epi_{}: z - {} >= 0",
            sanitize(&model.target_ids[t]),
            slack_name(model, t)
        );
    }
    // Per-target caps
    for t in 0..model.num_targets() {
        let vars: Vec<String> = model
            .candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.id.target == t)
            .map(|(v, _)| var_name(model, v))
            .collect();
        if !vars.is_empty() {
            let _ = writeln!(
                out,
                " cap_{}: {} <= {}",
                sanitize(&model.target_ids[t]),
                vars.join(" + "),
                model.max_per_target
            );
        }
    }
    // Magazines
    for (w, magazine) in model.magazines.iter().enumerate() {
        let Some(magazine) = magazine else { continue };
        let vars: Vec<String> = model
            .candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.id.farm == w)
            .map(|(v, _)| var_name(model, v))
            .collect();
        if !vars.is_empty() {
            let _ = writeln!(
                out,
                " mag_{}: {} <= {}",
                sanitize(&model.farm_ids[w]),
                vars.join(" + "),
                magazine
            );
        }
    }
    // Conflict pairs (launch delay, shared PIP, interference)
    for (k, &(a, b)) in model.conflicts.iter().enumerate() {
        let _ = writeln!(
            out,
            " conf_{k}: {} + {} <= 1",
            var_name(model, a as usize),
            var_name(model, b as usize)
        );
    }

    let _ = writeln!(out, "Bounds");
    for t in 0..model.num_targets() {
        let _ = writeln!(out, " 0 <= {} <= {}", slack_name(model, t), model.target_values[t]);
    }
    let _ = writeln!(out, " z >= 0");

    if model.num_vars() > 0 {
        let _ = writeln!(out, "Binary");
        for v in 0..model.num_vars() {
            let _ = writeln!(out, " {}", var_name(model, v));
        }
    }
    let _ = writeln!(out, "End");
    out
}
