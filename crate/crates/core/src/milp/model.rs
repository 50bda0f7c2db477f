//! Model construction, objective evaluation and the independent feasibility
//! checker.

use crate::interference::{CandidateId, InterferenceTable};
use crate::pip::PipSet;
use crate::scenario::Scenario;
use std::collections::BTreeMap;
use thiserror::Error;

/// One binary decision variable: a weapon from `id.farm` committed to PIP
/// `(id.target, id.pip)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub id: CandidateId,
    pub launch_time: f64,
    pub impact_time: f64,
}

/// Conflict-pair counts by origin, before deduplication.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConflictCounts {
    pub same_pip: usize,
    pub launch_delay: usize,
    pub interference: usize,
}

/// The assignment program.
///
/// `target_values` covers every scenario target, including targets without a
/// single feasible candidate (they still contribute their full value to the
/// objective).
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentModel {
    pub candidates: Vec<Candidate>,
    pub farm_ids: Vec<String>,
    pub target_ids: Vec<String>,
    /// log(v₀) per target.
    pub target_values: Vec<f64>,
    /// Objective decrement per assigned weapon, `-log(1 - γ)`.
    pub kill_decrement: f64,
    /// Per-target assignment cap n_t.
    pub max_per_target: u32,
    /// Per-farm magazine, `None` = unlimited.
    pub magazines: Vec<Option<u32>>,
    /// Minimum launch spacing per farm, seconds.
    pub farm_delays: Vec<f64>,
    /// Deduplicated conflict pairs as variable indices, `a < b`, sorted.
    pub conflicts: Vec<(u32, u32)>,
    pub conflict_counts: ConflictCounts,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("interference table references unknown candidates: {}", .0.join(", "))]
    UnknownCandidates(Vec<String>),
    #[error("per-target value floor violated: n_t * kill decrement = {decrement_total} exceeds value_log = {value_log}")]
    ValueFloor { value_log: f64, decrement_total: f64 },
}

impl AssignmentModel {
    /// Builds a model directly from parts; useful for synthetic instances.
    /// Launch-delay and same-PIP conflicts are derived from the candidates,
    /// `extra_conflicts` (interference) are merged in.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        candidates: Vec<Candidate>,
        farm_ids: Vec<String>,
        target_ids: Vec<String>,
        target_values: Vec<f64>,
        kill_decrement: f64,
        max_per_target: u32,
        magazines: Vec<Option<u32>>,
        farm_delays: Vec<f64>,
        extra_conflicts: &[(CandidateId, CandidateId)],
    ) -> Result<Self, ModelError> {
        assert_eq!(target_ids.len(), target_values.len());
        assert_eq!(farm_ids.len(), magazines.len());
        assert_eq!(farm_ids.len(), farm_delays.len());
        for value in &target_values {
            let decrement_total = max_per_target as f64 * kill_decrement;
            if *value < decrement_total {
                return Err(ModelError::ValueFloor { value_log: *value, decrement_total });
            }
        }
        let mut candidates = candidates;
        candidates.sort_by_key(|c| c.id);

        let index: BTreeMap<CandidateId, u32> =
            candidates.iter().enumerate().map(|(i, c)| (c.id, i as u32)).collect();
        assert_eq!(index.len(), candidates.len(), "duplicate candidate ids");

        let mut counts = ConflictCounts::default();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut push = |a: u32, b: u32| pairs.push(if a < b { (a, b) } else { (b, a) });

        for (i, a) in candidates.iter().enumerate() {
            for (j, b) in candidates.iter().enumerate().skip(i + 1) {
                if a.id.farm != b.id.farm {
                    if (a.id.target, a.id.pip) == (b.id.target, b.id.pip) {
                        counts.same_pip += 1;
                        push(i as u32, j as u32);
                    }
                } else if (a.launch_time - b.launch_time).abs()
                    < farm_delays[a.id.farm]
                {
                    counts.launch_delay += 1;
                    push(i as u32, j as u32);
                }
            }
        }

        let mut unknown = Vec::new();
        for (a, b) in extra_conflicts {
            match (index.get(a), index.get(b)) {
                (Some(&ia), Some(&ib)) => {
                    counts.interference += 1;
                    push(ia, ib);
                }
                _ => {
                    for id in [a, b] {
                        if !index.contains_key(id) {
                            unknown.push(id.to_string());
                        }
                    }
                }
            }
        }
        if !unknown.is_empty() {
            unknown.sort();
            unknown.dedup();
            return Err(ModelError::UnknownCandidates(unknown));
        }

        pairs.sort_unstable();
        pairs.dedup();

        Ok(AssignmentModel {
            candidates,
            farm_ids,
            target_ids,
            target_values,
            kill_decrement,
            max_per_target,
            magazines,
            farm_delays,
            conflicts: pairs,
            conflict_counts: counts,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.candidates.len()
    }

    pub fn num_targets(&self) -> usize {
        self.target_ids.len()
    }

    pub fn var_index(&self, id: &CandidateId) -> Option<u32> {
        self.candidates.binary_search_by_key(id, |c| c.id).ok().map(|i| i as u32)
    }

    /// Per-target assigned-weapon counts of a selection.
    pub fn target_counts(&self, selected: &[u32]) -> Vec<u32> {
        let mut counts = vec![0u32; self.num_targets()];
        for &v in selected {
            counts[self.candidates[v as usize].id.target] += 1;
        }
        counts
    }

    /// Objective of the empty selection, `Σ v_t + max v_t`.
    pub fn empty_objective(&self) -> f64 {
        evaluate_objective(self, &[])
    }
}

/// Remaining log value of one target after `count` assignments.
fn remaining(model: &AssignmentModel, target: usize, count: u32) -> f64 {
    let capped = count.min(model.max_per_target) as f64;
    (model.target_values[target] - model.kill_decrement * capped).max(0.0)
}

/// Objective of a selection: summed remaining log value plus its maximum over
/// targets. Pure; assumes the selection is feasible.
pub fn evaluate_objective(model: &AssignmentModel, selected: &[u32]) -> f64 {
    let counts = model.target_counts(selected);
    let mut total = 0.0;
    let mut worst = if model.num_targets() == 0 { 0.0 } else { f64::NEG_INFINITY };
    for (t, &count) in counts.iter().enumerate() {
        let s = remaining(model, t, count);
        total += s;
        worst = worst.max(s);
    }
    total + worst
}

/// Per-target remaining values and their maximum (the epigraph variable z at
/// optimality).
pub fn remaining_values(model: &AssignmentModel, selected: &[u32]) -> (Vec<f64>, f64) {
    let counts = model.target_counts(selected);
    let per_target: Vec<f64> =
        counts.iter().enumerate().map(|(t, &c)| remaining(model, t, c)).collect();
    let z = per_target.iter().copied().fold(0.0f64, f64::max);
    (per_target, z)
}

/// One violated constraint found by [`verify_selection`].
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct Violation(pub String);

/// Re-checks a selection against the model's raw constraint data, without any
/// solver state: duplicates, target caps, magazines, same-PIP exclusivity,
/// launch delays (recomputed from launch times) and conflict pairs.
pub fn verify_selection(model: &AssignmentModel, selected: &[u32]) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for &v in selected {
        if v as usize >= model.num_vars() {
            violations.push(Violation(format!("variable {v} out of range")));
            return violations;
        }
        if !seen.insert(v) {
            violations.push(Violation(format!("variable {v} selected twice")));
        }
    }

    for (t, &count) in model.target_counts(selected).iter().enumerate() {
        if count > model.max_per_target {
            violations.push(Violation(format!(
                "target {} assigned {count} weapons, cap {}",
                model.target_ids[t], model.max_per_target
            )));
        }
    }

    let mut per_farm: Vec<Vec<&Candidate>> = vec![Vec::new(); model.farm_ids.len()];
    for &v in selected {
        let c = &model.candidates[v as usize];
        per_farm[c.id.farm].push(c);
    }
    for (farm, picks) in per_farm.iter().enumerate() {
        if let Some(mag) = model.magazines[farm] {
            if picks.len() as u32 > mag {
                violations.push(Violation(format!(
                    "farm {} fires {} weapons, magazine {mag}",
                    model.farm_ids[farm],
                    picks.len()
                )));
            }
        }
        for (i, a) in picks.iter().enumerate() {
            for b in picks.iter().skip(i + 1) {
                if (a.launch_time - b.launch_time).abs() < model.farm_delays[farm] {
                    violations.push(Violation(format!(
                        "farm {} launches {} and {} only {:.3} s apart (delay {})",
                        model.farm_ids[farm],
                        a.id,
                        b.id,
                        (a.launch_time - b.launch_time).abs(),
                        model.farm_delays[farm]
                    )));
                }
            }
        }
    }

    let mut pips = std::collections::BTreeSet::new();
    for &v in selected {
        let id = model.candidates[v as usize].id;
        if !pips.insert((id.target, id.pip)) {
            violations.push(Violation(format!(
                "PIP t{}:p{} receives more than one weapon",
                id.target + 1,
                id.pip
            )));
        }
    }

    let chosen: std::collections::BTreeSet<u32> = selected.iter().copied().collect();
    for &(a, b) in &model.conflicts {
        if chosen.contains(&a) && chosen.contains(&b) {
            violations.push(Violation(format!(
                "conflict pair ({}, {}) both selected",
                model.candidates[a as usize].id, model.candidates[b as usize].id
            )));
        }
    }
    violations
}

/// Builds the assignment model from a PIP set and, optionally, an
/// interference table (omit it for the no-interference comparison runs).
pub fn build_model(
    pip_set: &PipSet,
    table: Option<&InterferenceTable>,
    scenario: &Scenario,
) -> Result<AssignmentModel, ModelError> {
    let candidates: Vec<Candidate> = pip_set
        .feasible_candidates()
        .map(|id| {
            let pip = pip_set.pip(id.target, id.pip);
            Candidate {
                id,
                launch_time: pip.farm_data[id.farm].launch_time.unwrap(),
                impact_time: pip.impact_time,
            }
        })
        .collect();

    let extra: Vec<(CandidateId, CandidateId)> =
        table.map(|t| t.all_pairs().into_iter().collect()).unwrap_or_default();

    AssignmentModel::from_parts(
        candidates,
        pip_set.farm_ids.clone(),
        pip_set.target_ids.clone(),
        vec![scenario.target_value_log; pip_set.target_ids.len()],
        1.0,
        scenario.max_weapons_per_target,
        scenario.weapon_farms.iter().map(|f| f.magazine).collect(),
        scenario.weapon_farms.iter().map(|f| f.launch_delay).collect(),
        &extra,
    )
}
