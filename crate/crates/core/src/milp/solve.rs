//! Exact best-first branch and bound over the binary assignment variables,
//! plus the exhaustive enumeration oracle used to validate it.
//!
//! The relaxation bound at a node counts the weapons still assignable while
//! ignoring pairwise conflicts but respecting the target/magazine caps and a
//! clique cover of the conflict graph (each clique admits at most one
//! selection), added to the lower bound of the max term. Fixing a variable to
//! 1 propagates 0 to all its conflict partners and to saturated cap groups.
//! Ties between equal-objective solutions are broken toward more assigned
//! weapons, then by first discovery in the (deterministic) search order.

use super::model::{evaluate_objective, remaining_values, AssignmentModel};
use crate::interference::CandidateId;
use std::collections::BinaryHeap;
use std::time::Instant;

/// Node and wall-clock limits for one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: Some(5_000_000), max_seconds: Some(600.0) }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { max_nodes: None, max_seconds: None }
    }

    pub fn nodes(n: u64) -> Self {
        Budget { max_nodes: Some(n), max_seconds: None }
    }
}

/// Search statistics of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    /// Nodes expanded.
    pub nodes: u64,
    /// Wall time (informational; excluded from deterministic artifacts).
    pub wall_seconds: f64,
    pub proven_optimal: bool,
    /// `objective - best outstanding bound`; 0 when proven.
    pub gap: f64,
    pub best_bound: f64,
}

/// A solved assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Selected candidates, ascending by id.
    pub selected: Vec<CandidateId>,
    /// Same selection as variable indices into the model.
    pub selected_vars: Vec<u32>,
    pub objective: f64,
    /// Value of the epigraph variable at optimality: max remaining log value.
    pub max_remaining: f64,
    pub per_target_remaining: Vec<f64>,
    pub stats: SolveStats,
}

impl Solution {
    fn new(model: &AssignmentModel, mut vars: Vec<u32>, stats: SolveStats) -> Self {
        vars.sort_unstable();
        let (per_target_remaining, max_remaining) = remaining_values(model, &vars);
        Solution {
            objective: evaluate_objective(model, &vars),
            selected: vars.iter().map(|&v| model.candidates[v as usize].id).collect(),
            selected_vars: vars,
            max_remaining,
            per_target_remaining,
            stats,
        }
    }

    pub fn weapons_assigned(&self) -> usize {
        self.selected.len()
    }
}

const EPS: f64 = 1e-9;

/// Fixed-width bitset.
#[derive(Debug, Clone, PartialEq)]
struct Bits(Box<[u64]>);

impl Bits {
    fn zeros(blocks: usize) -> Self {
        Bits(vec![0u64; blocks].into_boxed_slice())
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1u64 << (i % 64)) != 0
    }

    fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= *b;
        }
    }

    fn for_each<F: FnMut(usize)>(&self, mut f: F) {
        for (b, &word) in self.0.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let i = w.trailing_zeros() as usize;
                f(b * 64 + i);
                w &= w - 1;
            }
        }
    }
}

struct Node {
    fixed1: Bits,
    fixed0: Bits,
    bound: f64,
    /// Admissible upper bound on total assignments in this subtree.
    ub_n: u32,
    seq: u64,
}

struct HeapEntry(Node);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.seq == other.0.seq
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; invert for best-first (lowest bound, then
        // earliest push).
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

struct Searcher<'a> {
    model: &'a AssignmentModel,
    n: usize,
    blocks: usize,
    adj: Vec<Bits>,
    degree: Vec<u32>,
    var_target: Vec<usize>,
    var_farm: Vec<usize>,
    target_masks: Vec<Bits>,
    farm_masks: Vec<Bits>,
    clique_of: Vec<u32>,
    n_cliques: usize,
    sum_values: f64,
}

impl<'a> Searcher<'a> {
    fn new(model: &'a AssignmentModel) -> Self {
        let n = model.num_vars();
        let blocks = n.div_ceil(64).max(1);
        let mut adj = vec![Bits::zeros(blocks); n];
        let mut degree = vec![0u32; n];
        for &(a, b) in &model.conflicts {
            adj[a as usize].set(b as usize);
            adj[b as usize].set(a as usize);
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let var_target: Vec<usize> = model.candidates.iter().map(|c| c.id.target).collect();
        let var_farm: Vec<usize> = model.candidates.iter().map(|c| c.id.farm).collect();
        let mut target_masks = vec![Bits::zeros(blocks); model.num_targets()];
        let mut farm_masks = vec![Bits::zeros(blocks); model.farm_ids.len()];
        for v in 0..n {
            target_masks[var_target[v]].set(v);
            farm_masks[var_farm[v]].set(v);
        }

        // Greedy clique cover in decreasing-degree order: a vertex joins the
        // first clique it conflicts with entirely (tracked as the AND of the
        // members' adjacency rows).
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(degree[v]), v));
        let mut clique_of = vec![0u32; n];
        let mut clique_masks: Vec<Bits> = Vec::new();
        for &v in &order {
            let mut placed = false;
            for (c, mask) in clique_masks.iter_mut().enumerate() {
                if mask.get(v) {
                    for (m, a) in mask.0.iter_mut().zip(adj[v].0.iter()) {
                        *m &= *a;
                    }
                    clique_of[v] = c as u32;
                    placed = true;
                    break;
                }
            }
            if !placed {
                clique_of[v] = clique_masks.len() as u32;
                clique_masks.push(adj[v].clone());
            }
        }

        Searcher {
            model,
            n,
            blocks,
            adj,
            degree,
            var_target,
            var_farm,
            target_masks,
            farm_masks,
            clique_of,
            n_cliques: clique_masks.len().max(1),
            sum_values: model.target_values.iter().sum(),
        }
    }

    fn free_bits(&self, node_fixed1: &Bits, node_fixed0: &Bits) -> Bits {
        let mut free = Bits::zeros(self.blocks);
        for b in 0..self.blocks {
            free.0[b] = !(node_fixed1.0[b] | node_fixed0.0[b]);
        }
        // mask the tail beyond n
        let tail = self.n % 64;
        if tail != 0 {
            free.0[self.blocks - 1] &= (1u64 << tail) - 1;
        }
        if self.n == 0 {
            free.0[0] = 0;
        }
        free
    }

    /// Admissible lower bound on the objective and upper bound on the total
    /// assignment count for any completion of the node.
    fn bound(&self, fixed1: &Bits, fixed0: &Bits) -> (f64, u32) {
        let model = self.model;
        let n_t = model.max_per_target;
        let delta = model.kill_decrement;

        let mut count1 = vec![0u32; model.num_targets()];
        let mut farm1 = vec![0u32; model.farm_ids.len()];
        let mut n1 = 0u32;
        fixed1.for_each(|v| {
            count1[self.var_target[v]] += 1;
            farm1[self.var_farm[v]] += 1;
            n1 += 1;
        });

        let free = self.free_bits(fixed1, fixed0);
        let mut free_t = vec![0u32; model.num_targets()];
        let mut free_f = vec![0u32; model.farm_ids.len()];
        let mut clique_seen = vec![false; self.n_cliques];
        let mut free_cliques = 0u32;
        free.for_each(|v| {
            free_t[self.var_target[v]] += 1;
            free_f[self.var_farm[v]] += 1;
            let c = self.clique_of[v] as usize;
            if !clique_seen[c] {
                clique_seen[c] = true;
                free_cliques += 1;
            }
        });

        let ub_targets: u32 =
            (0..model.num_targets()).map(|t| n_t.saturating_sub(count1[t]).min(free_t[t])).sum();
        let ub_farms: u32 = (0..model.farm_ids.len())
            .map(|w| match model.magazines[w] {
                Some(m) => m.saturating_sub(farm1[w]).min(free_f[w]),
                None => free_f[w],
            })
            .sum();
        let ub_n = n1 + ub_targets.min(ub_farms).min(free_cliques);

        let sigma_lb = self.sum_values - delta * ub_n as f64;
        let mut max_lb = if model.num_targets() == 0 { 0.0 } else { f64::NEG_INFINITY };
        for t in 0..model.num_targets() {
            let reachable = (count1[t] + free_t[t]).min(n_t);
            max_lb = max_lb.max((model.target_values[t] - delta * reachable as f64).max(0.0));
        }
        (sigma_lb + max_lb, ub_n)
    }

    /// Fixes `v` to 1 on top of the parent state: conflict partners drop to 0
    /// and newly saturated cap groups are zeroed out.
    fn apply_one(&self, fixed1: &mut Bits, fixed0: &mut Bits, v: usize) {
        fixed1.set(v);
        fixed0.or_assign(&self.adj[v]);

        let t = self.var_target[v];
        let mut count_t = 0;
        fixed1.for_each(|u| {
            if self.var_target[u] == t {
                count_t += 1;
            }
        });
        if count_t >= self.model.max_per_target {
            for b in 0..self.blocks {
                fixed0.0[b] |= self.target_masks[t].0[b] & !fixed1.0[b];
            }
        }

        let w = self.var_farm[v];
        if let Some(mag) = self.model.magazines[w] {
            let mut count_w = 0;
            fixed1.for_each(|u| {
                if self.var_farm[u] == w {
                    count_w += 1;
                }
            });
            if count_w >= mag {
                for b in 0..self.blocks {
                    fixed0.0[b] |= self.farm_masks[w].0[b] & !fixed1.0[b];
                }
            }
        }
    }

    /// Deterministic greedy incumbent: round-robin over targets, each round
    /// adding one compatible candidate per uncovered-capacity target,
    /// preferring low-conflict candidates.
    fn greedy(&self) -> Vec<u32> {
        let model = self.model;
        let mut by_target: Vec<Vec<usize>> = vec![Vec::new(); model.num_targets()];
        for v in 0..self.n {
            by_target[self.var_target[v]].push(v);
        }
        for list in &mut by_target {
            list.sort_by_key(|&v| (self.degree[v], v));
        }

        let mut selected: Vec<u32> = Vec::new();
        let mut blocked = Bits::zeros(self.blocks);
        let mut taken = Bits::zeros(self.blocks);
        let mut count_t = vec![0u32; model.num_targets()];
        let mut count_f = vec![0u32; model.farm_ids.len()];
        loop {
            let mut progress = false;
            for t in 0..model.num_targets() {
                if count_t[t] >= model.max_per_target {
                    continue;
                }
                let pick = by_target[t].iter().copied().find(|&v| {
                    if taken.get(v) || blocked.get(v) {
                        return false;
                    }
                    match model.magazines[self.var_farm[v]] {
                        Some(m) => count_f[self.var_farm[v]] < m,
                        None => true,
                    }
                });
                if let Some(v) = pick {
                    taken.set(v);
                    blocked.or_assign(&self.adj[v]);
                    count_t[t] += 1;
                    count_f[self.var_farm[v]] += 1;
                    selected.push(v as u32);
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        selected.sort_unstable();
        selected
    }
}

/// Incumbent preference: lower objective, then more weapons assigned.
fn improves(obj: f64, count: u32, inc_obj: f64, inc_count: u32) -> bool {
    obj < inc_obj - EPS || ((obj - inc_obj).abs() <= EPS && count > inc_count)
}

/// Exact best-first branch and bound.
///
/// Returns the proven optimum, or the best incumbent with a bound gap when
/// the budget runs out first. Deterministic for any fixed budget expressed in
/// nodes.
pub fn solve_exact(model: &AssignmentModel, budget: &Budget) -> Solution {
    let start = Instant::now();
    let searcher = Searcher::new(model);

    // Greedy warm start; the all-zeros selection is always feasible.
    let mut inc_vars = searcher.greedy();
    let mut inc_obj = evaluate_objective(model, &inc_vars);
    let mut inc_count = inc_vars.len() as u32;
    {
        let empty_obj = model.empty_objective();
        if improves(empty_obj, 0, inc_obj, inc_count) {
            inc_vars = Vec::new();
            inc_obj = empty_obj;
            inc_count = 0;
        }
    }

    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut seq = 0u64;
    let root1 = Bits::zeros(searcher.blocks);
    let mut root0 = Bits::zeros(searcher.blocks);
    // Variables in zero-capacity groups can never be selected; propagation
    // only fires on selections, so fix them out up front.
    for (v, c) in model.candidates.iter().enumerate() {
        if model.magazines[c.id.farm] == Some(0) || model.max_per_target == 0 {
            root0.set(v);
        }
    }
    let (root_bound, root_ub) = searcher.bound(&root1, &root0);
    heap.push(HeapEntry(Node { fixed1: root1, fixed0: root0, bound: root_bound, ub_n: root_ub, seq }));

    let mut nodes = 0u64;
    let mut stopped = false;
    let mut best_outstanding = f64::INFINITY;

    while let Some(HeapEntry(node)) = heap.pop() {
        let over_nodes = budget.max_nodes.is_some_and(|m| nodes >= m);
        let over_time = nodes % 256 == 0
            && budget.max_seconds.is_some_and(|s| start.elapsed().as_secs_f64() > s);
        if over_nodes || over_time {
            stopped = true;
            best_outstanding = node.bound;
            break;
        }
        nodes += 1;

        // Prune against the current incumbent: nothing in this subtree can
        // beat (objective, -assigned).
        if node.bound > inc_obj + EPS
            || ((node.bound - inc_obj).abs() <= EPS && node.ub_n <= inc_count)
        {
            continue;
        }

        // The fixed-1 set itself is always a feasible completion.
        let mut vars: Vec<u32> = Vec::new();
        node.fixed1.for_each(|v| vars.push(v as u32));
        let obj = evaluate_objective(model, &vars);
        debug_assert!(node.bound <= obj + EPS, "inadmissible bound at node");
        if improves(obj, vars.len() as u32, inc_obj, inc_count) {
            inc_obj = obj;
            inc_count = vars.len() as u32;
            inc_vars = vars;
        }

        let free = searcher.free_bits(&node.fixed1, &node.fixed0);
        // Branch on the free variable with the most conflicts; the ascending
        // scan leaves the lowest id among ties.
        let mut branch: Option<usize> = None;
        let mut best_degree = 0u32;
        free.for_each(|v| {
            if branch.is_none() || searcher.degree[v] > best_degree {
                branch = Some(v);
                best_degree = searcher.degree[v];
            }
        });
        let Some(v) = branch else { continue }; // leaf

        // θ = 1 child first.
        {
            let mut f1 = node.fixed1.clone();
            let mut f0 = node.fixed0.clone();
            searcher.apply_one(&mut f1, &mut f0, v);
            let (bound, ub_n) = searcher.bound(&f1, &f0);
            if !(bound > inc_obj + EPS || ((bound - inc_obj).abs() <= EPS && ub_n <= inc_count)) {
                seq += 1;
                heap.push(HeapEntry(Node { fixed1: f1, fixed0: f0, bound, ub_n, seq }));
            }
        }
        // θ = 0 child.
        {
            let f1 = node.fixed1.clone();
            let mut f0 = node.fixed0.clone();
            f0.set(v);
            let (bound, ub_n) = searcher.bound(&f1, &f0);
            if !(bound > inc_obj + EPS || ((bound - inc_obj).abs() <= EPS && ub_n <= inc_count)) {
                seq += 1;
                heap.push(HeapEntry(Node { fixed1: f1, fixed0: f0, bound, ub_n, seq }));
            }
        }
    }

    let proven = !stopped;
    let best_bound = if proven { inc_obj } else { best_outstanding.min(inc_obj) };
    let stats = SolveStats {
        nodes,
        wall_seconds: start.elapsed().as_secs_f64(),
        proven_optimal: proven,
        gap: if proven { 0.0 } else { (inc_obj - best_bound).max(0.0) },
        best_bound,
    };
    Solution::new(model, inc_vars, stats)
}

/// Exhaustive oracle: enumerates every subset (variable count must be <= 24),
/// checks feasibility from the raw constraint data and returns the exact
/// optimum under the same (objective, -assigned) preference as the solver.
///
/// Test-support path; its objective arithmetic is computed inline so it stays
/// independent of the solver internals.
pub fn brute_force_oracle(model: &AssignmentModel) -> Solution {
    let n = model.num_vars();
    assert!(n <= 24, "oracle is exponential; got {n} variables");

    let mut adj_mask = vec![0u64; n];
    for &(a, b) in &model.conflicts {
        adj_mask[a as usize] |= 1 << b;
        adj_mask[b as usize] |= 1 << a;
    }
    let mut target_mask = vec![0u64; model.num_targets()];
    let mut farm_mask = vec![0u64; model.farm_ids.len()];
    for (v, c) in model.candidates.iter().enumerate() {
        target_mask[c.id.target] |= 1 << v;
        farm_mask[c.id.farm] |= 1 << v;
    }

    let mut best_mask = 0u64;
    let mut best_obj = f64::INFINITY;
    let mut best_count = 0u32;
    'subsets: for mask in 0u64..(1u64 << n) {
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            if adj_mask[v] & mask != 0 {
                continue 'subsets;
            }
            m &= m - 1;
        }
        for tm in &target_mask {
            if (tm & mask).count_ones() > model.max_per_target {
                continue 'subsets;
            }
        }
        for (w, fm) in farm_mask.iter().enumerate() {
            if let Some(mag) = model.magazines[w] {
                if (fm & mask).count_ones() > mag {
                    continue 'subsets;
                }
            }
        }

        let mut total = 0.0;
        let mut worst = if model.num_targets() == 0 { 0.0 } else { f64::NEG_INFINITY };
        for (t, tm) in target_mask.iter().enumerate() {
            let k = (tm & mask).count_ones().min(model.max_per_target);
            let s = (model.target_values[t] - model.kill_decrement * k as f64).max(0.0);
            total += s;
            worst = worst.max(s);
        }
        let obj = total + worst;
        let count = mask.count_ones();
        if improves(obj, count, best_obj, best_count) {
            best_obj = obj;
            best_count = count;
            best_mask = mask;
        }
    }

    let mut vars = Vec::new();
    for v in 0..n {
        if best_mask & (1 << v) != 0 {
            vars.push(v as u32);
        }
    }
    let stats = SolveStats {
        nodes: 1u64 << n,
        wall_seconds: 0.0,
        proven_optimal: true,
        gap: 0.0,
        best_bound: best_obj,
    };
    Solution::new(model, vars, stats)
}

/// Root relaxation bound, exposed for admissibility tests.
#[cfg(test)]
pub(crate) fn root_bound(model: &AssignmentModel) -> f64 {
    let searcher = Searcher::new(model);
    let f1 = Bits::zeros(searcher.blocks);
    let f0 = Bits::zeros(searcher.blocks);
    searcher.bound(&f1, &f0).0
}
