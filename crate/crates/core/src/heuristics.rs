// SPDX-License-Identifier: Apache-2.0
//! Greedy reduct search guided by remaining demarcation work, the
//! approximation error ε, and replacement-based refinement of a reduct.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::measures::{variety, PartitionStats};
use crate::squeeze::{
    l2r_keeping, l2r_squeeze, pinned_order, r2l_squeeze, relabelled_partition, twi_squeeze, ReductReport, SqueezeError, SqueezeOptions,
    SqueezeState,
};
use crate::table::{dedupe, sort_by_decision, DecisionTable};
use crate::tasks::{refine, root_task, CascadeSuccessiveTask, Frame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scorer {
    #[default]
    Demarcation,
    Entropy,
}

/// Which of several equally scored attributes wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    /// Latest in the remaining column order.
    #[default]
    Latest,
    Earliest,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicOptions {
    pub scorer: Scorer,
    pub tie: TieBreak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerScore {
    pub attr: usize,
    /// I(c, lT), unordered pairs.
    pub indiscernible: u128,
    /// S(c, lT) = I(lT) − I(c, lT).
    pub demarcating: u128,
    pub entropy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicReport {
    pub report: ReductReport,
    /// Greedy selections in order.
    pub picks: Vec<usize>,
    /// Candidate scores at each greedy step.
    pub scores: Vec<Vec<LayerScore>>,
}

/// Σ_{i<j} |X_i||X_j| over the D-Regions.
pub fn invariant_demarcations(t: &DecisionTable) -> u128 {
    let p = sort_by_decision(t);
    let sizes = p.regions.iter().map(|r| (r.last - r.first + 1) as u64).collect();
    variety(&PartitionStats { block_sizes: sizes }).expect("row counts fit").unordered
}

fn half_cross(counts: &[u64]) -> u128 {
    let s: u128 = counts.iter().map(|&c| c as u128).sum();
    let sq: u128 = counts.iter().map(|&c| (c as u128) * (c as u128)).sum();
    (s * s - sq) / 2
}

/// I(lT): cross-region pairs still sharing a task.
pub fn layer_indiscernible(layer: &CascadeSuccessiveTask) -> u128 {
    layer
        .tasks
        .iter()
        .map(|q| {
            let sizes: Vec<u64> = q.d_rs().iter().map(|(_, s)| s.iter().map(|x| x.len() as u64).sum()).collect();
            half_cross(&sizes)
        })
        .sum()
}

/// (queue, value) → per-region counts after splitting `layer` by `col`.
fn split_counts(perm: &[u32], layer: &CascadeSuccessiveTask, col: &[u32]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for q in &layer.tasks {
        let mut by: BTreeMap<u32, BTreeMap<u32, u64>> = BTreeMap::new();
        for s in &q.segments {
            for r in s.rows(perm) {
                *by.entry(col[r as usize]).or_default().entry(s.region).or_default() += 1;
            }
        }
        out.extend(by.into_values().map(|m| m.into_values().collect::<Vec<_>>()));
    }
    out
}

/// I(c, lT) = ½ Σ_i [(Σ_j x_ij)² − Σ_j x_ij²].
pub fn indiscernible_info(perm: &[u32], layer: &CascadeSuccessiveTask, col: &[u32]) -> u128 {
    split_counts(perm, layer, col).iter().map(|c| half_cross(c)).sum()
}

/// Entropy (bits) of the groups `col` cuts the layer's tasks into.
pub fn task_entropy(perm: &[u32], layer: &CascadeSuccessiveTask, col: &[u32]) -> f64 {
    let groups: Vec<u64> = split_counts(perm, layer, col).iter().map(|c| c.iter().sum()).collect();
    let total: u64 = groups.iter().sum();
    if total == 0 {
        return 0.0;
    }
    -groups
        .iter()
        .map(|&g| {
            let p = g as f64 / total as f64;
            p * p.log2()
        })
        .sum::<f64>()
}

struct Greedy<'a> {
    t: &'a DecisionTable,
    opts: HeuristicOptions,
    frame: Frame,
    layer: CascadeSuccessiveTask,
    remaining: Vec<usize>,
    picks: Vec<usize>,
    layers: Vec<CascadeSuccessiveTask>,
    scores: Vec<Vec<LayerScore>>,
}

impl Greedy<'_> {
    fn run(&mut self) {
        while !self.layer.is_empty() && !self.remaining.is_empty() {
            let base = layer_indiscernible(&self.layer);
            let scores: Vec<LayerScore> = self
                .remaining
                .iter()
                .map(|&a| {
                    let ind = indiscernible_info(&self.frame.perm, &self.layer, self.t.column(a));
                    let entropy = (self.opts.scorer == Scorer::Entropy)
                        .then(|| task_entropy(&self.frame.perm, &self.layer, self.t.column(a)));
                    LayerScore { attr: a, indiscernible: ind, demarcating: base - ind, entropy }
                })
                .collect();
            // lower is better for both scorers
            let key = |s: &LayerScore| match self.opts.scorer {
                Scorer::Demarcation => (s.indiscernible as f64, s.indiscernible),
                Scorer::Entropy => (-s.entropy.unwrap(), 0),
            };
            let mut best = 0;
            for i in 1..scores.len() {
                let (a, b) = (key(&scores[i]), key(&scores[best]));
                let better = a.0 < b.0 || (a.0 == b.0 && a.1 < b.1);
                let tie = a == b;
                if better || (tie && self.opts.tie == TieBreak::Latest) {
                    best = i;
                }
            }
            let stuck = scores.iter().all(|s| s.demarcating == 0);
            self.scores.push(scores);
            if stuck {
                break;
            }
            let a = self.remaining.remove(best);
            let next = refine(&mut self.frame, &self.layer, a, self.t.column(a));
            self.picks.push(a);
            self.layers.push(next.clone());
            self.layer = next;
        }
    }
}

/// Greedy search on the deduplicated table, then the left-to-right pass
/// over the picks to drop redundant ones.
pub fn heuristic_reduct(t: &DecisionTable, opts: HeuristicOptions) -> Result<HeuristicReport, SqueezeError> {
    let (td, groups) = dedupe(t);
    let p = sort_by_decision(&td);
    let mut g = Greedy {
        t: &td,
        opts,
        frame: Frame::new(&p),
        layer: root_task(&p),
        remaining: td.condition().to_vec(),
        picks: vec![],
        layers: vec![],
        scores: vec![],
    };
    g.run();
    let mut boundary = Vec::new();
    let mut partition = p;
    if !g.layer.is_empty() {
        boundary = g.layer.members(&g.frame.perm).into_iter().map(|r| r as usize).collect();
        partition = partition.with_boundary(&td, &boundary);
        g.frame = Frame::new(&partition);
        g.layer = root_task(&partition);
        g.layers.clear();
        for &a in &g.picks {
            let next = refine(&mut g.frame, &g.layer, a, td.column(a));
            g.layers.push(next.clone());
            g.layer = next;
        }
        g.run();
    }
    let mut state = SqueezeState::new(partition, g.frame, g.picks.clone(), &SqueezeOptions::default())?;
    for (&a, l) in g.picks.iter().zip(g.layers) {
        state.save(a, l)?;
    }
    state.boundary = boundary.clone();
    let rs: Vec<usize> = g.picks.iter().rev().copied().collect();
    let mut report = l2r_squeeze(&td, &rs, &mut state)?;
    let mut ids: Vec<u32> = boundary.iter().flat_map(|&r| groups[r].iter().map(|&o| t.row_id(o))).collect();
    ids.sort_unstable();
    report.boundary_rows = ids;
    Ok(HeuristicReport { report, picks: g.picks, scores: g.scores })
}

/// ε(B) = 1 − γ(B)/γ(C): the share of positive objects B fails to classify.
pub fn approx_error(t: &DecisionTable, b: &[usize]) -> Ratio<u64> {
    let (p, boundary) = relabelled_partition(t);
    let positive = (t.n_rows() - boundary.len()) as u64;
    if positive == 0 {
        return Ratio::from_integer(0);
    }
    let mut frame = Frame::new(&p);
    let mut layer = root_task(&p);
    for &a in b {
        if layer.is_empty() {
            break;
        }
        layer = refine(&mut frame, &layer, a, t.column(a));
    }
    let boundary_region = if boundary.is_empty() { u32::MAX } else { p.regions.len() as u32 - 1 };
    let lost: u64 = layer
        .tasks
        .iter()
        .flat_map(|q| &q.segments)
        .filter(|s| s.region != boundary_region)
        .map(|s| s.len() as u64)
        .sum();
    Ratio::new(lost, positive)
}

/// Tries every candidate subset of size ≤ `max_size` pinned to the right of
/// `r`; keeps the shortest reduct found.
pub fn s_replace(
    t: &DecisionTable,
    r: &[usize],
    candidates: &[usize],
    max_size: usize,
) -> Result<Vec<usize>, SqueezeError> {
    let in_c = |a: &usize| t.condition().iter().position(|c| c == a);
    let mut base = r.to_vec();
    base.sort_by_key(in_c);
    let mut best = base.clone();
    for size in 1..=max_size.min(candidates.len()) {
        for s in candidates.iter().copied().combinations(size) {
            let order: Vec<usize> = base.iter().copied().chain(s).collect();
            let rep = twi_squeeze(t, Some(&order))?;
            if rep.reduct.len() < best.len() {
                best = rep.reduct;
            }
        }
    }
    Ok(best)
}

/// A reduct of `favored` ∪ (a reduct found with `favored` pushed left) that
/// keeps every favored attribute able to split something.
pub fn minimal_with_favored(t: &DecisionTable, favored: &[usize]) -> Result<Vec<usize>, SqueezeError> {
    let first = twi_squeeze(t, Some(&pinned_order(t, favored, &[])))?;
    let rest: Vec<usize> = t.condition().iter().copied().filter(|a| first.reduct.contains(a) && !favored.contains(a)).collect();
    let fav: Vec<usize> = t.condition().iter().copied().filter(|a| favored.contains(a)).collect();
    let order: Vec<usize> = rest.into_iter().chain(fav).collect();
    let (s, mut state) = r2l_squeeze(t, &order, &SqueezeOptions::default())?;
    let rs: Vec<usize> = s.iter().rev().copied().collect();
    Ok(l2r_keeping(t, &rs, &mut state, favored)?.reduct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{load_table, IngestConfig};

    fn load(s: &str) -> DecisionTable {
        load_table(s.as_bytes(), &IngestConfig::default()).unwrap()
    }

    #[test]
    fn tc1_scores() {
        let t = load(include_str!("../tests/fixtures/tc1a.csv"));
        let (td, _) = dedupe(&t);
        assert_eq!(invariant_demarcations(&td), 12);
        let h = heuristic_reduct(&t, HeuristicOptions::default()).unwrap();
        let first: Vec<u128> = h.scores[0].iter().map(|s| s.indiscernible).collect();
        assert_eq!(first, vec![5, 7, 6]);
        assert_eq!(h.picks[0], 0);
        let second: Vec<u128> = h.scores[1].iter().map(|s| s.indiscernible).collect();
        assert_eq!(second, vec![3, 3]);
        assert_eq!(h.picks[1], 2);
    }

    #[test]
    fn entropy_closed_forms() {
        let t = load("a,b,D\n0,0,x\n0,1,y\n1,1,x\n1,0,y\n");
        let p = sort_by_decision(&t);
        let root = root_task(&p);
        assert!((task_entropy(&p.perm, &root, t.column(0)) - 1.0).abs() < 1e-12);
        let c = load("a,D\n0,x\n0,y\n0,y\n0,x\n");
        let pc = sort_by_decision(&c);
        assert_eq!(task_entropy(&pc.perm, &root_task(&pc), c.column(0)), 0.0);
        let u = load("a,D\n0,x\n1,y\n1,y\n1,x\n");
        let pu = sort_by_decision(&u);
        let want = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert!((task_entropy(&pu.perm, &root_task(&pu), u.column(0)) - want).abs() < 1e-12);
    }

    #[test]
    fn approx_errors_on_table2a() {
        let t = load(include_str!("../tests/fixtures/table2a.csv"));
        assert_eq!(approx_error(&t, &[4, 5]), Ratio::new(14, 18));
        assert_eq!(approx_error(&t, &[2, 3, 4, 5]), Ratio::new(6, 18));
        assert_eq!(approx_error(&t, t.condition()), Ratio::from_integer(0));
    }
}
