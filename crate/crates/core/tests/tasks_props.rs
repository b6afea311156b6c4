// SPDX-License-Identifier: Apache-2.0
mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use demarc_core::table::{sort_by_decision, DecisionTable};
use demarc_core::tasks::{refine, root_task, task_intersection, CascadeSuccessiveTask, Frame, Queue};
use proptest::prelude::*;

type Groups = BTreeSet<BTreeSet<u32>>;

fn queue_rows(q: &Queue, perm: &[u32]) -> BTreeSet<u32> {
    q.segments.iter().flat_map(|s| s.rows(perm).collect::<Vec<_>>()).collect()
}

fn task_groups(l: &CascadeSuccessiveTask, perm: &[u32]) -> Groups {
    l.tasks.iter().map(|q| queue_rows(q, perm)).collect()
}

/// Classes of rows equal on `attrs` that hold ≥2 decisions.
fn oracle_tasks(t: &DecisionTable, attrs: &[usize]) -> Groups {
    let mut classes: BTreeMap<Vec<u32>, BTreeSet<u32>> = BTreeMap::new();
    for r in 0..t.n_rows() {
        classes.entry(t.tuple(r, attrs)).or_default().insert(r as u32);
    }
    classes
        .into_values()
        .filter(|c| c.iter().map(|&r| t.decision_tuple(r as usize)).collect::<BTreeSet<_>>().len() >= 2)
        .collect()
}

/// Layers refining by `order`, with the frame they end in.
fn layers(t: &DecisionTable, order: &[usize]) -> (Vec<CascadeSuccessiveTask>, Frame) {
    let p = sort_by_decision(t);
    let mut f = Frame::new(&p);
    let mut out = vec![root_task(&p)];
    for &a in order {
        let next = refine(&mut f, out.last().unwrap(), a, t.column(a));
        out.push(next);
    }
    (out, f)
}

proptest! {
    #[test]
    fn layers_match_class_oracle(t in table_strategy(25, 5, 3, 3)) {
        let order: Vec<usize> = t.condition().iter().rev().copied().collect();
        let (ls, f) = layers(&t, &order);
        for k in 1..ls.len() {
            prop_assert_eq!(task_groups(&ls[k], &f.perm), oracle_tasks(&t, &order[..k]));
        }
    }

    #[test]
    fn refinement_is_monotone_and_partitions_parent(t in table_strategy(25, 5, 3, 3)) {
        let order: Vec<usize> = t.condition().to_vec();
        let (ls, f) = layers(&t, &order);
        for k in 1..ls.len() {
            let parent: BTreeSet<u32> = ls[k - 1].members(&f.perm).into_iter().collect();
            let child: BTreeSet<u32> = ls[k].members(&f.perm).into_iter().collect();
            prop_assert!(child.is_subset(&parent));
            let mut all: Vec<u32> = ls[k].tasks.iter().chain(&ls[k].semi_tasks).flat_map(|q| queue_rows(q, &f.perm)).collect();
            all.sort_unstable();
            prop_assert_eq!(all, parent.into_iter().collect::<Vec<_>>());
            for q in &ls[k].tasks {
                prop_assert!(q.dr_count() >= 2);
            }
            for q in &ls[k].semi_tasks {
                prop_assert_eq!(q.dr_count(), 1);
            }
            prop_assert_eq!(ls[k].sorted_rows as usize, ls[k - 1].member_count());
        }
    }

    #[test]
    fn intersection_matches_oracle_and_is_symmetric(t in table_strategy(25, 6, 3, 3), cut in 0usize..6) {
        let c = t.condition().to_vec();
        let cut = cut.min(c.len() - 1);
        let (left, rest) = c.split_at(cut);
        let rest = &rest[1..];
        let (ll, lf) = layers(&t, left);
        let right_order: Vec<usize> = rest.iter().rev().copied().collect();
        let (rl, rf) = layers(&t, &right_order);
        let (a, b) = (ll.last().unwrap(), rl.last().unwrap());
        let x = task_intersection(a, &lf.perm, b, &rf.perm, &rf.region_of);
        let y = task_intersection(b, &rf.perm, a, &lf.perm, &rf.region_of);
        let flat = |g: Vec<Vec<(u32, Vec<u32>)>>| -> Groups {
            g.into_iter().map(|grp| grp.into_iter().flat_map(|(_, rows)| rows).collect()).collect()
        };
        let gx = flat(x.member_groups(&rf.perm));
        let gy = flat(y.member_groups(&lf.perm));
        prop_assert_eq!(&gx, &gy);
        // oracle: rows agreeing on everything but the skipped attribute,
        // split by decision
        let mut others = left.to_vec();
        others.extend_from_slice(rest);
        prop_assert_eq!(gx, oracle_tasks(&t, &others));
        // groups span ≥2 regions and are disjoint
        let mut seen = BTreeSet::new();
        for g in &x.groups {
            let regions: BTreeSet<u32> = g.segments.iter().map(|s| s.region).collect();
            prop_assert!(regions.len() >= 2);
            for s in &g.segments {
                for r in s.rows(&rf.perm) {
                    prop_assert!(seen.insert(r));
                }
            }
        }
        // left members are re-expressed as runs of the right frame
        let bound = a.member_count() + b.segment_count();
        prop_assert!(x.comparisons as usize <= bound, "{} > {}", x.comparisons, bound);
    }

    #[test]
    fn same_frame_walk_is_linear_in_segments(t in table_strategy(30, 5, 3, 3), i in 0usize..6, j in 0usize..6) {
        let order: Vec<usize> = t.condition().to_vec();
        let (ls, f) = layers(&t, &order);
        let (i, j) = (i.min(ls.len() - 1), j.min(ls.len() - 1));
        let x = task_intersection(&ls[i], &f.perm, &ls[j], &f.perm, &f.region_of);
        let bound = ls[i].segment_count() + ls[j].segment_count();
        prop_assert!(x.comparisons as usize <= bound, "{} > {}", x.comparisons, bound);
    }
}
