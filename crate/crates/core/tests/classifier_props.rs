// SPDX-License-Identifier: Apache-2.0
mod common;

use common::*;
use demarc_core::classifier::*;
use demarc_core::oracle::positive_region;
use demarc_core::squeeze::twi_squeeze;
use demarc_core::valred::{value_reduce_complete, ReducedTable};
use proptest::prelude::*;

fn reduced(t: &demarc_core::table::DecisionTable) -> ReducedTable {
    value_reduce_complete(t, &twi_squeeze(t, None).unwrap().reduct).unwrap()
}

/// Every complete object over the reduced attributes' value ids.
fn grid(rt: &ReducedTable) -> Vec<Vec<Option<u32>>> {
    let mut out = vec![vec![]];
    for a in &rt.attributes {
        let n = a.values.len() as u32;
        out = out.into_iter().flat_map(|o| (1..=n).map(move |v| [o.clone(), vec![Some(v)]].concat())).collect();
    }
    out
}

fn order_strategy() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(any::<u32>(), 6)
}

fn order_from(keys: &[u32], m: usize) -> Vec<usize> {
    let mut o: Vec<usize> = (0..m).collect();
    o.sort_by_key(|&i| keys[i]);
    o
}

proptest! {
    #[test]
    fn trees_reproduce_training_decisions(t in consistent_strategy(16, 5, 3, 3), keys in order_strategy()) {
        let rt = reduced(&t);
        let tree = build_tree(&rt, &order_from(&keys, rt.attributes.len())).unwrap();
        let rules = to_rules(&rt);
        let attrs = rt.attr_indices(&t).unwrap();
        for r in positive_region(&t, t.condition()) {
            let want = Outcome::Decision(t.decision_tuple(r));
            prop_assert_eq!(&tree.classify_row(&t, r).unwrap(), &want);
            let obj: Vec<Option<u32>> = attrs.iter().map(|&a| Some(t.value(r, a))).collect();
            prop_assert_eq!(&classify_rules(&rules, &obj), &want);
        }
    }

    #[test]
    fn tree_descent_is_first_match_over_its_rules(t in consistent_strategy(16, 4, 3, 3), keys in order_strategy()) {
        let rt = reduced(&t);
        let tree = build_tree(&rt, &order_from(&keys, rt.attributes.len())).unwrap();
        let rules = tree.rules();
        for obj in grid(&rt) {
            prop_assert_eq!(tree.classify(&obj), classify_rules(&rules, &obj), "{:?}", obj);
        }
    }

    #[test]
    fn one_leaf_per_reduced_row(t in consistent_strategy(16, 5, 3, 3), keys in order_strategy()) {
        let rt = reduced(&t);
        let tree = build_tree(&rt, &order_from(&keys, rt.attributes.len())).unwrap();
        let mut leaves = tree.leaf_rows();
        prop_assert_eq!(leaves.len(), rt.rows.len());
        leaves.sort_unstable();
        prop_assert_eq!(leaves, (0..rt.rows.len()).collect::<Vec<_>>());
        prop_assert_eq!(to_rules(&rt).len(), rt.rows.len());
    }

    #[test]
    fn unknown_values_never_contradict_a_unanimous_node(t in consistent_strategy(16, 4, 3, 3), hide in any::<prop::sample::Index>()) {
        let rt = reduced(&t);
        prop_assume!(!rt.attributes.is_empty());
        let tree = build_tree(&rt, &(0..rt.attributes.len()).collect::<Vec<_>>()).unwrap();
        let k = hide.index(rt.attributes.len());
        for mut obj in grid(&rt) {
            obj[k] = None;
            match tree.classify(&obj) {
                Outcome::Ambiguous(p) => {
                    let s: f64 = p.iter().map(|x| x.1).sum();
                    prop_assert!((s - 1.0).abs() < 1e-9);
                    prop_assert!(p.len() >= 2);
                }
                Outcome::Decision(_) | Outcome::NoMatch => {}
            }
        }
    }
}

#[test]
fn bad_orders_are_rejected() {
    let t = table2a();
    let rt = reduced(&t);
    assert!(matches!(build_tree(&rt, &[0, 0, 1]), Err(ClassifierError::BadOrder)));
    assert!(matches!(build_tree(&rt, &[0, 1]), Err(ClassifierError::BadOrder)));
    assert!(build_tree_by_names(&rt, &["nope".into(), "C5".into(), "C6".into()]).is_err());
}

#[test]
fn table2a_rules_read_back() {
    let t = table2a();
    let rt = reduced(&t);
    let text: Vec<String> = to_rules(&rt).iter().map(|r| format_rule(&rt, r)).collect();
    assert!(text.iter().all(|l| l.contains("THEN D=")));
    let covered: u32 = to_rules(&rt).iter().map(|r| r.coverage).sum();
    assert_eq!(covered, 18);
    let tree = build_tree_by_names(&rt, &["C6".into(), "C5".into(), "C2".into()]).unwrap();
    for r in 0..t.n_rows() {
        assert_eq!(tree.classify_row(&t, r).unwrap(), Outcome::Decision(t.decision_tuple(r)));
    }
    assert!(tree.to_json()["root"].is_object());
}
