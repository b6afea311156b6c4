// SPDX-License-Identifier: Apache-2.0
//! Rules and the ordered classifier tree built from a reduced table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::table::{DecisionTable, TableError, STAR};
use crate::valred::ReducedTable;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("tree order must be a permutation of the reduced table's attributes")]
    BadOrder,
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    /// (attribute position in the reduced table, value id); no stars.
    pub conditions: Vec<(usize, u32)>,
    pub decision: Vec<u32>,
    pub coverage: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Decision(Vec<u32>),
    /// Reachable decisions with coverage-weighted probabilities.
    Ambiguous(Vec<(Vec<u32>, f64)>),
    NoMatch,
}

pub fn to_rules(rt: &ReducedTable) -> Vec<Rule> {
    rt.rows.iter().map(|r| row_rule(r.values.iter().copied().enumerate(), &r.decision, r.coverage)).collect()
}

fn row_rule(cells: impl Iterator<Item = (usize, u32)>, decision: &[u32], coverage: u32) -> Rule {
    Rule { conditions: cells.filter(|&(_, v)| v != STAR).collect(), decision: decision.to_vec(), coverage }
}

/// `IF C2=0 AND C5=0 THEN D=0  # covers 2`
pub fn format_rule(rt: &ReducedTable, rule: &Rule) -> String {
    let conds: Vec<String> =
        rule.conditions.iter().map(|&(k, v)| format!("{}={}", rt.attributes[k].name, rt.attributes[k].text(v))).collect();
    let dec: Vec<String> = rt
        .decision_attributes
        .iter()
        .zip(&rule.decision)
        .map(|(a, &v)| format!("{}={}", a.name, a.text(v)))
        .collect();
    let head = if conds.is_empty() { String::new() } else { format!("IF {} ", conds.join(" AND ")) };
    format!("{head}THEN {}  # covers {}", dec.join(" AND "), rule.coverage)
}

/// First rule whose conditions all hold. `obj` is indexed by reduced-table
/// attribute position; `None` is an unknown value.
pub fn classify_rules(rules: &[Rule], obj: &[Option<u32>]) -> Outcome {
    rules
        .iter()
        .find(|r| r.conditions.iter().all(|&(k, v)| obj[k] == Some(v)))
        .map_or(Outcome::NoMatch, |r| Outcome::Decision(r.decision.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub value: u32,
    pub child: TreeNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    /// Star first, then ascending value.
    pub branches: Vec<Branch>,
    /// Decision → coverage over the rows below this node.
    pub reachable: BTreeMap<Vec<u32>, u32>,
    /// Reduced-table row at a leaf.
    pub row: Option<usize>,
}

impl TreeNode {
    fn build(rt: &ReducedTable, order: &[usize], rows: &[usize]) -> TreeNode {
        let mut reachable = BTreeMap::new();
        for &r in rows {
            *reachable.entry(rt.rows[r].decision.clone()).or_insert(0) += rt.rows[r].coverage;
        }
        let Some((&k, rest)) = order.split_first() else {
            return TreeNode { branches: vec![], reachable, row: rows.first().copied() };
        };
        let mut by: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for &r in rows {
            by.entry(rt.rows[r].values[k]).or_default().push(r);
        }
        let branches = by.into_iter().map(|(value, rs)| Branch { value, child: TreeNode::build(rt, rest, &rs) }).collect();
        TreeNode { branches, reachable, row: None }
    }

    fn probabilities(&self) -> Vec<(Vec<u32>, f64)> {
        let total: u32 = self.reachable.values().sum();
        self.reachable.iter().map(|(d, &c)| (d.clone(), c as f64 / total as f64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierTree {
    /// Attribute positions of the reduced table, one per level.
    pub order: Vec<usize>,
    pub root: TreeNode,
    pub table: ReducedTable,
}

pub fn build_tree(rt: &ReducedTable, order: &[usize]) -> Result<ClassifierTree, ClassifierError> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..rt.attributes.len()).collect::<Vec<_>>() {
        return Err(ClassifierError::BadOrder);
    }
    let rows: Vec<usize> = (0..rt.rows.len()).collect();
    Ok(ClassifierTree { order: order.to_vec(), root: TreeNode::build(rt, order, &rows), table: rt.clone() })
}

/// Tree levels named by attribute.
pub fn build_tree_by_names(rt: &ReducedTable, names: &[String]) -> Result<ClassifierTree, ClassifierError> {
    let order = names
        .iter()
        .map(|n| rt.attributes.iter().position(|a| &a.name == n).ok_or(ClassifierError::BadOrder))
        .collect::<Result<Vec<_>, _>>()?;
    build_tree(rt, &order)
}

impl ClassifierTree {
    /// Depth-first descent trying branches in order and backing out of dead
    /// ends; the first leaf reached wins.
    pub fn classify(&self, obj: &[Option<u32>]) -> Outcome {
        let mut halted: Option<(usize, &TreeNode)> = None;
        match self.descend(&self.root, 0, 0, obj, &mut halted) {
            Some(row) => Outcome::Decision(self.table.rows[row].decision.clone()),
            None => match halted.map(|(_, n)| n) {
                Some(node) if node.reachable.len() == 1 => {
                    Outcome::Decision(node.reachable.keys().next().unwrap().clone())
                }
                Some(node) if !node.reachable.is_empty() => Outcome::Ambiguous(node.probabilities()),
                _ => Outcome::NoMatch,
            },
        }
    }

    /// `concrete` counts non-star branches taken so far. On failure the
    /// node where an unknown value stopped the most specific path is kept.
    fn descend<'a>(
        &'a self,
        node: &'a TreeNode,
        depth: usize,
        concrete: usize,
        obj: &[Option<u32>],
        halted: &mut Option<(usize, &'a TreeNode)>,
    ) -> Option<usize> {
        if depth == self.order.len() {
            return node.row;
        }
        let v = obj[self.order[depth]];
        if v.is_none() && halted.is_none_or(|(c, _)| concrete > c) {
            *halted = Some((concrete, node));
        }
        node.branches.iter().filter(|b| b.value == STAR || Some(b.value) == v).find_map(|b| {
            let c = concrete + usize::from(b.value != STAR);
            self.descend(&b.child, depth + 1, c, obj, halted)
        })
    }

    /// Reduced-table rows in leaf order.
    pub fn leaf_rows(&self) -> Vec<usize> {
        fn walk(n: &TreeNode, out: &mut Vec<usize>) {
            if let Some(r) = n.row {
                if n.branches.is_empty() {
                    out.push(r);
                }
            }
            for b in &n.branches {
                walk(&b.child, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Rules in leaf order, conditions in tree level order.
    pub fn rules(&self) -> Vec<Rule> {
        self.leaf_rows()
            .into_iter()
            .map(|r| {
                let row = &self.table.rows[r];
                row_rule(self.order.iter().map(|&k| (k, row.values[k])), &row.decision, row.coverage)
            })
            .collect()
    }

    /// Classifies a row of `t` (which must share the tree's dictionaries);
    /// missing cells are unknown.
    pub fn classify_row(&self, t: &DecisionTable, row: usize) -> Result<Outcome, ClassifierError> {
        let attrs = self.table.attr_indices(t)?;
        let obj: Vec<Option<u32>> =
            attrs.iter().map(|&a| Some(t.value(row, a)).filter(|&v| v != STAR)).collect();
        Ok(self.classify(&obj))
    }

    pub fn to_text(&self) -> String {
        fn walk(tree: &ClassifierTree, n: &TreeNode, depth: usize, out: &mut String) {
            for b in &n.branches {
                let a = &tree.table.attributes[tree.order[depth]];
                let _ = write!(out, "{}{}={}", "  ".repeat(depth), a.name, a.text(b.value));
                if let Some(r) = b.child.row.filter(|_| b.child.branches.is_empty()) {
                    let row = &tree.table.rows[r];
                    let d = tree.table.decision_text(&row.decision).join(",");
                    let _ = write!(out, " -> {d} ({})", row.coverage);
                } else if b.child.reachable.len() > 1 {
                    let parts: Vec<String> = b
                        .child
                        .probabilities()
                        .iter()
                        .map(|(d, p)| format!("{}:{:.2}", tree.table.decision_text(d).join(","), p))
                        .collect();
                    let _ = write!(out, " [{}]", parts.join(" "));
                }
                out.push('\n');
                walk(tree, &b.child, depth + 1, out);
            }
        }
        let mut out = String::new();
        walk(self, &self.root, 0, &mut out);
        out
    }

    pub fn to_json(&self) -> Value {
        fn node(tree: &ClassifierTree, n: &TreeNode, depth: usize) -> Value {
            let reachable: Vec<Value> = n
                .probabilities()
                .into_iter()
                .map(|(d, p)| json!({"decision": tree.table.decision_text(&d), "probability": p}))
                .collect();
            let branches: Vec<Value> = n
                .branches
                .iter()
                .map(|b| {
                    let a = &tree.table.attributes[tree.order[depth]];
                    json!({"attribute": a.name, "value": a.text(b.value), "node": node(tree, &b.child, depth + 1)})
                })
                .collect();
            let mut v = json!({"reachable": reachable, "branches": branches});
            if let Some(r) = n.row.filter(|_| n.branches.is_empty()) {
                v["coverage"] = json!(tree.table.rows[r].coverage);
            }
            v
        }
        json!({"schema": 1, "root": node(self, &self.root, 0)})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{load_table, IngestConfig};
    use crate::valred::value_reduce_complete;

    fn table2a() -> DecisionTable {
        load_table(include_str!("../tests/fixtures/table2a.csv").as_bytes(), &IngestConfig::default())
            .unwrap()
    }

    fn obj(rt: &ReducedTable, c2: &str, c5: &str, c6: &str) -> Vec<Option<u32>> {
        [c2, c5, c6].iter().zip(&rt.attributes).map(|(v, a)| a.id_of(v)).collect()
    }

    #[test]
    fn rule_text() {
        let rt = value_reduce_complete(&table2a(), &[1, 4, 5]).unwrap();
        let text: Vec<String> = to_rules(&rt).iter().map(|r| format_rule(&rt, r)).collect();
        assert!(text.contains(&"IF C2=0 AND C5=0 AND C6=0 THEN D=0  # covers 2".to_owned()));
        assert!(text.contains(&"IF C2=2 THEN D=1  # covers 2".to_owned()));
    }

    #[test]
    fn unconditional_rule() {
        let t = load_table("a,D\n1,x\n2,x\n".as_bytes(), &IngestConfig::default()).unwrap();
        let rt = value_reduce_complete(&t, &[0]).unwrap();
        assert_eq!(format_rule(&rt, &to_rules(&rt)[0]), "THEN D=x  # covers 2");
    }

    #[test]
    fn tree_classifies_examples() {
        let rt = value_reduce_complete(&table2a(), &[1, 4, 5]).unwrap();
        let tree = build_tree(&rt, &[2, 1, 0]).unwrap();
        let d = |s: &str| vec![rt.decision_attributes[0].id_of(s).unwrap()];
        assert_eq!(tree.classify(&obj(&rt, "0", "0", "0")), Outcome::Decision(d("0")));
        assert_eq!(tree.classify(&obj(&rt, "2", "1", "1")), Outcome::Decision(d("1")));
        assert_eq!(tree.classify(&[Some(99), Some(99), Some(99)]), Outcome::NoMatch);
        assert_eq!(tree.leaf_rows().len(), rt.rows.len());
    }

    #[test]
    fn unknown_value_reports_reachable_decisions() {
        let rt = value_reduce_complete(&table2a(), &[1, 4, 5]).unwrap();
        let tree = build_tree(&rt, &[2, 1, 0]).unwrap();
        // C6=0 with C5 unknown stops below C6=0: D0 covers 2, D2 covers 4
        let mut o = obj(&rt, "1", "0", "0");
        o[1] = None;
        let d = |s: &str| vec![rt.decision_attributes[0].id_of(s).unwrap()];
        assert_eq!(tree.classify(&o), Outcome::Ambiguous(vec![(d("0"), 2.0 / 6.0), (d("2"), 4.0 / 6.0)]));
    }

    #[test]
    fn bad_order_is_rejected() {
        let rt = value_reduce_complete(&table2a(), &[1, 4, 5]).unwrap();
        assert!(build_tree(&rt, &[0, 1]).is_err());
    }
}
