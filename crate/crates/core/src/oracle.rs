// SPDX-License-Identifier: Apache-2.0
//! Brute-force rough-set semantics for small tables. Everything here hashes
//! tuples or walks pairs directly; nothing shares code with the task-based
//! algorithms it is used to check.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::table::{DecisionTable, STAR};
use crate::valred::ReducedTable;

#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    pub max_rows: usize,
    pub max_attrs: usize,
    /// Cap on retained values tried by [`check_value_irreducible`].
    pub max_values: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_rows: 64, max_attrs: 16, max_values: 4096 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle budget exceeded: {what} = {actual} > {limit}")]
    BudgetExceeded { what: &'static str, actual: usize, limit: usize },
}

fn check(what: &'static str, actual: usize, limit: usize) -> Result<(), OracleError> {
    if actual > limit {
        Err(OracleError::BudgetExceeded { what, actual, limit })
    } else {
        Ok(())
    }
}

/// Rows whose B-class is decision-pure, ascending.
pub fn positive_region(t: &DecisionTable, b: &[usize]) -> Vec<usize> {
    let mut classes: HashMap<Vec<u32>, (Vec<u32>, bool)> = HashMap::new();
    for r in 0..t.n_rows() {
        let d = t.decision_tuple(r);
        classes
            .entry(t.tuple(r, b))
            .and_modify(|(d0, mixed)| *mixed |= *d0 != d)
            .or_insert((d, false));
    }
    (0..t.n_rows()).filter(|&r| !classes[&t.tuple(r, b)].1).collect()
}

pub fn is_reduct(t: &DecisionTable, b: &[usize]) -> bool {
    let full = positive_region(t, t.condition());
    if positive_region(t, b) != full {
        return false;
    }
    (0..b.len()).all(|i| {
        let mut less = b.to_vec();
        less.remove(i);
        positive_region(t, &less) != full
    })
}

/// Every reduct, each sorted by attribute index; smallest first.
pub fn all_reducts(t: &DecisionTable, budget: &OracleBudget) -> Result<Vec<Vec<usize>>, OracleError> {
    let c = t.condition();
    check("rows", t.n_rows(), budget.max_rows)?;
    check("attributes", c.len(), budget.max_attrs)?;
    let full = positive_region(t, c);
    let n = c.len();
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut found: Vec<u32> = Vec::new();
    for m in masks {
        if found.iter().any(|f| m & f == *f) {
            continue;
        }
        let b: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| c[i]).collect();
        if positive_region(t, &b) == full {
            found.push(m);
        }
    }
    Ok(found
        .into_iter()
        .map(|m| {
            let mut b: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| c[i]).collect();
            b.sort_unstable();
            b
        })
        .collect())
}

pub fn core(t: &DecisionTable, budget: &OracleBudget) -> Result<Vec<usize>, OracleError> {
    let reducts = all_reducts(t, budget)?;
    let mut core: BTreeSet<usize> = t.condition().iter().copied().collect();
    for r in &reducts {
        core.retain(|a| r.contains(a));
    }
    Ok(core.into_iter().collect())
}

/// Unordered pairs discerned by `attrs` and by D.
pub fn relative_demarcations(t: &DecisionTable, attrs: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..t.n_rows() {
        for y in x + 1..t.n_rows() {
            if t.decision_tuple(x) != t.decision_tuple(y) && attrs.iter().any(|&a| t.value(x, a) != t.value(y, a))
            {
                out.push((x, y));
            }
        }
    }
    out
}

/// Decision label used when boundary rows are kept: `None` for boundary.
fn relabelled(t: &DecisionTable) -> Vec<Option<Vec<u32>>> {
    let pos: BTreeSet<usize> = positive_region(t, t.condition()).into_iter().collect();
    (0..t.n_rows()).map(|r| pos.contains(&r).then(|| t.decision_tuple(r))).collect()
}

/// Whether starring `(row, attr)` lets the row be confused with some row of
/// another (boundary-relabelled) decision on the remaining reduct attributes.
pub fn starring_breaks(t: &DecisionTable, reduct: &[usize], row: usize, attr: usize) -> bool {
    let lab = relabelled(t);
    let rest: Vec<usize> = reduct.iter().copied().filter(|&a| a != attr).collect();
    (0..t.n_rows()).any(|y| {
        lab[y] != lab[row]
            && t.value(y, attr) != t.value(row, attr)
            && rest.iter().all(|&a| t.value(y, a) == t.value(row, a))
    })
}

/// (row id, attribute) pairs found by trial starring over the reduct.
pub fn core_values(t: &DecisionTable, reduct: &[usize]) -> BTreeSet<(u32, usize)> {
    let mut out = BTreeSet::new();
    for r in 0..t.n_rows() {
        for &a in reduct {
            if starring_breaks(t, reduct, r, a) {
                out.insert((t.row_id(r), a));
            }
        }
    }
    out
}

fn matches(cells: &[u32], obj: &[u32]) -> bool {
    cells.iter().zip(obj).all(|(&c, &o)| c == STAR || c == o)
}

/// Reduced-table rows matched by each positive object of `original`, with
/// the object's decision. `rt` must use `original`'s dictionaries.
pub fn object_matches(rt: &ReducedTable, original: &DecisionTable) -> Vec<(usize, Vec<u32>, Vec<usize>)> {
    let attrs = rt.attr_indices(original).expect("reduced table attributes must exist in the original");
    positive_region(original, original.condition())
        .into_iter()
        .map(|r| {
            let obj = original.tuple(r, &attrs);
            let hit = rt.rows.iter().enumerate().filter(|(_, row)| matches(&row.values, &obj)).map(|(i, _)| i).collect();
            (r, original.decision_tuple(r), hit)
        })
        .collect()
}

/// Every positive object matches ≥1 row and only rows of its decision.
pub fn reduced_consistent(rt: &ReducedTable, original: &DecisionTable) -> bool {
    object_matches(rt, original)
        .iter()
        .all(|(_, d, hit)| !hit.is_empty() && hit.iter().all(|&i| rt.rows[i].decision == *d))
}

/// Starring any single retained value lets some positive object of
/// `original` match a row of another decision.
///
/// This object-level reading is stricter than what value reduction
/// guarantees: a widened row often still meets no conflicting object.
pub fn check_value_irreducible_objects(
    rt: &ReducedTable,
    original: &DecisionTable,
    budget: &OracleBudget,
) -> Result<bool, OracleError> {
    check("retained values", rt.retained_values(), budget.max_values)?;
    let mut work = rt.clone();
    for i in 0..rt.rows.len() {
        for k in 0..rt.attributes.len() {
            let v = rt.rows[i].values[k];
            if v == STAR {
                continue;
            }
            work.rows[i].values[k] = STAR;
            let broke = !reduced_consistent(&work, original);
            work.rows[i].values[k] = v;
            if !broke {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `rt` classifies every positive object of `original` correctly, and
/// starring any single retained value leaves two rows of different
/// decisions undiscerned.
pub fn check_value_irreducible(
    rt: &ReducedTable,
    original: &DecisionTable,
    budget: &OracleBudget,
) -> Result<bool, OracleError> {
    Ok(reduced_consistent(rt, original) && check_rows_irreducible(rt, budget)?)
}

/// Rows of different decisions are discerned: some attribute holds distinct
/// concrete values in both.
pub fn rows_discerned(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).any(|(&x, &y)| x != STAR && y != STAR && x != y)
}

/// Row-level irreducibility: starring any retained value leaves some pair of
/// rows with different decisions undiscerned.
pub fn check_rows_irreducible(rt: &ReducedTable, budget: &OracleBudget) -> Result<bool, OracleError> {
    check("retained values", rt.retained_values(), budget.max_values)?;
    let rows = &rt.rows;
    for i in 0..rows.len() {
        for k in 0..rt.attributes.len() {
            if rows[i].values[k] == STAR {
                continue;
            }
            let mut v = rows[i].values.clone();
            v[k] = STAR;
            let breaks =
                (0..rows.len()).any(|j| j != i && rows[j].decision != rows[i].decision && !rows_discerned(&v, &rows[j].values));
            if !breaks {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{load_table, IngestConfig};

    fn table2a() -> DecisionTable {
        load_table(include_str!("../tests/fixtures/table2a.csv").as_bytes(), &IngestConfig::default())
            .unwrap()
    }

    #[test]
    fn positive_regions_of_table2a() {
        let t = table2a();
        assert_eq!(positive_region(&t, t.condition()).len(), 18);
        assert_eq!(positive_region(&t, &[4, 5]).len(), 4);
        assert!(positive_region(&t, &[]).is_empty());
    }

    #[test]
    fn reduct_checks_on_table2a() {
        let t = table2a();
        assert!(is_reduct(&t, &[1, 4, 5]));
        assert!(!is_reduct(&t, &[4, 5]));
        assert!(!is_reduct(&t, &[1, 2, 4, 5]));
        let all = all_reducts(&t, &OracleBudget::default()).unwrap();
        assert!(all.contains(&vec![1, 4, 5]));
        assert!(all.iter().all(|r| is_reduct(&t, r)));
    }

    #[test]
    fn budget_is_enforced() {
        let t = table2a();
        let small = OracleBudget { max_rows: 10, ..Default::default() };
        assert!(matches!(all_reducts(&t, &small), Err(OracleError::BudgetExceeded { what: "rows", .. })));
    }
}
