// SPDX-License-Identifier: Apache-2.0
//! Value reduction over a reduct: starring cells that no longer help to
//! separate decision classes.
//!
//! Tables here carry stars, so groups are explicit row sets instead of
//! positional segments. A star cell is indiscernible from every value.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::squeeze::{full_intersections, relabelled_partition};
use crate::table::{Attribute, DecisionColumns, DecisionTable, TableError, STAR};

#[derive(Debug, Error)]
pub enum ValredError {
    #[error("table is inconsistent on the reduct attributes (rows {0:?})")]
    Inconsistent(Vec<u32>),
    #[error("attribute {0:?} already holds missing values")]
    StarInput(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedRow {
    pub values: Vec<u32>,
    pub decision: Vec<u32>,
    pub coverage: u32,
    /// Row id of the first original object folded into this row.
    pub provenance: u32,
    pub members: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedTable {
    pub attributes: Vec<Attribute>,
    pub decision_attributes: Vec<Attribute>,
    pub rows: Vec<ReducedRow>,
}

impl ReducedTable {
    pub fn retained_values(&self) -> usize {
        self.rows.iter().map(|r| r.values.iter().filter(|&&v| v != STAR).count()).sum()
    }

    /// Retained condition values over all condition cells.
    pub fn compression_ratio(&self) -> f64 {
        let total = self.rows.len() * self.attributes.len();
        if total == 0 {
            1.0
        } else {
            self.retained_values() as f64 / total as f64
        }
    }

    /// Positions of this table's condition attributes inside `t`.
    pub fn attr_indices(&self, t: &DecisionTable) -> Result<Vec<usize>, TableError> {
        self.attributes.iter().map(|a| t.attr_index(&a.name)).collect()
    }

    pub fn cell_text(&self, row: usize, k: usize) -> &str {
        self.attributes[k].text(self.rows[row].values[k])
    }

    pub fn decision_text(&self, d: &[u32]) -> Vec<String> {
        self.decision_attributes.iter().zip(d).map(|(a, &v)| a.text(v).to_owned()).collect()
    }

    /// Re-expresses ids in `t`'s dictionaries. Values unknown to `t` get ids
    /// past its dictionary so they never match.
    pub fn reencode(&self, t: &DecisionTable) -> Result<ReducedTable, TableError> {
        let map = |from: &Attribute, to: &Attribute, v: u32| -> u32 {
            if v == STAR {
                STAR
            } else {
                to.id_of(from.text(v)).unwrap_or(to.values.len() as u32 + v)
            }
        };
        let cond: Vec<&Attribute> =
            self.attributes.iter().map(|a| t.attr_index(&a.name).map(|i| t.attribute(i))).collect::<Result<_, _>>()?;
        let dec: Vec<&Attribute> = self
            .decision_attributes
            .iter()
            .map(|a| t.attr_index(&a.name).map(|i| t.attribute(i)))
            .collect::<Result<_, _>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| ReducedRow {
                values: r.values.iter().enumerate().map(|(k, &v)| map(&self.attributes[k], cond[k], v)).collect(),
                decision: r.decision.iter().enumerate().map(|(k, &v)| map(&self.decision_attributes[k], dec[k], v)).collect(),
                ..r.clone()
            })
            .collect();
        Ok(ReducedTable {
            attributes: cond.into_iter().cloned().collect(),
            decision_attributes: dec.into_iter().cloned().collect(),
            rows,
        })
    }

    /// CSV with `*` cells and a trailing coverage column.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = self.attributes.iter().chain(&self.decision_attributes).map(|a| a.name.as_str()).collect();
        header.push("coverage");
        w.write_record(&header).unwrap();
        for (i, r) in self.rows.iter().enumerate() {
            let mut rec: Vec<String> = (0..self.attributes.len()).map(|k| self.cell_text(i, k).to_owned()).collect();
            rec.extend(self.decision_text(&r.decision));
            rec.push(r.coverage.to_string());
            w.write_record(&rec).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    /// Reads [`ReducedTable::to_csv`] output. A trailing `coverage` column is
    /// optional (coverage 1 when absent).
    pub fn from_csv<R: Read>(src: R, decision: &DecisionColumns) -> Result<ReducedTable, TableError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(src);
        let mut header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let mut rows: Vec<Vec<String>> = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(TableError::RaggedRow { row: i + 1, expected: header.len(), found: rec.len() });
            }
            rows.push(rec.iter().map(str::to_owned).collect());
        }
        let coverage: Vec<u32> = if header.last().map(String::as_str) == Some("coverage") {
            header.pop();
            rows.iter_mut().map(|r| r.pop().unwrap().parse().unwrap_or(1)).collect()
        } else {
            vec![1; rows.len()]
        };
        let dec: Vec<usize> = match decision {
            DecisionColumns::Last | DecisionColumns::None => vec![header.len() - 1],
            DecisionColumns::Named(ns) => ns
                .iter()
                .map(|n| header.iter().position(|h| h == n).ok_or_else(|| TableError::MissingDecision(n.clone())))
                .collect::<Result<_, _>>()?,
        };
        let t = DecisionTable::from_text(header, &rows, &dec, "*");
        let cond = t.condition().to_vec();
        Ok(ReducedTable {
            attributes: cond.iter().map(|&a| t.attribute(a).clone()).collect(),
            decision_attributes: dec.iter().map(|&a| t.attribute(a).clone()).collect(),
            rows: (0..t.n_rows())
                .map(|r| ReducedRow {
                    values: t.tuple(r, &cond),
                    decision: t.decision_tuple(r),
                    coverage: coverage[r],
                    provenance: t.row_id(r),
                    members: vec![t.row_id(r)],
                })
                .collect(),
        })
    }

    /// Rows as (cell texts, decision texts, coverage), for multiset checks.
    pub fn text_rows(&self) -> Vec<(Vec<String>, Vec<String>, u32)> {
        let mut out: Vec<_> = (0..self.rows.len())
            .map(|i| {
                (
                    (0..self.attributes.len()).map(|k| self.cell_text(i, k).to_owned()).collect(),
                    self.decision_text(&self.rows[i].decision),
                    self.rows[i].coverage,
                )
            })
            .collect();
        out.sort();
        out
    }
}

/// Working copy of the reduct projection: one entry per (possibly merged)
/// row.
#[derive(Debug, Clone)]
struct Work {
    vals: Vec<Vec<u32>>,
    region: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl Work {
    fn dedupe(&self) -> (Work, Vec<usize>) {
        let mut seen: HashMap<(&[u32], u32), usize> = HashMap::new();
        let mut out = Work { vals: vec![], region: vec![], members: vec![] };
        let mut map = Vec::with_capacity(self.vals.len());
        for i in 0..self.vals.len() {
            let k = (self.vals[i].as_slice(), self.region[i]);
            let j = *seen.entry(k).or_insert_with(|| {
                out.vals.push(self.vals[i].clone());
                out.region.push(self.region[i]);
                out.members.push(Vec::new());
                out.vals.len() - 1
            });
            out.members[j].extend_from_slice(&self.members[i]);
            map.push(j);
        }
        (out, map)
    }

    fn multi_region(&self, rows: &[usize]) -> bool {
        rows.iter().any(|&r| self.region[r] != self.region[rows[0]])
    }

    fn root(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.vals.len()).collect();
        if !all.is_empty() && self.multi_region(&all) {
            vec![all]
        } else {
            vec![]
        }
    }
}

struct Projection {
    attrs: Vec<usize>,
    labels: Vec<Vec<u32>>,
    work: Work,
}

fn project(t: &DecisionTable, reduct: &[usize]) -> Result<Projection, ValredError> {
    for &a in reduct {
        if t.column(a).contains(&STAR) {
            return Err(ValredError::StarInput(t.name(a).to_owned()));
        }
    }
    let labels: Vec<Vec<u32>> =
        (0..t.n_rows()).map(|r| t.decision_tuple(r)).collect::<BTreeSet<_>>().into_iter().collect();
    let region: Vec<u32> =
        (0..t.n_rows()).map(|r| labels.binary_search(&t.decision_tuple(r)).unwrap() as u32).collect();
    let vals: Vec<Vec<u32>> = (0..t.n_rows()).map(|r| t.tuple(r, reduct)).collect();
    let mut seen: HashMap<&[u32], u32> = HashMap::new();
    let mut bad = BTreeSet::new();
    for r in 0..t.n_rows() {
        let d = *seen.entry(&vals[r]).or_insert(region[r]);
        if d != region[r] {
            bad.insert(vals[r].clone());
        }
    }
    if !bad.is_empty() {
        let rows = (0..t.n_rows()).filter(|&r| bad.contains(&vals[r])).map(|r| t.row_id(r)).collect();
        return Err(ValredError::Inconsistent(rows));
    }
    let members = (0..t.n_rows()).map(|r| vec![t.row_id(r)]).collect();
    Ok(Projection { attrs: reduct.to_vec(), labels, work: Work { vals, region, members } })
}

/// Splits each group by the value at `k`, keeping multi-region parts. Rows
/// landing in single-region parts are returned separately.
fn split(w: &Work, groups: &[Vec<usize>], k: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut kept = Vec::new();
    let mut semi = Vec::new();
    for g in groups {
        let mut by: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for &r in g {
            by.entry(w.vals[r][k]).or_default().push(r);
        }
        for (_, part) in by {
            if w.multi_region(&part) {
                kept.push(part);
            } else {
                semi.extend(part);
            }
        }
    }
    (kept, semi)
}

/// Scans `seq` (positions into the reduct), starring every attribute after
/// the step at which a row leaves the task. Returns the starred values and
/// the task groups after each step.
fn forward(w: &Work, seq: &[usize]) -> (Vec<Vec<u32>>, Vec<Vec<Vec<usize>>>) {
    let mut vals = w.vals.clone();
    let mut groups = w.root();
    let in_root: BTreeSet<usize> = groups.iter().flatten().copied().collect();
    for r in 0..vals.len() {
        if !in_root.contains(&r) {
            for &k in seq {
                vals[r][k] = STAR;
            }
        }
    }
    let mut layers = Vec::with_capacity(seq.len());
    for (i, &k) in seq.iter().enumerate() {
        let (kept, semi) = split(w, &groups, k);
        for r in semi {
            for &k2 in &seq[i + 1..] {
                vals[r][k2] = STAR;
            }
        }
        groups = kept;
        layers.push(groups.clone());
    }
    (vals, layers)
}

/// One decision-grouped member set, rows named by provenance id.
pub type RegionGroup = Vec<(u32, Vec<u32>)>;

/// Right-side refinement of one parent group under one attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarNode {
    pub star_set: RegionGroup,
    /// Value groups spanning ≥2 regions on their own.
    pub established: Vec<(u32, Vec<u32>)>,
    /// Single-region value groups.
    pub latent: Vec<(u32, Vec<u32>)>,
    /// Latent groups (by index) that some star member still conflicts with.
    pub influence: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarLayer {
    pub attr: usize,
    pub nodes: Vec<StarNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetentionStep {
    pub attr: usize,
    /// Intersection groups, rows named by provenance id.
    pub intersection: Vec<RegionGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueReduction {
    pub table: ReducedTable,
    /// Retention steps in scan order (last attribute first).
    pub steps: Vec<RetentionStep>,
    pub star_layers: Vec<StarLayer>,
}

fn by_region(w: &Work, rows: &[usize], ids: &[u32]) -> RegionGroup {
    let mut m: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &r in rows {
        m.entry(w.region[r]).or_default().push(ids[r]);
    }
    m.into_iter()
        .map(|(k, mut v)| {
            v.sort_unstable();
            (k, v)
        })
        .collect()
}

/// Refines right-side groups by `k`; a star cell joins every value group.
fn refine_star(w: &Work, groups: &[Vec<usize>], k: usize, ids: &[u32]) -> (Vec<Vec<usize>>, Vec<StarNode>) {
    let mut out = Vec::new();
    let mut nodes = Vec::new();
    for g in groups {
        let stars: Vec<usize> = g.iter().copied().filter(|&r| w.vals[r][k] == STAR).collect();
        let mut by: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for &r in g {
            if w.vals[r][k] != STAR {
                by.entry(w.vals[r][k]).or_default().push(r);
            }
        }
        let mut node = StarNode {
            star_set: by_region(w, &stars, ids),
            established: vec![],
            latent: vec![],
            influence: vec![],
        };
        if by.is_empty() && w.multi_region(&stars) {
            out.push(stars.clone());
        }
        for (v, part) in by {
            let named: Vec<u32> = part.iter().map(|&r| ids[r]).collect();
            let mut child = stars.clone();
            child.extend(&part);
            if w.multi_region(&part) {
                node.established.push((v, named));
            } else {
                if w.multi_region(&child) {
                    node.influence.push(node.latent.len());
                }
                node.latent.push((v, named));
            }
            if w.multi_region(&child) {
                out.push(child);
            }
        }
        nodes.push(node);
    }
    (out, nodes)
}

/// Members shared by a left group and a right group, per pair, kept when
/// they span ≥2 regions. Star members of each right group are matched first.
fn intersect(w: &Work, k: usize, left: &[Vec<usize>], right: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut left_of = vec![usize::MAX; w.vals.len()];
    for (i, g) in left.iter().enumerate() {
        for &r in g {
            left_of[r] = i;
        }
    }
    let mut out = Vec::new();
    for g in right {
        let ordered = g.iter().filter(|&&r| w.vals[r][k] == STAR).chain(g.iter().filter(|&&r| w.vals[r][k] != STAR));
        let mut by: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &r in ordered {
            if left_of[r] != usize::MAX {
                by.entry(left_of[r]).or_default().push(r);
            }
        }
        out.extend(by.into_values().filter(|p| w.multi_region(p)));
    }
    out
}

fn finish(p: &Projection, t: &DecisionTable, w: &Work) -> ReducedTable {
    let (d, _) = w.dedupe();
    let rows = (0..d.vals.len())
        .map(|i| {
            let mut members = d.members[i].clone();
            let provenance = members[0];
            members.sort_unstable();
            ReducedRow {
                values: d.vals[i].clone(),
                decision: p.labels[d.region[i] as usize].clone(),
                coverage: members.len() as u32,
                provenance,
                members,
            }
        })
        .collect();
    ReducedTable {
        attributes: p.attrs.iter().map(|&a| t.attribute(a).clone()).collect(),
        decision_attributes: t.decision().iter().map(|&a| t.attribute(a).clone()).collect(),
        rows,
    }
}

fn with_vals(w: &Work, vals: Vec<Vec<u32>>) -> Work {
    Work { vals, ..w.clone() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanDirection {
    LeftToRight,
    RightToLeft,
}

fn sequence(m: usize, dir: ScanDirection) -> Vec<usize> {
    match dir {
        ScanDirection::LeftToRight => (0..m).collect(),
        ScanDirection::RightToLeft => (0..m).rev().collect(),
    }
}

/// Complete reduction with its retention trace. `dir` names the direction
/// of the first (starring) pass; the retention pass runs the other way.
pub fn value_reduce_complete_traced(
    t: &DecisionTable,
    reduct: &[usize],
    dir: ScanDirection,
) -> Result<ValueReduction, ValredError> {
    let p = project(t, reduct)?;
    let seq = sequence(reduct.len(), dir);
    let (vals, layers) = forward(&p.work, &seq);
    let (mut w, map) = with_vals(&p.work, vals).dedupe();
    let ids: Vec<u32> = w.members.iter().map(|m| m[0]).collect();
    let mut right = w.root();
    let mut steps = Vec::new();
    let mut star_layers = Vec::new();
    for j in (0..seq.len()).rev() {
        let k = seq[j];
        let left: Vec<Vec<usize>> = if j == 0 {
            w.root()
        } else {
            layers[j - 1]
                .iter()
                .map(|g| g.iter().map(|&r| map[r]).collect::<BTreeSet<_>>().into_iter().collect())
                .collect()
        };
        let ist = intersect(&w, k, &left, &right);
        let mut retain = vec![false; w.vals.len()];
        for &r in ist.iter().flatten() {
            retain[r] = true;
        }
        for (r, keep) in retain.iter().enumerate() {
            if !keep {
                w.vals[r][k] = STAR;
            }
        }
        steps.push(RetentionStep {
            attr: reduct[k],
            intersection: ist.iter().map(|g| by_region(&w, g, &ids)).collect(),
        });
        let (next, nodes) = refine_star(&w, &right, k, &ids);
        star_layers.push(StarLayer { attr: reduct[k], nodes });
        right = next;
    }
    Ok(ValueReduction { table: finish(&p, t, &w), steps, star_layers })
}

/// Complete value reduction: starring pass, dedupe, retention pass in the
/// opposite direction, dedupe.
pub fn value_reduce_complete(t: &DecisionTable, reduct: &[usize]) -> Result<ReducedTable, ValredError> {
    Ok(value_reduce_complete_traced(t, reduct, ScanDirection::LeftToRight)?.table)
}

/// A single starring pass in `dir`, then dedupe.
pub fn value_reduce_incomplete(
    t: &DecisionTable,
    reduct: &[usize],
    dir: ScanDirection,
) -> Result<ReducedTable, ValredError> {
    let p = project(t, reduct)?;
    let (vals, _) = forward(&p.work, &sequence(reduct.len(), dir));
    Ok(finish(&p, t, &with_vals(&p.work, vals)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxReduction {
    pub table: ReducedTable,
    /// Row ids of objects that no longer match only rows of their decision.
    pub unresolved: Vec<u32>,
}

/// Union of the stars of both single passes, each taken on the original
/// values.
pub fn value_reduce_approx(t: &DecisionTable, reduct: &[usize]) -> Result<ApproxReduction, ValredError> {
    let p = project(t, reduct)?;
    let m = reduct.len();
    let (a, _) = forward(&p.work, &sequence(m, ScanDirection::LeftToRight));
    let (b, _) = forward(&p.work, &sequence(m, ScanDirection::RightToLeft));
    let vals = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| if u == STAR || v == STAR { STAR } else { u }).collect())
        .collect();
    let table = finish(&p, t, &with_vals(&p.work, vals));
    let mut unresolved = Vec::new();
    for r in 0..p.work.vals.len() {
        let obj = &p.work.vals[r];
        let d = &p.labels[p.work.region[r] as usize];
        let hits: Vec<&ReducedRow> = table
            .rows
            .iter()
            .filter(|row| row.values.iter().zip(obj).all(|(&c, &o)| c == STAR || c == o))
            .collect();
        if hits.is_empty() || hits.iter().any(|h| &h.decision != d) {
            unresolved.push(t.row_id(r));
        }
    }
    Ok(ApproxReduction { table, unresolved })
}

/// (row id, attribute) pairs whose value sits in the two-sided intersection
/// of its attribute over the reduct. Boundary rows count as one extra class.
pub fn core_values(t: &DecisionTable, reduct: &[usize]) -> BTreeSet<(u32, usize)> {
    let (p, _) = relabelled_partition(t);
    let mut out = BTreeSet::new();
    for ((x, perm), &a) in full_intersections(t, &p, reduct).iter().zip(reduct) {
        for g in x.member_groups(perm) {
            for (_, rows) in g {
                out.extend(rows.iter().map(|&r| (t.row_id(r as usize), a)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{load_table, IngestConfig};

    fn load(s: &str) -> DecisionTable {
        load_table(s.as_bytes(), &IngestConfig::default()).unwrap()
    }

    fn table2a() -> DecisionTable {
        load(include_str!("../tests/fixtures/table2a.csv"))
    }

    fn golden(s: &str) -> Vec<(Vec<String>, Vec<String>, u32)> {
        ReducedTable::from_csv(s.as_bytes(), &DecisionColumns::Last).unwrap().text_rows()
    }

    #[test]
    fn complete_matches_golden() {
        let t = table2a();
        let rt = value_reduce_complete(&t, &[1, 4, 5]).unwrap();
        assert_eq!(rt.text_rows(), golden(include_str!("../tests/fixtures/table8g.csv")));
    }

    #[test]
    fn incomplete_passes_match_golden() {
        let t = table2a();
        let l = value_reduce_incomplete(&t, &[1, 4, 5], ScanDirection::LeftToRight).unwrap();
        assert_eq!(l.text_rows(), golden(include_str!("../tests/fixtures/table9b.csv")));
        let r = value_reduce_incomplete(&t, &[1, 4, 5], ScanDirection::RightToLeft).unwrap();
        assert_eq!(r.text_rows(), golden(include_str!("../tests/fixtures/table9a.csv")));
    }

    #[test]
    fn approx_matches_golden_values() {
        let t = table2a();
        let a = value_reduce_approx(&t, &[1, 4, 5]).unwrap();
        let strip = |v: Vec<(Vec<String>, Vec<String>, u32)>| v.into_iter().map(|(c, d, _)| (c, d)).collect::<Vec<_>>();
        assert_eq!(strip(a.table.text_rows()), strip(golden(include_str!("../tests/fixtures/table9c.csv"))));
    }

    #[test]
    fn c5_retention_intersection() {
        let t = table2a();
        let v = value_reduce_complete_traced(&t, &[1, 4, 5], ScanDirection::LeftToRight).unwrap();
        let c5 = v.steps.iter().find(|s| s.attr == 4).unwrap();
        let mut got: Vec<RegionGroup> = c5.intersection.clone();
        got.sort();
        let mut want: Vec<RegionGroup> = vec![
            vec![(0, vec![1]), (2, vec![17])],
            vec![(0, vec![3]), (2, vec![15])],
            vec![(0, vec![3]), (1, vec![10])],
            vec![(0, vec![3]), (1, vec![13])],
        ];
        want.sort();
        assert_eq!(got, want);
        let c2 = v.steps.iter().find(|s| s.attr == 1).unwrap();
        assert!(!c2.intersection.is_empty());
    }

    #[test]
    fn constant_decision_collapses_to_one_star_row() {
        let t = load("a,b,D\n1,2,x\n2,1,x\n3,3,x\n");
        for rt in [
            value_reduce_complete(&t, &[0, 1]).unwrap(),
            value_reduce_incomplete(&t, &[0, 1], ScanDirection::LeftToRight).unwrap(),
        ] {
            assert_eq!(rt.rows.len(), 1);
            assert_eq!(rt.rows[0].values, vec![STAR, STAR]);
            assert_eq!(rt.rows[0].coverage, 3);
        }
    }

    #[test]
    fn rejects_inconsistent_projection_and_stars() {
        let t = load("a,b,D\n1,2,x\n1,1,y\n");
        assert!(matches!(value_reduce_complete(&t, &[0]), Err(ValredError::Inconsistent(_))));
        let s = load("a,b,D\n?,2,x\n1,1,y\n");
        assert!(matches!(value_reduce_complete(&s, &[0, 1]), Err(ValredError::StarInput(_))));
    }

    #[test]
    fn csv_round_trip() {
        let t = table2a();
        let rt = value_reduce_complete(&t, &[1, 4, 5]).unwrap();
        let back = ReducedTable::from_csv(rt.to_csv().as_bytes(), &DecisionColumns::Last).unwrap();
        assert_eq!(back.text_rows(), rt.text_rows());
        assert_eq!(back.reencode(&t).unwrap().text_rows(), rt.text_rows());
    }
}
