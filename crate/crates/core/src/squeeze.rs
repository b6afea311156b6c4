// SPDX-License-Identifier: Apache-2.0
//! Right-to-left and left-to-right squeeze passes, their composition into a
//! reduct search, plus core and irrelevant-attribute detection.

use std::borrow::Cow;
use std::fs::File;
use std::io::{BufReader, BufWriter};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::table::{boundary_rows, sort_by_decision, DRegionPartition, DecisionTable};
use crate::tasks::{refine, root_task, task_intersection, CascadeSuccessiveTask, Frame, TaskIntersection};

#[derive(Debug, Error)]
pub enum SqueezeError {
    #[error("fully inconsistent: no condition attributes but {0} decision regions")]
    FullyInconsistent(usize),
    #[error("attribute order is not a set of distinct condition attributes")]
    InvalidOrder,
    #[error("no saved layer for attribute {0:?}")]
    MissingLayer(String),
    #[error("layer spill failed: {0}")]
    Spill(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    RightToLeft,
    LeftToRight,
}

#[derive(Debug, Clone, Default)]
pub struct SqueezeOptions {
    /// Write saved layers to disk once their resident segment count passes
    /// this many.
    pub spill_threshold: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerStat {
    pub attr: Option<usize>,
    pub sorted_rows: u64,
    pub tasks: usize,
    pub members: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStats {
    /// Right-to-left layers of the final scan, in scan order.
    pub r2l: Vec<LayerStat>,
    pub l2r: Vec<LayerStat>,
    pub comparisons: u64,
    /// 1 when boundary rows forced a second right-to-left scan.
    pub reruns: u32,
}

fn stat(l: &CascadeSuccessiveTask) -> LayerStat {
    LayerStat { attr: l.layer, sorted_rows: l.sorted_rows, tasks: l.tasks.len(), members: l.member_count() }
}

/// Saved layers, resident or spilled to a temporary directory.
#[derive(Debug)]
struct LayerStore {
    mem: Vec<Option<CascadeSuccessiveTask>>,
    dir: Option<tempfile::TempDir>,
    threshold: Option<usize>,
    resident: usize,
}

impl LayerStore {
    fn new(threshold: Option<usize>) -> LayerStore {
        LayerStore { mem: Vec::new(), dir: None, threshold, resident: 0 }
    }

    fn push(&mut self, l: CascadeSuccessiveTask) -> Result<usize, SqueezeError> {
        let idx = self.mem.len();
        let size = l.segment_count();
        match self.threshold {
            Some(th) if self.resident + size > th => {
                if self.dir.is_none() {
                    self.dir = Some(tempfile::tempdir().map_err(|e| SqueezeError::Spill(e.to_string()))?);
                }
                let path = self.dir.as_ref().unwrap().path().join(format!("layer-{idx}.json"));
                let f = File::create(path).map_err(|e| SqueezeError::Spill(e.to_string()))?;
                serde_json::to_writer(BufWriter::new(f), &l).map_err(|e| SqueezeError::Spill(e.to_string()))?;
                self.mem.push(None);
            }
            _ => {
                self.resident += size;
                self.mem.push(Some(l));
            }
        }
        Ok(idx)
    }

    fn get(&self, idx: usize) -> Result<Cow<'_, CascadeSuccessiveTask>, SqueezeError> {
        match &self.mem[idx] {
            Some(l) => Ok(Cow::Borrowed(l)),
            None => {
                let path = self.dir.as_ref().unwrap().path().join(format!("layer-{idx}.json"));
                let f = File::open(path).map_err(|e| SqueezeError::Spill(e.to_string()))?;
                let l = serde_json::from_reader(BufReader::new(f)).map_err(|e| SqueezeError::Spill(e.to_string()))?;
                Ok(Cow::Owned(l))
            }
        }
    }

    fn spilled(&self) -> usize {
        self.mem.iter().filter(|l| l.is_none()).count()
    }
}

/// What the right-to-left pass leaves behind for the left-to-right pass.
#[derive(Debug)]
pub struct SqueezeState {
    pub partition: DRegionPartition,
    /// Final right-to-left frame; every saved layer's positions are valid here.
    pub frame: Frame,
    pub order: Vec<usize>,
    pub direction: Direction,
    /// Internal indices of rows relabelled as boundary.
    pub boundary: Vec<usize>,
    pub stats: ScanStats,
    store: LayerStore,
    root: usize,
    saved: Vec<(usize, usize)>,
}

impl SqueezeState {
    pub(crate) fn new(
        partition: DRegionPartition,
        frame: Frame,
        order: Vec<usize>,
        opts: &SqueezeOptions,
    ) -> Result<SqueezeState, SqueezeError> {
        let mut store = LayerStore::new(opts.spill_threshold);
        let root = store.push(root_task(&partition))?;
        Ok(SqueezeState {
            partition,
            frame,
            order,
            direction: Direction::RightToLeft,
            boundary: Vec::new(),
            stats: ScanStats::default(),
            store,
            root,
            saved: Vec::new(),
        })
    }

    pub(crate) fn save(&mut self, attr: usize, l: CascadeSuccessiveTask) -> Result<(), SqueezeError> {
        let idx = self.store.push(l)?;
        self.saved.push((attr, idx));
        Ok(())
    }

    /// The layer produced by `attr`, or the root task for `None`.
    pub fn layer(&self, attr: Option<usize>) -> Option<Cow<'_, CascadeSuccessiveTask>> {
        let idx = match attr {
            None => self.root,
            Some(a) => self.saved.iter().find(|(x, _)| *x == a)?.1,
        };
        self.store.get(idx).ok()
    }

    pub fn saved_attrs(&self) -> Vec<usize> {
        self.saved.iter().map(|(a, _)| *a).collect()
    }

    pub fn spilled_layers(&self) -> usize {
        self.store.spilled()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrCheck {
    pub attr: usize,
    pub kept: bool,
    pub intersection: TaskIntersection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductReport {
    /// Discovery order (rightmost first).
    pub s_reduct: Vec<usize>,
    /// Left-to-right order.
    pub reduct: Vec<usize>,
    /// One entry per s_reduct attribute, in left-to-right scan order.
    pub checks: Vec<AttrCheck>,
    /// Original row ids relabelled as boundary.
    pub boundary_rows: Vec<u32>,
    pub stats: ScanStats,
}

impl ReductReport {
    pub fn intersection(&self, attr: usize) -> Option<&TaskIntersection> {
        self.checks.iter().find(|c| c.attr == attr && c.kept).map(|c| &c.intersection)
    }

    pub fn to_json(&self, t: &DecisionTable) -> serde_json::Value {
        json!({
            "schema": 1,
            "s_reduct": t.names(&self.s_reduct),
            "reduct": t.names(&self.reduct),
            "boundary_row_ids": self.boundary_rows,
            "stats": {
                "r2l_sorted_rows": self.stats.r2l.iter().map(|l| l.sorted_rows).collect::<Vec<_>>(),
                "l2r_sorted_rows": self.stats.l2r.iter().map(|l| l.sorted_rows).collect::<Vec<_>>(),
                "comparisons": self.stats.comparisons,
                "reruns": self.stats.reruns,
            },
        })
    }
}

pub(crate) fn validate_order(t: &DecisionTable, order: &[usize]) -> Result<(), SqueezeError> {
    let mut seen = vec![false; t.attributes().len()];
    for &a in order {
        if !t.condition().contains(&a) || std::mem::replace(&mut seen[a], true) {
            return Err(SqueezeError::InvalidOrder);
        }
    }
    Ok(())
}

/// Column order with `left` moved to the front and `right` to the back.
pub fn pinned_order(t: &DecisionTable, left: &[usize], right: &[usize]) -> Vec<usize> {
    let mid = t.condition().iter().copied().filter(|a| !left.contains(a) && !right.contains(a));
    left.iter().copied().chain(mid).chain(right.iter().copied()).collect()
}

/// One right-to-left scan, stopping once the task set empties.
fn scan(
    t: &DecisionTable,
    p: DRegionPartition,
    order: &[usize],
    opts: &SqueezeOptions,
) -> Result<(Vec<usize>, SqueezeState, CascadeSuccessiveTask), SqueezeError> {
    let mut frame = Frame::new(&p);
    let mut layer = root_task(&p);
    let mut state = SqueezeState::new(p, Frame::new(&DRegionPartition::default_empty()), order.to_vec(), opts)?;
    let mut s_reduct = Vec::new();
    state.stats.r2l.push(stat(&layer));
    // a changed layer is saved once the next one no longer needs it
    let mut pending = None;
    for &a in order.iter().rev() {
        if layer.is_empty() {
            break;
        }
        let next = refine(&mut frame, &layer, a, t.column(a));
        state.stats.r2l.push(stat(&next));
        let prev = std::mem::replace(&mut layer, next);
        if let Some(pa) = pending.take() {
            state.save(pa, prev)?;
        }
        if layer.changed {
            s_reduct.push(a);
            pending = Some(a);
        }
    }
    if let Some(pa) = pending {
        state.save(pa, layer.clone())?;
    }
    state.frame = frame;
    Ok((s_reduct, state, layer))
}

/// Finds an s_reduct scanning `order` from its right end. Rows still in the
/// task after the leftmost attribute are relabelled as one boundary region
/// and the scan is repeated once.
pub fn r2l_squeeze(
    t: &DecisionTable,
    order: &[usize],
    opts: &SqueezeOptions,
) -> Result<(Vec<usize>, SqueezeState), SqueezeError> {
    validate_order(t, order)?;
    let p = sort_by_decision(t);
    if order.is_empty() && p.region_count() >= 2 {
        return Err(SqueezeError::FullyInconsistent(p.region_count()));
    }
    let (s, state, last) = scan(t, p, order, opts)?;
    if last.is_empty() {
        return Ok((s, state));
    }
    let boundary: Vec<usize> = last.members(&state.frame.perm).into_iter().map(|r| r as usize).collect();
    let p = sort_by_decision(t).with_boundary(t, &boundary);
    let (s, mut state, last) = scan(t, p, order, opts)?;
    debug_assert!(last.is_empty());
    state.boundary = boundary;
    state.stats.reruns = 1;
    Ok((s, state))
}

/// Keeps each attribute of `rs` whose fresh left-side task meets the saved
/// right-side task of the attributes after it.
pub fn l2r_squeeze(t: &DecisionTable, rs: &[usize], state: &mut SqueezeState) -> Result<ReductReport, SqueezeError> {
    l2r_keeping(t, rs, state, &[])
}

/// As [`l2r_squeeze`], with the attributes in `keep` retained unchecked.
pub(crate) fn l2r_keeping(
    t: &DecisionTable,
    rs: &[usize],
    state: &mut SqueezeState,
    keep: &[usize],
) -> Result<ReductReport, SqueezeError> {
    state.direction = Direction::LeftToRight;
    for (i, &a) in rs.iter().enumerate() {
        if i + 1 < rs.len() && state.layer(Some(rs[i + 1])).is_none() {
            return Err(SqueezeError::MissingLayer(t.name(a).to_owned()));
        }
    }
    let mut frame = Frame::new(&state.partition);
    let mut left = root_task(&state.partition);
    let mut reduct = Vec::new();
    let mut checks = Vec::new();
    let mut comparisons = 0;
    let mut l2r = vec![stat(&left)];
    for (i, &a) in rs.iter().enumerate() {
        let right = state.layer(rs.get(i + 1).copied()).expect("checked above");
        let x = task_intersection(&left, &frame.perm, &right, &state.frame.perm, &state.partition.region_of);
        comparisons += x.comparisons;
        let kept = !x.is_empty() || keep.contains(&a);
        if kept {
            reduct.push(a);
            left = refine(&mut frame, &left, a, t.column(a));
            l2r.push(stat(&left));
        }
        checks.push(AttrCheck { attr: a, kept, intersection: x });
    }
    let mut stats = state.stats.clone();
    stats.l2r = l2r;
    stats.comparisons = comparisons;
    let mut boundary_rows: Vec<u32> = state.boundary.iter().map(|&r| t.row_id(r)).collect();
    boundary_rows.sort_unstable();
    let mut s_reduct = rs.to_vec();
    s_reduct.reverse();
    Ok(ReductReport { s_reduct, reduct, checks, boundary_rows, stats })
}

pub fn twi_squeeze(t: &DecisionTable, order: Option<&[usize]>) -> Result<ReductReport, SqueezeError> {
    twi_squeeze_with(t, order, &SqueezeOptions::default())
}

pub fn twi_squeeze_with(
    t: &DecisionTable,
    order: Option<&[usize]>,
    opts: &SqueezeOptions,
) -> Result<ReductReport, SqueezeError> {
    let order = order.map_or_else(|| t.condition().to_vec(), <[usize]>::to_vec);
    let (s, mut state) = r2l_squeeze(t, &order, opts)?;
    let rs: Vec<usize> = s.iter().rev().copied().collect();
    l2r_squeeze(t, &rs, &mut state)
}

/// Partition with inconsistent rows folded into one extra region.
pub(crate) fn relabelled_partition(t: &DecisionTable) -> (DRegionPartition, Vec<usize>) {
    let b = boundary_rows(t);
    let p = sort_by_decision(t);
    if b.is_empty() {
        (p, b)
    } else {
        (p.with_boundary(t, &b), b)
    }
}

/// For each `attrs[k]`: the left task over `attrs[..k]` met with the right
/// task over `attrs[k+1..]`, nothing dropped on either side.
pub(crate) fn full_intersections(t: &DecisionTable, p: &DRegionPartition, attrs: &[usize]) -> Vec<(TaskIntersection, Vec<u32>)> {
    let n = attrs.len();
    let mut rf = Frame::new(p);
    let mut right = vec![root_task(p); n + 1];
    for k in (0..n).rev() {
        right[k] = refine(&mut rf, &right[k + 1], attrs[k], t.column(attrs[k]));
    }
    let mut lf = Frame::new(p);
    let mut left = vec![root_task(p)];
    for k in 0..n {
        let next = refine(&mut lf, &left[k], attrs[k], t.column(attrs[k]));
        left.push(next);
    }
    (0..n)
        .map(|k| {
            let x = task_intersection(&left[k], &lf.perm, &right[k + 1], &rf.perm, &p.region_of);
            (x, rf.perm.clone())
        })
        .collect()
}

/// Attributes in every reduct: those whose full two-sided intersection is
/// non-empty.
pub fn compute_core(t: &DecisionTable) -> Vec<usize> {
    let (p, _) = relabelled_partition(t);
    let c = t.condition();
    full_intersections(t, &p, c).into_iter().zip(c).filter(|((x, _), _)| !x.is_empty()).map(|(_, &a)| a).collect()
}

/// Attributes that discern no pair of objects with different decisions.
pub fn find_irrelevant(t: &DecisionTable) -> Vec<usize> {
    let p = sort_by_decision(t);
    let root = root_task(&p);
    if root.is_empty() {
        return t.condition().to_vec();
    }
    let base = Frame::new(&p);
    t.condition()
        .iter()
        .copied()
        .filter(|&a| {
            let mut f = base.clone();
            !refine(&mut f, &root, a, t.column(a)).changed
        })
        .collect()
}

/// Reruns the search with `known` moved to the left end.
pub fn alternate_reduct(t: &DecisionTable, known: &[usize]) -> Result<ReductReport, SqueezeError> {
    let mut k = known.to_vec();
    k.sort_by_key(|a| t.condition().iter().position(|c| c == a));
    twi_squeeze(t, Some(&pinned_order(t, &k, &[])))
}

impl DRegionPartition {
    pub(crate) fn default_empty() -> DRegionPartition {
        DRegionPartition { perm: vec![], ad: vec![], region_of: vec![], regions: vec![] }
    }
}
