// SPDX-License-Identifier: Apache-2.0
//! Cascade tasks: queues of same-valued segments spanning several D-Regions,
//! layer refinement by counting sort, and the segment algebra used to
//! intersect layers from opposite scans.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::table::{DRegionPartition, DecisionTable};

/// A run of positions `[first, last]` (0-based, inclusive) inside one
/// D-Region, or an explicit member set when `members` is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub first: u32,
    pub last: u32,
    pub region: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<u32>>,
}

impl Segment {
    pub fn span(region: u32, first: u32, last: u32) -> Segment {
        debug_assert!(first <= last);
        Segment { first, last, region, members: None }
    }

    /// Member-set segment; `first`/`last` hold the min and max member.
    pub fn members(region: u32, mut rows: Vec<u32>) -> Segment {
        rows.sort_unstable();
        Segment { first: rows[0], last: *rows.last().unwrap(), region, members: Some(rows) }
    }

    pub fn len(&self) -> usize {
        match &self.members {
            Some(m) => m.len(),
            None => (self.last - self.first + 1) as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rows covered, resolving positions through `perm`.
    pub fn rows<'a>(&'a self, perm: &'a [u32]) -> Box<dyn Iterator<Item = u32> + 'a> {
        match &self.members {
            Some(m) => Box::new(m.iter().copied()),
            None => Box::new(perm[self.first as usize..=self.last as usize].iter().copied()),
        }
    }
}

/// Conglutinative match: two positional segments share a position.
pub fn segments_overlap(a: &Segment, b: &Segment) -> bool {
    (a.first as i64 - b.last as i64) * (a.last as i64 - b.first as i64) <= 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Queue {
    pub value: u32,
    /// Index of the parent task in the previous layer.
    pub parent: u32,
    /// Ordered by (region, first).
    pub segments: Vec<Segment>,
}

impl Queue {
    pub fn dr_count(&self) -> usize {
        let mut n = 0;
        let mut last = None;
        for s in &self.segments {
            if last != Some(s.region) {
                n += 1;
                last = Some(s.region);
            }
        }
        n
    }

    pub fn member_count(&self) -> usize {
        self.segments.iter().map(Segment::len).sum()
    }

    /// Segments grouped by region.
    pub fn d_rs(&self) -> Vec<(u32, Vec<&Segment>)> {
        let mut out: Vec<(u32, Vec<&Segment>)> = Vec::new();
        for s in &self.segments {
            match out.last_mut() {
                Some((r, v)) if *r == s.region => v.push(s),
                _ => out.push((s.region, vec![s])),
            }
        }
        out
    }
}

/// One layer lsT: tasks with ≥2 regions and the semi-tasks split off here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeSuccessiveTask {
    /// Attribute that produced the layer; `None` for the root task T_D.
    pub layer: Option<usize>,
    pub tasks: Vec<Queue>,
    pub semi_tasks: Vec<Queue>,
    /// Some parent queue split, i.e. the task set differs from the parent's.
    pub changed: bool,
    /// Rows re-sorted to build this layer.
    pub sorted_rows: u64,
}

impl CascadeSuccessiveTask {
    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn member_count(&self) -> usize {
        self.tasks.iter().map(Queue::member_count).sum()
    }

    pub fn segment_count(&self) -> usize {
        self.tasks.iter().map(|q| q.segments.len()).sum()
    }

    /// Rows covered by `tasks`.
    pub fn members(&self, perm: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> =
            self.tasks.iter().flat_map(|q| q.segments.iter().flat_map(|s| s.rows(perm))).collect();
        out.sort_unstable();
        out
    }
}

/// The current row ordering of one scan.
#[derive(Debug, Clone)]
pub struct Frame {
    pub perm: Vec<u32>,
    pub region_of: Vec<u32>,
    counts: Vec<u32>,
    touched: Vec<u32>,
    buf: Vec<u32>,
    keys: Vec<u32>,
}

impl Frame {
    pub fn new(p: &DRegionPartition) -> Frame {
        Frame {
            perm: p.perm.clone(),
            region_of: p.region_of.clone(),
            counts: Vec::new(),
            touched: Vec::new(),
            buf: Vec::new(),
            keys: Vec::new(),
        }
    }

    /// Row to position, the inverse of `perm`.
    pub fn ad(&self) -> Vec<u32> {
        let mut ad = vec![0u32; self.perm.len()];
        for (p, &r) in self.perm.iter().enumerate() {
            ad[r as usize] = p as u32;
        }
        ad
    }

    /// Stable sort of `perm[first..=last]` by `col`. The sorted keys are
    /// left in `keys`.
    fn sort_span(&mut self, first: usize, last: usize, col: &[u32]) {
        let slice = &mut self.perm[first..=last];
        self.keys.clear();
        self.keys.extend(slice.iter().map(|&r| col[r as usize]));
        let keys = &mut self.keys;
        if slice.len() <= 24 {
            for i in 1..slice.len() {
                let (x, k) = (slice[i], keys[i]);
                let mut j = i;
                while j > 0 && keys[j - 1] > k {
                    slice[j] = slice[j - 1];
                    keys[j] = keys[j - 1];
                    j -= 1;
                }
                slice[j] = x;
                keys[j] = k;
            }
        } else {
            self.touched.clear();
            for &v in keys.iter() {
                let v = v as usize;
                if v >= self.counts.len() {
                    self.counts.resize(v + 1, 0);
                }
                if self.counts[v] == 0 {
                    self.touched.push(v as u32);
                }
                self.counts[v] += 1;
            }
            if self.touched.len() > 1 {
                self.touched.sort_unstable();
                let mut at = 0u32;
                for &v in &self.touched {
                    let c = self.counts[v as usize];
                    self.counts[v as usize] = at;
                    at += c;
                }
                self.buf.clear();
                self.buf.resize(slice.len(), 0);
                for (&r, &v) in slice.iter().zip(keys.iter()) {
                    self.buf[self.counts[v as usize] as usize] = r;
                    self.counts[v as usize] += 1;
                }
                slice.copy_from_slice(&self.buf);
                // keys come out as runs of the touched values
                let mut at = 0;
                for &v in &self.touched {
                    let end = self.counts[v as usize] as usize;
                    keys[at..end].fill(v);
                    at = end;
                }
            }
            for &v in &self.touched {
                self.counts[v as usize] = 0;
            }
        }
    }
}

/// T_D: one queue holding every D-Region, or nothing when r_D ≤ 1.
pub fn root_task(p: &DRegionPartition) -> CascadeSuccessiveTask {
    let segments: Vec<Segment> =
        p.regions.iter().enumerate().map(|(i, r)| Segment::span(i as u32, r.first, r.last)).collect();
    let q = Queue { value: 0, parent: 0, segments };
    let (tasks, semi_tasks) = if p.regions.len() >= 2 { (vec![q], vec![]) } else { (vec![], vec![q]) };
    CascadeSuccessiveTask { layer: None, tasks, semi_tasks, changed: false, sorted_rows: 0 }
}

/// First layer under `attr`: the root task refined once.
pub fn initial_task(
    frame: &mut Frame,
    p: &DRegionPartition,
    attr: usize,
    col: &[u32],
) -> CascadeSuccessiveTask {
    refine(frame, &root_task(p), attr, col)
}

/// Re-sorts every task segment under `col` and regroups per (parent, value).
pub fn refine(
    frame: &mut Frame,
    prev: &CascadeSuccessiveTask,
    attr: usize,
    col: &[u32],
) -> CascadeSuccessiveTask {
    let mut tasks = Vec::new();
    let mut semi_tasks = Vec::new();
    let mut changed = false;
    let mut sorted_rows = 0u64;
    let mut runs: Vec<(u32, Segment)> = Vec::new();
    for (qi, q) in prev.tasks.iter().enumerate() {
        runs.clear();
        for s in &q.segments {
            let (f, l) = (s.first as usize, s.last as usize);
            sorted_rows += (l - f + 1) as u64;
            frame.sort_span(f, l, col);
            let keys = &frame.keys;
            let mut start = 0;
            for i in 1..=keys.len() {
                if i == keys.len() || keys[i] != keys[start] {
                    runs.push((keys[start], Segment::span(s.region, (f + start) as u32, (f + i) as u32 - 1)));
                    start = i;
                }
            }
        }
        // stable: region order survives inside each value
        runs.sort_by_key(|(v, _)| *v);
        let mut groups = 0;
        let mut i = 0;
        while i < runs.len() {
            let v = runs[i].0;
            let mut j = i;
            while j < runs.len() && runs[j].0 == v {
                j += 1;
            }
            let queue = Queue {
                value: v,
                parent: qi as u32,
                segments: runs[i..j].iter().map(|(_, s)| s.clone()).collect(),
            };
            if queue.dr_count() >= 2 {
                tasks.push(queue);
            } else {
                semi_tasks.push(queue);
            }
            groups += 1;
            i = j;
        }
        changed |= groups > 1;
    }
    CascadeSuccessiveTask { layer: Some(attr), tasks, semi_tasks, changed, sorted_rows }
}

/// Structural comparison: same covered ranges grouped the same way.
pub fn tasks_equal(a: &CascadeSuccessiveTask, b: &CascadeSuccessiveTask) -> bool {
    let key = |t: &CascadeSuccessiveTask| {
        let mut qs: Vec<Vec<(u32, u32, u32)>> = t
            .tasks
            .iter()
            .map(|q| q.segments.iter().map(|s| (s.region, s.first, s.last)).collect())
            .collect();
        qs.sort();
        qs
    };
    key(a) == key(b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionGroup {
    pub right_task: u32,
    pub left_task: u32,
    /// Positions in the right operand's frame, ordered by (region, first).
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TaskIntersection {
    pub groups: Vec<IntersectionGroup>,
    pub comparisons: u64,
}

impl TaskIntersection {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Member rows of each group, by region.
    pub fn member_groups(&self, right_perm: &[u32]) -> Vec<Vec<(u32, Vec<u32>)>> {
        self.groups
            .iter()
            .map(|g| {
                let mut out: Vec<(u32, Vec<u32>)> = Vec::new();
                for s in &g.segments {
                    let rows = s.rows(right_perm);
                    match out.last_mut() {
                        Some((r, v)) if *r == s.region => v.extend(rows),
                        _ => out.push((s.region, rows.collect())),
                    }
                }
                for (_, v) in &mut out {
                    v.sort_unstable();
                }
                out
            })
            .collect()
    }
}

/// lT ∩⁺ lT': members shared by a task of each operand, grouped per task
/// pair and kept when ≥2 regions survive. `left` lives in `left_perm`'s
/// frame and is re-expressed as runs of `right_perm`'s frame, then a single
/// merge walk matches the two sorted segment lists.
pub fn task_intersection(
    left: &CascadeSuccessiveTask,
    left_perm: &[u32],
    right: &CascadeSuccessiveTask,
    right_perm: &[u32],
    region_of: &[u32],
) -> TaskIntersection {
    if left.tasks.is_empty() || right.tasks.is_empty() {
        return TaskIntersection::default();
    }
    const NONE: u32 = u32::MAX;
    let n = right_perm.len();
    let mut left_q = vec![NONE; n];
    for (qi, q) in left.tasks.iter().enumerate() {
        for s in &q.segments {
            for r in s.rows(left_perm) {
                left_q[r as usize] = qi as u32;
            }
        }
    }
    // (first, last, right queue, region), by position
    let mut b: Vec<(u32, u32, u32, u32)> = right
        .tasks
        .iter()
        .enumerate()
        .flat_map(|(qi, q)| q.segments.iter().map(move |s| (s.first, s.last, qi as u32, s.region)))
        .collect();
    b.sort_unstable();
    // left members re-expressed as maximal runs of right positions within
    // one left queue and one region: (first, last, left queue)
    let mut a: Vec<(u32, u32, u32)> = Vec::new();
    for (p, &row) in right_perm.iter().enumerate() {
        let lq = left_q[row as usize];
        if lq == NONE {
            continue;
        }
        let p = p as u32;
        match a.last_mut() {
            Some((_, last, q))
                if *q == lq
                    && *last + 1 == p
                    && region_of[right_perm[*last as usize] as usize] == region_of[row as usize] =>
            {
                *last = p
            }
            _ => a.push((p, p, lq)),
        }
    }

    let mut comparisons = 0u64;
    // (right queue, left queue, region, first, last)
    let mut pieces: Vec<(u32, u32, u32, u32, u32)> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        comparisons += 1;
        let sa = Segment::span(0, a[i].0, a[i].1);
        let sb = Segment::span(b[j].3, b[j].0, b[j].1);
        if segments_overlap(&sa, &sb) {
            pieces.push((b[j].2, a[i].2, sb.region, sa.first.max(sb.first), sa.last.min(sb.last)));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    // pieces come out in position order; two stable counting passes group
    // them by (right queue, left queue) without disturbing that order
    let pieces = counting_sort_by(&counting_sort_by(&pieces, left.tasks.len(), |p| p.1), right.tasks.len(), |p| p.0);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        let (rq, lq) = (pieces[i].0, pieces[i].1);
        let mut j = i;
        while j < pieces.len() && pieces[j].0 == rq && pieces[j].1 == lq {
            j += 1;
        }
        let segments: Vec<Segment> =
            pieces[i..j].iter().map(|&(_, _, r, f, l)| Segment::span(r, f, l)).collect();
        let q = Queue { value: 0, parent: 0, segments };
        if q.dr_count() >= 2 {
            groups.push(IntersectionGroup { right_task: rq, left_task: lq, segments: q.segments });
        }
        i = j;
    }
    TaskIntersection { groups, comparisons }
}

/// Stable sort by a key below `range`.
pub(crate) fn counting_sort_by<T: Copy>(items: &[T], range: usize, key: impl Fn(&T) -> u32) -> Vec<T> {
    let mut start = vec![0usize; range + 1];
    for x in items {
        start[key(x) as usize + 1] += 1;
    }
    for k in 1..=range {
        start[k] += start[k - 1];
    }
    let mut out = items.to_vec();
    for x in items {
        let k = key(x) as usize;
        out[start[k]] = *x;
        start[k] += 1;
    }
    out
}

fn fmt_segment(out: &mut String, s: &Segment) {
    match &s.members {
        Some(m) => {
            let ids: Vec<String> = m.iter().map(|x| (x + 1).to_string()).collect();
            let _ = write!(out, "{{{}}}_{}", ids.join(","), s.region);
        }
        None => {
            let _ = write!(out, "[{},{}]_{}", s.first + 1, s.last + 1, s.region);
        }
    }
}

/// `{[1,4]_0,[7,8]_1; [5,6]_0}`: one `;`-separated entry per queue, 1-based.
pub fn format_segment_lists<'a>(lists: impl IntoIterator<Item = &'a [Segment]>) -> String {
    let mut out = String::from("{");
    for (i, segs) in lists.into_iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        for (k, s) in segs.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            fmt_segment(&mut out, s);
        }
    }
    out.push('}');
    out
}

pub fn format_queues(qs: &[Queue]) -> String {
    format_segment_lists(qs.iter().map(|q| q.segments.as_slice()))
}

pub fn format_intersection(x: &TaskIntersection) -> String {
    format_segment_lists(x.groups.iter().map(|g| g.segments.as_slice()))
}

/// Indented dump of a chain of layers (root first).
pub fn dump_layers(t: &DecisionTable, layers: &[CascadeSuccessiveTask]) -> String {
    let mut out = String::new();
    for l in layers {
        let name = l.layer.map_or("D", |a| t.name(a));
        let _ = writeln!(out, "lsT[{name}]");
        let _ = writeln!(out, "  lT: {}", format_queues(&l.tasks));
        let _ = writeln!(out, "  sT: {}", format_queues(&l.semi_tasks));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{load_table, sort_by_decision, IngestConfig};

    fn table2a() -> DecisionTable {
        load_table(include_str!("../tests/fixtures/table2a.csv").as_bytes(), &IngestConfig::default())
            .unwrap()
    }

    #[test]
    fn overlap_cases() {
        let s = |f, l| Segment::span(0, f, l);
        assert!(segments_overlap(&s(1, 4), &s(3, 6)));
        assert!(!segments_overlap(&s(1, 2), &s(3, 4)));
        assert!(segments_overlap(&s(5, 5), &s(5, 5)));
    }

    #[test]
    fn first_layers_of_table2a() {
        let t = table2a();
        let p = sort_by_decision(&t);
        let mut f = Frame::new(&p);
        let l6 = initial_task(&mut f, &p, 5, t.column(5));
        assert_eq!(format_queues(&l6.tasks), "{[1,4]_0,[7,8]_1,[15,18]_2; [5,6]_0,[9,12]_1}");
        assert_eq!(format_queues(&l6.semi_tasks), "{[13,14]_1}");
        let l5 = refine(&mut f, &l6, 4, t.column(4));
        assert_eq!(
            format_queues(&l5.tasks),
            "{[1,2]_0,[15,16]_2; [3,4]_0,[7,8]_1,[17,18]_2; [5,6]_0,[11,12]_1}"
        );
        assert!(l5.changed);
        let l4 = refine(&mut f, &l5, 3, t.column(3));
        assert!(!l4.changed);
        assert!(tasks_equal(&l4, &l5));
        assert!(!tasks_equal(&l5, &l6));
    }

    #[test]
    fn constant_and_injective_attributes() {
        let t = load_table("a,b,D\n1,1,x\n1,2,y\n1,3,x\n".as_bytes(), &IngestConfig::default()).unwrap();
        let p = sort_by_decision(&t);
        let mut f = Frame::new(&p);
        let c = initial_task(&mut f, &p, 0, t.column(0));
        assert!(tasks_equal(&c, &root_task(&p)));
        assert!(!c.changed);
        let i = initial_task(&mut f, &p, 1, t.column(1));
        assert!(i.tasks.is_empty());
        assert_eq!(i.semi_tasks.len(), 3);
    }

    #[test]
    fn empty_operand_gives_empty_intersection() {
        let t = table2a();
        let p = sort_by_decision(&t);
        let root = root_task(&p);
        let empty = CascadeSuccessiveTask { tasks: vec![], ..root.clone() };
        assert!(task_intersection(&empty, &p.perm, &root, &p.perm, &p.region_of).is_empty());
        let x = task_intersection(&root, &p.perm, &root, &p.perm, &p.region_of);
        assert_eq!(format_intersection(&x), "{[1,6]_0,[7,14]_1,[15,18]_2}");
    }
}
