// SPDX-License-Identifier: Apache-2.0
//! Decision tables: ingestion, interning, decision sorting, dedupe and the
//! consistency split.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Value id reserved for `*`. Real values start at 1, so star sorts first.
pub const STAR: u32 = 0;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("empty body")]
    EmptyBody,
    #[error("missing header row")]
    NoHeader,
    #[error("duplicate header name {0:?}")]
    DuplicateHeader(String),
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("decision column {0:?} absent from header")]
    MissingDecision(String),
    #[error("no condition attributes left after removing the decision")]
    NoConditions,
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Which header columns hold the decision.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum DecisionColumns {
    #[default]
    Last,
    Named(Vec<String>),
    /// Attribute-only table (input to [`decisionize`]).
    None,
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub decision: DecisionColumns,
    pub missing: String,
    pub delimiter: u8,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig { decision: DecisionColumns::Last, missing: "?".into(), delimiter: b',' }
    }
}

/// One column's name plus its dictionary. `values[id - 1]` is the text of id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<String>,
}

impl Attribute {
    pub fn text(&self, id: u32) -> &str {
        if id == STAR {
            "*"
        } else {
            &self.values[id as usize - 1]
        }
    }

    pub fn id_of(&self, text: &str) -> Option<u32> {
        if text == "*" {
            return Some(STAR);
        }
        self.values.binary_search_by(|v| v.as_str().cmp(text)).ok().map(|i| i as u32 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTable {
    attributes: Vec<Attribute>,
    columns: Vec<Vec<u32>>,
    condition: Vec<usize>,
    decision: Vec<usize>,
    row_ids: Vec<u32>,
}

impl DecisionTable {
    /// Builds a table from text cells. Dictionaries are sorted textually;
    /// cells equal to `missing` become [`STAR`].
    pub fn from_text(
        names: Vec<String>,
        rows: &[Vec<String>],
        decision: &[usize],
        missing: &str,
    ) -> DecisionTable {
        let width = names.len();
        let mut attributes = Vec::with_capacity(width);
        let mut columns = Vec::with_capacity(width);
        for (a, name) in names.into_iter().enumerate() {
            let dict: BTreeSet<&str> =
                rows.iter().map(|r| r[a].as_str()).filter(|v| *v != missing).collect();
            let values: Vec<String> = dict.into_iter().map(str::to_owned).collect();
            let attr = Attribute { name, values };
            let col = rows
                .iter()
                .map(|r| if r[a] == missing { STAR } else { attr.id_of(&r[a]).unwrap() })
                .collect();
            attributes.push(attr);
            columns.push(col);
        }
        let condition = (0..width).filter(|a| !decision.contains(a)).collect();
        let row_ids = (1..=rows.len() as u32).collect();
        DecisionTable { attributes, columns, condition, decision: decision.to_vec(), row_ids }
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, a: usize) -> &Attribute {
        &self.attributes[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.attributes[a].name
    }

    pub fn names(&self, attrs: &[usize]) -> Vec<String> {
        attrs.iter().map(|&a| self.name(a).to_owned()).collect()
    }

    pub fn attr_index(&self, name: &str) -> Result<usize, TableError> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| TableError::UnknownAttribute(name.to_owned()))
    }

    /// Resolves condition attribute names.
    pub fn condition_indices(&self, names: &[String]) -> Result<Vec<usize>, TableError> {
        names
            .iter()
            .map(|n| {
                let a = self.attr_index(n)?;
                if self.decision.contains(&a) {
                    Err(TableError::UnknownAttribute(n.clone()))
                } else {
                    Ok(a)
                }
            })
            .collect()
    }

    pub fn column(&self, a: usize) -> &[u32] {
        &self.columns[a]
    }

    pub fn value(&self, row: usize, a: usize) -> u32 {
        self.columns[a][row]
    }

    pub fn condition(&self) -> &[usize] {
        &self.condition
    }

    pub fn decision(&self) -> &[usize] {
        &self.decision
    }

    /// Original 1-based data-row index of internal row `row`.
    pub fn row_id(&self, row: usize) -> u32 {
        self.row_ids[row]
    }

    pub fn row_ids(&self) -> &[u32] {
        &self.row_ids
    }

    pub fn tuple(&self, row: usize, attrs: &[usize]) -> Vec<u32> {
        attrs.iter().map(|&a| self.columns[a][row]).collect()
    }

    pub fn decision_tuple(&self, row: usize) -> Vec<u32> {
        self.tuple(row, &self.decision)
    }

    pub fn decision_text(&self, tuple: &[u32]) -> Vec<String> {
        self.decision.iter().zip(tuple).map(|(&a, &v)| self.attributes[a].text(v).to_owned()).collect()
    }

    pub fn has_star(&self, attrs: &[usize]) -> bool {
        attrs.iter().any(|&a| self.columns[a].contains(&STAR))
    }

    /// Keeps the listed rows (internal indices) in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> DecisionTable {
        DecisionTable {
            attributes: self.attributes.clone(),
            columns: self.columns.iter().map(|c| rows.iter().map(|&r| c[r]).collect()).collect(),
            condition: self.condition.clone(),
            decision: self.decision.clone(),
            row_ids: rows.iter().map(|&r| self.row_ids[r]).collect(),
        }
    }

    /// Keeps only the listed condition attributes (and D). Attribute indices
    /// are preserved so reports stay comparable.
    pub fn with_condition(&self, attrs: &[usize]) -> DecisionTable {
        let mut t = self.clone();
        t.condition = attrs.to_vec();
        t
    }

    /// Writes the table back out as CSV, stars as the missing token.
    pub fn to_csv(&self, missing: &str) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let order: Vec<usize> = self.condition.iter().chain(&self.decision).copied().collect();
        w.write_record(order.iter().map(|&a| self.name(a))).unwrap();
        for r in 0..self.n_rows() {
            w.write_record(order.iter().map(|&a| {
                let v = self.columns[a][r];
                if v == STAR {
                    missing
                } else {
                    self.attributes[a].text(v)
                }
            }))
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Parses CSV with a header row.
pub fn load_table<R: Read>(source: R, config: &IngestConfig) -> Result<DecisionTable, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(config.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(TableError::NoHeader);
    }
    let mut seen = BTreeSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(TableError::DuplicateHeader(h.clone()));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(TableError::RaggedRow { row: i + 1, expected: header.len(), found: rec.len() });
        }
        rows.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    if rows.is_empty() {
        return Err(TableError::EmptyBody);
    }
    let decision = match &config.decision {
        DecisionColumns::Last => vec![header.len() - 1],
        DecisionColumns::None => vec![],
        DecisionColumns::Named(names) => names
            .iter()
            .map(|n| header.iter().position(|h| h == n).ok_or_else(|| TableError::MissingDecision(n.clone())))
            .collect::<Result<_, _>>()?,
    };
    if decision.len() == header.len() {
        return Err(TableError::NoConditions);
    }
    Ok(DecisionTable::from_text(header, &rows, &decision, &config.missing))
}

/// Contiguous span of the decision-sorted permutation holding one D-Region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub first: u32,
    pub last: u32,
    /// Decision tuple, or `None` for the synthetic boundary region.
    pub label: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DRegionPartition {
    /// position -> row
    pub perm: Vec<u32>,
    /// row -> position
    pub ad: Vec<u32>,
    pub region_of: Vec<u32>,
    pub regions: Vec<Region>,
}

impl DRegionPartition {
    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    /// Regions by decision tuple, with `boundary` rows in one extra region
    /// placed last. Stable within each region.
    fn build(t: &DecisionTable, boundary: &[usize]) -> DRegionPartition {
        let n = t.n_rows();
        const BOUNDARY: u64 = u64::MAX;
        // mixed-radix code over the decision ids keeps tuple order
        let code = |r: usize| -> Option<u64> {
            t.decision.iter().try_fold(0u64, |acc, &a| {
                let radix = t.attributes[a].values.len() as u64 + 1;
                acc.checked_mul(radix)?.checked_add(t.columns[a][r] as u64).filter(|&c| c < BOUNDARY)
            })
        };
        let mut codes: Vec<u64> = match (0..n).map(code).collect::<Option<Vec<u64>>>() {
            Some(c) => c,
            None => {
                let distinct: BTreeSet<Vec<u32>> = (0..n).map(|r| t.decision_tuple(r)).collect();
                let rank: HashMap<Vec<u32>, u64> = distinct.into_iter().zip(0..).collect();
                (0..n).map(|r| rank[&t.decision_tuple(r)]).collect()
            }
        };
        for &r in boundary {
            codes[r] = BOUNDARY;
        }
        let mut distinct = codes.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let ranks: Vec<u32> = codes.iter().map(|c| distinct.binary_search(c).unwrap() as u32).collect();
        let rows: Vec<u32> = (0..n as u32).collect();
        let perm = crate::tasks::counting_sort_by(&rows, distinct.len(), |&r| ranks[r as usize]);
        let mut ad = vec![0u32; n];
        let mut region_of = vec![0u32; n];
        let mut regions: Vec<Region> = Vec::new();
        for (p, &row) in perm.iter().enumerate() {
            let row = row as usize;
            ad[row] = p as u32;
            match regions.last_mut() {
                Some(r) if region_of[perm[r.first as usize] as usize] == ranks[row] => r.last = p as u32,
                _ => {
                    let label = (codes[row] != BOUNDARY).then(|| t.decision_tuple(row));
                    regions.push(Region { first: p as u32, last: p as u32, label });
                }
            }
            // rank for now, region index below
            region_of[row] = ranks[row];
        }
        for (i, r) in regions.iter().enumerate() {
            for &row in &perm[r.first as usize..=r.last as usize] {
                region_of[row as usize] = i as u32;
            }
        }
        DRegionPartition { perm, ad, region_of, regions }
    }

    /// Moves the given rows into one extra region placed last.
    pub fn with_boundary(&self, t: &DecisionTable, boundary: &[usize]) -> DRegionPartition {
        DRegionPartition::build(t, boundary)
    }
}

/// Stable sort by decision tuple.
pub fn sort_by_decision(t: &DecisionTable) -> DRegionPartition {
    DRegionPartition::build(t, &[])
}

/// Collapses rows equal on C ∪ D. Returns the table and, per kept row, the
/// internal indices of the rows it stands for.
pub fn dedupe(t: &DecisionTable) -> (DecisionTable, Vec<Vec<usize>>) {
    let all: Vec<usize> = t.condition.iter().chain(&t.decision).copied().collect();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut keep = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for r in 0..t.n_rows() {
        let key = t.tuple(r, &all);
        match seen.get(&key) {
            Some(&g) => groups[g].push(r),
            None => {
                seen.insert(key, groups.len());
                groups.push(vec![r]);
                keep.push(r);
            }
        }
    }
    (t.select_rows(&keep), groups)
}

/// Internal indices of rows whose condition tuple occurs with more than one
/// decision tuple.
pub fn boundary_rows(t: &DecisionTable) -> Vec<usize> {
    let mut first: HashMap<Vec<u32>, (Vec<u32>, bool)> = HashMap::new();
    for r in 0..t.n_rows() {
        let d = t.decision_tuple(r);
        first
            .entry(t.tuple(r, &t.condition))
            .and_modify(|(d0, mixed)| *mixed |= *d0 != d)
            .or_insert((d, false));
    }
    (0..t.n_rows()).filter(|&r| first[&t.tuple(r, &t.condition)].1).collect()
}

pub fn separate_inconsistent(t: &DecisionTable) -> (DecisionTable, DecisionTable) {
    let boundary = boundary_rows(t);
    let mut is_b = vec![false; t.n_rows()];
    for &r in &boundary {
        is_b[r] = true;
    }
    let positive: Vec<usize> = (0..t.n_rows()).filter(|&r| !is_b[r]).collect();
    (t.select_rows(&positive), t.select_rows(&boundary))
}

/// Turns an attribute-only table into a decision table whose decision labels
/// the classes of identical rows. Labels are zero-padded so textual and
/// numeric order agree.
pub fn decisionize(t: &DecisionTable) -> DecisionTable {
    let attrs: Vec<usize> = t.condition.clone();
    let tuples: BTreeSet<Vec<u32>> = (0..t.n_rows()).map(|r| t.tuple(r, &attrs)).collect();
    let width = tuples.len().saturating_sub(1).to_string().len();
    let label: HashMap<&Vec<u32>, String> =
        tuples.iter().enumerate().map(|(i, k)| (k, format!("{i:0width$}"))).collect();
    let mut name = String::from("class");
    while t.attributes.iter().any(|a| a.name == name) {
        name.push('_');
    }
    let col_text: Vec<String> = (0..t.n_rows()).map(|r| label[&t.tuple(r, &attrs)].clone()).collect();
    let values: Vec<String> = {
        let s: BTreeSet<&String> = col_text.iter().collect();
        s.into_iter().cloned().collect()
    };
    let attr = Attribute { name, values };
    let col = col_text.iter().map(|v| attr.id_of(v).unwrap()).collect();
    let mut out = t.clone();
    out.decision = vec![out.attributes.len()];
    out.attributes.push(attr);
    out.columns.push(col);
    out
}
