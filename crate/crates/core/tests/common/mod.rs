// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use demarc_core::table::{load_table, DecisionTable, IngestConfig};
use rand::Rng;

pub fn load(csv: &str) -> DecisionTable {
    load_table(csv.as_bytes(), &IngestConfig::default()).unwrap()
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub fn table2a() -> DecisionTable {
    load(&fixture("table2a.csv"))
}

/// CSV text for a random table: `n` rows, `c` condition columns with up to
/// `v` values each, decision among up to `d` classes.
pub fn random_csv<R: Rng>(rng: &mut R, n: usize, c: usize, v: u32, d: u32) -> String {
    let mut s: String = (1..=c).map(|i| format!("C{i},")).collect();
    s.push_str("D\n");
    for _ in 0..n {
        for _ in 0..c {
            s.push_str(&format!("{},", rng.gen_range(0..v)));
        }
        s.push_str(&format!("{}\n", rng.gen_range(0..d)));
    }
    s
}

pub fn random_table<R: Rng>(rng: &mut R, max_n: usize, max_c: usize, v: u32, d: u32) -> DecisionTable {
    let n = rng.gen_range(1..=max_n);
    let c = rng.gen_range(1..=max_c);
    load(&random_csv(rng, n, c, v, d))
}

/// Random table with the decision a function of the condition tuple.
pub fn random_consistent<R: Rng>(rng: &mut R, max_n: usize, max_c: usize, v: u32, d: u32) -> DecisionTable {
    use std::collections::HashMap;
    let n = rng.gen_range(1..=max_n);
    let c = rng.gen_range(1..=max_c);
    let mut label: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut s: String = (1..=c).map(|i| format!("C{i},")).collect();
    s.push_str("D\n");
    for _ in 0..n {
        let row: Vec<u32> = (0..c).map(|_| rng.gen_range(0..v)).collect();
        let dec = *label.entry(row.clone()).or_insert_with(|| rng.gen_range(0..d));
        for x in row {
            s.push_str(&format!("{x},"));
        }
        s.push_str(&format!("{dec}\n"));
    }
    load(&s)
}

/// CSV text from condition rows and decisions.
pub fn csv_of(rows: &[(Vec<u32>, u32)]) -> String {
    let c = rows.first().map_or(1, |r| r.0.len());
    let mut s: String = (1..=c).map(|i| format!("C{i},")).collect();
    s.push_str("D\n");
    for (cond, d) in rows {
        for x in cond {
            s.push_str(&format!("{x},"));
        }
        s.push_str(&format!("{d}\n"));
    }
    s
}

/// Rows of a random table, shrinkable.
pub fn rows_strategy(
    max_n: usize,
    max_c: usize,
    v: u32,
    d: u32,
) -> impl proptest::strategy::Strategy<Value = Vec<(Vec<u32>, u32)>> {
    use proptest::prelude::*;
    (1..=max_c).prop_flat_map(move |c| proptest::collection::vec((proptest::collection::vec(0..v, c), 0..d), 1..=max_n))
}

pub fn table_strategy(max_n: usize, max_c: usize, v: u32, d: u32) -> impl proptest::strategy::Strategy<Value = DecisionTable> {
    use proptest::prelude::*;
    rows_strategy(max_n, max_c, v, d).prop_map(|rows| load(&csv_of(&rows)))
}

/// As [`table_strategy`], with each condition tuple keeping the decision of
/// its first occurrence.
pub fn consistent_strategy(
    max_n: usize,
    max_c: usize,
    v: u32,
    d: u32,
) -> impl proptest::strategy::Strategy<Value = DecisionTable> {
    use proptest::prelude::*;
    rows_strategy(max_n, max_c, v, d).prop_map(|mut rows| {
        let mut seen: std::collections::HashMap<Vec<u32>, u32> = std::collections::HashMap::new();
        for (cond, dec) in rows.iter_mut() {
            *dec = *seen.entry(cond.clone()).or_insert(*dec);
        }
        load(&csv_of(&rows))
    })
}
