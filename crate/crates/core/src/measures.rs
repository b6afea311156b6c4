// SPDX-License-Identifier: Apache-2.0
//! Variety ϖ: the number of ordered pairs a partition separates.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("arithmetic overflow")]
    Overflow,
    #[error("partitions cover different universes ({0} vs {1})")]
    Mismatch(usize, usize),
    #[error("empty block")]
    EmptyBlock,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub block_sizes: Vec<u64>,
}

impl PartitionStats {
    pub fn new(block_sizes: Vec<u64>) -> Result<PartitionStats, MeasureError> {
        if block_sizes.contains(&0) {
            return Err(MeasureError::EmptyBlock);
        }
        Ok(PartitionStats { block_sizes })
    }

    /// Block sizes of a labelling, blocks in order of first appearance.
    pub fn from_labels<T: std::hash::Hash + Eq>(labels: &[T]) -> PartitionStats {
        let mut idx: HashMap<&T, usize> = HashMap::new();
        let mut sizes = Vec::new();
        for l in labels {
            let i = *idx.entry(l).or_insert_with(|| {
                sizes.push(0);
                sizes.len() - 1
            });
            sizes[i] += 1;
        }
        PartitionStats { block_sizes: sizes }
    }

    pub fn total(&self) -> u64 {
        self.block_sizes.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyValue {
    pub ordered: u128,
    pub unordered: u128,
}

impl VarietyValue {
    pub fn from_ordered(ordered: u128) -> VarietyValue {
        VarietyValue { ordered, unordered: ordered / 2 }
    }

    /// log_k ϖ; `None` when ϖ = 0.
    pub fn log_units(&self, base: f64) -> Option<f64> {
        (self.ordered > 0).then(|| (self.ordered as f64).log(base))
    }
}

fn sq(x: u128) -> Result<u128, MeasureError> {
    x.checked_mul(x).ok_or(MeasureError::Overflow)
}

/// ϖ = N² − Σ x_i².
pub fn variety(f: &PartitionStats) -> Result<VarietyValue, MeasureError> {
    let n = f.block_sizes.iter().try_fold(0u128, |a, &x| a.checked_add(x as u128)).ok_or(MeasureError::Overflow)?;
    let mut s = 0u128;
    for &x in &f.block_sizes {
        s = s.checked_add(sq(x as u128)?).ok_or(MeasureError::Overflow)?;
    }
    Ok(VarietyValue::from_ordered(sq(n)? - s))
}

/// φ(x ∈ s) = N − |s|.
pub fn phi(block_size: u64, n: u64) -> u64 {
    assert!(1 <= block_size && block_size <= n, "block size must lie in 1..=N");
    n - block_size
}

/// Common refinement of two labellings; cells in order of first appearance.
pub fn meet<A, B>(f1: &[A], f2: &[B]) -> Result<PartitionStats, MeasureError>
where
    A: std::hash::Hash + Eq,
    B: std::hash::Hash + Eq,
{
    if f1.len() != f2.len() {
        return Err(MeasureError::Mismatch(f1.len(), f2.len()));
    }
    let pairs: Vec<(&A, &B)> = f1.iter().zip(f2).collect();
    Ok(PartitionStats::from_labels(&pairs))
}

/// ϖ(F1 | F2) = ϖ(F1 ∧ F2) − ϖ(F2).
pub fn conditional_variety<A, B>(f1: &[A], f2: &[B]) -> Result<u128, MeasureError>
where
    A: std::hash::Hash + Eq,
    B: std::hash::Hash + Eq,
{
    let m = variety(&meet(f1, f2)?)?.ordered;
    Ok(m - variety(&PartitionStats::from_labels(f2))?.ordered)
}

/// ϖ(F1) + ϖ(F2) − ϖ(F1 ∧ F2).
pub fn mutual_variety<A, B>(f1: &[A], f2: &[B]) -> Result<u128, MeasureError>
where
    A: std::hash::Hash + Eq,
    B: std::hash::Hash + Eq,
{
    let m = variety(&meet(f1, f2)?)?.ordered;
    let a = variety(&PartitionStats::from_labels(f1))?.ordered;
    let b = variety(&PartitionStats::from_labels(f2))?.ordered;
    Ok(a + b - m)
}

/// Variety after adding new data. `new_sizes[i]` counts new objects falling
/// into old cell `i`; entries past the old cells are unseen cells.
///
/// ϖ = ϖ(old) + ϖ(new) + 2·Σ_{i≠j} x_i·y_j
pub fn incremental_variety(old: &PartitionStats, new_sizes: &[u64]) -> Result<VarietyValue, MeasureError> {
    let v1 = variety(old)?.ordered;
    let nonzero: Vec<u64> = new_sizes.iter().copied().filter(|&y| y > 0).collect();
    let v2 = variety(&PartitionStats { block_sizes: nonzero })?.ordered;
    let x: Vec<u128> = old.block_sizes.iter().map(|&v| v as u128).collect();
    let y: Vec<u128> = new_sizes.iter().map(|&v| v as u128).collect();
    let sx: u128 = x.iter().sum();
    let sy: u128 = y.iter().sum();
    // Σ_{i≠j} x_i y_j = Sx·Sy − Σ_i x_i y_i
    let diag: u128 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let cross = sx.checked_mul(sy).ok_or(MeasureError::Overflow)? - diag;
    let total = v1
        .checked_add(v2)
        .and_then(|s| s.checked_add(cross.checked_mul(2)?))
        .ok_or(MeasureError::Overflow)?;
    Ok(VarietyValue::from_ordered(total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u64]) -> PartitionStats {
        PartitionStats::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(variety(&p(&[2, 1])).unwrap(), VarietyValue { ordered: 4, unordered: 2 });
        assert_eq!(variety(&p(&[7])).unwrap().ordered, 0);
        assert_eq!(variety(&p(&[3, 3, 3])).unwrap().ordered, 54);
        assert_eq!(phi(5, 5), 0);
        assert_eq!(phi(1, 5), 4);
    }

    #[test]
    fn overflow_is_an_error() {
        let f = PartitionStats { block_sizes: vec![u64::MAX, u64::MAX, u64::MAX, u64::MAX] };
        assert_eq!(variety(&f), Err(MeasureError::Overflow));
    }

    #[test]
    fn meet_and_relative_forms() {
        let f = [0, 0, 1, 1, 2];
        let one = [0; 5];
        assert_eq!(meet(&f, &one).unwrap(), PartitionStats::from_labels(&f));
        assert_eq!(conditional_variety(&f, &one).unwrap(), variety(&PartitionStats::from_labels(&f)).unwrap().ordered);
        assert_eq!(conditional_variety(&f, &f).unwrap(), 0);
        assert_eq!(mutual_variety(&f, &f).unwrap(), variety(&PartitionStats::from_labels(&f)).unwrap().ordered);
        assert!(meet(&f, &[0; 4]).is_err());
    }

    #[test]
    fn incremental_cases() {
        let old = p(&[2, 2]);
        assert_eq!(incremental_variety(&old, &[]).unwrap(), variety(&old).unwrap());
        assert_eq!(incremental_variety(&old, &[1, 1]).unwrap(), variety(&p(&[3, 3])).unwrap());
        assert_eq!(incremental_variety(&old, &[0, 0, 2, 1]).unwrap(), variety(&p(&[2, 2, 2, 1])).unwrap());
    }
}
