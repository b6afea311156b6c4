// SPDX-License-Identifier: Apache-2.0
use demarc_core::measures::*;
use proptest::prelude::*;

/// Ordered pairs with different labels, by enumeration.
fn pairs<T: PartialEq>(labels: &[T]) -> u128 {
    let mut n = 0;
    for a in labels {
        for b in labels {
            n += u128::from(a != b);
        }
    }
    n
}

fn labels_of(sizes: &[u64]) -> Vec<usize> {
    sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s as usize)).collect()
}

fn blocks() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(1u64..12, 1..8)
}

fn w(x: &[u64]) -> u128 {
    variety(&PartitionStats::new(x.to_vec()).unwrap()).unwrap().ordered
}

proptest! {
    #[test]
    fn variety_counts_separated_pairs(x in blocks()) {
        let v = variety(&PartitionStats::new(x.clone()).unwrap()).unwrap();
        prop_assert_eq!(v.ordered, pairs(&labels_of(&x)));
        prop_assert_eq!(v.unordered * 2, v.ordered);
    }

    #[test]
    fn phi_sums_to_variety(x in blocks()) {
        let n: u64 = x.iter().sum();
        let s: u128 = x.iter().map(|&b| b as u128 * phi(b, n) as u128).sum();
        prop_assert_eq!(s, w(&x));
    }

    #[test]
    fn order_of_blocks_is_irrelevant(mut x in blocks(), k in 0usize..8) {
        let v = w(&x);
        x.reverse();
        let len = x.len();
        x.rotate_left(k % len);
        prop_assert_eq!(w(&x), v);
    }

    #[test]
    fn equal_blocks_maximise(x in blocks()) {
        // among partitions of N into n blocks, n·ϖ ≤ (n−1)·N²
        let n = x.len() as u128;
        let total: u128 = x.iter().map(|&b| b as u128).sum();
        prop_assert!(n * w(&x) <= (n - 1) * total * total);
        let equal = vec![x[0]; x.len()];
        let te = x[0] as u128 * n;
        prop_assert_eq!(n * w(&equal), (n - 1) * te * te);
    }

    #[test]
    fn splitting_a_block_adds_its_own_variety(x in blocks(), k in 0usize..8, cut in 0u64..12) {
        let k = k % x.len();
        prop_assume!(x[k] >= 2);
        let a = 1 + cut % (x[k] - 1);
        let mut y = x.clone();
        y[k] = a;
        y.push(x[k] - a);
        prop_assert_eq!(w(&y), w(&x) + w(&[a, x[k] - a]));
        prop_assert!(w(&y) > w(&x));
    }

    #[test]
    fn meet_forms_agree_with_pair_counts(
        f in proptest::collection::vec((0u8..4, 0u8..3), 1..40),
    ) {
        let f1: Vec<u8> = f.iter().map(|p| p.0).collect();
        let f2: Vec<u8> = f.iter().map(|p| p.1).collect();
        let m = variety(&meet(&f1, &f2).unwrap()).unwrap().ordered;
        prop_assert_eq!(m, pairs(&f));
        let cond = conditional_variety(&f1, &f2).unwrap();
        prop_assert_eq!(cond, pairs(&f) - pairs(&f2));
        let both: u128 = f.iter().flat_map(|a| f.iter().map(move |b| u128::from(a.0 != b.0 && a.1 != b.1))).sum();
        prop_assert_eq!(mutual_variety(&f1, &f2).unwrap(), both);
        prop_assert!(m <= pairs(&f1) + pairs(&f2));
        prop_assert!(m >= pairs(&f1).max(pairs(&f2)));
    }

    #[test]
    fn incremental_matches_recomputation(old in blocks(), new in proptest::collection::vec(0u64..6, 0..10)) {
        let mut merged = old.clone();
        merged.resize(merged.len().max(new.len()), 0);
        for (m, y) in merged.iter_mut().zip(&new) {
            *m += y;
        }
        merged.retain(|&s| s > 0);
        let inc = incremental_variety(&PartitionStats::new(old).unwrap(), &new).unwrap();
        prop_assert_eq!(inc, variety(&PartitionStats::new(merged).unwrap()).unwrap());
    }

    #[test]
    fn log_units_is_a_logarithm(x in blocks()) {
        let v = variety(&PartitionStats::new(x).unwrap()).unwrap();
        match v.log_units(2.0) {
            None => prop_assert_eq!(v.ordered, 0),
            Some(l) => prop_assert!((2f64.powf(l) - v.ordered as f64).abs() < 1e-6 * v.ordered as f64),
        }
    }
}

#[test]
fn empty_blocks_and_mismatches_are_rejected() {
    assert_eq!(PartitionStats::new(vec![2, 0]), Err(MeasureError::EmptyBlock));
    assert_eq!(meet(&[0, 1], &[0]), Err(MeasureError::Mismatch(2, 1)));
}

#[test]
#[should_panic]
fn phi_rejects_oversized_blocks() {
    phi(6, 5);
}
