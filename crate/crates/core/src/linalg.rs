//! Exact sparse row reduction over `ℚ`.

use std::collections::BTreeMap;
use std::ops::Bound;

use num_traits::{One, Zero};

use crate::poly::Rational;

pub type SparseVec<K> = BTreeMap<K, Rational>;

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Rational, x: &SparseVec<K>) {
    for (k, c) in x {
        let e = y.entry(k.clone()).or_insert_with(Rational::zero);
        *e += a * c;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

/// Row echelon form whose rows remember how they were built from the
/// inserted vectors. Each row's pivot is its largest key.
#[derive(Debug, Clone)]
pub struct Echelon<K: Ord + Clone> {
    rows: Vec<(SparseVec<K>, SparseVec<usize>)>,
    pivots: BTreeMap<K, usize>,
    inserted: usize,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Self {
            rows: Vec::new(),
            pivots: BTreeMap::new(),
            inserted: 0,
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors inserted so far, independent or not.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Splits `v = Σ c_i · (inserted vector i) + residual`, with no residual
    /// key being a pivot.
    pub fn reduce(&self, v: &SparseVec<K>) -> (SparseVec<K>, SparseVec<usize>) {
        let mut res = v.clone();
        let mut combo = SparseVec::new();
        let mut upper: Bound<K> = Bound::Unbounded;
        loop {
            let next = res
                .range((Bound::Unbounded, upper.clone()))
                .rev()
                .find(|(k, _)| self.pivots.contains_key(*k))
                .map(|(k, c)| (k.clone(), c.clone()));
            let Some((k, c)) = next else { break };
            let (row, how) = &self.rows[self.pivots[&k]];
            let f = c / &row[&k];
            axpy(&mut res, &-f.clone(), row);
            axpy(&mut combo, &f, how);
            upper = Bound::Excluded(k);
        }
        (res, combo)
    }

    /// Inserts `v` as vector number `self.inserted()`; returns whether it was
    /// independent of the earlier ones.
    pub fn insert(&mut self, v: &SparseVec<K>) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (res, combo) = self.reduce(v);
        let Some(pivot) = res.keys().next_back().cloned() else {
            return false;
        };
        let mut how = SparseVec::from([(id, Rational::one())]);
        axpy(&mut how, &-Rational::one(), &combo);
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push((res, how));
        true
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone>(vectors: &[SparseVec<K>]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    fn v(entries: &[(u32, i64)]) -> SparseVec<u32> {
        entries.iter().map(|&(k, c)| (k, int(c))).collect()
    }

    #[test]
    fn dependent_vectors_drop_rank() {
        let vs = vec![v(&[(0, 1), (1, 2)]), v(&[(1, 1), (2, 1)]), v(&[(0, 1), (1, 4), (2, 2)])];
        assert_eq!(rank(&vs), 2);
        assert_eq!(rank(&vs[..2]), 2);
        assert_eq!(rank::<u32>(&[]), 0);
    }

    #[test]
    fn reduction_recovers_the_combination() {
        let mut e = Echelon::new();
        assert!(e.insert(&v(&[(0, 1), (3, 1)])));
        assert!(e.insert(&v(&[(3, 2), (5, 1)])));
        assert!(!e.insert(&v(&[])));
        // 3·first − 2·second
        let target = v(&[(0, 3), (3, -1), (5, -2)]);
        let (res, combo) = e.reduce(&target);
        assert!(res.is_empty());
        assert_eq!(combo, [(0, int(3)), (1, int(-2))].into_iter().collect());
        let (res, _) = e.reduce(&v(&[(4, 1)]));
        assert_eq!(res, v(&[(4, 1)]));
    }
}
