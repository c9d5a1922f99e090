//! Dense binary relations on `0..n` stored as bit rows.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRel {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitRel {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitRel { n, words, data: vec![0; n * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                r.insert(i, j);
            }
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.data[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    /// Returns true if the pair was new.
    #[inline]
    pub fn insert(&mut self, a: usize, b: usize) -> bool {
        let w = &mut self.data[a * self.words + b / 64];
        let bit = 1u64 << (b % 64);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.data[a * self.words + b / 64] &= !(1u64 << (b % 64));
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.data[a * self.words..(a + 1) * self.words]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| (0..self.n).filter(move |&b| self.contains(a, b)).map(move |b| (a, b)))
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&b| self.contains(a, b))
    }

    pub fn count(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &BitRel) -> BitRel {
        let mut r = self.clone();
        for (x, y) in r.data.iter_mut().zip(&other.data) {
            *x |= *y;
        }
        r
    }

    pub fn intersection(&self, other: &BitRel) -> BitRel {
        let mut r = self.clone();
        for (x, y) in r.data.iter_mut().zip(&other.data) {
            *x &= *y;
        }
        r
    }

    pub fn inverse(&self) -> BitRel {
        BitRel::from_pairs(self.n, self.pairs().map(|(a, b)| (b, a)))
    }

    pub fn is_subset(&self, other: &BitRel) -> bool {
        self.data.iter().zip(&other.data).all(|(x, y)| x & !y == 0)
    }

    /// Reflexive-transitive closure (Warshall on bit rows).
    pub fn rt_closure(&self) -> BitRel {
        let mut r = self.clone();
        for i in 0..self.n {
            r.insert(i, i);
        }
        r.close_transitive();
        r
    }

    pub fn close_transitive(&mut self) {
        for k in 0..self.n {
            let rk: Vec<u64> = self.row(k).to_vec();
            for i in 0..self.n {
                if self.contains(i, k) {
                    let row = &mut self.data[i * self.words..(i + 1) * self.words];
                    for (x, y) in row.iter_mut().zip(&rk) {
                        *x |= *y;
                    }
                }
            }
        }
    }

    /// Relational product `self ; other`.
    pub fn compose(&self, other: &BitRel) -> BitRel {
        let mut r = BitRel::empty(self.n);
        for a in 0..self.n {
            for m in self.successors(a) {
                let src = other.row(m).to_vec();
                let row = &mut r.data[a * r.words..(a + 1) * r.words];
                for (x, y) in row.iter_mut().zip(&src) {
                    *x |= *y;
                }
            }
        }
        r
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset(self)
    }

    pub fn antisymmetry_violations(&self) -> Vec<(usize, usize)> {
        self.pairs().filter(|&(a, b)| a < b && self.contains(b, a)).collect()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.antisymmetry_violations().is_empty()
    }

    pub fn is_partial_order(&self) -> bool {
        self.is_reflexive() && self.is_transitive() && self.is_antisymmetric()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// Classes of an equivalence, each listed in ascending order, ordered by least member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for a in 0..self.n {
            if seen[a] {
                continue;
            }
            let class: Vec<usize> = (a..self.n).filter(|&b| self.contains(a, b)).collect();
            for &b in &class {
                seen[b] = true;
            }
            out.push(class);
        }
        out
    }
}

impl fmt::Debug for BitRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_chain() {
        let r = BitRel::from_pairs(3, [(0, 1), (1, 2)]).rt_closure();
        assert!(r.contains(0, 2));
        assert_eq!(r.count(), 6);
        assert!(r.is_partial_order());
    }

    #[test]
    fn wide_rows() {
        let mut r = BitRel::empty(130);
        r.insert(3, 129);
        r.insert(129, 70);
        r.close_transitive();
        assert!(r.contains(3, 70));
        assert_eq!(r.inverse().pairs().collect::<Vec<_>>(), vec![(70, 3), (70, 129), (129, 3)]);
    }

    #[test]
    fn classes_of_equivalence() {
        let r = BitRel::from_pairs(4, [(0, 2), (2, 0)]).rt_closure();
        assert_eq!(r.classes(), vec![vec![0, 2], vec![1], vec![3]]);
    }
}
