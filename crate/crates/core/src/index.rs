//! Dense integer tables over the elements of one set, so that enumeration
//! loops touch arrays instead of hashing group elements.

use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;

use crate::{GroupSet, Sign};

/// `ids[i * n + j]` is a dense id of `a_i - a_j`.
pub(crate) struct DiffTable {
    n: usize,
    ids: Vec<u32>,
    distinct: usize,
}

impl DiffTable {
    pub(crate) fn new(a: &GroupSet) -> Self {
        let n = a.len();
        let spec = a.spec();
        let mut seen = HashMap::with_capacity(n * n);
        let mut ids = Vec::with_capacity(n * n);
        for x in a {
            for y in a {
                let d = spec.combine_unchecked(x, y, Sign::Minus);
                let next = seen.len() as u32;
                ids.push(*seen.entry(d).or_insert(next));
            }
        }
        DiffTable { n, ids, distinct: seen.len() }
    }

    #[inline]
    pub(crate) fn id(&self, i: usize, j: usize) -> usize {
        self.ids[i * self.n + j] as usize
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    pub(crate) fn distinct(&self) -> usize {
        self.distinct
    }
}

/// `E(X, Y)` for a bipartition of the indexed set, maintained under
/// single-element moves in `O(n)`.
pub(crate) struct CutEnergy<'t> {
    table: &'t DiffTable,
    counts: Vec<u32>,
    energy: u64,
    in_x: Vec<bool>,
    nx: usize,
}

impl<'t> CutEnergy<'t> {
    pub(crate) fn new(table: &'t DiffTable, in_x: Vec<bool>) -> Self {
        let n = table.len();
        let mut s = CutEnergy { table, counts: alloc::vec![0; table.distinct()], energy: 0, in_x, nx: 0 };
        s.nx = s.in_x.iter().filter(|&&b| b).count();
        for i in 0..n {
            if !s.in_x[i] {
                continue;
            }
            for j in 0..n {
                if !s.in_x[j] {
                    s.inc(table.id(i, j));
                }
            }
        }
        s
    }

    #[inline]
    fn inc(&mut self, id: usize) {
        let c = &mut self.counts[id];
        self.energy += 2 * *c as u64 + 1;
        *c += 1;
    }

    #[inline]
    fn dec(&mut self, id: usize) {
        let c = &mut self.counts[id];
        *c -= 1;
        self.energy -= 2 * *c as u64 + 1;
    }

    pub(crate) fn flip(&mut self, k: usize) {
        let n = self.table.len();
        let t = self.table;
        if self.in_x[k] {
            for j in 0..n {
                if !self.in_x[j] {
                    self.dec(t.id(k, j));
                } else if j != k {
                    self.inc(t.id(j, k));
                }
            }
            self.in_x[k] = false;
            self.nx -= 1;
        } else {
            for i in 0..n {
                if self.in_x[i] {
                    self.dec(t.id(i, k));
                } else if i != k {
                    self.inc(t.id(k, i));
                }
            }
            self.in_x[k] = true;
            self.nx += 1;
        }
    }

    pub(crate) fn energy(&self) -> u64 {
        self.energy
    }

    pub(crate) fn nx(&self) -> usize {
        self.nx
    }

    pub(crate) fn ny(&self) -> usize {
        self.table.len() - self.nx
    }

    pub(crate) fn sides(&self) -> &[bool] {
        &self.in_x
    }
}

/// Canonical order of index sets given as bitmasks: lexicographic on the
/// increasing index sequences, a proper prefix first.
pub(crate) fn cmp_masks(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let d = (a ^ b).trailing_zeros();
    let above = |m: u64| if d >= 63 { 0 } else { m >> (d + 1) };
    if (a >> d) & 1 == 1 {
        if above(b) == 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if above(a) == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Same order for membership vectors.
pub(crate) fn cmp_membership(a: &[bool], b: &[bool]) -> Ordering {
    let ia = a.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i);
    let ib = b.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i);
    ia.cmp(ib)
}

/// Compares `n1 / e1` against `n2 / e2` for positive denominators.
#[inline]
pub(crate) fn cmp_fractions(n1: u128, e1: u128, n2: u128, e2: u128) -> Ordering {
    (n1 * e2).cmp(&(n2 * e1))
}
