//! The bipartition energy `E_*[A]` and the restricted pair energy `E_T[A]`.
//!
//! Both maximize `|X|^2 |Y|^2 / (|A| E(X, Y))`. `E_*` ranges over unordered
//! bipartitions `X ⊔ Y = A` with both sides nonempty; `E_T` over nonempty
//! `X, Y ⊆ A` with `|X| >= |A| / T`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::index::{cmp_fractions, cmp_masks, cmp_membership, CutEnergy, DiffTable};
use crate::par::map_indexed;
use crate::{arith, Error, ExactRatio, GroupSet, Result};

pub const DEFAULT_ESTAR_CAP: usize = 22;
pub const DEFAULT_ET_CAP: usize = 12;
/// Exhaustive routines index subsets by `u64` masks.
const MASK_LIMIT: usize = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    HeuristicLowerBound,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::HeuristicLowerBound => "heuristic-lower-bound",
        }
    }
}

/// A pair `(X, Y)` with its energy and ratio. For `E_*` the sides partition
/// `A` and `X` holds the least element; for `E_T` the sides may overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub x: GroupSet,
    pub y: GroupSet,
    pub energy: u128,
    pub ratio: ExactRatio,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionQuantityReport {
    pub value: ExactRatio,
    pub witness: Bipartition,
    pub mode: Mode,
    /// Bipartitions (or pairs) evaluated for exact runs, restarts for heuristic ones.
    pub trials: u64,
    pub seed: Option<u64>,
}

/// `|X|^2 |Y|^2 / (n E)`.
pub fn pair_ratio(x_len: usize, y_len: usize, n: usize, energy: u128) -> ExactRatio {
    let num = (x_len as u128).pow(2) * (y_len as u128).pow(2);
    ExactRatio::frac(num, n as u128 * energy)
}

/// Ratio of a given pair, energy recomputed from the sets.
pub fn ratio_of(x: &GroupSet, y: &GroupSet, n: usize) -> Result<ExactRatio> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(pair_ratio(x.len(), y.len(), n, arith::energy2(x, y)?))
}

fn witness(a: &GroupSet, x_mask: u64, y_mask: u64, energy: u64) -> Bipartition {
    let n = a.len();
    let x = a.pick((0..n).filter(|&i| (x_mask >> i) & 1 == 1));
    let y = a.pick((0..n).filter(|&i| (y_mask >> i) & 1 == 1));
    let ratio = pair_ratio(x.len(), y.len(), n, energy as u128);
    Bipartition { x, y, energy: energy as u128, ratio }
}

#[derive(Clone, Copy)]
struct Candidate {
    num: u128,
    energy: u64,
    x_mask: u64,
    y_mask: u64,
}

impl Candidate {
    /// Larger ratio first, then the canonically smaller witness.
    fn beats(&self, other: &Candidate) -> bool {
        match cmp_fractions(self.num, self.energy as u128, other.num, other.energy as u128) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                cmp_masks(self.x_mask, other.x_mask).then(cmp_masks(self.y_mask, other.y_mask)) == Ordering::Less
            }
        }
    }
}

fn reduce(candidates: impl IntoIterator<Item = Option<Candidate>>) -> Option<Candidate> {
    candidates.into_iter().flatten().fold(None, |best: Option<Candidate>, c| match best {
        Some(b) if !c.beats(&b) => Some(b),
        _ => Some(c),
    })
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(MASK_LIMIT);
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    Ok(())
}

/// `E_*[A]` by enumerating all `2^(|A|-1) - 1` unordered bipartitions.
///
/// Subsets are walked in Gray-code order inside independent chunks, so each
/// step costs `O(|A|)`. The witness is the maximizer whose `X` (the side
/// holding the least element) is canonically smallest.
pub fn estar_exact(a: &GroupSet, cap: usize) -> Result<PartitionQuantityReport> {
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidArgument("E_* needs at least two elements".into()));
    }
    check_cap(n, cap)?;
    let table = DiffTable::new(a);
    let free = n - 1;
    let high = free.min(8);
    let low = free - high;
    let full = (1u64 << n) - 1;

    let chunk_best = map_indexed(1 << high, |h| {
        let mut in_x = alloc::vec![false; n];
        in_x[0] = true;
        let mut mask = 1u64;
        for b in 0..high {
            if (h >> b) & 1 == 1 {
                in_x[1 + low + b] = true;
                mask |= 1 << (1 + low + b);
            }
        }
        let mut cut = CutEnergy::new(&table, in_x);
        let mut best: Option<Candidate> = None;
        let mut consider = |cut: &CutEnergy, mask: u64| {
            if cut.ny() == 0 {
                return;
            }
            let c = Candidate {
                num: (cut.nx() as u128).pow(2) * (cut.ny() as u128).pow(2),
                energy: cut.energy(),
                x_mask: mask,
                y_mask: full & !mask,
            };
            if best.as_ref().is_none_or(|b| c.beats(b)) {
                best = Some(c);
            }
        };
        consider(&cut, mask);
        for t in 1u64..(1 << low) {
            let k = 1 + t.trailing_zeros() as usize;
            cut.flip(k);
            mask ^= 1 << k;
            consider(&cut, mask);
        }
        best
    });
    let best = reduce(chunk_best).expect("|A| >= 2 has a bipartition");
    let witness = witness(a, best.x_mask, best.y_mask, best.energy);
    Ok(PartitionQuantityReport {
        value: witness.ratio.clone(),
        witness,
        mode: Mode::Exact,
        trials: (1u64 << free) - 1,
        seed: None,
    })
}

/// Exact `E_T[A]`: every nonempty `X` with `|X| T >= |A|` against every
/// nonempty `Y ⊆ A` (`X = Y = A` included).
pub fn et_exact(a: &GroupSet, t: &ExactRatio, cap: usize) -> Result<PartitionQuantityReport> {
    let n = a.len();
    if *t < 1 {
        return Err(Error::InvalidArgument("T must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::EmptySet);
    }
    check_cap(n, cap)?;
    let table = DiffTable::new(a);
    let size_ok = |k: usize| ExactRatio::from(k) * t.clone() >= ExactRatio::from(n);

    let total = 1u64 << n;
    let chunks = (total as usize).min(64);
    let per = total.div_ceil(chunks as u64);
    let results = map_indexed(chunks, |c| {
        let mut counts = alloc::vec![0u32; table.distinct()];
        let mut best: Option<Candidate> = None;
        let mut trials = 0u64;
        let lo = (c as u64 * per).max(1);
        let hi = ((c as u64 + 1) * per).min(total);
        for x_mask in lo..hi {
            let nx = x_mask.count_ones() as usize;
            if !size_ok(nx) {
                continue;
            }
            let xs: Vec<usize> = (0..n).filter(|&i| (x_mask >> i) & 1 == 1).collect();
            let mut energy = 0u64;
            let mut y_mask = 0u64;
            for step in 1..total {
                let k = step.trailing_zeros() as usize;
                if (y_mask >> k) & 1 == 1 {
                    for &i in &xs {
                        let c = &mut counts[table.id(i, k)];
                        *c -= 1;
                        energy -= 2 * *c as u64 + 1;
                    }
                } else {
                    for &i in &xs {
                        let c = &mut counts[table.id(i, k)];
                        energy += 2 * *c as u64 + 1;
                        *c += 1;
                    }
                }
                y_mask ^= 1 << k;
                trials += 1;
                let ny = y_mask.count_ones() as u128;
                let cand = Candidate { num: (nx as u128).pow(2) * ny * ny, energy, x_mask, y_mask };
                if best.as_ref().is_none_or(|b| cand.beats(b)) {
                    best = Some(cand);
                }
            }
            for k in 0..n {
                if (y_mask >> k) & 1 == 1 {
                    for &i in &xs {
                        counts[table.id(i, k)] -= 1;
                    }
                }
            }
        }
        (best, trials)
    });
    let trials = results.iter().map(|r| r.1).sum();
    let best = reduce(results.into_iter().map(|r| r.0)).expect("X = A is always admissible");
    let witness = witness(a, best.x_mask, best.y_mask, best.energy);
    Ok(PartitionQuantityReport { value: witness.ratio.clone(), witness, mode: Mode::Exact, trials, seed: None })
}

/// Lower bound on `E_*[A]` from `budget` seeded restarts of a local search.
///
/// Each restart draws a uniformly random bipartition and applies the
/// single-element move with the largest strict ratio gain until none
/// exists. Restart `r` uses ChaCha8 seeded with `seed` on stream `r`.
pub fn estar_heuristic(a: &GroupSet, budget: u64, seed: u64) -> Result<PartitionQuantityReport> {
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidArgument("E_* needs at least two elements".into()));
    }
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let table = DiffTable::new(a);
    let runs = map_indexed(budget as usize, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut in_x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        let nx = in_x.iter().filter(|&&b| b).count();
        if nx == 0 || nx == n {
            let k = rng.random_range(0..n);
            in_x[k] = !in_x[k];
        }
        let mut cut = CutEnergy::new(&table, in_x);
        climb(&mut cut);
        let mut sides = cut.sides().to_vec();
        if !sides[0] {
            // E(X, Y) = E(Y, X)
            sides.iter_mut().for_each(|b| *b = !*b);
        }
        let num = (cut.nx() as u128).pow(2) * (cut.ny() as u128).pow(2);
        (num, cut.energy(), sides)
    });
    let best = runs
        .into_iter()
        .reduce(|best, c| {
            let ord =
                cmp_fractions(c.0, c.1 as u128, best.0, best.1 as u128).then_with(|| cmp_membership(&best.2, &c.2));
            if ord == Ordering::Greater {
                c
            } else {
                best
            }
        })
        .expect("budget >= 1");
    let x = a.pick((0..n).filter(|&i| best.2[i]));
    let y = a.pick((0..n).filter(|&i| !best.2[i]));
    let ratio = pair_ratio(x.len(), y.len(), n, best.1 as u128);
    Ok(PartitionQuantityReport {
        value: ratio.clone(),
        witness: Bipartition { x, y, energy: best.1 as u128, ratio },
        mode: Mode::HeuristicLowerBound,
        trials: budget,
        seed: Some(seed),
    })
}

fn climb(cut: &mut CutEnergy) {
    let n = cut.sides().len();
    loop {
        let cur_num = (cut.nx() as u128).pow(2) * (cut.ny() as u128).pow(2);
        let cur_e = cut.energy() as u128;
        let mut best: Option<(usize, u128, u128)> = None;
        for k in 0..n {
            let side_size = if cut.sides()[k] { cut.nx() } else { cut.ny() };
            if side_size == 1 {
                continue;
            }
            cut.flip(k);
            let num = (cut.nx() as u128).pow(2) * (cut.ny() as u128).pow(2);
            let e = cut.energy() as u128;
            cut.flip(k);
            let (bn, be) = best.map_or((cur_num, cur_e), |b| (b.1, b.2));
            if cmp_fractions(num, e, bn, be) == Ordering::Greater {
                best = Some((k, num, e));
            }
        }
        match best {
            Some((k, _, _)) => cut.flip(k),
            None => return,
        }
    }
}
