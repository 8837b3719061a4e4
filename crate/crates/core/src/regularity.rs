//! Arithmetic regularity decomposition by split/merge local search.
//!
//! The objective over partitions `A = A_1 ⊔ … ⊔ A_l` is
//!
//! ```text
//! Σ_{i<j} ( E(A_i, A_j, A, A) - ε1 μ(A_i) μ(A_j) E(A) ),   μ(B) = |B|/|A|, ε1 = ωε/2.
//! ```
//!
//! Starting from the trivial partition, pairs with a positive term are merged
//! and parts admitting a bipartition with a negative term are split; both
//! moves strictly lower the objective, so the search stops. Parts with
//! `2K|A_i|^2 <= ω|A|^2` (`K = |A|^3 / E(A)`) are pooled into the noise set.
//!
//! The kept parts and the noise set `Ω` are then checked against
//!
//! ```text
//! (i)   2K |A_j|^2 >= ω |A|^2
//! (ii)  E_*[A_j] (ωε)^2 <= 4K
//! (iii) E(A_i, A_j) |A| <= ε |A_i|^2 |A_j|^2     for i != j
//! (iv)  E(Ω, A) <= ω E(A)
//! ```

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{doubling, energy2, energy4, rep_counts, self_energy};
use crate::index::cmp_masks;
use crate::par::map_indexed;
use crate::partition::estar_exact;
use crate::{Check, Error, ExactRatio, GroupElement, GroupSet, Result, Sign, Status};

pub const DEFAULT_SPLIT_CAP: usize = 20;
pub const DEFAULT_SPLIT_BUDGET: u64 = 32;
pub const DEFAULT_STRUCTURE_CAP: usize = 20;
/// Largest part whose split-stability the verifier rechecks exhaustively.
const RECHECK_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityParams {
    pub epsilon: ExactRatio,
    pub omega: ExactRatio,
    /// Parts up to this size get an exhaustive split scan.
    pub split_exact_cap: usize,
    /// Restarts of the split heuristic on larger parts.
    pub split_budget: u64,
    pub seed: u64,
    /// Parts up to this size have `E_*` computed exactly during verification.
    pub structure_cap: usize,
}

impl RegularityParams {
    /// `ε, ω ∈ (0, 1/4]`.
    pub fn new(epsilon: ExactRatio, omega: ExactRatio) -> Result<Self> {
        let quarter = ExactRatio::frac(1, 4);
        for (name, v) in [("epsilon", &epsilon), ("omega", &omega)] {
            if !v.is_positive() || *v > quarter {
                return Err(Error::InvalidArgument(format!("{name} = {v} is outside (0, 1/4]")));
            }
        }
        Ok(Self::unchecked(epsilon, omega))
    }

    pub(crate) fn unchecked(epsilon: ExactRatio, omega: ExactRatio) -> Self {
        RegularityParams {
            epsilon,
            omega,
            split_exact_cap: DEFAULT_SPLIT_CAP,
            split_budget: DEFAULT_SPLIT_BUDGET,
            seed: 0,
            structure_cap: DEFAULT_STRUCTURE_CAP,
        }
    }

    /// `ε1 = ωε/2`.
    pub fn epsilon1(&self) -> ExactRatio {
        &(&self.omega * &self.epsilon) / &ExactRatio::from(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitStatus {
    CertifiedExact,
    HeuristicNoViolationFound,
}

impl SplitStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitStatus::CertifiedExact => "certified-exact",
            SplitStatus::HeuristicNoViolationFound => "heuristic-no-violation-found",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    Merge,
    Split,
}

/// One accepted move: the two parts merged, or the two halves produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub first: GroupSet,
    pub second: GroupSet,
    /// Objective after the move.
    pub objective: ExactRatio,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionResult {
    /// Kept components `A_1..A_k`, canonical order.
    pub parts: Vec<GroupSet>,
    pub parts_status: Vec<SplitStatus>,
    /// Terminal parts pooled into the noise set.
    pub noise_parts: Vec<GroupSet>,
    pub noise_status: Vec<SplitStatus>,
    pub omega_set: GroupSet,
    /// `K = |A|^3 / E(A)`.
    pub k: ExactRatio,
    pub energy: u128,
    pub objective: ExactRatio,
    pub moves: Vec<Move>,
    /// Conditions (i), (iii), (iv) and merge-stability, as found at termination.
    pub certificates: Vec<Check>,
}

impl DecompositionResult {
    /// Kept parts followed by noise parts: the terminal partition of `A`.
    pub fn terminal_parts(&self) -> impl Iterator<Item = &GroupSet> {
        self.parts.iter().chain(self.noise_parts.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitOutcome {
    /// `(S, T)` with `S` holding the least element of the part.
    pub split: Option<(GroupSet, GroupSet)>,
    /// `E(S, T, A, A) - ε1 μ(S) μ(T) E(A)` of the returned split.
    pub gap: Option<ExactRatio>,
    pub status: SplitStatus,
}

/// Index tables for one ambient set, with the objective scaled to integers:
/// a pair term equals `(cross * c1 - |P||Q| * c2) / scale`.
struct Ambient<'a> {
    set: &'a GroupSet,
    n: usize,
    /// `w[i * n + j] = r_{A+A}(a_i + a_j)`.
    w: Vec<u64>,
    energy: u128,
    c1: i128,
    c2: i128,
    scale: BigInt,
}

impl<'a> Ambient<'a> {
    fn new(set: &'a GroupSet, epsilon1: &ExactRatio) -> Result<Self> {
        let n = set.len();
        let spec = set.spec();
        let r = rep_counts(set, set, Sign::Plus);
        let mut w = Vec::with_capacity(n * n);
        for x in set {
            for y in set {
                w.push(r[&spec.combine_unchecked(x, y, Sign::Plus)]);
            }
        }
        let energy: u128 = r.values().map(|&c| c as u128 * c as u128).sum();
        let overflow = || Error::Overflow("regularity objective");
        let num = epsilon1.numer().to_i128().ok_or_else(overflow)?;
        let den = epsilon1.denom().to_i128().ok_or_else(overflow)?;
        let n2 = (n as i128).checked_mul(n as i128).ok_or_else(overflow)?;
        let c1 = n2.checked_mul(den).ok_or_else(overflow)?;
        let c2 = num.checked_mul(i128::try_from(energy).map_err(|_| overflow())?).ok_or_else(overflow)?;
        // the largest term magnitude is bounded by n^3 c1 + n^2 c2
        (n as i128)
            .checked_pow(3)
            .and_then(|v| v.checked_mul(c1))
            .and_then(|v| n2.checked_mul(c2).and_then(|u| v.checked_add(u)))
            .ok_or_else(overflow)?;
        Ok(Ambient { set, n, w, energy, c1, c2, scale: BigInt::from(c1) })
    }

    fn weight(&self, i: usize, j: usize) -> u64 {
        self.w[i * self.n + j]
    }

    fn cross(&self, p: &[usize], q: &[usize]) -> u64 {
        p.iter().map(|&i| q.iter().map(|&j| self.weight(i, j)).sum::<u64>()).sum()
    }

    fn term(&self, p: &[usize], q: &[usize]) -> i128 {
        self.cross(p, q) as i128 * self.c1 - (p.len() * q.len()) as i128 * self.c2
    }

    fn ratio(&self, scaled: i128) -> ExactRatio {
        ExactRatio::frac(scaled, self.scale.clone())
    }

    fn pick(&self, idx: &[usize]) -> GroupSet {
        self.set.pick(idx.iter().copied())
    }
}

/// Exact value of the objective for a given partition of `a`, from set-level
/// four-set energies.
pub fn objective(partition: &[GroupSet], a: &GroupSet, epsilon1: &ExactRatio) -> Result<ExactRatio> {
    check_partition(partition.iter(), a)?;
    let n = ExactRatio::from(a.len());
    let e = ExactRatio::from(self_energy(a));
    let mut total = ExactRatio::zero();
    for (i, p) in partition.iter().enumerate() {
        for q in &partition[i + 1..] {
            let mu = ExactRatio::from(p.len() * q.len()) / (&n * &n);
            total = total + ExactRatio::from(energy4(p, q, a, a)?) - epsilon1 * &(&mu * &e);
        }
    }
    Ok(total)
}

fn check_partition<'p>(parts: impl Iterator<Item = &'p GroupSet>, a: &GroupSet) -> Result<()> {
    let mut seen = 0usize;
    let mut union = GroupSet::empty(a.spec());
    for p in parts {
        a.same_group(p)?;
        if !p.is_subset(a) {
            return Err(Error::Inconsistent("a part is not contained in A".into()));
        }
        if !union.is_disjoint(p) {
            return Err(Error::Inconsistent("parts overlap".into()));
        }
        seen += p.len();
        union = union.union(p);
    }
    if seen != a.len() {
        return Err(Error::Inconsistent("parts do not cover A".into()));
    }
    Ok(())
}

/// Best (most negative) split found for a part given by ambient indices.
/// `(S, T, scaled gap)` in ambient indices.
type FoundSplit = (Vec<usize>, Vec<usize>, i128);

fn search_split(amb: &Ambient, part: &[usize], params: &RegularityParams) -> (Option<FoundSplit>, SplitStatus) {
    let m = part.len();
    if m < 2 {
        return (None, SplitStatus::CertifiedExact);
    }
    let local: Vec<u64> = part.iter().flat_map(|&i| part.iter().map(move |&j| amb.weight(i, j))).collect();
    if m <= params.split_exact_cap.min(62) {
        let best = exhaustive_split(&local, m, amb.c1, amb.c2);
        let found = best.filter(|b| b.0 < 0).map(|(g, mask)| {
            let s = (0..m).filter(|&i| (mask >> i) & 1 == 1).map(|i| part[i]).collect();
            let t = (0..m).filter(|&i| (mask >> i) & 1 == 0).map(|i| part[i]).collect();
            (s, t, g)
        });
        (found, SplitStatus::CertifiedExact)
    } else {
        let found = heuristic_split(&local, m, amb.c1, amb.c2, params, part[0] as u64).map(|(g, sides)| {
            let s = (0..m).filter(|&i| sides[i]).map(|i| part[i]).collect();
            let t = (0..m).filter(|&i| !sides[i]).map(|i| part[i]).collect();
            (s, t, g)
        });
        match found {
            Some(f) => (Some(f), SplitStatus::HeuristicNoViolationFound),
            None => (None, SplitStatus::HeuristicNoViolationFound),
        }
    }
}

/// Cross weight between the sides, maintained under single moves.
struct SplitState<'w> {
    w: &'w [u64],
    m: usize,
    in_s: Vec<bool>,
    ns: usize,
    cross: u64,
}

impl<'w> SplitState<'w> {
    fn new(w: &'w [u64], m: usize, in_s: Vec<bool>) -> Self {
        let mut cross = 0;
        for i in 0..m {
            for j in 0..m {
                if in_s[i] && !in_s[j] {
                    cross += w[i * m + j];
                }
            }
        }
        let ns = in_s.iter().filter(|&&b| b).count();
        SplitState { w, m, in_s, ns, cross }
    }

    fn flip(&mut self, k: usize) {
        let (mut to_s, mut to_t) = (0u64, 0u64);
        for j in 0..self.m {
            if j == k {
                continue;
            }
            if self.in_s[j] {
                to_s += self.w[k * self.m + j];
            } else {
                to_t += self.w[k * self.m + j];
            }
        }
        if self.in_s[k] {
            self.cross = self.cross - to_t + to_s;
            self.ns -= 1;
        } else {
            self.cross = self.cross - to_s + to_t;
            self.ns += 1;
        }
        self.in_s[k] = !self.in_s[k];
    }

    fn gap(&self, c1: i128, c2: i128) -> i128 {
        self.cross as i128 * c1 - (self.ns * (self.m - self.ns)) as i128 * c2
    }
}

/// Minimum gap over all bipartitions (`S` holds local index 0), ties to the
/// canonically smallest `S`.
fn exhaustive_split(w: &[u64], m: usize, c1: i128, c2: i128) -> Option<(i128, u64)> {
    let free = m - 1;
    let high = free.min(8);
    let low = free - high;
    let chunk_best = map_indexed(1 << high, |h| {
        let mut in_s = alloc::vec![false; m];
        in_s[0] = true;
        let mut mask = 1u64;
        for b in 0..high {
            if (h >> b) & 1 == 1 {
                in_s[1 + low + b] = true;
                mask |= 1 << (1 + low + b);
            }
        }
        let mut st = SplitState::new(w, m, in_s);
        let mut best: Option<(i128, u64)> = None;
        let mut consider = |st: &SplitState, mask: u64| {
            if st.ns == m {
                return;
            }
            let g = st.gap(c1, c2);
            if best.is_none_or(|(bg, bm)| g < bg || (g == bg && cmp_masks(mask, bm) == Ordering::Less)) {
                best = Some((g, mask));
            }
        };
        consider(&st, mask);
        for t in 1u64..(1 << low) {
            let k = 1 + t.trailing_zeros() as usize;
            st.flip(k);
            mask ^= 1 << k;
            consider(&st, mask);
        }
        best
    });
    chunk_best.into_iter().flatten().fold(None, |best, c| match best {
        Some(b) if !(c.0 < b.0 || (c.0 == b.0 && cmp_masks(c.1, b.1) == Ordering::Less)) => Some(b),
        _ => Some(c),
    })
}

/// Seeded restarts of steepest descent on the gap; returns the best negative
/// gap found.
fn heuristic_split(
    w: &[u64],
    m: usize,
    c1: i128,
    c2: i128,
    params: &RegularityParams,
    salt: u64,
) -> Option<(i128, Vec<bool>)> {
    let runs = map_indexed(params.split_budget as usize, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ salt.rotate_left(32));
        rng.set_stream(r as u64);
        let mut in_s: Vec<bool> = (0..m).map(|_| rng.random::<bool>()).collect();
        let ns = in_s.iter().filter(|&&b| b).count();
        if ns == 0 || ns == m {
            let k = rng.random_range(0..m);
            in_s[k] = !in_s[k];
        }
        let mut st = SplitState::new(w, m, in_s);
        loop {
            let cur = st.gap(c1, c2);
            let mut best: Option<(usize, i128)> = None;
            for k in 0..m {
                let side = if st.in_s[k] { st.ns } else { m - st.ns };
                if side == 1 {
                    continue;
                }
                st.flip(k);
                let g = st.gap(c1, c2);
                st.flip(k);
                if g < best.map_or(cur, |b| b.1) {
                    best = Some((k, g));
                }
            }
            match best {
                Some((k, _)) => st.flip(k),
                None => break,
            }
        }
        let mut sides = st.in_s.clone();
        if !sides[0] {
            sides.iter_mut().for_each(|b| *b = !*b);
        }
        (st.gap(c1, c2), sides)
    });
    runs.into_iter().filter(|r| r.0 < 0).reduce(|best, c| {
        let better = c.0 < best.0 || (c.0 == best.0 && crate::index::cmp_membership(&c.1, &best.1) == Ordering::Less);
        if better {
            c
        } else {
            best
        }
    })
}

/// Looks for `S ⊔ T = part` with `E(S, T, A, A) < ε1 μ(S) μ(T) E(A)`.
///
/// Exhaustive (and certified) when `|part| <= split_exact_cap`, otherwise a
/// seeded local search that can only report the absence of a violation
/// heuristically.
pub fn find_violating_split(part: &GroupSet, a: &GroupSet, params: &RegularityParams) -> Result<SplitOutcome> {
    a.same_group(part)?;
    if part.is_empty() {
        return Err(Error::EmptySet);
    }
    if !part.is_subset(a) {
        return Err(Error::NotSubset);
    }
    let amb = Ambient::new(a, &params.epsilon1())?;
    let idx: Vec<usize> = part.iter().map(|e| a.index_of(e).expect("subset")).collect();
    let (found, status) = search_split(&amb, &idx, params);
    Ok(match found {
        Some((s, t, g)) => SplitOutcome { split: Some((amb.pick(&s), amb.pick(&t))), gap: Some(amb.ratio(g)), status },
        None => SplitOutcome { split: None, gap: None, status },
    })
}

/// Runs the split/merge search to a stable partition and pools small parts
/// into the noise set.
pub fn decompose(a: &GroupSet, params: &RegularityParams) -> Result<DecompositionResult> {
    if a.len() < 2 {
        return Err(Error::InvalidArgument("decomposition needs |A| >= 2".into()));
    }
    let amb = Ambient::new(a, &params.epsilon1())?;
    let mut parts: Vec<Vec<usize>> = alloc::vec![(0..a.len()).collect()];
    let mut objective: i128 = 0;
    let mut moves = Vec::new();
    let statuses = loop {
        // merges first: the pair with the largest positive term
        loop {
            let mut best: Option<(i128, usize, usize)> = None;
            for i in 0..parts.len() {
                for j in i + 1..parts.len() {
                    let t = amb.term(&parts[i], &parts[j]);
                    if t > 0 && best.is_none_or(|b| t > b.0) {
                        best = Some((t, i, j));
                    }
                }
            }
            let Some((t, i, j)) = best else { break };
            let q = parts.remove(j);
            let p = core::mem::take(&mut parts[i]);
            objective -= t;
            moves.push(Move {
                kind: MoveKind::Merge,
                first: amb.pick(&p),
                second: amb.pick(&q),
                objective: amb.ratio(objective),
            });
            let mut merged = p;
            merged.extend(q);
            merged.sort_unstable();
            parts[i] = merged;
            parts.sort();
        }
        let mut statuses = Vec::with_capacity(parts.len());
        let mut split = None;
        for (i, part) in parts.iter().enumerate() {
            let (found, status) = search_split(&amb, part, params);
            if let Some(f) = found {
                split = Some((i, f));
                break;
            }
            statuses.push(status);
        }
        match split {
            Some((i, (s, t, g))) => {
                objective += g;
                moves.push(Move {
                    kind: MoveKind::Split,
                    first: amb.pick(&s),
                    second: amb.pick(&t),
                    objective: amb.ratio(objective),
                });
                parts.remove(i);
                parts.push(s);
                parts.push(t);
                parts.sort();
            }
            None => break statuses,
        }
    };

    let n = ExactRatio::from(a.len());
    let k = ExactRatio::frac(a.len() as u128 * a.len() as u128 * a.len() as u128, amb.energy);
    let is_noise = |p: &[usize]| {
        ExactRatio::from(2) * k.clone() * ExactRatio::from(p.len() * p.len()) <= &params.omega * &(&n * &n)
    };
    let mut result = DecompositionResult {
        parts: Vec::new(),
        parts_status: Vec::new(),
        noise_parts: Vec::new(),
        noise_status: Vec::new(),
        omega_set: GroupSet::empty(a.spec()),
        k: k.clone(),
        energy: amb.energy,
        objective: amb.ratio(objective),
        moves,
        certificates: Vec::new(),
    };
    for (p, status) in parts.iter().zip(statuses) {
        if is_noise(p) {
            result.noise_parts.push(amb.pick(p));
            result.noise_status.push(status);
        } else {
            result.parts.push(amb.pick(p));
            result.parts_status.push(status);
        }
    }
    result.omega_set = result.noise_parts.iter().fold(GroupSet::empty(a.spec()), |acc, p| acc.union(p));
    let mut merge_stable = true;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            merge_stable &= amb.term(&parts[i], &parts[j]) <= 0;
        }
    }
    result.certificates = certify_conditions(&result, a, params, merge_stable)?;
    Ok(result)
}

/// Conditions (i), (iii), (iv) plus merge-stability, all exact.
fn certify_conditions(
    r: &DecompositionResult,
    a: &GroupSet,
    params: &RegularityParams,
    merge_stable: bool,
) -> Result<Vec<Check>> {
    let n = ExactRatio::from(a.len());
    let n2 = &n * &n;
    let e = ExactRatio::from(r.energy);
    let mut checks = alloc::vec![Check::assert("merge_stable", merge_stable)];
    for (j, p) in r.parts.iter().enumerate() {
        let lhs = ExactRatio::from(p.len() * p.len()) * ExactRatio::from(2) * r.k.clone();
        let rhs = &params.omega * &n2;
        checks.push(Check::assert(format!("large.{j}"), lhs >= rhs).with("2K|A_j|^2", lhs).with("ω|A|^2", rhs));
    }
    for i in 0..r.parts.len() {
        for j in i + 1..r.parts.len() {
            let (p, q) = (&r.parts[i], &r.parts[j]);
            let lhs = ExactRatio::from(energy2(p, q)?) * n.clone();
            let rhs = &params.epsilon * &ExactRatio::from((p.len() * q.len()) as u128 * (p.len() * q.len()) as u128);
            checks.push(
                Check::assert(format!("noncommunicating.{i}.{j}"), lhs <= rhs)
                    .with("E(A_i,A_j)|A|", lhs)
                    .with("ε|A_i|^2|A_j|^2", rhs),
            );
        }
    }
    let lhs = ExactRatio::from(energy2(&r.omega_set, a)?);
    let rhs = &params.omega * &e;
    checks.push(Check::assert("noise", lhs <= rhs).with("E(Ω,A)", lhs).with("ωE(A)", rhs));
    Ok(checks)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        crate::check::all_pass(&self.checks)
    }
}

/// Recomputes every certificate of `result` from the sets alone.
///
/// Fails with `Inconsistent` when the stored result does not describe a
/// partition of `a`, or any stored number or certificate disagrees with the
/// recomputation. Returns the recomputed checks otherwise; their statuses
/// report whether conditions (i) to (iv) hold.
pub fn verify_decomposition(
    result: &DecompositionResult,
    a: &GroupSet,
    params: &RegularityParams,
) -> Result<VerificationReport> {
    let mismatch = |what: &str| Error::Inconsistent(format!("{what} disagrees with recomputation"));
    check_partition(result.terminal_parts(), a)?;
    let omega = result.noise_parts.iter().fold(GroupSet::empty(a.spec()), |acc, p| acc.union(p));
    if omega != result.omega_set {
        return Err(mismatch("noise set"));
    }
    if result.parts_status.len() != result.parts.len() || result.noise_status.len() != result.noise_parts.len() {
        return Err(Error::Inconsistent("split status list has the wrong length".into()));
    }
    let energy = self_energy(a);
    let n = ExactRatio::from(a.len());
    let n2 = &n * &n;
    let k = ExactRatio::frac(a.len() as u128 * a.len() as u128 * a.len() as u128, energy);
    if energy != result.energy || k != result.k {
        return Err(mismatch("K"));
    }
    let eps1 = params.epsilon1();
    let terminal: Vec<GroupSet> = result.terminal_parts().cloned().collect();
    if objective(&terminal, a, &eps1)? != result.objective {
        return Err(mismatch("objective"));
    }
    if result.moves.last().map_or(ExactRatio::zero(), |m| m.objective.clone()) != result.objective {
        return Err(mismatch("move log"));
    }
    for p in &result.parts {
        let small = ExactRatio::from(2) * k.clone() * ExactRatio::from(p.len() * p.len()) <= &params.omega * &n2;
        if small {
            return Err(Error::Inconsistent("a kept part is below the noise threshold".into()));
        }
    }
    for p in &result.noise_parts {
        let small = ExactRatio::from(2) * k.clone() * ExactRatio::from(p.len() * p.len()) <= &params.omega * &n2;
        if !small {
            return Err(Error::Inconsistent("a noise part is above the noise threshold".into()));
        }
    }

    let mut checks = Vec::new();
    let mut previous = ExactRatio::zero();
    let mut decreasing = true;
    for m in &result.moves {
        decreasing &= m.objective < previous;
        previous = m.objective.clone();
    }
    checks.push(Check::assert("trace_strictly_decreasing", decreasing).with("moves", result.moves.len()));

    let e = ExactRatio::from(energy);
    let mut merge_stable = true;
    for (i, p) in terminal.iter().enumerate() {
        for q in &terminal[i + 1..] {
            let lhs = ExactRatio::from(energy4(p, q, a, a)?);
            let rhs = &eps1 * &(&(ExactRatio::from(p.len() * q.len()) / n2.clone()) * &e);
            merge_stable &= lhs <= rhs;
        }
    }
    let recomputed = certify_conditions(result, a, params, merge_stable)?;
    let stored: Vec<(&str, Status)> = result.certificates.iter().map(|c| (c.name.as_str(), c.status)).collect();
    let fresh: Vec<(&str, Status)> = recomputed.iter().map(|c| (c.name.as_str(), c.status)).collect();
    if stored != fresh {
        return Err(mismatch("certificates"));
    }
    checks.extend(recomputed);

    // (ii): E_*[A_j] (ωε)^2 <= 4K where affordable
    let oe2 = (&params.omega * &params.epsilon).pow(2);
    let four_k = ExactRatio::from(4) * k.clone();
    let r_aa = rep_counts(a, a, Sign::Plus);
    for (j, (p, status)) in result.parts.iter().zip(&result.parts_status).enumerate() {
        if p.len() >= 2 && p.len() <= params.structure_cap {
            let estar = estar_exact(p, params.structure_cap)?.value;
            let lhs = &estar * &oe2;
            checks.push(
                Check::assert(format!("structured.{j}"), lhs <= four_k)
                    .with("E_*[A_j]", estar)
                    .with("E_*(ωε)^2", lhs)
                    .with("4K", four_k.clone()),
            );
        } else {
            checks.push(
                Check::reported(format!("structured.{j}"))
                    .with("certified_exact", u32::from(*status == SplitStatus::CertifiedExact)),
            );
        }
        checks.push(Check::reported(format!("doubling.{j}")).with("D[A_j]", doubling(p)?));
    }
    for (j, (p, status)) in terminal.iter().zip(result.parts_status.iter().chain(&result.noise_status)).enumerate() {
        if *status == SplitStatus::CertifiedExact && p.len() <= RECHECK_CAP {
            checks
                .push(Check::assert(format!("split_stable.{j}"), split_stable_brute(p, &r_aa, &eps1, a.len(), energy)));
        } else {
            checks.push(
                Check::reported(format!("split_stable.{j}"))
                    .with("certified_exact", u32::from(*status == SplitStatus::CertifiedExact)),
            );
        }
    }
    Ok(VerificationReport { checks })
}

/// Every `S ⊔ T = part` satisfies `E(S,T,A,A) |A|^2 >= ε1 |S||T| E(A)`.
fn split_stable_brute(
    part: &GroupSet,
    r_aa: &HashMap<GroupElement, u64>,
    eps1: &ExactRatio,
    n: usize,
    energy: u128,
) -> bool {
    let m = part.len();
    if m < 2 {
        return true;
    }
    let spec = part.spec();
    let elems = part.elements();
    let lhs_scale = ExactRatio::from(n * n);
    let rhs_scale = eps1 * &ExactRatio::from(energy);
    (1u64..(1 << (m - 1))).all(|rest| {
        let mask = (rest << 1) | 1;
        if mask == (1u64 << m) - 1 {
            return true;
        }
        let (mut cross, mut ns) = (0u128, 0usize);
        for i in (0..m).filter(|&i| (mask >> i) & 1 == 1) {
            ns += 1;
            for j in (0..m).filter(|&j| (mask >> j) & 1 == 0) {
                cross +=
                    r_aa.get(&spec.combine_unchecked(&elems[i], &elems[j], Sign::Plus)).copied().unwrap_or(0) as u128;
            }
        }
        ExactRatio::from(cross) * lhs_scale.clone() >= &rhs_scale * &ExactRatio::from(ns * (m - ns))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GroupSpec;

    fn quarter() -> RegularityParams {
        RegularityParams::new(ExactRatio::frac(1, 4), ExactRatio::frac(1, 4)).unwrap()
    }

    fn two_blocks() -> GroupSet {
        GroupSet::integers([0, 1, 2, 100, 101, 102])
    }

    #[test]
    fn params_validation() {
        let p = quarter();
        assert_eq!(p.epsilon1(), ExactRatio::frac(1, 32));
        assert!(RegularityParams::new(ExactRatio::zero(), ExactRatio::frac(1, 4)).is_err());
        assert!(RegularityParams::new(ExactRatio::frac(1, 4), ExactRatio::frac(1, 3)).is_err());
    }

    #[test]
    fn objective_examples() {
        let a = GroupSet::integers([0, 1]);
        let eps1 = ExactRatio::frac(1, 32);
        assert_eq!(objective(core::slice::from_ref(&a), &a, &eps1).unwrap(), ExactRatio::zero());
        let split = [GroupSet::integers([0]), GroupSet::integers([1])];
        assert_eq!(objective(&split, &a, &eps1).unwrap(), ExactRatio::frac(125, 64));
        let overlap = [GroupSet::integers([0, 1]), GroupSet::integers([1])];
        assert!(matches!(objective(&overlap, &a, &eps1), Err(Error::Inconsistent(_))));
        assert!(objective(&[GroupSet::integers([0])], &a, &eps1).is_err());
    }

    #[test]
    fn merge_changes_objective_by_the_pair_term() {
        let a = GroupSet::integers([0, 1, 3, 4, 9]);
        let eps1 = ExactRatio::frac(1, 32);
        let three = [GroupSet::integers([0, 1]), GroupSet::integers([3, 4]), GroupSet::integers([9])];
        let two = [GroupSet::integers([0, 1, 3, 4]), GroupSet::integers([9])];
        let (p, q) = (&three[0], &three[1]);
        let term = ExactRatio::from(energy4(p, q, &a, &a).unwrap())
            - &eps1 * &(ExactRatio::frac((p.len() * q.len()) as u64, 25) * ExactRatio::from(self_energy(&a)));
        assert_eq!(objective(&two, &a, &eps1).unwrap(), objective(&three, &a, &eps1).unwrap() - term);
    }

    #[test]
    fn no_split_for_singletons_or_subgroups() {
        let a = two_blocks();
        let one = GroupSet::integers([100]);
        let out = find_violating_split(&one, &a, &quarter()).unwrap();
        assert_eq!((out.split, out.status), (None, SplitStatus::CertifiedExact));

        let f3 = GroupSpec::prime_field(3, 2).unwrap();
        let h = GroupSet::from_rows(f3, (0..3).flat_map(|i| (0..3).map(move |j| [i, j]))).unwrap();
        let out = find_violating_split(&h, &h, &quarter()).unwrap();
        assert_eq!((out.split, out.status), (None, SplitStatus::CertifiedExact));
    }

    #[test]
    fn two_blocks_do_not_split_at_quarter_parameters() {
        // E(B1, B2, A, A) = 38 against ε1 μ μ E(A) = (1/32)(1/4)(114) = 57/64
        let a = two_blocks();
        let b1 = GroupSet::integers([0, 1, 2]);
        let b2 = GroupSet::integers([100, 101, 102]);
        assert_eq!(energy4(&b1, &b2, &a, &a).unwrap(), 38);
        assert_eq!(self_energy(&a), 114);
        assert!(find_violating_split(&a, &a, &quarter()).unwrap().split.is_none());
    }

    #[test]
    fn large_threshold_separates_the_blocks() {
        // ε1 = 2 makes the block split's gap 38 - 2 (1/4) 114 = -19 negative
        let a = two_blocks();
        let params = RegularityParams::unchecked(ExactRatio::from(2), ExactRatio::from(2));
        let out = find_violating_split(&a, &a, &params).unwrap();
        let (s, t) = out.split.clone().unwrap();
        assert_eq!(s.union(&t), a);
        assert!(out.gap.clone().unwrap().is_negative());
        let gap = ExactRatio::from(energy4(&s, &t, &a, &a).unwrap())
            - ExactRatio::from(2) * ExactRatio::frac((s.len() * t.len()) as u64, 36) * ExactRatio::from(114);
        assert_eq!(out.gap.unwrap(), gap);
        // the returned split is the most violating one
        let blocks = ExactRatio::from(38) - ExactRatio::from(2) * ExactRatio::frac(9, 36) * ExactRatio::from(114);
        assert!(gap <= blocks);
    }

    #[test]
    fn subgroup_decomposes_trivially() {
        let f3 = GroupSpec::prime_field(3, 2).unwrap();
        let h = GroupSet::from_rows(f3, (0..3).flat_map(|i| (0..3).map(move |j| [i, j]))).unwrap();
        let r = decompose(&h, &quarter()).unwrap();
        assert_eq!(r.parts, core::slice::from_ref(&h));
        assert!(r.omega_set.is_empty());
        assert_eq!(r.k, ExactRatio::one());
        assert!(r.moves.is_empty());
        let v = verify_decomposition(&r, &h, &quarter()).unwrap();
        assert!(v.passed(), "{:?}", v.checks);
    }

    #[test]
    fn two_blocks_decompose() {
        let a = two_blocks();
        let r = decompose(&a, &quarter()).unwrap();
        assert_eq!(r.parts, core::slice::from_ref(&a));
        let v = verify_decomposition(&r, &a, &quarter()).unwrap();
        assert!(v.passed());
        let structured = v.checks.iter().find(|c| c.name == "structured.0").unwrap();
        assert_eq!(structured.status, Status::Pass);
    }

    fn assert_stable(r: &DecompositionResult, a: &GroupSet, params: &RegularityParams) {
        let eps1 = params.epsilon1();
        let e = ExactRatio::from(self_energy(a));
        let n2 = ExactRatio::from(a.len() * a.len());
        let terminal: Vec<_> = r.terminal_parts().cloned().collect();
        for (i, p) in terminal.iter().enumerate() {
            for q in &terminal[i + 1..] {
                let lhs = ExactRatio::from(energy4(p, q, a, a).unwrap());
                assert!(lhs <= &eps1 * &(ExactRatio::from(p.len() * q.len()) / n2.clone() * e.clone()));
            }
        }
        let mut last = ExactRatio::zero();
        for m in &r.moves {
            assert!(m.objective < last);
            last = m.objective.clone();
        }
        assert_eq!(objective(&terminal, a, &eps1).unwrap(), r.objective);
    }

    #[test]
    fn aggressive_threshold_exercises_both_moves() {
        let a = GroupSet::integers([0, 1, 2, 3, 50, 51, 52, 200, 201, 400]);
        let params = RegularityParams::unchecked(ExactRatio::from(3), ExactRatio::from(1));
        let r = decompose(&a, &params).unwrap();
        assert!(r.moves.iter().any(|m| m.kind == MoveKind::Split));
        assert!(r.moves.iter().any(|m| m.kind == MoveKind::Merge));
        assert_stable(&r, &a, &params);
        assert!(r.parts_status.iter().chain(&r.noise_status).all(|s| *s == SplitStatus::CertifiedExact));
        let v = verify_decomposition(&r, &a, &params).unwrap();
        for c in &v.checks {
            if c.name.starts_with("split_stable") || c.name == "merge_stable" || c.name == "trace_strictly_decreasing" {
                assert_eq!(c.status, Status::Pass, "{c:?}");
            }
        }
        assert_eq!(r, decompose(&a, &params).unwrap());
    }

    #[test]
    fn heuristic_split_path_is_labelled() {
        let a = GroupSet::integers([0, 1, 2, 3, 50, 51, 52, 200, 201, 400]);
        let mut params = RegularityParams::unchecked(ExactRatio::from(3), ExactRatio::from(1));
        params.split_exact_cap = 3;
        params.split_budget = 8;
        let r = decompose(&a, &params).unwrap();
        assert_stable(&r, &a, &params);
        let big = r.terminal_parts().zip(r.parts_status.iter().chain(&r.noise_status));
        for (p, s) in big {
            let expect =
                if p.len() <= 3 { SplitStatus::CertifiedExact } else { SplitStatus::HeuristicNoViolationFound };
            assert_eq!(*s, expect);
        }
        verify_decomposition(&r, &a, &params).unwrap();
    }

    #[test]
    fn singleton_far_point_goes_to_noise() {
        // ε1 = 1/2 cuts off 1000, and 2K <= ω|A|^2 sends it to Ω
        let a = GroupSet::integers([0, 1, 2, 3, 4, 5, 6, 7, 1000]);
        let params = RegularityParams::unchecked(ExactRatio::one(), ExactRatio::one());
        let r = decompose(&a, &params).unwrap();
        assert_eq!(r.parts, [GroupSet::integers(0..8)]);
        assert_eq!(r.noise_parts, [GroupSet::integers([1000])]);
        assert_eq!(r.omega_set, GroupSet::integers([1000]));
        verify_decomposition(&r, &a, &params).unwrap();
    }

    #[test]
    fn tampered_results_are_rejected() {
        let a = two_blocks();
        let params = quarter();
        let r = decompose(&a, &params).unwrap();

        let mut bad = r.clone();
        bad.parts = alloc::vec![GroupSet::integers([0, 1, 2, 100]), GroupSet::integers([100, 101, 102])];
        bad.parts_status = alloc::vec![SplitStatus::CertifiedExact; 2];
        assert!(matches!(verify_decomposition(&bad, &a, &params), Err(Error::Inconsistent(_))));

        let mut bad = r.clone();
        bad.k = ExactRatio::from(3);
        assert!(verify_decomposition(&bad, &a, &params).is_err());

        let mut bad = r.clone();
        bad.objective = ExactRatio::from(-1);
        assert!(verify_decomposition(&bad, &a, &params).is_err());

        let mut bad = r;
        bad.certificates[0].status = Status::Fail;
        assert!(verify_decomposition(&bad, &a, &params).is_err());
    }
}
