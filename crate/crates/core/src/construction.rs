//! Block counterexample family in `F_p^n`: small bipartition energy,
//! large doubling.
//!
//! `L_1` sits on the first `m_1` coordinates and `L_j ≤ L_1` on the first
//! `m_j`; each `H_j` (`j >= 2`, `|H_j| = M + 1 = p^h`) owns its own block of
//! `h` coordinates. With `H*_j = H_j \ {0}`, the parts are `A_1 = L_1` and
//! `A_j = L_j ∔ H*_2 ∔ … ∔ H*_j`, and `A` is their disjoint union.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::arith::{doubling, sumset_unchecked};
use crate::group::is_prime;
use crate::partition::{estar_exact, estar_heuristic, PartitionQuantityReport, DEFAULT_ESTAR_CAP};
use crate::{Check, Error, ExactRatio, GroupSet, GroupSpec, Result, Sign};

/// Largest `|A|` the builder will materialize.
pub const MAX_CONSTRUCTION_SIZE: u128 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanWarning {
    /// `a / k` is not a power of `p`.
    AOverKNotPowerOfP,
    /// `p^{m_j}` exceeds `a p / (k M^{j-1})`: no power of `p` fits the window.
    WindowMissed { j: usize },
    /// `m_j = m_{j+1}`, so `L_{j+1} = L_j`.
    NestingNotStrict { j: usize },
    /// `k > M / 2`.
    KAboveHalfM,
    /// `k M^{k-1} > a`.
    ABelowRegime,
}

impl fmt::Display for PlanWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanWarning::AOverKNotPowerOfP => f.write_str("a/k is not a power of p"),
            PlanWarning::WindowMissed { j } => write!(f, "|L_{j}| lies above a*p/(k*M^{})", j - 1),
            PlanWarning::NestingNotStrict { j } => write!(f, "L_{} = L_{j}", j + 1),
            PlanWarning::KAboveHalfM => f.write_str("k > M/2"),
            PlanWarning::ABelowRegime => f.write_str("k*M^(k-1) > a"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub p: u64,
    pub k: usize,
    pub m: u64,
    pub a: u64,
    /// `m_j` with `|L_j| = p^{m_j}`, for `j = 1..=k`.
    pub l_exponents: Vec<u32>,
    /// `M + 1 = p^h`.
    pub h: u32,
    pub n: usize,
    pub warnings: Vec<PlanWarning>,
}

impl ConstructionPlan {
    pub fn spec(&self) -> GroupSpec {
        GroupSpec::PrimeField { p: self.p, dim: self.n }
    }

    /// `|L_j|`, 1-based.
    pub fn l_size(&self, j: usize) -> u128 {
        (self.p as u128).pow(self.l_exponents[j - 1])
    }

    /// `|A_j| = |L_j| M^{j-1}`, 1-based.
    pub fn part_size(&self, j: usize) -> u128 {
        self.l_size(j) * (self.m as u128).pow(j as u32 - 1)
    }

    pub fn total_size(&self) -> u128 {
        (1..=self.k).map(|j| self.part_size(j)).sum()
    }

    /// Coordinates owned by `H_j`, `j >= 2`.
    pub fn h_block(&self, j: usize) -> Range<usize> {
        let start = self.l_exponents[0] as usize + (j - 2) * self.h as usize;
        start..start + self.h as usize
    }
}

/// Validates `(p, k, M, a)` and fixes each `|L_j|` as the least power of `p`
/// that is at least `a / (k M^{j-1})`.
pub fn plan_construction(p: u64, k: usize, m: u64, a: u64) -> Result<ConstructionPlan> {
    if p <= 2 || !is_prime(p) {
        return Err(Error::BadModulus(p));
    }
    if m <= p {
        return Err(Error::InvalidArgument(format!("need M > p, got M = {m}, p = {p}")));
    }
    let h = exact_log(m + 1, p)
        .ok_or_else(|| Error::InvalidArgument(format!("M + 1 = {} is not a power of {p}", m + 1)))?;
    if k < 2 {
        return Err(Error::InvalidArgument("need k >= 2".into()));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("need a >= 1".into()));
    }
    let overflow = || Error::Overflow("construction plan");
    let mut warnings = Vec::new();
    if !a.is_multiple_of(k as u64) || exact_log(a / k as u64, p).is_none() {
        warnings.push(PlanWarning::AOverKNotPowerOfP);
    }
    let (p128, a128, m128) = (p as u128, a as u128, m as u128);
    let mut l_exponents = Vec::with_capacity(k);
    for j in 1..=k {
        let denom = m128.checked_pow(j as u32 - 1).and_then(|v| v.checked_mul(k as u128)).ok_or_else(overflow)?;
        let mut e = 0u32;
        let mut pow = 1u128;
        while pow * denom < a128 {
            pow = pow.checked_mul(p128).ok_or_else(overflow)?;
            e += 1;
        }
        if pow * denom > a128 * p128 {
            warnings.push(PlanWarning::WindowMissed { j });
        }
        l_exponents.push(e);
    }
    for j in 1..k {
        if l_exponents[j - 1] == l_exponents[j] {
            warnings.push(PlanWarning::NestingNotStrict { j });
        }
    }
    if 2 * k as u64 > m {
        warnings.push(PlanWarning::KAboveHalfM);
    }
    let regime = m128.checked_pow(k as u32 - 1).and_then(|v| v.checked_mul(k as u128));
    if regime.is_none_or(|v| v > a128) {
        warnings.push(PlanWarning::ABelowRegime);
    }
    let n = l_exponents[0] as usize + (k - 1) * h as usize;
    let plan = ConstructionPlan { p, k, m, a, l_exponents, h, n, warnings };
    let size = (1..=k)
        .try_fold(0u128, |acc, j| {
            (p128.checked_pow(plan.l_exponents[j - 1]))
                .and_then(|l| m128.checked_pow(j as u32 - 1).and_then(|mm| l.checked_mul(mm)))
                .and_then(|s| acc.checked_add(s))
        })
        .ok_or_else(overflow)?;
    if size > MAX_CONSTRUCTION_SIZE {
        return Err(Error::CapExceeded { size: size as usize, cap: MAX_CONSTRUCTION_SIZE as usize });
    }
    Ok(plan)
}

fn exact_log(mut v: u64, p: u64) -> Option<u32> {
    if v == 0 {
        return None;
    }
    let mut e = 0;
    while v.is_multiple_of(p) {
        v /= p;
        e += 1;
    }
    (v == 1).then_some(e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionResult {
    pub plan: ConstructionPlan,
    pub set: GroupSet,
    /// `A_1..A_k`.
    pub parts: Vec<GroupSet>,
    /// `L_1..L_k`.
    pub l_spaces: Vec<GroupSet>,
    /// `H_2..H_k` (index 0 is `H_2`).
    pub h_spaces: Vec<GroupSet>,
}

/// All vectors of `F_p^n` supported on `coords`.
fn block_space(p: u64, n: usize, coords: Range<usize>) -> Vec<Vec<i64>> {
    let mut out = alloc::vec![alloc::vec![0i64; n]];
    for c in coords {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for v in &out {
            for digit in 0..p as i64 {
                let mut w = v.clone();
                w[c] = digit;
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn to_set(spec: GroupSpec, rows: &[Vec<i64>]) -> Result<GroupSet> {
    GroupSet::from_rows(spec, rows)
}

pub fn build_counterexample(plan: &ConstructionPlan) -> Result<ConstructionResult> {
    let spec = plan.spec();
    let (p, n) = (plan.p, plan.n);
    let l_rows: Vec<Vec<Vec<i64>>> = plan.l_exponents.iter().map(|&e| block_space(p, n, 0..e as usize)).collect();
    let h_rows: Vec<Vec<Vec<i64>>> = (2..=plan.k).map(|j| block_space(p, n, plan.h_block(j))).collect();

    let mut parts = Vec::with_capacity(plan.k);
    for j in 1..=plan.k {
        let mut rows = l_rows[j - 1].clone();
        for hs in &h_rows[..j - 1] {
            // supports are disjoint, so the sum is a coordinate merge
            let nonzero = hs.iter().filter(|v| v.iter().any(|&c| c != 0));
            let mut next = Vec::with_capacity(rows.len() * hs.len());
            for hv in nonzero {
                for r in &rows {
                    next.push(r.iter().zip(hv).map(|(x, y)| x + y).collect());
                }
            }
            rows = next;
        }
        parts.push(to_set(spec, &rows)?);
    }
    let set = parts.iter().fold(GroupSet::empty(spec), |acc, part| acc.union(part));
    Ok(ConstructionResult {
        plan: plan.clone(),
        set,
        parts,
        l_spaces: l_rows.iter().map(|r| to_set(spec, r)).collect::<Result<_>>()?,
        h_spaces: h_rows.iter().map(|r| to_set(spec, r)).collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Compute `A + A` in full only up to this `|A|`.
    pub sumset_cap: usize,
    pub estar_cap: usize,
    pub heuristic_budget: u64,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { sumset_cap: 4096, estar_cap: DEFAULT_ESTAR_CAP, heuristic_budget: 50, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionReport {
    pub checks: Vec<Check>,
    pub size: usize,
    pub part_sizes: Vec<usize>,
    /// `|A_1 + A_k|`.
    pub a1_plus_ak: usize,
    /// `|L_1| M^{k-1}`.
    pub lower_bound: u128,
    pub sumset_size: Option<usize>,
    pub doubling: Option<ExactRatio>,
    pub estar: PartitionQuantityReport,
}

/// Re-derives the structural claims of a built instance.
///
/// Returns `Err(CheckFailed)` when disjointness, a direct sum, a part size,
/// `|A_1 + A_k|` or `|A + A| >= |L_1| M^{k-1}` fails; those can only fail
/// through a construction bug.
pub fn validate_construction(result: &ConstructionResult, opts: &ValidateOptions) -> Result<ConstructionReport> {
    let plan = &result.plan;
    let k = plan.k;
    let a = &result.set;
    let mut checks = Vec::new();

    let mut disjoint = true;
    for i in 0..k {
        for j in i + 1..k {
            disjoint &= result.parts[i].is_disjoint(&result.parts[j]);
        }
    }
    let covers = result.parts.iter().map(GroupSet::len).sum::<usize>() == a.len();
    checks.push(Check::assert("construct.parts_disjoint", disjoint && covers));

    let stars: Vec<GroupSet> = result
        .h_spaces
        .iter()
        .map(|h| GroupSet::new(h.spec(), h.iter().filter(|e| !e.is_zero()).cloned()))
        .collect::<Result<_>>()?;
    for j in 1..=k {
        let mut acc = result.l_spaces[j - 1].clone();
        let mut direct = true;
        for star in &stars[..j - 1] {
            let next = sumset_unchecked(&acc, star, Sign::Plus);
            direct &= next.len() == acc.len() * star.len();
            acc = next;
        }
        checks.push(Check::assert(format!("construct.direct_sum.A_{j}"), direct && acc == result.parts[j - 1]));
        let expect = plan.part_size(j);
        checks.push(
            Check::assert(format!("construct.part_size.A_{j}"), result.parts[j - 1].len() as u128 == expect)
                .with("|A_j|", result.parts[j - 1].len())
                .with("|L_j|M^(j-1)", expect),
        );
    }
    let mut independent = result.l_spaces[0].clone();
    let mut direct = true;
    for star in &stars {
        let next = sumset_unchecked(&independent, star, Sign::Plus);
        direct &= next.len() == independent.len() * star.len();
        independent = next;
    }
    checks.push(Check::assert("construct.mutual_independence", direct));

    let lower_bound = plan.l_size(1) * (plan.m as u128).pow(k as u32 - 1);
    let a1_plus_ak = sumset_unchecked(&result.parts[0], &result.parts[k - 1], Sign::Plus).len();
    checks.push(
        Check::assert("construct.a1_plus_ak", a1_plus_ak as u128 == lower_bound)
            .with("|A_1+A_k|", a1_plus_ak)
            .with("|L_1|M^(k-1)", lower_bound),
    );

    let (sumset_size, dbl) = if a.len() <= opts.sumset_cap {
        let s = sumset_unchecked(a, a, Sign::Plus).len();
        checks.push(
            Check::assert("construct.sumset_lower_bound", s as u128 >= lower_bound)
                .with("|A+A|", s)
                .with("|L_1|M^(k-1)", lower_bound),
        );
        let d = doubling(a)?;
        checks.push(Check::reported("construct.doubling").with("D[A]", d.clone()));
        (Some(s), Some(d))
    } else {
        // A_1 + A_k ⊆ A + A still gives the bound
        checks.push(
            Check::assert("construct.sumset_lower_bound", a1_plus_ak as u128 >= lower_bound)
                .with("|A_1+A_k|", a1_plus_ak)
                .with("|L_1|M^(k-1)", lower_bound),
        );
        (None, None)
    };

    for c in &checks {
        if c.failed() {
            return Err(Error::CheckFailed(c.name.clone()));
        }
    }

    let size = a.len();
    let size_ok = plan.a as usize <= size && size as u128 <= plan.a as u128 * plan.p as u128;
    checks.push(
        Check::assert("construct.size_window", size_ok)
            .with("a", plan.a)
            .with("|A|", size)
            .with("pa", plan.a as u128 * plan.p as u128),
    );

    let estar = if size <= opts.estar_cap {
        estar_exact(a, opts.estar_cap)?
    } else {
        estar_heuristic(a, opts.heuristic_budget, opts.seed)?
    };
    checks.push(
        Check::reported(String::from("construct.estar"))
            .with("E_*", estar.value.clone())
            .with("exact", u32::from(estar.mode == crate::partition::Mode::Exact)),
    );

    Ok(ConstructionReport {
        checks,
        size,
        part_sizes: result.parts.iter().map(GroupSet::len).collect(),
        a1_plus_ak,
        lower_bound,
        sumset_size,
        doubling: dbl,
        estar,
    })
}
