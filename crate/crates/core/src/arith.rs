//! Sumsets, representation functions and additive energies.
//!
//! Energies go through representation functions (`O(|A||B|)` hash work);
//! the literal quadruple counts live in [`crate::oracle`].

use alloc::collections::BTreeMap;

use hashbrown::HashMap;

use crate::{Error, ExactRatio, GroupElement, GroupSet, Result, Sign};

/// `x -> #{(a, b) : a ± b = x}`, nonzero entries only.
pub(crate) fn rep_counts(a: &GroupSet, b: &GroupSet, sign: Sign) -> HashMap<GroupElement, u64> {
    let spec = a.spec();
    let mut counts = HashMap::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            *counts.entry(spec.combine_unchecked(x, y, sign)).or_insert(0u64) += 1;
        }
    }
    counts
}

fn sum_squares(counts: &HashMap<GroupElement, u64>) -> u128 {
    counts.values().map(|&c| c as u128 * c as u128).sum()
}

/// Table of nonzero representation counts.
///
/// For the minus sign `r(x) = #{(a, b) : a - b = x} = |A ∩ (B + x)|`; for the
/// plus sign `r(x) = #{(a, b) : a + b = x}`. Absent keys mean zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepFunction {
    counts: BTreeMap<GroupElement, u64>,
}

impl RepFunction {
    pub fn get(&self, x: &GroupElement) -> u64 {
        self.counts.get(x).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }

    /// Size of the support, i.e. `|A ± B|`.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u128 {
        self.counts.values().map(|&c| c as u128).sum()
    }

    pub fn sum_of_squares(&self) -> u128 {
        self.counts.values().map(|&c| c as u128 * c as u128).sum()
    }
}

pub fn rep_function(a: &GroupSet, b: &GroupSet, sign: Sign) -> Result<RepFunction> {
    a.same_group(b)?;
    Ok(RepFunction { counts: rep_counts(a, b, sign).into_iter().collect() })
}

/// `S ± T`.
pub fn sumset(s: &GroupSet, t: &GroupSet, sign: Sign) -> Result<GroupSet> {
    s.same_group(t)?;
    if s.is_empty() || t.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(sumset_unchecked(s, t, sign))
}

pub(crate) fn sumset_unchecked(s: &GroupSet, t: &GroupSet, sign: Sign) -> GroupSet {
    let spec = s.spec();
    let mut seen = hashbrown::HashSet::with_capacity(s.len() * t.len());
    for x in s {
        for y in t {
            seen.insert(spec.combine_unchecked(x, y, sign));
        }
    }
    GroupSet::from_unsorted(spec, seen.into_iter().collect())
}

/// `nS - mS` by repeated sumsets.
pub fn iterated_sumset(s: &GroupSet, n: usize, m: usize) -> Result<GroupSet> {
    if n + m == 0 {
        return Err(Error::InvalidArgument("iterated sumset needs n + m >= 1".into()));
    }
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let (mut acc, mut plus_left, minus_left) = if n > 0 { (s.clone(), n - 1, m) } else { (s.negate(), 0, m - 1) };
    while plus_left > 0 {
        acc = sumset_unchecked(&acc, s, Sign::Plus);
        plus_left -= 1;
    }
    for _ in 0..minus_left {
        acc = sumset_unchecked(&acc, s, Sign::Minus);
    }
    Ok(acc)
}

/// `|S + S| / |S|`.
pub fn doubling(s: &GroupSet) -> Result<ExactRatio> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(ExactRatio::frac(sumset_unchecked(s, s, Sign::Plus).len(), s.len()))
}

/// `|A + B| = |A||B|`.
pub fn is_direct_sum(a: &GroupSet, b: &GroupSet) -> Result<bool> {
    Ok(sumset(a, b, Sign::Plus)?.len() == a.len() * b.len())
}

/// `E(A, B) = #{(a1, a2, b1, b2) : a1 - b1 = a2 - b2} = Σ_x r_{A-B}(x)^2`.
pub fn energy2(a: &GroupSet, b: &GroupSet) -> Result<u128> {
    a.same_group(b)?;
    Ok(sum_squares(&rep_counts(a, b, Sign::Minus)))
}

/// `E(A, B, C, D) = #{(a, b, c, d) : a + b = c + d} = Σ_x r_{A+B}(x) r_{C+D}(x)`.
pub fn energy4(a: &GroupSet, b: &GroupSet, c: &GroupSet, d: &GroupSet) -> Result<u128> {
    a.same_group(b)?;
    a.same_group(c)?;
    a.same_group(d)?;
    let left = rep_counts(a, b, Sign::Plus);
    let right = rep_counts(c, d, Sign::Plus);
    let (small, large) = if left.len() <= right.len() { (&left, &right) } else { (&right, &left) };
    Ok(small.iter().filter_map(|(x, &u)| large.get(x).map(|&v| u as u128 * v as u128)).sum())
}

/// Energy of `A` with itself, `E(A) := E(A, A)`.
pub fn self_energy(a: &GroupSet) -> u128 {
    sum_squares(&rep_counts(a, a, Sign::Minus))
}
