//! Constructive steps from the structural arguments: translate peeling,
//! covering by a direct family of translates, and translate saturation.
//! Every result can re-certify itself against its inputs.

use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::arith::{energy2, rep_counts, sumset};
use crate::{Check, Error, ExactRatio, GroupElement, GroupSet, Result, Sign};

/// Heaviest translate: the `x` maximizing `r(x)`, smallest `x` on ties.
fn heaviest(counts: hashbrown::HashMap<GroupElement, u64>) -> Option<(GroupElement, u64)> {
    counts.into_iter().fold(None, |best, (x, c)| match best {
        Some((bx, bc)) if bc > c || (bc == c && bx < x) => Some((bx, bc)),
        _ => Some((x, c)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchoenResult {
    /// Translates chosen, in order.
    pub translates: Vec<GroupElement>,
    pub x: GroupSet,
    /// `A ∩ (B + X)`.
    pub covered: GroupSet,
    /// `K = |A||B|^2 / E(A, B)`.
    pub k: ExactRatio,
    pub energy: u128,
    pub steps: usize,
}

/// Peels heavy translates `B + x` off `A` until the remaining energy with `B`
/// drops below half of `E(A, B)`.
///
/// Guarantees `|A|/(4K|B|) <= |X| <= 2K|A|/|B|` and `|A ∩ (B+X)| >= |A|/(4K)`.
pub fn schoen_cover(a: &GroupSet, b: &GroupSet) -> Result<SchoenResult> {
    a.same_group(b)?;
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.len() < b.len() {
        return Err(Error::InvalidArgument("peeling needs |A| >= |B|".into()));
    }
    let energy = energy2(a, b)?;
    let k = ExactRatio::frac(a.len() as u128 * (b.len() as u128).pow(2), energy);

    let mut rest = a.clone();
    let mut translates = Vec::new();
    while 2 * energy2(&rest, b)? >= energy {
        let (x, _) = heaviest(rep_counts(&rest, b, Sign::Minus)).expect("positive energy");
        rest = rest.difference(&b.translate(&x, Sign::Plus)?);
        translates.push(x);
    }
    let steps = translates.len();
    let x = GroupSet::new(a.spec(), translates.iter().cloned())?;
    Ok(SchoenResult { translates, x, covered: a.difference(&rest), k, energy, steps })
}

impl SchoenResult {
    /// Recomputes `K`, `A ∩ (B + X)` and both size bounds from scratch.
    pub fn certify(&self, a: &GroupSet, b: &GroupSet) -> Result<Vec<Check>> {
        let energy = energy2(a, b)?;
        let k = ExactRatio::frac(a.len() as u128 * (b.len() as u128).pow(2), energy);
        let mut covered = GroupSet::empty(a.spec());
        for x in &self.x {
            covered = covered.union(&a.intersection(&b.translate(x, Sign::Plus)?));
        }
        let (na, nb, nx) = (ExactRatio::from(a.len()), ExactRatio::from(b.len()), ExactRatio::from(self.x.len()));
        let four_k = ExactRatio::from(4) * k.clone();
        let lower = na.clone() / (four_k.clone() * nb.clone());
        let upper = ExactRatio::from(2) * k.clone() * na.clone() / nb.clone();
        let cover_bound = na.clone() / four_k;
        let nc = ExactRatio::from(covered.len());
        Ok(alloc::vec![
            Check::assert("schoen.k_matches", k == self.k && energy == self.energy).with("K", k.clone()),
            Check::assert("schoen.covered_matches", covered == self.covered),
            Check::assert("schoen.x_lower", lower <= nx).with("lower", lower).with("|X|", nx.clone()),
            Check::assert("schoen.x_upper", nx <= upper).with("|X|", nx.clone()).with("upper", upper),
            Check::assert("schoen.covered_lower", cover_bound <= nc).with("|A∩(B+X)|", nc).with("bound", cover_bound),
            // |X||B|/(2K) <= |A|
            Check::assert("schoen.step_budget", nx * nb / (ExactRatio::from(2) * k) <= na),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    pub z: GroupSet,
    /// `|A' + Z|` as built by the greedy pass.
    pub sum_size: usize,
}

/// Greedy covering: scan `A` in canonical order and keep `a` whenever
/// `A' + a` misses every translate kept so far. The kept family is maximal,
/// so `A' + Z` is direct and `A ⊆ A' - A' + Z`.
pub fn ruzsa_cover(a: &GroupSet, a_prime: &GroupSet) -> Result<CoverResult> {
    a.same_group(a_prime)?;
    if a_prime.is_empty() {
        return Err(Error::EmptySet);
    }
    if !a_prime.is_subset(a) {
        return Err(Error::NotSubset);
    }
    let spec = a.spec();
    let mut occupied: HashSet<GroupElement> = HashSet::new();
    let mut z = Vec::new();
    for x in a {
        let shifted: Vec<GroupElement> = a_prime.iter().map(|e| spec.combine_unchecked(e, x, Sign::Plus)).collect();
        if shifted.iter().all(|s| !occupied.contains(s)) {
            occupied.extend(shifted);
            z.push(x.clone());
        }
    }
    Ok(CoverResult { z: GroupSet::from_sorted(spec, z), sum_size: occupied.len() })
}

impl CoverResult {
    pub fn certify(&self, a: &GroupSet, a_prime: &GroupSet) -> Result<Vec<Check>> {
        let spec = a.spec();
        let sum = sumset(a_prime, &self.z, Sign::Plus)?;
        let translate_total: usize = self.z.iter().map(|_| a_prime.len()).sum();
        let diffs = sumset(a_prime, a_prime, Sign::Minus)?;
        let contained =
            a.iter().all(|x| self.z.iter().any(|z| diffs.contains(&spec.combine_unchecked(x, z, Sign::Minus))));
        Ok(alloc::vec![
            Check::assert("cover.z_subset", self.z.is_subset(a)),
            Check::assert("cover.direct_sum", sum.len() == a_prime.len() * self.z.len())
                .with("|A'+Z|", sum.len())
                .with("|A'||Z|", a_prime.len() * self.z.len()),
            Check::assert("cover.translates_disjoint", translate_total == sum.len() && sum.len() == self.sum_size),
            Check::assert("cover.contains_a", contained),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationResult {
    pub y: GroupSet,
    pub z: GroupSet,
    pub translates: Vec<GroupElement>,
    pub steps: usize,
}

/// Starting from `Z = A \ A'`, repeatedly moves the heaviest `Z ∩ (A' + x)`
/// into `Y` while its size is at least `|A'| / T`.
///
/// On return `|Z ∩ (A' + x)| < |A'| / T` for every `x`.
pub fn translate_saturate(a: &GroupSet, a_prime: &GroupSet, t: &ExactRatio) -> Result<SaturationResult> {
    a.same_group(a_prime)?;
    if a_prime.is_empty() {
        return Err(Error::EmptySet);
    }
    if !a_prime.is_subset(a) {
        return Err(Error::NotSubset);
    }
    if *t < 1 {
        return Err(Error::InvalidArgument("T must be at least 1".into()));
    }
    let bar = ExactRatio::from(a_prime.len()) / t.clone();
    let mut y = a_prime.clone();
    let mut z = a.difference(a_prime);
    let mut translates = Vec::new();
    while let Some((x, count)) = heaviest(rep_counts(&z, a_prime, Sign::Minus)) {
        if ExactRatio::from(count) < bar {
            break;
        }
        let hit = z.intersection(&a_prime.translate(&x, Sign::Plus)?);
        y = y.union(&hit);
        z = z.difference(&hit);
        translates.push(x);
    }
    let steps = translates.len();
    Ok(SaturationResult { y, z, translates, steps })
}

impl SaturationResult {
    /// Scans every `x ∈ Z - A'` (the only translates meeting `Z`).
    pub fn certify(&self, a: &GroupSet, a_prime: &GroupSet, t: &ExactRatio) -> Result<Vec<Check>> {
        let bar = ExactRatio::from(a_prime.len()) / t.clone();
        let worst = rep_counts(&self.z, a_prime, Sign::Minus).into_values().max().unwrap_or(0);
        let step_bound = (t.clone() * ExactRatio::from(a.len()) / ExactRatio::from(a_prime.len())).floor();
        let partition = self.y.is_disjoint(&self.z) && self.y.union(&self.z) == *a && a_prime.is_subset(&self.y);
        Ok(alloc::vec![
            Check::assert("saturate.partition", partition),
            Check::assert("saturate.z_property", ExactRatio::from(worst) <= bar)
                .with("max|Z∩(A'+x)|", worst)
                .with("|A'|/T", bar),
            Check::assert("saturate.step_bound", num_bigint::BigInt::from(self.steps) <= step_bound)
                .with("steps", self.steps)
                .with("bound", ExactRatio::integer(step_bound)),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;
    use crate::GroupSpec;

    fn z(v: i64) -> GroupElement {
        GroupSpec::Integer { dim: 1 }.element(&[v]).unwrap()
    }

    #[test]
    fn schoen_singletons() {
        let a = GroupSet::integers([0]);
        let r = schoen_cover(&a, &a).unwrap();
        assert_eq!(r.k, ExactRatio::one());
        assert_eq!((r.x.clone(), r.covered.clone()), (a.clone(), a.clone()));
        assert!(all_pass(&r.certify(&a, &a).unwrap()));
    }

    #[test]
    fn schoen_subgroup_single_peel() {
        let f3 = GroupSpec::prime_field(3, 2).unwrap();
        let h = GroupSet::from_rows(f3, [[0, 0], [1, 1], [2, 2]]).unwrap();
        let r = schoen_cover(&h, &h).unwrap();
        assert_eq!(r.k, ExactRatio::one());
        assert_eq!(r.x, GroupSet::from_rows(f3, [[0, 0]]).unwrap());
        assert_eq!(r.covered, h);
        assert!(all_pass(&r.certify(&h, &h).unwrap()));
    }

    #[test]
    fn schoen_interval_trace() {
        // E = 30, K = 16/15; peels x = 0 then x = 2, leaving energy 14 < 15
        let a = GroupSet::integers(0..8);
        let b = GroupSet::integers([0, 1]);
        let r = schoen_cover(&a, &b).unwrap();
        assert_eq!(r.energy, 30);
        assert_eq!(r.k, ExactRatio::frac(16, 15));
        assert_eq!(r.translates, [z(0), z(2)]);
        assert_eq!(r.covered, GroupSet::integers(0..4));
        assert!(all_pass(&r.certify(&a, &b).unwrap()));
    }

    #[test]
    fn schoen_errors() {
        let a = GroupSet::integers([0]);
        let b = GroupSet::integers([0, 1]);
        assert!(schoen_cover(&a, &b).is_err());
        assert_eq!(schoen_cover(&a, &GroupSet::empty(a.spec())), Err(Error::EmptySet));
    }

    #[test]
    fn cover_examples() {
        let a = GroupSet::integers([0]);
        assert_eq!(ruzsa_cover(&a, &a).unwrap().z, a);

        let a = GroupSet::integers([0, 1, 2]);
        let r = ruzsa_cover(&a, &a).unwrap();
        assert_eq!(r.z, GroupSet::integers([0]));
        assert!(all_pass(&r.certify(&a, &a).unwrap()));

        let a = GroupSet::integers([0, 10]);
        let ap = GroupSet::integers([0]);
        let r = ruzsa_cover(&a, &ap).unwrap();
        assert_eq!((r.z.clone(), r.sum_size), (a.clone(), 2));
        assert!(all_pass(&r.certify(&a, &ap).unwrap()));

        assert_eq!(ruzsa_cover(&ap, &a), Err(Error::NotSubset));
    }

    #[test]
    fn saturate_examples() {
        let a = GroupSet::integers([0, 1, 2, 3]);
        let r = translate_saturate(&a, &a, &ExactRatio::one()).unwrap();
        assert_eq!((r.y.clone(), r.z.len(), r.steps), (a.clone(), 0, 0));

        let ap = GroupSet::integers([0, 1]);
        let t = ExactRatio::from(2);
        let r = translate_saturate(&a, &ap, &t).unwrap();
        assert_eq!((r.y.clone(), r.z.len()), (a.clone(), 0));
        assert_eq!(r.translates, [z(2)]);
        assert!(all_pass(&r.certify(&a, &ap, &t).unwrap()));

        // x = 99 and x = 100 both meet {100}; the smaller one is taken
        let a = GroupSet::integers([0, 1, 100]);
        let t = ExactRatio::from(4);
        let r = translate_saturate(&a, &ap, &t).unwrap();
        assert_eq!((r.y.clone(), r.z.len()), (a.clone(), 0));
        assert_eq!(r.translates, [z(99)]);
        assert!(all_pass(&r.certify(&a, &ap, &t).unwrap()));
    }

    #[test]
    fn saturate_leaves_sparse_residue() {
        let a = GroupSet::integers([0, 1, 2, 3, 10, 20, 21, 40]);
        let ap = GroupSet::integers([0, 1, 2, 3]);
        let t = ExactRatio::from(2);
        let r = translate_saturate(&a, &ap, &t).unwrap();
        // {20, 21} is a translate hit of size 2 = |A'|/T; the singletons are not
        assert_eq!(r.z, GroupSet::integers([10, 40]));
        assert!(all_pass(&r.certify(&a, &ap, &t).unwrap()));
        assert!(translate_saturate(&a, &ap, &ExactRatio::frac(1, 2)).is_err());
        assert_eq!(translate_saturate(&ap, &a, &t), Err(Error::NotSubset));
    }
}
