//! Seeded random sets: uniform subsets of `[0, 2N)` in `z:1` and of `F_5^2`.

use addlab_core::{ExactRatio, GroupSet, GroupSpec};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    Integers,
    F5Squared,
}

/// One independent stream per suite section.
pub fn stream(seed: u64, section: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(section);
    rng
}

pub fn pick_ambient(rng: &mut ChaCha8Rng) -> Ambient {
    if rng.random::<bool>() {
        Ambient::Integers
    } else {
        Ambient::F5Squared
    }
}

/// A uniform subset of size drawn from `[lo, hi]`; integer sets live in
/// `[0, 2 hi)`.
pub fn random_set(rng: &mut ChaCha8Rng, ambient: Ambient, lo: usize, hi: usize) -> GroupSet {
    match ambient {
        Ambient::Integers => {
            let len = rng.random_range(lo..=hi);
            let picked = sample(rng, 2 * hi, len);
            GroupSet::integers(picked.into_iter().map(|v| v as i64))
        }
        Ambient::F5Squared => {
            let len = rng.random_range(lo.min(25)..=hi.min(25));
            let picked = sample(rng, 25, len);
            let spec = GroupSpec::prime_field(5, 2).expect("5 is prime");
            GroupSet::from_rows(spec, picked.into_iter().map(|v| [(v / 5) as i64, (v % 5) as i64])).expect("valid rows")
        }
    }
}

/// A nonempty subset of `a`, uniform over sizes.
pub fn random_subset(rng: &mut ChaCha8Rng, a: &GroupSet) -> GroupSet {
    let len = rng.random_range(1..=a.len());
    let mut idx = sample(rng, a.len(), len).into_vec();
    idx.sort_unstable();
    GroupSet::new(a.spec(), idx.into_iter().map(|i| a.elements()[i].clone())).expect("subset of a valid set")
}

/// `T = num/den >= 1` with small numerator and denominator.
pub fn random_t(rng: &mut ChaCha8Rng) -> ExactRatio {
    let den = rng.random_range(1..=3i64);
    let num = rng.random_range(den..=8 * den);
    ExactRatio::new(num, den).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a = random_set(&mut stream(3, 0), Ambient::Integers, 2, 10);
        assert_eq!(a, random_set(&mut stream(3, 0), Ambient::Integers, 2, 10));
        assert!((2..=10).contains(&a.len()));
        assert!(a.iter().all(|e| (0..20).contains(&e.as_i64s().unwrap()[0])));
        let b = random_set(&mut stream(3, 1), Ambient::F5Squared, 2, 30);
        assert!(b.len() <= 25);
        let s = random_subset(&mut stream(3, 2), &b);
        assert!(!s.is_empty() && s.is_subset(&b));
        assert!(random_t(&mut stream(3, 4)) >= 1);
    }
}
