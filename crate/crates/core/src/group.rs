use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::{Error, Result};

/// Ambient group: `Z^d` or `F_p^n` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Integer { dim: usize },
    PrimeField { p: u64, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Parses `z:<d>` or `fp:<p>:<n>`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    text.parse()
}

impl GroupSpec {
    pub fn integer(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(GroupSpec::Integer { dim })
    }

    pub fn prime_field(p: u64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        // coordinates are stored as i64
        if p <= 2 || p > i64::MAX as u64 || !is_prime(p) {
            return Err(Error::BadModulus(p));
        }
        Ok(GroupSpec::PrimeField { p, dim })
    }

    pub fn dim(&self) -> usize {
        match *self {
            GroupSpec::Integer { dim } | GroupSpec::PrimeField { dim, .. } => dim,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            GroupSpec::Integer { .. } => None,
            GroupSpec::PrimeField { p, .. } => Some(p),
        }
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(Coords::Small(alloc::vec![0; self.dim()].into_boxed_slice()))
    }

    /// Builds an element from machine integers, reducing mod `p` in `F_p^n`.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        self.check_dim(coords.len())?;
        Ok(match *self {
            GroupSpec::Integer { .. } => GroupElement(Coords::Small(coords.into())),
            GroupSpec::PrimeField { p, .. } => {
                let p = p as i64;
                GroupElement(Coords::Small(coords.iter().map(|c| c.rem_euclid(p)).collect()))
            }
        })
    }

    /// Builds an element from arbitrary-precision coordinates.
    pub fn element_big(&self, coords: Vec<BigInt>) -> Result<GroupElement> {
        self.check_dim(coords.len())?;
        Ok(match *self {
            GroupSpec::Integer { .. } => GroupElement::from_big(coords),
            GroupSpec::PrimeField { p, .. } => {
                let m = BigInt::from(p);
                let reduced: Box<[i64]> = coords
                    .iter()
                    .map(|c| {
                        let r = ((c % &m) + &m) % &m;
                        r.to_i64().expect("reduced below p")
                    })
                    .collect();
                GroupElement(Coords::Small(reduced))
            }
        })
    }

    /// Checks an element produced elsewhere against this group.
    pub fn conform(&self, e: &GroupElement) -> Result<()> {
        self.check_dim(e.dim())?;
        if let GroupSpec::PrimeField { p, .. } = *self {
            let ok = match &e.0 {
                Coords::Small(c) => c.iter().all(|&x| x >= 0 && (x as u64) < p),
                Coords::Big(_) => false,
            };
            if !ok {
                return Err(Error::InvalidArgument(format!("element {e} is not reduced mod {p}")));
            }
        }
        Ok(())
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found });
        }
        Ok(())
    }

    /// `a ± b`, reduced in the prime-field case.
    pub fn combine(&self, a: &GroupElement, b: &GroupElement, sign: Sign) -> Result<GroupElement> {
        self.check_dim(a.dim())?;
        self.check_dim(b.dim())?;
        Ok(self.combine_unchecked(a, b, sign))
    }

    pub(crate) fn combine_unchecked(&self, a: &GroupElement, b: &GroupElement, sign: Sign) -> GroupElement {
        match *self {
            GroupSpec::PrimeField { p, .. } => {
                let (Coords::Small(x), Coords::Small(y)) = (&a.0, &b.0) else {
                    unreachable!("prime-field elements are always small")
                };
                let p = p as i128;
                let out = x
                    .iter()
                    .zip(y.iter())
                    .map(|(&u, &v)| {
                        let s = match sign {
                            Sign::Plus => u as i128 + v as i128,
                            Sign::Minus => u as i128 - v as i128,
                        };
                        s.rem_euclid(p) as i64
                    })
                    .collect();
                GroupElement(Coords::Small(out))
            }
            GroupSpec::Integer { .. } => {
                if let (Coords::Small(x), Coords::Small(y)) = (&a.0, &b.0) {
                    let out: Option<Box<[i64]>> = x
                        .iter()
                        .zip(y.iter())
                        .map(|(&u, &v)| match sign {
                            Sign::Plus => u.checked_add(v),
                            Sign::Minus => u.checked_sub(v),
                        })
                        .collect();
                    if let Some(out) = out {
                        return GroupElement(Coords::Small(out));
                    }
                }
                let x = a.coords_big();
                let y = b.coords_big();
                let out = x
                    .into_iter()
                    .zip(y)
                    .map(|(u, v)| match sign {
                        Sign::Plus => u + v,
                        Sign::Minus => u - v,
                    })
                    .collect();
                GroupElement::from_big(out)
            }
        }
    }

    pub fn negate(&self, a: &GroupElement) -> GroupElement {
        self.combine_unchecked(&self.zero(), a, Sign::Minus)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupSpec::Integer { dim } => write!(f, "z:{dim}"),
            GroupSpec::PrimeField { p, dim } => write!(f, "fp:{p}:{dim}"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::MalformedSpec(text.to_string());
        let parts: Vec<&str> = text.trim().split(':').collect();
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        match parts.as_slice() {
            ["z", d] => GroupSpec::integer(num(d)? as usize),
            ["fp", p, n] => GroupSpec::prime_field(num(p)?, num(n)? as usize),
            _ => Err(bad()),
        }
    }
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Coords {
    // canonical: `Big` only when some coordinate leaves the i64 range
    Small(Box<[i64]>),
    Big(Box<[BigInt]>),
}

/// A point of `Z^d` or `F_p^n`. Equality is coordinate equality; the order
/// is lexicographic on coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement(Coords);

impl GroupElement {
    fn from_big(coords: Vec<BigInt>) -> Self {
        let small: Option<Box<[i64]>> = coords.iter().map(|c| c.to_i64()).collect();
        match small {
            Some(s) => GroupElement(Coords::Small(s)),
            None => GroupElement(Coords::Big(coords.into_boxed_slice())),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.0 {
            Coords::Small(c) => c.len(),
            Coords::Big(c) => c.len(),
        }
    }

    /// Coordinates as machine integers, when they all fit.
    pub fn as_i64s(&self) -> Option<&[i64]> {
        match &self.0 {
            Coords::Small(c) => Some(c),
            Coords::Big(_) => None,
        }
    }

    pub fn coords_big(&self) -> Vec<BigInt> {
        match &self.0 {
            Coords::Small(c) => c.iter().map(|&x| BigInt::from(x)).collect(),
            Coords::Big(c) => c.to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Coords::Small(c) => c.iter().all(|&x| x == 0),
            Coords::Big(_) => false,
        }
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Coords::Small(a), Coords::Small(b)) => a.cmp(b),
            _ => self.coords_big().cmp(&other.coords_big()),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Coords::Small(c) => write_coords(f, c.iter()),
            Coords::Big(c) => write_coords(f, c.iter()),
        }
    }
}

fn write_coords<T: fmt::Display>(f: &mut fmt::Formatter<'_>, it: impl Iterator<Item = T>) -> fmt::Result {
    for (i, c) in it.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// Finite subset of a group: deduplicated and sorted in element order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSet {
    spec: GroupSpec,
    elems: Vec<GroupElement>,
}

impl GroupSet {
    /// Deduplicates and sorts `items`, rejecting elements that do not conform.
    pub fn new(spec: GroupSpec, items: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let mut elems: Vec<GroupElement> = items.into_iter().collect();
        for e in &elems {
            spec.conform(e)?;
        }
        elems.sort_unstable();
        elems.dedup();
        Ok(GroupSet { spec, elems })
    }

    /// Convenience for tests and examples: elements given as i64 coordinate rows.
    pub fn from_rows<R: AsRef<[i64]>>(spec: GroupSpec, rows: impl IntoIterator<Item = R>) -> Result<Self> {
        let elems = rows.into_iter().map(|r| spec.element(r.as_ref())).collect::<Result<Vec<_>>>()?;
        GroupSet::new(spec, elems)
    }

    /// One-dimensional integer set.
    pub fn integers(values: impl IntoIterator<Item = i64>) -> Self {
        let spec = GroupSpec::Integer { dim: 1 };
        let mut elems: Vec<GroupElement> =
            values.into_iter().map(|v| GroupElement(Coords::Small(Box::new([v])))).collect();
        elems.sort_unstable();
        elems.dedup();
        GroupSet { spec, elems }
    }

    pub fn empty(spec: GroupSpec) -> Self {
        GroupSet { spec, elems: Vec::new() }
    }

    /// Caller guarantees sorted, deduplicated, conforming input.
    pub(crate) fn from_sorted(spec: GroupSpec, elems: Vec<GroupElement>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        GroupSet { spec, elems }
    }

    /// Sorts and deduplicates elements already known to conform.
    pub(crate) fn from_unsorted(spec: GroupSpec, mut elems: Vec<GroupElement>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        GroupSet { spec, elems }
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elems
    }

    pub fn iter(&self) -> core::slice::Iter<'_, GroupElement> {
        self.elems.iter()
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn index_of(&self, e: &GroupElement) -> Option<usize> {
        self.elems.binary_search(e).ok()
    }

    pub fn same_group(&self, other: &GroupSet) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(self.spec.to_string(), other.spec.to_string()));
        }
        Ok(())
    }

    pub fn is_subset(&self, other: &GroupSet) -> bool {
        self.spec == other.spec && self.elems.iter().all(|e| other.contains(e))
    }

    pub fn is_disjoint(&self, other: &GroupSet) -> bool {
        self.elems.iter().all(|e| !other.contains(e))
    }

    pub fn union(&self, other: &GroupSet) -> GroupSet {
        let mut v = self.elems.clone();
        v.extend(other.elems.iter().cloned());
        GroupSet::from_unsorted(self.spec, v)
    }

    pub fn intersection(&self, other: &GroupSet) -> GroupSet {
        let v = self.elems.iter().filter(|e| other.contains(e)).cloned().collect();
        GroupSet::from_sorted(self.spec, v)
    }

    pub fn difference(&self, other: &GroupSet) -> GroupSet {
        let v = self.elems.iter().filter(|e| !other.contains(e)).cloned().collect();
        GroupSet::from_sorted(self.spec, v)
    }

    /// `S + x` (or `S - x`).
    pub fn translate(&self, x: &GroupElement, sign: Sign) -> Result<GroupSet> {
        self.spec.conform(x)?;
        let v = self.elems.iter().map(|e| self.spec.combine_unchecked(e, x, sign)).collect();
        Ok(GroupSet::from_unsorted(self.spec, v))
    }

    pub fn negate(&self) -> GroupSet {
        let v = self.elems.iter().map(|e| self.spec.negate(e)).collect();
        GroupSet::from_unsorted(self.spec, v)
    }

    /// Sub-collection picked by sorted positions.
    pub(crate) fn pick(&self, idx: impl IntoIterator<Item = usize>) -> GroupSet {
        let v = idx.into_iter().map(|i| self.elems[i].clone()).collect();
        GroupSet::from_sorted(self.spec, v)
    }
}

impl Ord for GroupSet {
    /// Canonical set order: lexicographic on the sorted element sequences,
    /// a proper prefix sorting first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.elems.cmp(&other.elems)
    }
}

impl PartialOrd for GroupSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> IntoIterator for &'a GroupSet {
    type Item = &'a GroupElement;
    type IntoIter = core::slice::Iter<'a, GroupElement>;
    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

impl fmt::Debug for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", self.spec)?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({e})")?;
        }
        f.write_str("}")
    }
}
