//! Literal quadruple enumeration, kept only to cross-check the
//! representation-function energies.

use crate::{Error, GroupSet, Result, Sign};

/// Largest product of set sizes the quartic loops will accept.
pub const ORACLE_GUARD: u128 = 100_000_000;

fn guard(sizes: &[usize]) -> Result<()> {
    let product: u128 = sizes.iter().map(|&s| s as u128).product();
    if product > ORACLE_GUARD {
        return Err(Error::CapExceeded { size: product as usize, cap: ORACLE_GUARD as usize });
    }
    Ok(())
}

/// `#{(a1, a2, b1, b2) ∈ A×A×B×B : a1 - b1 = a2 - b2}` by enumeration.
pub fn energy2_oracle(a: &GroupSet, b: &GroupSet) -> Result<u128> {
    a.same_group(b)?;
    guard(&[a.len(), a.len(), b.len(), b.len()])?;
    let spec = a.spec();
    let mut count = 0u128;
    for a1 in a {
        for a2 in a {
            for b1 in b {
                let lhs = spec.combine_unchecked(a1, b1, Sign::Minus);
                for b2 in b {
                    if lhs == spec.combine_unchecked(a2, b2, Sign::Minus) {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `#{(a, b, c, d) ∈ A×B×C×D : a + b = c + d}` by enumeration.
pub fn energy4_oracle(a: &GroupSet, b: &GroupSet, c: &GroupSet, d: &GroupSet) -> Result<u128> {
    a.same_group(b)?;
    a.same_group(c)?;
    a.same_group(d)?;
    guard(&[a.len(), b.len(), c.len(), d.len()])?;
    let spec = a.spec();
    let mut count = 0u128;
    for x in a {
        for y in b {
            let lhs = spec.combine_unchecked(x, y, Sign::Plus);
            for z in c {
                for w in d {
                    if lhs == spec.combine_unchecked(z, w, Sign::Plus) {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}
