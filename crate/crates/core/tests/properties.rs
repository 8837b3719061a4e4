use addlab_core::arith::{doubling, energy2, energy4, is_direct_sum, iterated_sumset, rep_function, sumset};
use addlab_core::check::all_pass;
use addlab_core::oracle::{energy2_oracle, energy4_oracle};
use addlab_core::partition::{estar_exact, estar_heuristic, et_exact, pair_ratio};
use addlab_core::procedures::{ruzsa_cover, schoen_cover, translate_saturate};
use addlab_core::regularity::{decompose, verify_decomposition, RegularityParams};
use addlab_core::{ExactRatio, GroupSet, GroupSpec, Sign};
use proptest::prelude::*;

fn int_set(max_len: usize) -> impl Strategy<Value = GroupSet> {
    prop::collection::btree_set(0i64..2 * max_len as i64 + 4, 1..=max_len).prop_map(GroupSet::integers)
}

fn f5_set(max_len: usize) -> impl Strategy<Value = GroupSet> {
    prop::collection::btree_set((0i64..5, 0i64..5), 1..=max_len).prop_map(|s| {
        GroupSet::from_rows(GroupSpec::prime_field(5, 2).unwrap(), s.into_iter().map(|(x, y)| [x, y])).unwrap()
    })
}

fn any_set(max_len: usize) -> impl Strategy<Value = GroupSet> {
    prop_oneof![int_set(max_len), f5_set(max_len)]
}

/// Two sets in the same group.
fn set_pair(max_len: usize) -> impl Strategy<Value = (GroupSet, GroupSet)> {
    prop_oneof![(int_set(max_len), int_set(max_len)), (f5_set(max_len), f5_set(max_len))]
}

fn set_quad(max_len: usize) -> impl Strategy<Value = [GroupSet; 4]> {
    prop_oneof![
        (int_set(max_len), int_set(max_len), int_set(max_len), int_set(max_len)).prop_map(|(a, b, c, d)| [a, b, c, d]),
        (f5_set(max_len), f5_set(max_len), f5_set(max_len), f5_set(max_len)).prop_map(|(a, b, c, d)| [a, b, c, d]),
    ]
}

fn r(n: i64, d: i64) -> ExactRatio {
    ExactRatio::new(n, d).unwrap()
}

proptest! {
    #[test]
    fn energies_match_oracles(q in set_quad(10)) {
        let [a, b, c, d] = &q;
        prop_assert_eq!(energy2(a, b).unwrap(), energy2_oracle(a, b).unwrap());
        prop_assert_eq!(energy4(a, b, c, d).unwrap(), energy4_oracle(a, b, c, d).unwrap());
    }

    #[test]
    fn energy_symmetries(q in set_quad(10)) {
        let [a, b, c, d] = &q;
        prop_assert_eq!(energy2(a, b).unwrap(), energy2(b, a).unwrap());
        prop_assert_eq!(energy4(a, b, c, d).unwrap(), energy4(c, d, a, b).unwrap());
    }

    #[test]
    fn cauchy_schwarz_both_signs((a, b) in set_pair(10)) {
        let e = energy2(&a, &b).unwrap();
        let bound = (a.len() * a.len() * b.len() * b.len()) as u128;
        for sign in [Sign::Plus, Sign::Minus] {
            prop_assert!(e * sumset(&a, &b, sign).unwrap().len() as u128 >= bound);
        }
    }

    #[test]
    fn plunnecke_ruzsa(a in any_set(8)) {
        let aa = sumset(&a, &a, Sign::Plus).unwrap().len() as u128;
        for (n, m) in [(1usize, 1usize), (2, 1), (2, 2)] {
            let lhs = iterated_sumset(&a, n, m).unwrap().len() as u128 * (a.len() as u128).pow((n + m - 1) as u32);
            prop_assert!(lhs <= aa.pow((n + m) as u32));
        }
    }

    #[test]
    fn direct_sum_iff_unique_representations((a, b) in set_pair(8)) {
        let unique = rep_function(&a, &b, Sign::Plus).unwrap().iter().all(|(_, c)| c == 1);
        prop_assert_eq!(is_direct_sum(&a, &b).unwrap(), unique);
    }

    #[test]
    fn group_law((a, b) in set_pair(3), c in 0usize..3) {
        let spec = a.spec();
        let (x, y) = (&a.elements()[0], &b.elements()[0]);
        let z = &b.elements()[c % b.len()];
        let xy = spec.combine(x, y, Sign::Plus).unwrap();
        prop_assert_eq!(&xy, &spec.combine(y, x, Sign::Plus).unwrap());
        let left = spec.combine(&xy, z, Sign::Plus).unwrap();
        let right = spec.combine(x, &spec.combine(y, z, Sign::Plus).unwrap(), Sign::Plus).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(spec.combine(&xy, y, Sign::Minus).unwrap(), x.clone());
    }

    #[test]
    fn make_set_is_idempotent(a in any_set(10)) {
        let again = GroupSet::new(a.spec(), a.iter().rev().cloned().chain(a.iter().cloned())).unwrap();
        prop_assert_eq!(again, a);
    }

    #[test]
    fn partition_chain(a in any_set(8).prop_filter("two elements", |a| a.len() >= 2)) {
        let estar = estar_exact(&a, 22).unwrap().value;
        let e2 = et_exact(&a, &r(2, 1), 12).unwrap().value;
        let e4 = et_exact(&a, &r(4, 1), 12).unwrap().value;
        let d = doubling(&a).unwrap();
        prop_assert!(estar <= e2 && e2 <= e4 && e4 <= d);
        prop_assert!(estar <= r(a.len() as i64, 4));
    }

    #[test]
    fn estar_witness_respects_size_bound(a in any_set(10).prop_filter("two elements", |a| a.len() >= 2)) {
        let rep = estar_exact(&a, 22).unwrap();
        let w = rep.witness;
        prop_assert!(w.x.is_disjoint(&w.y));
        prop_assert_eq!(w.x.union(&w.y), a.clone());
        prop_assert_eq!(&w.ratio, &pair_ratio(w.x.len(), w.y.len(), a.len(), energy2(&w.x, &w.y).unwrap()));
        prop_assert!(w.ratio <= r((w.x.len() * w.y.len()) as i64, a.len() as i64));
    }

    #[test]
    fn estar_is_translation_and_negation_invariant(a in any_set(9).prop_filter("two elements", |a| a.len() >= 2), shift in any_set(1)) {
        let v = estar_exact(&a, 22).unwrap().value;
        if shift.spec() == a.spec() {
            let moved = a.translate(&shift.elements()[0], Sign::Plus).unwrap();
            prop_assert_eq!(&estar_exact(&moved, 22).unwrap().value, &v);
        }
        prop_assert_eq!(estar_exact(&a.negate(), 22).unwrap().value, v);
    }

    #[test]
    fn heuristic_is_a_lower_bound(a in any_set(10).prop_filter("two elements", |a| a.len() >= 2), seed in any::<u64>()) {
        let h = estar_heuristic(&a, 4, seed).unwrap();
        prop_assert!(h.value <= estar_exact(&a, 22).unwrap().value);
        prop_assert_eq!(h, estar_heuristic(&a, 4, seed).unwrap());
    }

    #[test]
    fn schoen_bounds_hold((a, b) in set_pair(12)) {
        let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let res = schoen_cover(&a, &b).unwrap();
        prop_assert!(all_pass(&res.certify(&a, &b).unwrap()));
        prop_assert_eq!(res, schoen_cover(&a, &b).unwrap());
    }

    #[test]
    fn ruzsa_cover_certificates((a, sub) in set_pair(10)) {
        let a = a.union(&sub);
        let res = ruzsa_cover(&a, &sub).unwrap();
        prop_assert!(all_pass(&res.certify(&a, &sub).unwrap()));
    }

    #[test]
    fn saturation_certificates((a, sub) in set_pair(10), t in 1i64..6, td in 1i64..3) {
        let a = a.union(&sub);
        let t = r(t.max(td), td);
        let res = translate_saturate(&a, &sub, &t).unwrap();
        prop_assert!(all_pass(&res.certify(&a, &sub, &t).unwrap()));
    }

    #[test]
    fn decomposition_certificates(a in any_set(12).prop_filter("two elements", |a| a.len() >= 2)) {
        let params = RegularityParams::new(r(1, 4), r(1, 4)).unwrap();
        let res = decompose(&a, &params).unwrap();
        prop_assert!(all_pass(&res.certificates));
        let report = verify_decomposition(&res, &a, &params).unwrap();
        prop_assert!(report.passed());
        prop_assert_eq!(res, decompose(&a, &params).unwrap());
    }
}

#[test]
fn arithmetic_progression_doubling() {
    for n in 1..=8i64 {
        assert_eq!(doubling(&GroupSet::integers(0..n)).unwrap(), r(2 * n - 1, n));
    }
}
