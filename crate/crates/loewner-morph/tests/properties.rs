//! Property-based checks across the supremum back-ends and the colour chain.

mod common;

use loewner_morph::colour::{clamp_to_bicone, rgb_to_sym2, sym2_to_rgb, BiconePoint, RgbColour};
use loewner_morph::suprema::{
    les_approx, les_exact, les_inf, trace_sup, verify_upper_bound,
};
use loewner_morph::Sym2;
use proptest::prelude::*;

fn arb_sym2() -> impl Strategy<Value = Sym2> {
    (-1.0f64..=1.0, -1.0f64..=1.0, -1.0f64..=1.0).prop_map(|(a, b, c)| Sym2::new(a, b, c))
}

fn arb_multiset(max_len: usize) -> impl Strategy<Value = Vec<Sym2>> {
    prop::collection::vec(arb_sym2(), 1..=max_len)
}

proptest! {
    #[test]
    fn les_is_an_upper_bound(xs in arb_multiset(12)) {
        let s = les_exact(&xs).unwrap();
        prop_assert!(verify_upper_bound(s, &xs, 1e-10));
    }

    #[test]
    fn trace_is_an_upper_bound(xs in arb_multiset(12)) {
        let s = trace_sup(&xs).unwrap();
        prop_assert!(verify_upper_bound(s, &xs, 1e-9));
    }

    #[test]
    fn trace_never_exceeds_sum_trace_bound(xs in arb_multiset(8)) {
        // The elementwise-max diagonal plus total spread is a crude upper
        // bound construction; the minimal-trace supremum must not beat the
        // data from below nor blow past every item by more than the spread.
        let s = trace_sup(&xs).unwrap();
        let min_tr = xs.iter().map(Sym2::trace).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.trace() >= min_tr - 1e-9);
    }

    #[test]
    fn les_transitivity_under_splits(xs in arb_multiset(10), split in 0usize..10) {
        let k = split.min(xs.len() - 1).max(1).min(xs.len());
        let (a, b) = xs.split_at(k.min(xs.len()));
        if a.is_empty() || b.is_empty() {
            return Ok(());
        }
        let whole = les_exact(&xs).unwrap();
        let nested = les_exact(&[les_exact(a).unwrap(), les_exact(b).unwrap()]).unwrap();
        prop_assert!(whole.max_entry_distance(&nested) < 1e-12);
    }

    #[test]
    fn les_duality(xs in arb_multiset(10)) {
        let neg: Vec<Sym2> = xs.iter().map(|x| -*x).collect();
        let inf = les_inf(&xs).unwrap();
        let sup = les_exact(&neg).unwrap();
        prop_assert!(inf.max_entry_distance(&(-sup)) == 0.0);
    }

    #[test]
    fn les_dominates_every_translation(xs in arb_multiset(8), t in -1.0f64..=1.0) {
        // Adding t*I to every item shifts the supremum by exactly t*I.
        let shifted: Vec<Sym2> = xs.iter().map(|x| *x + Sym2::scaled_identity(t)).collect();
        let a = les_exact(&shifted).unwrap();
        let b = les_exact(&xs).unwrap() + Sym2::scaled_identity(t);
        prop_assert!(a.max_entry_distance(&b) < 1e-12);
    }

    #[test]
    fn approx_error_is_bounded_by_log_n_over_m(xs in arb_multiset(8)) {
        // (1/m) log sum exp is sandwiched between the max and max + log(2n)/m.
        let m = 200.0;
        let exact = les_exact(&xs).unwrap();
        let approx = les_approx(&xs, m).unwrap();
        let slack = (2.0 * xs.len() as f64).ln() / m + 1e-9;
        prop_assert!(verify_upper_bound(approx, &xs, 1e-9));
        prop_assert!(approx.eigenvalues().0 >= exact.eigenvalues().0 - 1e-9);
        prop_assert!(approx.eigenvalues().0 <= exact.eigenvalues().0 + slack);
    }

    #[test]
    fn byte_roundtrip_is_identity(r in 0u8.., g in 0u8.., b in 0u8..) {
        let c = RgbColour::from_bytes(r, g, b);
        let back = sym2_to_rgb(rgb_to_sym2(c)).to_bytes();
        prop_assert_eq!(back, (r, g, b));
    }

    #[test]
    fn clamp_is_idempotent_and_in_gamut(x in -2.0f64..=2.0, y in -2.0f64..=2.0, z in -2.0f64..=2.0) {
        let p = clamp_to_bicone(BiconePoint::new(x, y, z));
        prop_assert!(p.is_in_gamut(1e-9));
        let q = clamp_to_bicone(p);
        prop_assert!((p.x - q.x).abs() < 1e-12);
        prop_assert!((p.y - q.y).abs() < 1e-12);
        prop_assert!((p.z - q.z).abs() < 1e-12);
    }

    #[test]
    fn suprema_agree_on_singletons(x in arb_sym2()) {
        let xs = [x];
        prop_assert!(les_exact(&xs).unwrap().max_entry_distance(&x) < 1e-12);
        prop_assert!(trace_sup(&xs).unwrap().max_entry_distance(&x) < 1e-9);
        prop_assert!(les_approx(&xs, 1e3).unwrap().max_entry_distance(&x) < 1e-2);
    }

    #[test]
    fn trace_sup_trace_never_above_les_trace_plus_tol(xs in arb_multiset(8)) {
        // The trace supremum minimises trace among upper bounds, so it can
        // never have strictly larger trace than the LES result.
        let t = trace_sup(&xs).unwrap().trace();
        let l = les_exact(&xs).unwrap().trace();
        prop_assert!(t <= l + 1e-9);
    }
}

#[test]
fn nondegenerate_generator_respects_its_own_margins() {
    let mut rng = common::rng(42);
    for _ in 0..50 {
        let xs = common::nondegenerate_multiset(&mut rng, 8);
        assert!(common::eigen_structure_nondegenerate(&xs, 0.1, 0.1));
    }
}
