mod common;

use common::*;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trumpkit::catalysis::{catalyst_from_copies, combine_catalysts, lift_catalyst, verify_catalyst};
use trumpkit::majorize::{majorizes, spectrum_majorizes, Verdict};
use trumpkit::mlocc::{
    classify_usefulness, copies_strictify_boundary, in_mk, mk_report, nonclosedness_witness,
    passes_endpoint_filter,
};
use trumpkit::renyi::{r_filter, renyi_entropy, Alpha, FilterStatus};
use trumpkit::{tensor_power_spectrum, ProbVec, Rational, Spectrum};

fn weights(n: usize, zeros: bool) -> impl Strategy<Value = Vec<u64>> {
    let lo = if zeros { 0u64 } else { 1 };
    prop::collection::vec(lo..=8, n).prop_filter("positive mass", |w| w.iter().any(|&v| v > 0))
}

fn pair(zeros: bool) -> impl Strategy<Value = (ProbVec, ProbVec)> {
    (1usize..=4).prop_flat_map(move |n| {
        (weights(n, zeros), weights(n, zeros)).prop_map(|(a, b)| (from_weights(&a), from_weights(&b)))
    })
}

fn as_brute(v: Verdict) -> Brute {
    match v {
        Verdict::StrictInterior => Brute::Strict,
        Verdict::Boundary => Brute::Boundary,
        Verdict::Fails => Brute::Fails,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_expands_to_brute_power((x, _) in pair(true), k in 1u32..=4) {
        let s = tensor_power_spectrum(&x, k).unwrap();
        prop_assert_eq!(s.expand().unwrap(), sorted_desc(brute_power(x.entries(), k)));
        prop_assert_eq!(s.total_count(), &BigUint::from(x.dim()).pow(k));
        prop_assert_eq!(s.total_mass(), q(1, 1));
    }

    #[test]
    fn direct_majorization_matches_brute((x, y) in pair(true)) {
        let r = majorizes(&x, &y).unwrap();
        let (verdict, eq) = brute_majorize(x.entries(), y.entries());
        prop_assert_eq!(as_brute(r.verdict), verdict);
        if verdict != Brute::Fails {
            let got: Vec<usize> = r.equality_indices.iter().map(|l| l.to_string().parse().unwrap()).collect();
            prop_assert_eq!(got, eq);
        }
    }

    #[test]
    fn spectrum_majorization_matches_brute((x, y) in pair(true), k in 1u32..=4) {
        let r = mk_report(&x, &y, k).unwrap();
        let (verdict, eq) = brute_majorize(&brute_power(x.entries(), k), &brute_power(y.entries(), k));
        prop_assert_eq!(as_brute(r.verdict), verdict);
        for l in &r.equality_indices {
            let l: usize = l.to_string().parse().unwrap();
            prop_assert!(eq.contains(&l));
        }
    }

    #[test]
    fn majorization_is_a_preorder((x, y) in pair(false), w in weights(4, false)) {
        prop_assert!(majorizes(&x, &x).unwrap().holds());
        let xy = majorizes(&x, &y).unwrap().holds();
        let yx = majorizes(&y, &x).unwrap().holds();
        if xy && yx {
            prop_assert_eq!(&x, &y);
        }
        let z = from_weights(&w[..x.dim()]);
        if xy && majorizes(&y, &z).unwrap().holds() {
            prop_assert!(majorizes(&x, &z).unwrap().holds());
        }
    }

    #[test]
    fn tensor_products_preserve_majorization((x, y) in pair(true), (xp, yp) in pair(true)) {
        if majorizes(&x, &y).unwrap().holds() && majorizes(&xp, &yp).unwrap().holds() {
            let lhs = Spectrum::from_probvec(&x).tensor(&Spectrum::from_probvec(&xp));
            let rhs = Spectrum::from_probvec(&y).tensor(&Spectrum::from_probvec(&yp));
            prop_assert!(spectrum_majorizes(&lhs, &rhs).unwrap().holds());
        }
    }

    #[test]
    fn multicopy_witness_yields_catalyst((x, y) in pair(true), k in 1u32..=3) {
        if in_mk(&x, &y, k).unwrap() {
            let cert = catalyst_from_copies(&x, &y, k).unwrap();
            prop_assert!(cert.verified);
            prop_assert!(cert.dim_bound_ok);
            prop_assert_eq!(cert.catalyst.dim(), k as usize * x.dim().pow(k - 1));
            prop_assert!(brute_catalyzes(&x, &y, cert.catalyst.entries()));
        } else {
            prop_assert!(catalyst_from_copies(&x, &y, k).is_err());
        }
    }

    #[test]
    fn uniform_catalysts_change_nothing((x, y) in pair(true), m in 1usize..=5) {
        let u = ProbVec::<Rational>::uniform(m).unwrap();
        prop_assert_eq!(
            verify_catalyst(&x, &y, &u).unwrap().holds(),
            majorizes(&x, &y).unwrap().holds()
        );
    }

    #[test]
    fn catalysts_lift_and_combine((x, y) in pair(false), c in weights(2, false), copies in 1u32..=3) {
        let c = from_weights(&c);
        if verify_catalyst(&x, &y, &c).unwrap().holds() {
            prop_assert!(lift_catalyst(&x, &y, &c, copies).unwrap().verified);
            prop_assert!(combine_catalysts(&x, &y, 1, &c).unwrap().verified);
        }
    }

    #[test]
    fn majorization_orders_renyi_entropies((x, y) in pair(true)) {
        if majorizes(&x, &y).unwrap().holds() {
            let v = r_filter(&x, &y, &Alpha::default_grid()).unwrap();
            prop_assert_eq!(v.status, FilterStatus::NoViolationFound);
        }
    }

    #[test]
    fn renyi_entropy_is_additive((x, _) in pair(true), c in weights(3, true)) {
        let c = from_weights(&c);
        let xc = x.tensor(&c);
        let mut orders = Alpha::default_grid();
        orders.extend([Alpha::PosInf, Alpha::NegInf, Alpha::Finite(1.0), Alpha::Finite(3.0)]);
        for a in orders {
            let lhs = renyi_entropy(&xc, a);
            let rhs = renyi_entropy(&x, a) + renyi_entropy(&c, a);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "alpha={} {} {}", a, lhs, rhs);
        }
    }

    #[test]
    fn endpoint_filter_decides_without_split(y in weights(4, true), x in weights(4, true)) {
        let (x, y) = (from_weights(&x), from_weights(&y));
        if !classify_usefulness(&y).useful && passes_endpoint_filter(&x, &y) {
            prop_assert!(majorizes(&x, &y).unwrap().holds());
        }
    }
}

#[test]
fn membership_implies_entropy_ordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut hits = 0;
    for _ in 0..300 {
        let n = 4;
        let x = random_vec(&mut rng, n, 9, false);
        let y = random_vec(&mut rng, n, 9, true);
        for k in 1..=3 {
            if in_mk(&x, &y, k).unwrap() {
                hits += 1;
                let v = r_filter(&x, &y, &Alpha::default_grid()).unwrap();
                assert_eq!(v.status, FilterStatus::NoViolationFound, "{x} {y} k={k}");
            }
        }
    }
    assert!(hits > 0);
}

#[test]
fn usefulness_witness_is_generalized_interior_boundary_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = 5;
        let y = random_vec(&mut rng, n, 9, true);
        let v = classify_usefulness(&y);
        let Some(w) = v.witness_x else { continue };
        let l = v.witness_l.unwrap();
        let r = majorizes(&w, &y).unwrap();
        assert_eq!(r.verdict, Verdict::Boundary);
        assert!(r.has_equality_at(l as u64));
        assert!(w.first() < y.first() && w.last() > y.last());
    }
}

#[test]
fn nonclosedness_witness_leaves_the_reachable_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    for _ in 0..100 {
        let y = random_vec(&mut rng, 4, 9, true);
        let Ok(w) = nonclosedness_witness(&y) else { continue };
        checked += 1;
        assert!(majorizes(&y, &w).unwrap().holds());
        assert!(!majorizes(&w, &y).unwrap().holds());
        for k in 1..=3 {
            assert!(!brute_in_mk(&w, &y, k));
        }
    }
    assert!(checked > 10);
}

/// Boundary point of S(y) with a single interior equality at `d` (1-based).
fn single_equality_point(y: &ProbVec, d: usize) -> ProbVec {
    let n = y.dim();
    let head = y.prefix_mass(d) / Rational::from(num_bigint::BigInt::from(d));
    let tail = (q(1, 1) - y.prefix_mass(d)) / Rational::from(num_bigint::BigInt::from(n - d));
    let half = q(1, 2);
    let entries = y
        .entries()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let avg = if i < d { &head } else { &tail };
            (v.clone() + avg) * &half
        })
        .collect();
    ProbVec::new(entries, false).unwrap()
}

#[test]
fn copy_condition_matches_interior_of_power_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = [0usize; 2];
    let mut tried = 0;
    while seen.iter().sum::<usize>() < 60 && tried < 10_000 {
        tried += 1;
        let n = rand::Rng::gen_range(&mut rng, 4..=5);
        let y = random_vec(&mut rng, n, 12, true);
        let d = rand::Rng::gen_range(&mut rng, 2..=n - 2);
        let e = y.entries();
        if !(e[0] > e[d - 1] && e[d] > e[n - 1]) {
            continue;
        }
        let x = single_equality_point(&y, d);
        let r = majorizes(&x, &y).unwrap();
        assert_eq!(r.equality_indices, vec![BigUint::from(d)]);
        let k = rand::Rng::gen_range(&mut rng, 1..=3);
        let predicted = copies_strictify_boundary(&y, d, k).unwrap();
        let (brute, _) = brute_majorize(&brute_power(x.entries(), k), &brute_power(y.entries(), k));
        assert_eq!(predicted, brute == Brute::Strict, "y={y} d={d} k={k}");
        assert_eq!(predicted, mk_report(&x, &y, k).unwrap().is_strict_interior());
        seen[predicted as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn robin_hood_transfers_produce_majorizing_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let x = random_vec(&mut rng, 4, 9, false);
        let y = robin_hood_reverse(&mut rng, &x, 3);
        assert!(brute_holds(x.entries(), y.entries()));
    }
}
