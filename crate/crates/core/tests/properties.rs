use std::collections::BTreeSet;

use proptest::prelude::*;

use reclab::families::{
    contract, default_schedule, density_report, dilate, ip_generate, syndetic_certificate, IndexWindow,
};
use reclab::operators::{apply_n, parse_operator, StateVector};
use reclab::scalar::{rat, Scalar};
use reclab::verify::{kronecker_window, labels_agree};
use reclab::RecurrenceLabel;

fn window(h: u64) -> impl Strategy<Value = IndexWindow> {
    prop::collection::btree_set(0..=h, 1..200).prop_map(move |s| IndexWindow::from_iter_clipped(s, h))
}

fn rational() -> impl Strategy<Value = Scalar> {
    (-1000i64..=1000, 1i64..=500).prop_map(|(n, d)| Scalar::real(rat(n, d)))
}

fn gaussian() -> impl Strategy<Value = Scalar> {
    (-200i64..=200, 1i64..=60, -200i64..=200, 1i64..=60)
        .prop_map(|(a, b, c, d)| Scalar::gaussian(rat(a, b), rat(c, d)))
}

fn label() -> impl Strategy<Value = RecurrenceLabel> {
    prop_oneof![
        Just(RecurrenceLabel::None),
        Just(RecurrenceLabel::Recurrent),
        Just(RecurrenceLabel::ReiterativelyRecurrent),
        Just(RecurrenceLabel::UpperFrequentlyRecurrent),
        Just(RecurrenceLabel::FrequentlyRecurrent),
        Just(RecurrenceLabel::UniformlyRecurrent),
        Just(RecurrenceLabel::IpStarCertified),
        (1u64..64).prop_map(RecurrenceLabel::Periodic),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_estimates_are_ordered(a in window(2000), burn in 0u64..1000) {
        let r = density_report(&a, burn, &default_schedule(2000)).unwrap();
        prop_assert!(r.lower_est <= r.upper_est);
        prop_assert!(r.upper_est <= r.banach_upper_est);
        prop_assert!((0.0..=1.0).contains(&r.banach_upper_est));
    }

    #[test]
    fn bounded_gaps_force_window_density(k in 1u64..40, r in 0u64..40, extra in prop::collection::vec(0u64..=3000, 0..50)) {
        let h = 3000;
        let a = IndexWindow::residue(k, r % k, h).union(&IndexWindow::from_iter_clipped(extra.into_iter().collect::<BTreeSet<_>>(), h));
        let schedule = default_schedule(h);
        let l = *schedule.iter().max().unwrap();
        let rep = density_report(&a, 0, &schedule).unwrap();
        if let Some(g) = rep.max_gap {
            // any window of L + 1 consecutive integers holds at least ⌊(L+1)/g⌋ elements
            prop_assert!(rep.banach_window_est + 1e-12 >= ((l + 1) / g) as f64 / (l + 1) as f64);
        }
    }

    #[test]
    fn syndetic_certificate_is_monotone(a in window(1000), extra in prop::collection::btree_set(0u64..=1000, 0..100)) {
        let b = a.union(&IndexWindow::from_iter_clipped(extra, 1000));
        if let Ok(ca) = syndetic_certificate(&a) {
            let cb = syndetic_certificate(&b);
            prop_assert!(cb.is_ok());
            prop_assert!(cb.unwrap().max_gap <= ca.max_gap);
        }
    }

    #[test]
    fn finite_sums_match_subset_enumeration(gens in prop::collection::btree_set(1u64..200, 1..7), depth in 1usize..7, h in 1u64..800) {
        let gens: Vec<u64> = gens.into_iter().collect();
        let got = ip_generate(&gens, depth, h).unwrap();
        let mut want = BTreeSet::new();
        for mask in 1u32..(1 << gens.len()) {
            if mask.count_ones() as usize <= depth {
                let s: u64 = (0..gens.len()).filter(|i| mask >> i & 1 == 1).map(|i| gens[i]).sum();
                if s <= h {
                    want.insert(s);
                }
            }
        }
        prop_assert_eq!(got.elements(), &want.into_iter().collect::<Vec<_>>()[..]);
    }

    #[test]
    fn contraction_undoes_dilation(a in window(500), p in 1u64..9) {
        let d = dilate(&a, p).unwrap();
        prop_assert_eq!(contract(&d, p).unwrap(), a);
    }

    #[test]
    fn window_text_round_trips(a in window(5000)) {
        prop_assert_eq!(IndexWindow::from_text(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn exact_field_laws(a in gaussian(), b in gaussian(), c in rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) * &b.recip().unwrap(), a);
        }
    }

    #[test]
    fn label_agreement_is_an_equivalence(a in label(), b in label(), c in label()) {
        prop_assert!(labels_agree(&a, &a));
        prop_assert_eq!(labels_agree(&a, &b), labels_agree(&b, &a));
        if labels_agree(&a, &b) && labels_agree(&b, &c) {
            prop_assert!(labels_agree(&a, &c));
        }
    }

    #[test]
    fn roots_of_unity_return_on_their_order(turns in prop::collection::vec((0i64..12, 1i64..12), 1..4)) {
        let lambdas: Vec<Scalar> = turns.iter().map(|&(a, d)| Scalar::turn(num_rational::Ratio::new(a, d))).collect();
        let order = turns.iter().fold(1i64, |acc, &(a, d)| num_integer::lcm(acc, d / num_integer::gcd(a, d)));
        prop_assert_eq!(kronecker_window(&lambdas, 1e-6, 2000), IndexWindow::residue(order as u64, 0, 2000));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn block_cycle_orbits_compose(coords in prop::collection::btree_map(1i64..300, (-20i64..=20, 1i64..=9), 1..8), a in 0u64..600, b in 0u64..600) {
        let op = parse_operator("blockcycle").unwrap();
        let x = StateVector::sparse(op.space(), coords.into_iter().map(|(k, (n, d))| (k, Scalar::real(rat(n, d))))).unwrap();
        let split = apply_n(&op, &apply_n(&op, &x, a).unwrap(), b).unwrap();
        prop_assert_eq!(apply_n(&op, &x, a + b).unwrap(), split);
    }

    #[test]
    fn block_cycle_periods_divide_the_block_length(k in 1u64..4096) {
        let op = parse_operator("blockcycle").unwrap();
        let x = StateVector::sparse(op.space(), [(k as i64, Scalar::one())]).unwrap();
        let period = 1u64 << (63 - k.leading_zeros());
        prop_assert_eq!(apply_n(&op, &x, period).unwrap(), x.clone());
        if period > 1 {
            prop_assert_ne!(apply_n(&op, &x, period / 2).unwrap(), x);
        }
    }
}
