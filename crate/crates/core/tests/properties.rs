use ifslab::attractor::natural_measure_stats;
use ifslab::geometry::{classify, prec, precsim, verify_lemma2, verify_lemma4, OrderRelation};
use ifslab::pressure::{partition_sum, solve_level_dimension};
use ifslab::separation::{ef_product, residue_check};
use ifslab::words::{build_subsystem, cylinder, map_of_word, SubsystemSpec};
use ifslab::{make_family, Interval, Rational, Word};
use proptest::prelude::*;

fn param() -> impl Strategy<Value = Rational> {
    (1i64..400, 1i64..40).prop_map(|(p, q)| Rational::new(p, q))
}

fn word(alphabet: u8, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=alphabet, 0..=max_len).prop_map(Word::new)
}

fn interval() -> impl Strategy<Value = Interval> {
    (-50i64..50, 0i64..50, 1i64..20).prop_map(|(a, len, q)| {
        Interval::new(Rational::new(a, q), Rational::new(a + len, q)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_matches_word_concatenation(t in param(), u in word(3, 5), w in word(3, 5), j in 0u32..=16) {
        let x = Rational::new(2 * j as i64, 48) * &t;
        let fu = map_of_word(&u, &t).unwrap();
        let fw = map_of_word(&w, &t).unwrap();
        let fuw = map_of_word(&u.concat(&w), &t).unwrap();
        prop_assert_eq!(fu.eval(&fw.eval(&x).unwrap()).unwrap(), fuw.eval(&x).unwrap());
    }

    #[test]
    fn cylinders_nest(t in param(), u in word(3, 5), s in 1u8..=3) {
        let parent = cylinder(&u, &t).unwrap();
        let child = cylinder(&u.push(s), &t).unwrap();
        prop_assert!(parent.contains_interval(&child));
        prop_assert!(child.length() < parent.length());
    }

    #[test]
    fn classification_is_a_trichotomy(x in interval(), y in interval()) {
        let rel = classify(&x, &y);
        prop_assert_eq!(classify(&x, &y), rel);
        if prec(&x, &y) {
            prop_assert!(precsim(&x, &y));
            prop_assert_eq!(rel, OrderRelation::Prec);
        }
        prop_assert_eq!(rel == OrderRelation::Overlap || (rel == OrderRelation::Precsim && x.intersects(&y)),
            x.intersects(&y));
    }

    #[test]
    fn lemma2_holds_for_any_parameter(t in param(), k in 1usize..=4) {
        prop_assert!(verify_lemma2(k, &t).unwrap().verdict);
    }

    #[test]
    fn lemma4_holds_below_three(p in 1i64..300, k in 1usize..=3) {
        let t = Rational::new(p, 100);
        prop_assert!(verify_lemma4(k, &t).unwrap().verdict);
    }

    #[test]
    fn ef_residues_for_any_words(x in "[EF]{0,24}", y in "[EF]{0,24}") {
        let c = residue_check(&x, &y).unwrap();
        prop_assert!(c.ok());
        let m = ef_product(&x).unwrap();
        prop_assert!(m.b.is_zero() && m.d == 1 && m.c.is_integer());
    }

    #[test]
    fn subsystem_cylinders_sit_inside_family_cylinders(t in param(), n in 1usize..=3, u in word(3, 3)) {
        for spec in [SubsystemSpec::full(t.clone(), n), SubsystemSpec::tilde(t.clone(), n)] {
            let sub = build_subsystem(&spec).unwrap();
            // the subsystem cylinder of a word over its own maps is the family
            // cylinder of the concatenated base words
            let idx: Vec<usize> = u.indices().filter(|&i| i < sub.words.len()).collect();
            let base = idx.iter().fold(Word::empty(), |acc, &i| acc.concat(&sub.words[i]));
            let own = Word::new(idx.iter().map(|&i| (i + 1) as u8).collect());
            let c_sub = ifslab::words::cylinder_in(&own, &sub.ifs).unwrap();
            prop_assert_eq!(&c_sub, &cylinder(&base, &t).unwrap());
            if let Some(&first) = idx.first() {
                prop_assert!(cylinder(&sub.words[first], &t).unwrap().contains_interval(&c_sub));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn partition_sum_decreases_in_s(t in param(), n in 1usize..=4, s in 0.0f64..1.5) {
        let ifs = make_family(&t).unwrap();
        prop_assert!(partition_sum(&ifs, n, s + 0.01).unwrap() < partition_sum(&ifs, n, s).unwrap());
    }

    #[test]
    fn level_dimensions_decrease_along_doubling(t in param()) {
        let ifs = make_family(&t).unwrap();
        let d: Vec<f64> = [1, 2, 4].iter().map(|&n| solve_level_dimension(&ifs, n, 1e-12).unwrap().d_n).collect();
        prop_assert!(d[0] + 1e-12 >= d[1] && d[1] + 1e-12 >= d[2], "{:?}", d);
    }

    #[test]
    fn measure_weights_are_normalized(t in param(), n in 1usize..=5, s in 0.05f64..=1.0) {
        let (est, words) = natural_measure_stats(&t, n, s).unwrap();
        prop_assert!((est.weight_total - 1.0).abs() < 1e-12);
        prop_assert!(est.min_weight > 0.0);
        prop_assert_eq!(words.len(), 1 << n);
    }
}
