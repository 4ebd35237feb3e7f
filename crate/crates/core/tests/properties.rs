//! Property tests for invariants that hold for every input.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rufmine::evolution::{concatenate, weight_to_word, word_to_weight, WEIGHT_STEP};
use rufmine::extract::{compute_thresholds, extract_rules, ExtractionConfig};
use rufmine::fuzzy::{class_membership, init_encoding, pi_membership, ClassStatistics, FuzzyGenerators, PiParams};
use rufmine::literal::Literal;
use rufmine::metrics::{accuracy, behrens_fisher, kappa, ConfusionMatrix};
use rufmine::network::{encode_rules, EncodeOptions, ModularNetwork, ModuleTag, NodeId};
use rufmine::rough::{
    cnf_to_dnf, dependency_rules, discernibility_matrix, AttrSet, Conjunct, DependencyRule, DependencyRuleSet,
    DnfFormula, RuleOptions,
};
use rufmine::Error;
use rufmine::table::{complete_table, split, CompletionPolicy, DecisionTable, InformationSystem};

fn table_strategy(attrs: usize, classes: usize) -> impl Strategy<Value = DecisionTable> {
    (classes..40).prop_flat_map(move |n| {
        (
            prop::collection::vec(prop::collection::vec(-5.0f64..5.0, attrs), n),
            prop::collection::vec(1..=classes, n),
        )
            .prop_map(move |(rows, mut labels)| {
                for (k, l) in labels.iter_mut().take(classes).enumerate() {
                    *l = k + 1;
                }
                let names = (0..attrs).map(|a| format!("a{a}")).collect();
                DecisionTable::from_rows(names, rows, labels).unwrap()
            })
    })
}

fn rule_set_strategy(features: usize, classes: usize) -> impl Strategy<Value = DependencyRuleSet> {
    let literal = (0..3 * features, prop::bool::weighted(0.25))
        .prop_map(|(a, neg)| if neg { Literal::neg(a) } else { Literal::pos(a) });
    let conjunct = prop::collection::vec(literal, 1..=3).prop_map(Conjunct::new);
    let formula = prop::collection::vec(conjunct, 1..=3);
    prop::collection::vec(formula, classes).prop_filter_map("contradictory conjuncts", |per_class| {
        let rules: Vec<DependencyRule> = per_class
            .into_iter()
            .enumerate()
            .map(|(k, cs)| {
                let cs: Vec<Conjunct> = cs.into_iter().filter(|c| !c.is_contradictory()).collect();
                (!cs.is_empty()).then(|| DependencyRule {
                    class: k + 1,
                    formula: DnfFormula::new(cs),
                    df: 1.0,
                })
            })
            .collect::<Option<_>>()?;
        Some(DependencyRuleSet::from_rules(rules))
    })
}

fn encoded(rules: &DependencyRuleSet, features: usize, classes: usize) -> ModularNetwork {
    let subs = encode_rules(rules, features, EncodeOptions::default()).unwrap();
    concatenate(&subs, classes, 0.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap().network
}

fn shuffled(net: &ModularNetwork, seed: u64) -> ModularNetwork {
    let mut links = net.links().to_vec();
    links.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ModularNetwork::new(
        net.layers().to_vec(),
        links,
        net.biases().to_vec(),
        net.owners().to_vec(),
        net.output_classes().to_vec(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pi_is_bounded_and_falls_with_distance(c in -10.0f64..10.0, r in 0.01f64..10.0, d1 in 0.0f64..20.0, d2 in 0.0f64..20.0, left in any::<bool>()) {
        let p = PiParams::new(c, r).unwrap();
        let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let s = if left { -1.0 } else { 1.0 };
        let a = pi_membership(c + s * near, p);
        let b = pi_membership(c + s * far, p);
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn fuzzified_patterns_have_three_terms_per_feature(t in table_strategy(3, 2), x in prop::collection::vec(-8.0f64..8.0, 3)) {
        let enc = init_encoding(&t).unwrap();
        let y = enc.fuzzify(&x).unwrap();
        prop_assert_eq!(y.len(), 9);
        prop_assert!(y.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(init_encoding(&t).unwrap(), enc);
    }

    #[test]
    fn class_membership_falls_as_distance_grows(t in table_strategy(2, 2), x in prop::collection::vec(-8.0f64..8.0, 2), step in 0.1f64..5.0) {
        let stats = ClassStatistics::from_table(&t, 2).unwrap();
        let gens = FuzzyGenerators::initial(&t, &stats);
        let mean = &stats.means[0];
        // Move the pattern further from the class-1 mean along the same ray.
        let away: Vec<f64> = x.iter().zip(mean).map(|(v, m)| v + step * (v - m)).collect();
        prop_assume!(x.iter().zip(mean).any(|(v, m)| (v - m).abs() > 1e-3));
        let near = class_membership(&x, &stats, gens).unwrap()[0];
        let far = class_membership(&away, &stats, gens).unwrap()[0];
        prop_assert!(far < near);
    }

    #[test]
    fn split_is_a_seeded_partition(t in table_strategy(2, 3), fraction in 0.1f64..0.9, seed in any::<u64>()) {
        let s = match split(&t, fraction, seed) {
            Ok(s) => s,
            Err(Error::Stratification { available, wanted, .. }) => {
                prop_assert!(available < 2 || wanted == 0);
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let mut all: Vec<usize> = s.train_indices.iter().chain(&s.test_indices).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..t.object_count()).collect::<Vec<_>>());
        prop_assert_eq!(s.train.object_count() + s.test.object_count(), t.object_count());
        prop_assert_eq!(split(&t, fraction, seed).unwrap().train_indices, s.train_indices);
    }

    #[test]
    fn completion_leaves_no_missing_cells(rows in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.8, -3.0f64..3.0), 3), 2..20), mean in any::<bool>()) {
        let n = rows.len();
        let system = InformationSystem::new(vec!["a".into(), "b".into(), "c".into()], rows).unwrap();
        let t = DecisionTable::new(system, (0..n).map(|i| i % 2 + 1).collect()).unwrap();
        let policy = if mean { CompletionPolicy::Mean } else { CompletionPolicy::Drop };
        if let Ok(done) = complete_table(&t, policy) {
            prop_assert!(!done.system().has_missing());
        }
    }

    #[test]
    fn discernibility_matrix_is_symmetric(t in table_strategy(3, 3)) {
        let m = discernibility_matrix(&t).unwrap();
        for i in 0..m.size() {
            prop_assert!(m.get(i, i).is_empty());
            for j in 0..m.size() {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn dnf_conversion_is_absorbed(clauses in prop::collection::vec(prop::collection::vec(0usize..8, 1..4), 1..6)) {
        let cnf: Vec<AttrSet> = clauses.iter().map(|c| AttrSet::from_iter(c.iter().copied())).collect();
        let terms = cnf_to_dnf(&cnf, None).terms;
        for (i, a) in terms.iter().enumerate() {
            prop_assert!(cnf.iter().all(|c| c.intersects(*a)));
            for (j, b) in terms.iter().enumerate() {
                prop_assert!(i == j || !a.is_subset_of(*b));
            }
        }
    }

    #[test]
    fn dependency_factors_are_fractions(t in table_strategy(2, 2)) {
        let enc = init_encoding(&t).unwrap();
        let rows = enc.fuzzify_all(&t.dense_rows()).unwrap();
        let per_class: Vec<Vec<Vec<f64>>> = (1..=2)
            .map(|k| rows.iter().zip(t.decisions()).filter(|(_, &d)| d == k).map(|(r, _)| r.clone()).collect())
            .collect();
        let set = dependency_rules(&per_class, &RuleOptions::default()).unwrap();
        for r in &set.rules {
            prop_assert!((0.0..=1.0).contains(&r.df));
        }
    }

    #[test]
    fn encoding_is_intra_with_one_hidden_node_per_conjunct(rules in rule_set_strategy(2, 3)) {
        for (sub, rule) in encode_rules(&rules, 2, EncodeOptions::default()).unwrap().iter().zip(&rules.rules) {
            prop_assert!(sub.links().iter().all(|l| matches!(l.tag, ModuleTag::Intra(_))));
            prop_assert_eq!(sub.layers()[1], rule.formula.conjuncts().len());
        }
    }

    #[test]
    fn forward_pass_ignores_link_order(rules in rule_set_strategy(2, 2), x in prop::collection::vec(0.0f64..1.0, 6), seed in any::<u64>()) {
        let net = encoded(&rules, 2, 2);
        prop_assert_eq!(net.forward(&x).unwrap(), shuffled(&net, seed).forward(&x).unwrap());
    }

    #[test]
    fn absent_links_and_zero_biases_give_one_half(rules in rule_set_strategy(2, 2), x in prop::collection::vec(0.0f64..1.0, 6)) {
        let mut net = encoded(&rules, 2, 2);
        for l in net.links_mut() {
            l.present = false;
        }
        for h in 1..net.layers().len() {
            for j in 0..net.layers()[h] {
                net.set_bias(NodeId(h, j), 0.0);
            }
        }
        let out = net.forward(&x).unwrap();
        prop_assert!(out.activations.iter().all(|&y| y == 0.5));
    }

    #[test]
    fn weight_words_round_trip(w in -128.0f64..=128.0) {
        prop_assert!((word_to_weight(weight_to_word(w)) - w).abs() <= WEIGHT_STEP / 2.0 + 1e-12);
    }

    #[test]
    fn extraction_is_bounded_and_order_free(rules in rule_set_strategy(2, 3), seed in any::<u64>(), max_rules in 1usize..8) {
        let net = encoded(&rules, 2, 3);
        let cfg = ExtractionConfig { max_rules, ..ExtractionConfig::default() };
        let base = extract_rules(&net, &compute_thresholds(&net).unwrap(), &cfg).unwrap();
        prop_assert!(base.rules.len() <= max_rules);
        prop_assert!(base.rules.iter().all(|r| r.cf <= 1.0 && !r.antecedent.is_empty()));
        let other = shuffled(&net, seed);
        let again = extract_rules(&other, &compute_thresholds(&other).unwrap(), &cfg).unwrap();
        prop_assert_eq!(again.to_text(), base.to_text());
    }

    #[test]
    fn agreement_scores_stay_in_range(counts in prop::collection::vec(prop::collection::vec(0u64..30, 3), 3)) {
        let m = ConfusionMatrix::from_counts(counts).unwrap();
        let acc = accuracy(&m);
        prop_assert!(acc.overall.iter().chain(acc.per_class.iter().flatten()).all(|p| (0.0..=100.0).contains(p)));
        let k = kappa(&m);
        prop_assert!(k.overall.iter().chain(k.per_class.iter().flatten()).all(|&v| v <= 1.0 + 1e-12));
    }

    #[test]
    fn behrens_fisher_is_antisymmetric(m1 in -50.0f64..50.0, m2 in -50.0f64..50.0, s1 in 0.1f64..10.0, s2 in 0.1f64..10.0, n1 in 2usize..50, n2 in 2usize..50) {
        let a = behrens_fisher(m1, s1, n1, m2, s2, n2).unwrap();
        let b = behrens_fisher(m2, s2, n2, m1, s1, n1).unwrap();
        prop_assert!((a + b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
