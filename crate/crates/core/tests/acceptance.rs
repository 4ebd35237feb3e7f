//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (`cargo test --test acceptance -- --nocapture --test-threads=1`).

mod common;

use std::time::Instant;

use common::{report, mean_sd};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rufmine::discretize::{candidate_cuts, rsbr_discretize};
use rufmine::evolution::{
    concatenate, evolve_modular, run_ga, weight_to_word, word_to_weight, EvolutionInput, FitnessData, GaConfig, Layout,
    Task, WEIGHT_STEP,
};
use rufmine::extract::{compute_thresholds, extract_rules, ExtractionConfig};
use rufmine::fuzzy::{pi_membership, FuzzyModel, PiParams};
use rufmine::literal::Literal;
use rufmine::metrics::{accuracy, behrens_fisher, confusion_index, fidelity, kappa, users_accuracy, ConfusionMatrix};
use rufmine::network::{loss_and_gradient, objective, encode_rules, EncodeOptions, ModularNetwork, NodeId};
use rufmine::pipeline::{run_pipeline, ModelKind, PipelineConfig};
use rufmine::rough::{cnf_to_dnf, reducts, AttrSet, Conjunct, DependencyRule, DependencyRuleSet, DnfFormula};
use rufmine::synth::make_synthetic;
use rufmine::table::DecisionTable;

fn random_table(rng: &mut ChaCha8Rng, max_objects: usize, attrs: usize, values: u32, classes: usize) -> DecisionTable {
    let n = rng.random_range(2..=max_objects);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..attrs).map(|_| f64::from(rng.random_range(0..values))).collect())
        .collect();
    // Every class appears at least once.
    let labels: Vec<usize> = (0..n).map(|i| if i < classes { i + 1 } else { rng.random_range(1..=classes) }).collect();
    let names = (0..attrs).map(|a| format!("a{a}")).collect();
    DecisionTable::from_rows(names, rows, labels).expect("valid random table")
}

#[test]
fn criterion_01_reducts_match_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut mismatches = 0;
    for _ in 0..200 {
        let attrs = rng.random_range(1..=4);
        let t = random_table(&mut rng, 8, attrs, 3, 2);
        let mut got = reducts(&t).unwrap();
        got.sort_by_key(|s| s.0);
        if got != common::brute_force_reducts(&t.dense_rows(), attrs) {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mismatches == 0 && secs < 10.0;
    report(1, pass, &format!("200 tables, {mismatches} mismatches, {secs:.2}s"));
    assert!(pass);
}

#[test]
fn criterion_02_rsbr_preserves_discernibility() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (mut lost, mut oversized, mut worst_ratio) = (0, 0, 0.0f64);
    for _ in 0..200 {
        let t = random_table(&mut rng, 12, 2, 6, 3);
        let candidates = candidate_cuts(&t);
        assert!(candidates.total() <= 10);
        let rows = t.dense_rows();
        let all = candidates.flat();
        let d = t.decisions();
        let pairs: Vec<(usize, usize)> = (0..rows.len())
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .filter(|&(i, j)| d[i] != d[j])
            .filter(|&(i, j)| all.iter().any(|&(a, c)| common::cut_separates(c, rows[i][a], rows[j][a])))
            .collect();
        let chosen = rsbr_discretize(&t, &candidates).unwrap().cuts.flat();
        let kept = pairs
            .iter()
            .all(|&(i, j)| chosen.iter().any(|&(a, c)| common::cut_separates(c, rows[i][a], rows[j][a])));
        lost += usize::from(!kept);
        let min = common::minimum_cut_count(&rows, &pairs, &all);
        if chosen.len() > 2 * min {
            oversized += 1;
        }
        if min > 0 {
            worst_ratio = worst_ratio.max(chosen.len() as f64 / min as f64);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = lost == 0 && oversized == 0 && secs < 10.0;
    report(
        2,
        pass,
        &format!("200 tables, {lost} lost discernibility, {oversized} over 2x minimum (worst {worst_ratio:.2}x), {secs:.2}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_cnf_to_dnf_truth_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut failures = 0;
    for _ in 0..100 {
        let vars = rng.random_range(1..=6);
        let budget = rng.random_range(1..=12);
        let mut clauses: Vec<Vec<usize>> = Vec::new();
        let mut used = 0;
        while used < budget {
            let len = rng.random_range(1..=3).min(budget - used);
            let mut c: Vec<usize> = (0..len).map(|_| rng.random_range(0..vars)).collect();
            c.sort_unstable();
            c.dedup();
            used += len;
            clauses.push(c);
        }
        let sets: Vec<AttrSet> = clauses.iter().map(|c| AttrSet::from_iter(c.iter().copied())).collect();
        let dnf = cnf_to_dnf(&sets, None).terms;
        for bits in 0..1u32 << vars {
            let x: Vec<bool> = (0..vars).map(|i| bits >> i & 1 == 1).collect();
            let d = dnf.iter().any(|t| t.iter().all(|a| x[a]));
            if d != common::cnf_holds(&clauses, &x) {
                failures += 1;
            }
        }
    }
    report(3, failures == 0, &format!("100 formulas, {failures} truth-table disagreements"));
    assert_eq!(failures, 0);
}

#[test]
fn criterion_04_pi_function_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    let mut ok = true;
    for _ in 0..1000 {
        let c = rng.random_range(-5.0..5.0);
        let r = rng.random_range(0.01..4.0);
        let p = PiParams::new(c, r).unwrap();
        for side in [-1.0, 1.0] {
            for knot in [r / 2.0, r] {
                // One-sided limits by linear extrapolation, so the slope
                // does not masquerade as a jump.
                let k = c + side * knot;
                let d = 1e-6 * r;
                let f = |x: f64| pi_membership(x, p);
                let left = 2.0 * f(k - d) - f(k - 2.0 * d);
                let right = 2.0 * f(k + d) - f(k + 2.0 * d);
                worst = worst.max((left - right).abs()).max((left - f(k)).abs());
            }
            // `c + r` is rounded, so the radius point is checked to 1e-9.
            ok &= pi_membership(c + side * r, p).abs() <= 1e-9;
            ok &= pi_membership(c + side * r * 1.5, p) == 0.0;
        }
        ok &= pi_membership(c, p) == 1.0;
    }
    let pass = ok && worst <= 1e-9;
    report(4, pass, &format!("1000 parameter draws, largest jump across a knot {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_05_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut net = ModularNetwork::dense(vec![9, 6, 6, 3], vec![1, 2, 3], || rng.random_range(-1.0..1.0)).unwrap();
    for (h, &size) in [0usize, 6, 6, 3].iter().enumerate().skip(1) {
        for j in 0..size {
            net.set_bias(NodeId(h, j), rng.random_range(-0.5..0.5));
        }
    }
    let xs: Vec<Vec<f64>> = (0..8).map(|_| (0..9).map(|_| rng.random()).collect()).collect();
    let ts: Vec<Vec<f64>> = (0..8).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
    let decay = 1e-3;
    let (_, g) = loss_and_gradient(&net, &xs, &ts, decay).unwrap();
    let eps = 1e-5;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-8);
    let mut worst = 0.0f64;
    for i in 0..net.links().len() {
        let (mut p, mut m) = (net.clone(), net.clone());
        p.links_mut()[i].w += eps;
        m.links_mut()[i].w -= eps;
        let fd = (objective(&p, &xs, &ts, decay).unwrap() - objective(&m, &xs, &ts, decay).unwrap()) / (2.0 * eps);
        worst = worst.max(rel(g.links[i], fd));
    }
    for h in 1..4 {
        for j in 0..net.layers()[h] {
            let node = NodeId(h, j);
            let (mut p, mut m) = (net.clone(), net.clone());
            p.set_bias(node, net.bias(node) + eps);
            m.set_bias(node, net.bias(node) - eps);
            let fd = (objective(&p, &xs, &ts, decay).unwrap() - objective(&m, &xs, &ts, decay).unwrap()) / (2.0 * eps);
            worst = worst.max(rel(g.biases[h][j], fd));
        }
    }
    report(5, worst < 1e-4, &format!("9-6-6-3 network, max relative error {worst:.2e}"));
    assert!(worst < 1e-4);
}

/// Random rule set over `features` features with at most `max_literals`
/// literals in total, one rule per class.
fn random_rules(rng: &mut ChaCha8Rng, features: usize, classes: usize, max_literals: usize) -> DependencyRuleSet {
    let attrs = 3 * features;
    loop {
        let mut rules = Vec::new();
        let mut total = 0;
        for class in 1..=classes {
            let conjuncts: Vec<Conjunct> = (0..rng.random_range(1..=3))
                .map(|_| {
                    let lits = (0..rng.random_range(1..=3))
                        .map(|_| {
                            let a = rng.random_range(0..attrs);
                            if rng.random_bool(0.25) {
                                Literal::neg(a)
                            } else {
                                Literal::pos(a)
                            }
                        })
                        .collect();
                    Conjunct::new(lits)
                })
                .filter(|c| !c.is_contradictory())
                .collect();
            if conjuncts.is_empty() {
                continue;
            }
            let formula = DnfFormula::new(conjuncts);
            total += formula.literal_count();
            rules.push(DependencyRule { class, formula, df: 1.0 });
        }
        if rules.len() == classes && total <= max_literals {
            return DependencyRuleSet::from_rules(rules);
        }
    }
}

fn encoded(rules: &DependencyRuleSet, features: usize, classes: usize, second: bool) -> ModularNetwork {
    let subs = encode_rules(rules, features, EncodeOptions { second_hidden_layer: second }).unwrap();
    concatenate(&subs, classes, 0.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap().network
}

#[test]
fn criterion_06_encoding_reproduces_truth_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut sets, mut errors) = (0, 0);
    for i in 0..300 {
        let features = rng.random_range(1..=3);
        let classes = rng.random_range(1..=3);
        let rules = random_rules(&mut rng, features, classes, 12);
        let net = encoded(&rules, features, classes, i % 2 == 1).compile();
        for x in common::crisp_inputs(3 * features) {
            let out = net.output(&x);
            let truth = common::planted_truth(&rules, classes, &x);
            errors += out.iter().zip(&truth).filter(|(y, t)| (**y > 0.5) != **t).count();
        }
        sets += 1;
    }
    report(6, errors == 0, &format!("{sets} rule sets (half with an OR layer), {errors} output errors"));
    assert_eq!(errors, 0);
}

fn small_problem(seed: u64) -> (DependencyRuleSet, FitnessData, FuzzyModel, Vec<f64>) {
    let cfg = PipelineConfig {
        classes: 3,
        train_fraction: 0.2,
        ..PipelineConfig::default()
    };
    let table = make_synthetic(30, 3, 2.0, seed).unwrap();
    let prep = rufmine::pipeline::prepare(&table, &cfg).unwrap();
    let k = rufmine::pipeline::knowledge_phase(&prep, &cfg).unwrap();
    let raw = prep.train.dense_rows();
    let feature_max = (0..3).map(|j| raw.iter().map(|r| r[j]).fold(f64::MIN, f64::max)).collect();
    let data = FitnessData::new(raw, prep.train.decisions().to_vec(), &k.model).unwrap();
    (k.rules, data, k.model, feature_max)
}

#[test]
fn criterion_07_ga_contracts() {
    // Elitism: best F never drops, over 10 seeded modular runs and 10
    // direct runs that also evolve the fuzzy parameters.
    let mut drops = 0;
    for seed in 0..10 {
        let (rules, data, model, feature_max) = small_problem(seed);
        let cfg = GaConfig {
            population_size: 16,
            generations: 30,
            ..GaConfig::default()
        };
        let input = EvolutionInput {
            data: &data,
            model: &model,
            feature_max: &feature_max,
            classes: 3,
            encode: EncodeOptions::default(),
        };
        let out = evolve_modular(&rules, &input, &cfg, seed).unwrap();
        drops += out.log.windows(2).filter(|w| w[1].best_f < w[0].best_f).count();

        let subs = encode_rules(&rules, 3, EncodeOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = concatenate(&subs, 3, 0.1, &mut rng).unwrap().network;
        let layout = Layout::new(net.clone(), model.clone(), &feature_max, true).unwrap();
        let c0 = layout.encode(&net, &model).unwrap();
        let pop = (0..16).map(|_| layout.perturb(&c0, 0.05, &mut rng).unwrap()).collect();
        let run = run_ga(&layout, pop, &data, Task::Multiclass, &cfg, 30, &mut rng).unwrap();
        drops += run.log.windows(2).filter(|w| w[1].best_f < w[0].best_f).count();
    }

    // Spatial mutation restriction, counted over at least 1e5 bits of each kind.
    let (rules, _, model, feature_max) = small_problem(1);
    let subs = encode_rules(&rules, 3, EncodeOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let net = concatenate(&subs, 3, 0.1, &mut rng).unwrap().network;
    let layout = Layout::new(net.clone(), model.clone(), &feature_max, true).unwrap();
    let base = layout.encode(&net, &model).unwrap();
    let (mut seen, mut flips) = ([0u64; 2], [0u64; 2]);
    while seen[0] < 100_000 || seen[1] < 100_000 {
        let mut c = base.clone();
        layout.mutate(&mut c, 0.4, 10.0, &mut rng).unwrap();
        for (i, (a, b)) in base.bits().iter().zip(c.bits()).enumerate() {
            let kind = usize::from(layout.is_restricted(i));
            seen[kind] += 1;
            flips[kind] += u64::from(a != b);
        }
    }
    let rate = |k: usize| flips[k] as f64 / seen[k] as f64;
    let ratio = rate(1) / rate(0);

    // Quantization round trip.
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let w = rng.random_range(-128.0..=128.0);
        worst = worst.max((word_to_weight(weight_to_word(w)) - w).abs());
    }
    let pass = drops == 0 && (0.08..=0.12).contains(&ratio) && worst <= WEIGHT_STEP;
    report(
        7,
        pass,
        &format!(
            "best-F drops {drops}; restricted/free flip ratio {ratio:.4} (rates {:.4}/{:.4}); worst round-trip error {worst:.2e} vs step {WEIGHT_STEP:.2e}",
            rate(1),
            rate(0)
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_extraction_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (mut mismatches, mut agree, mut judged, mut ambiguous) = (0usize, 0usize, 0usize, 0usize);
    for _ in 0..200 {
        let features = rng.random_range(1..=3);
        let classes = rng.random_range(1..=3);
        let planted = random_rules(&mut rng, features, classes, 12);
        let net = encoded(&planted, features, classes, false);
        let th = compute_thresholds(&net).unwrap();
        let rules = extract_rules(&net, &th, &ExtractionConfig::default()).unwrap();
        let inputs = common::crisp_inputs(3 * features);
        let mut clear = Vec::new();
        for x in &inputs {
            let truth = common::planted_truth(&planted, classes, x);
            let got: Vec<bool> = (1..=classes)
                .map(|k| rules.rules.iter().any(|r| r.class == k && r.fires(x, 0.5)))
                .collect();
            mismatches += usize::from(got != truth);
            // Where several classes hold, arg-max and highest-cf may pick
            // different winners; fidelity is judged where the rules decide.
            if truth.iter().filter(|&&t| t).count() <= 1 {
                clear.push(x.clone());
            } else {
                ambiguous += 1;
            }
        }
        if !clear.is_empty() {
            let f = fidelity(&net, &rules, &clear, 0.5).unwrap();
            agree += (f * clear.len() as f64 / 100.0).round() as usize;
            judged += clear.len();
        }
    }
    let fid = 100.0 * agree as f64 / judged as f64;
    let pass = mismatches == 0 && agree == judged;
    report(
        8,
        pass,
        &format!("200 planted sets, {mismatches} truth-table mismatches, fidelity {fid:.2}% on {judged} crisp inputs ({ambiguous} multi-class inputs set aside)"),
    );
    assert!(pass);
}

#[test]
fn criterion_09_metric_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut bad = 0;
    let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() < 1e-12,
        (None, None) => true,
        _ => false,
    };
    for _ in 0..100 {
        let l = rng.random_range(2..=6);
        let n = rng.random_range(1..=200);
        let pairs: Vec<(usize, usize)> = (0..n)
            .map(|_| {
                let a = rng.random_range(1..=l);
                let p = if rng.random_bool(0.6) { a } else { rng.random_range(1..=l) };
                (a, p)
            })
            .collect();
        let m = ConfusionMatrix::tally(l, pairs.iter().map(|&(a, p)| (a, Some(p)))).unwrap();
        let o = common::tally(l, &pairs);
        let acc = accuracy(&m);
        let k = kappa(&m);
        let ok = close(acc.overall, o.overall)
            && acc.per_class.iter().zip(&o.accuracy).all(|(a, b)| close(*a, *b))
            && users_accuracy(&m).iter().zip(&o.users).all(|(a, b)| close(*a, *b))
            && k.per_class.iter().zip(&o.kappa).all(|(a, b)| close(*a, *b))
            && close(k.overall, o.kappa_overall)
            && (confusion_index(&m).unwrap().value - o.conf).abs() < 1e-12;
        bad += usize::from(!ok);
    }
    // n = 10, n_i = n'_i = 5, n_ic = 4.
    let worked = ConfusionMatrix::from_counts(vec![vec![4, 1], vec![1, 4]]).unwrap();
    let k0 = kappa(&worked).per_class[0];
    let pass = bad == 0 && k0 == Some(0.6);
    report(9, pass, &format!("100 random matrices, {bad} disagreements; worked-example kappa {k0:?}"));
    assert!(pass);
}

#[test]
fn criterion_10_behrens_fisher() {
    let v = behrens_fisher(88.6, 0.26, 10, 86.6, 0.46, 10).unwrap();
    let pass = (v - 11.97).abs() <= 0.02;
    report(10, pass, &format!("v = {v:.4} (target 11.97 +/- 0.02)"));
    assert!(pass);
}

#[test]
fn criterion_11_synthetic_experiment() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let seeds: Vec<u64> = (1..=10).collect();
    let (mut net_acc, mut rule_acc, mut rules, mut fid, mut links_ok) = (vec![], vec![], vec![], vec![], true);
    for &seed in &seeds {
        let run = |model: ModelKind| {
            let cfg = PipelineConfig {
                seed,
                model,
                out: dir.path().join(format!("{model}-{seed}")),
                ..PipelineConfig::default()
            };
            run_pipeline(&cfg).unwrap().metrics
        };
        let s = run(ModelKind::S);
        let f = run(ModelKind::F);
        println!(
            "  seed {seed:>2}: S network {:.1}%, rules {:.1}%, {} rules, fidelity {:.1}%, uncovered {:.1}%, links {} vs F {}",
            s.network_accuracy.test,
            s.accuracy.unwrap_or(0.0),
            s.rules,
            s.fidelity,
            s.uncovered,
            s.present_links,
            f.present_links
        );
        net_acc.push(s.network_accuracy.test);
        rule_acc.push(s.accuracy.unwrap_or(0.0));
        rules.push(s.rules as f64);
        fid.push(s.fidelity);
        links_ok &= s.present_links < f.present_links;
    }
    let secs = start.elapsed().as_secs_f64();
    let (na, na_sd) = mean_sd(&net_acc);
    let (ra, ra_sd) = mean_sd(&rule_acc);
    let (rc, rc_sd) = mean_sd(&rules);
    let (fi, fi_sd) = mean_sd(&fid);
    let pass = na >= 80.0 && ra >= 80.0 && rc <= 16.0 && fi >= 90.0 && links_ok && secs < 300.0;
    report(
        11,
        pass,
        &format!(
            "10 seeds: network accuracy {na:.1} +/- {na_sd:.1}%, rule accuracy {ra:.1} +/- {ra_sd:.1}%, rules {rc:.1} +/- {rc_sd:.1}, fidelity {fi:.1} +/- {fi_sd:.1}%, fewer links than F every seed: {links_ok}, {secs:.0}s"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_12_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let read = |sub: &str, name: &str| std::fs::read(dir.path().join(sub).join(name)).unwrap();
    for sub in ["a", "b"] {
        let cfg = PipelineConfig {
            seed: 7,
            out: dir.path().join(sub),
            ..PipelineConfig::default()
        };
        run_pipeline(&cfg).unwrap();
    }
    let same = ["rules.txt", "metrics.json", "network.json", "evolution_log.csv"]
        .iter()
        .all(|n| read("a", n) == read("b", n));
    report(12, same, "two runs, seed 7: rules.txt, metrics.json, network.json and evolution_log.csv compared byte for byte");
    assert!(same);
}
