//! Two-stage modular genetic algorithm over network weights, topology and
//! fuzzy parameters.
//!
//! Stage one evolves a pool per rule-derived sub-network on a one-class-
//! versus-rest task. Stage two joins the pool winners, one per class and in
//! every cross-class combination, and evolves the whole. Intra-module and
//! fuzzy bits mutate at a tenth of the inter-module rate.

mod chromosome;
mod modular;

pub use chromosome::{
    crossover, crossover_points, generator_to_word, mutation_rate, splice, weight_to_word, word_to_generator,
    word_to_weight, Chromosome, Gene, Layout, LINK_BITS, WEIGHT_LIMIT, WEIGHT_STEP, WORD_BITS,
};
pub use modular::{concatenate, with_candidate_links, Concatenation};

use std::cmp::Ordering;
use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyModel;
use crate::network::{encode_rules, EncodeOptions, ModularNetwork};
use crate::rough::DependencyRuleSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_prob: f64,
    pub pmut_max: f64,
    pub pmut_min: f64,
    /// Intra-module and fuzzy bits mutate at `pmut / intra_divisor`.
    pub intra_divisor: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub stage1_sweeps: usize,
    pub generations: usize,
    /// Most concatenated networks seeded into stage two.
    pub combination_cap: usize,
    /// Inter-module links start uniform in `[−inter_init, inter_init]`.
    pub inter_init: f64,
    /// Standard deviation of the weight noise used to fill pools.
    pub perturbation_sigma: f64,
    /// Evolve the fuzzy parameters in stage two.
    pub evolve_fuzzy: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 64,
            crossover_prob: 0.7,
            pmut_max: 0.4,
            pmut_min: 0.01,
            intra_divisor: 10.0,
            alpha1: 0.9,
            alpha2: 0.1,
            stage1_sweeps: 10,
            generations: 100,
            combination_cap: 256,
            inter_init: 0.1,
            perturbation_sigma: 0.05,
            evolve_fuzzy: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("crossover_prob", self.crossover_prob)?;
        unit("pmut_max", self.pmut_max)?;
        unit("pmut_min", self.pmut_min)?;
        unit("alpha1", self.alpha1)?;
        unit("alpha2", self.alpha2)?;
        if (self.alpha1 + self.alpha2 - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!(
                "fitness weights must sum to 1, got {} + {}",
                self.alpha1, self.alpha2
            )));
        }
        if self.population_size == 0 || self.combination_cap == 0 {
            return Err(Error::Parameter("population size and combination cap must be positive".into()));
        }
        if self.intra_divisor < 1.0 || self.inter_init < 0.0 || self.perturbation_sigma <= 0.0 {
            return Err(Error::Parameter(
                "intra_divisor must be ≥ 1, inter_init ≥ 0 and perturbation_sigma > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    /// Fraction of training patterns classified correctly.
    pub f1: f64,
    /// `1 − present / possible` links.
    pub f2: f64,
    pub fitness: f64,
    pub present_links: usize,
    pub possible_links: usize,
}

impl FitnessReport {
    pub fn new(correct: usize, total: usize, present: usize, possible: usize, alpha1: f64, alpha2: f64) -> Self {
        let f1 = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
        let f2 = if possible == 0 { 0.0 } else { 1.0 - present as f64 / possible as f64 };
        Self {
            f1,
            f2,
            fitness: alpha1 * f1 + alpha2 * f2,
            present_links: present,
            possible_links: possible,
        }
    }
}

/// Training patterns as seen by the fitness function.
#[derive(Debug, Clone)]
pub struct FitnessData {
    /// Scaled feature vectors, re-fuzzified when the chromosome carries
    /// fuzzy parameters.
    pub raw: Vec<Vec<f64>>,
    /// The same patterns fuzzified with the base model.
    pub fuzzified: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl FitnessData {
    pub fn new(raw: Vec<Vec<f64>>, labels: Vec<usize>, model: &FuzzyModel) -> Result<Self> {
        if raw.len() != labels.len() {
            return Err(Error::Dimension {
                expected: raw.len(),
                actual: labels.len(),
            });
        }
        let fuzzified = model.features.fuzzify_all(&raw)?;
        Ok(Self { raw, fuzzified, labels })
    }
}

/// What counts as a correct classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Winning output node names the label.
    Multiclass,
    /// Single output above 1/2 exactly when the label is the given class.
    OneVsRest(usize),
}

pub fn fitness(layout: &Layout, c: &Chromosome, data: &FitnessData, task: Task, cfg: &GaConfig) -> Result<FitnessReport> {
    let net = layout.decode_network(c)?;
    let refuzzified;
    let inputs = if layout.has_fuzzy() {
        refuzzified = layout.decode_model(c)?.features.fuzzify_all(&data.raw)?;
        &refuzzified
    } else {
        &data.fuzzified
    };
    let compiled = net.compile();
    let classes = net.output_classes();
    let correct = inputs
        .iter()
        .zip(&data.labels)
        .filter(|(x, &label)| match task {
            Task::Multiclass => classes[compiled.winner_index(x)] == label,
            Task::OneVsRest(k) => (compiled.output(x)[0] > 0.5) == (label == k),
        })
        .count();
    Ok(FitnessReport::new(
        correct,
        inputs.len(),
        net.present_links(),
        layout.link_count(),
        cfg.alpha1,
        cfg.alpha2,
    ))
}

/// Total order on individuals: higher F, then fewer links, then the
/// lexicographically smaller chromosome is better. `Greater` means `a` is
/// better.
pub fn compare_individuals(a: (&FitnessReport, &Chromosome), b: (&FitnessReport, &Chromosome)) -> Ordering {
    a.0.fitness
        .total_cmp(&b.0.fitness)
        .then_with(|| b.0.present_links.cmp(&a.0.present_links))
        .then_with(|| b.1.lex_cmp(a.1))
}

/// Population indices from worst (rank 1) to best (rank P).
pub fn rank_order(pop: &[Chromosome], reports: &[FitnessReport]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&i, &j| compare_individuals((&reports[i], &pop[i]), (&reports[j], &pop[j])).then(i.cmp(&j)));
    idx
}

/// Roulette selection with probability proportional to rank.
pub fn select_parents<R: Rng + ?Sized>(order: &[usize], count: usize, rng: &mut R) -> Vec<usize> {
    let p = order.len() as u64;
    let total = p * (p + 1) / 2;
    (0..count)
        .map(|_| {
            let mut ticket = rng.random_range(0..total);
            for (r, &i) in order.iter().enumerate() {
                let weight = r as u64 + 1;
                if ticket < weight {
                    return i;
                }
                ticket -= weight;
            }
            *order.last().expect("nonempty population")
        })
        .collect()
}

fn best_index(pop: &[Chromosome], reports: &[FitnessReport]) -> usize {
    *rank_order(pop, reports).last().expect("nonempty population")
}

/// One row of the evolution log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_f: f64,
    pub best_f1: f64,
    pub mean_f: f64,
    pub best_links: usize,
}

fn record(generation: usize, pop: &[Chromosome], reports: &[FitnessReport]) -> GenerationRecord {
    let b = &reports[best_index(pop, reports)];
    GenerationRecord {
        generation,
        best_f: b.fitness,
        best_f1: b.f1,
        mean_f: reports.iter().map(|r| r.fitness).sum::<f64>() / reports.len() as f64,
        best_links: b.present_links,
    }
}

fn evaluate(layout: &Layout, pop: &[Chromosome], data: &FitnessData, task: Task, cfg: &GaConfig) -> Result<Vec<FitnessReport>> {
    pop.par_iter().map(|c| fitness(layout, c, data, task, cfg)).collect()
}

/// Result of a generational run.
#[derive(Debug, Clone)]
pub struct GaRun {
    pub best: Chromosome,
    pub report: FitnessReport,
    /// Generation 0 is the initial population.
    pub log: Vec<GenerationRecord>,
}

/// Generational GA: rank roulette, pairwise multi-point crossover,
/// annealed variable-rate mutation and elitism.
pub fn run_ga<R: Rng + ?Sized>(
    layout: &Layout,
    initial: Vec<Chromosome>,
    data: &FitnessData,
    task: Task,
    cfg: &GaConfig,
    generations: usize,
    rng: &mut R,
) -> Result<GaRun> {
    cfg.validate()?;
    if initial.is_empty() {
        return Err(Error::Parameter("empty population".into()));
    }
    let size = initial.len();
    let mut pop = initial;
    let mut reports = evaluate(layout, &pop, data, task, cfg)?;
    let mut log = vec![record(0, &pop, &reports)];
    for g in 1..=generations {
        let pmut = mutation_rate(cfg.pmut_max, cfg.pmut_min, g - 1, generations.saturating_sub(1));
        let order = rank_order(&pop, &reports);
        let elite = *order.last().expect("nonempty population");
        let parents = select_parents(&order, size, rng);
        let mut children = Vec::with_capacity(size);
        for pair in parents.chunks(2) {
            if let [a, b] = *pair {
                let (x, y) = crossover(&pop[a], &pop[b], cfg.crossover_prob, rng)?;
                children.push(x);
                children.push(y);
            } else {
                children.push(pop[pair[0]].clone());
            }
        }
        for c in &mut children {
            layout.mutate(c, pmut, cfg.intra_divisor, rng)?;
        }
        let mut child_reports = evaluate(layout, &children, data, task, cfg)?;
        let child_best = best_index(&children, &child_reports);
        if child_reports[child_best].fitness < reports[elite].fitness {
            let slot = rng.random_range(0..size);
            children[slot] = pop[elite].clone();
            child_reports[slot] = reports[elite];
        }
        pop = children;
        reports = child_reports;
        log.push(record(g, &pop, &reports));
    }
    let b = best_index(&pop, &reports);
    Ok(GaRun {
        best: pop[b].clone(),
        report: reports[b],
        log,
    })
}

/// Seed population: the given chromosomes followed by perturbed copies
/// (taken round-robin) up to `size`.
fn fill_population<R: Rng + ?Sized>(
    layout: &Layout,
    seeds: Vec<Chromosome>,
    size: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    let mut pop = seeds;
    let base = pop.len();
    let mut k = 0;
    while pop.len() < size {
        let c = layout.perturb(&pop[k % base], sigma, rng)?;
        pop.push(c);
        k += 1;
    }
    Ok(pop)
}

/// Everything produced by [`evolve_modular`].
#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    pub network: ModularNetwork,
    pub model: FuzzyModel,
    pub best: Chromosome,
    pub report: FitnessReport,
    /// Stage-two generations.
    pub log: Vec<GenerationRecord>,
    /// Best report of each stage-one pool, in rule order.
    pub stage1: Vec<FitnessReport>,
    /// Number of concatenated networks seeded into stage two.
    pub combinations: usize,
    /// Combinations that existed before capping.
    pub combinations_total: usize,
}

fn cartesian(groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    groups.iter().fold(vec![Vec::new()], |acc, g| {
        acc.iter()
            .flat_map(|prefix| {
                g.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect()
    })
}

/// Inputs of [`evolve_modular`] besides the rules.
#[derive(Debug, Clone)]
pub struct EvolutionInput<'a> {
    pub data: &'a FitnessData,
    pub model: &'a FuzzyModel,
    /// Largest training value of each feature.
    pub feature_max: &'a [f64],
    pub classes: usize,
    pub encode: EncodeOptions,
}

/// Knowledge-seeded two-stage modular evolution.
pub fn evolve_modular(
    rules: &DependencyRuleSet,
    input: &EvolutionInput<'_>,
    cfg: &GaConfig,
    seed: u64,
) -> Result<EvolutionOutcome> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = input.model.features.feature_count();
    let subs = encode_rules(rules, n, input.encode)?;
    if let Some(c) = (1..=input.classes).find(|&c| !subs.iter().any(|s| s.output_classes()[0] == c)) {
        return Err(Error::EmptyClass(c));
    }

    // Stage one: a pool per sub-network on its own class-versus-rest task.
    let mut winners = Vec::with_capacity(subs.len());
    let mut stage1 = Vec::with_capacity(subs.len());
    for sub in &subs {
        let full = with_candidate_links(sub)?;
        let layout = Layout::new(full.clone(), input.model.clone(), input.feature_max, false)?;
        let base = layout.encode(&full, input.model)?;
        let pool = fill_population(&layout, vec![base], cfg.population_size, cfg.perturbation_sigma, &mut rng)?;
        let task = Task::OneVsRest(sub.output_classes()[0]);
        let run = run_ga(&layout, pool, input.data, task, cfg, cfg.stage1_sweeps, &mut rng)?;
        stage1.push(run.report);
        winners.push(layout.decode_network(&run.best)?);
    }

    // Stage two: every cross-class choice of one winner per class.
    let cat = concatenate(&winners, input.classes, cfg.inter_init, &mut rng)?;
    let groups: Vec<Vec<usize>> = (1..=input.classes)
        .map(|c| (0..winners.len()).filter(|&s| cat.sub_class[s] == c).collect())
        .collect();
    let mut combos = cartesian(&groups);
    let combinations_total = combos.len();
    if combos.len() > cfg.combination_cap {
        log::info!(
            "{} sub-network combinations; keeping a uniform sample of {}",
            combos.len(),
            cfg.combination_cap
        );
        let mut keep = sample(&mut rng, combos.len(), cfg.combination_cap).into_vec();
        keep.sort_unstable();
        combos = keep.into_iter().map(|i| combos[i].clone()).collect();
    }
    let layout = Layout::new(cat.network.clone(), input.model.clone(), input.feature_max, cfg.evolve_fuzzy)?;
    let mut seeds = Vec::with_capacity(combos.len());
    for combo in &combos {
        let mut active = vec![false; winners.len()];
        for &s in combo {
            active[s] = true;
        }
        let mut net = cat.network.clone();
        for l in net.links_mut() {
            if !cat.link_active(l, &active) {
                l.present = false;
            } else if l.tag == crate::network::ModuleTag::Inter {
                l.w = rng.random_range(-cfg.inter_init..=cfg.inter_init);
            }
        }
        seeds.push(layout.encode(&net, input.model)?);
    }
    let combinations = seeds.len();
    let size = cfg.population_size.max(combinations);
    let pop = fill_population(&layout, seeds, size, cfg.perturbation_sigma, &mut rng)?;
    let run = run_ga(&layout, pop, input.data, Task::Multiclass, cfg, cfg.generations, &mut rng)?;
    Ok(EvolutionOutcome {
        network: layout.decode_network(&run.best)?,
        model: layout.decode_model(&run.best)?,
        best: run.best,
        report: run.report,
        log: run.log,
        stage1,
        combinations,
        combinations_total,
    })
}

pub fn write_log_csv<W: Write>(log: &[GenerationRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in log {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(f: f64, links: usize) -> FitnessReport {
        FitnessReport {
            f1: f,
            f2: 0.0,
            fitness: f,
            present_links: links,
            possible_links: 10,
        }
    }

    #[test]
    fn fitness_formula_examples() {
        assert!((FitnessReport::new(10, 10, 100, 100, 0.9, 0.1).fitness - 0.9).abs() < 1e-12);
        assert!((FitnessReport::new(10, 10, 20, 100, 0.9, 0.1).fitness - 0.98).abs() < 1e-12);
    }

    #[test]
    fn rank_roulette_frequencies() {
        let pop: Vec<Chromosome> = (0..3).map(|i| Chromosome(vec![i == 1])).collect();
        let reports = vec![report(0.5, 1), report(0.1, 1), report(0.9, 1)];
        let order = rank_order(&pop, &reports);
        assert_eq!(order, vec![1, 0, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let picks = select_parents(&order, 60_000, &mut rng);
        let freq = |i: usize| picks.iter().filter(|&&p| p == i).count() as f64 / 60_000.0;
        assert!((freq(1) - 1.0 / 6.0).abs() < 0.01);
        assert!((freq(0) - 2.0 / 6.0).abs() < 0.01);
        assert!((freq(2) - 3.0 / 6.0).abs() < 0.01);
        assert_eq!(select_parents(&[7], 3, &mut rng), vec![7, 7, 7]);
    }

    #[test]
    fn ties_prefer_fewer_links_then_smaller_bits() {
        let a = Chromosome(vec![true]);
        let b = Chromosome(vec![false]);
        let (ra, rb) = (report(0.5, 3), report(0.5, 4));
        assert_eq!(compare_individuals((&ra, &a), (&rb, &b)), Ordering::Greater);
        let rc = report(0.5, 3);
        assert_eq!(compare_individuals((&ra, &a), (&rc, &b)), Ordering::Less);
    }

    #[test]
    fn cartesian_counts() {
        assert_eq!(cartesian(&[vec![0], vec![1, 2]]).len(), 2);
        assert_eq!(cartesian(&[vec![0, 1], vec![2, 3], vec![4, 5, 6]]).len(), 12);
    }
}
