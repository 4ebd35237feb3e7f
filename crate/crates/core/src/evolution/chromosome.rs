use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyEncoding, FuzzyGenerators, FuzzyModel, PiParams};
use crate::literal::Term;
use crate::network::{ModularNetwork, ModuleTag};

/// Bits per weight word.
pub const WORD_BITS: usize = 16;
/// Bits per link: weight word plus presence flag.
pub const LINK_BITS: usize = WORD_BITS + 1;
const WORD_MAX: f64 = 65535.0;
/// Weight words span `[−WEIGHT_LIMIT, WEIGHT_LIMIT]`.
pub const WEIGHT_LIMIT: f64 = 128.0;
/// Largest decode error of a weight inside the range.
pub const WEIGHT_STEP: f64 = 2.0 * WEIGHT_LIMIT / WORD_MAX;

/// A bit string; serialized as text of `0`/`1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome(pub Vec<bool>);

impl Chromosome {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    fn word(&self, start: usize) -> u16 {
        self.0[start..start + WORD_BITS]
            .iter()
            .fold(0u16, |acc, &b| (acc << 1) | b as u16)
    }

    fn set_word(&mut self, start: usize, word: u16) {
        for k in 0..WORD_BITS {
            self.0[start + k] = word >> (WORD_BITS - 1 - k) & 1 == 1;
        }
    }

    /// Lexicographic order with `false < true`.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Serialize for Chromosome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for Chromosome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("invalid bit `{other}`"))),
            })
            .collect::<std::result::Result<Vec<bool>, _>>()
            .map(Chromosome)
    }
}

pub fn weight_to_word(w: f64) -> u16 {
    let clamped = w.clamp(-WEIGHT_LIMIT, WEIGHT_LIMIT);
    if clamped != w {
        log::warn!("weight {w} clamped into [-{WEIGHT_LIMIT}, {WEIGHT_LIMIT}]");
    }
    ((clamped + WEIGHT_LIMIT) / (2.0 * WEIGHT_LIMIT) * WORD_MAX).round() as u16
}

pub fn word_to_weight(word: u16) -> f64 {
    -WEIGHT_LIMIT + 2.0 * WEIGHT_LIMIT * word as f64 / WORD_MAX
}

/// Values in `[0, top]`.
fn unit_to_word(v: f64, top: f64) -> u16 {
    let clamped = v.clamp(0.0, top);
    if clamped != v {
        log::warn!("fuzzy parameter {v} clamped into [0, {top}]");
    }
    (clamped / top * WORD_MAX).round() as u16
}

fn word_to_unit(word: u16, top: f64) -> f64 {
    top * word as f64 / WORD_MAX
}

/// Membership generators use `2·(w + 1)/2^16`, covering `(0, 2]`.
pub fn generator_to_word(v: f64) -> u16 {
    let step = 2.0 / 65536.0;
    let clamped = v.clamp(step, 2.0);
    if clamped != v {
        log::warn!("membership generator {v} clamped into (0, 2]");
    }
    ((clamped / step).round() - 1.0) as u16
}

pub fn word_to_generator(word: u16) -> f64 {
    2.0 * (word as f64 + 1.0) / 65536.0
}

/// What a group of bits encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gene {
    Link(usize),
    Center { feature: usize, term: Term },
    Radius { feature: usize, term: Term },
    Fd,
    Fe,
}

/// Maps chromosome bits to the links of a template network and, optionally,
/// to the fuzzy parameters.
///
/// Link `i` owns bits `17i .. 17i+17` (weight word, then presence). Fuzzy
/// words follow, per feature `c_L, λ_L, c_M, λ_M, c_H, λ_H`, then `f_d`, `f_e`.
#[derive(Debug, Clone)]
pub struct Layout {
    template: ModularNetwork,
    model: FuzzyModel,
    /// Upper end of the fuzzy-parameter range per feature.
    ranges: Vec<f64>,
    genes: Vec<Gene>,
    /// Bits mutated at the reduced rate.
    restricted: Vec<bool>,
}

impl Layout {
    /// `feature_max[f]` is the largest training value of feature `f`;
    /// centres and radii are coded in `[0, 1.2·max]`.
    pub fn new(template: ModularNetwork, model: FuzzyModel, feature_max: &[f64], with_fuzzy: bool) -> Result<Self> {
        let n = model.features.feature_count();
        if template.input_size() != 3 * n || feature_max.len() != n {
            return Err(Error::Dimension {
                expected: template.input_size(),
                actual: 3 * n,
            });
        }
        let ranges = feature_max
            .iter()
            .map(|&m| if m > 0.0 && m.is_finite() { 1.2 * m } else { 1.2 })
            .collect();
        let mut genes: Vec<Gene> = (0..template.links().len()).map(Gene::Link).collect();
        let mut restricted = Vec::new();
        for l in template.links() {
            let r = matches!(l.tag, ModuleTag::Intra(_));
            restricted.extend(std::iter::repeat_n(r, LINK_BITS));
        }
        if with_fuzzy {
            for feature in 0..n {
                for term in [Term::Low, Term::Medium, Term::High] {
                    genes.push(Gene::Center { feature, term });
                    genes.push(Gene::Radius { feature, term });
                }
            }
            genes.push(Gene::Fd);
            genes.push(Gene::Fe);
            let words = genes.len() - template.links().len();
            restricted.extend(std::iter::repeat_n(true, words * WORD_BITS));
        }
        Ok(Self {
            template,
            model,
            ranges,
            genes,
            restricted,
        })
    }

    pub fn bit_len(&self) -> usize {
        self.restricted.len()
    }

    pub fn link_count(&self) -> usize {
        self.template.links().len()
    }

    pub fn has_fuzzy(&self) -> bool {
        self.genes.len() > self.link_count()
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn template(&self) -> &ModularNetwork {
        &self.template
    }

    pub fn model(&self) -> &FuzzyModel {
        &self.model
    }

    /// Whether bit `i` mutates at the reduced (intra-module or fuzzy) rate.
    pub fn is_restricted(&self, i: usize) -> bool {
        self.restricted[i]
    }

    /// Quantization step of fuzzy parameter words of a feature.
    pub fn fuzzy_step(&self, feature: usize) -> f64 {
        self.ranges[feature] / WORD_MAX
    }

    fn check(&self, c: &Chromosome) -> Result<()> {
        if c.len() != self.bit_len() {
            return Err(Error::LayoutMismatch {
                left: c.len(),
                right: self.bit_len(),
            });
        }
        Ok(())
    }

    /// Encode a network with the template's topology and a fuzzy model.
    pub fn encode(&self, net: &ModularNetwork, model: &FuzzyModel) -> Result<Chromosome> {
        if net.links().len() != self.link_count() {
            return Err(Error::LayoutMismatch {
                left: net.links().len() * LINK_BITS,
                right: self.link_count() * LINK_BITS,
            });
        }
        let mut c = Chromosome(vec![false; self.bit_len()]);
        for (i, l) in net.links().iter().enumerate() {
            c.set_word(i * LINK_BITS, weight_to_word(l.w));
            c.0[i * LINK_BITS + WORD_BITS] = l.present;
        }
        let base = self.link_count() * LINK_BITS;
        for (k, gene) in self.genes[self.link_count()..].iter().enumerate() {
            let word = match *gene {
                Gene::Center { feature, term } => {
                    unit_to_word(model.features.features()[feature].get(term).center, self.ranges[feature])
                }
                Gene::Radius { feature, term } => {
                    unit_to_word(model.features.features()[feature].get(term).radius, self.ranges[feature])
                }
                Gene::Fd => generator_to_word(model.generators.f_d),
                Gene::Fe => generator_to_word(model.generators.f_e),
                Gene::Link(_) => unreachable!("links precede fuzzy words"),
            };
            c.set_word(base + k * WORD_BITS, word);
        }
        Ok(c)
    }

    /// Decode only the network part.
    pub fn decode_network(&self, c: &Chromosome) -> Result<ModularNetwork> {
        self.check(c)?;
        let mut net = self.template.clone();
        for (i, l) in net.links_mut().iter_mut().enumerate() {
            l.w = word_to_weight(c.word(i * LINK_BITS));
            l.present = c.0[i * LINK_BITS + WORD_BITS];
        }
        Ok(net)
    }

    /// Decode the fuzzy model; the layout's base model when fuzzy
    /// parameters are not part of the chromosome.
    ///
    /// The three centres of a feature are re-sorted (each keeps its radius)
    /// and radii are kept strictly positive.
    pub fn decode_model(&self, c: &Chromosome) -> Result<FuzzyModel> {
        self.check(c)?;
        if !self.has_fuzzy() {
            return Ok(self.model.clone());
        }
        let base = self.link_count() * LINK_BITS;
        let n = self.model.features.feature_count();
        let word = |k: usize| c.word(base + k * WORD_BITS);
        let mut features = self.model.features.features().to_vec();
        for (f, terms) in features.iter_mut().enumerate() {
            let top = self.ranges[f];
            let mut pairs: Vec<(f64, f64)> = (0..3)
                .map(|t| {
                    let k = f * 6 + 2 * t;
                    let centre = word_to_unit(word(k), top);
                    let radius = word_to_unit(word(k + 1), top).max(self.fuzzy_step(f));
                    (centre, radius)
                })
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (t, (centre, radius)) in pairs.into_iter().enumerate() {
                *terms.get_mut(Term::from_index(t)) = PiParams::new(centre, radius)?;
            }
        }
        let generators = FuzzyGenerators::new(word_to_generator(word(6 * n)), word_to_generator(word(6 * n + 1)))?;
        Ok(FuzzyModel {
            features: FuzzyEncoding::new(features)?,
            generators,
        })
    }

    /// Apply Gaussian noise to every decoded link weight.
    pub fn perturb<R: Rng + ?Sized>(&self, c: &Chromosome, sigma: f64, rng: &mut R) -> Result<Chromosome> {
        let mut net = self.decode_network(c)?;
        let normal = rand_distr::Normal::new(0.0, sigma)
            .map_err(|e| Error::Parameter(format!("perturbation sigma {sigma}: {e}")))?;
        for l in net.links_mut() {
            l.w = (l.w + rng.sample(normal)).clamp(-WEIGHT_LIMIT, WEIGHT_LIMIT);
        }
        let mut out = c.clone();
        for (i, l) in net.links().iter().enumerate() {
            out.set_word(i * LINK_BITS, weight_to_word(l.w));
        }
        Ok(out)
    }

    /// Flip each bit independently: unrestricted bits with `pmut`,
    /// restricted ones with `pmut / divisor`.
    pub fn mutate<R: Rng + ?Sized>(&self, c: &mut Chromosome, pmut: f64, divisor: f64, rng: &mut R) -> Result<()> {
        self.check(c)?;
        let slow = pmut / divisor;
        for (bit, &restricted) in c.0.iter_mut().zip(&self.restricted) {
            let p = if restricted { slow } else { pmut };
            if rng.random::<f64>() < p {
                *bit = !*bit;
            }
        }
        Ok(())
    }
}

/// Linearly annealed mutation probability at generation `t` of `total`.
pub fn mutation_rate(pmut_max: f64, pmut_min: f64, t: usize, total: usize) -> f64 {
    if total == 0 {
        return pmut_min;
    }
    let frac = (t.min(total)) as f64 / total as f64;
    pmut_max * (1.0 - frac) + pmut_min * frac
}

/// Crossover points left to right with gaps drawn uniformly from
/// `[min_gap, max_gap]`, all strictly inside `(0, len)`.
pub fn crossover_points<R: Rng + ?Sized>(len: usize, min_gap: usize, max_gap: usize, rng: &mut R) -> Vec<usize> {
    let mut points = Vec::new();
    let mut pos = 0;
    loop {
        pos += rng.random_range(min_gap..=max_gap);
        if pos >= len {
            return points;
        }
        points.push(pos);
    }
}

/// Complementary splice: the first child copies `a` up to the first point,
/// then `b` up to the second, and so on.
pub fn splice(a: &Chromosome, b: &Chromosome, points: &[usize]) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::LayoutMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut x = a.clone();
    let mut y = b.clone();
    let mut swapped = false;
    let mut next = points.iter().copied().peekable();
    for p in 0..a.len() {
        while next.peek() == Some(&p) {
            swapped = !swapped;
            next.next();
        }
        if swapped {
            x.0[p] = b.0[p];
            y.0[p] = a.0[p];
        }
    }
    Ok((x, y))
}

/// Multi-point crossover applied with probability `prob`; otherwise the
/// children are copies.
pub fn crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    prob: f64,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::LayoutMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if rng.random::<f64>() >= prob {
        return Ok((a.clone(), b.clone()));
    }
    let points = crossover_points(a.len(), 8, 24, rng);
    splice(a, b, &points)
}
