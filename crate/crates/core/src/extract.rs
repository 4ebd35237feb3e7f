//! Decompositional rule extraction and rule-based inference.
//!
//! Each hidden or output unit is searched for minimal sets of strong input
//! conditions whose worst-case net input still exceeds the unit's
//! threshold. Output-unit conditions are expanded through the hidden units
//! they name until only linguistic input literals remain.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::literal::{attribute_name, Literal, Term};
use crate::network::{ModularNetwork, NodeId};
use crate::rough::Conjunct;

/// Weight statistics over present links. `None` marks a threshold with no
/// weights on the required side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightThresholds {
    pub p_mean: Option<f64>,
    /// Mean of the positive weights below `p_mean`.
    pub p_threshold1: Option<f64>,
    /// Mean of the positive weights above `p_mean`.
    pub p_threshold2: Option<f64>,
    pub n_mean: Option<f64>,
    /// Mean of the negative weights closer to zero than `n_mean`.
    pub n_threshold1: Option<f64>,
    /// Mean of the negative weights further from zero than `n_mean`.
    pub n_threshold2: Option<f64>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn side_thresholds(magnitudes: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let Some(m) = mean(magnitudes) else {
        return (None, None, None);
    };
    // Equal weights must not straddle their own mean through rounding.
    let tol = 1e-9 * m;
    let below: Vec<f64> = magnitudes.iter().copied().filter(|&w| w < m - tol).collect();
    let above: Vec<f64> = magnitudes.iter().copied().filter(|&w| w > m + tol).collect();
    (Some(m), mean(&below), mean(&above))
}

pub fn compute_thresholds(net: &ModularNetwork) -> Result<WeightThresholds> {
    let present: Vec<f64> = net.links().iter().filter(|l| l.present).map(|l| l.w).collect();
    if present.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let pos: Vec<f64> = present.iter().copied().filter(|&w| w > 0.0).collect();
    let neg: Vec<f64> = present.iter().filter(|&&w| w < 0.0).map(|w| -w).collect();
    let (p_mean, p_threshold1, p_threshold2) = side_thresholds(&pos);
    let (n_mean, n_threshold1, n_threshold2) = side_thresholds(&neg);
    let flip = |v: Option<f64>| v.map(|x| -x);
    Ok(WeightThresholds {
        p_mean,
        p_threshold1,
        p_threshold2,
        n_mean: flip(n_mean),
        n_threshold1: flip(n_threshold1),
        n_threshold2: flip(n_threshold2),
    })
}

impl WeightThresholds {
    /// Weights that may appear as literals: positive ones at or above
    /// `p_threshold1`, negative ones at or beyond `n_threshold1` (every
    /// weight of a side when its threshold is absent).
    pub fn is_strong(&self, w: f64) -> bool {
        if w > 0.0 {
            self.p_threshold1.is_none_or(|t| w >= t)
        } else if w < 0.0 {
            self.n_threshold1.is_none_or(|t| w <= t)
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    /// Largest subset searched per unit.
    pub max_antecedent: usize,
    /// Subsets examined per unit before the search is cut short.
    pub subset_budget: usize,
    /// Most rules kept; the highest-cf ones survive.
    pub max_rules: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            max_antecedent: 5,
            subset_budget: 200_000,
            max_rules: 64,
        }
    }
}

/// `class <- antecedent` with confidence factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedRule {
    pub class: usize,
    pub antecedent: Conjunct,
    pub cf: f64,
}

impl ExtractedRule {
    pub fn fires(&self, pattern: &[f64], crispness: f64) -> bool {
        self.antecedent.holds(pattern, crispness)
    }
}

impl fmt::Display for ExtractedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{} <- {} ; cf={:.3}", self.class, self.antecedent, self.cf)
    }
}

impl FromStr for ExtractedRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s
            .split_once("<-")
            .ok_or_else(|| Error::Parse(format!("rule `{s}` lacks `<-`")))?;
        let class = head
            .trim()
            .strip_prefix('c')
            .and_then(|k| k.parse().ok())
            .filter(|&k: &usize| k >= 1)
            .ok_or_else(|| Error::Parse(format!("bad class in `{s}`")))?;
        let (body, tail) = rest
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("rule `{s}` lacks `; cf=`")))?;
        let cf = tail
            .trim()
            .strip_prefix("cf=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad cf in `{s}`")))?;
        let antecedent: Conjunct = body.parse()?;
        if antecedent.is_empty() {
            return Err(Error::Parse(format!("empty antecedent in `{s}`")));
        }
        Ok(Self { class, antecedent, cf })
    }
}

/// Extracted rules with search diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleBase {
    pub rules: Vec<ExtractedRule>,
    /// Units whose subset search hit the budget.
    pub truncated_units: usize,
    /// Rules dropped by the rule-count budget.
    pub dropped_rules: usize,
    /// Rules dropped for a non-positive incoming sum on their path.
    pub discarded_nonpositive: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonLiteral {
    attribute: String,
    feature: usize,
    term: Term,
    negated: bool,
}

#[derive(Serialize, Deserialize)]
struct JsonRule {
    class: usize,
    antecedent: Vec<JsonLiteral>,
    cf: f64,
}

impl RuleBase {
    pub fn from_rules(rules: Vec<ExtractedRule>) -> Self {
        Self {
            rules,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.rules.iter().map(|r| format!("{r}\n")).collect()
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let rules = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rules(rules))
    }

    pub fn to_json(&self) -> Result<String> {
        let rules: Vec<JsonRule> = self
            .rules
            .iter()
            .map(|r| JsonRule {
                class: r.class,
                antecedent: r
                    .antecedent
                    .literals()
                    .iter()
                    .map(|l| JsonLiteral {
                        attribute: attribute_name(l.attribute),
                        feature: l.feature() + 1,
                        term: l.term(),
                        negated: l.negated,
                    })
                    .collect(),
                cf: r.cf,
            })
            .collect();
        Ok(serde_json::to_string_pretty(&rules)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<JsonRule> = serde_json::from_str(text)?;
        let rules = raw
            .into_iter()
            .map(|r| {
                let lits = r
                    .antecedent
                    .into_iter()
                    .map(|l| {
                        if l.feature == 0 {
                            return Err(Error::Parse("features are numbered from 1".into()));
                        }
                        let a = crate::literal::attribute_index(l.feature - 1, l.term);
                        Ok(if l.negated { Literal::neg(a) } else { Literal::pos(a) })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ExtractedRule {
                    class: r.class,
                    antecedent: Conjunct::new(lits),
                    cf: r.cf,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rules(rules))
    }

    /// Highest-cf fired rule's class; ties go to the lower class. `None`
    /// when no rule fires.
    pub fn infer(&self, pattern: &[f64], crispness: f64) -> Option<usize> {
        infer(&self.rules, pattern, crispness)
    }
}

pub fn infer(rules: &[ExtractedRule], pattern: &[f64], crispness: f64) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for r in rules.iter().filter(|r| r.fires(pattern, crispness)) {
        best = match best {
            Some((cf, class)) if cf > r.cf || (cf == r.cf && class <= r.class) => Some((cf, class)),
            _ => Some((r.cf, r.class)),
        };
    }
    best.map(|(_, class)| class)
}

/// Confidence of one unit condition: `(S − θ)/S` with `S` the summed
/// magnitude of the asserted links. `None` when `S ≤ 0`.
pub fn unit_confidence(asserted: &[f64], theta: f64) -> Option<f64> {
    let s: f64 = asserted.iter().map(|w| w.abs()).sum();
    (s > 0.0).then(|| ((s - theta) / s).min(1.0))
}

/// A unit-level condition: asserted sources of the previous layer, each
/// required on (`true`) or off.
#[derive(Debug, Clone, PartialEq)]
struct UnitCondition {
    literals: Vec<(usize, bool)>,
}

struct UnitSearch {
    conditions: Vec<UnitCondition>,
    truncated: bool,
}

/// Minimal subsets of candidate links whose assertion settles the unit.
/// `candidates` holds `(source, weight)` of strong links and `base` the
/// worst-case margin with nothing asserted; each asserted link adds `|w|`.
/// An "on" unit needs a margin above zero, an "off" unit one at or above.
fn search_unit(candidates: &[(usize, f64)], base: f64, on: bool, cfg: &ExtractionConfig) -> UnitSearch {
    let settled = |margin: f64| if on { margin > 0.0 } else { margin >= 0.0 };
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut examined = 0usize;
    let mut truncated = false;
    let k = candidates.len();
    let gain: Vec<f64> = candidates.iter().map(|&(_, w)| w.abs()).collect();
    if settled(base) {
        found.push(Vec::new());
    } else {
        'sizes: for size in 1..=cfg.max_antecedent.min(k) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                examined += 1;
                if examined > cfg.subset_budget {
                    truncated = true;
                    break 'sizes;
                }
                let superset = found.iter().any(|f| f.iter().all(|x| idx.contains(x)));
                if !superset && settled(base + idx.iter().map(|&i| gain[i]).sum::<f64>()) {
                    found.push(idx.clone());
                }
                // Next combination in lexicographic order.
                let mut pos = size;
                while pos > 0 && idx[pos - 1] == k - size + pos - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                idx[pos - 1] += 1;
                for q in pos..size {
                    idx[q] = idx[q - 1] + 1;
                }
            }
        }
    }
    let conditions = found
        .into_iter()
        .map(|set| UnitCondition {
            // A positive link pushes towards on, a negative one towards off.
            literals: set.iter().map(|&i| (candidates[i].0, (candidates[i].1 > 0.0) == on)).collect(),
        })
        .collect();
    UnitSearch { conditions, truncated }
}

/// A composed condition over input literals; `cf` is `None` once a node on
/// the path had a non-positive asserted sum.
type Composed = (Vec<Literal>, Option<f64>);

struct Extractor<'a> {
    net: &'a ModularNetwork,
    th: WeightThresholds,
    cfg: ExtractionConfig,
    /// Present incoming links per node as `(source index, weight)`.
    incoming: HashMap<NodeId, Vec<(usize, f64)>>,
    memo: HashMap<(NodeId, bool), Vec<Composed>>,
    truncated_units: usize,
}

impl<'a> Extractor<'a> {
    fn new(net: &'a ModularNetwork, th: WeightThresholds, cfg: ExtractionConfig) -> Self {
        let mut incoming: HashMap<NodeId, Vec<(usize, f64)>> = HashMap::new();
        for l in net.links().iter().filter(|l| l.present && l.w != 0.0) {
            incoming.entry(l.to).or_default().push((l.from.index(), l.w));
        }
        for v in incoming.values_mut() {
            v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        }
        Self {
            net,
            th,
            cfg,
            incoming,
            memo: HashMap::new(),
            truncated_units: 0,
        }
    }

    /// Input-literal conditions under which `node` is surely on (or surely
    /// off). Unasserted links take their least helpful state. Only "on"
    /// units contribute to cf, since only they lie on the firing path.
    fn expand(&mut self, node: NodeId, on: bool) -> Vec<Composed> {
        if let Some(done) = self.memo.get(&(node, on)) {
            return done.clone();
        }
        let links = self.incoming.get(&node).cloned().unwrap_or_default();
        let theta = self.net.bias(node);
        let base = if on {
            links.iter().filter(|l| l.1 < 0.0).map(|l| l.1).sum::<f64>() - theta
        } else {
            theta - links.iter().filter(|l| l.1 > 0.0).map(|l| l.1).sum::<f64>()
        };
        let mut candidates: Vec<(usize, f64)> = links.iter().copied().filter(|&(_, w)| self.th.is_strong(w)).collect();
        candidates.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)).then(a.1.total_cmp(&b.1)));
        let search = search_unit(&candidates, base, on, &self.cfg);
        if search.truncated {
            self.truncated_units += 1;
            log::warn!("subset search for unit {node:?} stopped at the budget of {}", self.cfg.subset_budget);
        }
        let weight_of: HashMap<usize, f64> = candidates.iter().copied().collect();
        let mut out = Vec::new();
        for cond in search.conditions {
            // A unit settled with nothing asserted adds no doubt.
            let cf = if on && !cond.literals.is_empty() {
                let asserted: Vec<f64> = cond.literals.iter().map(|(src, _)| weight_of[src]).collect();
                unit_confidence(&asserted, theta)
            } else {
                Some(1.0)
            };
            if node.layer() == 1 {
                let lits = cond
                    .literals
                    .iter()
                    .map(|&(a, state)| if state { Literal::pos(a) } else { Literal::neg(a) })
                    .collect();
                out.push((lits, cf));
                continue;
            }
            // Conjunction over the named hidden units: one condition each.
            let mut partial: Vec<Composed> = vec![(Vec::new(), cf)];
            for &(src, state) in &cond.literals {
                let sub = self.expand(NodeId(node.layer() - 1, src), state);
                let mut next = Vec::new();
                for (lits, cf) in &partial {
                    for (slits, scf) in &sub {
                        let mut merged = lits.clone();
                        merged.extend_from_slice(slits);
                        let joined = Conjunct::new(merged);
                        if joined.is_contradictory() {
                            continue;
                        }
                        let cf = match (cf, scf) {
                            (Some(a), Some(b)) => Some(a.min(*b)),
                            _ => None,
                        };
                        next.push((joined.literals().to_vec(), cf));
                    }
                }
                partial = next;
                if partial.len() > self.cfg.subset_budget {
                    self.truncated_units += 1;
                    log::warn!("rule composition at unit {node:?} truncated at {} conditions", self.cfg.subset_budget);
                    partial.truncate(self.cfg.subset_budget);
                }
            }
            out.extend(partial);
        }
        self.memo.insert((node, on), out.clone());
        out
    }
}

/// Extract rules from every output unit.
pub fn extract_rules(net: &ModularNetwork, th: &WeightThresholds, cfg: &ExtractionConfig) -> Result<RuleBase> {
    if cfg.max_antecedent == 0 {
        return Err(Error::Parameter("max_antecedent must be at least 1".into()));
    }
    if net.present_links() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let mut ex = Extractor::new(net, *th, *cfg);
    let out_layer = net.layers().len() - 1;
    let mut best: BTreeMap<(usize, Conjunct), f64> = BTreeMap::new();
    let mut discarded = 0;
    for (j, &class) in net.output_classes().iter().enumerate() {
        for (lits, cf) in ex.expand(NodeId(out_layer, j), true) {
            let antecedent = Conjunct::new(lits);
            if antecedent.is_empty() {
                log::debug!("dropping an unconditional rule for class {class}");
                continue;
            }
            let Some(cf) = cf else {
                discarded += 1;
                continue;
            };
            let slot = best.entry((class, antecedent)).or_insert(f64::NEG_INFINITY);
            *slot = slot.max(cf);
        }
    }
    // Absorb rules implied by a more general rule of the same class.
    let mut by_class: BTreeMap<usize, Vec<(Conjunct, f64)>> = BTreeMap::new();
    for ((class, a), cf) in best {
        by_class.entry(class).or_default().push((a, cf));
    }
    let mut rules = Vec::new();
    for (class, mut list) in by_class {
        list.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        let mut kept: Vec<(Conjunct, f64)> = Vec::new();
        for (a, cf) in list {
            if !kept.iter().any(|(k, _)| k.is_subset_of(&a)) {
                kept.push((a, cf));
            }
        }
        rules.extend(kept.into_iter().map(|(antecedent, cf)| ExtractedRule { class, antecedent, cf }));
    }
    rules.sort_by(|a, b| {
        b.cf.total_cmp(&a.cf)
            .then(a.class.cmp(&b.class))
            .then_with(|| a.antecedent.cmp(&b.antecedent))
    });
    let dropped = rules.len().saturating_sub(cfg.max_rules);
    if dropped > 0 {
        log::warn!("rule budget of {} reached; {dropped} lower-confidence rule(s) dropped", cfg.max_rules);
        rules.truncate(cfg.max_rules);
    }
    rules.sort_by(|a, b| {
        a.class
            .cmp(&b.class)
            .then(b.cf.total_cmp(&a.cf))
            .then_with(|| a.antecedent.cmp(&b.antecedent))
    });
    Ok(RuleBase {
        rules,
        truncated_units: ex.truncated_units,
        dropped_rules: dropped,
        discarded_nonpositive: discarded,
    })
}
