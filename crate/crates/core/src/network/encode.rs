use super::{Link, ModularNetwork, ModuleTag, NodeId};
use crate::error::{Error, Result};
use crate::rough::{DependencyRule, DependencyRuleSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Insert an OR layer (one node per rule) between the conjunct layer and
    /// the output.
    pub second_hidden_layer: bool,
}

/// Link magnitude that keeps an OR over `k` conjunct nodes logically exact
/// on crisp inputs: with every conjunct node off, `k·σ(−W/2) < 1/2` must
/// hold, which needs `W > 2·ln(2k − 1)`. Gives 2 for a single conjunct.
pub fn rule_weight(max_conjuncts: usize) -> f64 {
    let k = max_conjuncts.max(1) as f64;
    2.0 * ((2.0 * k - 1.0).ln() + 1.0)
}

/// One sub-network per dependency rule.
///
/// Each conjunct becomes a hidden node fed by its literals (`+W`, or `−W`
/// when negated) with threshold `W·(P − 1/2)` for `P` plain literals, so it
/// fires exactly when the conjunct holds on crisp inputs. The conjunct nodes
/// join at the rule's class output with weight `W` and threshold `W/2`.
/// `W` is shared by all rules in the set.
pub fn encode_rules(
    rules: &DependencyRuleSet,
    features: usize,
    options: EncodeOptions,
) -> Result<Vec<ModularNetwork>> {
    let k_max = rules.rules.iter().map(|r| r.formula.conjuncts().len()).max().unwrap_or(1);
    let w = rule_weight(k_max);
    rules
        .rules
        .iter()
        .map(|r| encode_one(r, 3 * features, w, options))
        .collect()
}

fn encode_one(rule: &DependencyRule, inputs: usize, w: f64, options: EncodeOptions) -> Result<ModularNetwork> {
    let conjuncts = rule.formula.conjuncts();
    if conjuncts.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let class = rule.class;
    let tag = ModuleTag::Intra(class);
    let k = conjuncts.len();
    let mut links = Vec::new();
    let mut hidden_bias = Vec::with_capacity(k);
    for (j, c) in conjuncts.iter().enumerate() {
        let mut plain = 0usize;
        for lit in c.literals() {
            if lit.attribute >= inputs {
                return Err(Error::Encoding {
                    index: lit.attribute,
                    available: inputs,
                });
            }
            if !lit.negated {
                plain += 1;
            }
            links.push(Link {
                from: NodeId(0, lit.attribute),
                to: NodeId(1, j),
                w: if lit.negated { -w } else { w },
                present: true,
                tag,
            });
        }
        hidden_bias.push(w * (plain as f64 - 0.5));
    }
    for j in 0..k {
        links.push(Link {
            from: NodeId(1, j),
            to: NodeId(2, 0),
            w,
            present: true,
            tag,
        });
    }
    let mut layers = vec![inputs, k, 1];
    let mut biases = vec![Vec::new(), hidden_bias, vec![w / 2.0]];
    if options.second_hidden_layer {
        links.push(Link {
            from: NodeId(2, 0),
            to: NodeId(3, 0),
            w,
            present: true,
            tag,
        });
        layers.push(1);
        biases.push(vec![w / 2.0]);
    }
    let owners = layers
        .iter()
        .enumerate()
        .map(|(h, &n)| if h == 0 { Vec::new() } else { vec![Some(class); n] })
        .collect();
    ModularNetwork::new(layers, links, biases, owners, vec![class])
}
