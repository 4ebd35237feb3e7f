use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{Link, ModularNetwork, ModuleTag, NodeId};

fn canonical(links: &mut [Link]) {
    links.sort_by_key(|l| (l.to, l.from));
}

/// Add an absent, zero-weight link for every adjacent-layer node pair not
/// yet joined, tagged with the destination's module.
pub fn with_candidate_links(net: &ModularNetwork) -> Result<ModularNetwork> {
    let existing: BTreeSet<(NodeId, NodeId)> = net.links().iter().map(|l| (l.from, l.to)).collect();
    let mut links = net.links().to_vec();
    let layers = net.layers();
    for h in 1..layers.len() {
        for j in 0..layers[h] {
            let to = NodeId(h, j);
            let tag = ModuleTag::Intra(net.owner(to).unwrap_or(0));
            for i in 0..layers[h - 1] {
                let from = NodeId(h - 1, i);
                if !existing.contains(&(from, to)) {
                    links.push(Link {
                        from,
                        to,
                        w: 0.0,
                        present: false,
                        tag,
                    });
                }
            }
        }
    }
    canonical(&mut links);
    ModularNetwork::new(
        layers.to_vec(),
        links,
        net.biases().to_vec(),
        net.owners().to_vec(),
        net.output_classes().to_vec(),
    )
}

/// Sub-networks joined side by side into one `classes`-output network.
#[derive(Debug, Clone)]
pub struct Concatenation {
    pub network: ModularNetwork,
    /// Sub-network index of every hidden node, `node_sub[h][j]`
    /// (`node_sub[0]` and the output layer are empty).
    pub node_sub: Vec<Vec<usize>>,
    /// Class of each sub-network.
    pub sub_class: Vec<usize>,
}

impl Concatenation {
    fn sub_of(&self, node: NodeId) -> Option<usize> {
        self.node_sub.get(node.layer()).and_then(|v| v.get(node.index())).copied()
    }

    /// Whether a link survives when only the sub-networks in `active` are
    /// switched on.
    pub fn link_active(&self, link: &Link, active: &[bool]) -> bool {
        [link.from, link.to]
            .iter()
            .all(|&n| self.sub_of(n).is_none_or(|s| active[s]))
    }
}

/// Stack single-output sub-networks of equal depth. Hidden layers are
/// concatenated; output nodes merge by class, one per class `1..=classes`.
/// Every pair of hidden/output nodes in adjacent layers belonging to
/// different classes is joined by a present inter-module link with weight
/// uniform in `[−inter_init, inter_init]`.
pub fn concatenate<R: Rng + ?Sized>(
    subs: &[ModularNetwork],
    classes: usize,
    inter_init: f64,
    rng: &mut R,
) -> Result<Concatenation> {
    let first = subs.first().ok_or(Error::EmptyNetwork)?;
    let depth = first.layers().len();
    let inputs = first.input_size();
    let sub_class: Vec<usize> = subs.iter().map(|s| s.output_classes()[0]).collect();
    for s in subs {
        if s.layers().len() != depth || s.input_size() != inputs || s.output_classes().len() != 1 {
            return Err(Error::Parameter(
                "sub-networks must share depth and inputs and have one output".into(),
            ));
        }
    }
    if let Some(c) = (1..=classes).find(|c| !sub_class.contains(c)) {
        return Err(Error::EmptyClass(c));
    }
    if let Some(&c) = sub_class.iter().find(|&&c| c == 0 || c > classes) {
        return Err(Error::Parameter(format!("sub-network class {c} outside 1..={classes}")));
    }
    let out = depth - 1;
    let mut layers = vec![inputs];
    let mut offsets = vec![vec![0usize; depth]; subs.len()];
    let mut node_sub: Vec<Vec<usize>> = vec![Vec::new(); depth];
    for h in 1..out {
        let mut total = 0;
        for (s, sub) in subs.iter().enumerate() {
            offsets[s][h] = total;
            total += sub.layers()[h];
            node_sub[h].extend(std::iter::repeat_n(s, sub.layers()[h]));
        }
        layers.push(total);
    }
    layers.push(classes);
    let map = |s: usize, n: NodeId| -> NodeId {
        match n.layer() {
            0 => n,
            h if h == out => NodeId(out, sub_class[s] - 1),
            h => NodeId(h, offsets[s][h] + n.index()),
        }
    };

    let mut biases: Vec<Vec<f64>> = layers
        .iter()
        .enumerate()
        .map(|(h, &n)| if h == 0 { Vec::new() } else { vec![0.0; n] })
        .collect();
    let mut owners: Vec<Vec<Option<usize>>> = layers
        .iter()
        .enumerate()
        .map(|(h, &n)| if h == 0 { Vec::new() } else { vec![None; n] })
        .collect();
    let mut links = Vec::new();
    for (s, sub) in subs.iter().enumerate() {
        for h in 1..depth {
            for j in 0..sub.layers()[h] {
                let node = map(s, NodeId(h, j));
                biases[h][node.index()] = sub.bias(NodeId(h, j));
                owners[h][node.index()] = Some(sub_class[s]);
            }
        }
        for l in sub.links() {
            links.push(Link {
                from: map(s, l.from),
                to: map(s, l.to),
                ..l.clone()
            });
        }
    }
    // Output nodes shared by several sub-networks of one class keep the
    // last writer's bias; encoded sub-networks all use the same value.
    let mut existing: BTreeSet<(NodeId, NodeId)> = links.iter().map(|l| (l.from, l.to)).collect();
    for h in 1..out {
        for i in 0..layers[h] {
            let from = NodeId(h, i);
            for j in 0..layers[h + 1] {
                let to = NodeId(h + 1, j);
                if owners[h][i] != owners[h + 1][j] && existing.insert((from, to)) {
                    links.push(Link {
                        from,
                        to,
                        w: rng.random_range(-inter_init..=inter_init),
                        present: true,
                        tag: ModuleTag::Inter,
                    });
                }
            }
        }
    }
    canonical(&mut links);
    let network = ModularNetwork::new(layers, links, biases, owners, (1..=classes).collect())?;
    Ok(Concatenation {
        network,
        node_sub,
        sub_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{encode_rules, EncodeOptions};
    use crate::rough::DependencyRuleSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn concatenated_network_is_modular() {
        let rules = DependencyRuleSet::parse_text("c1 <- L_1 | M_2\nc2 <- H_1\nc2 <- H_2 & !L_1\n").unwrap();
        let subs: Vec<ModularNetwork> = encode_rules(&rules, 2, EncodeOptions::default())
            .unwrap()
            .iter()
            .map(|s| with_candidate_links(s).unwrap())
            .collect();
        assert!(subs.iter().all(|s| s.links().len() == 6 * s.layers()[1] + s.layers()[1]));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cat = concatenate(&subs, 2, 0.1, &mut rng).unwrap();
        let net = &cat.network;
        assert_eq!(net.layers(), &[6, 4, 2]);
        assert_eq!(cat.node_sub[1], vec![0, 0, 1, 2]);
        for l in net.links() {
            match l.tag {
                ModuleTag::Inter => {
                    assert!(l.present && l.w.abs() <= 0.1);
                    assert_ne!(net.owner(l.from), net.owner(l.to));
                }
                ModuleTag::Intra(c) => assert_eq!(net.owner(l.to), Some(c)),
            }
        }
        // hidden→output: 4×2 possible, all joined.
        assert_eq!(net.links().len(), 6 * 4 + 4 * 2);
        // With every sub-network active, crisp behaviour matches the rules.
        let x = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        assert_eq!(net.forward(&x).unwrap().winner(), 2);
    }

    #[test]
    fn missing_class_is_an_error() {
        let rules = DependencyRuleSet::parse_text("c2 <- H_1\n").unwrap();
        let subs = encode_rules(&rules, 1, EncodeOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(concatenate(&subs, 2, 0.1, &mut rng), Err(Error::EmptyClass(1))));
    }
}
