//! Layered feed-forward network with sparse, module-tagged links.
//!
//! A node's activation is `sigmoid(Σ w_ji y_i − θ_j)` over its present
//! incoming links, where `θ_j` is the node's bias (threshold). Links only
//! join adjacent layers.

mod encode;
mod train;

pub use encode::{encode_rules, rule_weight, EncodeOptions};
pub use train::{backprop_train, loss_and_gradient, objective, Gradient, TrainConfig, TrainOutcome};

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(layer, index within layer)`; serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize, pub usize);

impl NodeId {
    pub fn layer(self) -> usize {
        self.0
    }
    pub fn index(self) -> usize {
        self.1
    }
}

/// Which module a link belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuleTag {
    /// Inside the sub-network of the given class.
    Intra(usize),
    /// Between sub-networks of different classes.
    Inter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    pub w: f64,
    pub present: bool,
    pub tag: ModuleTag,
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// The network. Layer 0 is the input layer; the last layer holds one node
/// per entry of `output_classes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularNetwork {
    layers: Vec<usize>,
    links: Vec<Link>,
    /// `biases[h][j]`; `biases[0]` is empty.
    biases: Vec<Vec<f64>>,
    /// Owning class of each non-input node (`owners[0]` is empty).
    owners: Vec<Vec<Option<usize>>>,
    /// Class label (1-based) of each output node.
    output_classes: Vec<usize>,
}

/// Activations of the output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkOutput {
    pub activations: Vec<f64>,
    /// Class label per output node.
    pub classes: Vec<usize>,
}

impl NetworkOutput {
    /// Class of the largest activation; ties go to the earlier node.
    pub fn winner(&self) -> usize {
        let mut best = 0;
        for (i, &a) in self.activations.iter().enumerate() {
            if a > self.activations[best] {
                best = i;
            }
        }
        self.classes[best]
    }

    /// No output node is above one half.
    pub fn is_unclassifiable(&self) -> bool {
        self.activations.iter().all(|&a| a <= 0.5)
    }
}

impl ModularNetwork {
    pub fn new(
        layers: Vec<usize>,
        links: Vec<Link>,
        biases: Vec<Vec<f64>>,
        owners: Vec<Vec<Option<usize>>>,
        output_classes: Vec<usize>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::Parameter(format!("invalid network: {msg}")));
        if layers.len() < 2 || layers.contains(&0) {
            return bad(format!("layer sizes {layers:?}"));
        }
        if biases.len() != layers.len() || owners.len() != layers.len() {
            return bad("bias/owner tables do not match the layers".into());
        }
        for h in 1..layers.len() {
            if biases[h].len() != layers[h] || owners[h].len() != layers[h] {
                return bad(format!("layer {h} has wrong bias/owner count"));
            }
        }
        if output_classes.len() != *layers.last().unwrap() {
            return bad("output_classes length differs from output layer".into());
        }
        let mut seen = std::collections::HashSet::new();
        for l in &links {
            if l.to.layer() != l.from.layer() + 1
                || l.to.layer() >= layers.len()
                || l.from.index() >= layers[l.from.layer()]
                || l.to.index() >= layers[l.to.layer()]
            {
                return bad(format!("link {:?} -> {:?} is out of range", l.from, l.to));
            }
            if !seen.insert((l.from, l.to)) {
                return bad(format!("duplicate link {:?} -> {:?}", l.from, l.to));
            }
            if l.tag == ModuleTag::Inter {
                let a = owners.get(l.from.layer()).and_then(|o| o.get(l.from.index())).copied().flatten();
                let b = owners[l.to.layer()][l.to.index()];
                if a.is_none() || a == b {
                    return bad(format!(
                        "inter-module link {:?} -> {:?} does not join two modules",
                        l.from, l.to
                    ));
                }
            }
        }
        Ok(Self {
            layers,
            links,
            biases,
            owners,
            output_classes,
        })
    }

    /// Fully connected network with the given initial weights per link and
    /// zero biases. Nodes are unowned and links tagged `Intra(0)`.
    pub fn dense(layers: Vec<usize>, output_classes: Vec<usize>, mut init: impl FnMut() -> f64) -> Result<Self> {
        let mut links = Vec::new();
        for h in 1..layers.len() {
            for j in 0..layers[h] {
                for i in 0..layers[h - 1] {
                    links.push(Link {
                        from: NodeId(h - 1, i),
                        to: NodeId(h, j),
                        w: init(),
                        present: true,
                        tag: ModuleTag::Intra(0),
                    });
                }
            }
        }
        let biases = layers
            .iter()
            .enumerate()
            .map(|(h, &n)| if h == 0 { Vec::new() } else { vec![0.0; n] })
            .collect();
        let owners = layers
            .iter()
            .enumerate()
            .map(|(h, &n)| if h == 0 { Vec::new() } else { vec![None; n] })
            .collect();
        Self::new(layers, links, biases, owners, output_classes)
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn input_size(&self) -> usize {
        self.layers[0]
    }

    pub fn output_classes(&self) -> &[usize] {
        &self.output_classes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn links_mut(&mut self) -> &mut [Link] {
        &mut self.links
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn bias(&self, node: NodeId) -> f64 {
        self.biases[node.layer()][node.index()]
    }

    pub fn set_bias(&mut self, node: NodeId, value: f64) {
        self.biases[node.layer()][node.index()] = value;
    }

    pub fn owner(&self, node: NodeId) -> Option<usize> {
        self.owners[node.layer()].get(node.index()).copied().flatten()
    }

    pub fn owners(&self) -> &[Vec<Option<usize>>] {
        &self.owners
    }

    pub fn present_links(&self) -> usize {
        self.links.iter().filter(|l| l.present).count()
    }

    /// Dense per-layer weight matrices; absent links are zero.
    pub fn compile(&self) -> CompiledNetwork {
        let mut weights: Vec<Vec<Vec<f64>>> = (0..self.layers.len())
            .map(|h| {
                if h == 0 {
                    Vec::new()
                } else {
                    vec![vec![0.0; self.layers[h - 1]]; self.layers[h]]
                }
            })
            .collect();
        for l in self.links.iter().filter(|l| l.present) {
            weights[l.to.layer()][l.to.index()][l.from.index()] = l.w;
        }
        CompiledNetwork {
            weights,
            biases: self.biases.clone(),
        }
    }

    pub fn forward(&self, input: &[f64]) -> Result<NetworkOutput> {
        if input.len() != self.input_size() {
            return Err(Error::Dimension {
                expected: self.input_size(),
                actual: input.len(),
            });
        }
        Ok(NetworkOutput {
            activations: self.compile().output(input),
            classes: self.output_classes.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ModularNetwork = serde_json::from_str(text)?;
        Self::new(raw.layers, raw.links, raw.biases, raw.owners, raw.output_classes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Dense snapshot of a network, for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledNetwork {
    /// `weights[h][j][i]`: from node `i` of layer `h-1` to node `j` of layer `h`.
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
}

impl CompiledNetwork {
    /// Activations of every layer, input included.
    pub fn activations(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.weights.len());
        acts.push(input.to_vec());
        for h in 1..self.weights.len() {
            let prev = &acts[h - 1];
            let layer: Vec<f64> = self.weights[h]
                .iter()
                .zip(&self.biases[h])
                .map(|(row, &theta)| {
                    let net: f64 = row.iter().zip(prev).map(|(w, y)| w * y).sum();
                    sigmoid(net - theta)
                })
                .collect();
            acts.push(layer);
        }
        acts
    }

    pub fn output(&self, input: &[f64]) -> Vec<f64> {
        self.activations(input).pop().unwrap_or_default()
    }

    /// Index of the winning output node.
    pub fn winner_index(&self, input: &[f64]) -> usize {
        let out = self.output(input);
        let mut best = 0;
        for (i, &a) in out.iter().enumerate() {
            if a > out[best] {
                best = i;
            }
        }
        best
    }
}
