use serde::{Deserialize, Serialize};

use super::ModularNetwork;
use crate::error::{Error, Result};

/// Full-batch gradient descent settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Coefficient of the `½·decay·Σw²` penalty.
    pub decay: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            learning_rate: 0.5,
            decay: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: ModularNetwork,
    /// Objective before each epoch's update.
    pub losses: Vec<f64>,
}

/// Derivatives of the objective. `links[i]` matches `network.links()[i]`
/// and is zero for absent links.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub links: Vec<f64>,
    pub biases: Vec<Vec<f64>>,
}

fn check_data(net: &ModularNetwork, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<()> {
    if inputs.len() != targets.len() {
        return Err(Error::Dimension {
            expected: inputs.len(),
            actual: targets.len(),
        });
    }
    if inputs.is_empty() {
        return Err(Error::EmptyTable("no training patterns".into()));
    }
    let outs = *net.layers().last().unwrap();
    for (x, t) in inputs.iter().zip(targets) {
        if x.len() != net.input_size() {
            return Err(Error::Dimension {
                expected: net.input_size(),
                actual: x.len(),
            });
        }
        if t.len() != outs {
            return Err(Error::Dimension {
                expected: outs,
                actual: t.len(),
            });
        }
    }
    Ok(())
}

fn penalty(net: &ModularNetwork, decay: f64) -> f64 {
    0.5 * decay * net.links().iter().filter(|l| l.present).map(|l| l.w * l.w).sum::<f64>()
}

/// Mean squared-error objective `mean_p ½Σ(y − t)² + ½·decay·Σw²`.
pub fn objective(net: &ModularNetwork, inputs: &[Vec<f64>], targets: &[Vec<f64>], decay: f64) -> Result<f64> {
    check_data(net, inputs, targets)?;
    let c = net.compile();
    let sse: f64 = inputs
        .iter()
        .zip(targets)
        .map(|(x, t)| c.output(x).iter().zip(t).map(|(y, t)| 0.5 * (y - t).powi(2)).sum::<f64>())
        .sum();
    Ok(sse / inputs.len() as f64 + penalty(net, decay))
}

/// Objective and its exact gradient by back-propagation.
pub fn loss_and_gradient(
    net: &ModularNetwork,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    decay: f64,
) -> Result<(f64, Gradient)> {
    check_data(net, inputs, targets)?;
    let c = net.compile();
    let depth = net.layers().len();
    let mut gw: Vec<Vec<Vec<f64>>> = c
        .weights
        .iter()
        .map(|m| m.iter().map(|row| vec![0.0; row.len()]).collect())
        .collect();
    let mut gb: Vec<Vec<f64>> = c.biases.iter().map(|b| vec![0.0; b.len()]).collect();
    let mut sse = 0.0;
    for (x, t) in inputs.iter().zip(targets) {
        let acts = c.activations(x);
        let out = &acts[depth - 1];
        let mut delta: Vec<f64> = out
            .iter()
            .zip(t)
            .map(|(&y, &t)| {
                sse += 0.5 * (y - t).powi(2);
                (y - t) * y * (1.0 - y)
            })
            .collect();
        for h in (1..depth).rev() {
            let prev = &acts[h - 1];
            for (j, &d) in delta.iter().enumerate() {
                gb[h][j] -= d;
                for (g, &y) in gw[h][j].iter_mut().zip(prev) {
                    *g += d * y;
                }
            }
            if h > 1 {
                delta = (0..prev.len())
                    .map(|i| {
                        let back: f64 = delta.iter().enumerate().map(|(j, &d)| d * c.weights[h][j][i]).sum();
                        back * prev[i] * (1.0 - prev[i])
                    })
                    .collect();
            }
        }
    }
    let p = inputs.len() as f64;
    let links = net
        .links()
        .iter()
        .map(|l| {
            if l.present {
                gw[l.to.layer()][l.to.index()][l.from.index()] / p + decay * l.w
            } else {
                0.0
            }
        })
        .collect();
    for b in gb.iter_mut().flatten() {
        *b /= p;
    }
    Ok((sse / p + penalty(net, decay), Gradient { links, biases: gb }))
}

/// Gradient descent on present links and all biases. Absent links stay
/// absent.
pub fn backprop_train(
    net: &ModularNetwork,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) || config.decay < 0.0 {
        return Err(Error::Parameter(format!(
            "learning rate must be positive and decay non-negative, got {} and {}",
            config.learning_rate, config.decay
        )));
    }
    let mut net = net.clone();
    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let (loss, grad) = loss_and_gradient(&net, inputs, targets, config.decay)?;
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        losses.push(loss);
        for (l, g) in net.links_mut().iter_mut().zip(&grad.links) {
            if l.present {
                l.w -= config.learning_rate * g;
            }
        }
        for (h, layer) in grad.biases.iter().enumerate() {
            for (j, g) in layer.iter().enumerate() {
                let node = super::NodeId(h, j);
                let b = net.bias(node);
                net.set_bias(node, b - config.learning_rate * g);
            }
        }
        if net.links().iter().any(|l| !l.w.is_finite()) {
            return Err(Error::Divergence { epoch });
        }
    }
    Ok(TrainOutcome { network: net, losses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NodeId;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_net(layers: Vec<usize>, seed: u64) -> ModularNetwork {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let classes = (1..=*layers.last().unwrap()).collect();
        let mut net = ModularNetwork::dense(layers.clone(), classes, || rng.random_range(-1.0..1.0)).unwrap();
        for h in 1..layers.len() {
            for j in 0..layers[h] {
                net.set_bias(NodeId(h, j), rng.random_range(-0.5..0.5));
            }
        }
        net.links_mut()[1].present = false;
        net
    }

    fn data(seed: u64, n: usize, d: usize, o: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = (0..n).map(|_| (0..d).map(|_| rng.random()).collect()).collect();
        let ts = (0..n).map(|_| (0..o).map(|_| rng.random()).collect()).collect();
        (xs, ts)
    }

    #[test]
    fn gradient_matches_central_differences() {
        let net = random_net(vec![4, 3, 3, 2], 7);
        let (xs, ts) = data(8, 5, 4, 2);
        let decay = 1e-3;
        let (_, g) = loss_and_gradient(&net, &xs, &ts, decay).unwrap();
        let eps = 1e-6;
        for i in 0..net.links().len() {
            let mut plus = net.clone();
            let mut minus = net.clone();
            plus.links_mut()[i].w += eps;
            minus.links_mut()[i].w -= eps;
            let fd = (objective(&plus, &xs, &ts, decay).unwrap() - objective(&minus, &xs, &ts, decay).unwrap())
                / (2.0 * eps);
            let expect = if net.links()[i].present { fd } else { 0.0 };
            assert!((g.links[i] - expect).abs() < 1e-7, "link {i}: {} vs {expect}", g.links[i]);
        }
        for h in 1..net.layers().len() {
            for j in 0..net.layers()[h] {
                let node = NodeId(h, j);
                let mut plus = net.clone();
                let mut minus = net.clone();
                plus.set_bias(node, net.bias(node) + eps);
                minus.set_bias(node, net.bias(node) - eps);
                let fd = (objective(&plus, &xs, &ts, decay).unwrap()
                    - objective(&minus, &xs, &ts, decay).unwrap())
                    / (2.0 * eps);
                assert!((g.biases[h][j] - fd).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn training_reduces_loss_and_keeps_absent_links() {
        let net = random_net(vec![2, 4, 1], 3);
        let xs = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let ts = vec![vec![0.0], vec![1.0], vec![1.0], vec![1.0]];
        let out = backprop_train(&net, &xs, &ts, &TrainConfig::default()).unwrap();
        assert!(out.losses.last().unwrap() < &(out.losses[0] * 0.5));
        assert!(!out.network.links()[1].present);
        assert_eq!(out.network.links()[1].w, net.links()[1].w);
    }

    #[test]
    fn divergence_is_reported() {
        let net = random_net(vec![2, 2, 1], 1);
        let xs = vec![vec![0.5, 0.5]];
        let ts = vec![vec![1.0]];
        let cfg = TrainConfig {
            epochs: 50,
            learning_rate: 1e300,
            decay: 1.0,
        };
        assert!(matches!(backprop_train(&net, &xs, &ts, &cfg), Err(Error::Divergence { .. })));
    }
}
