//! Encode dependency rules into a network, check it on crisp inputs, then
//! refine it by back-propagation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rufmine::evolution::concatenate;
use rufmine::network::{backprop_train, encode_rules, EncodeOptions, TrainConfig};
use rufmine::rough::DependencyRuleSet;

fn main() -> rufmine::Result<()> {
    let rules = DependencyRuleSet::parse_text("c1 <- (L_1 & M_2) | H_1\nc2 <- !L_1 & H_2\n")?;
    let subs = encode_rules(&rules, 2, EncodeOptions::default())?;
    let net = concatenate(&subs, 2, 0.0, &mut ChaCha8Rng::seed_from_u64(0))?.network;
    println!("layers {:?}, {} present links", net.layers(), net.present_links());
    let c = net.compile();
    let mut inputs = Vec::new();
    for bits in 0..64u32 {
        let x: Vec<f64> = (0..6).map(|i| f64::from((bits >> i) & 1)).collect();
        let y = c.output(&x);
        let expect = [rules.rules[0].formula.holds(&x, 0.5), rules.rules[1].formula.holds(&x, 0.5)];
        assert_eq!([y[0] > 0.5, y[1] > 0.5], expect, "input {x:?}");
        inputs.push(x);
    }
    println!("truth table reproduced on all 64 crisp inputs");
    let targets: Vec<Vec<f64>> = inputs.iter().map(|x| c.output(x).iter().map(|&v| v.round()).collect()).collect();
    let out = backprop_train(&net, &inputs, &targets, &TrainConfig { epochs: 200, ..TrainConfig::default() })?;
    println!("loss {:.5} -> {:.5}", out.losses[0], out.losses.last().unwrap());
    Ok(())
}
