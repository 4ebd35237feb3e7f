//! Extract weighted rules from a freshly encoded network and check they
//! match the rules that were planted.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rufmine::evolution::concatenate;
use rufmine::extract::{compute_thresholds, extract_rules, ExtractionConfig};
use rufmine::network::{encode_rules, EncodeOptions};
use rufmine::rough::DependencyRuleSet;

fn main() -> rufmine::Result<()> {
    let planted = DependencyRuleSet::parse_text("c1 <- (L_1 & M_2) | H_3\nc2 <- (H_1 & !L_2)\nc3 <- M_1 & M_3\n")?;
    let subs = encode_rules(&planted, 3, EncodeOptions::default())?;
    let net = concatenate(&subs, 3, 0.0, &mut ChaCha8Rng::seed_from_u64(1))?.network;
    let th = compute_thresholds(&net)?;
    println!("PMean {:?}, PThreshold1 {:?}, NThreshold1 {:?}", th.p_mean, th.p_threshold1, th.n_threshold1);
    let rules = extract_rules(&net, &th, &ExtractionConfig::default())?;
    print!("{}", rules.to_text());
    Ok(())
}
