use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use super::scenario::{build_network, Scenario};
use crate::error::Result;
use crate::network::{Association, Network, ServingNode, SlotMode};
use crate::social::SocialMatrices;

/// Every UE on its max-RSSI SCBS, one cellular slot for the whole frame.
pub fn baseline_max_rssi(net: &Network) -> (Association, Vec<f64>) {
    let assoc = Association::new(net.anchors.iter().map(|&n| ServingNode::Scbs(n)).collect());
    let rates = rates(net, &assoc, SlotMode::SingleSlot);
    (assoc, rates)
}

/// Random important UEs (one per SCBS among the UEs anchored to it) and a
/// uniformly random serving node per UE among the SCBSs covering it and the
/// important UEs within D2D range. A UE with no node in range falls back
/// to its max-RSSI SCBS.
pub fn baseline_random(
    cfg: &ScenarioConfig,
    scenario: &Scenario,
    social: SocialMatrices,
    seed: u64,
) -> Result<(Network, Association, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topo = &scenario.topology;
    let mut important = Vec::new();
    for n in 0..topo.n_scbs() {
        let anchored: Vec<usize> = (0..topo.n_ues()).filter(|&m| scenario.anchors[m] == n).collect();
        if !anchored.is_empty() {
            important.push((anchored[rng.random_range(0..anchored.len())], n));
        }
    }
    let net = build_network(cfg, scenario, social, &important)?;
    let serving = (0..topo.n_ues())
        .map(|m| {
            if let Some(n) = net.important_of[m] {
                return ServingNode::Scbs(n);
            }
            let options: Vec<ServingNode> = (0..topo.n_scbs())
                .filter(|&n| topo.scbs_ue_distance(n, m) <= topo.scbs_radius_m)
                .map(ServingNode::Scbs)
                .chain(
                    important
                        .iter()
                        .filter(|&&(i, _)| topo.ue_distance(i, m) <= topo.d2d_radius_m)
                        .map(|&(i, _)| ServingNode::Important(i)),
                )
                .collect();
            if options.is_empty() {
                ServingNode::Scbs(net.anchors[m])
            } else {
                options[rng.random_range(0..options.len())]
            }
        })
        .collect();
    let assoc = Association::new(serving);
    let rates = rates(&net, &assoc, SlotMode::TwoSlot);
    Ok((net, assoc, rates))
}

/// Delivered throughput of every UE.
pub fn rates(net: &Network, assoc: &Association, mode: SlotMode) -> Vec<f64> {
    let state = net.link_state(assoc);
    (0..net.n_ues()).map(|m| net.ue_rate(assoc, &state, m, mode)).collect()
}
