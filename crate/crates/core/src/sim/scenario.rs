use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ScenarioConfig, UePlacement};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::Network;
use crate::social::{elect_important, generate_social_graph, Election, SocialGraph, SocialMatrices};
use crate::wireless::{ChannelModel, NetworkTopology, RadioMap};

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent RNG stream seed for one `(run, step, cluster, purpose)`.
pub fn stream_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ mix(p)))
}

/// A dropped deployment before any important UE is chosen.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub topology: NetworkTopology,
    pub channel: ChannelModel,
    pub graph: SocialGraph,
    /// Max-RSSI SCBS of every UE.
    pub anchors: Vec<usize>,
}

fn place_scbs(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
    let side = cfg.area_side_m;
    let mut sites: Vec<Point> = Vec::with_capacity(cfg.n_scbs);
    for _ in 0..cfg.n_scbs {
        let mut placed = false;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = Point::new(rng.random_range(0.0..=side), rng.random_range(0.0..=side));
            if sites.iter().all(|s| s.distance(&p) >= cfg.inter_site_min_m) {
                sites.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::config(format!(
                "could not place {} SCBSs {} m apart in a {side} m square; enlarge area_side_m",
                cfg.n_scbs, cfg.inter_site_min_m
            )));
        }
    }
    Ok(sites)
}

/// Uniform point in the part of the disc that lies inside the square.
fn point_in_disc(center: &Point, radius: f64, side: f64, rng: &mut ChaCha8Rng) -> Point {
    loop {
        let r = radius * rng.random::<f64>().sqrt();
        let a = TAU * rng.random::<f64>();
        let p = Point::new(center.x + r * a.cos(), center.y + r * a.sin());
        if (0.0..=side).contains(&p.x) && (0.0..=side).contains(&p.y) {
            return p;
        }
    }
}

/// Drops SCBSs and UEs, draws the social graph and fixes the anchors.
pub fn generate_scenario(cfg: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, &[0]));
    let scbs = place_scbs(cfg, &mut rng)?;
    let ues: Vec<Point> = match cfg.ue_placement {
        UePlacement::PerCellDisc => scbs
            .iter()
            .flat_map(|c| (0..cfg.ues_per_scbs).map(|_| *c).collect::<Vec<_>>())
            .map(|c| point_in_disc(&c, cfg.scbs_radius_m, cfg.area_side_m, &mut rng))
            .collect(),
        UePlacement::UniformArea => (0..cfg.n_ues())
            .map(|_| {
                Point::new(
                    rng.random_range(0.0..=cfg.area_side_m),
                    rng.random_range(0.0..=cfg.area_side_m),
                )
            })
            .collect(),
    };
    let topology = cfg.topology(scbs, ues);
    topology.validate()?;
    let channel = cfg.channel();
    let graph = generate_social_graph(cfg.n_ues(), cfg.social_model(), stream_seed(seed, &[1]))?;
    let radio = RadioMap::new(&topology, &channel);
    let anchors = (0..topology.n_ues())
        .map(|m| radio.max_rssi_scbs(m).expect("at least one SCBS"))
        .collect();
    Ok(Scenario {
        topology,
        channel,
        graph,
        anchors,
    })
}

/// Social matrices plus the elected important UEs of each SCBS. Candidates
/// of an SCBS are the UEs anchored to it inside its coverage radius.
pub fn elect_all(cfg: &ScenarioConfig, scenario: &Scenario) -> Result<(SocialMatrices, Vec<Election>)> {
    let social = SocialMatrices::compute(
        &scenario.graph,
        &scenario.topology.ue_positions,
        cfg.social_params(),
    )?;
    let elections = (0..scenario.topology.n_scbs())
        .map(|n| {
            let eligible: Vec<bool> = scenario.anchors.iter().map(|&a| a == n).collect();
            elect_important(
                &social.cost,
                n,
                &scenario.topology,
                Some(&eligible),
                cfg.important_per_scbs,
            )
        })
        .collect();
    Ok((social, elections))
}

/// Assembles the network for a given set of `(ue, scbs)` important UEs.
pub fn build_network(
    cfg: &ScenarioConfig,
    scenario: &Scenario,
    social: SocialMatrices,
    important: &[(usize, usize)],
) -> Result<Network> {
    Network::new(
        scenario.topology.clone(),
        scenario.channel,
        cfg.power_split,
        scenario.graph.clone(),
        social,
        important,
    )
}

/// `(ue, scbs)` pairs from a list of elections.
pub fn important_pairs(elections: &[Election]) -> Vec<(usize, usize)> {
    elections
        .iter()
        .flat_map(|e| e.elected.iter().map(move |&m| (m, e.scbs)))
        .collect()
}
