#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use social_assoc::geometry::Point;
use social_assoc::network::Network;
use social_assoc::social::{SocialGraph, SocialMatrices, SocialParams};
use social_assoc::wireless::{ChannelModel, NetworkTopology};

fn near(c: Point, radius: f64, rng: &mut ChaCha8Rng) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let a = std::f64::consts::TAU * rng.random::<f64>();
    Point::new(c.x + r * a.cos(), c.y + r * a.sin())
}

/// A single-cluster network with at most 8 UEs and 4 serving nodes. About
/// half of the ordinary UEs are dropped within D2D range of an important UE.
pub fn tiny_instance(seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_scbs = rng.random_range(1..=3usize);
    let n_imp = rng.random_range(1..=(4 - n_scbs).min(2));
    let n_ues = rng.random_range((n_imp + 2)..=8usize);
    let mut scbs = vec![Point::new(200.0, 200.0)];
    while scbs.len() < n_scbs {
        let p = near(Point::new(200.0, 200.0), 70.0, &mut rng);
        if scbs.iter().all(|s| s.distance(&p) >= 40.0) {
            scbs.push(p);
        }
    }
    let mut ues = Vec::new();
    for k in 0..n_ues {
        let p = if k >= n_imp && rng.random_bool(0.5) {
            let i = rng.random_range(0..n_imp);
            near(ues[i], 15.0, &mut rng)
        } else {
            near(scbs[rng.random_range(0..n_scbs)], 45.0, &mut rng)
        };
        ues.push(p);
    }
    let mut graph = SocialGraph::empty(n_ues);
    for u in 0..n_ues {
        for v in (u + 1)..n_ues {
            if rng.random_bool(0.6) {
                graph.add_edge(u, v).unwrap();
            }
        }
    }
    let topo = NetworkTopology::with_positions(scbs, ues);
    let social = SocialMatrices::compute(&graph, &topo.ue_positions, SocialParams::default()).unwrap();
    let probe = Network::new(topo.clone(), ChannelModel::default(), false, graph.clone(), social.clone(), &[]).unwrap();
    let important: Vec<(usize, usize)> = (0..n_imp).map(|i| (i, probe.anchors[i])).collect();
    Network::new(topo, ChannelModel::default(), false, graph, social, &important).unwrap()
}

/// Random graph on `n` vertices with edge probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> SocialGraph {
    let mut g = SocialGraph::empty(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}
