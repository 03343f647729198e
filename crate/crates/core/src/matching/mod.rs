//! Per-cluster many-to-one matching between UEs and serving nodes.
//!
//! Utilities carry externalities: a UE's rate depends on how many UEs share
//! its SCBS and on which important UEs are broadcasting, so every welfare
//! figure is recomputed from a full [`Association`].

mod anneal;
mod brute;
mod stability;
mod swap;

pub use anneal::{
    run_cluster_matching, swap_accept_probability, temperature, AnnealSchedule, ClusterRun,
    LemmaStats, PtSign, TraceRow,
};
pub use brute::{brute_force_optimum, MAX_ORACLE_NODES, MAX_ORACLE_UES};
pub use stability::{approved_swap, check_lemma1, is_pairwise_stable, PlayerPayoffs, StabilityReport};
pub use swap::{apply_move, apply_swap, Proposal, Rejection};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Association, Network, ServingNode};

/// Relative tolerance under which two utilities count as equal.
pub const UTILITY_REL_TOL: f64 = 1e-9;

pub(crate) fn strictly_greater(new: f64, old: f64) -> bool {
    new - old > UTILITY_REL_TOL * new.abs().max(old.abs())
}

/// SCBSs, UEs and serving nodes of one cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterView {
    pub id: usize,
    pub scbs: Vec<usize>,
    pub ues: Vec<usize>,
    pub nodes: Vec<ServingNode>,
}

impl ClusterView {
    /// `scbs` plus every UE homed on one of them; important UEs homed here
    /// become serving nodes.
    pub fn new(net: &Network, id: usize, scbs: Vec<usize>) -> Self {
        let ues: Vec<usize> = (0..net.n_ues())
            .filter(|&m| scbs.contains(&home_scbs(net, m)))
            .collect();
        let nodes = scbs
            .iter()
            .map(|&n| ServingNode::Scbs(n))
            .chain(
                ues.iter()
                    .filter(|&&m| net.is_important(m))
                    .map(|&m| ServingNode::Important(m)),
            )
            .collect();
        ClusterView { id, scbs, ues, nodes }
    }

    pub fn whole_network(net: &Network) -> Self {
        ClusterView::new(net, 0, (0..net.n_scbs()).collect())
    }

    pub fn contains_node(&self, node: ServingNode) -> bool {
        self.nodes.contains(&node)
    }

    pub fn can_serve(&self, net: &Network, node: ServingNode, m: usize) -> bool {
        self.contains_node(node) && net.can_serve(node, m)
    }

    pub fn feasible_nodes(&self, net: &Network, m: usize) -> Vec<ServingNode> {
        self.nodes
            .iter()
            .copied()
            .filter(|&p| net.can_serve(p, m))
            .collect()
    }

    /// UEs whose serving node may change.
    pub fn movable(&self, net: &Network) -> Vec<usize> {
        self.ues.iter().copied().filter(|&m| !net.is_important(m)).collect()
    }

    pub fn check(&self, net: &Network, assoc: &Association) -> Result<()> {
        for &m in &self.ues {
            if !self.can_serve(net, assoc.node(m), m) {
                return Err(Error::Invariant(format!(
                    "cluster {}: UE {m} on infeasible node {}",
                    self.id,
                    assoc.node(m)
                )));
            }
        }
        Ok(())
    }
}

/// The SCBS that decides a UE's cluster: its own SCBS for important UEs,
/// the anchor otherwise.
pub fn home_scbs(net: &Network, m: usize) -> usize {
    net.important_of[m].unwrap_or(net.anchors[m])
}

/// Utility of UE `m` under `assoc`.
pub fn ue_utility(net: &Network, assoc: &Association, m: usize) -> f64 {
    let state = net.link_state(assoc);
    net.ue_utility(assoc, &state, m)
}

/// Sum of the utilities of the UEs `node` serves.
pub fn sn_utility(net: &Network, assoc: &Association, node: ServingNode) -> f64 {
    let state = net.link_state(assoc);
    assoc
        .served_by(node)
        .into_iter()
        .map(|m| net.ue_utility(assoc, &state, m))
        .sum()
}

pub fn cluster_welfare(net: &Network, assoc: &Association, cluster: &ClusterView) -> f64 {
    net.welfare_of(assoc, &cluster.ues)
}

pub fn network_welfare(net: &Network, assoc: &Association, clusters: &[ClusterView]) -> f64 {
    clusters.iter().map(|c| cluster_welfare(net, assoc, c)).sum()
}

/// Whether UE `m` strictly prefers `(p, with_p)` to `(q, with_q)`.
pub fn prefers(
    net: &Network,
    m: usize,
    (p, with_p): (ServingNode, &Association),
    (q, with_q): (ServingNode, &Association),
) -> Result<bool> {
    if with_p.node(m) != p || with_q.node(m) != q {
        return Err(Error::domain(format!(
            "UE {m} is not on the compared serving nodes"
        )));
    }
    Ok(strictly_greater(ue_utility(net, with_p, m), ue_utility(net, with_q, m)))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::geometry::Point;
    use crate::network::Network;
    use crate::social::{SocialGraph, SocialMatrices, SocialParams};
    use crate::wireless::{ChannelModel, NetworkTopology};

    /// Two SCBSs 60 m apart; UE 0 important on SCBS 0 with tied UEs 1, 2.
    pub fn two_cell() -> Network {
        let topo = NetworkTopology::with_positions(
            vec![Point::new(100.0, 100.0), Point::new(160.0, 100.0)],
            vec![
                Point::new(115.0, 110.0),
                Point::new(125.0, 112.0),
                Point::new(118.0, 122.0),
                Point::new(150.0, 95.0),
                Point::new(140.0, 104.0),
                Point::new(95.0, 90.0),
            ],
        );
        let graph = SocialGraph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (0, 4), (3, 4)]).unwrap();
        let social = SocialMatrices::compute(&graph, &topo.ue_positions, SocialParams::default()).unwrap();
        Network::new(topo, ChannelModel::default(), false, graph, social, &[(0, 0)]).unwrap()
    }
}
