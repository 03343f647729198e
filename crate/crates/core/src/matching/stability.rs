use serde::{Deserialize, Serialize};

use super::{cluster_welfare, sn_utility, strictly_greater, swap::Proposal, ue_utility, ClusterView};
use crate::network::{Association, Network, ServingNode};

/// Payoffs of everyone a proposal touches: the moving UEs and the serving
/// nodes they leave or join. An important-UE node counts twice, once for
/// the members it serves and once for its own utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerPayoffs {
    pub ues: Vec<(usize, f64)>,
    pub nodes: Vec<(ServingNode, f64)>,
    pub relay_own: Vec<(usize, f64)>,
}

impl PlayerPayoffs {
    pub fn of(net: &Network, assoc: &Association, ues: &[usize], nodes: &[ServingNode]) -> Self {
        let mut node_set: Vec<ServingNode> = nodes.to_vec();
        node_set.sort();
        node_set.dedup();
        PlayerPayoffs {
            ues: ues.iter().map(|&m| (m, ue_utility(net, assoc, m))).collect(),
            relay_own: node_set
                .iter()
                .filter_map(|&p| match p {
                    ServingNode::Important(i) => Some((i, ue_utility(net, assoc, i))),
                    ServingNode::Scbs(_) => None,
                })
                .collect(),
            nodes: node_set.iter().map(|&p| (p, sn_utility(net, assoc, p))).collect(),
        }
    }

    /// Players and payoffs for `proposal` evaluated under `assoc`.
    pub fn for_proposal(net: &Network, before: &Association, proposal: Proposal, assoc: &Association) -> Self {
        match proposal {
            Proposal::Swap(a, b) => {
                PlayerPayoffs::of(net, assoc, &[a, b], &[before.node(a), before.node(b)])
            }
            Proposal::Move(m, target) => {
                PlayerPayoffs::of(net, assoc, &[m], &[before.node(m), target])
            }
        }
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.ues
            .iter()
            .map(|x| x.1)
            .chain(self.nodes.iter().map(|x| x.1))
            .chain(self.relay_own.iter().map(|x| x.1))
    }
}

/// No player is worse off and at least one is strictly better off.
pub fn approved_swap(before: &PlayerPayoffs, after: &PlayerPayoffs) -> bool {
    let mut gain = false;
    for (old, new) in before.values().zip(after.values()) {
        if strictly_greater(old, new) {
            return false;
        }
        gain |= strictly_greater(new, old);
    }
    gain
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// First approved proposal found, if any.
    pub witness: Option<Proposal>,
    pub pairs_checked: usize,
}

/// Whether `proposal` would be approved from `assoc`; infeasible
/// proposals are not.
pub(crate) fn evaluate(
    net: &Network,
    cluster: &ClusterView,
    assoc: &Association,
    proposal: Proposal,
) -> Option<Association> {
    let next = proposal.apply(net, cluster, assoc).ok()?;
    if next == *assoc {
        return None;
    }
    let before = PlayerPayoffs::for_proposal(net, assoc, proposal, assoc);
    let after = PlayerPayoffs::for_proposal(net, assoc, proposal, &next);
    approved_swap(&before, &after).then_some(next)
}

/// Every proposal of the cluster in a fixed order: swaps first, then
/// moves when enabled.
pub(crate) fn all_proposals(
    net: &Network,
    cluster: &ClusterView,
    assoc: &Association,
    include_moves: bool,
) -> Vec<Proposal> {
    let movable = cluster.movable(net);
    let mut out = Vec::new();
    for (k, &a) in movable.iter().enumerate() {
        for &b in &movable[k + 1..] {
            if assoc.node(a) != assoc.node(b) {
                out.push(Proposal::Swap(a, b));
            }
        }
    }
    if include_moves {
        for &m in &movable {
            for p in cluster.feasible_nodes(net, m) {
                if p != assoc.node(m) {
                    out.push(Proposal::Move(m, p));
                }
            }
        }
    }
    out
}

/// Scans every swap (and move, if enabled) for an approved one.
pub fn is_pairwise_stable(
    net: &Network,
    cluster: &ClusterView,
    assoc: &Association,
    include_moves: bool,
) -> StabilityReport {
    let mut checked = 0;
    for proposal in all_proposals(net, cluster, assoc, include_moves) {
        checked += 1;
        if evaluate(net, cluster, assoc, proposal).is_some() {
            return StabilityReport {
                stable: false,
                witness: Some(proposal),
                pairs_checked: checked,
            };
        }
    }
    StabilityReport {
        stable: true,
        witness: None,
        pairs_checked: checked,
    }
}

/// For an approved swap, whether cluster welfare did not drop. `None` for
/// moves and for swaps that were not approved.
pub fn check_lemma1(
    net: &Network,
    cluster: &ClusterView,
    assoc: &Association,
    proposal: Proposal,
) -> Option<bool> {
    if !matches!(proposal, Proposal::Swap(..)) {
        return None;
    }
    let next = evaluate(net, cluster, assoc, proposal)?;
    let old = cluster_welfare(net, assoc, cluster);
    let new = cluster_welfare(net, &next, cluster);
    Some(!strictly_greater(old, new))
}
