use serde::{Deserialize, Serialize};

use super::ClusterView;
use crate::network::{Association, Network, ServingNode};

/// A candidate change to a cluster matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Proposal {
    /// Exchange the serving nodes of two UEs.
    Swap(usize, usize),
    /// Re-home a single UE.
    Move(usize, ServingNode),
}

/// Why a proposal was not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum Rejection {
    #[error("a UE cannot swap with itself")]
    SameUe,
    #[error("UE {0} is not in this cluster")]
    OutsideCluster(usize),
    #[error("important UE {0} keeps its serving SCBS")]
    ImportantUe(usize),
    #[error("{node} cannot serve UE {ue}")]
    Infeasible { ue: usize, node: ServingNode },
}

fn check_movable(net: &Network, cluster: &ClusterView, m: usize) -> Result<(), Rejection> {
    if !cluster.ues.contains(&m) {
        return Err(Rejection::OutsideCluster(m));
    }
    if net.is_important(m) {
        return Err(Rejection::ImportantUe(m));
    }
    Ok(())
}

/// `η` with the serving nodes of `m` and `other` exchanged. UEs sharing a
/// node give back an unchanged matching.
pub fn apply_swap(
    net: &Network,
    cluster: &ClusterView,
    assoc: &Association,
    m: usize,
    other: usize,
) -> Result<Association, Rejection> {
    if m == other {
        return Err(Rejection::SameUe);
    }
    check_movable(net, cluster, m)?;
    check_movable(net, cluster, other)?;
    let (p, q) = (assoc.node(m), assoc.node(other));
    if p == q {
        return Ok(assoc.clone());
    }
    if !cluster.can_serve(net, q, m) {
        return Err(Rejection::Infeasible { ue: m, node: q });
    }
    if !cluster.can_serve(net, p, other) {
        return Err(Rejection::Infeasible { ue: other, node: p });
    }
    let mut next = assoc.clone();
    next.serving[m] = q;
    next.serving[other] = p;
    Ok(next)
}

/// `η` with UE `m` moved onto `target`.
pub fn apply_move(
    net: &Network,
    cluster: &ClusterView,
    assoc: &Association,
    m: usize,
    target: ServingNode,
) -> Result<Association, Rejection> {
    check_movable(net, cluster, m)?;
    if !cluster.can_serve(net, target, m) {
        return Err(Rejection::Infeasible { ue: m, node: target });
    }
    let mut next = assoc.clone();
    next.serving[m] = target;
    Ok(next)
}

impl Proposal {
    pub fn apply(
        self,
        net: &Network,
        cluster: &ClusterView,
        assoc: &Association,
    ) -> Result<Association, Rejection> {
        match self {
            Proposal::Swap(a, b) => apply_swap(net, cluster, assoc, a, b),
            Proposal::Move(m, node) => apply_move(net, cluster, assoc, m, node),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::fixtures::two_cell;

    #[test]
    fn swap_is_an_involution_touching_two_ues() {
        let net = two_cell();
        let c = ClusterView::whole_network(&net);
        let mut assoc = net.anchor_association();
        assoc.serving[1] = ServingNode::Important(0);
        let swapped = apply_swap(&net, &c, &assoc, 1, 2).unwrap();
        assert_eq!(swapped.diff(&assoc), vec![1, 2]);
        assert_eq!(apply_swap(&net, &c, &swapped, 1, 2).unwrap(), assoc);
    }

    #[test]
    fn same_node_swap_is_noop() {
        let net = two_cell();
        let c = ClusterView::whole_network(&net);
        let assoc = net.anchor_association();
        assert_eq!(assoc.node(1), assoc.node(2));
        assert_eq!(apply_swap(&net, &c, &assoc, 1, 2).unwrap(), assoc);
    }

    #[test]
    fn infeasible_swaps_are_rejected() {
        let net = two_cell();
        let c = ClusterView::whole_network(&net);
        let mut assoc = net.anchor_association();
        assoc.serving[1] = ServingNode::Important(0);
        // UE 5 has no tie to the important UE
        assert_eq!(
            apply_swap(&net, &c, &assoc, 1, 5),
            Err(Rejection::Infeasible { ue: 5, node: ServingNode::Important(0) })
        );
        assert_eq!(apply_swap(&net, &c, &assoc, 0, 1), Err(Rejection::ImportantUe(0)));
        assert_eq!(apply_swap(&net, &c, &assoc, 1, 1), Err(Rejection::SameUe));
        assert!(apply_move(&net, &c, &assoc, 5, ServingNode::Important(0)).is_err());
        assert!(apply_move(&net, &c, &assoc, 2, ServingNode::Important(0)).is_ok());
    }
}
