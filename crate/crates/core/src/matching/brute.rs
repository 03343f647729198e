use super::{cluster_welfare, ClusterView};
use crate::error::{Error, Result};
use crate::network::{Association, Network, ServingNode};

pub const MAX_ORACLE_UES: usize = 8;
pub const MAX_ORACLE_NODES: usize = 4;

/// Exhaustive arg-max of cluster welfare over every feasible matching that
/// agrees with `base` outside the cluster. The first maximiser in
/// enumeration order wins ties.
pub fn brute_force_optimum(
    net: &Network,
    cluster: &ClusterView,
    base: &Association,
) -> Result<(Association, f64)> {
    if cluster.ues.len() > MAX_ORACLE_UES || cluster.nodes.len() > MAX_ORACLE_NODES {
        return Err(Error::TooLarge {
            ues: cluster.ues.len(),
            nodes: cluster.nodes.len(),
            max_ues: MAX_ORACLE_UES,
            max_nodes: MAX_ORACLE_NODES,
        });
    }
    let movable = cluster.movable(net);
    let options: Vec<Vec<ServingNode>> = movable
        .iter()
        .map(|&m| cluster.feasible_nodes(net, m))
        .collect();
    let mut assoc = base.clone();
    for &m in &cluster.ues {
        if net.is_important(m) {
            assoc.serving[m] = ServingNode::Scbs(super::home_scbs(net, m));
        }
    }
    let mut digits = vec![0usize; movable.len()];
    let mut best: Option<(Association, f64)> = None;
    loop {
        for (k, &m) in movable.iter().enumerate() {
            assoc.serving[m] = options[k][digits[k]];
        }
        let w = cluster_welfare(net, &assoc, cluster);
        if best.as_ref().is_none_or(|b| w > b.1) {
            best = Some((assoc.clone(), w));
        }
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(best.expect("at least one matching is enumerated"));
            }
            digits[k] += 1;
            if digits[k] < options[k].len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}
