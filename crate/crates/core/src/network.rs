//! The assembled network model: topology, radio map, social matrices,
//! important UEs and anchors, plus association-aware rate and utility
//! evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::social::{d2d_link_exists, SocialGraph, SocialMatrices};
use crate::wireless::{end_to_end_rate, ChannelModel, NetworkTopology, RadioMap};

/// Supply side of the matching: an SCBS or an important UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServingNode {
    Scbs(usize),
    Important(usize),
}

impl std::fmt::Display for ServingNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ServingNode::Scbs(n) => write!(f, "scbs:{n}"),
            ServingNode::Important(i) => write!(f, "ue:{i}"),
        }
    }
}

/// Serving node of every UE in the network.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Association {
    pub serving: Vec<ServingNode>,
}

impl Association {
    pub fn new(serving: Vec<ServingNode>) -> Self {
        Association { serving }
    }

    pub fn len(&self) -> usize {
        self.serving.len()
    }

    pub fn is_empty(&self) -> bool {
        self.serving.is_empty()
    }

    pub fn node(&self, m: usize) -> ServingNode {
        self.serving[m]
    }

    pub fn served_by(&self, node: ServingNode) -> Vec<usize> {
        (0..self.len()).filter(|&m| self.serving[m] == node).collect()
    }

    /// UEs whose serving node differs.
    pub fn diff(&self, other: &Association) -> Vec<usize> {
        (0..self.len().min(other.len()))
            .filter(|&m| self.serving[m] != other.serving[m])
            .collect()
    }
}

/// Which time slots the cellular tier gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotMode {
    /// Cellular in the first slot, D2D broadcast in the second.
    TwoSlot,
    /// Cellular over the whole frame, no D2D.
    SingleSlot,
}

/// Per-association quantities shared by every rate evaluation.
#[derive(Debug, Clone)]
pub struct LinkState {
    /// `|L_n|` per SCBS.
    pub served: Vec<usize>,
    /// D2D members per UE (non-empty only for active important UEs).
    pub members: Vec<Vec<usize>>,
    /// Important UEs with at least one member.
    pub active: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Network {
    pub topology: NetworkTopology,
    pub channel: ChannelModel,
    pub radio: RadioMap,
    pub graph: SocialGraph,
    pub social: SocialMatrices,
    /// Serving SCBS of each important UE.
    pub important_of: Vec<Option<usize>>,
    /// Max-RSSI SCBS per UE.
    pub anchors: Vec<usize>,
}

impl Network {
    pub fn new(
        topology: NetworkTopology,
        channel: ChannelModel,
        power_split: bool,
        graph: SocialGraph,
        social: SocialMatrices,
        important: &[(usize, usize)],
    ) -> Result<Self> {
        topology.validate()?;
        let m = topology.n_ues();
        if graph.len() != m {
            return Err(Error::config(format!(
                "social graph has {} vertices, topology has {m} UEs",
                graph.len()
            )));
        }
        if topology.n_scbs() == 0 {
            return Err(Error::config("network needs at least one SCBS"));
        }
        let radio = RadioMap::new(&topology, &channel).with_power_split(power_split);
        let anchors: Vec<usize> = (0..m)
            .map(|u| radio.max_rssi_scbs(u).expect("at least one SCBS"))
            .collect();
        let mut important_of = vec![None; m];
        for &(ue, scbs) in important {
            if ue >= m || scbs >= topology.n_scbs() {
                return Err(Error::config(format!("important UE ({ue}, {scbs}) out of range")));
            }
            if important_of[ue].replace(scbs).is_some() {
                return Err(Error::config(format!("UE {ue} elected twice")));
            }
        }
        Ok(Network {
            topology,
            channel,
            radio,
            graph,
            social,
            important_of,
            anchors,
        })
    }

    pub fn n_ues(&self) -> usize {
        self.topology.n_ues()
    }

    pub fn n_scbs(&self) -> usize {
        self.topology.n_scbs()
    }

    pub fn is_important(&self, m: usize) -> bool {
        self.important_of[m].is_some()
    }

    pub fn important_ues(&self) -> Vec<usize> {
        (0..self.n_ues()).filter(|&m| self.is_important(m)).collect()
    }

    /// Every UE on its max-RSSI SCBS; important UEs on their own SCBS.
    pub fn anchor_association(&self) -> Association {
        Association::new(
            (0..self.n_ues())
                .map(|m| ServingNode::Scbs(self.important_of[m].unwrap_or(self.anchors[m])))
                .collect(),
        )
    }

    /// Physical/social feasibility of `node` serving UE `m`, ignoring
    /// cluster boundaries. Important UEs may only sit on their own SCBS.
    pub fn can_serve(&self, node: ServingNode, m: usize) -> bool {
        if let Some(own) = self.important_of[m] {
            return node == ServingNode::Scbs(own);
        }
        match node {
            ServingNode::Scbs(n) => {
                n < self.n_scbs()
                    && (n == self.anchors[m]
                        || self.topology.scbs_ue_distance(n, m) <= self.topology.scbs_radius_m)
            }
            ServingNode::Important(i) => {
                i < self.n_ues()
                    && self.is_important(i)
                    && d2d_link_exists(m, i, &self.graph, &self.topology)
            }
        }
    }

    /// Checks that every UE sits on a node that can serve it.
    pub fn check_association(&self, assoc: &Association) -> Result<()> {
        if assoc.len() != self.n_ues() {
            return Err(Error::Invariant(format!(
                "association covers {} UEs, network has {}",
                assoc.len(),
                self.n_ues()
            )));
        }
        for m in 0..assoc.len() {
            if !self.can_serve(assoc.node(m), m) {
                return Err(Error::Invariant(format!(
                    "UE {m} cannot be served by {}",
                    assoc.node(m)
                )));
            }
        }
        Ok(())
    }

    pub fn link_state(&self, assoc: &Association) -> LinkState {
        let mut served = vec![0; self.n_scbs()];
        let mut members = vec![Vec::new(); self.n_ues()];
        for (m, node) in assoc.serving.iter().enumerate() {
            match *node {
                ServingNode::Scbs(n) => served[n] += 1,
                ServingNode::Important(i) => members[i].push(m),
            }
        }
        let active = (0..self.n_ues()).filter(|&i| !members[i].is_empty()).collect();
        LinkState {
            served,
            members,
            active,
        }
    }

    fn cellular_share(&self, mode: SlotMode) -> f64 {
        match mode {
            SlotMode::TwoSlot => self.topology.tau0_fraction,
            SlotMode::SingleSlot => 1.0,
        }
    }

    /// Cellular rate of UE `m` on SCBS `n`.
    pub fn cellular_rate(&self, state: &LinkState, n: usize, m: usize, mode: SlotMode) -> f64 {
        self.radio.cellular_rate(n, m, &state.served, self.cellular_share(mode))
    }

    /// Broadcast rate of important UE `i` to its current members.
    pub fn broadcast_rate(&self, state: &LinkState, i: usize) -> Option<f64> {
        self.radio
            .broadcast_rate(i, &state.members[i], &state.active, self.topology.tau1_fraction())
            .ok()
    }

    /// Two-hop rate of a D2D member of important UE `i`.
    pub fn d2d_rate(&self, state: &LinkState, i: usize, mode: SlotMode) -> f64 {
        let server = self.important_of[i].expect("D2D server must be an important UE");
        let first_hop = self.cellular_rate(state, server, i, mode);
        self.broadcast_rate(state, i)
            .map_or(0.0, |b| end_to_end_rate(first_hop, b))
    }

    /// Throughput actually delivered to UE `m`.
    pub fn ue_rate(&self, assoc: &Association, state: &LinkState, m: usize, mode: SlotMode) -> f64 {
        match assoc.node(m) {
            ServingNode::Scbs(n) => self.cellular_rate(state, n, m, mode),
            ServingNode::Important(i) => self.d2d_rate(state, i, mode),
        }
    }

    /// Utility of UE `m` on its current serving node. An important UE adds
    /// the socially weighted two-hop rates of its tied members.
    pub fn ue_utility(&self, assoc: &Association, state: &LinkState, m: usize) -> f64 {
        let mode = SlotMode::TwoSlot;
        match assoc.node(m) {
            ServingNode::Scbs(n) => {
                let own = self.cellular_rate(state, n, m, mode);
                if !self.is_important(m) || state.members[m].is_empty() {
                    return own;
                }
                let relayed = self.d2d_rate(state, m, mode);
                own + state.members[m]
                    .iter()
                    .filter(|&&k| self.graph.has_edge(m, k))
                    .map(|&k| relayed / (1.0 - self.social.tie_strength(m, k)))
                    .sum::<f64>()
            }
            ServingNode::Important(i) => self.d2d_rate(state, i, mode),
        }
    }

    /// Sum of UE utilities over `ues`.
    pub fn welfare_of(&self, assoc: &Association, ues: &[usize]) -> f64 {
        let state = self.link_state(assoc);
        ues.iter().map(|&m| self.ue_utility(assoc, &state, m)).sum()
    }

    /// Cellular rate of `m` on SCBS `n`; `m` must be served by `n`.
    pub fn rate_scbs_ue(&self, assoc: &Association, n: usize, m: usize) -> Result<f64> {
        if assoc.node(m) != ServingNode::Scbs(n) {
            return Err(Error::Invariant(format!("UE {m} is not served by SCBS {n}")));
        }
        let state = self.link_state(assoc);
        Ok(self.cellular_rate(&state, n, m, SlotMode::TwoSlot))
    }

    /// Broadcast rate of important UE `i` to an explicit member set.
    pub fn rate_important_broadcast(&self, assoc: &Association, i: usize, members: &[usize]) -> Result<f64> {
        if let Some(&m) = members
            .iter()
            .find(|&&m| self.topology.ue_distance(i, m) > self.topology.d2d_radius_m)
        {
            return Err(Error::domain(format!("UE {m} is outside the D2D radius of {i}")));
        }
        let state = self.link_state(assoc);
        let mut active = state.active.clone();
        if !active.contains(&i) {
            active.push(i);
        }
        self.radio
            .broadcast_rate(i, members, &active, self.topology.tau1_fraction())
    }

    /// Two-hop rate from SCBS `n` via important UE `i` to member `m`.
    pub fn rate_d2d_end_to_end(&self, assoc: &Association, n: usize, i: usize, m: usize) -> Result<f64> {
        if assoc.node(m) != ServingNode::Important(i) || assoc.node(i) != ServingNode::Scbs(n) {
            return Err(Error::domain(format!(
                "UE {m} is not a D2D member of {i} served by SCBS {n}"
            )));
        }
        let state = self.link_state(assoc);
        Ok(self.d2d_rate(&state, i, SlotMode::TwoSlot))
    }

    /// Normalised load of SCBS `n`: the sum of `R/R_max` over the UEs it
    /// serves directly, clamped to `[0, 1]`.
    pub fn scbs_load(&self, assoc: &Association, n: usize) -> f64 {
        self.scbs_load_terms(assoc, n).iter().sum::<f64>().clamp(0.0, 1.0)
    }

    /// The un-clamped summands of [`Network::scbs_load`].
    pub fn scbs_load_terms(&self, assoc: &Association, n: usize) -> Vec<f64> {
        let state = self.link_state(assoc);
        let share = self.topology.tau0_fraction;
        assoc
            .served_by(ServingNode::Scbs(n))
            .into_iter()
            .map(|m| {
                let r = self.radio.cellular_rate(n, m, &state.served, share);
                let rmax = self.radio.cellular_rate_max(n, m, &state.served, share);
                if rmax > 0.0 {
                    r / rmax
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn cluster_load(&self, assoc: &Association, scbs: &[usize]) -> Result<f64> {
        if scbs.is_empty() {
            return Err(Error::Invariant("cluster has no SCBS".into()));
        }
        Ok(scbs.iter().map(|&n| self.scbs_load(assoc, n)).sum::<f64>() / scbs.len() as f64)
    }
}
