use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::stability::{all_proposals, approved_swap, PlayerPayoffs};
use super::{cluster_welfare, strictly_greater, swap::Proposal, ClusterView};
use crate::error::Result;
use crate::network::{Association, Network};

/// Orientation of the logistic acceptance rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PtSign {
    /// Improving proposals are accepted with probability above 1/2.
    #[default]
    Standard,
    /// `1 / (1 + exp(-ϑ (Γ_old - Γ_new)))`.
    Inverted,
}

impl std::str::FromStr for PtSign {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(PtSign::Standard),
            "inverted" => Ok(PtSign::Inverted),
            _ => Err(format!("unknown pt_sign `{s}` (expected standard or inverted)")),
        }
    }
}

impl std::fmt::Display for PtSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PtSign::Standard => "standard",
            PtSign::Inverted => "inverted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub count_max: usize,
    pub t_max: usize,
    pub pt_sign: PtSign,
    pub allow_moves: bool,
    /// Finish each cluster run with a deterministic hill climb from the best
    /// matching found.
    pub polish: bool,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            count_max: 200,
            t_max: 10,
            pt_sign: PtSign::Standard,
            allow_moves: true,
            polish: true,
        }
    }
}

/// Upper bound on hill-climb steps per cluster run.
const MAX_POLISH_STEPS: usize = 10_000;

/// `ϑ(count) = 1 - count / count_max`, floored at zero.
pub fn temperature(count: usize, count_max: usize) -> f64 {
    if count_max == 0 {
        return 0.0;
    }
    (1.0 - count as f64 / count_max as f64).max(0.0)
}

/// Logistic acceptance probability of moving from welfare `old` to `new`.
/// The difference is divided by `scale` first when `scale > 0`.
pub fn swap_accept_probability(old: f64, new: f64, theta: f64, scale: f64, sign: PtSign) -> f64 {
    let mut delta = new - old;
    if scale > 0.0 {
        delta /= scale;
    }
    if sign == PtSign::Inverted {
        delta = -delta;
    }
    1.0 / (1.0 + (-theta * delta).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub cluster: usize,
    pub count: usize,
    pub gamma_current: f64,
    pub gamma_best: f64,
    pub accepted: bool,
    /// Draws needed to find a feasible proposal at this count.
    pub proposal_count: usize,
}

/// Approved swaps seen during a run and how many failed to raise welfare.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaStats {
    pub approved: usize,
    pub violations: usize,
}

impl LemmaStats {
    pub fn merge(&mut self, other: LemmaStats) {
        self.approved += other.approved;
        self.violations += other.violations;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRun {
    pub cluster: usize,
    pub final_matching: Association,
    pub best: Association,
    pub initial_welfare: f64,
    pub best_welfare: f64,
    pub trace: Vec<TraceRow>,
    pub proposals: usize,
    pub accepted: usize,
    pub polish_steps: usize,
    pub lemma: LemmaStats,
}

fn draw_proposal(
    net: &Network,
    cluster: &ClusterView,
    movable: &[usize],
    assoc: &Association,
    allow_moves: bool,
    rng: &mut ChaCha8Rng,
) -> (Option<(Proposal, Association)>, usize) {
    let max_attempts = 64 * movable.len().max(1) + 64;
    for attempt in 1..=max_attempts {
        let m = movable[rng.random_range(0..movable.len())];
        let proposal = if allow_moves && (movable.len() < 2 || rng.random_bool(0.5)) {
            let nodes = cluster.feasible_nodes(net, m);
            Proposal::Move(m, nodes[rng.random_range(0..nodes.len())])
        } else {
            let mut other = movable[rng.random_range(0..movable.len() - 1)];
            if other == m {
                other = movable[movable.len() - 1];
            }
            Proposal::Swap(m, other)
        };
        if let Ok(next) = proposal.apply(net, cluster, assoc) {
            if next != *assoc {
                return (Some((proposal, next)), attempt);
            }
        }
    }
    (None, max_attempts)
}

fn lemma_check(
    net: &Network,
    assoc: &Association,
    proposal: Proposal,
    next: &Association,
    welfare_rose: bool,
    stats: &mut LemmaStats,
) {
    if !matches!(proposal, Proposal::Swap(..)) {
        return;
    }
    let before = PlayerPayoffs::for_proposal(net, assoc, proposal, assoc);
    let after = PlayerPayoffs::for_proposal(net, assoc, proposal, next);
    if approved_swap(&before, &after) {
        stats.approved += 1;
        if !welfare_rose {
            stats.violations += 1;
        }
    }
}

/// First-improvement local search over swaps (and moves) until no
/// proposal raises cluster welfare.
fn polish(
    net: &Network,
    cluster: &ClusterView,
    start: &Association,
    allow_moves: bool,
) -> (Association, f64, usize) {
    let mut best = start.clone();
    let mut welfare = cluster_welfare(net, &best, cluster);
    let mut steps = 0;
    'outer: while steps < MAX_POLISH_STEPS {
        for proposal in all_proposals(net, cluster, &best, allow_moves) {
            let Ok(next) = proposal.apply(net, cluster, &best) else {
                continue;
            };
            let w = cluster_welfare(net, &next, cluster);
            if strictly_greater(w, welfare) {
                best = next;
                welfare = w;
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    (best, welfare, steps)
}

/// One outer step of the swap dynamics on `cluster`. UEs outside the
/// cluster keep their nodes in `initial` throughout.
pub fn run_cluster_matching(
    net: &Network,
    cluster: &ClusterView,
    initial: &Association,
    schedule: &AnnealSchedule,
    seed: u64,
    t: usize,
) -> Result<ClusterRun> {
    cluster.check(net, initial)?;
    let initial_welfare = cluster_welfare(net, initial, cluster);
    let mut run = ClusterRun {
        cluster: cluster.id,
        final_matching: initial.clone(),
        best: initial.clone(),
        initial_welfare,
        best_welfare: initial_welfare,
        trace: Vec::new(),
        proposals: 0,
        accepted: 0,
        polish_steps: 0,
        lemma: LemmaStats::default(),
    };
    let movable = cluster.movable(net);
    if cluster.ues.len() < 2 || movable.is_empty() || (movable.len() < 2 && !schedule.allow_moves) {
        return Ok(run);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = initial.clone();
    let mut current_welfare = initial_welfare;
    for count in 1..=schedule.count_max {
        let theta = temperature(count, schedule.count_max);
        let (drawn, attempts) =
            draw_proposal(net, cluster, &movable, &current, schedule.allow_moves, &mut rng);
        let Some((proposal, next)) = drawn else {
            break;
        };
        run.proposals += 1;
        let new_welfare = cluster_welfare(net, &next, cluster);
        lemma_check(
            net,
            &current,
            proposal,
            &next,
            new_welfare > current_welfare,
            &mut run.lemma,
        );
        let p = swap_accept_probability(
            current_welfare,
            new_welfare,
            theta,
            run.best_welfare,
            schedule.pt_sign,
        );
        let accepted = rng.random::<f64>() < p;
        if strictly_greater(new_welfare, run.best_welfare) {
            run.best = next.clone();
            run.best_welfare = new_welfare;
        }
        if accepted {
            run.accepted += 1;
            current = next;
            current_welfare = new_welfare;
        }
        run.trace.push(TraceRow {
            t,
            cluster: cluster.id,
            count,
            gamma_current: current_welfare,
            gamma_best: run.best_welfare,
            accepted,
            proposal_count: attempts,
        });
    }
    if schedule.polish {
        let (best, welfare, steps) = polish(net, cluster, &run.best, schedule.allow_moves);
        run.best = best;
        run.best_welfare = welfare;
        run.polish_steps = steps;
    }
    run.final_matching = current;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::fixtures::two_cell;
    use crate::matching::is_pairwise_stable;

    #[test]
    fn acceptance_probability_examples() {
        assert_eq!(swap_accept_probability(3.0, 3.0, 1.0, 1.0, PtSign::Standard), 0.5);
        assert_eq!(swap_accept_probability(1.0, 9.0, 0.0, 1.0, PtSign::Standard), 0.5);
        let p = swap_accept_probability(1.0, 2.0, 1.0, 1.0, PtSign::Standard);
        assert!((p - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert!((p - 0.7311).abs() < 1e-4);
        let q = swap_accept_probability(1.0, 2.0, 1.0, 1.0, PtSign::Inverted);
        assert!((p + q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn temperature_falls_linearly() {
        assert_eq!(temperature(0, 200), 1.0);
        assert_eq!(temperature(100, 200), 0.5);
        assert_eq!(temperature(200, 200), 0.0);
        assert_eq!(temperature(300, 200), 0.0);
    }

    #[test]
    fn pt_sign_parses() {
        assert_eq!("inverted".parse::<PtSign>().unwrap(), PtSign::Inverted);
        assert_eq!(PtSign::Standard.to_string(), "standard");
        assert!("x".parse::<PtSign>().is_err());
    }

    #[test]
    fn run_is_deterministic_and_best_is_monotone() {
        let net = two_cell();
        let c = ClusterView::whole_network(&net);
        let init = net.anchor_association();
        let s = AnnealSchedule::default();
        let a = run_cluster_matching(&net, &c, &init, &s, 7, 0).unwrap();
        let b = run_cluster_matching(&net, &c, &init, &s, 7, 0).unwrap();
        assert_eq!(a, b);
        assert!(a.trace.windows(2).all(|w| w[1].gamma_best >= w[0].gamma_best));
        assert!(a.best_welfare >= a.initial_welfare);
        assert_eq!(a.lemma.violations, 0);
        net.check_association(&a.best).unwrap();
        assert!(is_pairwise_stable(&net, &c, &a.best, false).stable);
    }

    #[test]
    fn single_ue_cluster_is_untouched() {
        let net = two_cell();
        let c = ClusterView {
            id: 3,
            scbs: vec![0],
            ues: vec![5],
            nodes: vec![crate::network::ServingNode::Scbs(0)],
        };
        let init = net.anchor_association();
        let r = run_cluster_matching(&net, &c, &init, &AnnealSchedule::default(), 1, 0).unwrap();
        assert_eq!(r.proposals, 0);
        assert_eq!(r.best, init);
        assert!(r.trace.is_empty());
    }
}
