use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::baselines::{baseline_max_rssi, baseline_random, rates};
use super::config::ScenarioConfig;
use super::metrics::{compute_metrics, overhead_bounds, Approach, ApproachRun, MetricsReport};
use super::scenario::{build_network, elect_all, generate_scenario, important_pairs, stream_seed};
use crate::clustering::{
    distance_similarity, joint_affinity, link_mask, load_dissimilarity, spectral_cluster,
    ClusterPartition,
};
use crate::error::{Error, Result};
use crate::matching::{run_cluster_matching, ClusterView, LemmaStats, TraceRow};
use crate::network::{Association, Network, ServingNode, SlotMode};

/// A trace row tagged with its run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTraceRow {
    pub run: usize,
    #[serde(flatten)]
    pub row: TraceRow,
}

/// Everything produced for one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub results: Vec<ApproachRun>,
    /// Final SCBS partition of the proposed approach.
    pub partition: Option<ClusterPartition>,
    pub anchors: Vec<usize>,
    pub trace: Vec<RunTraceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ScenarioConfig,
    pub report: MetricsReport,
    pub runs: Vec<RunRecord>,
}

/// Outcome of the proposed scheme on one network.
#[derive(Debug, Clone)]
pub struct ProposedOutcome {
    pub association: Association,
    pub partition: ClusterPartition,
    pub clusters: Vec<ClusterView>,
    pub iterations: usize,
    pub proposals: usize,
    pub accepted: usize,
    pub lemma: LemmaStats,
    pub trace: Vec<TraceRow>,
    pub best_trace_monotone: bool,
}

/// Clusters of `partition` as matching views.
pub fn cluster_views(net: &Network, partition: &ClusterPartition) -> Vec<ClusterView> {
    partition
        .clusters
        .iter()
        .enumerate()
        .map(|(id, scbs)| ClusterView::new(net, id, scbs.clone()))
        .collect()
}

/// Clustering followed by per-cluster swap matching, repeated for up to
/// `t_max` outer steps. Clusters of one step run in parallel against the
/// same frozen association and are merged afterwards.
pub fn run_proposed(cfg: &ScenarioConfig, net: &Network, seed: u64) -> Result<ProposedOutcome> {
    let anchor = net.anchor_association();
    let topo = &net.topology;
    let loads: Vec<f64> = (0..net.n_scbs()).map(|n| net.scbs_load(&anchor, n)).collect();
    let aff = cfg.affinity();
    let y = joint_affinity(
        &distance_similarity(&topo.scbs_positions, aff.neighborhood_radius_m, aff.sigma_d),
        &load_dissimilarity(&loads, aff.sigma_l),
        aff.omega,
        &link_mask(&topo.scbs_positions, aff.neighborhood_radius_m),
    );
    let schedule = cfg.schedule();
    let mut assoc = anchor;
    let mut out = ProposedOutcome {
        association: assoc.clone(),
        partition: ClusterPartition::single(net.n_scbs()),
        clusters: Vec::new(),
        iterations: 0,
        proposals: 0,
        accepted: 0,
        lemma: LemmaStats::default(),
        trace: Vec::new(),
        best_trace_monotone: true,
    };
    for t in 0..schedule.t_max.max(1) {
        let outcome = spectral_cluster(&y, cfg.spectral_options(), stream_seed(seed, &[2, t as u64]))?;
        let views = cluster_views(net, &outcome.partition);
        for view in &views {
            for &m in &view.ues {
                if !view.can_serve(net, assoc.node(m), m) {
                    assoc.serving[m] = ServingNode::Scbs(crate::matching::home_scbs(net, m));
                }
            }
        }
        let frozen = assoc.clone();
        let runs = views
            .par_iter()
            .map(|v| {
                run_cluster_matching(
                    net,
                    v,
                    &frozen,
                    &schedule,
                    stream_seed(seed, &[3, t as u64, v.id as u64]),
                    t,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut merged = frozen.clone();
        for (view, run) in views.iter().zip(&runs) {
            for &m in &view.ues {
                merged.serving[m] = run.best.node(m);
            }
            out.proposals += run.proposals;
            out.accepted += run.accepted;
            out.lemma.merge(run.lemma);
            out.best_trace_monotone &= run.trace.windows(2).all(|w| w[1].gamma_best >= w[0].gamma_best);
            out.trace.extend(run.trace.iter().cloned());
        }
        out.iterations = t + 1;
        out.partition = outcome.partition;
        out.clusters = views;
        let settled = merged == assoc;
        assoc = merged;
        if settled {
            break;
        }
    }
    net.check_association(&assoc)?;
    out.association = assoc;
    Ok(out)
}

fn group_sizes(net: &Network, assoc: &Association) -> (usize, Vec<usize>) {
    let state = net.link_state(assoc);
    let groups: Vec<usize> = state.active.iter().map(|&i| state.members[i].len() + 1).collect();
    (groups.iter().map(|g| g - 1).sum(), groups)
}

fn run_one(cfg: &ScenarioConfig, run: usize, approaches: &[Approach]) -> Result<RunRecord> {
    let seed = stream_seed(cfg.seed, &[run as u64]);
    let scenario = generate_scenario(cfg, seed)?;
    let (social, elections) = elect_all(cfg, &scenario)?;
    let net = build_network(cfg, &scenario, social.clone(), &important_pairs(&elections))?;
    let mut record = RunRecord {
        run,
        seed,
        results: Vec::new(),
        partition: None,
        anchors: scenario.anchors.clone(),
        trace: Vec::new(),
    };
    for &approach in approaches {
        let result = match approach {
            Approach::Proposed => {
                let p = run_proposed(cfg, &net, seed)?;
                let mut r = ApproachRun::new(approach, rates(&net, &p.association, SlotMode::TwoSlot));
                r.iterations = p.iterations;
                r.cluster_count = p.clusters.len();
                r.mean_cluster_size = net.n_ues() as f64 / p.clusters.len().max(1) as f64;
                r.proposals = p.proposals;
                r.accepted = p.accepted;
                r.overhead_bound = p
                    .clusters
                    .iter()
                    .map(|c| overhead_bounds(c.ues.len(), 1.0, c.ues.len()))
                    .sum::<Result<f64>>()?;
                (r.d2d_ues, r.same_content_group_sizes) = group_sizes(&net, &p.association);
                r.lemma = p.lemma;
                r.best_trace_monotone = p.best_trace_monotone;
                record.partition = Some(p.partition);
                record.trace = p.trace.into_iter().map(|row| RunTraceRow { run, row }).collect();
                r
            }
            Approach::MaxRssi => ApproachRun::new(approach, baseline_max_rssi(&net).1),
            Approach::Random => {
                let (rnet, assoc, rs) = baseline_random(cfg, &scenario, social.clone(), stream_seed(seed, &[4]))?;
                let mut r = ApproachRun::new(approach, rs);
                (r.d2d_ues, r.same_content_group_sizes) = group_sizes(&rnet, &assoc);
                r
            }
        };
        record.results.push(result);
    }
    Ok(record)
}

/// Runs every approach on `cfg.runs` independent scenarios.
pub fn run_experiment(cfg: &ScenarioConfig, approaches: &[Approach]) -> Result<ExperimentResult> {
    cfg.validate()?;
    if approaches.is_empty() {
        return Err(Error::config("no approach selected"));
    }
    let runs = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            run_one(cfg, run, approaches).map_err(|e| Error::Run {
                run,
                seed: stream_seed(cfg.seed, &[run as u64]),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let per_run: Vec<Vec<ApproachRun>> = runs.iter().map(|r| r.results.clone()).collect();
    let report = compute_metrics(&per_run)?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        report,
        runs,
    })
}
