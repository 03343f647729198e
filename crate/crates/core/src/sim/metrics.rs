use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::LemmaStats;

/// The three association schemes compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Approach {
    Proposed,
    MaxRssi,
    Random,
}

impl Approach {
    pub const ALL: [Approach; 3] = [Approach::Proposed, Approach::MaxRssi, Approach::Random];

    pub fn name(self) -> &'static str {
        match self {
            Approach::Proposed => "proposed",
            Approach::MaxRssi => "max-rssi",
            Approach::Random => "random",
        }
    }
}

impl std::str::FromStr for Approach {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Approach::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown approach `{s}`"))
    }
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one approach on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachRun {
    pub approach: Approach,
    pub sum_rate: f64,
    pub ue_rates: Vec<f64>,
    /// Outer steps until convergence; 1 for the static baselines.
    pub iterations: usize,
    pub cluster_count: usize,
    pub mean_cluster_size: f64,
    pub proposals: usize,
    pub accepted: usize,
    /// Sum over clusters of the worst-case proposal-message bound.
    pub overhead_bound: f64,
    pub d2d_ues: usize,
    /// `|M_i| + 1` for every important UE with at least one member.
    pub same_content_group_sizes: Vec<usize>,
    pub lemma: LemmaStats,
    pub best_trace_monotone: bool,
}

impl ApproachRun {
    pub fn new(approach: Approach, ue_rates: Vec<f64>) -> Self {
        ApproachRun {
            approach,
            sum_rate: ue_rates.iter().sum(),
            ue_rates,
            iterations: 1,
            cluster_count: 0,
            mean_cluster_size: 0.0,
            proposals: 0,
            accepted: 0,
            overhead_bound: 0.0,
            d2d_ues: 0,
            same_content_group_sizes: Vec::new(),
            lemma: LemmaStats::default(),
            best_trace_monotone: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachSummary {
    pub approach: Approach,
    pub runs: usize,
    pub avg_sum_rate: f64,
    pub mean_ue_rate: f64,
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
    pub avg_iterations: f64,
    pub avg_cluster_count: f64,
    pub avg_cluster_size: f64,
    pub avg_proposals: f64,
    pub avg_overhead_bound: f64,
    pub avg_d2d_ues: f64,
    pub mean_same_content_group_size: f64,
    pub same_content_group_sizes: Vec<usize>,
    pub lemma: LemmaStats,
    /// Every per-UE rate of every run, ascending.
    pub ue_rate_samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub approaches: Vec<ApproachSummary>,
}

impl MetricsReport {
    pub fn get(&self, approach: Approach) -> Option<&ApproachSummary> {
        self.approaches.iter().find(|a| a.approach == approach)
    }
}

/// Percentile `q ∈ [0, 1]` of ascending `sorted` samples, interpolating
/// linearly between closest ranks.
pub fn percentile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::domain("percentile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("percentile level {q} outside [0, 1]")));
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Aggregates per-run outcomes of each approach, in first-seen order.
pub fn compute_metrics(runs: &[Vec<ApproachRun>]) -> Result<MetricsReport> {
    if runs.is_empty() {
        return Err(Error::domain("no runs to aggregate"));
    }
    let mut order: Vec<Approach> = Vec::new();
    for r in runs.iter().flatten() {
        if !order.contains(&r.approach) {
            order.push(r.approach);
        }
    }
    let mut approaches = Vec::new();
    for approach in order {
        let rs: Vec<&ApproachRun> = runs.iter().flatten().filter(|r| r.approach == approach).collect();
        let mut sorted: Vec<f64> = rs.iter().flat_map(|r| r.ue_rates.iter().copied()).collect();
        sorted.sort_by(f64::total_cmp);
        let groups: Vec<usize> = rs
            .iter()
            .flat_map(|r| r.same_content_group_sizes.iter().copied())
            .collect();
        let mut lemma = LemmaStats::default();
        for r in &rs {
            lemma.merge(r.lemma);
        }
        approaches.push(ApproachSummary {
            approach,
            runs: rs.len(),
            avg_sum_rate: mean(rs.iter().map(|r| r.sum_rate)),
            mean_ue_rate: mean(sorted.iter().copied()),
            p5: percentile(&sorted, 0.05)?,
            p50: percentile(&sorted, 0.50)?,
            p95: percentile(&sorted, 0.95)?,
            avg_iterations: mean(rs.iter().map(|r| r.iterations as f64)),
            avg_cluster_count: mean(rs.iter().map(|r| r.cluster_count as f64)),
            avg_cluster_size: mean(rs.iter().map(|r| r.mean_cluster_size)),
            avg_proposals: mean(rs.iter().map(|r| r.proposals as f64)),
            avg_overhead_bound: mean(rs.iter().map(|r| r.overhead_bound)),
            avg_d2d_ues: mean(rs.iter().map(|r| r.d2d_ues as f64)),
            mean_same_content_group_size: mean(groups.iter().map(|&g| g as f64)),
            same_content_group_sizes: groups,
            lemma,
            ue_rate_samples: sorted,
        });
    }
    Ok(MetricsReport { approaches })
}

/// Worst-case proposal messages in one cluster of `m_c` UEs where `phi_s`
/// UEs are satisfied per iteration and `phi_c` UEs can be matched.
pub fn overhead_bounds(m_c: usize, phi_s: f64, phi_c: usize) -> Result<f64> {
    if phi_s.is_nan() || phi_s <= 0.0 {
        return Err(Error::domain(format!("phi_s must be positive, got {phi_s}")));
    }
    let m = m_c as f64;
    if m_c <= phi_c {
        Ok(m * (m + phi_s) / (2.0 * phi_s))
    } else {
        Ok((1..=phi_c).map(|t| m - phi_s * t as f64).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let p50 = percentile(&v, 0.5).unwrap();
        assert!(p50 > 50.0 && p50 < 51.0);
        assert_eq!(percentile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&v, 1.0).unwrap(), 100.0);
        assert_eq!(percentile(&[4.0], 0.3).unwrap(), 4.0);
        assert!(percentile(&[], 0.5).is_err());
    }

    #[test]
    fn overhead_examples() {
        assert_eq!(overhead_bounds(10, 1.0, 10).unwrap(), 55.0);
        assert_eq!(overhead_bounds(7, 7.0, 7).unwrap(), 7.0);
        assert_eq!(overhead_bounds(5, 1.0, 0).unwrap(), 0.0);
        assert_eq!(overhead_bounds(10, 2.0, 3).unwrap(), 8.0 + 6.0 + 4.0);
        assert!(overhead_bounds(3, 0.0, 3).is_err());
    }

    #[test]
    fn single_run_averages_equal_the_run() {
        let mut r = ApproachRun::new(Approach::Proposed, vec![1.0, 2.0, 6.0]);
        r.iterations = 4;
        r.same_content_group_sizes = vec![2, 4];
        let rep = compute_metrics(&[vec![r.clone()]]).unwrap();
        let s = rep.get(Approach::Proposed).unwrap();
        assert_eq!(s.avg_sum_rate, 9.0);
        assert_eq!(s.avg_iterations, 4.0);
        assert_eq!(s.mean_same_content_group_size, 3.0);
        assert_eq!(s.p50, 2.0);
        assert!(compute_metrics(&[]).is_err());
    }

    #[test]
    fn approach_names_round_trip() {
        for a in Approach::ALL {
            assert_eq!(a.name().parse::<Approach>().unwrap(), a);
        }
    }
}
