//! SCBS clustering from a joint distance/load Gaussian affinity.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinityParams {
    pub neighborhood_radius_m: f64,
    pub sigma_d: f64,
    pub sigma_l: f64,
    pub omega: f64,
}

impl Default for AffinityParams {
    fn default() -> Self {
        AffinityParams {
            neighborhood_radius_m: 200.0,
            sigma_d: 100.0,
            sigma_l: 1.0,
            omega: 0.5,
        }
    }
}

impl AffinityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_d > 0.0 && self.sigma_l > 0.0 && self.neighborhood_radius_m > 0.0) {
            return Err(Error::config("sigma_d, sigma_l and the cluster radius must be positive"));
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(Error::config(format!("omega {} outside [0, 1]", self.omega)));
        }
        Ok(())
    }
}

/// `true` where two distinct SCBSs are within `radius` of each other.
pub fn link_mask(positions: &[Point], radius: f64) -> Vec<Vec<bool>> {
    let n = positions.len();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| a != b && positions[a].distance(&positions[b]) <= radius)
                .collect()
        })
        .collect()
}

pub fn distance_similarity(positions: &[Point], radius: f64, sigma_d: f64) -> DMatrix<f64> {
    let n = positions.len();
    DMatrix::from_fn(n, n, |a, b| {
        let d = positions[a].distance(&positions[b]);
        if a == b || d > radius {
            0.0
        } else {
            let d = positions[a].clamped_distance(&positions[b]);
            (-d * d / (2.0 * sigma_d * sigma_d)).exp()
        }
    })
}

/// Gaussian load dissimilarity; note the positive exponent.
pub fn load_dissimilarity(loads: &[f64], sigma_l: f64) -> DMatrix<f64> {
    let n = loads.len();
    DMatrix::from_fn(n, n, |a, b| {
        if a == b {
            0.0
        } else {
            let diff = loads[a] - loads[b];
            (diff * diff / (2.0 * sigma_l * sigma_l)).exp()
        }
    })
}

/// `y = d^Ω · l^(1-Ω)` on linked pairs, zero elsewhere.
pub fn joint_affinity(
    d: &DMatrix<f64>,
    l: &DMatrix<f64>,
    omega: f64,
    mask: &[Vec<bool>],
) -> DMatrix<f64> {
    let n = d.nrows();
    DMatrix::from_fn(n, n, |a, b| {
        if mask[a][b] {
            d[(a, b)].powf(omega) * l[(a, b)].powf(1.0 - omega)
        } else {
            0.0
        }
    })
}

/// Disjoint SCBS groups covering every SCBS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPartition {
    /// Cluster id per SCBS.
    pub assignment: Vec<usize>,
    /// SCBS ids per cluster, each sorted; clusters ordered by their first SCBS.
    pub clusters: Vec<Vec<usize>>,
}

impl ClusterPartition {
    pub fn single(n: usize) -> Self {
        ClusterPartition::from_groups(n, vec![(0..n).collect()])
    }

    pub fn singletons(n: usize) -> Self {
        ClusterPartition::from_groups(n, (0..n).map(|s| vec![s]).collect())
    }

    /// Builds a canonical partition; empty groups are dropped.
    pub fn from_groups(n: usize, groups: Vec<Vec<usize>>) -> Self {
        let mut clusters: Vec<Vec<usize>> = groups
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(|mut g| {
                g.sort_unstable();
                g
            })
            .collect();
        clusters.sort_by_key(|g| g[0]);
        let mut assignment = vec![usize::MAX; n];
        for (c, g) in clusters.iter().enumerate() {
            for &s in g {
                assignment[s] = c;
            }
        }
        ClusterPartition {
            assignment,
            clusters,
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Non-empty, pairwise-disjoint sets covering `0..n`.
    pub fn check(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for (c, g) in self.clusters.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::Invariant(format!("cluster {c} is empty")));
            }
            for &s in g {
                if s >= n || seen[s] {
                    return Err(Error::Invariant(format!("SCBS {s} repeated or out of range")));
                }
                seen[s] = true;
                if self.assignment.get(s) != Some(&c) {
                    return Err(Error::Invariant(format!("assignment of SCBS {s} disagrees")));
                }
            }
        }
        if let Some(s) = seen.iter().position(|&x| !x) {
            return Err(Error::Invariant(format!("SCBS {s} belongs to no cluster")));
        }
        Ok(())
    }

    /// `{"cluster_id": [scbs...], "ue_assignment": {ue: cluster}}`.
    pub fn to_json(&self, anchors: &[usize]) -> serde_json::Value {
        let clusters: BTreeMap<String, &Vec<usize>> = self
            .clusters
            .iter()
            .enumerate()
            .map(|(c, g)| (c.to_string(), g))
            .collect();
        let ues: BTreeMap<String, usize> = anchors
            .iter()
            .enumerate()
            .map(|(m, &n)| (m.to_string(), self.assignment[n]))
            .collect();
        serde_json::json!({ "clusters": clusters, "ue_assignment": ues })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub k_min: usize,
    pub k_max: usize,
    pub restarts: usize,
    pub max_iter: usize,
}

impl SpectralOptions {
    /// `k_min = 2`, `k_max = ⌈N/2 + 1⌉`.
    pub fn for_network(n: usize) -> Self {
        SpectralOptions {
            k_min: 2,
            k_max: n.div_ceil(2) + 1,
            restarts: 20,
            max_iter: 100,
        }
    }
}

/// Partition plus the diagnostics of the eigengap selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralOutcome {
    pub partition: ClusterPartition,
    /// Ascending eigenvalues of the normalised Laplacian of the linked SCBSs.
    pub eigenvalues: Vec<f64>,
    pub chosen_k: usize,
    /// The eigengap window was empty and `k_min` was used.
    pub window_fallback: bool,
}

pub fn spectral_cluster(y: &DMatrix<f64>, opts: SpectralOptions, seed: u64) -> Result<SpectralOutcome> {
    let n = y.nrows();
    if y.ncols() != n {
        return Err(Error::domain("affinity matrix must be square"));
    }
    if opts.k_min == 0 || opts.k_min > opts.k_max {
        return Err(Error::config(format!(
            "need 1 <= k_min <= k_max, got {} / {}",
            opts.k_min, opts.k_max
        )));
    }
    for a in 0..n {
        for b in 0..n {
            let v = y[(a, b)];
            if v < 0.0 || !v.is_finite() || (v - y[(b, a)]).abs() > 1e-9 * v.abs().max(1.0) {
                return Err(Error::domain("affinity must be symmetric, finite and non-negative"));
            }
        }
    }

    let degree: Vec<f64> = (0..n).map(|a| y.row(a).sum()).collect();
    let (linked, isolated): (Vec<usize>, Vec<usize>) = (0..n).partition(|&a| degree[a] > 0.0);
    let mut groups: Vec<Vec<usize>> = isolated.iter().map(|&s| vec![s]).collect();

    let r = linked.len();
    if r < opts.k_min {
        if r > 0 {
            groups.push(linked);
        }
        return Ok(SpectralOutcome {
            partition: ClusterPartition::from_groups(n, groups),
            eigenvalues: Vec::new(),
            chosen_k: usize::from(r > 0),
            window_fallback: true,
        });
    }

    let inv_sqrt: Vec<f64> = linked.iter().map(|&a| degree[a].powf(-0.5)).collect();
    let laplacian = DMatrix::from_fn(r, r, |i, j| {
        let (a, b) = (linked[i], linked[j]);
        let z = if i == j { degree[a] - y[(a, b)] } else { -y[(a, b)] };
        inv_sqrt[i] * z * inv_sqrt[j]
    });
    let eig = SymmetricEigen::new(laplacian);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let (k, window_fallback) = select_k(&eigenvalues, opts.k_min, opts.k_max);

    let embedding: Vec<Vec<f64>> = (0..r)
        .map(|row| {
            let mut v: Vec<f64> = order[..k].iter().map(|&c| eig.eigenvectors[(row, c)]).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            }
            v
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = kmeans(&embedding, k, opts.restarts, opts.max_iter, &mut rng);
    let mut by_label = vec![Vec::new(); k];
    for (i, &lab) in labels.iter().enumerate() {
        by_label[lab].push(linked[i]);
    }
    groups.extend(by_label);

    Ok(SpectralOutcome {
        partition: ClusterPartition::from_groups(n, groups),
        eigenvalues,
        chosen_k: k,
        window_fallback,
    })
}

/// Largest gap `λ_{i+1} - λ_i` for `i` in `k_min..k_max` (1-based, inclusive
/// of `k_max - 1`); ties go to the smaller `i`.
fn select_k(eigenvalues: &[f64], k_min: usize, k_max: usize) -> (usize, bool) {
    let r = eigenvalues.len();
    let hi = k_max.min(r);
    let mut best: Option<(usize, f64)> = None;
    for i in k_min..hi {
        let gap = eigenvalues[i] - eigenvalues[i - 1];
        if best.is_none_or(|(_, g)| gap > g) {
            best = Some((i, gap));
        }
    }
    match best {
        Some((k, _)) => (k, false),
        None => (k_min.min(r), true),
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's k-means with k-means++ seeding; best of `restarts` by inertia.
pub fn kmeans(points: &[Vec<f64>], k: usize, restarts: usize, max_iter: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = points.len();
    if k <= 1 || n == 0 {
        return vec![0; n];
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let mut centers = kmeans_pp_init(points, k, rng);
        let mut labels = vec![0; n];
        for _ in 0..max_iter {
            let mut changed = false;
            for (i, p) in points.iter().enumerate() {
                let lab = nearest(p, &centers).0;
                if lab != labels[i] {
                    labels[i] = lab;
                    changed = true;
                }
            }
            let dim = points[0].len();
            let mut sums = vec![vec![0.0; dim]; k];
            let mut counts = vec![0usize; k];
            for (p, &lab) in points.iter().zip(&labels) {
                counts[lab] += 1;
                sums[lab].iter_mut().zip(p).for_each(|(s, x)| *s += x);
            }
            for c in 0..k {
                if counts[c] == 0 {
                    // reseed an empty cluster at the worst-served point
                    let far = (0..n)
                        .max_by(|&a, &b| {
                            nearest(&points[a], &centers).1.total_cmp(&nearest(&points[b], &centers).1)
                        })
                        .unwrap_or(0);
                    centers[c] = points[far].clone();
                    changed = true;
                } else {
                    centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
                }
            }
            if !changed {
                break;
            }
        }
        for (i, p) in points.iter().enumerate() {
            labels[i] = nearest(p, &centers).0;
        }
        let inertia: f64 = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    best.map(|(_, l)| l).unwrap_or_default()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(c, ctr)| (c, sq_dist(p, ctr)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
}

fn kmeans_pp_init(points: &[Vec<f64>], k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    while centers.len() < k {
        let d2: Vec<f64> = points.iter().map(|p| nearest(p, &centers).1).collect();
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[idx].clone());
    }
    centers
}

/// UEs per cluster: each UE follows its anchor SCBS.
pub fn assign_ue_clusters(partition: &ClusterPartition, anchors: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); partition.len()];
    for (m, &n) in anchors.iter().enumerate() {
        out[partition.assignment[n]].push(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_similarity_values() {
        let pts = [Point::new(0.0, 0.0), Point::new(100.0, 0.0), Point::new(400.0, 0.0), Point::new(0.0, 0.0)];
        let d = distance_similarity(&pts, 200.0, 100.0);
        assert!((d[(0, 1)] - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(d[(0, 2)], 0.0);
        assert_eq!(d[(0, 0)], 0.0);
        // co-located: clamped to 1 m
        assert!((d[(0, 3)] - (-1.0 / 20000.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn load_dissimilarity_values() {
        let l = load_dissimilarity(&[0.0, 1.0, 0.0], 1.0);
        assert!((l[(0, 1)] - 0.5f64.exp()).abs() < 1e-15);
        assert_eq!(l[(0, 2)], 1.0);
    }

    #[test]
    fn joint_affinity_exponents() {
        let d = DMatrix::from_row_slice(2, 2, &[0.0, 0.6065, 0.6065, 0.0]);
        let l = DMatrix::from_row_slice(2, 2, &[0.0, 1.6487, 1.6487, 0.0]);
        let mask = vec![vec![false, true], vec![true, false]];
        assert_eq!(joint_affinity(&d, &l, 1.0, &mask), d);
        assert_eq!(joint_affinity(&d, &l, 0.0, &mask), l);
        let y = joint_affinity(&d, &l, 0.5, &mask);
        assert!((y[(0, 1)] - 1.0).abs() < 1e-4);
        let none = vec![vec![false; 2]; 2];
        assert_eq!(joint_affinity(&d, &l, 0.5, &none), DMatrix::zeros(2, 2));
    }

    #[test]
    fn zero_affinity_gives_singletons() {
        let out = spectral_cluster(&DMatrix::zeros(4, 4), SpectralOptions::for_network(4), 1).unwrap();
        assert_eq!(out.partition, ClusterPartition::singletons(4));
    }

    #[test]
    fn single_scbs() {
        let out = spectral_cluster(&DMatrix::zeros(1, 1), SpectralOptions::for_network(1), 1).unwrap();
        assert_eq!(out.partition.clusters, vec![vec![0]]);
    }

    #[test]
    fn two_blocks_recovered() {
        let mut y = DMatrix::zeros(6, 6);
        for (a, b) in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)] {
            y[(a, b)] = 0.8;
            y[(b, a)] = 0.8;
        }
        let out = spectral_cluster(&y, SpectralOptions::for_network(6), 7).unwrap();
        assert_eq!(out.partition.clusters, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(out.chosen_k, 2);
        assert!(out.eigenvalues[0].abs() < 1e-9 && out.eigenvalues[1].abs() < 1e-9);
    }

    #[test]
    fn eigengap_ties_prefer_smaller_k() {
        assert_eq!(select_k(&[0.0, 0.0, 1.0, 2.0], 2, 4), (2, false));
        assert_eq!(select_k(&[0.0, 0.5], 2, 2), (2, true));
    }

    #[test]
    fn rejects_bad_input() {
        let y = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(spectral_cluster(&y, SpectralOptions::for_network(2), 1).is_err());
        let opts = SpectralOptions { k_min: 3, k_max: 2, restarts: 1, max_iter: 1 };
        assert!(spectral_cluster(&DMatrix::zeros(2, 2), opts, 1).is_err());
    }

    #[test]
    fn ues_follow_anchor() {
        let p = ClusterPartition::from_groups(3, vec![vec![2], vec![0, 1]]);
        assert_eq!(p.clusters, vec![vec![0, 1], vec![2]]);
        let ues = assign_ue_clusters(&p, &[2, 0, 1, 2]);
        assert_eq!(ues, vec![vec![1, 2], vec![0, 3]]);
    }
}
