//! UE social graph and the social-importance metrics derived from it:
//! common-neighbour similarity, edge betweenness, social distance, the
//! distance-weighted cost, and per-SCBS important-UE election.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_traits::Num;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::wireless::NetworkTopology;

/// Largest social distance fed into the `1/(1-w)` weight.
pub const MAX_SOCIAL_DISTANCE: f64 = 1.0 - 1e-6;

/// Undirected, unweighted social graph over UEs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    adjacency: Vec<Vec<bool>>,
    neighbors: Vec<Vec<usize>>,
}

impl SocialGraph {
    pub fn empty(n: usize) -> Self {
        SocialGraph {
            adjacency: vec![vec![false; n]; n],
            neighbors: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = SocialGraph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.len();
        if u >= n || v >= n {
            return Err(Error::config(format!(
                "edge ({u}, {v}) references a UE outside 0..{n}"
            )));
        }
        if u == v {
            return Err(Error::config(format!("self-loop on UE {u}")));
        }
        if !self.adjacency[u][v] {
            self.adjacency[u][v] = true;
            self.adjacency[v][u] = true;
            insert_sorted(&mut self.neighbors[u], v);
            insert_sorted(&mut self.neighbors[v], u);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u][v]
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors[u].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|u| {
                self.neighbors[u]
                    .iter()
                    .filter(move |&&v| v > u)
                    .map(move |&v| (u, v))
            })
            .collect()
    }

    /// Connected-component label per vertex, labels assigned in vertex order.
    pub fn components(&self) -> Vec<usize> {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.neighbors[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Parses a `u v` edge list (0-indexed, `#` comments allowed). When `n`
    /// is `None` the vertex count is one past the largest id seen.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.and_then(|t| t.parse().ok()).ok_or_else(|| {
                    Error::config(format!("edge list line {}: expected `u v`", lineno + 1))
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::config(format!(
                    "edge list line {}: trailing tokens",
                    lineno + 1
                )));
            }
            edges.push((u, v));
        }
        let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        SocialGraph::from_edges(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn read_edge_list(path: &Path, n: Option<usize>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SocialGraph::parse_edge_list(&text, n).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

/// Common-neighbour similarity: for each pair in the same component, the
/// sum of `1/degree` over their common neighbours.
pub fn raw_similarity(graph: &SocialGraph) -> DMatrix<f64> {
    let n = graph.len();
    let comp = graph.components();
    let mut q = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            if comp[a] != comp[b] {
                continue;
            }
            let (na, nb) = (graph.neighbors(a), graph.neighbors(b));
            let (mut i, mut j, mut sum) = (0, 0, 0.0);
            while i < na.len() && j < nb.len() {
                match na[i].cmp(&nb[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        sum += 1.0 / graph.degree(na[i]) as f64;
                        i += 1;
                        j += 1;
                    }
                }
            }
            q[(a, b)] = sum;
            q[(b, a)] = sum;
        }
    }
    q
}

/// SAW normalisation: divide each column by its maximum. All-zero columns
/// stay zero.
pub fn normalize_saw_columns(q: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = q.clone();
    for mut col in s.column_iter_mut() {
        let max = col.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            col /= max;
        }
    }
    s
}

/// SAW normalisation followed by `(S + Sᵀ)/2`.
pub fn normalize_saw(q: &DMatrix<f64>) -> DMatrix<f64> {
    let s = normalize_saw_columns(q);
    (&s + s.transpose()) * 0.5
}

/// Divisor applied to raw edge-betweenness sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetweennessNorm {
    /// `(M-1)²`
    #[default]
    SquaredOrder,
    /// `M(M-1)/2`, the number of unordered pairs
    PairCount,
}

impl BetweennessNorm {
    pub fn divisor(self, m: usize) -> f64 {
        let m = m as f64;
        match self {
            BetweennessNorm::SquaredOrder => (m - 1.0) * (m - 1.0),
            BetweennessNorm::PairCount => m * (m - 1.0) / 2.0,
        }
    }
}

/// Un-normalised edge betweenness: for every edge `(u, v)` with `u < v`,
/// the sum over unordered vertex pairs of the fraction of their shortest
/// paths that traverse it. Brandes' accumulation, generic over the scalar
/// so it can run on exact rationals.
pub fn edge_betweenness_raw<T: Num + Copy>(graph: &SocialGraph) -> Vec<((usize, usize), T)> {
    let n = graph.len();
    let index_of = |u: usize, v: usize| -> (usize, usize) { (u.min(v), u.max(v)) };
    let edges = graph.edges();
    let mut score = vec![T::zero(); edges.len()];
    let edge_slot = |u: usize, v: usize| edges.binary_search(&index_of(u, v)).expect("edge");

    let mut sigma = vec![T::zero(); n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![T::zero(); n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        sigma.fill(T::zero());
        dist.fill(usize::MAX);
        delta.fill(T::zero());
        preds.iter_mut().for_each(Vec::clear);
        order.clear();

        sigma[s] = T::one();
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in graph.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] = sigma[w] + sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = order.pop() {
            for &v in &preds[w] {
                let c = sigma[v] / sigma[w] * (T::one() + delta[w]);
                let slot = edge_slot(v, w);
                score[slot] = score[slot] + c;
                delta[v] = delta[v] + c;
            }
        }
    }
    // every unordered pair was counted from both endpoints
    let two = T::one() + T::one();
    edges.into_iter().zip(score).map(|(e, s)| (e, s / two)).collect()
}

/// Normalised edge-betweenness matrix; zero on non-edges and the diagonal.
pub fn edge_betweenness(graph: &SocialGraph, norm: BetweennessNorm) -> DMatrix<f64> {
    let n = graph.len();
    let mut a = DMatrix::zeros(n, n);
    if n < 2 {
        return a;
    }
    let div = norm.divisor(n);
    for ((u, v), raw) in edge_betweenness_raw::<f64>(graph) {
        a[(u, v)] = raw / div;
        a[(v, u)] = raw / div;
    }
    a
}

/// `W = αS + βA`.
pub fn social_distance(
    s: &DMatrix<f64>,
    a: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
) -> Result<DMatrix<f64>> {
    if alpha < 0.0 || beta < 0.0 || (alpha + beta - 1.0).abs() > 1e-9 {
        return Err(Error::config(format!(
            "social weights must be non-negative and sum to 1 (alpha={alpha}, beta={beta})"
        )));
    }
    if s.shape() != a.shape() {
        return Err(Error::domain("similarity and betweenness shapes differ"));
    }
    Ok(s * alpha + a * beta)
}

/// `x = ε·w/d` with distances clamped at 1 m and a zero diagonal.
pub fn weighted_cost(w: &DMatrix<f64>, positions: &[Point], epsilon: f64) -> DMatrix<f64> {
    let n = w.nrows();
    DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            0.0
        } else {
            epsilon * w[(r, c)] / positions[r].clamped_distance(&positions[c])
        }
    })
}

/// Parameters of the social-importance pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocialParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub betweenness_norm: BetweennessNorm,
}

impl Default for SocialParams {
    fn default() -> Self {
        SocialParams {
            alpha: 0.5,
            beta: 0.5,
            epsilon: 1.0,
            betweenness_norm: BetweennessNorm::SquaredOrder,
        }
    }
}

/// All matrices derived from a social graph and UE positions.
#[derive(Debug, Clone)]
pub struct SocialMatrices {
    pub raw_similarity: DMatrix<f64>,
    pub similarity: DMatrix<f64>,
    pub betweenness: DMatrix<f64>,
    pub distance: DMatrix<f64>,
    pub cost: DMatrix<f64>,
    pub params: SocialParams,
}

impl SocialMatrices {
    pub fn compute(graph: &SocialGraph, positions: &[Point], params: SocialParams) -> Result<Self> {
        if positions.len() != graph.len() {
            return Err(Error::config(format!(
                "social graph has {} vertices but there are {} UEs",
                graph.len(),
                positions.len()
            )));
        }
        let raw_similarity = raw_similarity(graph);
        let similarity = normalize_saw(&raw_similarity);
        let betweenness = edge_betweenness(graph, params.betweenness_norm);
        let distance = social_distance(&similarity, &betweenness, params.alpha, params.beta)?;
        let cost = weighted_cost(&distance, positions, params.epsilon);
        Ok(SocialMatrices {
            raw_similarity,
            similarity,
            betweenness,
            distance,
            cost,
            params,
        })
    }

    /// Social distance clamped below 1 for the `1/(1-w)` weight.
    pub fn tie_strength(&self, a: usize, b: usize) -> f64 {
        self.distance[(a, b)].min(MAX_SOCIAL_DISTANCE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub ue: usize,
    pub score: f64,
}

/// Ranked important-UE candidates of one SCBS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Election {
    pub scbs: usize,
    pub ranked: Vec<Candidate>,
    pub elected: Vec<usize>,
}

/// Ranks `candidates` by aggregate weighted cost towards the other
/// candidates; ties go to the lower UE id.
pub fn rank_candidates(x: &DMatrix<f64>, candidates: &[usize]) -> Vec<Candidate> {
    let mut ranked: Vec<Candidate> = candidates
        .iter()
        .map(|&ue| Candidate {
            ue,
            score: candidates
                .iter()
                .filter(|&&m| m != ue)
                .map(|&m| x[(m, ue)])
                .sum(),
        })
        .collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.ue.cmp(&b.ue)));
    ranked
}

/// Elects up to `per_scbs` important UEs for SCBS `scbs` among the UEs
/// inside its coverage radius (further restricted by `eligible` when given).
pub fn elect_important(
    x: &DMatrix<f64>,
    scbs: usize,
    topology: &NetworkTopology,
    eligible: Option<&[bool]>,
    per_scbs: usize,
) -> Election {
    let candidates: Vec<usize> = (0..topology.n_ues())
        .filter(|&m| topology.scbs_ue_distance(scbs, m) <= topology.scbs_radius_m)
        .filter(|&m| eligible.is_none_or(|e| e[m]))
        .collect();
    let ranked = rank_candidates(x, &candidates);
    let elected = ranked.iter().take(per_scbs).map(|c| c.ue).collect();
    Election {
        scbs,
        ranked,
        elected,
    }
}

/// A D2D link needs a social tie and physical proximity.
pub fn d2d_link_exists(m: usize, i: usize, graph: &SocialGraph, topology: &NetworkTopology) -> bool {
    m != i && graph.has_edge(m, i) && topology.ue_distance(m, i) <= topology.d2d_radius_m
}

/// Random social-graph families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SocialModel {
    ErdosRenyi { p: f64 },
    WattsStrogatz { k: usize, rewire: f64 },
}

impl SocialModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SocialModel::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::config(format!("edge probability {p} outside [0, 1]")))
            }
            SocialModel::WattsStrogatz { k, .. } if k % 2 == 1 => {
                Err(Error::config(format!("Watts-Strogatz degree {k} must be even")))
            }
            SocialModel::WattsStrogatz { rewire, .. } if !(0.0..=1.0).contains(&rewire) => Err(
                Error::config(format!("rewiring probability {rewire} outside [0, 1]")),
            ),
            _ => Ok(()),
        }
    }
}

#[allow(clippy::needless_range_loop)]
pub fn generate_social_graph(m: usize, model: SocialModel, seed: u64) -> Result<SocialGraph> {
    if m == 0 {
        return Err(Error::config("social graph needs at least one UE"));
    }
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SocialGraph::empty(m);
    match model {
        SocialModel::ErdosRenyi { p } => {
            for u in 0..m {
                for v in (u + 1)..m {
                    if rng.random::<f64>() < p {
                        g.add_edge(u, v)?;
                    }
                }
            }
        }
        SocialModel::WattsStrogatz { k, rewire } => {
            if k >= m {
                return Err(Error::config(format!(
                    "Watts-Strogatz degree {k} needs more than {k} UEs, got {m}"
                )));
            }
            let mut adj = vec![vec![false; m]; m];
            for u in 0..m {
                for j in 1..=k / 2 {
                    let v = (u + j) % m;
                    adj[u][v] = true;
                    adj[v][u] = true;
                }
            }
            for j in 1..=k / 2 {
                for u in 0..m {
                    let v = (u + j) % m;
                    if !adj[u][v] || rng.random::<f64>() >= rewire {
                        continue;
                    }
                    let free: Vec<usize> = (0..m).filter(|&w| w != u && !adj[u][w]).collect();
                    if free.is_empty() {
                        continue;
                    }
                    let w = free[rng.random_range(0..free.len())];
                    adj[u][v] = false;
                    adj[v][u] = false;
                    adj[u][w] = true;
                    adj[w][u] = true;
                }
            }
            for u in 0..m {
                for v in (u + 1)..m {
                    if adj[u][v] {
                        g.add_edge(u, v)?;
                    }
                }
            }
        }
    }
    Ok(g)
}

/// CSV dump of a matrix, one row per line.
pub fn matrix_to_csv(matrix: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols()).map(|c| matrix[(r, c)].to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
