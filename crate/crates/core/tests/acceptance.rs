//! Acceptance criteria 1-10. Each test prints one `criterion N: PASS|FAIL` line.

mod common;

use std::collections::{BTreeMap, VecDeque};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use social_assoc::clustering::{
    distance_similarity, joint_affinity, link_mask, load_dissimilarity, spectral_cluster,
    ClusterPartition, SpectralOptions,
};
use social_assoc::geometry::Point;
use social_assoc::matching::{
    brute_force_optimum, is_pairwise_stable, run_cluster_matching, AnnealSchedule, ClusterView,
};
use social_assoc::sim::{export_results, overhead_bounds, run_experiment, Approach, ScenarioConfig};
use social_assoc::social::{
    edge_betweenness, edge_betweenness_raw, rank_candidates, social_distance, BetweennessNorm,
    SocialGraph,
};

fn report(n: u32, ok: bool, detail: &str, elapsed: Duration, limit: Option<Duration>) {
    let in_time = limit.is_none_or(|l| elapsed < l);
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} ({detail}; {:.2?})", elapsed);
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(in_time, "criterion {n} exceeded its runtime budget: {elapsed:.2?}");
}

#[test]
fn criterion_01_example_social_distance() {
    let start = Instant::now();
    let s7 = 7.0 / 12.0;
    let s = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, s7, s7, 0.25, //
            s7, 0.0, 0.5, 0.5, //
            s7, 0.5, 0.0, 0.5, //
            0.25, 0.5, 0.5, 0.0,
        ],
    );
    let a = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.075, 0.075, 0.1, //
            0.075, 0.0, 0.05, 0.0, //
            0.075, 0.05, 0.0, 0.0, //
            0.1, 0.0, 0.0, 0.0,
        ],
    );
    let expected = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.3292, 0.3292, 0.1750, //
            0.3292, 0.0, 0.2750, 0.2500, //
            0.3292, 0.2750, 0.0, 0.2500, //
            0.1750, 0.2500, 0.2500, 0.0,
        ],
    );
    let w = social_distance(&s, &a, 0.5, 0.5).unwrap();
    let mut worst: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            if r != c {
                worst = worst.max((w[(r, c)] - expected[(r, c)]).abs());
            }
        }
    }
    let x = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0432, 0.0411, 0.0124, //
            0.0432, 0.0, 0.0320, 0.0117, //
            0.0411, 0.0320, 0.0, 0.0121, //
            0.0124, 0.0117, 0.0121, 0.0,
        ],
    );
    let ranked = rank_candidates(&x, &[0, 1, 2, 3]);
    let order: Vec<usize> = ranked.iter().map(|c| c.ue).collect();
    let ok = worst <= 5e-5 && order[0] == 0 && order[3] == 3;
    report(
        1,
        ok,
        &format!("max |W - W_ref| = {worst:.2e}, ranking m{}", order.iter().map(|u| (u + 1).to_string()).collect::<Vec<_>>().join(" > m")),
        start.elapsed(),
        Some(Duration::from_secs(1)),
    );
}

type Q = Ratio<i64>;

/// Sum over unordered vertex pairs of the fraction of shortest paths using
/// each edge, by explicit path enumeration.
fn brute_betweenness(g: &SocialGraph) -> BTreeMap<(usize, usize), Q> {
    let n = g.len();
    let mut out: BTreeMap<(usize, usize), Q> = g.edges().into_iter().map(|e| (e, Q::from_integer(0))).collect();
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for t in (s + 1)..n {
            if dist[t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let u = *path.last().unwrap();
                if u == t {
                    paths.push(path);
                    continue;
                }
                for &v in g.neighbors(u) {
                    if dist[v] == dist[u] + 1 && dist[v] <= dist[t] {
                        let mut p = path.clone();
                        p.push(v);
                        stack.push(p);
                    }
                }
            }
            let paths: Vec<Vec<usize>> = paths.into_iter().filter(|p| p.len() == dist[t] + 1).collect();
            let total = paths.len() as i64;
            for p in &paths {
                for w in p.windows(2) {
                    let e = (w[0].min(w[1]), w[0].max(w[1]));
                    *out.get_mut(&e).unwrap() += Q::new(1, total);
                }
            }
        }
    }
    out
}

#[test]
fn criterion_02_betweenness_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut edges_checked = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=8usize);
        let p = rng.random_range(0.15..0.9);
        let g = common::random_graph(n, p, &mut rng);
        let oracle = brute_betweenness(&g);
        let fast: BTreeMap<(usize, usize), Q> = edge_betweenness_raw::<Q>(&g).into_iter().collect();
        if fast != oracle {
            mismatches += 1;
            continue;
        }
        let norm = edge_betweenness(&g, BetweennessNorm::SquaredOrder);
        let div = BetweennessNorm::SquaredOrder.divisor(n);
        for (&(u, v), q) in &oracle {
            edges_checked += 1;
            let want = *q.numer() as f64 / *q.denom() as f64 / div;
            if (norm[(u, v)] - want).abs() > 1e-12 || norm[(u, v)] != norm[(v, u)] {
                mismatches += 1;
            }
        }
    }
    report(
        2,
        mismatches == 0,
        &format!("200 graphs, {edges_checked} edges, {mismatches} mismatches"),
        start.elapsed(),
        Some(Duration::from_secs(30)),
    );
}

struct TinyOutcome {
    stable: bool,
    ratio: f64,
    approved: usize,
    violations: usize,
    monotone: bool,
}

fn tiny_outcomes() -> Vec<TinyOutcome> {
    (0..50u64)
        .map(|k| {
            let net = common::tiny_instance(1000 + k);
            let cluster = ClusterView::whole_network(&net);
            assert!(cluster.ues.len() <= 8 && cluster.nodes.len() <= 4);
            let init = net.anchor_association();
            let run = run_cluster_matching(&net, &cluster, &init, &AnnealSchedule::default(), k, 0).unwrap();
            let (_, optimum) = brute_force_optimum(&net, &cluster, &init).unwrap();
            TinyOutcome {
                stable: is_pairwise_stable(&net, &cluster, &run.best, false).stable,
                ratio: if optimum > 0.0 { run.best_welfare / optimum } else { 1.0 },
                approved: run.lemma.approved,
                violations: run.lemma.violations,
                monotone: run.trace.windows(2).all(|w| w[1].gamma_best >= w[0].gamma_best),
            }
        })
        .collect()
}

#[test]
fn criterion_03_pairwise_stability() {
    let start = Instant::now();
    let out = tiny_outcomes();
    let stable = out.iter().filter(|o| o.stable).count();
    report(
        3,
        stable == out.len(),
        &format!("{stable}/{} matchings pairwise stable", out.len()),
        start.elapsed(),
        Some(Duration::from_secs(60)),
    );
}

#[test]
fn criterion_04_oracle_gap() {
    let start = Instant::now();
    let out = tiny_outcomes();
    let close = out.iter().filter(|o| o.ratio >= 0.95).count();
    let worst = out.iter().map(|o| o.ratio).fold(f64::INFINITY, f64::min);
    report(
        4,
        close * 10 >= out.len() * 9,
        &format!("{close}/{} within 95% of the optimum, worst ratio {worst:.4}", out.len()),
        start.elapsed(),
        Some(Duration::from_secs(120)),
    );
}

#[test]
fn criterion_05_lemma1() {
    let start = Instant::now();
    let out = tiny_outcomes();
    let approved: usize = out.iter().map(|o| o.approved).sum();
    let violations: usize = out.iter().map(|o| o.violations).sum();
    report(
        5,
        violations == 0,
        &format!("{approved} approved swaps, {violations} without a strict welfare gain"),
        start.elapsed(),
        None,
    );
}

#[test]
fn criterion_06_monotone_best_trace() {
    let start = Instant::now();
    let tiny = tiny_outcomes();
    let cfg = ScenarioConfig {
        runs: 5,
        ..ScenarioConfig::default()
    };
    let res = run_experiment(&cfg, &[Approach::Proposed]).unwrap();
    let mut by_cluster: BTreeMap<(usize, usize, usize), Vec<f64>> = BTreeMap::new();
    for run in &res.runs {
        for tr in &run.trace {
            by_cluster
                .entry((tr.run, tr.row.t, tr.row.cluster))
                .or_default()
                .push(tr.row.gamma_best);
        }
    }
    let full_ok = by_cluster.values().all(|g| g.windows(2).all(|w| w[1] >= w[0]));
    let tiny_ok = tiny.iter().all(|o| o.monotone);
    report(
        6,
        full_ok && tiny_ok,
        &format!("{} tiny runs and {} cluster traces checked", tiny.len(), by_cluster.len()),
        start.elapsed(),
        None,
    );
}

fn components(mask: &[Vec<bool>]) -> ClusterPartition {
    let n = mask.len();
    let mut label = vec![usize::MAX; n];
    let mut groups = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let mut group = vec![s];
        label[s] = groups.len();
        let mut k = 0;
        while k < group.len() {
            let u = group[k];
            for v in 0..n {
                if mask[u][v] && label[v] == usize::MAX {
                    label[v] = groups.len();
                    group.push(v);
                }
            }
            k += 1;
        }
        groups.push(group);
    }
    ClusterPartition::from_groups(n, groups)
}

#[test]
fn criterion_07_clustering_invariants() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (radius, sigma_d, sigma_l): (f64, f64, f64) = (200.0, 100.0, 1.0);
    let d_low = (-(radius * radius) / (2.0 * sigma_d * sigma_d)).exp();
    let l_high = (1.0 / (2.0 * sigma_l * sigma_l)).exp();
    let mut failures = Vec::new();
    for k in 0..100u64 {
        let n = rng.random_range(1..=16usize);
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(0.0..500.0), rng.random_range(0.0..500.0)))
            .collect();
        let loads: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mask = link_mask(&pts, radius);
        let d = distance_similarity(&pts, radius, sigma_d);
        let l = load_dissimilarity(&loads, sigma_l);
        for a in 0..n {
            for b in 0..n {
                if mask[a][b] && !(d[(a, b)] >= d_low - 1e-12 && d[(a, b)] <= 1.0) {
                    failures.push(format!("topology {k}: D[{a},{b}] = {}", d[(a, b)]));
                }
                if mask[a][b] && !(l[(a, b)] >= 1.0 && l[(a, b)] <= l_high + 1e-12) {
                    failures.push(format!("topology {k}: L[{a},{b}] = {}", l[(a, b)]));
                }
            }
        }
        let y = joint_affinity(&d, &l, 0.5, &mask);
        let out = spectral_cluster(&y, SpectralOptions::for_network(n), k).unwrap();
        if let Err(e) = out.partition.check(n) {
            failures.push(format!("topology {k}: {e}"));
        }

        // well separated tight groups
        let g = rng.random_range(2..=3usize);
        let mut bpts = Vec::new();
        for c in 0..g {
            let center = Point::new(1000.0 * c as f64, 0.0);
            for _ in 0..rng.random_range(2..=4usize) {
                bpts.push(Point::new(
                    center.x + rng.random_range(-25.0..25.0),
                    center.y + rng.random_range(-25.0..25.0),
                ));
            }
        }
        let bn = bpts.len();
        let bloads: Vec<f64> = (0..bn).map(|_| rng.random::<f64>()).collect();
        let bmask = link_mask(&bpts, radius);
        let by = joint_affinity(
            &distance_similarity(&bpts, radius, sigma_d),
            &load_dissimilarity(&bloads, sigma_l),
            0.5,
            &bmask,
        );
        let opts = SpectralOptions::for_network(bn);
        if g >= opts.k_min && g <= opts.k_max {
            let got = spectral_cluster(&by, opts, k).unwrap().partition;
            if got != components(&bmask) {
                failures.push(format!("topology {k}: blocks not recovered: {:?}", got.clusters));
            }
        }
    }
    report(
        7,
        failures.is_empty(),
        &format!("100 topologies, {} failures {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
        start.elapsed(),
        Some(Duration::from_secs(30)),
    );
}

#[test]
fn criterion_08_trend() {
    let start = Instant::now();
    let cfg = ScenarioConfig {
        n_scbs: 8,
        ues_per_scbs: 10,
        runs: 20,
        ..ScenarioConfig::default()
    };
    let res = run_experiment(&cfg, &Approach::ALL).unwrap();
    let get = |a| res.report.get(a).unwrap().avg_sum_rate;
    let (p, m, r) = (get(Approach::Proposed), get(Approach::MaxRssi), get(Approach::Random));
    report(
        8,
        p > m && m > r,
        &format!(
            "mean sum rate proposed {:.2} > max-RSSI {:.2} > random {:.2} Mbit/s",
            p / 1e6,
            m / 1e6,
            r / 1e6
        ),
        start.elapsed(),
        Some(Duration::from_secs(300)),
    );
}

/// Hand evaluation: the per-iteration message counts summed term by term.
fn overhead_by_hand(m_c: i64, phi_s: i64, phi_c: i64) -> i64 {
    if m_c <= phi_c {
        let t_max = m_c / phi_s;
        (1..=t_max).map(|t| m_c - phi_s * t + phi_s).sum()
    } else {
        (1..=phi_c).map(|t| m_c - phi_s * t).sum()
    }
}

#[test]
fn criterion_09_overhead_bounds() {
    let start = Instant::now();
    let tuples: [(i64, i64, i64); 20] = [
        (10, 1, 10),
        (10, 1, 12),
        (10, 2, 10),
        (10, 5, 20),
        (10, 10, 10),
        (6, 3, 6),
        (12, 4, 15),
        (20, 1, 20),
        (1, 1, 1),
        (8, 2, 9),
        (10, 1, 0),
        (10, 1, 3),
        (10, 2, 4),
        (15, 3, 4),
        (30, 5, 5),
        (9, 1, 8),
        (40, 7, 5),
        (25, 2, 10),
        (12, 1, 11),
        (100, 9, 11),
    ];
    let mut bad = Vec::new();
    for (m, s, c) in tuples {
        let got = overhead_bounds(m as usize, s as f64, c as usize).unwrap();
        let want = overhead_by_hand(m, s, c) as f64;
        if got != want {
            bad.push((m, s, c, got, want));
        }
    }
    let ten = overhead_bounds(10, 1.0, 10).unwrap();
    report(
        9,
        bad.is_empty() && ten == 55.0,
        &format!("20 tuples, M_c=10 Phi_s=1 gives {ten}, mismatches {bad:?}"),
        start.elapsed(),
        None,
    );
}

#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    let cfg = ScenarioConfig {
        runs: 4,
        seed: 42,
        ..ScenarioConfig::default()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = export_results(&run_experiment(&cfg, &Approach::ALL).unwrap(), a.path()).unwrap();
    let pb = export_results(&run_experiment(&cfg, &Approach::ALL).unwrap(), b.path()).unwrap();
    let same = |x: &std::path::Path, y: &std::path::Path| std::fs::read(x).unwrap() == std::fs::read(y).unwrap();
    let files = [
        ("summary.json", same(&pa.summary, &pb.summary)),
        ("cdf.csv", same(&pa.cdf, &pb.cdf)),
        ("trace.csv", same(&pa.trace, &pb.trace)),
    ];
    let differing: Vec<&str> = files.iter().filter(|f| !f.1).map(|f| f.0).collect();
    report(
        10,
        differing.is_empty(),
        &format!("summary.json, cdf.csv, trace.csv compared; differing: {differing:?}"),
        start.elapsed(),
        None,
    );
}
