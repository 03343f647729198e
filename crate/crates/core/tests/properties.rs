mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use social_assoc::clustering::{
    distance_similarity, joint_affinity, link_mask, load_dissimilarity, spectral_cluster, SpectralOptions,
};
use social_assoc::geometry::Point;
use social_assoc::matching::{
    apply_swap, brute_force_optimum, check_lemma1, run_cluster_matching, sn_utility, ue_utility,
    AnnealSchedule, ClusterView, Proposal,
};
use social_assoc::network::ServingNode;
use social_assoc::sim::{overhead_bounds, percentile, ScenarioConfig};
use social_assoc::social::{edge_betweenness, normalize_saw, raw_similarity, BetweennessNorm, SocialMatrices, SocialParams};

fn points(n: usize, side: f64) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0..side, 0.0..side), n).prop_map(|v| v.into_iter().map(Point::from).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn social_matrices_are_symmetric_and_bounded(seed in any::<u64>(), n in 2usize..14, p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(n, p, &mut rng);
        let s = normalize_saw(&raw_similarity(&g));
        let a = edge_betweenness(&g, BetweennessNorm::SquaredOrder);
        let pos: Vec<Point> = (0..n).map(|i| Point::new(i as f64 * 7.0, 3.0)).collect();
        let sm = SocialMatrices::compute(&g, &pos, SocialParams::default()).unwrap();
        for r in 0..n {
            prop_assert_eq!(sm.distance[(r, r)], 0.0);
            for c in 0..n {
                prop_assert!((s[(r, c)] - s[(c, r)]).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&s[(r, c)]));
                prop_assert!((0.0..=1.0).contains(&a[(r, c)]));
                prop_assert_eq!(a[(r, c)], a[(c, r)]);
                prop_assert!(sm.distance[(r, c)] >= 0.0 && sm.distance[(r, c)] <= 1.0 + 1e-12);
                prop_assert!(sm.cost[(r, c)] >= 0.0);
                if !g.has_edge(r, c) {
                    prop_assert_eq!(a[(r, c)], 0.0);
                }
            }
        }
    }

    #[test]
    fn affinity_entries_respect_kernel_ranges(pos in points(6, 500.0), loads in prop::collection::vec(0.0f64..=1.0, 6), omega in 0.0f64..=1.0) {
        let mask = link_mask(&pos, 200.0);
        let d = distance_similarity(&pos, 200.0, 100.0);
        let l = load_dissimilarity(&loads, 1.0);
        let y = joint_affinity(&d, &l, omega, &mask);
        for a in 0..6 {
            for b in 0..6 {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&d[(a, b)]));
                if a != b {
                    prop_assert!((1.0..=0.5f64.exp() + 1e-12).contains(&l[(a, b)]));
                }
                prop_assert!(y[(a, b)] >= 0.0);
                if mask[a][b] && a != b {
                    prop_assert!(d[(a, b)] >= (-2.0f64).exp() - 1e-12);
                }
                prop_assert!((y[(a, b)] - y[(b, a)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_partition_covers_every_scbs(pos in points(7, 500.0), seed in any::<u64>()) {
        let mask = link_mask(&pos, 200.0);
        let d = distance_similarity(&pos, 200.0, 100.0);
        let l = load_dissimilarity(&[1.0; 7], 1.0);
        let y = joint_affinity(&d, &l, 0.5, &mask);
        let out = spectral_cluster(&y, SpectralOptions::for_network(7), seed).unwrap();
        out.partition.check(7).unwrap();
        let mut seen: Vec<usize> = out.partition.clusters.concat();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..7).collect::<Vec<_>>());
        prop_assert!(out.partition.clusters.iter().all(|c| !c.is_empty()));
    }

    #[test]
    fn percentile_matches_nearest_rank_bounds(mut xs in prop::collection::vec(-1e6f64..1e6, 1..60), q in 0.0f64..=1.0) {
        xs.sort_by(f64::total_cmp);
        let v = percentile(&xs, q).unwrap();
        let pos = q * (xs.len() - 1) as f64;
        prop_assert!(v >= xs[pos.floor() as usize] - 1e-9);
        prop_assert!(v <= xs[pos.ceil() as usize] + 1e-9);
        prop_assert_eq!(percentile(&xs, 0.0).unwrap(), xs[0]);
        prop_assert_eq!(percentile(&xs, 1.0).unwrap(), xs[xs.len() - 1]);
    }

    #[test]
    fn overhead_bound_is_monotone_in_cluster_size(m in 1usize..200, phi_c in 1usize..50) {
        let a = overhead_bounds(m, 1.0, phi_c).unwrap();
        let b = overhead_bounds(m + 1, 1.0, phi_c).unwrap();
        prop_assert!(b >= a);
        if m <= phi_c {
            prop_assert_eq!(a, (m * (m + 1)) as f64 / 2.0);
        }
    }

    #[test]
    fn config_text_round_trips(n_scbs in 1usize..20, omega in 0.0f64..=1.0, p in 0.0f64..=1.0, seed in any::<u64>(), sigma in 1e-3f64..1e3) {
        let cfg = ScenarioConfig { n_scbs, omega, social_p: p, seed, sigma_d: sigma, ..ScenarioConfig::default() };
        let back = ScenarioConfig::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn swap_is_an_involution_touching_two_entries(seed in 0u64..10_000, a in 0usize..8, b in 0usize..8) {
        let net = common::tiny_instance(seed);
        let c = ClusterView::whole_network(&net);
        let init = net.anchor_association();
        let n = net.n_ues();
        let (a, b) = (a % n, b % n);
        if let Ok(next) = apply_swap(&net, &c, &init, a, b) {
            let back = apply_swap(&net, &c, &next, a, b).unwrap();
            prop_assert_eq!(&back, &init);
            let diff = init.diff(&next);
            prop_assert!(diff.is_empty() || diff == vec![a.min(b), a.max(b)]);
        }
    }

    #[test]
    fn serving_node_utilities_sum_to_welfare(seed in 0u64..10_000) {
        let net = common::tiny_instance(seed);
        let init = net.anchor_association();
        let total: f64 = (0..net.n_ues()).map(|m| ue_utility(&net, &init, m)).sum();
        let mut nodes: Vec<ServingNode> = init.serving.clone();
        nodes.sort();
        nodes.dedup();
        let by_node: f64 = nodes.iter().map(|&p| sn_utility(&net, &init, p)).sum();
        prop_assert!((total - by_node).abs() <= 1e-9 * total.abs().max(1.0));
    }

    #[test]
    fn approved_swaps_never_lower_welfare(seed in 0u64..10_000, a in 0usize..8, b in 0usize..8) {
        let net = common::tiny_instance(seed);
        let c = ClusterView::whole_network(&net);
        let init = net.anchor_association();
        let n = net.n_ues();
        prop_assert_ne!(check_lemma1(&net, &c, &init, Proposal::Swap(a % n, b % n)), Some(false));
    }

    #[test]
    fn annealing_never_beats_the_exhaustive_optimum(seed in 0u64..10_000, rng_seed in any::<u64>()) {
        let net = common::tiny_instance(seed);
        let c = ClusterView::whole_network(&net);
        let init = net.anchor_association();
        let (_, opt) = brute_force_optimum(&net, &c, &init).unwrap();
        let run = run_cluster_matching(&net, &c, &init, &AnnealSchedule::default(), rng_seed, 0).unwrap();
        prop_assert!(run.best_welfare <= opt * (1.0 + 1e-9));
        prop_assert!(run.best_welfare >= run.initial_welfare);
    }
}
