mod common;

use multistab_core::analysis::{nvi, EnsembleMember, ScaleResult, ScaleSelection};
use multistab_core::graph::{parse_edge_list, write_edge_list};
use multistab_core::optimizer::{louvain_with, GeneralizedQualityMatrix, LouvainOptions};
use multistab_core::pipeline::{read_results, write_results};
use multistab_core::{
    build, evaluate_quality, exhaustive_argmax, ConstructorKind, ConstructorOptions, Graph,
    NullModel, Partition, QualityInstance, QualityMatrix, ScanConfig, ScanResult,
};
use proptest::prelude::*;

fn labels(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..n.max(1), n)
}

prop_compose! {
    fn partition_triple()(n in 1usize..=20)
        (a in labels(n), b in labels(n), c in labels(n)) -> (Partition, Partition, Partition) {
        (Partition::from_labels(&a), Partition::from_labels(&b), Partition::from_labels(&c))
    }
}

prop_compose! {
    /// Connected undirected graph: a path plus random extra edges.
    fn connected_graph(max_n: usize)(n in 3usize..=max_n)
        (n in Just(n),
         weights in proptest::collection::vec(0.1f64..2.0, n - 1),
         extra in proptest::collection::vec((0..n, 0..n, 0.1f64..2.0), 0..2 * n)) -> Graph {
        let mut edges: Vec<(usize, usize, f64)> =
            weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
        edges.extend(extra.into_iter().filter(|(i, j, _)| i != j));
        Graph::from_edges(n, edges, false).unwrap()
    }
}

prop_compose! {
    fn directed_graph(max_n: usize)(n in 3usize..=max_n)
        (n in Just(n),
         arcs in proptest::collection::vec((0..n, 0..n, 0.1f64..2.0), 1..3 * n)) -> Graph {
        let mut edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        edges.extend(arcs.into_iter().filter(|(i, j, _)| i != j));
        Graph::from_edges(n, edges, true).unwrap()
    }
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn nvi_is_a_metric((a, b, c) in partition_triple()) {
        let ab = nvi(&a, &b).unwrap();
        prop_assert_eq!(ab, nvi(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(nvi(&a, &a).unwrap(), 0.0);
        prop_assert!(nvi(&a, &c).unwrap() <= ab + nvi(&b, &c).unwrap() + 1e-12);
    }

    #[test]
    fn nvi_ignores_label_names((a, b, _) in partition_triple(), shift in 1usize..50) {
        let relabelled: Vec<usize> = a.assignment().iter().map(|&l| (l * 7 + shift) % 1000).collect();
        let a2 = Partition::from_labels(&relabelled);
        prop_assert_eq!(nvi(&a2, &b).unwrap(), nvi(&a, &b).unwrap());
    }

    #[test]
    fn partition_json_round_trip((a, _, _) in partition_triple()) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Partition>(&text).unwrap(), a);
    }

    #[test]
    fn edge_list_round_trip(g in connected_graph(15)) {
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = parse_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(&back, &g);
        let mut again = Vec::new();
        write_edge_list(&back, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn directed_edge_list_round_trip(g in directed_graph(10)) {
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        prop_assert_eq!(parse_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap(), g);
    }

    #[test]
    fn factored_quality_matches_dense(
        g in connected_graph(12),
        t in 0.01f64..10.0,
        kind_index in 0usize..3,
        raw in proptest::collection::vec(0usize..4, 12),
    ) {
        let kind = [ConstructorKind::ContinuousNormalized, ConstructorKind::ContinuousCombinatorial, ConstructorKind::Linearized][kind_index];
        let inst = build(kind, &g, t, &Default::default()).unwrap();
        let p = Partition::from_labels(&raw[..g.n_nodes()]);
        let factored = GeneralizedQualityMatrix::from_instance(&inst).evaluate(&p).unwrap();
        prop_assert!((factored - evaluate_quality(&inst, &p).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn directed_quality_invariant_under_transpose(
        g in directed_graph(10),
        t in 0.05f64..5.0,
        linear in any::<bool>(),
        raw in proptest::collection::vec(0usize..3, 10),
    ) {
        let kind = if linear { ConstructorKind::LinearizedDirected } else { ConstructorKind::Directed };
        let inst = build(kind, &g, t, &Default::default()).unwrap();
        let null = inst.null_model();
        let swapped: Vec<Vec<f64>> = null
            .pairs()
            .flat_map(|(a, b)| [b.to_vec(), a.to_vec()])
            .collect();
        let transposed = QualityInstance::new(
            t,
            QualityMatrix::Dense(inst.matrix().to_dense().transpose()),
            NullModel::new(swapped, null.global_shift),
        )
        .unwrap();
        let p = Partition::from_labels(&raw[..g.n_nodes()]);
        let q = evaluate_quality(&inst, &p).unwrap();
        prop_assert!((q - evaluate_quality(&transposed, &p).unwrap()).abs() < 1e-12);
        let factored = GeneralizedQualityMatrix::from_instance(&inst).evaluate(&p).unwrap();
        prop_assert!((q - factored).abs() < 1e-10);
    }

    #[test]
    fn louvain_is_equivariant_under_relabelling(
        (g, perm) in connected_graph(14).prop_flat_map(|g| { let n = g.n_nodes(); (Just(g), permutation(n)) }),
        seed in 0u64..1000,
        t in 0.1f64..3.0,
    ) {
        let inst = build(ConstructorKind::Linearized, &g, t, &Default::default()).unwrap();
        let m = GeneralizedQualityMatrix::from_instance(&inst);
        let (p, q) = louvain_with(&m, seed, &LouvainOptions::default(), &mut |_| {}).unwrap();

        let gp = g.permuted(&perm).unwrap();
        let inst_p = build(ConstructorKind::Linearized, &gp, t, &Default::default()).unwrap();
        let mp = GeneralizedQualityMatrix::from_instance(&inst_p);
        let opts = LouvainOptions { node_order: Some(perm.clone()), ..Default::default() };
        let (pp, qp) = louvain_with(&mp, seed, &opts, &mut |_| {}).unwrap();
        prop_assert_eq!(pp, p.permuted(&perm));
        prop_assert!((q - qp).abs() < 1e-12);
    }

    #[test]
    fn quality_is_equivariant(
        (g, perm) in connected_graph(10).prop_flat_map(|g| { let n = g.n_nodes(); (Just(g), permutation(n)) }),
        raw in proptest::collection::vec(0usize..3, 10),
        t in 0.1f64..3.0,
    ) {
        let p = Partition::from_labels(&raw[..g.n_nodes()]);
        let a = build(ConstructorKind::ContinuousNormalized, &g, t, &Default::default()).unwrap();
        let b = build(ConstructorKind::ContinuousNormalized, &g.permuted(&perm).unwrap(), t, &Default::default()).unwrap();
        let qa = evaluate_quality(&a, &p).unwrap();
        let qb = evaluate_quality(&b, &p.permuted(&perm)).unwrap();
        prop_assert!((qa - qb).abs() < 1e-12);
    }

    #[test]
    fn results_round_trip_at_full_precision(
        qualities in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3),
        nvis in proptest::collection::vec(0.0f64..=1.0, 3),
        cross in proptest::collection::vec(0.0f64..=1.0, 9),
        block in proptest::collection::vec(-1e300f64..1e300, 3),
        log_scales in proptest::collection::vec(-5.0f64..5.0, 3),
        seed in any::<u64>(),
        lambda in 1e-9f64..=1.0,
    ) {
        let scales: Vec<ScaleResult> = (0..3)
            .map(|i| {
                let member = EnsembleMember { partition: Partition::from_labels(&[0, i % 2, 1]), quality: qualities[i] };
                ScaleResult::from_ensemble(i, log_scales[i], vec![member], nvis[i]).unwrap()
            })
            .collect();
        let mut config = ScanConfig { seed, ..Default::default() };
        config.constructor_options.teleportation_lambda = lambda;
        let scan = ScanResult {
            config,
            scales,
            cross_nvi: cross.chunks(3).map(|c| c.to_vec()).collect(),
            block_nvi: block,
            selection: ScaleSelection { selected: vec![1], minima: vec![1], basins: vec![(0, 2)], fallback: false },
            postprocess_passes: 1,
        };
        let mut buf = Vec::new();
        write_results(&scan, &mut buf).unwrap();
        let back = read_results(buf.as_slice()).unwrap();
        for (a, b) in scan.scales.iter().zip(&back.scales) {
            prop_assert_eq!(a.best_quality.to_bits(), b.best_quality.to_bits());
            prop_assert_eq!(a.scale.to_bits(), b.scale.to_bits());
        }
        prop_assert_eq!(back, scan);
    }
}

/// With teleportation switched almost off, the directed constructor on an
/// undirected graph is the normalized one, so both share their maximizer.
#[test]
fn directed_kind_approaches_normalized_kind() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
    let options = ConstructorOptions {
        teleportation_lambda: 1.0 - 1e-9,
        ..Default::default()
    };
    for _ in 0..10 {
        // a triangle keeps the walk aperiodic so the power iteration converges
        let base = common::random_connected_graph(&mut rng, 8, false);
        let mut edges: Vec<_> = base.edges().iter().map(|e| (e.source, e.target, e.weight)).collect();
        edges.extend([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        let g = Graph::from_edges(8, edges, false).unwrap();
        for t in [0.3, 1.0, 3.0] {
            let normalized = build(ConstructorKind::ContinuousNormalized, &g, t, &Default::default()).unwrap();
            let directed = build(ConstructorKind::Directed, &g, t, &options).unwrap();
            let (pn, qn) = exhaustive_argmax(&normalized).unwrap();
            let (pd, _) = exhaustive_argmax(&directed).unwrap();
            // the directed maximizer is optimal for the normalized objective
            let q = evaluate_quality(&normalized, &pd).unwrap();
            assert!((q - qn).abs() < 1e-6, "{pd:?} vs {pn:?}: {q} vs {qn}");
        }
    }
}
