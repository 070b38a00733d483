//! Every valid (offsets, adjacency, permuter) layout reproduces the input graph,
//! survives the container format and gives the same algorithm results.

use proptest::prelude::*;

use loggraph::algorithms::{self, Mode};
use loggraph::compressed::{valid_layouts, BuildOptions, CompressedGraph};
use loggraph::container::{self, Container};
use loggraph::graph::AdjacencyGraph;
use loggraph::permute::{Permutation, Permuter, DEFAULT_IMBALANCE};
use loggraph::transform::TransformKind;

fn permuters(seed: u64) -> Vec<Permuter> {
    vec![
        Permuter::Identity,
        Permuter::DegreeMin,
        Permuter::Greedy,
        Permuter::Rb { imbalance: DEFAULT_IMBALANCE, seed },
        Permuter::Brb { depth: 2, imbalance: DEFAULT_IMBALANCE, seed },
    ]
}

fn all_layouts(g: &AdjacencyGraph, seed: u64) -> Vec<CompressedGraph> {
    let mut out = Vec::new();
    for permuter in permuters(seed) {
        let (p, brb) = permuter.run(g).unwrap();
        for (o, a, b) in valid_layouts(g.is_weighted()) {
            if a == TransformKind::Brb && brb.is_none() {
                continue;
            }
            let opts = BuildOptions {
                block_bits: b,
                ..BuildOptions::new(o, a, permuter)
            };
            out.push(CompressedGraph::build_with_permutation(g, &opts, p.clone(), brb.clone()).unwrap());
        }
    }
    out
}

fn perm_of(cg: &CompressedGraph) -> Permutation {
    cg.permutation().cloned().unwrap_or_else(|| Permutation::identity(cg.num_vertices()))
}

fn graph_strategy() -> impl Strategy<Value = AdjacencyGraph> {
    (2usize..40, any::<bool>()).prop_flat_map(|(n, weighted)| {
        prop::collection::vec((0..n as u32, 0..n as u32, 1u64..500), 0..120)
            .prop_map(move |edges| AdjacencyGraph::from_edges(n, &edges, weighted).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn neighborhoods_round_trip(g in graph_strategy(), seed in 0u64..1000) {
        for cg in all_layouts(&g, seed) {
            let p = perm_of(&cg);
            let inv = p.inverse();
            prop_assert_eq!(cg.num_edges(), g.num_edges());
            for v in 0..g.num_vertices() as u32 {
                let mut got: Vec<(u32, u64)> = cg
                    .neighbors_weighted(p.get(v))
                    .unwrap()
                    .into_iter()
                    .map(|(u, w)| (inv.get(u), w))
                    .collect();
                got.sort_unstable();
                let ids: Vec<u32> = got.iter().map(|x| x.0).collect();
                prop_assert_eq!(ids.as_slice(), g.neighbors(v));
                if cg.stores_weights() {
                    let ws: Vec<u64> = got.iter().map(|x| x.1).collect();
                    prop_assert_eq!(Some(ws.as_slice()), g.weights(v));
                }
            }
        }
    }

    #[test]
    fn containers_round_trip(g in graph_strategy(), seed in 0u64..1000) {
        let bytes = container::write_graph(&g);
        prop_assert_eq!(container::read(&bytes).unwrap(), Container::Graph(g.clone()));
        for cg in all_layouts(&g, seed) {
            let bytes = container::write_compressed(&cg);
            let back = container::read(&bytes).unwrap();
            prop_assert_eq!(container::write_compressed(match &back {
                Container::Compressed(c) => c,
                Container::Graph(_) => panic!("kind changed"),
            }), bytes);
            prop_assert_eq!(back, Container::Compressed(cg));
        }
    }

    #[test]
    fn kernels_agree_across_layouts(g in graph_strategy(), seed in 0u64..1000) {
        let n = g.num_vertices();
        let bfs = algorithms::bfs(&g, 0, Mode::Sequential).unwrap().dist;
        let components = algorithms::component_count(&algorithms::connected_components(&g, Mode::Sequential));
        let triangles = algorithms::triangle_count(&g, Mode::Sequential);
        for cg in all_layouts(&g, seed) {
            let p = perm_of(&cg);
            let dist = algorithms::bfs(&cg, p.get(0), Mode::Parallel).unwrap().dist;
            let relabeled: Vec<u32> = (0..n as u32).map(|v| dist[p.get(v) as usize]).collect();
            prop_assert_eq!(&relabeled, &bfs);
            let labels = algorithms::connected_components(&cg, Mode::Parallel);
            prop_assert_eq!(algorithms::component_count(&labels), components);
            prop_assert_eq!(algorithms::triangle_count(&cg, Mode::Parallel), triangles);
        }
    }
}

#[test]
fn truncated_containers_are_rejected() {
    let g = AdjacencyGraph::from_edges(5, &[(0, 1, 1), (1, 2, 1), (3, 4, 1)], false).unwrap();
    let cg = CompressedGraph::build(
        &g,
        &BuildOptions::new("bvsd".parse().unwrap(), TransformKind::VarintGap, Permuter::DegreeMin),
    )
    .unwrap();
    let bytes = container::write_compressed(&cg);
    for cut in [0, 3, 10, bytes.len() / 2, bytes.len() - 1] {
        assert!(container::read(&bytes[..cut]).is_err(), "accepted a {cut}-byte prefix");
    }
}
