//! The benchmark inputs must stay valid: a connected graph and a table
//! that can serve the benchmarked walk.

use contwalk_core::graph::build_routing;
use contwalk_core::rng::{stream, Purpose};
use contwalk_core::{
    generate, pre_processing, single_random_walk, Capacity, Family, GeneratorSpec, LambdaRule,
    Network, RoutingMode,
};

#[test]
fn benchmark_inputs_serve_a_walk() {
    let g = generate(&GeneratorSpec::new(Family::GnpExpander, 500, 1)).unwrap().graph;
    assert!(g.is_connected());
    let lambda = LambdaRule::default().resolve(500, 500, 0);
    let oracle = build_routing(&g, RoutingMode::ShortestPath);
    let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
    let mut rng = stream(1, Purpose::Walk, &[]);
    let mut table = pre_processing(&mut net, 1.0, lambda, 0, &mut rng).unwrap().table;
    let walk = single_random_walk(&mut net, &mut table, &oracle, 0, 500, &mut rng).unwrap();
    assert!(walk.is_ok());
}
