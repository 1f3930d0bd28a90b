//! Hand-built demonstration instances and fractional points.
//!
//! These are used throughout the test suites and by the documentation; the
//! fractional points are classic witnesses for the behaviour of the valid
//! inequalities on a substrate path.

use crate::instance::{build_bidirected, Instance, Mapping, SubstrateNetwork, VirtualNetwork};
use crate::point::Point;
use crate::scalar::{rfrac, rint, Rat};

/// Single virtual edge a-b (unit demands) on an n-node substrate path
/// u1-u2-...-un. Capacities and costs are given per node / per path edge.
pub fn edge_on_path(
    n: usize,
    node_capacities: &[u64],
    edge_capacities: &[u64],
    node_costs: &[i64],
    edge_costs: &[i64],
) -> Instance {
    assert!(n >= 2);
    assert_eq!(node_capacities.len(), n);
    assert_eq!(edge_capacities.len(), n - 1);
    assert_eq!(node_costs.len(), n);
    assert_eq!(edge_costs.len(), n - 1);
    let virtual_net = VirtualNetwork::new(
        vec![("a".into(), 1), ("b".into(), 1)],
        vec![("a".into(), "b".into(), 1)],
    )
    .unwrap();
    let nodes = (0..n)
        .map(|i| (format!("u{}", i + 1), node_capacities[i], rint(node_costs[i])))
        .collect();
    let edges = (0..n - 1)
        .map(|i| {
            (
                format!("u{}", i + 1),
                format!("u{}", i + 2),
                edge_capacities[i],
                rint(edge_costs[i]),
            )
        })
        .collect();
    let substrate = SubstrateNetwork::new(nodes, edges).unwrap();
    Instance::new(virtual_net, substrate)
}

/// Four-node substrate path whose interior nodes have zero capacity, with
/// routing cost 1 per edge and free placements. The cheapest mapping routes
/// across the whole path (cost 3); the fractional end-split point below
/// reaches 2.
pub fn blocked_middle_path() -> Instance {
    edge_on_path(4, &[1, 0, 0, 1], &[1, 1, 1], &[0, 0, 0, 0], &[1, 1, 1])
}

/// Fractional point that splits the virtual edge across both path ends and
/// pads flow conservation with two opposing 2-cycles. It satisfies the flow
/// departure inequalities but violates flow continuity.
pub fn end_split_point(inst: &Instance) -> Point<Rat> {
    let sn = &inst.substrate;
    let order = sn.path_order().expect("path substrate");
    assert_eq!(order.len(), 4);
    let bidi = build_bidirected(sn);
    let mut point = Point::zeros(inst.indexing());
    let half = rfrac(1, 2);
    let (u1, u2, u3, u4) = (order[0], order[1], order[2], order[3]);
    for vnode in 0..2 {
        point.set_placement(vnode, u1, half.clone());
        point.set_placement(vnode, u4, half.clone());
    }
    for (from, to) in [(u1, u2), (u2, u1), (u3, u4), (u4, u3)] {
        point.set_routing(0, bidi.arc_between(from, to).unwrap(), half.clone());
    }
    point
}

/// Four-node path instance with ample capacity everywhere, used together
/// with [`forward_overlap_point`].
pub fn open_path_4() -> Instance {
    edge_on_path(4, &[1, 1, 1, 1], &[1, 1, 1], &[0, 0, 0, 0], &[1, 1, 1])
}

/// Fractional point built from three overlapping embeddings of the virtual
/// edge along a 4-node path. It satisfies the flow departure and continuity
/// inequalities, so the path decomposition recovers exactly three valid
/// paths with weights 0.4 / 0.3 / 0.3.
pub fn forward_overlap_point(inst: &Instance) -> Point<Rat> {
    let sn = &inst.substrate;
    let order = sn.path_order().expect("path substrate");
    assert_eq!(order.len(), 4);
    let bidi = build_bidirected(sn);
    let mut point = Point::zeros(inst.indexing());
    let (u1, u2, u3, u4) = (order[0], order[1], order[2], order[3]);

    point.set_placement(0, u1, rfrac(2, 5));
    point.set_placement(0, u2, rfrac(3, 10));
    point.set_placement(0, u3, rfrac(3, 10));
    point.set_placement(1, u2, rfrac(3, 10));
    point.set_placement(1, u3, rfrac(2, 5));
    point.set_placement(1, u4, rfrac(3, 10));

    let arc = |from, to| bidi.arc_between(from, to).unwrap();
    point.set_routing(0, arc(u1, u2), rfrac(2, 5));
    point.set_routing(0, arc(u2, u3), rfrac(7, 10));
    point.set_routing(0, arc(u3, u2), rfrac(3, 10));
    point.set_routing(0, arc(u3, u4), rfrac(3, 10));
    point
}

/// The five-substrate-node demo: a four-node virtual mesh embedded into a
/// five-node substrate. Unit demands and costs; node capacities 1; edge
/// capacities 2 (two of the routes pair up on the u1-u3 and u2-u4 edges).
pub fn mesh_demo() -> (Instance, Mapping) {
    let virtual_net = VirtualNetwork::new(
        vec![
            ("a".into(), 1),
            ("b".into(), 1),
            ("c".into(), 1),
            ("d".into(), 1),
        ],
        vec![
            ("a".into(), "b".into(), 1),
            ("a".into(), "d".into(), 1),
            ("b".into(), "d".into(), 1),
            ("a".into(), "c".into(), 1),
            ("c".into(), "d".into(), 1),
        ],
    )
    .unwrap();
    let substrate = SubstrateNetwork::new(
        (1..=5)
            .map(|i| (format!("u{i}"), 1, rint(1)))
            .collect(),
        vec![
            ("u1".into(), "u2".into(), 2, rint(1)),
            ("u1".into(), "u3".into(), 2, rint(1)),
            ("u2".into(), "u4".into(), 2, rint(1)),
            ("u2".into(), "u3".into(), 2, rint(1)),
            ("u3".into(), "u4".into(), 2, rint(1)),
            ("u4".into(), "u5".into(), 2, rint(1)),
            ("u3".into(), "u5".into(), 2, rint(1)),
        ],
    )
    .unwrap();
    let inst = Instance::new(virtual_net, substrate);

    let s = |id: &str| inst.substrate.node_index(id).unwrap();
    let bidi = build_bidirected(&inst.substrate);
    let arc = |from: &str, to: &str| bidi.arc_between(s(from), s(to)).unwrap();
    let mapping = Mapping {
        // a -> u1, b -> u2, c -> u5, d -> u4
        node_map: vec![s("u1"), s("u2"), s("u5"), s("u4")],
        edge_routes: vec![
            vec![arc("u1", "u3"), arc("u3", "u2")], // a~b
            vec![arc("u1", "u2"), arc("u2", "u4")], // a~d
            vec![arc("u2", "u4")],                  // b~d
            vec![arc("u1", "u3"), arc("u3", "u5")], // a~c
            vec![arc("u5", "u4")],                  // c~d
        ],
    };
    (inst, mapping)
}
