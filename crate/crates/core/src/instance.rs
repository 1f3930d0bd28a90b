//! Graph data model: virtual and substrate networks, the bidirected and
//! augmented views, mappings, feasibility checking, and mapping cost.
//!
//! Node ids are dense integers internally; external ids live in a symbol
//! table on each network. All types are immutable after construction.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Indexing, Point};
use crate::scalar::{parse_rat, Rat, Scalar};

/// Natural ordering for external ids: digit runs compare numerically,
/// so "u2" sorts before "u10".
pub fn cmp_ids(a: &str, b: &str) -> Ordering {
    let mut ai = a.chars().peekable();
    let mut bi = b.chars().peekable();
    loop {
        match (ai.peek().copied(), bi.peek().copied()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                if x.is_ascii_digit() && y.is_ascii_digit() {
                    let mut na = 0u128;
                    while let Some(c) = ai.peek().copied().filter(|c| c.is_ascii_digit()) {
                        na = na.saturating_mul(10).saturating_add(c as u128 - '0' as u128);
                        ai.next();
                    }
                    let mut nb = 0u128;
                    while let Some(c) = bi.peek().copied().filter(|c| c.is_ascii_digit()) {
                        nb = nb.saturating_mul(10).saturating_add(c as u128 - '0' as u128);
                        bi.next();
                    }
                    match na.cmp(&nb) {
                        Ordering::Equal => {}
                        ord => return ord,
                    }
                } else {
                    match x.cmp(&y) {
                        Ordering::Equal => {
                            ai.next();
                            bi.next();
                        }
                        ord => return ord,
                    }
                }
            }
        }
    }
}

fn build_symbol_table(ids: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::InvalidGraph(format!(
                "duplicate {what} node id {id:?}"
            )));
        }
    }
    Ok(index)
}

fn check_simple_connected(n: usize, edges: &[(usize, usize)], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u == v {
            return Err(Error::InvalidGraph(format!("{what} graph has a self-loop")));
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(Error::InvalidGraph(format!(
                "{what} graph has a parallel edge"
            )));
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    if n == 0 {
        return Err(Error::InvalidGraph(format!("{what} graph is empty")));
    }
    let mut visited = vec![false; n];
    let mut stack = vec![0usize];
    visited[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !visited[v] {
                visited[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    if count != n {
        return Err(Error::InvalidGraph(format!("{what} graph is not connected")));
    }
    Ok(())
}

/// The demand graph to be embedded.
#[derive(Clone, Debug)]
pub struct VirtualNetwork {
    node_ids: Vec<String>,
    node_demands: Vec<u64>,
    edges: Vec<(usize, usize)>,
    edge_demands: Vec<u64>,
    index: HashMap<String, usize>,
}

impl VirtualNetwork {
    pub fn new(nodes: Vec<(String, u64)>, edges: Vec<(String, String, u64)>) -> Result<Self> {
        let node_ids: Vec<String> = nodes.iter().map(|(id, _)| id.clone()).collect();
        let node_demands: Vec<u64> = nodes.iter().map(|(_, d)| *d).collect();
        let index = build_symbol_table(&node_ids, "virtual")?;
        let mut edge_pairs = Vec::with_capacity(edges.len());
        let mut edge_demands = Vec::with_capacity(edges.len());
        for (u, v, d) in &edges {
            let ui = *index.get(u).ok_or_else(|| {
                Error::InvalidGraph(format!("virtual edge references unknown node {u:?}"))
            })?;
            let vi = *index.get(v).ok_or_else(|| {
                Error::InvalidGraph(format!("virtual edge references unknown node {v:?}"))
            })?;
            edge_pairs.push((ui, vi));
            edge_demands.push(*d);
        }
        check_simple_connected(node_ids.len(), &edge_pairs, "virtual")?;
        Ok(Self {
            node_ids,
            node_demands,
            edges: edge_pairs,
            edge_demands,
            index,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_id(&self, v: usize) -> &str {
        &self.node_ids[v]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node_demand(&self, v: usize) -> u64 {
        self.node_demands[v]
    }

    /// Endpoints of a virtual edge in its stored (arbitrary but fixed) orientation.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_demand(&self, e: usize) -> u64 {
        self.edge_demands[e]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Label of a virtual edge for reports and file formats: "<u>~<v>".
    pub fn edge_label(&self, e: usize) -> String {
        let (u, v) = self.edges[e];
        format!("{}~{}", self.node_ids[u], self.node_ids[v])
    }
}

/// The physical graph providing capacities at a usage cost.
#[derive(Clone, Debug)]
pub struct SubstrateNetwork {
    node_ids: Vec<String>,
    node_capacities: Vec<u64>,
    node_costs: Vec<Rat>,
    /// Canonical orientation: lower internal id first.
    edges: Vec<(usize, usize)>,
    edge_capacities: Vec<u64>,
    edge_costs: Vec<Rat>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl SubstrateNetwork {
    pub fn new(
        nodes: Vec<(String, u64, Rat)>,
        edges: Vec<(String, String, u64, Rat)>,
    ) -> Result<Self> {
        let node_ids: Vec<String> = nodes.iter().map(|(id, _, _)| id.clone()).collect();
        let node_capacities: Vec<u64> = nodes.iter().map(|(_, c, _)| *c).collect();
        let node_costs: Vec<Rat> = nodes.iter().map(|(_, _, w)| w.clone()).collect();
        let index = build_symbol_table(&node_ids, "substrate")?;
        for (i, w) in node_costs.iter().enumerate() {
            if *w < Rat::zero() {
                return Err(Error::InvalidGraph(format!(
                    "negative cost on substrate node {:?}",
                    node_ids[i]
                )));
            }
        }
        let mut edge_pairs = Vec::with_capacity(edges.len());
        let mut edge_capacities = Vec::with_capacity(edges.len());
        let mut edge_costs = Vec::with_capacity(edges.len());
        for (u, v, c, w) in &edges {
            let ui = *index.get(u).ok_or_else(|| {
                Error::InvalidGraph(format!("substrate edge references unknown node {u:?}"))
            })?;
            let vi = *index.get(v).ok_or_else(|| {
                Error::InvalidGraph(format!("substrate edge references unknown node {v:?}"))
            })?;
            if *w < Rat::zero() {
                return Err(Error::InvalidGraph(format!(
                    "negative cost on substrate edge {u:?}-{v:?}"
                )));
            }
            edge_pairs.push((ui.min(vi), ui.max(vi)));
            edge_capacities.push(*c);
            edge_costs.push(w.clone());
        }
        check_simple_connected(node_ids.len(), &edge_pairs, "substrate")?;
        let mut adjacency = vec![Vec::new(); node_ids.len()];
        for (e, &(u, v)) in edge_pairs.iter().enumerate() {
            adjacency[u].push((v, e));
            adjacency[v].push((u, e));
        }
        Ok(Self {
            node_ids,
            node_capacities,
            node_costs,
            edges: edge_pairs,
            edge_capacities,
            edge_costs,
            index,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_id(&self, u: usize) -> &str {
        &self.node_ids[u]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node_capacity(&self, u: usize) -> u64 {
        self.node_capacities[u]
    }

    pub fn node_cost(&self, u: usize) -> &Rat {
        &self.node_costs[u]
    }

    /// Endpoints in canonical orientation (lower internal id first).
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_capacity(&self, e: usize) -> u64 {
        self.edge_capacities[e]
    }

    pub fn edge_cost(&self, e: usize) -> &Rat {
        &self.edge_costs[e]
    }

    /// Neighbors of `u` as (neighbor, edge index) pairs.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    /// Degree-1 nodes.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&u| self.degree(u) == 1)
            .collect()
    }

    /// If the substrate is a path, its node sequence starting from the leaf
    /// with the lower external id; `None` otherwise.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        let n = self.node_count();
        if n == 1 {
            return Some(vec![0]);
        }
        if self.edge_count() != n - 1 {
            return None;
        }
        let leaves = self.leaves();
        if leaves.len() != 2 || (0..n).any(|u| self.degree(u) > 2) {
            return None;
        }
        let start = if cmp_ids(self.node_id(leaves[0]), self.node_id(leaves[1])) == Ordering::Less
        {
            leaves[0]
        } else {
            leaves[1]
        };
        let mut order = Vec::with_capacity(n);
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            order.push(cur);
            let next = self
                .adjacency[cur]
                .iter()
                .map(|&(v, _)| v)
                .find(|&v| v != prev);
            match next {
                Some(v) => {
                    prev = cur;
                    cur = v;
                }
                None => break,
            }
        }
        if order.len() == n {
            Some(order)
        } else {
            None
        }
    }
}

/// A directed occurrence of a substrate edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    /// Parent undirected edge.
    pub edge: usize,
}

/// Both orientations of every substrate edge. Arc `2e` follows the canonical
/// edge orientation, arc `2e + 1` reverses it.
#[derive(Clone, Debug)]
pub struct BidirectedSubstrate {
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    by_endpoints: HashMap<(usize, usize), usize>,
}

pub fn build_bidirected(substrate: &SubstrateNetwork) -> BidirectedSubstrate {
    let n = substrate.node_count();
    let mut arcs = Vec::with_capacity(2 * substrate.edge_count());
    let mut out_arcs = vec![Vec::new(); n];
    let mut in_arcs = vec![Vec::new(); n];
    let mut by_endpoints = HashMap::new();
    for e in 0..substrate.edge_count() {
        let (u, v) = substrate.edge(e);
        for (from, to) in [(u, v), (v, u)] {
            let a = arcs.len();
            arcs.push(Arc { from, to, edge: e });
            out_arcs[from].push(a);
            in_arcs[to].push(a);
            by_endpoints.insert((from, to), a);
        }
    }
    BidirectedSubstrate {
        arcs,
        out_arcs,
        in_arcs,
        by_endpoints,
    }
}

impl BidirectedSubstrate {
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc(&self, a: usize) -> Arc {
        self.arcs[a]
    }

    /// The same edge traversed the other way.
    pub fn reverse(&self, a: usize) -> usize {
        a ^ 1
    }

    pub fn out_arcs(&self, u: usize) -> &[usize] {
        &self.out_arcs[u]
    }

    pub fn in_arcs(&self, u: usize) -> &[usize] {
        &self.in_arcs[u]
    }

    pub fn arc_between(&self, from: usize, to: usize) -> Option<usize> {
        self.by_endpoints.get(&(from, to)).copied()
    }
}

/// Bidirected substrate plus a source arc into every node and a sink arc out
/// of every node, for routing a single virtual edge as a unit flow.
#[derive(Clone, Debug)]
pub struct AugmentedNetwork {
    pub bidirected: BidirectedSubstrate,
    substrate_nodes: usize,
    substrate_edges: usize,
}

pub fn build_augmented(
    virtual_net: &VirtualNetwork,
    substrate: &SubstrateNetwork,
) -> Result<AugmentedNetwork> {
    if virtual_net.edge_count() != 1 {
        return Err(Error::NotSingleEdge(virtual_net.edge_count()));
    }
    Ok(AugmentedNetwork {
        bidirected: build_bidirected(substrate),
        substrate_nodes: substrate.node_count(),
        substrate_edges: substrate.edge_count(),
    })
}

impl AugmentedNetwork {
    pub fn substrate_nodes(&self) -> usize {
        self.substrate_nodes
    }

    /// Substrate arcs plus one source and one sink arc per substrate node.
    pub fn arc_count(&self) -> usize {
        2 * self.substrate_edges + 2 * self.substrate_nodes
    }

    /// Arc from the first virtual endpoint into substrate node `u`.
    pub fn source_arc(&self, u: usize) -> usize {
        2 * self.substrate_edges + u
    }

    /// Arc from substrate node `u` into the second virtual endpoint.
    pub fn sink_arc(&self, u: usize) -> usize {
        2 * self.substrate_edges + self.substrate_nodes + u
    }
}

/// A full problem instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub virtual_net: VirtualNetwork,
    pub substrate: SubstrateNetwork,
}

impl Instance {
    pub fn new(virtual_net: VirtualNetwork, substrate: SubstrateNetwork) -> Self {
        Self {
            virtual_net,
            substrate,
        }
    }

    pub fn indexing(&self) -> Indexing {
        Indexing::new(
            self.virtual_net.node_count(),
            self.substrate.node_count(),
            self.virtual_net.edge_count(),
            self.substrate.edge_count(),
        )
    }
}

/// Placement plus per-virtual-edge routing path (as substrate arc indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mapping {
    /// Substrate node hosting each virtual node.
    pub node_map: Vec<usize>,
    /// Arc list per virtual edge, oriented from the placement of the edge's
    /// first stored endpoint towards the second.
    pub edge_routes: Vec<Vec<usize>>,
}

/// One failed feasibility condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PlacementOutOfRange { vnode: usize },
    NotInjective { first: usize, second: usize, snode: usize },
    EmptyRoute { vedge: usize },
    RouteEndpointMismatch { vedge: usize },
    RouteDisconnected { vedge: usize },
    RouteNotSimple { vedge: usize },
    NodeCapacityExceeded { snode: usize, load: u64, capacity: u64 },
    EdgeCapacityExceeded { sedge: usize, load: u64, capacity: u64 },
}

impl Violation {
    pub fn describe(&self, inst: &Instance) -> String {
        let vn = &inst.virtual_net;
        let sn = &inst.substrate;
        match *self {
            Violation::PlacementOutOfRange { vnode } => {
                format!("placement of {} is out of range", vn.node_id(vnode))
            }
            Violation::NotInjective {
                first,
                second,
                snode,
            } => format!(
                "virtual nodes {} and {} share substrate node {}",
                vn.node_id(first),
                vn.node_id(second),
                sn.node_id(snode)
            ),
            Violation::EmptyRoute { vedge } => {
                format!("route of {} is empty", vn.edge_label(vedge))
            }
            Violation::RouteEndpointMismatch { vedge } => format!(
                "route of {} does not join its endpoint placements",
                vn.edge_label(vedge)
            ),
            Violation::RouteDisconnected { vedge } => {
                format!("route of {} is not a contiguous path", vn.edge_label(vedge))
            }
            Violation::RouteNotSimple { vedge } => {
                format!("route of {} revisits a node", vn.edge_label(vedge))
            }
            Violation::NodeCapacityExceeded {
                snode,
                load,
                capacity,
            } => format!(
                "node {} carries demand {} over capacity {}",
                sn.node_id(snode),
                load,
                capacity
            ),
            Violation::EdgeCapacityExceeded {
                sedge,
                load,
                capacity,
            } => {
                let (u, v) = sn.edge(sedge);
                format!(
                    "edge {}-{} carries demand {} over capacity {}",
                    sn.node_id(u),
                    sn.node_id(v),
                    load,
                    capacity
                )
            }
        }
    }
}

/// Outcome of a feasibility check; an empty violation list means feasible.
#[derive(Clone, Debug, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check injectivity, route shape, and both capacity families.
pub fn check_feasibility(mapping: &Mapping, inst: &Instance) -> FeasibilityReport {
    let vn = &inst.virtual_net;
    let sn = &inst.substrate;
    let bidi = build_bidirected(sn);
    let mut violations = Vec::new();

    let mut host: HashMap<usize, usize> = HashMap::new();
    for v in 0..vn.node_count() {
        let u = mapping.node_map[v];
        if u >= sn.node_count() {
            violations.push(Violation::PlacementOutOfRange { vnode: v });
            continue;
        }
        if let Some(&prev) = host.get(&u) {
            violations.push(Violation::NotInjective {
                first: prev,
                second: v,
                snode: u,
            });
        } else {
            host.insert(u, v);
        }
    }

    let mut edge_load = vec![0u64; sn.edge_count()];
    for e in 0..vn.edge_count() {
        let (a, b) = vn.edge(e);
        let route = &mapping.edge_routes[e];
        if route.is_empty() {
            violations.push(Violation::EmptyRoute { vedge: e });
            continue;
        }
        let mut nodes = vec![bidi.arc(route[0]).from];
        let mut connected = true;
        for pair in route.windows(2) {
            if bidi.arc(pair[0]).to != bidi.arc(pair[1]).from {
                connected = false;
            }
        }
        for &arc in route {
            nodes.push(bidi.arc(arc).to);
            edge_load[bidi.arc(arc).edge] += vn.edge_demand(e);
        }
        if !connected {
            violations.push(Violation::RouteDisconnected { vedge: e });
            continue;
        }
        if nodes[0] != mapping.node_map[a] || *nodes.last().unwrap() != mapping.node_map[b] {
            violations.push(Violation::RouteEndpointMismatch { vedge: e });
        }
        let mut seen = std::collections::HashSet::new();
        if !nodes.iter().all(|&u| seen.insert(u)) {
            violations.push(Violation::RouteNotSimple { vedge: e });
        }
    }

    let mut node_load = vec![0u64; sn.node_count()];
    for v in 0..vn.node_count() {
        let u = mapping.node_map[v];
        if u < sn.node_count() {
            node_load[u] += vn.node_demand(v);
        }
    }
    for u in 0..sn.node_count() {
        if node_load[u] > sn.node_capacity(u) {
            violations.push(Violation::NodeCapacityExceeded {
                snode: u,
                load: node_load[u],
                capacity: sn.node_capacity(u),
            });
        }
    }
    for e in 0..sn.edge_count() {
        if edge_load[e] > sn.edge_capacity(e) {
            violations.push(Violation::EdgeCapacityExceeded {
                sedge: e,
                load: edge_load[e],
                capacity: sn.edge_capacity(e),
            });
        }
    }

    FeasibilityReport { violations }
}

/// Placement plus routing cost of a feasible mapping.
pub fn mapping_cost(mapping: &Mapping, inst: &Instance) -> Result<Rat> {
    let report = check_feasibility(mapping, inst);
    if let Some(first) = report.violations.first() {
        return Err(Error::InfeasibleMapping(first.describe(inst)));
    }
    Ok(mapping_cost_unchecked(mapping, inst))
}

/// Cost formula without the feasibility gate (used by the oracle, which
/// enumerates only feasible mappings).
pub fn mapping_cost_unchecked(mapping: &Mapping, inst: &Instance) -> Rat {
    let vn = &inst.virtual_net;
    let sn = &inst.substrate;
    let bidi = build_bidirected(sn);
    let mut total = Rat::zero();
    for v in 0..vn.node_count() {
        total += Rat::from_integer(vn.node_demand(v).into()) * sn.node_cost(mapping.node_map[v]);
    }
    for e in 0..vn.edge_count() {
        let demand = Rat::from_integer(vn.edge_demand(e).into());
        for &arc in &mapping.edge_routes[e] {
            total += demand.clone() * sn.edge_cost(bidi.arc(arc).edge);
        }
    }
    total
}

/// 0/1 vector of a mapping over the model variables.
pub fn incidence_vector<R: Scalar>(mapping: &Mapping, indexing: Indexing) -> Point<R> {
    let mut point = Point::zeros(indexing);
    for (v, &u) in mapping.node_map.iter().enumerate() {
        point.set_placement(v, u, R::one());
    }
    for (e, route) in mapping.edge_routes.iter().enumerate() {
        for &arc in route {
            point.set_routing(e, arc, R::one());
        }
    }
    point
}

// ---------------------------------------------------------------------------
// JSON schema

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IdValue {
    Int(i64),
    Str(String),
}

impl IdValue {
    fn into_string(self) -> String {
        match self {
            IdValue::Int(v) => v.to_string(),
            IdValue::Str(s) => s,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CostValue {
    Int(i64),
    Float(f64),
    Str(String),
}

impl CostValue {
    fn into_rat(self) -> Result<Rat> {
        match self {
            CostValue::Int(v) => Ok(crate::scalar::rint(v)),
            CostValue::Float(v) => {
                Rat::from_float(v).ok_or_else(|| Error::Parse(format!("non-finite cost {v}")))
            }
            CostValue::Str(s) => {
                parse_rat(&s).ok_or_else(|| Error::Parse(format!("bad cost literal {s:?}")))
            }
        }
    }
}

fn rat_json(r: &Rat) -> CostValue {
    use num_traits::ToPrimitive;
    if r.is_integer() {
        if let Some(v) = r.numer().to_i64() {
            return CostValue::Int(v);
        }
    }
    CostValue::Str(r.to_string())
}

#[derive(Serialize, Deserialize)]
struct VirtualNodeJson {
    id: IdValue,
    demand: u64,
}

#[derive(Serialize, Deserialize)]
struct VirtualEdgeJson {
    u: IdValue,
    v: IdValue,
    demand: u64,
}

#[derive(Serialize, Deserialize)]
struct SubstrateNodeJson {
    id: IdValue,
    capacity: u64,
    cost: CostValue,
}

#[derive(Serialize, Deserialize)]
struct SubstrateEdgeJson {
    u: IdValue,
    v: IdValue,
    capacity: u64,
    cost: CostValue,
}

#[derive(Serialize, Deserialize)]
struct VirtualJson {
    nodes: Vec<VirtualNodeJson>,
    edges: Vec<VirtualEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct SubstrateJson {
    nodes: Vec<SubstrateNodeJson>,
    edges: Vec<SubstrateEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    #[serde(rename = "virtual")]
    virtual_net: VirtualJson,
    substrate: SubstrateJson,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let vnodes = raw
            .virtual_net
            .nodes
            .into_iter()
            .map(|n| (n.id.into_string(), n.demand))
            .collect();
        let vedges = raw
            .virtual_net
            .edges
            .into_iter()
            .map(|e| (e.u.into_string(), e.v.into_string(), e.demand))
            .collect();
        let virtual_net = VirtualNetwork::new(vnodes, vedges)?;
        let snodes = raw
            .substrate
            .nodes
            .into_iter()
            .map(|n| Ok((n.id.into_string(), n.capacity, n.cost.into_rat()?)))
            .collect::<Result<Vec<_>>>()?;
        let sedges = raw
            .substrate
            .edges
            .into_iter()
            .map(|e| {
                Ok((
                    e.u.into_string(),
                    e.v.into_string(),
                    e.capacity,
                    e.cost.into_rat()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let substrate = SubstrateNetwork::new(snodes, sedges)?;
        Ok(Instance::new(virtual_net, substrate))
    }

    pub fn to_json(&self) -> String {
        let vn = &self.virtual_net;
        let sn = &self.substrate;
        let raw = InstanceJson {
            virtual_net: VirtualJson {
                nodes: (0..vn.node_count())
                    .map(|v| VirtualNodeJson {
                        id: IdValue::Str(vn.node_id(v).to_string()),
                        demand: vn.node_demand(v),
                    })
                    .collect(),
                edges: (0..vn.edge_count())
                    .map(|e| {
                        let (u, v) = vn.edge(e);
                        VirtualEdgeJson {
                            u: IdValue::Str(vn.node_id(u).to_string()),
                            v: IdValue::Str(vn.node_id(v).to_string()),
                            demand: vn.edge_demand(e),
                        }
                    })
                    .collect(),
            },
            substrate: SubstrateJson {
                nodes: (0..sn.node_count())
                    .map(|u| SubstrateNodeJson {
                        id: IdValue::Str(sn.node_id(u).to_string()),
                        capacity: sn.node_capacity(u),
                        cost: rat_json(sn.node_cost(u)),
                    })
                    .collect(),
                edges: (0..sn.edge_count())
                    .map(|e| {
                        let (u, v) = sn.edge(e);
                        SubstrateEdgeJson {
                            u: IdValue::Str(sn.node_id(u).to_string()),
                            v: IdValue::Str(sn.node_id(v).to_string()),
                            capacity: sn.edge_capacity(e),
                            cost: rat_json(sn.edge_cost(e)),
                        }
                    })
                    .collect(),
            },
        };
        serde_json::to_string_pretty(&raw).expect("instance serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::scalar::rint;

    #[test]
    fn bidirected_doubles_every_edge() {
        let inst = samples::edge_on_path(3, &[1, 1, 1], &[1, 1], &[0, 0, 0], &[1, 1]);
        let bidi = build_bidirected(&inst.substrate);
        assert_eq!(bidi.arc_count(), 4);
        let pairs: Vec<(usize, usize)> = (0..4)
            .map(|a| (bidi.arc(a).from, bidi.arc(a).to))
            .collect();
        assert!(pairs.contains(&(0, 1)));
        assert!(pairs.contains(&(1, 0)));
        assert!(pairs.contains(&(1, 2)));
        assert!(pairs.contains(&(2, 1)));
    }

    #[test]
    fn bidirected_degree_lists_single_edge() {
        let substrate = SubstrateNetwork::new(
            vec![
                ("a".into(), 1, rint(0)),
                ("b".into(), 1, rint(0)),
            ],
            vec![("a".into(), "b".into(), 1, rint(1))],
        )
        .unwrap();
        let bidi = build_bidirected(&substrate);
        assert_eq!(bidi.out_arcs(0), &[0]);
        assert_eq!(bidi.in_arcs(0), &[1]);
        assert_eq!(bidi.arc(0).from, 0);
        assert_eq!(bidi.arc(0).to, 1);
        assert_eq!(bidi.reverse(0), 1);
    }

    #[test]
    fn four_node_path_has_six_substrate_arcs() {
        let inst = samples::edge_on_path(4, &[1, 1, 1, 1], &[1, 1, 1], &[0; 4], &[1; 3]);
        assert_eq!(build_bidirected(&inst.substrate).arc_count(), 6);
    }

    #[test]
    fn augmented_arc_counts() {
        let path4 = samples::edge_on_path(4, &[1, 1, 1, 1], &[1, 1, 1], &[0; 4], &[1; 3]);
        let aug = build_augmented(&path4.virtual_net, &path4.substrate).unwrap();
        assert_eq!(aug.arc_count(), 14);

        let tiny = samples::edge_on_path(2, &[1, 1], &[1], &[0, 0], &[1]);
        let aug = build_augmented(&tiny.virtual_net, &tiny.substrate).unwrap();
        assert_eq!(aug.arc_count(), 6);
    }

    #[test]
    fn augmented_star_matches_formula() {
        for n in 3..8usize {
            let mut nodes = vec![("hub".to_string(), 1, rint(0))];
            let mut edges = Vec::new();
            for k in 1..n {
                nodes.push((format!("leaf{k}"), 1, rint(0)));
                edges.push(("hub".to_string(), format!("leaf{k}"), 1, rint(1)));
            }
            let substrate = SubstrateNetwork::new(nodes, edges).unwrap();
            let virtual_net = VirtualNetwork::new(
                vec![("a".into(), 1), ("b".into(), 1)],
                vec![("a".into(), "b".into(), 1)],
            )
            .unwrap();
            let aug = build_augmented(&virtual_net, &substrate).unwrap();
            assert_eq!(aug.arc_count(), 2 * (n - 1) + 2 * n);
        }
    }

    #[test]
    fn augmented_rejects_multi_edge_virtual() {
        let (inst, _) = samples::mesh_demo();
        assert!(matches!(
            build_augmented(&inst.virtual_net, &inst.substrate),
            Err(Error::NotSingleEdge(5))
        ));
    }

    #[test]
    fn mesh_demo_cost_is_twelve() {
        let (inst, mapping) = samples::mesh_demo();
        assert_eq!(mapping_cost(&mapping, &inst).unwrap(), rint(12));
    }

    #[test]
    fn zero_costs_give_zero() {
        let inst = samples::edge_on_path(2, &[1, 1], &[1], &[0, 0], &[0]);
        let bidi = build_bidirected(&inst.substrate);
        let mapping = Mapping {
            node_map: vec![0, 1],
            edge_routes: vec![vec![bidi.arc_between(0, 1).unwrap()]],
        };
        assert_eq!(mapping_cost(&mapping, &inst).unwrap(), rint(0));
    }

    #[test]
    fn two_node_cost_is_orientation_independent() {
        let inst = samples::edge_on_path(2, &[1, 1], &[1], &[2, 3], &[5]);
        let bidi = build_bidirected(&inst.substrate);
        let forward = Mapping {
            node_map: vec![0, 1],
            edge_routes: vec![vec![bidi.arc_between(0, 1).unwrap()]],
        };
        let backward = Mapping {
            node_map: vec![1, 0],
            edge_routes: vec![vec![bidi.arc_between(1, 0).unwrap()]],
        };
        assert_eq!(mapping_cost(&forward, &inst).unwrap(), rint(10));
        assert_eq!(mapping_cost(&backward, &inst).unwrap(), rint(10));
    }

    #[test]
    fn feasibility_flags_shared_placement() {
        let inst = samples::edge_on_path(3, &[1, 1, 1], &[1, 1], &[0; 3], &[1; 2]);
        let bidi = build_bidirected(&inst.substrate);
        let mapping = Mapping {
            node_map: vec![1, 1],
            edge_routes: vec![vec![bidi.arc_between(1, 2).unwrap()]],
        };
        let report = check_feasibility(&mapping, &inst);
        assert!(!report.is_feasible());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotInjective { .. })));
    }

    #[test]
    fn feasibility_flags_edge_overload() {
        let mut inst = samples::edge_on_path(2, &[1, 1], &[1], &[0, 0], &[1]);
        // Demand 2 on a capacity-1 edge.
        inst.virtual_net = VirtualNetwork::new(
            vec![("a".into(), 1), ("b".into(), 1)],
            vec![("a".into(), "b".into(), 2)],
        )
        .unwrap();
        let bidi = build_bidirected(&inst.substrate);
        let mapping = Mapping {
            node_map: vec![0, 1],
            edge_routes: vec![vec![bidi.arc_between(0, 1).unwrap()]],
        };
        let report = check_feasibility(&mapping, &inst);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EdgeCapacityExceeded { load: 2, capacity: 1, .. })));
    }

    #[test]
    fn mesh_demo_is_feasible_but_tight_edges_overflow_at_capacity_one() {
        let (inst, mapping) = samples::mesh_demo();
        assert!(check_feasibility(&mapping, &inst).is_feasible());

        // Two routes share edges u1-u3 and u2-u4, so capacity 1 must fail.
        let sn = &inst.substrate;
        let tight = SubstrateNetwork::new(
            (0..sn.node_count())
                .map(|u| (sn.node_id(u).to_string(), sn.node_capacity(u), sn.node_cost(u).clone()))
                .collect(),
            (0..sn.edge_count())
                .map(|e| {
                    let (u, v) = sn.edge(e);
                    (
                        sn.node_id(u).to_string(),
                        sn.node_id(v).to_string(),
                        1,
                        sn.edge_cost(e).clone(),
                    )
                })
                .collect(),
        )
        .unwrap();
        let tight_inst = Instance::new(inst.virtual_net.clone(), tight);
        let report = check_feasibility(&mapping, &tight_inst);
        let overloaded: Vec<_> = report
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::EdgeCapacityExceeded { .. }))
            .collect();
        assert_eq!(overloaded.len(), 2);
    }

    #[test]
    fn incidence_vector_marks_mesh_demo_entries() {
        let (inst, mapping) = samples::mesh_demo();
        let idx = inst.indexing();
        let point: Point<Rat> = incidence_vector(&mapping, idx);
        let vn = &inst.virtual_net;
        let sn = &inst.substrate;
        let bidi = build_bidirected(&inst.substrate);

        let a = vn.node_index("a").unwrap();
        let u1 = sn.node_index("u1").unwrap();
        assert_eq!(*point.placement(a, u1), rint(1));

        // Route of the a-c edge passes u1 -> u3 -> u5.
        let ac = (0..vn.edge_count())
            .find(|&e| vn.edge_label(e) == "a~c")
            .unwrap();
        let u3 = sn.node_index("u3").unwrap();
        let u5 = sn.node_index("u5").unwrap();
        assert_eq!(
            *point.routing(ac, bidi.arc_between(u1, u3).unwrap()),
            rint(1)
        );
        assert_eq!(
            *point.routing(ac, bidi.arc_between(u3, u5).unwrap()),
            rint(1)
        );
        let ones = point.values.iter().filter(|v| **v == rint(1)).count();
        assert_eq!(ones, 4 + 8);
    }

    #[test]
    fn adjacent_placement_incidence_has_three_entries() {
        let inst = samples::edge_on_path(2, &[1, 1], &[1], &[0, 0], &[1]);
        let bidi = build_bidirected(&inst.substrate);
        let mapping = Mapping {
            node_map: vec![0, 1],
            edge_routes: vec![vec![bidi.arc_between(0, 1).unwrap()]],
        };
        let point: Point<Rat> = incidence_vector(&mapping, inst.indexing());
        let ones = point.values.iter().filter(|v| **v == rint(1)).count();
        assert_eq!(ones, 3);
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        let (inst, _) = samples::mesh_demo();
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(back.virtual_net.node_count(), 4);
        assert_eq!(back.virtual_net.edge_count(), 5);
        assert_eq!(back.substrate.node_count(), 5);
        assert_eq!(back.substrate.edge_count(), 7);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let err = SubstrateNetwork::new(
            vec![
                ("a".into(), 1, rint(0)),
                ("b".into(), 1, rint(0)),
                ("c".into(), 1, rint(0)),
            ],
            vec![("a".into(), "b".into(), 1, rint(1))],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)));
    }

    #[test]
    fn path_order_starts_at_lower_external_id() {
        let substrate = SubstrateNetwork::new(
            vec![
                ("u3".into(), 1, rint(0)),
                ("u1".into(), 1, rint(0)),
                ("u2".into(), 1, rint(0)),
            ],
            vec![
                ("u2".into(), "u3".into(), 1, rint(1)),
                ("u1".into(), "u2".into(), 1, rint(1)),
            ],
        )
        .unwrap();
        let order = substrate.path_order().unwrap();
        let ids: Vec<&str> = order.iter().map(|&u| substrate.node_id(u)).collect();
        assert_eq!(ids, vec!["u1", "u2", "u3"]);

        // Digit runs compare numerically.
        assert_eq!(cmp_ids("u2", "u10"), Ordering::Less);
        assert_eq!(cmp_ids("u10", "u10"), Ordering::Equal);
    }

    #[test]
    fn cycle_is_not_a_path() {
        let substrate = SubstrateNetwork::new(
            vec![
                ("a".into(), 1, rint(0)),
                ("b".into(), 1, rint(0)),
                ("c".into(), 1, rint(0)),
            ],
            vec![
                ("a".into(), "b".into(), 1, rint(1)),
                ("b".into(), "c".into(), 1, rint(1)),
                ("a".into(), "c".into(), 1, rint(1)),
            ],
        )
        .unwrap();
        assert!(substrate.path_order().is_none());
        assert!(substrate.leaves().is_empty());
    }
}
