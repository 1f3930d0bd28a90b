//! The flow formulation: binary placement variables x and directed routing
//! variables y, the four constraint classes, variable pre-fixing, and the
//! three valid-inequality families with exhaustive separation.

use crate::error::{Error, Result};
use crate::instance::{build_bidirected, BidirectedSubstrate, Instance};
use crate::point::{Indexing, Point, VarRole};
use crate::scalar::{rint, Rat, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// A model variable. Bounds are kept even for fixed variables so that
/// indices stay stable across pre-fixing.
#[derive(Clone, Debug)]
pub struct VarDef {
    pub name: String,
    pub role: Option<VarRole>,
    pub lower: Rat,
    pub upper: Rat,
    pub integral: bool,
    pub fixed_zero: bool,
}

#[derive(Clone, Debug)]
pub struct LinCon {
    pub name: String,
    pub terms: Vec<(usize, Rat)>,
    pub sense: Sense,
    pub rhs: Rat,
}

/// A mixed binary program over the placement/routing variables.
#[derive(Clone, Debug)]
pub struct Model {
    pub vars: Vec<VarDef>,
    pub constraints: Vec<LinCon>,
    /// Minimization objective, dense over `vars`.
    pub objective: Vec<Rat>,
    /// Present for models built from an instance; absent for parsed files.
    pub indexing: Option<Indexing>,
}

impl Model {
    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_constraint(&mut self, con: LinCon) {
        self.constraints.push(con);
    }

    pub fn objective_value<R: Scalar>(&self, values: &[R]) -> R {
        let mut total = R::zero();
        for (c, v) in self.objective.iter().zip(values) {
            total = total + R::from_rat(c) * v.clone();
        }
        total
    }

    /// Name of the first constraint violated beyond `tol`, if any.
    pub fn first_violated<R: Scalar>(&self, values: &[R], tol: &R) -> Option<&str> {
        for con in &self.constraints {
            let lhs = eval_lhs(con, values);
            let diff = lhs - R::from_rat(&con.rhs);
            let bad = match con.sense {
                Sense::Le => diff > tol.clone(),
                Sense::Ge => diff < -tol.clone(),
                Sense::Eq => diff.abs() > tol.clone(),
            };
            if bad {
                return Some(&con.name);
            }
        }
        None
    }
}

pub fn eval_lhs<R: Scalar>(con: &LinCon, values: &[R]) -> R {
    let mut lhs = R::zero();
    for (var, coef) in &con.terms {
        lhs = lhs + R::from_rat(coef) * values[*var].clone();
    }
    lhs
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn edge_tag(inst: &Instance, e: usize) -> String {
    let (u, v) = inst.virtual_net.edge(e);
    format!(
        "{}_{}",
        sanitize(inst.virtual_net.node_id(u)),
        sanitize(inst.virtual_net.node_id(v))
    )
}

/// Build the base model: placement equalities, flow conservation,
/// one-to-one hosting, and undirected edge capacities.
pub fn build_flow_formulation(inst: &Instance) -> Model {
    let vn = &inst.virtual_net;
    let sn = &inst.substrate;
    let idx = inst.indexing();
    let bidi = build_bidirected(sn);

    let mut vars = Vec::with_capacity(idx.var_count());
    let mut objective = Vec::with_capacity(idx.var_count());
    for v in 0..vn.node_count() {
        for u in 0..sn.node_count() {
            vars.push(VarDef {
                name: format!("x_{}_{}", sanitize(vn.node_id(v)), sanitize(sn.node_id(u))),
                role: Some(VarRole::Placement { vnode: v, snode: u }),
                lower: Rat::zero(),
                upper: rint(1),
                integral: true,
                fixed_zero: false,
            });
            objective.push(rint(vn.node_demand(v) as i64) * sn.node_cost(u));
        }
    }
    for e in 0..vn.edge_count() {
        for a in 0..bidi.arc_count() {
            let arc = bidi.arc(a);
            vars.push(VarDef {
                name: format!(
                    "y_{}_{}_{}",
                    edge_tag(inst, e),
                    sanitize(sn.node_id(arc.from)),
                    sanitize(sn.node_id(arc.to))
                ),
                role: Some(VarRole::Routing { vedge: e, arc: a }),
                lower: Rat::zero(),
                upper: rint(1),
                integral: true,
                fixed_zero: false,
            });
            objective.push(rint(vn.edge_demand(e) as i64) * sn.edge_cost(arc.edge));
        }
    }

    let mut constraints = Vec::new();
    for v in 0..vn.node_count() {
        constraints.push(LinCon {
            name: format!("assign_{}", sanitize(vn.node_id(v))),
            terms: (0..sn.node_count())
                .map(|u| (idx.placement(v, u), rint(1)))
                .collect(),
            sense: Sense::Eq,
            rhs: rint(1),
        });
    }
    for e in 0..vn.edge_count() {
        let (tail, head) = vn.edge(e);
        for u in 0..sn.node_count() {
            let mut terms = vec![
                (idx.placement(tail, u), rint(1)),
                (idx.placement(head, u), rint(-1)),
            ];
            for &a in bidi.out_arcs(u) {
                terms.push((idx.routing(e, a), rint(-1)));
            }
            for &a in bidi.in_arcs(u) {
                terms.push((idx.routing(e, a), rint(1)));
            }
            constraints.push(LinCon {
                name: format!("flow_{}_{}", edge_tag(inst, e), sanitize(sn.node_id(u))),
                terms,
                sense: Sense::Eq,
                rhs: Rat::zero(),
            });
        }
    }
    for u in 0..sn.node_count() {
        constraints.push(LinCon {
            name: format!("host_{}", sanitize(sn.node_id(u))),
            terms: (0..vn.node_count())
                .map(|v| (idx.placement(v, u), rint(1)))
                .collect(),
            sense: Sense::Le,
            rhs: rint(1),
        });
    }
    for se in 0..sn.edge_count() {
        let (su, sv) = sn.edge(se);
        let mut terms = Vec::with_capacity(2 * vn.edge_count());
        for e in 0..vn.edge_count() {
            let d = rint(vn.edge_demand(e) as i64);
            terms.push((idx.routing(e, 2 * se), d.clone()));
            terms.push((idx.routing(e, 2 * se + 1), d));
        }
        constraints.push(LinCon {
            name: format!("cap_{}_{}", sanitize(sn.node_id(su)), sanitize(sn.node_id(sv))),
            terms,
            sense: Sense::Le,
            rhs: rint(sn.edge_capacity(se) as i64),
        });
    }

    Model {
        vars,
        constraints,
        objective,
        indexing: Some(idx),
    }
}

/// Fix to zero every placement whose demand exceeds the node capacity and
/// every routing variable whose edge demand exceeds the edge capacity.
/// Fails when some virtual node loses all of its placements.
pub fn prefix_variables(mut model: Model, inst: &Instance) -> Result<Model> {
    let idx = model.indexing.expect("prefixing requires a built model");
    let vn = &inst.virtual_net;
    let sn = &inst.substrate;
    for v in 0..vn.node_count() {
        for u in 0..sn.node_count() {
            if vn.node_demand(v) > sn.node_capacity(u) {
                fix_zero(&mut model.vars[idx.placement(v, u)]);
            }
        }
    }
    for e in 0..vn.edge_count() {
        for se in 0..sn.edge_count() {
            if vn.edge_demand(e) > sn.edge_capacity(se) {
                fix_zero(&mut model.vars[idx.routing(e, 2 * se)]);
                fix_zero(&mut model.vars[idx.routing(e, 2 * se + 1)]);
            }
        }
    }
    for v in 0..vn.node_count() {
        let open = (0..sn.node_count()).any(|u| !model.vars[idx.placement(v, u)].fixed_zero);
        if !open {
            return Err(Error::PrefixInfeasible(vn.node_id(v).to_string()));
        }
    }
    Ok(model)
}

fn fix_zero(var: &mut VarDef) {
    var.upper = Rat::zero();
    var.fixed_zero = true;
}

// ---------------------------------------------------------------------------
// Valid inequalities

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutFamily {
    FlowDeparture,
    FlowContinuity,
    LeafEquality,
}

impl CutFamily {
    pub fn label(&self) -> &'static str {
        match self {
            CutFamily::FlowDeparture => "flow_departure",
            CutFamily::FlowContinuity => "flow_continuity",
            CutFamily::LeafEquality => "leaf_equality",
        }
    }
}

/// Which endpoint of the (arbitrarily oriented) virtual edge the inequality
/// is written for. `Tail` is the orientation of the stored edge; `Head` is
/// the mirrored inequality with the endpoints exchanged and arc directions
/// reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Tail,
    Head,
}

/// Identifies a cut within its family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutSite {
    Node(usize),
    Arc(usize),
    Leaf(usize),
}

#[derive(Clone, Debug)]
pub struct Cut {
    pub family: CutFamily,
    pub endpoint: Endpoint,
    pub vedge: usize,
    pub site: CutSite,
    pub name: String,
    pub terms: Vec<(usize, Rat)>,
    pub sense: Sense,
    pub rhs: Rat,
}

impl Cut {
    pub fn to_constraint(&self) -> LinCon {
        LinCon {
            name: self.name.clone(),
            terms: self.terms.clone(),
            sense: self.sense,
            rhs: self.rhs.clone(),
        }
    }

    /// Amount by which `values` violates this cut (positive means violated).
    pub fn violation<R: Scalar>(&self, values: &[R]) -> R {
        let mut lhs = R::zero();
        for (var, coef) in &self.terms {
            lhs = lhs + R::from_rat(coef) * values[*var].clone();
        }
        let diff = lhs - R::from_rat(&self.rhs);
        match self.sense {
            Sense::Le => diff,
            Sense::Ge => -diff,
            Sense::Eq => diff.abs(),
        }
    }
}

/// Placing an endpoint on a node forces a routing arc leaving (entering,
/// for the mirrored form) that node.
pub fn gen_flow_departure(inst: &Instance) -> Vec<Cut> {
    let idx = inst.indexing();
    let bidi = build_bidirected(&inst.substrate);
    let mut cuts = Vec::new();
    for e in 0..inst.virtual_net.edge_count() {
        let (tail, head) = inst.virtual_net.edge(e);
        for endpoint in [Endpoint::Tail, Endpoint::Head] {
            for u in 0..inst.substrate.node_count() {
                let (vnode, arcs): (usize, &[usize]) = match endpoint {
                    Endpoint::Tail => (tail, bidi.out_arcs(u)),
                    Endpoint::Head => (head, bidi.in_arcs(u)),
                };
                let mut terms = vec![(idx.placement(vnode, u), rint(1))];
                for &a in arcs {
                    terms.push((idx.routing(e, a), rint(-1)));
                }
                cuts.push(Cut {
                    family: CutFamily::FlowDeparture,
                    endpoint,
                    vedge: e,
                    site: CutSite::Node(u),
                    name: format!(
                        "fd{}_{}_{}",
                        endpoint_tag(endpoint),
                        edge_tag(inst, e),
                        sanitize(inst.substrate.node_id(u))
                    ),
                    terms,
                    sense: Sense::Le,
                    rhs: Rat::zero(),
                });
            }
        }
    }
    cuts
}

/// Flow on an arc must continue past the arc's head unless the far endpoint
/// is placed there (and must have been fed at the arc's tail unless the near
/// endpoint is placed there, for the mirrored form).
pub fn gen_flow_continuity(inst: &Instance) -> Vec<Cut> {
    let idx = inst.indexing();
    let bidi = build_bidirected(&inst.substrate);
    let mut cuts = Vec::new();
    for e in 0..inst.virtual_net.edge_count() {
        let (tail, head) = inst.virtual_net.edge(e);
        for endpoint in [Endpoint::Tail, Endpoint::Head] {
            for a in 0..bidi.arc_count() {
                let arc = bidi.arc(a);
                let reverse = bidi.reverse(a);
                let mut terms = vec![(idx.routing(e, a), rint(1))];
                match endpoint {
                    Endpoint::Tail => {
                        for &out in bidi.out_arcs(arc.to) {
                            if out != reverse {
                                terms.push((idx.routing(e, out), rint(-1)));
                            }
                        }
                        terms.push((idx.placement(head, arc.to), rint(-1)));
                    }
                    Endpoint::Head => {
                        for &inn in bidi.in_arcs(arc.from) {
                            if inn != reverse {
                                terms.push((idx.routing(e, inn), rint(-1)));
                            }
                        }
                        terms.push((idx.placement(tail, arc.from), rint(-1)));
                    }
                }
                cuts.push(Cut {
                    family: CutFamily::FlowContinuity,
                    endpoint,
                    vedge: e,
                    site: CutSite::Arc(a),
                    name: format!(
                        "fc{}_{}_{}_{}",
                        endpoint_tag(endpoint),
                        edge_tag(inst, e),
                        sanitize(inst.substrate.node_id(arc.from)),
                        sanitize(inst.substrate.node_id(arc.to))
                    ),
                    terms,
                    sense: Sense::Le,
                    rhs: Rat::zero(),
                });
            }
        }
    }
    cuts
}

/// At a degree-1 substrate node, the arc towards its only neighbor is used
/// exactly when the matching endpoint is placed there.
pub fn gen_leaf_equalities(inst: &Instance) -> Vec<Cut> {
    let idx = inst.indexing();
    let bidi = build_bidirected(&inst.substrate);
    let mut cuts = Vec::new();
    for e in 0..inst.virtual_net.edge_count() {
        let (tail, head) = inst.virtual_net.edge(e);
        for leaf in inst.substrate.leaves() {
            let (neighbor, _) = inst.substrate.neighbors(leaf)[0];
            for endpoint in [Endpoint::Tail, Endpoint::Head] {
                let (vnode, arc) = match endpoint {
                    Endpoint::Tail => (tail, bidi.arc_between(leaf, neighbor).unwrap()),
                    Endpoint::Head => (head, bidi.arc_between(neighbor, leaf).unwrap()),
                };
                cuts.push(Cut {
                    family: CutFamily::LeafEquality,
                    endpoint,
                    vedge: e,
                    site: CutSite::Leaf(leaf),
                    name: format!(
                        "leaf{}_{}_{}",
                        endpoint_tag(endpoint),
                        edge_tag(inst, e),
                        sanitize(inst.substrate.node_id(leaf))
                    ),
                    terms: vec![
                        (idx.routing(e, arc), rint(1)),
                        (idx.placement(vnode, leaf), rint(-1)),
                    ],
                    sense: Sense::Eq,
                    rhs: Rat::zero(),
                });
            }
        }
    }
    cuts
}

fn endpoint_tag(endpoint: Endpoint) -> &'static str {
    match endpoint {
        Endpoint::Tail => "0",
        Endpoint::Head => "1",
    }
}

pub fn generate_family(inst: &Instance, family: CutFamily) -> Vec<Cut> {
    match family {
        CutFamily::FlowDeparture => gen_flow_departure(inst),
        CutFamily::FlowContinuity => gen_flow_continuity(inst),
        CutFamily::LeafEquality => gen_leaf_equalities(inst),
    }
}

/// All cuts of a family violated by more than `tol`, sorted by decreasing
/// violation. The families are polynomial-size, so a full scan suffices.
pub fn separate<R: Scalar>(
    inst: &Instance,
    point: &Point<R>,
    family: CutFamily,
    tol: &R,
) -> Vec<(Cut, R)> {
    let mut violated: Vec<(Cut, R)> = generate_family(inst, family)
        .into_iter()
        .filter_map(|cut| {
            let v = cut.violation(&point.values);
            if v > *tol {
                Some((cut, v))
            } else {
                None
            }
        })
        .collect();
    violated.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    violated
}

/// Pre-generated cut pools, as consumed by the solver's cutting-plane loop.
#[derive(Clone, Debug, Default)]
pub struct CutPool {
    pub cuts: Vec<Cut>,
}

impl CutPool {
    pub fn new(inst: &Instance, families: &[CutFamily]) -> Self {
        let mut cuts = Vec::new();
        for &family in families {
            cuts.extend(generate_family(inst, family));
        }
        CutPool { cuts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::incidence_vector;
    use crate::samples;
    use crate::scalar::rfrac;

    #[test]
    fn model_shape_for_edge_on_path() {
        let inst = samples::open_path_4();
        let model = build_flow_formulation(&inst);
        let x = model
            .vars
            .iter()
            .filter(|v| matches!(v.role, Some(VarRole::Placement { .. })))
            .count();
        let y = model
            .vars
            .iter()
            .filter(|v| matches!(v.role, Some(VarRole::Routing { .. })))
            .count();
        assert_eq!(x, 8);
        assert_eq!(y, 6);
        assert_eq!(model.constraint_count(), 2 + 4 + 4 + 3);
    }

    #[test]
    fn model_shape_for_mesh_demo() {
        let (inst, _) = samples::mesh_demo();
        let model = build_flow_formulation(&inst);
        assert_eq!(model.var_count(), 4 * 5 + 5 * 2 * 7);
        assert_eq!(model.constraint_count(), 4 + 5 * 5 + 5 + 7);
    }

    #[test]
    fn incidence_vectors_satisfy_the_model() {
        let (inst, mapping) = samples::mesh_demo();
        let model = build_flow_formulation(&inst);
        let point = incidence_vector::<Rat>(&mapping, inst.indexing());
        assert_eq!(model.first_violated(&point.values, &Rat::zero()), None);
    }

    #[test]
    fn objective_matches_mapping_cost() {
        let (inst, mapping) = samples::mesh_demo();
        let model = build_flow_formulation(&inst);
        let point = incidence_vector::<Rat>(&mapping, inst.indexing());
        assert_eq!(
            model.objective_value(&point.values),
            crate::instance::mapping_cost(&mapping, &inst).unwrap()
        );
    }

    #[test]
    fn prefixing_fixes_overloaded_placements() {
        let mut inst = samples::edge_on_path(3, &[2, 1, 2], &[1, 1], &[0; 3], &[1; 2]);
        inst.virtual_net = crate::instance::VirtualNetwork::new(
            vec![("a".into(), 3), ("b".into(), 1)],
            vec![("a".into(), "b".into(), 1)],
        )
        .unwrap();
        let model = build_flow_formulation(&inst);
        let err = prefix_variables(model, &inst).unwrap_err();
        assert!(matches!(err, Error::PrefixInfeasible(_)));

        inst.virtual_net = crate::instance::VirtualNetwork::new(
            vec![("a".into(), 2), ("b".into(), 1)],
            vec![("a".into(), "b".into(), 1)],
        )
        .unwrap();
        let model = prefix_variables(build_flow_formulation(&inst), &inst).unwrap();
        let idx = inst.indexing();
        assert!(model.vars[idx.placement(0, 1)].fixed_zero); // demand 2 > capacity 1
        assert!(!model.vars[idx.placement(0, 0)].fixed_zero);
    }

    #[test]
    fn prefixing_without_overload_changes_nothing() {
        let inst = samples::open_path_4();
        let model = prefix_variables(build_flow_formulation(&inst), &inst).unwrap();
        assert!(model.vars.iter().all(|v| !v.fixed_zero));
    }

    #[test]
    fn prefixing_fixes_both_arc_orientations() {
        let mut inst = samples::edge_on_path(3, &[2, 2, 2], &[1, 2], &[0; 3], &[1; 2]);
        inst.virtual_net = crate::instance::VirtualNetwork::new(
            vec![("a".into(), 1), ("b".into(), 1)],
            vec![("a".into(), "b".into(), 2)],
        )
        .unwrap();
        let model = prefix_variables(build_flow_formulation(&inst), &inst).unwrap();
        let fixed = model.vars.iter().filter(|v| v.fixed_zero).count();
        assert_eq!(fixed, 2);
    }

    #[test]
    fn family_counts() {
        let inst = samples::open_path_4();
        assert_eq!(gen_flow_departure(&inst).len(), 2 * 1 * 4);
        assert_eq!(gen_flow_continuity(&inst).len(), 2 * 1 * 6);
        // Two leaves, two endpoints.
        assert_eq!(gen_leaf_equalities(&inst).len(), 4);
    }

    #[test]
    fn cycle_substrate_has_no_leaf_equalities() {
        let substrate = crate::instance::SubstrateNetwork::new(
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
        let virtual_net = crate::instance::VirtualNetwork::new(
            vec![("s".into(), 1), ("t".into(), 1)],
            vec![("s".into(), "t".into(), 1)],
        )
        .unwrap();
        let inst = Instance::new(virtual_net, substrate);
        assert!(gen_leaf_equalities(&inst).is_empty());
    }

    #[test]
    fn end_split_point_separation() {
        let inst = samples::blocked_middle_path();
        let point = samples::end_split_point(&inst);

        // Departure inequalities hold.
        assert!(separate(&inst, &point, CutFamily::FlowDeparture, &Rat::zero()).is_empty());

        // Continuity is violated by one half on the first path arc.
        let violated = separate(&inst, &point, CutFamily::FlowContinuity, &Rat::zero());
        assert!(!violated.is_empty());
        let bidi = build_bidirected(&inst.substrate);
        let order = inst.substrate.path_order().unwrap();
        let first_arc = bidi.arc_between(order[0], order[1]).unwrap();
        let hit = violated
            .iter()
            .find(|(c, _)| c.site == CutSite::Arc(first_arc) && c.endpoint == Endpoint::Tail)
            .expect("continuity cut on the first path arc");
        assert_eq!(hit.1, rfrac(1, 2));
    }

    #[test]
    fn integral_points_separate_to_nothing() {
        let (inst, mapping) = samples::mesh_demo();
        let point = incidence_vector::<Rat>(&mapping, inst.indexing());
        for family in [
            CutFamily::FlowDeparture,
            CutFamily::FlowContinuity,
            CutFamily::LeafEquality,
        ] {
            assert!(separate(&inst, &point, family, &Rat::zero()).is_empty());
        }
    }

    #[test]
    fn departure_violation_is_maximal_for_unrouted_placement() {
        let inst = samples::open_path_4();
        let mut point: Point<Rat> = Point::zeros(inst.indexing());
        point.set_placement(0, 0, rint(1));
        let violated = separate(&inst, &point, CutFamily::FlowDeparture, &Rat::zero());
        assert_eq!(violated[0].1, rint(1));
    }
}
