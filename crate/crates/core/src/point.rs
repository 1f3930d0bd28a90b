//! Variable indexing shared by the model, the solver, and the decomposition.
//!
//! Placement variables come first (virtual-node major, substrate-node minor),
//! followed by routing variables (virtual-edge major, substrate-arc minor).
//! Substrate arc `2e` is the canonical orientation of edge `e` (lower internal
//! id first) and `2e + 1` its reverse.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Indexing {
    pub virtual_nodes: usize,
    pub substrate_nodes: usize,
    pub virtual_edges: usize,
    pub substrate_edges: usize,
}

/// Role of a model variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarRole {
    /// x variable: virtual node placed on substrate node.
    Placement { vnode: usize, snode: usize },
    /// y variable: virtual edge routed over a directed substrate arc.
    Routing { vedge: usize, arc: usize },
}

impl Indexing {
    pub fn new(
        virtual_nodes: usize,
        substrate_nodes: usize,
        virtual_edges: usize,
        substrate_edges: usize,
    ) -> Self {
        Self {
            virtual_nodes,
            substrate_nodes,
            virtual_edges,
            substrate_edges,
        }
    }

    pub fn arc_count(&self) -> usize {
        2 * self.substrate_edges
    }

    pub fn placement_count(&self) -> usize {
        self.virtual_nodes * self.substrate_nodes
    }

    pub fn routing_count(&self) -> usize {
        self.virtual_edges * self.arc_count()
    }

    pub fn var_count(&self) -> usize {
        self.placement_count() + self.routing_count()
    }

    pub fn placement(&self, vnode: usize, snode: usize) -> usize {
        debug_assert!(vnode < self.virtual_nodes && snode < self.substrate_nodes);
        vnode * self.substrate_nodes + snode
    }

    pub fn routing(&self, vedge: usize, arc: usize) -> usize {
        debug_assert!(vedge < self.virtual_edges && arc < self.arc_count());
        self.placement_count() + vedge * self.arc_count() + arc
    }

    pub fn role(&self, var: usize) -> VarRole {
        if var < self.placement_count() {
            VarRole::Placement {
                vnode: var / self.substrate_nodes,
                snode: var % self.substrate_nodes,
            }
        } else {
            let off = var - self.placement_count();
            VarRole::Routing {
                vedge: off / self.arc_count(),
                arc: off % self.arc_count(),
            }
        }
    }
}

/// A (possibly fractional) assignment to all model variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<R> {
    pub indexing: Indexing,
    pub values: Vec<R>,
}

impl<R: Scalar> Point<R> {
    pub fn zeros(indexing: Indexing) -> Self {
        Self {
            values: vec![R::zero(); indexing.var_count()],
            indexing,
        }
    }

    pub fn from_values(indexing: Indexing, values: Vec<R>) -> Self {
        assert_eq!(values.len(), indexing.var_count());
        Self { indexing, values }
    }

    pub fn placement(&self, vnode: usize, snode: usize) -> &R {
        &self.values[self.indexing.placement(vnode, snode)]
    }

    pub fn routing(&self, vedge: usize, arc: usize) -> &R {
        &self.values[self.indexing.routing(vedge, arc)]
    }

    pub fn set_placement(&mut self, vnode: usize, snode: usize, value: R) {
        let i = self.indexing.placement(vnode, snode);
        self.values[i] = value;
    }

    pub fn set_routing(&mut self, vedge: usize, arc: usize, value: R) {
        let i = self.indexing.routing(vedge, arc);
        self.values[i] = value;
    }

    /// Convert between scalar representations (exact -> float view, etc.).
    pub fn convert<S: Scalar>(&self) -> Point<S> {
        Point {
            indexing: self.indexing,
            values: self
                .values
                .iter()
                .map(|v| S::from_f64_exact(v.to_f64()))
                .collect(),
        }
    }

    /// Largest componentwise deviation from another point.
    pub fn max_deviation(&self, other: &Point<R>) -> R {
        assert_eq!(self.indexing, other.indexing);
        let mut worst = R::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            let d = (a.clone() - b.clone()).abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

impl Point<crate::scalar::Rat> {
    /// Exact conversion into any scalar type.
    pub fn to_scalar<S: Scalar>(&self) -> Point<S> {
        Point {
            indexing: self.indexing,
            values: self.values.iter().map(S::from_rat).collect(),
        }
    }
}
