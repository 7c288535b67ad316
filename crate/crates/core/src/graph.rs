//! The problem graph: nodes with heterogeneous variable dimensions and
//! objective atoms, undirected edges with coupling atoms.
//!
//! Construction is incremental (`add_node` / `add_edge`) or bulk
//! (`add_node_objectives` / `add_edge_objectives` from a parsed template plus
//! a data table). Node ids need not be contiguous; everything downstream
//! indexes nodes in ascending id order.

use std::collections::BTreeMap;
use std::fmt;

use crate::atom::{BoxConstraint, EdgeAtom, NodeAtom};
use crate::dsl::{ColumnValue, EdgeObjectiveTemplate, ObjectiveTemplate};
use crate::error::{Error, Result};

/// Identifier of a node. Arbitrary nonnegative integers; gaps are fine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for NodeId {
    fn from(id: u64) -> Self {
        NodeId(id)
    }
}

/// A node: variable dimension, objective atoms, optional box constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSpec {
    pub id: NodeId,
    pub dim: usize,
    pub objective: Vec<NodeAtom>,
    pub bound: Option<BoxConstraint>,
}

impl NodeSpec {
    pub fn new(id: impl Into<NodeId>, dim: usize) -> Self {
        NodeSpec {
            id: id.into(),
            dim,
            objective: Vec::new(),
            bound: None,
        }
    }

    pub fn with_objective(mut self, objective: Vec<NodeAtom>) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_bound(mut self, bound: BoxConstraint) -> Self {
        self.bound = Some(bound);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "node {} has dim 0; dims must be positive",
                self.id
            )));
        }
        for atom in &self.objective {
            atom.validate(self.dim)?;
        }
        if let Some(b) = &self.bound {
            b.validate(self.dim)?;
            if let Some(atom) = self.objective.iter().find(|a| !a.is_separable()) {
                return Err(Error::InvalidBox(format!(
                    "node {}: box constraint with non-separable atom {}",
                    self.id,
                    atom.kind_name()
                )));
            }
        }
        Ok(())
    }
}

/// An undirected edge between two distinct nodes, with coupling atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub objective: Vec<EdgeAtom>,
}

impl EdgeSpec {
    pub fn new(a: impl Into<NodeId>, b: impl Into<NodeId>, objective: Vec<EdgeAtom>) -> Self {
        EdgeSpec {
            a: a.into(),
            b: b.into(),
            objective,
        }
    }

    /// Canonical unordered key (smaller id first).
    pub fn key(&self) -> (NodeId, NodeId) {
        if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }
}

/// One row of bulk node data: a node id plus named column bindings.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeDataRow {
    pub id: NodeId,
    pub bindings: BTreeMap<String, ColumnValue>,
}

/// Bulk node data in file order. Ids must be unique.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeDataTable {
    rows: Vec<NodeDataRow>,
}

impl NodeDataTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: NodeDataRow) -> Result<()> {
        if self.rows.iter().any(|r| r.id == row.id) {
            return Err(Error::DuplicateNode(row.id));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[NodeDataRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// One row of bulk edge data: an endpoint pair plus named column bindings.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeDataRow {
    pub a: NodeId,
    pub b: NodeId,
    pub bindings: BTreeMap<String, ColumnValue>,
}

/// Bulk edge data in file order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeDataTable {
    rows: Vec<EdgeDataRow>,
}

impl EdgeDataTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: EdgeDataRow) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[EdgeDataRow] {
        &self.rows
    }
}

/// The full problem: an undirected graph whose nodes and edges carry convex
/// objective atoms over shared node variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProblemGraph {
    nodes: BTreeMap<NodeId, NodeSpec>,
    edges: BTreeMap<(NodeId, NodeId), Vec<EdgeAtom>>,
    adjacency: BTreeMap<NodeId, Vec<NodeId>>,
}

impl ProblemGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total problem size: the length of the stacked solution vector.
    pub fn total_dim(&self) -> usize {
        self.nodes.values().map(|n| n.dim).sum()
    }

    pub fn node(&self, id: impl Into<NodeId>) -> Option<&NodeSpec> {
        self.nodes.get(&id.into())
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = &NodeSpec> {
        self.nodes.values()
    }

    /// Edges in ascending (smaller id, larger id) order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, &[EdgeAtom])> {
        self.edges
            .iter()
            .map(|(&(a, b), obj)| (a, b, obj.as_slice()))
    }

    pub fn edge(&self, a: impl Into<NodeId>, b: impl Into<NodeId>) -> Option<&[EdgeAtom]> {
        let (a, b) = (a.into(), b.into());
        let key = if a <= b { (a, b) } else { (b, a) };
        self.edges.get(&key).map(|v| v.as_slice())
    }

    /// Adds a node. The graph is unchanged on error.
    pub fn add_node(&mut self, spec: NodeSpec) -> Result<()> {
        if self.nodes.contains_key(&spec.id) {
            return Err(Error::DuplicateNode(spec.id));
        }
        spec.validate()?;
        self.adjacency.insert(spec.id, Vec::new());
        self.nodes.insert(spec.id, spec);
        Ok(())
    }

    /// Adds an undirected edge. Both endpoints must already exist; at most
    /// one edge per unordered pair. The graph is unchanged on error.
    pub fn add_edge(&mut self, spec: EdgeSpec) -> Result<()> {
        if spec.a == spec.b {
            return Err(Error::SelfLoop(spec.a));
        }
        let (a, b) = spec.key();
        for id in [a, b] {
            if !self.nodes.contains_key(&id) {
                return Err(Error::UnknownEndpoint(id));
            }
        }
        if self.edges.contains_key(&(a, b)) {
            return Err(Error::DuplicateEdge(a, b));
        }
        self.validate_edge_objective(a, b, &spec.objective)?;
        self.edges.insert((a, b), spec.objective);
        for (from, to) in [(a, b), (b, a)] {
            let adj = self.adjacency.get_mut(&from).expect("endpoint exists");
            let pos = adj.binary_search(&to).unwrap_err();
            adj.insert(pos, to);
        }
        Ok(())
    }

    fn validate_edge_objective(&self, a: NodeId, b: NodeId, objective: &[EdgeAtom]) -> Result<()> {
        let dim_a = self.nodes[&a].dim;
        let dim_b = self.nodes[&b].dim;
        for atom in objective {
            atom.validate()?;
            if atom.is_difference() && dim_a != dim_b {
                return Err(Error::DimensionMismatch(format!(
                    "edge ({a}, {b}): {} couples dims {dim_a} and {dim_b}",
                    atom.kind_name()
                )));
            }
        }
        Ok(())
    }

    /// Appends one atom to an existing node's objective.
    pub fn add_node_atom(&mut self, id: impl Into<NodeId>, atom: NodeAtom) -> Result<()> {
        let id = id.into();
        let spec = self.nodes.get(&id).ok_or(Error::UnknownNode(id))?;
        let mut updated = spec.clone();
        updated.objective.push(atom);
        updated.validate()?;
        self.nodes.insert(id, updated);
        Ok(())
    }

    /// Sets the box constraint of an existing node (at most one per node).
    pub fn set_node_bound(&mut self, id: impl Into<NodeId>, bound: BoxConstraint) -> Result<()> {
        let id = id.into();
        let spec = self.nodes.get(&id).ok_or(Error::UnknownNode(id))?;
        if spec.bound.is_some() {
            return Err(Error::InvalidBox(format!(
                "node {id} already has a box constraint"
            )));
        }
        let mut updated = spec.clone();
        updated.bound = Some(bound);
        updated.validate()?;
        self.nodes.insert(id, updated);
        Ok(())
    }

    /// Appends one coupling atom to an existing edge's objective.
    pub fn add_edge_atom(
        &mut self,
        a: impl Into<NodeId>,
        b: impl Into<NodeId>,
        atom: EdgeAtom,
    ) -> Result<()> {
        let (a, b) = (a.into(), b.into());
        let key = if a <= b { (a, b) } else { (b, a) };
        if !self.edges.contains_key(&key) {
            return Err(Error::UnknownEdge(a, b));
        }
        self.append_edge_atoms(key.0, key.1, vec![atom])
    }

    /// Neighbors of `id` in ascending id order.
    pub fn neighbors(&self, id: impl Into<NodeId>) -> Result<&[NodeId]> {
        let id = id.into();
        self.adjacency
            .get(&id)
            .map(|v| v.as_slice())
            .ok_or(Error::UnknownNode(id))
    }

    pub fn degree(&self, id: impl Into<NodeId>) -> Result<usize> {
        Ok(self.neighbors(id)?.len())
    }

    /// Instantiates `template` once per data row and attaches the resulting
    /// atoms (and box, if any) to that row's node. Nodes that do not exist
    /// yet are created with the dimension inferred from the template's data
    /// bindings (the length of the first vector-valued binding, else 1).
    ///
    /// Equivalent to adding each instantiated spec individually.
    pub fn add_node_objectives(
        &mut self,
        template: &ObjectiveTemplate,
        data: &NodeDataTable,
    ) -> Result<()> {
        // Validate against a scratch copy so a failing row cannot leave the
        // graph half-updated.
        let mut staged = self.clone();
        for row in data.rows() {
            staged.apply_node_row(template, row)?;
        }
        *self = staged;
        Ok(())
    }

    fn apply_node_row(&mut self, template: &ObjectiveTemplate, row: &NodeDataRow) -> Result<()> {
        let dim = match self.nodes.get(&row.id) {
            Some(spec) => spec.dim,
            None => {
                let dim = template.infer_dim(&row.bindings);
                self.add_node(NodeSpec::new(row.id, dim))?;
                dim
            }
        };
        let (atoms, bound) = template
            .instantiate(&row.bindings, dim)
            .map_err(|e| match e {
                Error::RowDimensionMismatch(m) => {
                    Error::RowDimensionMismatch(format!("node {}: {m}", row.id))
                }
                other => other,
            })?;
        let spec = self.nodes.get_mut(&row.id).expect("node just ensured");
        let mut updated = spec.clone();
        updated.objective.extend(atoms);
        if let Some(b) = bound {
            if updated.bound.is_some() {
                return Err(Error::InvalidBox(format!(
                    "node {} already has a box constraint",
                    row.id
                )));
            }
            updated.bound = Some(b);
        }
        updated.validate()?;
        *spec = updated;
        Ok(())
    }

    /// Instantiates `template` on every edge (no data) or on every edge
    /// listed in `edge_data`, appending the coupling atoms.
    pub fn add_edge_objectives(
        &mut self,
        template: &EdgeObjectiveTemplate,
        edge_data: Option<&EdgeDataTable>,
    ) -> Result<()> {
        let mut staged = self.clone();
        match edge_data {
            None => {
                let empty = BTreeMap::new();
                let keys: Vec<_> = staged.edges.keys().copied().collect();
                for (a, b) in keys {
                    let atoms = template.instantiate(&empty)?;
                    staged.append_edge_atoms(a, b, atoms)?;
                }
            }
            Some(table) => {
                for row in table.rows() {
                    let (a, b) = if row.a <= row.b {
                        (row.a, row.b)
                    } else {
                        (row.b, row.a)
                    };
                    if !staged.edges.contains_key(&(a, b)) {
                        return Err(Error::UnknownEdge(row.a, row.b));
                    }
                    let atoms = template.instantiate(&row.bindings)?;
                    staged.append_edge_atoms(a, b, atoms)?;
                }
            }
        }
        *self = staged;
        Ok(())
    }

    fn append_edge_atoms(&mut self, a: NodeId, b: NodeId, atoms: Vec<EdgeAtom>) -> Result<()> {
        let mut combined = self.edges[&(a, b)].clone();
        combined.extend(atoms);
        self.validate_edge_objective(a, b, &combined)?;
        self.edges.insert((a, b), combined);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::eval_node_objective;
    use crate::dsl::{parse_edge_template, parse_node_template};

    fn square_node(id: u64) -> NodeSpec {
        NodeSpec::new(id, 1).with_objective(vec![NodeAtom::square()])
    }

    #[test]
    fn add_node_with_box() {
        let mut g = ProblemGraph::new();
        let spec = square_node(1).with_bound(BoxConstraint::scalar(f64::NEG_INFINITY, 0.0));
        g.add_node(spec).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.node(1).unwrap().dim, 1);
    }

    #[test]
    fn empty_objective_node_is_valid() {
        let mut g = ProblemGraph::new();
        g.add_node(NodeSpec::new(0, 3)).unwrap();
        let obj = eval_node_objective(&g.node(0).unwrap().objective, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(obj, 0.0);
    }

    #[test]
    fn duplicate_node_rejected() {
        let mut g = ProblemGraph::new();
        g.add_node(square_node(1)).unwrap();
        assert!(matches!(
            g.add_node(square_node(1)),
            Err(Error::DuplicateNode(NodeId(1)))
        ));
    }

    #[test]
    fn atom_length_must_match_dim_or_broadcast() {
        let mut g = ProblemGraph::new();
        let bad =
            NodeSpec::new(1, 3).with_objective(vec![NodeAtom::sum_squares(1.0, vec![1.0, 2.0])]);
        assert!(matches!(g.add_node(bad), Err(Error::DimensionMismatch(_))));
        let ok = NodeSpec::new(1, 3).with_objective(vec![NodeAtom::sum_squares(1.0, vec![0.5])]);
        g.add_node(ok).unwrap();
    }

    #[test]
    fn box_with_norm2_rejected() {
        let mut g = ProblemGraph::new();
        let bad = NodeSpec::new(1, 2)
            .with_objective(vec![NodeAtom::norm2(1.0, vec![0.0])])
            .with_bound(BoxConstraint::scalar(0.0, 1.0));
        assert!(matches!(g.add_node(bad), Err(Error::InvalidBox(_))));
    }

    #[test]
    fn inverted_box_rejected() {
        let mut g = ProblemGraph::new();
        let bad = square_node(1).with_bound(BoxConstraint::scalar(1.0, 0.0));
        assert!(matches!(g.add_node(bad), Err(Error::InvalidBox(_))));
    }

    #[test]
    fn add_edge_two_node_instance() {
        let mut g = ProblemGraph::new();
        g.add_node(square_node(1)).unwrap();
        g.add_node(square_node(2)).unwrap();
        g.add_edge(EdgeSpec::new(1, 2, vec![EdgeAtom::sq_diff(1.0)]))
            .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbors(1).unwrap(), &[NodeId(2)]);
        assert_eq!(g.neighbors(2).unwrap(), &[NodeId(1)]);
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = ProblemGraph::new();
        g.add_node(square_node(1)).unwrap();
        assert!(matches!(
            g.add_edge(EdgeSpec::new(1, 1, vec![])),
            Err(Error::SelfLoop(NodeId(1)))
        ));
    }

    #[test]
    fn missing_endpoint_rejected() {
        let mut g = ProblemGraph::new();
        g.add_node(square_node(1)).unwrap();
        assert!(matches!(
            g.add_edge(EdgeSpec::new(1, 3, vec![])),
            Err(Error::UnknownEndpoint(NodeId(3)))
        ));
    }

    #[test]
    fn duplicate_edge_rejected_in_both_orientations() {
        let mut g = ProblemGraph::new();
        g.add_node(square_node(1)).unwrap();
        g.add_node(square_node(2)).unwrap();
        g.add_edge(EdgeSpec::new(1, 2, vec![])).unwrap();
        assert!(matches!(
            g.add_edge(EdgeSpec::new(2, 1, vec![])),
            Err(Error::DuplicateEdge(NodeId(1), NodeId(2)))
        ));
    }

    #[test]
    fn difference_atom_requires_equal_dims() {
        let mut g = ProblemGraph::new();
        g.add_node(NodeSpec::new(1, 2)).unwrap();
        g.add_node(NodeSpec::new(2, 3)).unwrap();
        assert!(matches!(
            g.add_edge(EdgeSpec::new(1, 2, vec![EdgeAtom::sq_diff(1.0)])),
            Err(Error::DimensionMismatch(_))
        ));
        // A zero coupling between unequal dims is fine.
        g.add_edge(EdgeSpec::new(1, 2, vec![EdgeAtom::Zero]))
            .unwrap();
    }

    #[test]
    fn neighbors_sorted_and_degree_consistent() {
        let mut g = ProblemGraph::new();
        for id in [0u64, 1, 2] {
            g.add_node(NodeSpec::new(id, 1)).unwrap();
        }
        g.add_edge(EdgeSpec::new(1, 2, vec![])).unwrap();
        g.add_edge(EdgeSpec::new(1, 0, vec![])).unwrap();
        assert_eq!(g.neighbors(1).unwrap(), &[NodeId(0), NodeId(2)]);
        assert_eq!(g.degree(1).unwrap(), 2);
        assert_eq!(g.degree(0).unwrap(), 1);
        assert!(g.neighbors(9).is_err());
    }

    #[test]
    fn isolated_node_has_empty_neighbors() {
        let mut g = ProblemGraph::new();
        g.add_node(NodeSpec::new(5, 1)).unwrap();
        assert!(g.neighbors(5).unwrap().is_empty());
        assert_eq!(g.degree(5).unwrap(), 0);
    }

    #[test]
    fn bulk_node_objectives_instantiate_per_row() {
        let template = parse_node_template("1.0*sum_squares(x - a)").unwrap();
        let mut table = NodeDataTable::new();
        for (id, a) in [(0u64, vec![1.0, 2.0]), (1, vec![3.0, 4.0])] {
            let mut bindings = BTreeMap::new();
            bindings.insert("a".to_string(), ColumnValue::Vector(a));
            table
                .push(NodeDataRow {
                    id: NodeId(id),
                    bindings,
                })
                .unwrap();
        }
        let mut g = ProblemGraph::new();
        g.add_node_objectives(&template, &table).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.node(0).unwrap().dim, 2);
        assert_eq!(
            g.node(1).unwrap().objective,
            vec![NodeAtom::sum_squares(1.0, vec![3.0, 4.0])]
        );
    }

    #[test]
    fn bulk_missing_column_rejected_and_graph_unchanged() {
        let template = parse_node_template("sum_squares(x - b)").unwrap();
        let mut table = NodeDataTable::new();
        let mut bindings = BTreeMap::new();
        bindings.insert("a".to_string(), ColumnValue::Scalar(1.0));
        table
            .push(NodeDataRow {
                id: NodeId(0),
                bindings,
            })
            .unwrap();
        let mut g = ProblemGraph::new();
        let before = g.clone();
        assert!(matches!(
            g.add_node_objectives(&template, &table),
            Err(Error::MissingColumn(c)) if c == "b"
        ));
        assert_eq!(g, before);
    }

    #[test]
    fn bulk_two_atom_template_values_match_hand_assembly() {
        let template = parse_node_template("huber(x - a, 1.0) + 0.5*norm1(x - a)").unwrap();
        let shifts = [vec![0.5, -2.0], vec![3.0, 3.0], vec![-0.1, 0.0]];
        let mut table = NodeDataTable::new();
        for (id, a) in shifts.iter().enumerate() {
            let mut bindings = BTreeMap::new();
            bindings.insert("a".to_string(), ColumnValue::Vector(a.clone()));
            table
                .push(NodeDataRow {
                    id: NodeId(id as u64),
                    bindings,
                })
                .unwrap();
        }
        let mut g = ProblemGraph::new();
        g.add_node_objectives(&template, &table).unwrap();
        let x = [0.0, 0.0];
        for (id, a) in shifts.iter().enumerate() {
            let spec = g.node(id as u64).unwrap();
            assert_eq!(spec.objective.len(), 2);
            let got = eval_node_objective(&spec.objective, &x).unwrap();
            let want: f64 = a
                .iter()
                .map(|ai| crate::atom::huber_value(-ai, 1.0) + 0.5 * ai.abs())
                .sum();
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn bulk_equivalent_to_individual_adds() {
        let template = parse_node_template("0.5*norm1(x - a); box(lo, hi)").unwrap();
        let mut table = NodeDataTable::new();
        for id in 0..4u64 {
            let mut bindings = BTreeMap::new();
            bindings.insert(
                "a".to_string(),
                ColumnValue::Vector(vec![id as f64, -(id as f64)]),
            );
            bindings.insert("lo".to_string(), ColumnValue::Scalar(-5.0));
            bindings.insert("hi".to_string(), ColumnValue::Scalar(5.0));
            table
                .push(NodeDataRow {
                    id: NodeId(id),
                    bindings,
                })
                .unwrap();
        }
        let mut bulk = ProblemGraph::new();
        bulk.add_node_objectives(&template, &table).unwrap();

        let mut manual = ProblemGraph::new();
        for row in table.rows() {
            let dim = template.infer_dim(&row.bindings);
            let (atoms, bound) = template.instantiate(&row.bindings, dim).unwrap();
            let mut spec = NodeSpec::new(row.id, dim).with_objective(atoms);
            spec.bound = bound;
            manual.add_node(spec).unwrap();
        }
        assert_eq!(bulk, manual);
    }

    #[test]
    fn bulk_edge_objectives_uniform_over_cycle() {
        let mut g = ProblemGraph::new();
        for id in 0..4u64 {
            g.add_node(NodeSpec::new(id, 1)).unwrap();
        }
        for (a, b) in [(0u64, 1u64), (1, 2), (2, 3), (3, 0)] {
            g.add_edge(EdgeSpec::new(a, b, vec![])).unwrap();
        }
        let template = parse_edge_template("netlasso(0.5)").unwrap();
        g.add_edge_objectives(&template, None).unwrap();
        for (_, _, obj) in g.edges() {
            assert_eq!(obj, &[EdgeAtom::netlasso(0.5)]);
        }
    }

    #[test]
    fn bulk_edge_negative_weight_rejected() {
        let mut g = ProblemGraph::new();
        g.add_node(NodeSpec::new(0, 1)).unwrap();
        g.add_node(NodeSpec::new(1, 1)).unwrap();
        g.add_edge(EdgeSpec::new(0, 1, vec![])).unwrap();
        let template = parse_edge_template("netlasso(w)").unwrap();
        let mut table = EdgeDataTable::new();
        let mut bindings = BTreeMap::new();
        bindings.insert("w".to_string(), ColumnValue::Scalar(-1.0));
        table.push(EdgeDataRow {
            a: NodeId(0),
            b: NodeId(1),
            bindings,
        });
        assert!(matches!(
            g.add_edge_objectives(&template, Some(&table)),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn bulk_edge_weights_pass_through_from_data() {
        let mut g = ProblemGraph::new();
        for id in 0..3u64 {
            g.add_node(NodeSpec::new(id, 1)).unwrap();
        }
        g.add_edge(EdgeSpec::new(0, 1, vec![])).unwrap();
        g.add_edge(EdgeSpec::new(1, 2, vec![])).unwrap();
        let template = parse_edge_template("sq_diff(w)").unwrap();
        let mut table = EdgeDataTable::new();
        for ((a, b), w) in [((0u64, 1u64), 0.25), ((2, 1), 0.75)] {
            let mut bindings = BTreeMap::new();
            bindings.insert("w".to_string(), ColumnValue::Scalar(w));
            table.push(EdgeDataRow {
                a: NodeId(a),
                b: NodeId(b),
                bindings,
            });
        }
        g.add_edge_objectives(&template, Some(&table)).unwrap();
        assert_eq!(g.edge(0, 1).unwrap(), &[EdgeAtom::sq_diff(0.25)]);
        assert_eq!(g.edge(1, 2).unwrap(), &[EdgeAtom::sq_diff(0.75)]);
    }

    #[test]
    fn bulk_edge_unknown_edge_rejected() {
        let mut g = ProblemGraph::new();
        g.add_node(NodeSpec::new(0, 1)).unwrap();
        g.add_node(NodeSpec::new(1, 1)).unwrap();
        let template = parse_edge_template("netlasso(1.0)").unwrap();
        let mut table = EdgeDataTable::new();
        table.push(EdgeDataRow {
            a: NodeId(0),
            b: NodeId(1),
            bindings: BTreeMap::new(),
        });
        assert!(matches!(
            g.add_edge_objectives(&template, Some(&table)),
            Err(Error::UnknownEdge(..))
        ));
    }

    #[test]
    fn total_dim_sums_node_dims() {
        let mut g = ProblemGraph::new();
        g.add_node(NodeSpec::new(3, 4)).unwrap();
        g.add_node(NodeSpec::new(10, 2)).unwrap();
        assert_eq!(g.total_dim(), 6);
    }
}
