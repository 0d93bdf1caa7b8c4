//! Lattice geometry, row-major ordering, column views and binary field
//! storage shared by all other modules.
//!
//! Public coordinates are 1-based `(i, j)` with `i` the row (vertical/time
//! sample) and `j` the column (trace); conversion to 0-based storage is
//! confined to this module.

use crate::error::{Error, Result};

/// A 1-based lattice node `(i, j)`.
pub type Node = (usize, usize);

/// Rectangular lattice dimensions: `m` rows by `n` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridDims {
    m: usize,
    n: usize,
}

impl GridDims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Domain(format!("lattice dims must be positive, got {m}x{n}")));
        }
        Ok(GridDims { m, n })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, node: Node) -> bool {
        node.0 >= 1 && node.0 <= self.m && node.1 >= 1 && node.1 <= self.n
    }

    /// Row-major linear index of a node; bijective onto `0..m*n`.
    pub fn linear(&self, node: Node) -> usize {
        debug_assert!(self.contains(node));
        self.n * (node.0 - 1) + (node.1 - 1)
    }

    pub fn node_at(&self, idx: usize) -> Node {
        debug_assert!(idx < self.len());
        (idx / self.n + 1, idx % self.n + 1)
    }

    /// All nodes in row-major order.
    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.len()).map(move |idx| self.node_at(idx))
    }
}

/// A template offset `(di, dj)` relative to a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellOffset {
    pub di: i32,
    pub dj: i32,
}

impl CellOffset {
    pub fn new(di: i32, dj: i32) -> Self {
        CellOffset { di, dj }
    }

    /// True if the offset points strictly earlier in row-major order.
    pub fn is_sequential(&self) -> bool {
        self.di < 0 || (self.di == 0 && self.dj < 0)
    }

    /// The translated node, or `None` if it falls outside the lattice.
    pub fn apply(&self, node: Node, dims: &GridDims) -> Option<Node> {
        let i = node.0 as i64 + self.di as i64;
        let j = node.1 as i64 + self.dj as i64;
        if i >= 1 && i <= dims.rows() as i64 && j >= 1 && j <= dims.cols() as i64 {
            Some((i as usize, j as usize))
        } else {
            None
        }
    }
}

impl std::fmt::Display for CellOffset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.di, self.dj)
    }
}

/// Binary lithology/fluid class field: 0 = shale, 1 = oil sand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfcField {
    dims: GridDims,
    values: Vec<u8>,
}

impl LfcField {
    /// All-shale field.
    pub fn zeros(dims: GridDims) -> Self {
        LfcField { dims, values: vec![0; dims.len()] }
    }

    pub fn from_values(dims: GridDims, values: Vec<u8>) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::Domain(format!(
                "field length {} does not match dims {}x{}",
                values.len(),
                dims.rows(),
                dims.cols()
            )));
        }
        if values.iter().any(|&v| v > 1) {
            return Err(Error::Domain("field values must be 0 or 1".into()));
        }
        Ok(LfcField { dims, values })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, node: Node) -> u8 {
        self.values[self.dims.linear(node)]
    }

    #[inline]
    pub fn set(&mut self, node: Node, v: u8) {
        debug_assert!(v <= 1);
        let idx = self.dims.linear(node);
        self.values[idx] = v;
    }

    /// Values in column `j`, top to bottom.
    pub fn column(&self, j: usize) -> Vec<u8> {
        (1..=self.dims.rows()).map(|i| self.get((i, j))).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[u8]) {
        debug_assert_eq!(values.len(), self.dims.rows());
        for (i, &v) in values.iter().enumerate() {
            self.set((i + 1, j), v);
        }
    }

    pub fn sand_count(&self) -> usize {
        self.values.iter().map(|&v| v as usize).sum()
    }
}

/// All nodes strictly earlier than `node` in row-major order.
pub fn predecessor_set(dims: &GridDims, node: Node) -> Result<Vec<Node>> {
    if !dims.contains(node) {
        return Err(Error::Domain(format!("node {node:?} outside {}x{} lattice", dims.rows(), dims.cols())));
    }
    let stop = dims.linear(node);
    Ok((0..stop).map(|idx| dims.node_at(idx)).collect())
}

/// Translates a template to a node, dropping offsets that leave the lattice.
pub fn translate_template(tau: &[CellOffset], node: Node, dims: &GridDims) -> Vec<Node> {
    tau.iter().filter_map(|o| o.apply(node, dims)).collect()
}

/// Nodes of column `j` in increasing row order.
pub fn column_nodes(dims: &GridDims, j: usize) -> Result<Vec<Node>> {
    if j < 1 || j > dims.cols() {
        return Err(Error::Domain(format!("column {j} out of range 1..={}", dims.cols())));
    }
    Ok((1..=dims.rows()).map(|i| (i, j)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_node_has_no_predecessors() {
        let dims = GridDims::new(105, 51).unwrap();
        assert!(predecessor_set(&dims, (1, 1)).unwrap().is_empty());
    }

    #[test]
    fn predecessors_enumerate_row_major() {
        let dims = GridDims::new(2, 3).unwrap();
        assert_eq!(predecessor_set(&dims, (2, 1)).unwrap(), vec![(1, 1), (1, 2), (1, 3)]);
        assert_eq!(predecessor_set(&dims, (1, 3)).unwrap(), vec![(1, 1), (1, 2)]);
    }

    #[test]
    fn predecessor_outside_lattice_is_domain_error() {
        let dims = GridDims::new(2, 3).unwrap();
        assert!(matches!(predecessor_set(&dims, (3, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn row_major_ordering_property() {
        let dims = GridDims::new(4, 5).unwrap();
        for u in dims.nodes() {
            for v in dims.nodes() {
                let in_pred = predecessor_set(&dims, v).unwrap().contains(&u);
                assert_eq!(in_pred, dims.linear(u) < dims.linear(v));
            }
        }
    }

    #[test]
    fn translate_single_offset() {
        let dims = GridDims::new(5, 5).unwrap();
        let tau = [CellOffset::new(-1, 0)];
        assert_eq!(translate_template(&tau, (3, 3), &dims), vec![(2, 3)]);
    }

    #[test]
    fn translate_monotone_under_lattice_growth() {
        let tau = [CellOffset::new(-1, 2), CellOffset::new(0, -4), CellOffset::new(-3, -1)];
        let small = GridDims::new(4, 6).unwrap();
        let big = GridDims::new(8, 9).unwrap();
        for node in small.nodes() {
            let a = translate_template(&tau, node, &small);
            let b = translate_template(&tau, node, &big);
            for x in &a {
                assert!(b.contains(x));
            }
        }
    }

    #[test]
    fn column_nodes_examples() {
        let dims = GridDims::new(3, 2).unwrap();
        assert_eq!(column_nodes(&dims, 2).unwrap(), vec![(1, 2), (2, 2), (3, 2)]);
        let big = GridDims::new(105, 51).unwrap();
        assert_eq!(column_nodes(&big, 51).unwrap().len(), 105);
        let one = GridDims::new(1, 1).unwrap();
        assert_eq!(column_nodes(&one, 1).unwrap(), vec![(1, 1)]);
        assert!(column_nodes(&dims, 3).is_err());
    }

    #[test]
    fn columns_partition_the_lattice() {
        let dims = GridDims::new(3, 4).unwrap();
        let mut seen = vec![false; dims.len()];
        for j in 1..=dims.cols() {
            for node in column_nodes(&dims, j).unwrap() {
                let idx = dims.linear(node);
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
