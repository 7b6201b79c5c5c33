//! Code graphs with a system/environment vertex partition.
//!
//! Vertices `0..k_sys` are system qubits, `k_sys..n` are environment qubits.
//! Subsets of vertices are `u64` masks with vertex `i` at bit `i`.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, GraphError, Result};

pub const MAX_VERTICES: usize = 64;

/// Converts a 1-based vertex label into the 0-based index used everywhere in this crate.
pub fn from_one_based(label: usize) -> usize {
    assert!(label >= 1, "1-based vertex labels start at 1");
    label - 1
}

/// Mask with the low `k` bits set.
#[inline]
pub fn low_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Integer encoding of a subset given as a 0/1 indicator vector; entry `i` becomes bit `i`.
pub fn binary_to_decimal(bits: &[u8]) -> u64 {
    assert!(bits.len() <= 64);
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i))
}

/// Inverse of [`binary_to_decimal`] for a fixed width.
pub fn decimal_to_binary(value: u64, width: usize) -> Vec<u8> {
    (0..width).map(|i| ((value >> i) & 1) as u8).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CodeGraph {
    n: usize,
    k_sys: usize,
    adj: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    k_sys: usize,
    edges: Vec<[usize; 2]>,
}

impl CodeGraph {
    /// Builds a graph from an edge list, validating every invariant.
    pub fn from_edges(n: usize, k_sys: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n).into());
        }
        let mut adj = vec![0u64; n];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a).into());
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        Self::from_adjacency(k_sys, adj)
    }

    /// Builds a graph from adjacency bitmasks.
    pub fn from_adjacency(k_sys: usize, adj: Vec<u64>) -> Result<Self> {
        let n = adj.len();
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n).into());
        }
        if k_sys == 0 || k_sys >= n {
            return Err(GraphError::KSysOutOfRange { k_sys, n }.into());
        }
        for (i, &row) in adj.iter().enumerate() {
            if row & !low_mask(n) != 0 {
                let v = (row & !low_mask(n)).trailing_zeros() as usize;
                return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
            }
            if row >> i & 1 == 1 {
                return Err(GraphError::SelfLoop(i).into());
            }
            for j in 0..n {
                if (row >> j & 1) != (adj[j] >> i & 1) {
                    return Err(GraphError::Nonsymmetric(i, j).into());
                }
            }
        }
        let g = Self { n, k_sys, adj };
        if !g.is_connected() {
            return Err(GraphError::Disconnected.into());
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_sys(&self) -> usize {
        self.k_sys
    }

    pub fn k_env(&self) -> usize {
        self.n - self.k_sys
    }

    /// Neighborhood of `v` as a mask.
    #[inline]
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn adjacency(&self) -> &[u64] {
        &self.adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn system_mask(&self) -> u64 {
        low_mask(self.k_sys)
    }

    pub fn env_mask(&self) -> u64 {
        low_mask(self.n) & !low_mask(self.k_sys)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let mut row = self.adj[i] & !low_mask(i + 1);
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                out.push((i, j));
                row &= row - 1;
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// `Γ·u mod 2` over all vertices.
    #[inline]
    pub fn apply(&self, u: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = u;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            out ^= self.adj[v];
            rest &= rest - 1;
        }
        out
    }

    /// Off-diagonal block `Γ_AR`: row `i` is the environment neighborhood of
    /// system vertex `i`, with environment vertex `k_sys + j` at bit `j`.
    pub fn gamma_ar(&self) -> Vec<u64> {
        (0..self.k_sys).map(|i| self.adj[i] >> self.k_sys).collect()
    }

    /// `Γ_AR · b` for an environment subset `b` (bit `j` = vertex `k_sys + j`);
    /// the result is a system subset.
    #[inline]
    pub fn gamma_ar_apply(&self, b: u64) -> u64 {
        self.apply(b << self.k_sys) & self.system_mask()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let all = low_mask(self.n);
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                next |= self.adj[v];
                f &= f - 1;
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen & all == all
    }

    /// Rejects edges between two environment vertices.
    pub fn check_no_env_edges(&self) -> Result<()> {
        for i in self.k_sys..self.n {
            let env_nb = self.adj[i] & self.env_mask();
            if env_nb != 0 {
                let j = env_nb.trailing_zeros() as usize;
                return Err(GraphError::EnvironmentEdge(i.min(j), i.max(j)).into());
            }
        }
        Ok(())
    }

    /// Relabels vertices: old vertex `v` becomes `perm[v]`. The map must keep
    /// system vertices among `0..k_sys`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Width { expected: self.n, got: perm.len() });
        }
        let mut adj = vec![0u64; self.n];
        for v in 0..self.n {
            if (v < self.k_sys) != (perm[v] < self.k_sys) {
                return Err(Error::domain("relabeling mixes system and environment"));
            }
            let mut row = self.adj[v];
            while row != 0 {
                let u = row.trailing_zeros() as usize;
                adj[perm[v]] |= 1 << perm[u];
                row &= row - 1;
            }
        }
        Self::from_adjacency(self.k_sys, adj)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            n: self.n,
            k_sys: self.k_sys,
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        };
        let mut s = serde_json::to_string(&file).expect("graph serialization");
        s.push('\n');
        s
    }

    /// Parses the graph JSON format. Edges must be written `[i, j]` with `i < j`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        if file.n > MAX_VERTICES {
            return Err(GraphError::TooLarge(file.n).into());
        }
        let mut seen = std::collections::HashSet::new();
        for &[a, b] in &file.edges {
            for v in [a, b] {
                if v >= file.n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n: file.n }.into());
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a).into());
            }
            if a > b {
                return Err(GraphError::EdgeOrder(a, b).into());
            }
            if !seen.insert((a, b)) {
                return Err(GraphError::DuplicateEdge(a, b).into());
            }
        }
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_edges(file.n, file.k_sys, &edges)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json())
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

impl fmt::Debug for CodeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CodeGraph(n={}, k_sys={}, edges={:?})", self.n, self.k_sys, self.edges())
    }
}

/// Star on `k + 1` vertices: center 0, leaves `1..k`, environment `k` on the center.
pub fn repetition_graph(k: usize) -> Result<CodeGraph> {
    if k < 2 {
        return Err(Error::domain(format!("repetition code needs k >= 2, got {k}")));
    }
    if k + 1 > MAX_VERTICES {
        return Err(GraphError::TooLarge(k + 1).into());
    }
    let edges: Vec<(usize, usize)> = (1..=k).map(|v| (0, v)).collect();
    CodeGraph::from_edges(k + 1, k, &edges)
}

/// The `n1`-in-`n2` concatenated code.
///
/// Layout: `A = 0..n1`, then the `n2 - 1` vertices of `B`, then the leaf
/// blocks `C^1, …, C^{n2-1}` of `n1 - 1` vertices each, and the environment last.
/// The environment is joined to all of `A`, `A` is complete-bipartite to `B`,
/// and the `i`-th vertex of `B` carries the leaves `C^i`.
pub fn cat_graph(n1: usize, n2: usize) -> Result<CodeGraph> {
    if n1 < 1 || n2 < 2 {
        return Err(Error::domain(format!("cat code needs n1 >= 1, n2 >= 2, got ({n1},{n2})")));
    }
    let k = n1 * n2;
    if k + 1 > MAX_VERTICES {
        return Err(GraphError::TooLarge(k + 1).into());
    }
    let env = k;
    let b0 = n1;
    let c0 = n1 + n2 - 1;
    let mut edges = Vec::new();
    for a in 0..n1 {
        edges.push((a, env));
        for j in 0..n2 - 1 {
            edges.push((a, b0 + j));
        }
    }
    for j in 0..n2 - 1 {
        for l in 0..n1 - 1 {
            edges.push((b0 + j, c0 + j * (n1 - 1) + l));
        }
    }
    CodeGraph::from_edges(k + 1, k, &edges)
}

/// Two-level tree: root 0, branch vertices `1..=b`, then the leaves of each
/// branch in order, and one environment vertex on the root.
pub fn tree_graph(branch_leaf_counts: &[usize]) -> Result<CodeGraph> {
    if branch_leaf_counts.is_empty() {
        return Err(Error::domain("tree code needs at least one branch"));
    }
    let b = branch_leaf_counts.len();
    let k = 1 + b + branch_leaf_counts.iter().sum::<usize>();
    if k + 1 > MAX_VERTICES {
        return Err(GraphError::TooLarge(k + 1).into());
    }
    let mut edges = Vec::new();
    let mut next = 1 + b;
    for (i, &c) in branch_leaf_counts.iter().enumerate() {
        edges.push((0, 1 + i));
        for _ in 0..c {
            edges.push((1 + i, next));
            next += 1;
        }
    }
    edges.push((0, k));
    CodeGraph::from_edges(k + 1, k, &edges)
}

/// Shor's code with its purifying qubit, as printed in the literature
/// (1-based rows `1..=9` code qubits, row 10 the environment).
pub fn shor_graph() -> CodeGraph {
    let one_based = [
        (1, 4), (1, 7), (1, 10),
        (2, 4), (2, 7), (2, 10),
        (3, 4), (3, 7), (3, 10),
        (4, 5), (4, 6),
        (7, 8), (7, 9),
    ];
    let edges: Vec<(usize, usize)> = one_based
        .iter()
        .map(|&(a, b)| (from_one_based(a), from_one_based(b)))
        .collect();
    CodeGraph::from_edges(10, 9, &edges).expect("static Shor graph is valid")
}

/// Local complementation at `v`: toggles every edge inside the neighborhood of `v`.
pub fn local_complement(g: &CodeGraph, v: usize) -> Result<CodeGraph> {
    if v >= g.n {
        return Err(Error::domain(format!("vertex {v} out of range for n = {}", g.n)));
    }
    let nb = g.adj[v];
    let mut adj = g.adj.clone();
    let mut rest = nb;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        adj[u] ^= nb & !(1u64 << u);
        rest &= rest - 1;
    }
    CodeGraph::from_adjacency(g.k_sys, adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_based_helper() {
        assert_eq!(from_one_based(1), 0);
        assert_eq!(from_one_based(10), 9);
    }

    #[test]
    fn binary_round_trip() {
        assert_eq!(binary_to_decimal(&[1, 0, 1]), 5);
        assert_eq!(decimal_to_binary(5, 4), vec![1, 0, 1, 0]);
        for v in 0..64u64 {
            assert_eq!(binary_to_decimal(&decimal_to_binary(v, 6)), v);
        }
    }

    #[test]
    fn repetition_shapes() {
        let g = repetition_graph(2).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (0, 2)]);
        assert_eq!(g.k_sys(), 2);
        let g = repetition_graph(60).unwrap();
        assert_eq!(g.n(), 61);
        assert_eq!(g.neighbors(60), 1);
        assert!(repetition_graph(1).is_err());
    }

    #[test]
    fn cat_degenerates_to_repetition() {
        for n2 in 2..8 {
            assert_eq!(cat_graph(1, n2).unwrap(), repetition_graph(n2).unwrap());
        }
        let g = cat_graph(3, 3).unwrap();
        assert_eq!((g.n(), g.k_sys(), g.edge_count()), (10, 9, 13));
        let g = cat_graph(5, 5).unwrap();
        assert_eq!((g.n(), g.k_sys(), g.k_env()), (26, 25, 1));
        assert!(cat_graph(0, 3).is_err());
        assert!(cat_graph(2, 1).is_err());
    }

    #[test]
    fn tree_shapes() {
        assert_eq!(tree_graph(&[0, 0, 0, 0]).unwrap(), repetition_graph(5).unwrap());
        assert_eq!(tree_graph(&[2, 2, 2, 2, 2]).unwrap().k_sys(), 16);
        assert_eq!(tree_graph(&[1; 7]).unwrap().k_sys(), 15);
        assert!(tree_graph(&[]).is_err());
    }

    #[test]
    fn shor_matrix_rows() {
        let g = shor_graph();
        assert_eq!(g.neighbors(9), 0b111);
        assert_eq!(g.neighbors(3), 0b110111);
        assert_eq!(g.k_sys(), 9);
    }

    #[test]
    fn local_complement_examples() {
        let g = cat_graph(2, 3).unwrap();
        for v in 0..g.n() {
            let h = local_complement(&g, v).unwrap();
            assert_eq!(local_complement(&h, v).unwrap(), g);
        }
        let star = repetition_graph(4).unwrap();
        for v in 1..star.n() {
            assert_eq!(local_complement(&star, v).unwrap(), star);
        }
        // Every pair inside the star's vertex set ends up adjacent.
        let h = local_complement(&star, 0).unwrap();
        assert_eq!(h.edge_count(), 10);
        for a in 1..star.n() {
            assert!(h.has_edge(0, a));
            for b in a + 1..star.n() {
                assert!(h.has_edge(a, b), "({a},{b})");
            }
        }
        assert!(local_complement(&star, 9).is_err());
    }

    #[test]
    fn gamma_products() {
        let g = cat_graph(2, 2).unwrap();
        for u in 0..(1u64 << g.n()) {
            let mut expect = 0u64;
            for v in 0..g.n() {
                let parity = (g.neighbors(v) & u).count_ones() & 1;
                expect |= u64::from(parity) << v;
            }
            assert_eq!(g.apply(u), expect);
        }
        let star = repetition_graph(3).unwrap();
        assert_eq!(star.gamma_ar(), vec![1, 0, 0]);
        assert_eq!(star.gamma_ar_apply(1), 1);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text = "{\"n\":2,\"k_sys\":1,\"edges\":[[0,1]]}\n";
        let g = CodeGraph::from_json(text).unwrap();
        assert_eq!(g.to_json(), text);
        let e = |t: &str| match CodeGraph::from_json(t) {
            Err(Error::Graph(e)) => e,
            other => panic!("expected graph error, got {other:?}"),
        };
        assert_eq!(e("{\"n\":2,\"k_sys\":1,\"edges\":[[0,0]]}"), GraphError::SelfLoop(0));
        assert_eq!(e("{\"n\":2,\"k_sys\":1,\"edges\":[[1,0]]}"), GraphError::EdgeOrder(1, 0));
        assert_eq!(
            e("{\"n\":2,\"k_sys\":1,\"edges\":[[0,1],[0,1]]}"),
            GraphError::DuplicateEdge(0, 1)
        );
        assert_eq!(e("{\"n\":3,\"k_sys\":1,\"edges\":[[0,1]]}"), GraphError::Disconnected);
        assert_eq!(
            e("{\"n\":2,\"k_sys\":2,\"edges\":[[0,1]]}"),
            GraphError::KSysOutOfRange { k_sys: 2, n: 2 }
        );
        assert!(matches!(e("{\"n\":2,"), GraphError::Malformed(_)));
        assert!(matches!(
            e("{\"n\":2,\"k_sys\":1,\"edges\":[[0,5]]}"),
            GraphError::VertexOutOfRange { vertex: 5, n: 2 }
        ));
        let big = cat_graph(3, 3).unwrap();
        assert_eq!(CodeGraph::from_json(&big.to_json()).unwrap(), big);
    }

    #[test]
    fn adjacency_validation() {
        assert_eq!(
            CodeGraph::from_adjacency(1, vec![0b10, 0b00]).unwrap_err().to_string(),
            GraphError::Nonsymmetric(0, 1).to_string()
        );
    }

    #[test]
    fn env_edges() {
        let g = CodeGraph::from_edges(3, 1, &[(0, 1), (1, 2)]).unwrap();
        assert!(g.check_no_env_edges().is_err());
        assert!(repetition_graph(4).unwrap().check_no_env_edges().is_ok());
    }
}
