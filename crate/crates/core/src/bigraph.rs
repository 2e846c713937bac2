//! Immutable bipartite multigraphs.
//!
//! Left vertices are `0..n_left`, right vertices `0..n_right`. Edges are kept
//! in insertion order, and that order defines the indexed neighbour map
//! `E(v, i)`: the `i`-th edge incident to right vertex `v` in edge-list order.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Side of a bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(
        "edge {index} endpoint ({left}, {right}) out of range for {n_left}+{n_right} vertices"
    )]
    EdgeOutOfRange {
        index: usize,
        left: usize,
        right: usize,
        n_left: usize,
        n_right: usize,
    },
    #[error("{side} vertex {vertex} out of range (side has {bound} vertices)")]
    VertexOutOfRange {
        side: Side,
        vertex: usize,
        bound: usize,
    },
    #[error("expected a {expected} vertex set, got a {found} one")]
    SideMismatch { expected: Side, found: Side },
    #[error("graph is not biregular")]
    NotBiregular,
    #[error("invalid biregular parameters: {0}")]
    InvalidParameters(String),
}

/// A sorted, duplicate-free set of vertices on one side of a bipartite graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet {
    side: Side,
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new(side: Side, members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        VertexSet { side, members }
    }

    pub fn left(members: impl IntoIterator<Item = usize>) -> Self {
        Self::new(Side::Left, members)
    }

    pub fn right(members: impl IntoIterator<Item = usize>) -> Self {
        Self::new(Side::Right, members)
    }

    pub fn empty(side: Side) -> Self {
        VertexSet {
            side,
            members: Vec::new(),
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Characteristic vector over `0..n`.
    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut flags = vec![false; n];
        for &v in &self.members {
            if v < n {
                flags[v] = true;
            }
        }
        flags
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.side == other.side && self.members.iter().all(|&v| other.contains(v))
    }
}

/// A bipartite multigraph with a fixed edge order.
///
/// ```
/// use une::bigraph::{BipartiteMultigraph, VertexSet};
///
/// let c4 = BipartiteMultigraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
/// assert_eq!(c4.biregularity(), Some((2, 2)));
/// let s = VertexSet::left([0]);
/// assert_eq!(c4.unique_neighbours(&s).unwrap().members(), &[0, 1]);
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMultigraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<(usize, usize)>,
    /// Per right vertex: indices into `edges`, in edge order.
    right_incidence: Vec<Vec<usize>>,
    /// Per left vertex: indices into `edges`, in edge order.
    left_incidence: Vec<Vec<usize>>,
}

impl BipartiteMultigraph {
    pub fn new(
        n_left: usize,
        n_right: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut right_incidence = vec![Vec::new(); n_right];
        let mut left_incidence = vec![Vec::new(); n_left];
        for (index, &(u, v)) in edges.iter().enumerate() {
            if u >= n_left || v >= n_right {
                return Err(GraphError::EdgeOutOfRange {
                    index,
                    left: u,
                    right: v,
                    n_left,
                    n_right,
                });
            }
            left_incidence[u].push(index);
            right_incidence[v].push(index);
        }
        Ok(BipartiteMultigraph {
            n_left,
            n_right,
            edges,
            right_incidence,
            left_incidence,
        })
    }

    /// Uniformly random `(c, d)`-biregular multigraph: the Lc left half-edges
    /// are shuffled and matched in order to the Rd right half-edges, so right
    /// slot `(v, j)` becomes `E(v, j)`. Multi-edges are kept.
    pub fn random_biregular<R: Rng + ?Sized>(
        n_left: usize,
        n_right: usize,
        c: usize,
        d: usize,
        rng: &mut R,
    ) -> Result<Self, GraphError> {
        if n_left == 0 || n_right == 0 || c == 0 || d == 0 {
            return Err(GraphError::InvalidParameters(
                "sides and degrees must be positive".into(),
            ));
        }
        if n_left * c != n_right * d {
            return Err(GraphError::InvalidParameters(format!(
                "{n_left}*{c} != {n_right}*{d}"
            )));
        }
        let mut left_slots: Vec<usize> = (0..n_left)
            .flat_map(|u| std::iter::repeat_n(u, c))
            .collect();
        left_slots.shuffle(rng);
        let edges = left_slots
            .into_iter()
            .enumerate()
            .map(|(slot, u)| (u, slot / d))
            .collect();
        Self::new(n_left, n_right, edges)
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Per-vertex incident-edge counts, multi-edges counted with multiplicity.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.left_incidence.iter().map(Vec::len).collect(),
            self.right_incidence.iter().map(Vec::len).collect(),
        )
    }

    /// `(c, d)` if every left vertex has degree `c` and every right vertex
    /// degree `d`. Graphs with an empty side are not biregular.
    pub fn biregularity(&self) -> Option<(usize, usize)> {
        let c = self.left_incidence.first()?.len();
        let d = self.right_incidence.first()?.len();
        let left_ok = self.left_incidence.iter().all(|e| e.len() == c);
        let right_ok = self.right_incidence.iter().all(|e| e.len() == d);
        (left_ok && right_ok).then_some((c, d))
    }

    pub fn require_biregular(&self) -> Result<(usize, usize), GraphError> {
        self.biregularity().ok_or(GraphError::NotBiregular)
    }

    /// `E(v, i)`: the left endpoint of the `i`-th edge at right vertex `v`.
    pub fn port(&self, v: usize, i: usize) -> usize {
        self.edges[self.right_incidence[v][i]].0
    }

    /// All ports of right vertex `v` in order, i.e. `[E(v, 0), E(v, 1), ...]`.
    pub fn ports(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.right_incidence[v].iter().map(|&e| self.edges[e].0)
    }

    /// Right endpoints of the edges at left vertex `u`, with multiplicity.
    pub fn left_neighbours(&self, u: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.left_incidence[u].iter().map(|&e| self.edges[e].1)
    }

    /// Edge indices incident to left vertex `u`.
    pub fn left_incidence(&self, u: usize) -> &[usize] {
        &self.left_incidence[u]
    }

    /// Edge indices incident to right vertex `v`.
    pub fn right_incidence(&self, v: usize) -> &[usize] {
        &self.right_incidence[v]
    }

    fn check_left_set(&self, s: &VertexSet) -> Result<(), GraphError> {
        if s.side() != Side::Left {
            return Err(GraphError::SideMismatch {
                expected: Side::Left,
                found: s.side(),
            });
        }
        if let Some(&v) = s.members().last() {
            if v >= self.n_left {
                return Err(GraphError::VertexOutOfRange {
                    side: Side::Left,
                    vertex: v,
                    bound: self.n_left,
                });
            }
        }
        Ok(())
    }

    /// Number of edges from each right vertex into `s`.
    pub fn edge_counts_into(&self, s: &VertexSet) -> Result<Vec<usize>, GraphError> {
        self.check_left_set(s)?;
        let mut counts = vec![0usize; self.n_right];
        for &u in s.members() {
            for v in self.left_neighbours(u) {
                counts[v] += 1;
            }
        }
        Ok(counts)
    }

    pub fn neighbourhood(&self, s: &VertexSet) -> Result<VertexSet, GraphError> {
        let counts = self.edge_counts_into(s)?;
        Ok(VertexSet::right(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, _)| v),
        ))
    }

    /// Right vertices with exactly one incident edge into `s`. A right vertex
    /// joined to a single member of `s` by a double edge is not unique.
    pub fn unique_neighbours(&self, s: &VertexSet) -> Result<VertexSet, GraphError> {
        let counts = self.edge_counts_into(s)?;
        Ok(VertexSet::right(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &k)| k == 1)
                .map(|(v, _)| v),
        ))
    }

    /// Right vertices adjacent to exactly one distinct member of `s`,
    /// regardless of edge multiplicity.
    pub fn unique_neighbours_by_vertex(&self, s: &VertexSet) -> Result<VertexSet, GraphError> {
        self.check_left_set(s)?;
        let mut owner: Vec<Option<usize>> = vec![None; self.n_right];
        let mut shared = vec![false; self.n_right];
        for &u in s.members() {
            for v in self.left_neighbours(u) {
                match owner[v] {
                    None => owner[v] = Some(u),
                    Some(w) if w != u => shared[v] = true,
                    Some(_) => {}
                }
            }
        }
        Ok(VertexSet::right(
            (0..self.n_right).filter(|&v| owner[v].is_some() && !shared[v]),
        ))
    }

    pub fn has_unique_neighbour(&self, s: &VertexSet) -> Result<bool, GraphError> {
        Ok(self.edge_counts_into(s)?.contains(&1))
    }

    /// True iff the graph (both sides, isolated vertices included) is connected.
    pub fn is_connected(&self) -> bool {
        let total = self.n_left + self.n_right;
        if total == 0 {
            return true;
        }
        let mut seen = vec![false; total];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut visited = 1;
        while let Some(x) = stack.pop() {
            let incident = if x < self.n_left {
                &self.left_incidence[x]
            } else {
                &self.right_incidence[x - self.n_left]
            };
            for &e in incident {
                let (u, v) = self.edges[e];
                let y = if x < self.n_left { self.n_left + v } else { u };
                if !seen[y] {
                    seen[y] = true;
                    visited += 1;
                    stack.push(y);
                }
            }
        }
        visited == total
    }

    /// Dense biadjacency matrix, rows indexed by left vertices:
    /// entry `(u, v)` is the number of edges between `u` and `v`.
    pub fn biadjacency(&self) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0u32; self.n_right]; self.n_left];
        for &(u, v) in &self.edges {
            m[u][v] += 1;
        }
        m
    }

    /// The subgraph induced on `s` and `N(s)`, with left vertices renumbered
    /// in the order of `s` and right vertices in the order of `N(s)`.
    pub fn induced_by_left(&self, s: &VertexSet) -> Result<BipartiteMultigraph, GraphError> {
        let nbhd = self.neighbourhood(s)?;
        let mut right_index = vec![usize::MAX; self.n_right];
        for (k, &v) in nbhd.members().iter().enumerate() {
            right_index[v] = k;
        }
        let mut left_index = vec![usize::MAX; self.n_left];
        for (k, &u) in s.members().iter().enumerate() {
            left_index[u] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, _)| left_index[u] != usize::MAX)
            .map(|&(u, v)| (left_index[u], right_index[v]))
            .collect();
        BipartiteMultigraph::new(s.len(), nbhd.len(), edges)
    }

    /// Same edge multiset, receiving vertices in the same order at every right vertex.
    pub fn same_port_structure(&self, other: &BipartiteMultigraph) -> bool {
        self.n_left == other.n_left
            && self.n_right == other.n_right
            && (0..self.n_right).all(|v| self.ports(v).eq(other.ports(v)))
    }
}

/// Complete bipartite graph `K_{a,b}`, edges ordered by left vertex.
pub fn complete_bipartite(n_left: usize, n_right: usize) -> BipartiteMultigraph {
    let edges = (0..n_left)
        .flat_map(|u| (0..n_right).map(move |v| (u, v)))
        .collect();
    BipartiteMultigraph::new(n_left, n_right, edges).expect("indices in range")
}

/// The cycle `C_{2n}` as a `(2,2)`-biregular graph: left `i` joins right `i`
/// and right `i+1 mod n`.
pub fn even_cycle(n: usize) -> BipartiteMultigraph {
    let edges = (0..n).flat_map(|i| [(i, i), (i, (i + 1) % n)]).collect();
    BipartiteMultigraph::new(n, n, edges).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c4() -> BipartiteMultigraph {
        BipartiteMultigraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap()
    }

    #[test]
    fn degrees_of_small_graphs() {
        assert_eq!(c4().degrees(), (vec![2, 2], vec![2, 2]));
        let k32 = complete_bipartite(3, 2);
        assert_eq!(k32.degrees(), (vec![2, 2, 2], vec![3, 3]));
        let double = BipartiteMultigraph::new(1, 1, vec![(0, 0), (0, 0)]).unwrap();
        assert_eq!(double.degrees(), (vec![2], vec![2]));
    }

    #[test]
    fn neighbourhoods() {
        let g = c4();
        assert_eq!(
            g.neighbourhood(&VertexSet::left([0])).unwrap().members(),
            &[0, 1]
        );
        assert!(g
            .neighbourhood(&VertexSet::empty(Side::Left))
            .unwrap()
            .is_empty());
        let k32 = complete_bipartite(3, 2);
        assert_eq!(
            k32.neighbourhood(&VertexSet::left([0, 1]))
                .unwrap()
                .members(),
            &[0, 1]
        );
    }

    #[test]
    fn unique_neighbours_edge_count_rule() {
        let g = c4();
        assert_eq!(
            g.unique_neighbours(&VertexSet::left([0]))
                .unwrap()
                .members(),
            &[0, 1]
        );
        assert!(g
            .unique_neighbours(&VertexSet::left([0, 1]))
            .unwrap()
            .is_empty());

        let double = BipartiteMultigraph::new(1, 2, vec![(0, 0), (0, 0), (0, 1)]).unwrap();
        let s = VertexSet::left([0]);
        assert_eq!(double.unique_neighbours(&s).unwrap().members(), &[1]);
        // The two conventions disagree exactly on multi-edges.
        assert_eq!(
            double.unique_neighbours_by_vertex(&s).unwrap().members(),
            &[0, 1]
        );
    }

    #[test]
    fn side_and_range_errors() {
        let g = c4();
        assert!(matches!(
            g.neighbourhood(&VertexSet::right([0])),
            Err(GraphError::SideMismatch { .. })
        ));
        assert!(matches!(
            g.unique_neighbours(&VertexSet::left([2])),
            Err(GraphError::VertexOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            BipartiteMultigraph::new(2, 2, vec![(2, 0)]),
            Err(GraphError::EdgeOutOfRange { .. })
        ));
    }

    #[test]
    fn ports_follow_edge_order() {
        let g = BipartiteMultigraph::new(3, 1, vec![(2, 0), (0, 0), (1, 0)]).unwrap();
        assert_eq!(g.ports(0).collect::<Vec<_>>(), vec![2, 0, 1]);
        assert_eq!(g.port(0, 1), 0);
    }

    #[test]
    fn connectivity() {
        assert!(c4().is_connected());
        assert!(even_cycle(5).is_connected());
        let two = BipartiteMultigraph::new(2, 2, vec![(0, 0), (1, 1)]).unwrap();
        assert!(!two.is_connected());
    }

    #[test]
    fn random_biregular_is_biregular() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = BipartiteMultigraph::random_biregular(12, 8, 4, 6, &mut rng).unwrap();
            assert_eq!(g.biregularity(), Some((4, 6)));
        }
        assert!(BipartiteMultigraph::random_biregular(3, 2, 2, 2, &mut rng).is_err());
    }

    #[test]
    fn induced_subgraph() {
        let g = even_cycle(3);
        let h = g.induced_by_left(&VertexSet::left([0, 1])).unwrap();
        assert_eq!(h.n_left(), 2);
        assert_eq!(h.n_right(), 3);
        assert_eq!(h.n_edges(), 4);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn graph_and_set() -> impl Strategy<Value = (BipartiteMultigraph, VertexSet)> {
            (1usize..6, 1usize..5, 1usize..4, any::<u64>()).prop_flat_map(|(r, mult, d0, seed)| {
                // n_left * c = n_right * d with c = d0, d = d0 * mult
                let n_right = r;
                let c = d0;
                let d = d0 * mult;
                let n_left = n_right * mult;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g =
                    BipartiteMultigraph::random_biregular(n_left, n_right, c, d, &mut rng).unwrap();
                let members = proptest::collection::vec(0..n_left, 0..=n_left);
                (Just(g), members.prop_map(VertexSet::left))
            })
        }

        proptest! {
            #[test]
            fn neighbourhood_laws((g, s) in graph_and_set()) {
                let (c, _) = g.require_biregular().unwrap();
                let nbhd = g.neighbourhood(&s).unwrap();
                let unique = g.unique_neighbours(&s).unwrap();
                prop_assert!(unique.is_subset(&nbhd));
                prop_assert!(nbhd.len() <= c * s.len());
                let counts = g.edge_counts_into(&s).unwrap();
                prop_assert_eq!(counts.iter().sum::<usize>(), c * s.len());
                if 2 * nbhd.len() > c * s.len() {
                    prop_assert!(!unique.is_empty());
                }
            }
        }
    }
}
