//! Depth-first enumeration of non-backtracking paths.
//!
//! A path is a sequence of edges `e_1, ..., e_ℓ` with `t(e_i) = s(e_{i+1})`
//! that never traverses the same edge twice in a row. Multi-edges are distinct
//! edges, so stepping back along a parallel edge is allowed. Every path starts
//! at a left vertex.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NbError;
use crate::bigraph::{BipartiteMultigraph, GraphError, Side, VertexSet};

pub const MAX_ENUMERATION_LEN: usize = 8;
pub const MAX_ENUMERATION_EDGES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMode {
    /// Every left vertex on the path lies in `S`.
    AllInS,
    /// The first and the last left vertex of the path lie in `S`.
    EndpointsInS,
}

fn check_budget(g: &BipartiteMultigraph, len: usize) -> Result<(), NbError> {
    if len > MAX_ENUMERATION_LEN || g.n_edges() > MAX_ENUMERATION_EDGES {
        return Err(NbError::BudgetExceeded {
            len,
            edges: g.n_edges(),
        });
    }
    Ok(())
}

struct Walker<'a> {
    g: &'a BipartiteMultigraph,
    in_s: Vec<bool>,
    mode: PathMode,
    len: usize,
}

impl Walker<'_> {
    /// Paths continuing from `vertex` on `side` after `steps` edges, the last
    /// being `last_edge`. `last_left` is the most recent left vertex visited.
    fn extend(
        &self,
        side: Side,
        vertex: usize,
        last_edge: usize,
        steps: usize,
        last_left: usize,
    ) -> u64 {
        if steps == self.len {
            return match self.mode {
                PathMode::AllInS => 1,
                PathMode::EndpointsInS => u64::from(self.in_s[last_left]),
            };
        }
        let incident = match side {
            Side::Left => self.g.left_incidence(vertex),
            Side::Right => self.g.right_incidence(vertex),
        };
        let mut total = 0;
        for &e in incident {
            if e == last_edge {
                continue;
            }
            let (u, v) = self.g.edges()[e];
            total += match side {
                Side::Left => self.extend(Side::Right, v, e, steps + 1, last_left),
                Side::Right => {
                    if self.mode == PathMode::AllInS && !self.in_s[u] {
                        continue;
                    }
                    self.extend(Side::Left, u, e, steps + 1, u)
                }
            };
        }
        total
    }
}

/// Counts non-backtracking paths of length `len` starting at a left vertex of `s`.
pub fn count_nb_paths_bruteforce(
    g: &BipartiteMultigraph,
    s: &VertexSet,
    len: usize,
    mode: PathMode,
) -> Result<u64, NbError> {
    check_budget(g, len)?;
    // validates side and range
    g.edge_counts_into(s)?;
    let walker = Walker {
        g,
        in_s: s.indicator(g.n_left()),
        mode,
        len,
    };
    if len == 0 {
        return Ok(s.len() as u64);
    }
    let starts: Vec<usize> = s
        .members()
        .iter()
        .flat_map(|&u| g.left_incidence(u).iter().copied())
        .collect();
    Ok(starts
        .par_iter()
        .map(|&e| {
            let (u, v) = g.edges()[e];
            walker.extend(Side::Right, v, e, 1, u)
        })
        .sum())
}

/// Left-to-left path counts: entry `[x][y]` is the number of non-backtracking
/// paths of even length `len` from left vertex `y` to left vertex `x`.
pub fn nb_path_matrix(g: &BipartiteMultigraph, len: usize) -> Result<Vec<Vec<u64>>, NbError> {
    check_budget(g, len)?;
    if len % 2 == 1 {
        return Err(NbError::OddLength(len));
    }
    let n = g.n_left();
    let mut out = vec![vec![0u64; n]; n];
    for start in 0..n {
        // Stack of (side, vertex, last edge, depth).
        let mut stack = vec![(Side::Left, start, usize::MAX, 0usize)];
        while let Some((side, x, last, depth)) = stack.pop() {
            if depth == len {
                out[x][start] += 1;
                continue;
            }
            let incident = match side {
                Side::Left => g.left_incidence(x),
                Side::Right => g.right_incidence(x),
            };
            for &e in incident.iter().filter(|&&e| e != last) {
                let (u, v) = g.edges()[e];
                match side {
                    Side::Left => stack.push((Side::Right, v, e, depth + 1)),
                    Side::Right => stack.push((Side::Left, u, e, depth + 1)),
                }
            }
        }
    }
    Ok(out)
}

/// `M_ℓ(L_G)`: all non-backtracking paths of length `ℓ` from the left side.
pub fn count_all_left_paths(g: &BipartiteMultigraph, len: usize) -> Result<u64, NbError> {
    count_nb_paths_bruteforce(g, &VertexSet::left(0..g.n_left()), len, PathMode::AllInS)
}

impl From<GraphError> for NbError {
    fn from(e: GraphError) -> Self {
        NbError::Graph(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::{complete_bipartite, even_cycle};
    use crate::nbwalk::{build_nb_operators, count_nb_paths_operator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn c4_counts() {
        let c4 = complete_bipartite(2, 2);
        let all = VertexSet::left([0, 1]);
        assert_eq!(
            count_nb_paths_bruteforce(&c4, &all, 2, PathMode::EndpointsInS).unwrap(),
            4
        );
        let one = VertexSet::left([0]);
        assert_eq!(
            count_nb_paths_bruteforce(&c4, &one, 2, PathMode::EndpointsInS).unwrap(),
            0
        );
    }

    #[test]
    fn single_edge_backtracks() {
        let g = complete_bipartite(1, 1);
        let s = VertexSet::left([0]);
        assert_eq!(
            count_nb_paths_bruteforce(&g, &s, 1, PathMode::AllInS).unwrap(),
            1
        );
        assert_eq!(
            count_nb_paths_bruteforce(&g, &s, 2, PathMode::AllInS).unwrap(),
            0
        );
    }

    #[test]
    fn parallel_edges_allow_return() {
        // Double edge: u -e0- v -e1- u is non-backtracking.
        let g = BipartiteMultigraph::new(1, 1, vec![(0, 0), (0, 0)]).unwrap();
        let s = VertexSet::left([0]);
        assert_eq!(
            count_nb_paths_bruteforce(&g, &s, 2, PathMode::EndpointsInS).unwrap(),
            2
        );
        let ops = build_nb_operators(&g, 2).unwrap();
        assert_eq!(count_nb_paths_operator(&ops, &s, 2).unwrap(), 2.into());
    }

    #[test]
    fn all_in_s_never_exceeds_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let g = BipartiteMultigraph::random_biregular(8, 4, 2, 4, &mut rng).unwrap();
            let s = VertexSet::left([0, 2, 3, 5]);
            for len in 1..=6 {
                let a = count_nb_paths_bruteforce(&g, &s, len, PathMode::AllInS).unwrap();
                let b = count_nb_paths_bruteforce(&g, &s, len, PathMode::EndpointsInS).unwrap();
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn budget_limits() {
        let g = even_cycle(3);
        let s = VertexSet::left([0]);
        assert!(matches!(
            count_nb_paths_bruteforce(&g, &s, 9, PathMode::AllInS),
            Err(NbError::BudgetExceeded { .. })
        ));
        let big = even_cycle(101);
        assert!(matches!(
            count_nb_paths_bruteforce(&big, &s, 2, PathMode::AllInS),
            Err(NbError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn path_matrix_matches_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let g = BipartiteMultigraph::random_biregular(6, 4, 2, 3, &mut rng).unwrap();
            let ops = build_nb_operators(&g, 8).unwrap();
            for len in [2, 4, 6, 8] {
                let brute = nb_path_matrix(&g, len).unwrap();
                let rows = ops.ll(len).to_rows();
                for (b, r) in brute.iter().zip(&rows) {
                    let r: Vec<u64> = r.iter().map(|x| u64::try_from(x).unwrap()).collect();
                    assert_eq!(b, &r);
                }
            }
        }
    }

    #[test]
    fn lemma9_seed_values() {
        assert_eq!(
            count_all_left_paths(&complete_bipartite(2, 2), 2).unwrap(),
            4
        );
        assert_eq!(
            count_all_left_paths(&complete_bipartite(3, 2), 1).unwrap(),
            6
        );
    }
}
