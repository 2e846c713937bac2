//! The routed product: one gadget copy per right vertex of a big graph.
//!
//! Gadget left vertex `i` at copy `v` stands for port `i` of `v`, that is the
//! left endpoint `E(v, i)` of the `i`-th edge at `v`. Product right vertex
//! `(v, j)` is numbered `v·|R₀| + j`.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::bigraph::{BipartiteMultigraph, GraphError, Side, VertexSet};
use crate::io::IoError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProductError {
    #[error("gadget has {gadget_left} left vertices but big graph right degree is {d}")]
    PortMismatch { gadget_left: usize, d: usize },
    #[error("right vertex {v} is not a neighbour of the set")]
    NotANeighbour { v: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedProduct {
    pub big: BipartiteMultigraph,
    pub gadget: BipartiteMultigraph,
    pub product: BipartiteMultigraph,
}

impl RoutedProduct {
    /// `|R₀|`.
    pub fn gadget_right(&self) -> usize {
        self.gadget.n_right()
    }

    /// Product right vertex for gadget output `j` at big right vertex `v`.
    pub fn right_index(&self, v: usize, j: usize) -> usize {
        v * self.gadget.n_right() + j
    }

    /// `(c·c₀, d₀)`: the degrees the product must have.
    pub fn expected_degrees(&self) -> Option<(usize, usize)> {
        let (c, _) = self.big.biregularity()?;
        let (c0, d0) = self.gadget.biregularity()?;
        Some((c * c0, d0))
    }
}

/// ```
/// use une::bigraph::complete_bipartite;
/// use une::product::routed_product;
///
/// // C4 routed through K_{2,1} is C4 again.
/// let rp = routed_product(&complete_bipartite(2, 2), &complete_bipartite(2, 1)).unwrap();
/// assert_eq!(rp.product.biregularity(), Some((2, 2)));
/// assert_eq!(rp.product.n_edges(), 4);
/// ```
pub fn routed_product(
    big: &BipartiteMultigraph,
    gadget: &BipartiteMultigraph,
) -> Result<RoutedProduct, ProductError> {
    let (_, d) = big.require_biregular()?;
    gadget.require_biregular()?;
    if gadget.n_left() != d {
        return Err(ProductError::PortMismatch {
            gadget_left: gadget.n_left(),
            d,
        });
    }
    let r0 = gadget.n_right();
    let mut edges = Vec::with_capacity(big.n_right() * gadget.n_edges());
    for v in 0..big.n_right() {
        edges.extend(
            gadget
                .edges()
                .iter()
                .map(|&(i, j)| (big.port(v, i), v * r0 + j)),
        );
    }
    let product = BipartiteMultigraph::new(big.n_left(), big.n_right() * r0, edges)?;
    Ok(RoutedProduct {
        big: big.clone(),
        gadget: gadget.clone(),
        product,
    })
}

/// Ports of `v` whose left endpoint lies in `s`, as gadget left vertices.
pub fn port_set(
    big: &BipartiteMultigraph,
    v: usize,
    s: &VertexSet,
) -> Result<VertexSet, GraphError> {
    if s.side() != Side::Left {
        return Err(GraphError::SideMismatch {
            expected: Side::Left,
            found: s.side(),
        });
    }
    if v >= big.n_right() {
        return Err(GraphError::VertexOutOfRange {
            side: Side::Right,
            vertex: v,
            bound: big.n_right(),
        });
    }
    Ok(VertexSet::left(
        big.ports(v)
            .enumerate()
            .filter(|&(_, u)| s.contains(u))
            .map(|(i, _)| i),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Inheritance {
    /// Every gadget unique neighbour of the port set lifted to a product
    /// unique neighbour. `lifted` counts them.
    Pass {
        lifted: usize,
    },
    Counterexample {
        v: usize,
        j: usize,
    },
}

/// Lifts each unique neighbour `j` of `port_set(v, s)` in the gadget and checks
/// that `(v, j)` is a unique neighbour of `s` in the product.
pub fn inheritance_check(
    rp: &RoutedProduct,
    s: &VertexSet,
    v: usize,
) -> Result<Inheritance, ProductError> {
    let ports = port_set(&rp.big, v, s)?;
    if ports.is_empty() {
        return Err(ProductError::NotANeighbour { v });
    }
    let gadget_unique = rp.gadget.unique_neighbours(&ports)?;
    let counts = rp.product.edge_counts_into(s)?;
    for &j in gadget_unique.members() {
        if counts[rp.right_index(v, j)] != 1 {
            return Ok(Inheritance::Counterexample { v, j });
        }
    }
    Ok(Inheritance::Pass {
        lifted: gadget_unique.len(),
    })
}

/// For every `v` and `j`, the product's left endpoints at `(v, j)` match
/// `{E(v, i) : (i, j) ∈ E₀}` as multisets. Returns the first `(v, j)` that
/// does not.
pub fn gadget_copies_check(rp: &RoutedProduct) -> Result<(), (usize, usize)> {
    let r0 = rp.gadget.n_right();
    if rp.product.n_right() != rp.big.n_right() * r0 || rp.product.n_left() != rp.big.n_left() {
        return Err((usize::MAX, usize::MAX));
    }
    for v in 0..rp.big.n_right() {
        for j in 0..r0 {
            let mut have: Vec<usize> = rp.product.ports(rp.right_index(v, j)).collect();
            let mut want: Vec<usize> = rp.gadget.ports(j).map(|i| rp.big.port(v, i)).collect();
            have.sort_unstable();
            want.sort_unstable();
            if have != want {
                return Err((v, j));
            }
        }
    }
    Ok(())
}

/// Sparse parity-check triplets `<row> <col> <mult>`: rows are right vertices
/// (checks), columns left vertices, sorted by row then column.
pub fn format_pcm(g: &BipartiteMultigraph) -> String {
    let mut pairs: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v)| (v, u)).collect();
    pairs.sort_unstable();
    let mut out = String::new();
    let mut i = 0;
    while i < pairs.len() {
        let mut k = i;
        while k < pairs.len() && pairs[k] == pairs[i] {
            k += 1;
        }
        let _ = writeln!(out, "{} {} {}", pairs[i].0, pairs[i].1, k - i);
        i = k;
    }
    out
}

pub fn write_pcm(g: &BipartiteMultigraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, format_pcm(g)).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::{complete_bipartite, even_cycle};
    use crate::gadget::{
        sample_gadget, verify_unique_neighbour_upto, GadgetParams, VerifyOptions, VerifyStatus,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matching(n: usize) -> BipartiteMultigraph {
        BipartiteMultigraph::new(n, n, (0..n).map(|i| (i, i)).collect()).unwrap()
    }

    #[test]
    fn c4_through_k21() {
        let c4 = complete_bipartite(2, 2);
        let rp = routed_product(&c4, &complete_bipartite(2, 1)).unwrap();
        let mut got = rp.product.edges().to_vec();
        let mut want = c4.edges().to_vec();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want);
        assert_eq!(gadget_copies_check(&rp), Ok(()));
        let s = VertexSet::left([0]);
        assert_eq!(port_set(&c4, 0, &s).unwrap().len(), 1);
        assert_eq!(
            inheritance_check(&rp, &s, 0).unwrap(),
            Inheritance::Pass { lifted: 1 }
        );
    }

    #[test]
    fn matching_gadget_gives_private_outputs() {
        let big = even_cycle(4);
        let rp = routed_product(&big, &matching(2)).unwrap();
        assert_eq!(rp.product.biregularity(), Some((2, 1)));
        assert_eq!(rp.product.n_right(), big.n_edges());
    }

    #[test]
    fn port_mismatch() {
        let err = routed_product(&complete_bipartite(3, 2), &complete_bipartite(2, 1)).unwrap_err();
        assert_eq!(
            err,
            ProductError::PortMismatch {
                gadget_left: 2,
                d: 3
            }
        );
    }

    #[test]
    fn port_set_edges() {
        let g = complete_bipartite(3, 2);
        assert_eq!(
            port_set(&g, 1, &VertexSet::left(0..3)).unwrap().members(),
            &[0, 1, 2]
        );
        let g = even_cycle(4);
        // right 2 is adjacent to left 1 and 2 only
        assert!(port_set(&g, 2, &VertexSet::left([0])).unwrap().is_empty());
        assert!(matches!(
            inheritance_check(
                &routed_product(&g, &matching(2)).unwrap(),
                &VertexSet::left([0]),
                2
            ),
            Err(ProductError::NotANeighbour { v: 2 })
        ));
    }

    #[test]
    fn pcm_merges_multiplicities() {
        let g = BipartiteMultigraph::new(2, 1, vec![(1, 0), (0, 0), (1, 0)]).unwrap();
        assert_eq!(format_pcm(&g), "0 0 1\n0 1 2\n");
    }

    #[test]
    fn random_products_obey_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..30 {
            let big = BipartiteMultigraph::random_biregular(6, 4, 2, 3, &mut rng).unwrap();
            let gadget = sample_gadget(&GadgetParams {
                l: 3,
                r: 1,
                c: 1,
                d: 3,
                seed: trial,
            })
            .unwrap();
            let rp = routed_product(&big, &gadget).unwrap();
            assert_eq!(rp.product.biregularity(), rp.expected_degrees());
            assert_eq!(rp.product.n_edges(), big.n_right() * gadget.n_edges());
            assert_eq!(gadget_copies_check(&rp), Ok(()));
            for _ in 0..20 {
                let s = VertexSet::left((0..6).filter(|_| rng.random_bool(0.4)));
                let Some(&v) = big.neighbourhood(&s).unwrap().members().first() else {
                    continue;
                };
                assert!(matches!(
                    inheritance_check(&rp, &s, v).unwrap(),
                    Inheritance::Pass { .. }
                ));
            }
        }
    }

    #[test]
    fn verified_gadget_lifts_to_product() {
        // (4,6) big graph, gadget with 6 left vertices verified to k = 1
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let big = BipartiteMultigraph::random_biregular(12, 8, 4, 6, &mut rng).unwrap();
        let gadget = sample_gadget(&GadgetParams {
            l: 6,
            r: 4,
            c: 2,
            d: 3,
            seed: 1,
        })
        .unwrap();
        let cert = verify_unique_neighbour_upto(&gadget, 1, VerifyOptions::default()).unwrap();
        assert_eq!(cert.status, VerifyStatus::Verified);
        let rp = routed_product(&big, &gadget).unwrap();
        for u in 0..12 {
            let s = VertexSet::left([u]);
            let v = big.left_neighbours(u).next().unwrap();
            if port_set(&big, v, &s).unwrap().len() == 1 {
                assert!(!rp.product.unique_neighbours(&s).unwrap().is_empty());
            }
        }
    }
}
