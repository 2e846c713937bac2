//! Singular spectra of biadjacency operators and bipartite-Ramanujan
//! certification.
//!
//! For a `(c,d)`-biregular graph with biadjacency `M` (rows = left vertices)
//! the adjacency eigenvalues are `±σ` for the singular values `σ` of `M`, plus
//! zeros. The top value is `√(cd)`. The graph is *bipartite Ramanujan* when
//! every other `σ` is 0 or lies in `[|√(d−1) − √(c−1)|, √(d−1) + √(c−1)]`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigraph::{BipartiteMultigraph, GraphError};

/// Default classification tolerance on singular values.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Largest matrix dimension handed to the dense eigensolver.
pub const MAX_DENSE_DIM: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is disconnected; the top singular value would not be simple")]
    Disconnected,
    #[error("matrix dimension {0} exceeds the dense eigensolver limit {MAX_DENSE_DIM}")]
    TooLarge(usize),
    #[error("graph is not regular: vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) out of range")]
    EdgeOutOfRange(usize, usize),
    #[error("degree {0} is too small; need d >= 2")]
    DegenerateDegree(usize),
    #[error("negative tolerance {0}")]
    BadTolerance(f64),
}

/// A `d`-regular multigraph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    edges: Vec<(usize, usize)>,
}

impl RegularGraph {
    pub fn new(n: usize, d: usize, edges: Vec<(usize, usize)>) -> Result<Self, SpectralError> {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(SpectralError::EdgeOutOfRange(u, v));
            }
            if u == v {
                return Err(SpectralError::SelfLoop(u));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        if let Some((vertex, &deg)) = degree.iter().enumerate().find(|(_, &k)| k != d) {
            return Err(SpectralError::NotRegular {
                vertex,
                degree: deg,
                expected: d,
            });
        }
        Ok(RegularGraph { n, d, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] += 1.0;
            a[(v, u)] += 1.0;
        }
        a
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        RegularGraph::new(n, n.saturating_sub(1), edges).expect("complete graph is regular")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        RegularGraph::new(10, 3, edges).expect("Petersen graph is 3-regular")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralClass {
    Trivial,
    Zero,
    NontrivialInBand,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub c: usize,
    pub d: usize,
    /// Nonincreasing; one value per left vertex.
    pub singular_values: Vec<f64>,
    pub classification: Vec<SpectralClass>,
    pub trivial_multiplicity: usize,
    /// `[|√(d−1) − √(c−1)|, √(d−1) + √(c−1)]`.
    pub band: [f64; 2],
    pub ramanujan: bool,
    pub tolerance: f64,
}

impl SpectrumReport {
    pub fn nontrivial(&self) -> impl Iterator<Item = f64> + '_ {
        self.singular_values
            .iter()
            .zip(&self.classification)
            .filter(|(_, &class)| class != SpectralClass::Trivial)
            .map(|(&s, _)| s)
    }
}

pub fn ramanujan_band(c: usize, d: usize) -> [f64; 2] {
    let a = ((d as f64) - 1.0).max(0.0).sqrt();
    let b = ((c as f64) - 1.0).max(0.0).sqrt();
    [(a - b).abs(), a + b]
}

/// Eigenvalues of a symmetric matrix, nonincreasing.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

#[cfg(test)]
fn gram_left(g: &BipartiteMultigraph) -> DMatrix<f64> {
    let m = g.biadjacency();
    let n = g.n_left();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let dot: u64 = m[i]
                .iter()
                .zip(&m[j])
                .map(|(&a, &b)| a as u64 * b as u64)
                .sum();
            out[(i, j)] = dot as f64;
            out[(j, i)] = dot as f64;
        }
    }
    out
}

fn gram_right(g: &BipartiteMultigraph) -> DMatrix<f64> {
    let m = g.biadjacency();
    let n = g.n_right();
    let mut out = DMatrix::zeros(n, n);
    for row in &m {
        for i in 0..n {
            if row[i] == 0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += (row[i] * row[j]) as f64;
            }
        }
    }
    out
}

/// Singular values of the biadjacency, nonincreasing, padded with exact zeros
/// to one per left vertex. Computed by SVD rather than from a Gram matrix so
/// that zero singular values come out near machine epsilon, not its root.
fn singular_values(g: &BipartiteMultigraph) -> Vec<f64> {
    let m = g.biadjacency();
    let dense = DMatrix::from_fn(g.n_left(), g.n_right(), |i, j| m[i][j] as f64);
    let mut values: Vec<f64> = dense
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.resize(g.n_left(), 0.0);
    values
}

/// Squared singular values from `MᵀM` (one per right vertex), nonincreasing.
pub fn right_gram_eigenvalues(g: &BipartiteMultigraph) -> Result<Vec<f64>, SpectralError> {
    if g.n_right() > MAX_DENSE_DIM {
        return Err(SpectralError::TooLarge(g.n_right()));
    }
    Ok(symmetric_eigenvalues(gram_right(g)))
}

pub fn spectrum(g: &BipartiteMultigraph) -> Result<SpectrumReport, SpectralError> {
    spectrum_with_tolerance(g, DEFAULT_TOLERANCE)
}

/// Singular spectrum of the biadjacency operator, classified at tolerance `tol`.
///
/// ```
/// use une::bigraph::complete_bipartite;
/// use une::spectral::spectrum;
///
/// let report = spectrum(&complete_bipartite(3, 2)).unwrap();
/// assert!(report.ramanujan);
/// assert!((report.singular_values[0] - 6f64.sqrt()).abs() < 1e-9);
/// ```
pub fn spectrum_with_tolerance(
    g: &BipartiteMultigraph,
    tol: f64,
) -> Result<SpectrumReport, SpectralError> {
    if !(tol >= 0.0) {
        return Err(SpectralError::BadTolerance(tol));
    }
    let (c, d) = g.require_biregular()?;
    if g.n_left() > MAX_DENSE_DIM {
        return Err(SpectralError::TooLarge(g.n_left()));
    }
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    let singular_values = singular_values(g);
    let top = ((c * d) as f64).sqrt();
    let band = ramanujan_band(c, d);
    let classification: Vec<SpectralClass> = singular_values
        .iter()
        .map(|&s| {
            if (s - top).abs() <= tol {
                SpectralClass::Trivial
            } else if s <= tol {
                SpectralClass::Zero
            } else if s >= band[0] - tol && s <= band[1] + tol {
                SpectralClass::NontrivialInBand
            } else {
                SpectralClass::Violation
            }
        })
        .collect();
    let trivial_multiplicity = classification
        .iter()
        .filter(|&&k| k == SpectralClass::Trivial)
        .count();
    let ramanujan = !classification.contains(&SpectralClass::Violation);
    Ok(SpectrumReport {
        c,
        d,
        singular_values,
        classification,
        trivial_multiplicity,
        band,
        ramanujan,
        tolerance: tol,
    })
}

/// Edge-vertex incidence graph: left = edges of `g`, right = vertices of `g`.
/// Edge `e = {u, v}` contributes `(e, u)` then `(e, v)`.
pub fn incidence_graph(g: &RegularGraph) -> BipartiteMultigraph {
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(e, &(u, v))| [(e, u), (e, v)])
        .collect();
    BipartiteMultigraph::new(g.edges().len(), g.n(), edges).expect("indices in range")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidenceIdentityReport {
    pub n: usize,
    pub d: usize,
    /// Spectrum of the regular graph's adjacency matrix, nonincreasing.
    pub adjacency_eigenvalues: Vec<f64>,
    /// Eigenvalues of `MᵀM` for the incidence biadjacency `M`, nonincreasing.
    pub squared_singular_values: Vec<f64>,
    /// `max |σ²_i − (d + μ_i)|` after sorting both lists.
    pub max_residual: f64,
    /// `MᵀM == dI + A` as an exact integer matrix identity.
    pub exact_identity: bool,
    /// Every nontrivial adjacency eigenvalue satisfies `|μ| ≤ 2√(d−1)`.
    pub regular_ramanujan: bool,
}

/// Checks `MᵀM = dI + A` for the incidence graph: numerically on spectra and
/// exactly on matrix entries.
pub fn incidence_spectrum_identity_check(
    g: &RegularGraph,
) -> Result<IncidenceIdentityReport, SpectralError> {
    if g.degree() < 2 {
        return Err(SpectralError::DegenerateDegree(g.degree()));
    }
    if g.n() > MAX_DENSE_DIM {
        return Err(SpectralError::TooLarge(g.n()));
    }
    let d = g.degree();
    let adjacency = g.adjacency();
    let incidence = incidence_graph(g);
    let gram = gram_right(&incidence);
    let mut exact_identity = true;
    for i in 0..g.n() {
        for j in 0..g.n() {
            let expected = adjacency[(i, j)] + if i == j { d as f64 } else { 0.0 };
            if gram[(i, j)] != expected {
                exact_identity = false;
            }
        }
    }
    let adjacency_eigenvalues = symmetric_eigenvalues(adjacency);
    let squared_singular_values = symmetric_eigenvalues(gram);
    let max_residual = adjacency_eigenvalues
        .iter()
        .zip(&squared_singular_values)
        .map(|(&mu, &s2)| (s2 - (d as f64 + mu)).abs())
        .fold(0.0, f64::max);
    let limit = 2.0 * ((d - 1) as f64).sqrt();
    let regular_ramanujan = adjacency_eigenvalues
        .iter()
        .skip(1)
        .all(|&mu| mu.abs() <= limit + DEFAULT_TOLERANCE);
    Ok(IncidenceIdentityReport {
        n: g.n(),
        d,
        adjacency_eigenvalues,
        squared_singular_values,
        max_residual,
        exact_identity,
        regular_ramanujan,
    })
}

/// Average-degree bound `1 + (1+ε)√(d−1)` for small induced subgraphs of a
/// `d`-regular Ramanujan graph.
pub fn kahale_bound(d: usize, eps: f64) -> Result<f64, SpectralError> {
    if d < 2 {
        return Err(SpectralError::DegenerateDegree(d));
    }
    Ok(1.0 + (1.0 + eps) * ((d - 1) as f64).sqrt())
}
