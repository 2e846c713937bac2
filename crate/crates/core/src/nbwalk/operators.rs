use num_bigint::BigInt;
use num_traits::Zero;

use super::matrix::DenseMatrix;
use super::NbError;
use crate::bigraph::{BipartiteMultigraph, Side, VertexSet};

pub type IntMatrix = DenseMatrix<BigInt>;

/// Longest path length the operator builder accepts.
pub const MAX_OPERATOR_LEN: usize = 20;

/// Non-backtracking path operators `A_ℓ^{XY}` for `0 ≤ ℓ ≤ max_len`.
///
/// Rows are indexed by the end side and columns by the start side: entry
/// `(x, y)` of `ll(ℓ)` counts non-backtracking paths of length `ℓ` from left
/// vertex `y` to left vertex `x`. `rl` maps functions on `L` to functions on
/// `R`, so its paths start in `L` and end in `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NbOperatorSet {
    pub c: usize,
    pub d: usize,
    pub max_len: usize,
    ll: Vec<IntMatrix>,
    rl: Vec<IntMatrix>,
    lr: Vec<IntMatrix>,
    rr: Vec<IntMatrix>,
}

impl NbOperatorSet {
    pub fn ll(&self, len: usize) -> &IntMatrix {
        &self.ll[len]
    }

    pub fn rl(&self, len: usize) -> &IntMatrix {
        &self.rl[len]
    }

    pub fn lr(&self, len: usize) -> &IntMatrix {
        &self.lr[len]
    }

    pub fn rr(&self, len: usize) -> &IntMatrix {
        &self.rr[len]
    }

    /// Checks the four step recursions for every `2 ≤ ℓ < max_len`; returns the
    /// first `(ℓ, name)` where one fails.
    pub fn check_recursions(&self, m: &IntMatrix) -> Result<(), (usize, &'static str)> {
        let mt = m.transpose();
        let cm = BigInt::from(self.c as i64 - 1);
        let dm = BigInt::from(self.d as i64 - 1);
        for l in 2..self.max_len {
            let checks: [(&'static str, IntMatrix, IntMatrix); 4] = [
                (
                    "MtLL",
                    mt.matmul(&self.ll[l]),
                    self.rl[l + 1].add(&self.rl[l - 1].scale(&dm)),
                ),
                (
                    "MtLR",
                    mt.matmul(&self.lr[l]),
                    self.rr[l + 1].add(&self.rr[l - 1].scale(&dm)),
                ),
                (
                    "MRL",
                    m.matmul(&self.rl[l]),
                    self.ll[l + 1].add(&self.ll[l - 1].scale(&cm)),
                ),
                (
                    "MRR",
                    m.matmul(&self.rr[l]),
                    self.lr[l + 1].add(&self.lr[l - 1].scale(&cm)),
                ),
            ];
            for (name, lhs, rhs) in checks {
                if lhs != rhs {
                    return Err((l, name));
                }
            }
        }
        Ok(())
    }
}

/// Biadjacency as an integer matrix, rows = left vertices.
pub fn biadjacency_int(g: &BipartiteMultigraph) -> IntMatrix {
    let m = g.biadjacency();
    DenseMatrix::from_fn(g.n_left(), g.n_right(), |u, v| BigInt::from(m[u][v]))
}

/// Builds all operators up to `max_len` from the seeds `A_1^{RL} = Mᵀ`,
/// `A_1^{LR} = M`, `A_2^{LL} = MMᵀ − cI`, `A_2^{RR} = MᵀM − dI` and the step
/// recursions, in exact integer arithmetic.
pub fn build_nb_operators(
    g: &BipartiteMultigraph,
    max_len: usize,
) -> Result<NbOperatorSet, NbError> {
    if max_len > MAX_OPERATOR_LEN {
        return Err(NbError::LengthOutOfRange {
            len: max_len,
            max: MAX_OPERATOR_LEN,
        });
    }
    let (c, d) = g.require_biregular()?;
    let (nl, nr) = (g.n_left(), g.n_right());
    let m = biadjacency_int(g);
    let mt = m.transpose();
    let cm = BigInt::from(c as i64 - 1);
    let dm = BigInt::from(d as i64 - 1);

    let mut ll = vec![IntMatrix::identity(nl), IntMatrix::zeros(nl, nl)];
    let mut rr = vec![IntMatrix::identity(nr), IntMatrix::zeros(nr, nr)];
    let mut rl = vec![IntMatrix::zeros(nr, nl), mt.clone()];
    let mut lr = vec![IntMatrix::zeros(nl, nr), m.clone()];
    if max_len >= 2 {
        ll.push(
            m.matmul(&mt)
                .sub(&IntMatrix::identity(nl).scale(&BigInt::from(c))),
        );
        rr.push(
            mt.matmul(&m)
                .sub(&IntMatrix::identity(nr).scale(&BigInt::from(d))),
        );
        rl.push(IntMatrix::zeros(nr, nl));
        lr.push(IntMatrix::zeros(nl, nr));
    }
    for l in 2..max_len {
        let next_rl = mt.matmul(&ll[l]).sub(&rl[l - 1].scale(&dm));
        let next_rr = mt.matmul(&lr[l]).sub(&rr[l - 1].scale(&dm));
        let next_ll = m.matmul(&rl[l]).sub(&ll[l - 1].scale(&cm));
        let next_lr = m.matmul(&rr[l]).sub(&lr[l - 1].scale(&cm));
        rl.push(next_rl);
        rr.push(next_rr);
        ll.push(next_ll);
        lr.push(next_lr);
    }
    ll.truncate(max_len + 1);
    rr.truncate(max_len + 1);
    rl.truncate(max_len + 1);
    lr.truncate(max_len + 1);
    Ok(NbOperatorSet {
        c,
        d,
        max_len,
        ll,
        rl,
        lr,
        rr,
    })
}

/// `M_len(S, G) = ⟨A_len^{LL} 1_S, 1_S⟩` for even `len`.
pub fn count_nb_paths_operator(
    ops: &NbOperatorSet,
    s: &VertexSet,
    len: usize,
) -> Result<BigInt, NbError> {
    if len % 2 == 1 {
        return Err(NbError::OddLength(len));
    }
    if len > ops.max_len {
        return Err(NbError::LengthOutOfRange {
            len,
            max: ops.max_len,
        });
    }
    if s.side() != Side::Left {
        return Err(NbError::Graph(crate::bigraph::GraphError::SideMismatch {
            expected: Side::Left,
            found: s.side(),
        }));
    }
    let a = ops.ll(len);
    if let Some(&v) = s.members().last() {
        if v >= a.rows() {
            return Err(NbError::Graph(
                crate::bigraph::GraphError::VertexOutOfRange {
                    side: Side::Left,
                    vertex: v,
                    bound: a.rows(),
                },
            ));
        }
    }
    let mut total = BigInt::zero();
    for &i in s.members() {
        for &j in s.members() {
            total += a.get(i, j);
        }
    }
    Ok(total)
}
