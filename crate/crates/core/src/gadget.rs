//! Random gadgets and exhaustive unique-neighbour verification.

use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigraph::{BipartiteMultigraph, GraphError};
use crate::precise::{self, Real};

/// Largest set size the verifier enumerates.
pub const MAX_VERIFY_K: usize = 12;
/// Default cap on the number of subsets examined.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// Margin below which a log-domain comparison is redone at high precision.
pub const LOG_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GadgetError {
    #[error("invalid gadget parameters: {0}")]
    InvalidParams(String),
    #[error("the size bound needs c > 3, got c = {0}")]
    DegreeTooSmall(usize),
    #[error("k = {k} exceeds the enumeration limit {max}")]
    KTooLarge { k: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetParams {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "R")]
    pub r: usize,
    pub c: usize,
    pub d: usize,
    pub seed: u64,
}

impl GadgetParams {
    pub fn validate(&self) -> Result<(), GadgetError> {
        let GadgetParams { l, r, c, d, .. } = *self;
        if r == 0 || c == 0 || d == 0 {
            return Err(GadgetError::InvalidParams(
                "R, c and d must be positive".into(),
            ));
        }
        if l <= r {
            return Err(GadgetError::InvalidParams(format!(
                "need L > R, got L={l}, R={r}"
            )));
        }
        if l.checked_mul(c) != r.checked_mul(d) {
            return Err(GadgetError::InvalidParams(format!(
                "L*c != R*d ({l}*{c} vs {r}*{d})"
            )));
        }
        Ok(())
    }
}

/// Samples a gadget by shuffling half-edge slots with a seeded ChaCha8 stream.
///
/// ```
/// use une::gadget::{sample_gadget, GadgetParams};
///
/// let p = GadgetParams { l: 12, r: 8, c: 4, d: 6, seed: 7 };
/// let g = sample_gadget(&p).unwrap();
/// assert_eq!(g.biregularity(), Some((4, 6)));
/// assert_eq!(g, sample_gadget(&p).unwrap());
/// ```
pub fn sample_gadget(p: &GadgetParams) -> Result<BipartiteMultigraph, GadgetError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    Ok(BipartiteMultigraph::random_biregular(
        p.l, p.r, p.c, p.d, &mut rng,
    )?)
}

/// `ln((Le/k)(3eck/R)^{(c−1)/2})`, the per-set union-bound exponent, from
/// logarithms of `L`, `R` and `k`.
pub fn lemma7_log_inner(ln_l: f64, ln_r: f64, c: usize, ln_k: f64) -> f64 {
    let cf = c as f64;
    ln_l + 1.0 + 0.5 * (cf - 1.0) * (3f64.ln() + 1.0 + cf.ln() - ln_r) + 0.5 * (cf - 3.0) * ln_k
}

/// Same as [`lemma7_log_inner`] at `bits` of precision.
pub fn lemma7_log_inner_precise(l: &Real, r: &Real, c: usize, k: &Real, bits: usize) -> Real {
    let one = precise::int(1, bits);
    let half = precise::from_f64(0.5, bits);
    let cm = precise::int(c as i64 - 1, bits);
    let c3 = precise::int(c as i64 - 3, bits);
    let three = precise::int(3, bits);
    let cc = precise::int(c as i64, bits);
    l.ln() + &one + &half * cm * (three.ln() + &one + cc.ln() - r.ln()) + half * c3 * k.ln()
}

/// Largest `k ≥ 0` with `k^{(c−3)/2} ≤ (1/(2Le))(R/(3ec))^{(c−1)/2}`.
///
/// ```
/// use une::gadget::lemma7_k_bound;
///
/// assert_eq!(lemma7_k_bound(1000, 200, 6).unwrap(), 0);
/// assert_eq!(lemma7_k_bound(1800, 1600, 8).unwrap(), 2);
/// ```
pub fn lemma7_k_bound(l: usize, r: usize, c: usize) -> Result<u64, GadgetError> {
    if c <= 3 {
        return Err(GadgetError::DegreeTooSmall(c));
    }
    if l == 0 || r == 0 {
        return Err(GadgetError::InvalidParams(
            "L and R must be positive".into(),
        ));
    }
    let (ln_l, ln_r) = ((l as f64).ln(), (r as f64).ln());
    // inner(k) ≤ 1/2, solved for ln k.
    let ln_kmax = -(LN_2 + lemma7_log_inner(ln_l, ln_r, c, 0.0)) * 2.0 / (c as f64 - 3.0);
    if ln_kmax < -LOG_MARGIN {
        return Ok(0);
    }
    if ln_kmax > 43.0 {
        return Ok(u64::MAX);
    }
    let mut k = ln_kmax.exp().floor().max(0.0) as u64;
    let holds = |k: u64| -> bool {
        if k == 0 {
            return true;
        }
        let m = -LN_2 - lemma7_log_inner(ln_l, ln_r, c, (k as f64).ln());
        if m.abs() > LOG_MARGIN * 1e3 {
            return m >= 0.0;
        }
        let bits = precise::DEFAULT_BITS;
        let v = lemma7_log_inner_precise(
            &precise::int(l as i64, bits),
            &precise::int(r as i64, bits),
            c,
            &precise::int(k as i64, bits),
            bits,
        );
        v <= -precise::int(2, bits).ln()
    };
    while k > 0 && !holds(k) {
        k -= 1;
    }
    while holds(k + 1) {
        k += 1;
    }
    Ok(k)
}

/// `ln` of `((Le/k)(3eck/R)^{(c−1)/2})^k`, unclamped.
pub fn repeats_log_bound(l: usize, r: usize, c: usize, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    k as f64 * lemma7_log_inner((l as f64).ln(), (r as f64).ln(), c, (k as f64).ln())
}

/// Union bound on the probability that some set of exactly `k` left vertices
/// has fewer than `(c−1)k/2` repeats, clamped to `[0, 1]`. `k = 0` gives 1.
pub fn repeats_probability_bound(
    l: usize,
    r: usize,
    c: usize,
    k: usize,
) -> Result<f64, GadgetError> {
    if c < 3 {
        return Err(GadgetError::DegreeTooSmall(c));
    }
    if k == 0 {
        return Ok(1.0);
    }
    Ok(repeats_log_bound(l, r, c, k).min(0.0).exp())
}

/// `Σ_{a=1}^{k}` of the unclamped per-size bounds.
pub fn repeats_series(l: usize, r: usize, c: usize, k: usize) -> Result<f64, GadgetError> {
    if c < 3 {
        return Err(GadgetError::DegreeTooSmall(c));
    }
    Ok((1..=k).map(|a| repeats_log_bound(l, r, c, a).exp()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMethod {
    Exhaustive,
    ExhaustivePruned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyStatus {
    Verified,
    Refuted,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub budget: u64,
    pub prune: bool,
    /// Re-test every pruned set exactly and count pruning failures.
    pub audit: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: DEFAULT_BUDGET,
            prune: true,
            audit: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneAudit {
    pub pruned: u64,
    pub counterexamples: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetCertificate {
    #[serde(skip)]
    pub graph: BipartiteMultigraph,
    pub target_k: usize,
    pub verified_k: usize,
    pub witness: Option<Vec<usize>>,
    pub method: VerifyMethod,
    pub status: VerifyStatus,
    pub subsets_checked: u64,
    pub audit: Option<PruneAudit>,
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Incremental edge counts for the current subset.
struct Counter<'a> {
    g: &'a BipartiteMultigraph,
    counts: Vec<u32>,
    ones: usize,
    touched: usize,
}

impl<'a> Counter<'a> {
    fn new(g: &'a BipartiteMultigraph) -> Self {
        Counter {
            g,
            counts: vec![0; g.n_right()],
            ones: 0,
            touched: 0,
        }
    }

    fn push(&mut self, u: usize) {
        for v in self.g.left_neighbours(u) {
            let k = &mut self.counts[v];
            match *k {
                0 => {
                    self.ones += 1;
                    self.touched += 1;
                }
                1 => self.ones -= 1,
                _ => {}
            }
            *k += 1;
        }
    }

    fn pop(&mut self, u: usize) {
        for v in self.g.left_neighbours(u) {
            let k = &mut self.counts[v];
            *k -= 1;
            match *k {
                0 => {
                    self.ones -= 1;
                    self.touched -= 1;
                }
                1 => self.ones += 1,
                _ => {}
            }
        }
    }
}

#[derive(Default)]
struct PartitionResult {
    /// Leaves visited before the first bad set (or all leaves if none).
    visited: u64,
    bad: Option<Vec<usize>>,
    pruned: u64,
    counterexamples: u64,
}

struct Search<'a> {
    g: &'a BipartiteMultigraph,
    size: usize,
    c: usize,
    opts: VerifyOptions,
}

impl Search<'_> {
    /// Lexicographic DFS over `size`-subsets whose smallest element is `first`.
    fn partition(&self, first: usize) -> PartitionResult {
        let mut counter = Counter::new(self.g);
        let mut stack = vec![first];
        counter.push(first);
        let mut out = PartitionResult::default();
        let n = self.g.n_left();
        loop {
            if stack.len() == self.size {
                if !self.leaf_ok(&counter, &mut out) {
                    out.bad = Some(stack.clone());
                    return out;
                }
                out.visited += 1;
                // advance the last element, backtracking as needed
                loop {
                    let Some(top) = stack.pop() else { return out };
                    counter.pop(top);
                    if stack.is_empty() {
                        return out;
                    }
                    let slot = stack.len();
                    if top + 1 + (self.size - slot - 1) < n {
                        stack.push(top + 1);
                        counter.push(top + 1);
                        break;
                    }
                }
            } else {
                let next = stack.last().expect("nonempty") + 1;
                stack.push(next);
                counter.push(next);
            }
        }
    }

    fn leaf_ok(&self, counter: &Counter, out: &mut PartitionResult) -> bool {
        let exact = counter.ones > 0;
        if self.opts.prune && 2 * counter.touched > self.c * self.size {
            out.pruned += 1;
            if self.opts.audit && !exact {
                out.counterexamples += 1;
            }
            return true;
        }
        exact
    }
}

/// Checks that every nonempty left set of size at most `k` has a unique
/// neighbour (a right vertex with exactly one edge into the set).
///
/// ```
/// use une::bigraph::even_cycle;
/// use une::gadget::{verify_unique_neighbour_upto, VerifyOptions, VerifyStatus};
///
/// let cert = verify_unique_neighbour_upto(&even_cycle(3), 3, VerifyOptions::default()).unwrap();
/// assert_eq!(cert.status, VerifyStatus::Refuted);
/// assert_eq!(cert.verified_k, 2);
/// assert_eq!(cert.witness, Some(vec![0, 1, 2]));
/// ```
pub fn verify_unique_neighbour_upto(
    g: &BipartiteMultigraph,
    k: usize,
    opts: VerifyOptions,
) -> Result<GadgetCertificate, GadgetError> {
    if k > MAX_VERIFY_K {
        return Err(GadgetError::KTooLarge {
            k,
            max: MAX_VERIFY_K,
        });
    }
    let n = g.n_left();
    // With c the largest left degree, a set with no unique neighbour has
    // |N(S)| ≤ c|S|/2, which is what the pruning step relies on.
    let c = g.degrees().0.into_iter().max().unwrap_or(0);
    let method = if opts.prune {
        VerifyMethod::ExhaustivePruned
    } else {
        VerifyMethod::Exhaustive
    };
    let mut cert = GadgetCertificate {
        graph: g.clone(),
        target_k: k,
        verified_k: 0,
        witness: None,
        method,
        status: VerifyStatus::Verified,
        subsets_checked: 0,
        audit: opts.audit.then_some(PruneAudit {
            pruned: 0,
            counterexamples: 0,
        }),
    };
    for size in 1..=k {
        let total = binomial(n, size);
        if cert.subsets_checked.saturating_add(total) > opts.budget {
            cert.status = VerifyStatus::BudgetExceeded;
            return Ok(cert);
        }
        if total > 0 {
            let search = Search { g, size, c, opts };
            let results: Vec<PartitionResult> = (0..=n - size)
                .into_par_iter()
                .map(|f| search.partition(f))
                .collect();
            let mut seen = 0u64;
            for r in &results {
                if let Some(a) = cert.audit.as_mut() {
                    a.pruned += r.pruned;
                    a.counterexamples += r.counterexamples;
                }
            }
            for r in results {
                seen += r.visited;
                if let Some(bad) = r.bad {
                    cert.subsets_checked += seen + 1;
                    cert.witness = Some(bad);
                    cert.status = VerifyStatus::Refuted;
                    return Ok(cert);
                }
            }
            cert.subsets_checked += seen;
        }
        cert.verified_k = size;
    }
    cert.verified_k = k;
    Ok(cert)
}

/// Direct enumerator with no pruning or incremental counts; a test oracle.
pub fn verify_unique_neighbour_naive(
    g: &BipartiteMultigraph,
    k: usize,
) -> (usize, Option<Vec<usize>>) {
    use crate::bigraph::VertexSet;
    let n = g.n_left();
    for size in 1..=k.min(n) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let s = VertexSet::left(combo.iter().copied());
            if !g.has_unique_neighbour(&s).expect("valid set") {
                return (size - 1, Some(combo));
            }
            // next combination in lex order
            let mut i = size;
            while i > 0 && combo[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    (k, None)
}
