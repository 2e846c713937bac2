//! Numerical checks of the path-count bounds.
//!
//! Each check returns a report with both sides of the inequality. A violation
//! is data, not an error: errors are reserved for unmet preconditions.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::operators::{build_nb_operators, count_nb_paths_operator, NbOperatorSet};
use super::paths::{
    count_all_left_paths, count_nb_paths_bruteforce, PathMode, MAX_ENUMERATION_LEN,
};
use super::roots::{char_roots, REPEATED_ROOT_THRESHOLD};
use super::NbError;
use crate::bigraph::{BipartiteMultigraph, VertexSet};
use crate::precise::{self, Real, RECHECK_WINDOW};
use crate::spectral::spectrum;

/// Grid of `samples` equally spaced `λ` over the band, endpoints included.
fn band_grid(c: usize, d: usize, samples: usize) -> Vec<f64> {
    let a = ((d - 1) as f64).sqrt();
    let b = ((c - 1) as f64).sqrt();
    let (lo, hi) = ((a - b).abs(), a + b);
    (0..samples)
        .map(|i| {
            if i + 1 == samples {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (samples - 1) as f64
            }
        })
        .collect()
}

fn interior_coefficient(c: usize, d: usize, x: f64) -> Option<f64> {
    let dlt = super::roots::delta(c, d, x);
    if dlt > -REPEATED_ROOT_THRESHOLD {
        return None;
    }
    let q = x * (x - (c * d) as f64) / (dlt * (c - 1) as f64);
    Some(2.0 * q.max(0.0).sqrt())
}

/// Smallest `ℓ` with `max_x 2√(x(x−cd)/(Δ(x)(c−1))) ≤ (2+√(d−1))ℓ` over the
/// interior grid points.
pub fn ell_min(c: usize, d: usize, samples: usize) -> usize {
    let worst = band_grid(c, d, samples.max(2))
        .into_iter()
        .filter_map(|l| interior_coefficient(c, d, l * l))
        .fold(0.0f64, f64::max);
    let per = 2.0 + ((d - 1) as f64).sqrt();
    ((worst / per).ceil() as usize).max(1)
}

fn p_value_f64(c: usize, d: usize, ell: usize, x: f64) -> f64 {
    let (cm, dm) = ((c - 1) as f64, (d - 1) as f64);
    let (mut prev, mut cur) = (c as f64 / cm, x - c as f64);
    if ell == 0 {
        return prev;
    }
    for _ in 1..ell {
        let next = (x - cm - dm) * cur - cm * dm * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `|p_ℓ(λ²)| / ((2+√(d−1))ℓ((c−1)(d−1))^{ℓ/2})` at high precision. `λ` is
/// given as grid index `i` of `samples`, or `None` for `λ = 0`.
fn ratio_precise(c: usize, d: usize, ell: usize, grid: Option<(usize, usize)>, bits: usize) -> f64 {
    let a = precise::sqrt_int(d as i64 - 1, bits);
    let b = precise::sqrt_int(c as i64 - 1, bits);
    let lambda = match grid {
        None => precise::int(0, bits),
        Some((i, n)) => {
            let lo = precise::abs(&(&a - &b));
            let hi = &a + &b;
            let t = precise::int(i as i64, bits) / precise::int(n as i64 - 1, bits);
            &lo + (&hi - &lo) * t
        }
    };
    let x = precise::square(&lambda);
    let cm = precise::int(c as i64 - 1, bits);
    let dm = precise::int(d as i64 - 1, bits);
    let mut prev = precise::int(c as i64, bits) / &cm;
    let mut cur = &x - precise::int(c as i64, bits);
    let p = if ell == 0 {
        prev
    } else {
        for _ in 1..ell {
            let next: Real = (&x - &cm - &dm) * &cur - &cm * &dm * &prev;
            prev = cur;
            cur = next;
        }
        cur
    };
    let root = (&cm * &dm).sqrt();
    let scale = (precise::int(2, bits) + &a) * precise::int(ell as i64, bits);
    let bound = scale * root.powi((ell as i64).into());
    precise::to_f64(&(precise::abs(&p) / bound))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma6Sample {
    pub lambda: f64,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma6Report {
    pub c: usize,
    pub d: usize,
    pub ell: usize,
    pub samples: usize,
    pub ell_min: usize,
    /// False when `ell < ell_min`; the bound is then only informational.
    pub asserted: bool,
    pub bound: f64,
    pub worst: Lemma6Sample,
    pub violations: Vec<Lemma6Sample>,
    /// Largest gap between the closed form and the direct recurrence,
    /// relative to the bound.
    pub closed_form_discrepancy: f64,
    pub rechecked: usize,
}

impl Lemma6Report {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn lemma6_bound_check(
    c: usize,
    d: usize,
    ell: usize,
    samples: usize,
) -> Result<Lemma6Report, NbError> {
    lemma6_bound_check_with(c, d, ell, samples, precise::DEFAULT_BITS)
}

pub fn lemma6_bound_check_with(
    c: usize,
    d: usize,
    ell: usize,
    samples: usize,
    bits: usize,
) -> Result<Lemma6Report, NbError> {
    if c < 2 || d < 2 {
        return Err(NbError::InvalidDegrees { c, d });
    }
    if samples < 2 {
        return Err(NbError::TooFewSamples(samples));
    }
    if ell == 0 {
        return Err(NbError::LengthOutOfRange {
            len: 0,
            max: usize::MAX,
        });
    }
    let bound = (2.0 + ((d - 1) as f64).sqrt())
        * ell as f64
        * (((c - 1) * (d - 1)) as f64).powf(ell as f64 / 2.0);
    let grid = band_grid(c, d, samples);
    let points = std::iter::once((0.0, None)).chain(
        grid.iter()
            .enumerate()
            .map(|(i, &l)| (l, Some((i, samples)))),
    );
    let mut worst: Option<Lemma6Sample> = None;
    let mut violations = Vec::new();
    let mut discrepancy = 0.0f64;
    let mut rechecked = 0;
    for (lambda, idx) in points {
        let x = lambda * lambda;
        let value = p_value_f64(c, d, ell, x);
        let mut ratio = value.abs() / bound;
        if (ratio - 1.0).abs() < RECHECK_WINDOW {
            ratio = ratio_precise(c, d, ell, idx, bits);
            rechecked += 1;
        }
        let closed = char_roots(c, d, x).eval(ell as u32);
        discrepancy = discrepancy.max((closed.re - value).abs().max(closed.im.abs()) / bound);
        let sample = Lemma6Sample {
            lambda,
            value,
            bound,
            ratio,
        };
        if ratio > 1.0 {
            violations.push(sample.clone());
        }
        if worst.as_ref().is_none_or(|w| ratio > w.ratio) {
            worst = Some(sample);
        }
    }
    let lmin = ell_min(c, d, samples);
    Ok(Lemma6Report {
        c,
        d,
        ell,
        samples,
        ell_min: lmin,
        asserted: ell >= lmin,
        bound,
        worst: worst.expect("grid is nonempty"),
        violations,
        closed_form_discrepancy: discrepancy,
        rechecked,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma8Report {
    pub c: usize,
    pub d: usize,
    pub ell: usize,
    pub set_size: usize,
    pub n: usize,
    /// `M_{2ℓ}(S, G)` as a decimal string.
    pub count: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
}

/// `M_{2ℓ}(S,G) ≤ |S|((2+√(d−1))ℓ+2)((c−1)(d−1))^{ℓ/2}` under
/// `|S|((c−1)(d−1))^{ℓ/2} ≤ n`.
pub fn lemma8_upper_check(
    g: &BipartiteMultigraph,
    s: &VertexSet,
    ell: usize,
) -> Result<Lemma8Report, NbError> {
    g.require_biregular()?;
    if !spectrum(g)?.ramanujan {
        return Err(NbError::NotRamanujan);
    }
    let ops = build_nb_operators(g, 2 * ell)?;
    lemma8_upper_check_ops(&ops, g.n_left(), s, ell)
}

/// [`lemma8_upper_check`] on prebuilt operators, for sweeps over many sets.
/// The caller is responsible for the Ramanujan precondition.
pub fn lemma8_upper_check_ops(
    ops: &NbOperatorSet,
    n: usize,
    s: &VertexSet,
    ell: usize,
) -> Result<Lemma8Report, NbError> {
    let (c, d) = (ops.c, ops.d);
    let growth = (((c - 1) * (d - 1)) as f64).powf(ell as f64 / 2.0);
    let size = s.len() as f64 * growth;
    if size > n as f64 {
        return Err(NbError::SetTooLarge { lhs: size, rhs: n });
    }
    let count: BigInt = count_nb_paths_operator(ops, s, 2 * ell)?;
    let lhs = count.to_f64().unwrap_or(f64::INFINITY);
    let rhs = s.len() as f64 * ((2.0 + ((d - 1) as f64).sqrt()) * ell as f64 + 2.0) * growth;
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(Lemma8Report {
        c,
        d,
        ell,
        set_size: s.len(),
        n,
        count: count.to_string(),
        lhs,
        rhs,
        ratio,
        holds: lhs <= rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma9Entry {
    pub ell: usize,
    pub count: u64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma9Report {
    pub edges: usize,
    pub avg_left: f64,
    pub avg_right: f64,
    pub entries: Vec<Lemma9Entry>,
}

impl Lemma9Report {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }
}

/// `count ≥ |E|·((d̄_L−1)(d̄_R−1))^{(ℓ−1)/2}`, exact when the `f64` comparison
/// is too close to call.
fn lemma9_holds(count: u64, e: usize, nl: usize, nr: usize, ell: usize, bound: f64) -> bool {
    let c = count as f64;
    if bound <= 0.0 || (c - bound).abs() > RECHECK_WINDOW * bound {
        return c >= bound;
    }
    // count² ≥ |E|² · (pq)^{ℓ−1} with p = (|E|−|L|)/|L|, q = (|E|−|R|)/|R|,
    // cleared of denominators.
    let e = BigInt::from(e);
    let (l, r) = (BigInt::from(nl), BigInt::from(nr));
    let num = (&e - &l) * (&e - &r);
    let den = &l * &r;
    let k = (ell - 1) as u32;
    let lhs = BigInt::from(count).pow(2) * den.pow(k);
    let rhs = e.pow(2) * num.pow(k);
    lhs >= rhs
}

pub fn lemma9_lower_check(g: &BipartiteMultigraph) -> Result<Lemma9Report, NbError> {
    lemma9_lower_check_upto(g, MAX_ENUMERATION_LEN)
}

pub fn lemma9_lower_check_upto(
    g: &BipartiteMultigraph,
    max_len: usize,
) -> Result<Lemma9Report, NbError> {
    let (e, nl, nr) = (g.n_edges(), g.n_left(), g.n_right());
    let avg_left = if nl == 0 { 0.0 } else { e as f64 / nl as f64 };
    let avg_right = if nr == 0 { 0.0 } else { e as f64 / nr as f64 };
    let base = ((avg_left - 1.0) * (avg_right - 1.0)).max(0.0);
    let mut entries = Vec::with_capacity(max_len);
    for ell in 1..=max_len {
        let count = count_all_left_paths(g, ell)?;
        let bound = e as f64 * base.powf((ell as f64 - 1.0) / 2.0);
        let holds = if nl == 0 || nr == 0 || base == 0.0 {
            count as f64 >= bound
        } else {
            lemma9_holds(count, e, nl, nr, ell, bound)
        };
        entries.push(Lemma9Entry {
            ell,
            count,
            bound,
            holds,
        });
    }
    Ok(Lemma9Report {
        edges: e,
        avg_left,
        avg_right,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub c: usize,
    pub d: usize,
    pub ell: usize,
    pub set_size: usize,
    pub neighbourhood_size: usize,
    /// `c|S|/|N(S)|`.
    pub avg_right: f64,
    /// `c|S|((c−1)(d̄_R−1))^{(2ℓ−1)/2}`.
    pub lower: f64,
    /// `M_{2ℓ}(S)`: paths inside `S ∪ N(S)`.
    pub inner: u64,
    /// `M_{2ℓ}(S, G)`.
    pub outer: String,
    pub upper: f64,
    pub holds: bool,
}

/// Evaluates `lower ≤ M_{2ℓ}(S) ≤ M_{2ℓ}(S,G) ≤ upper` on a Ramanujan graph.
pub fn theorem2_chain(
    g: &BipartiteMultigraph,
    s: &VertexSet,
    ell: usize,
) -> Result<ChainReport, NbError> {
    let upper = lemma8_upper_check(g, s, ell)?;
    let (c, d) = (upper.c, upper.d);
    let nbhd = g.neighbourhood(s)?.len();
    let inner = count_nb_paths_bruteforce(g, s, 2 * ell, PathMode::AllInS)?;
    let avg_right = if nbhd == 0 {
        0.0
    } else {
        (c * s.len()) as f64 / nbhd as f64
    };
    let base = ((c - 1) as f64 * (avg_right - 1.0)).max(0.0);
    let lower = (c * s.len()) as f64 * base.powf((2 * ell) as f64 / 2.0 - 0.5);
    let outer: BigInt = upper.count.parse().expect("decimal");
    let tol = 1e-9 * lower.max(1.0);
    let holds = lower <= inner as f64 + tol && BigInt::from(inner) <= outer && upper.holds;
    Ok(ChainReport {
        c,
        d,
        ell,
        set_size: s.len(),
        neighbourhood_size: nbhd,
        avg_right,
        lower,
        inner,
        outer: upper.count,
        upper: upper.rhs,
        holds,
    })
}
