//! Parameter calculations: the gadget threshold `q̂(c₀, α)`, the constants of
//! the small-set bound, and the expander-mixing comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::precise::{self, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("need c0 > 5, got {0}")]
    C0TooSmall(usize),
    #[error("need alpha > 1, got {0}")]
    AlphaTooSmall(f64),
    #[error("need 2 <= c < d, got c={c}, d={d}")]
    BadDegrees { c: usize, d: usize },
    #[error("need eps > 0, got {0}")]
    BadEps(f64),
    #[error("no ell <= {max} satisfies the constant condition")]
    NoEll { max: u64 },
    #[error("scan reached q = {0} without settling")]
    ScanLimit(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("alpha*c0*(q+1) = {0} is not an integer")]
    DegreeNotIntegral(f64),
    #[error("q = {q} is not above the threshold q_hat = {q_hat}")]
    QBelowThreshold {
        q: u64,
        q_hat: u64,
        sheet: Box<WiringSheet>,
    },
    #[error("R0 = {0} is not an integer")]
    R0NotIntegral(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    AllIntegers,
    PrimePowers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strictness {
    /// The gadget inequality holds when its two sides are equal.
    NonStrict,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub domain: Domain,
    pub strictness: Strictness,
}

impl Default for Interpretation {
    fn default() -> Self {
        Interpretation {
            domain: Domain::AllIntegers,
            strictness: Strictness::NonStrict,
        }
    }
}

impl Interpretation {
    pub const ALL: [Interpretation; 4] = [
        Interpretation {
            domain: Domain::AllIntegers,
            strictness: Strictness::NonStrict,
        },
        Interpretation {
            domain: Domain::AllIntegers,
            strictness: Strictness::Strict,
        },
        Interpretation {
            domain: Domain::PrimePowers,
            strictness: Strictness::NonStrict,
        },
        Interpretation {
            domain: Domain::PrimePowers,
            strictness: Strictness::Strict,
        },
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QhatOptions {
    /// Consecutive holding values required after the last failure.
    pub scan_margin: u64,
    /// Working precision in decimal digits for near-tie re-evaluation.
    pub digits: usize,
    pub max_q: u64,
}

impl Default for QhatOptions {
    fn default() -> Self {
        QhatOptions {
            scan_margin: 10_000,
            digits: 30,
            max_q: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamReport {
    pub c0: usize,
    pub alpha: f64,
    pub interpretation: Interpretation,
    /// Smallest `q` from which the gadget inequality holds for every scanned `q` in the domain,
    /// i.e. `last_failure + 1`.
    pub q_hat: u64,
    /// Largest `q` in the domain where the gadget inequality fails.
    pub last_failure: u64,
    pub failures: u64,
    pub scan_margin: u64,
    /// `q_hat` in the other domain, for comparison.
    pub other_domain_q_hat: u64,
    pub domains_differ: bool,
    /// Values still within tolerance of equality at full precision.
    pub indeterminate: Vec<u64>,
}

/// `ln RHS − ln LHS` of the gadget inequality at `(q+1, q³+1)`:
/// `(q+1)^{(c₀−3)/2} ≤ (2(q³+1)e)^{−1}((q³+1)/(α(q+1))/(3ec₀))^{(c₀−1)/2}`.
pub fn gadget_margin(c0: usize, alpha: f64, q: u64) -> f64 {
    let qf = q as f64;
    let ln_l = (qf * qf * qf + 1.0).ln();
    let ln_q1 = (qf + 1.0).ln();
    let half = (c0 as f64 - 1.0) / 2.0;
    -std::f64::consts::LN_2 - ln_l - 1.0
        + half * (ln_l - alpha.ln() - ln_q1 - 3f64.ln() - 1.0 - (c0 as f64).ln())
        - (c0 as f64 - 3.0) / 2.0 * ln_q1
}

/// [`gadget_margin`] at `bits` of working precision.
pub fn gadget_margin_precise(c0: usize, alpha: f64, q: u64, bits: usize) -> Real {
    let int = |x: i64| precise::int(x, bits);
    let qr = precise::int(q as i64, bits);
    let l = &qr * &qr * &qr + int(1);
    let q1 = &qr + int(1);
    let one = int(1);
    let half = (int(c0 as i64) - int(1)) / int(2);
    let half3 = (int(c0 as i64) - int(3)) / int(2);
    let ln_l = l.ln();
    let ln_q1 = q1.ln();
    -int(2).ln() - &ln_l - &one
        + half
            * (ln_l
                - precise::from_f64(alpha, bits).ln()
                - &ln_q1
                - int(3).ln()
                - &one
                - int(c0 as i64).ln())
        - half3 * ln_q1
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

fn verdict(c0: usize, alpha: f64, q: u64, strict: bool, bits: usize) -> Verdict {
    let m = gadget_margin(c0, alpha, q);
    let classify = |m: f64| {
        if strict {
            m > 0.0
        } else {
            m >= 0.0
        }
    };
    if m.abs() >= 1e-9 {
        return if classify(m) {
            Verdict::Holds
        } else {
            Verdict::Fails
        };
    }
    let hp = precise::to_f64(&gadget_margin_precise(c0, alpha, q, bits));
    if hp.abs() < 1e-12 {
        Verdict::Indeterminate
    } else if classify(hp) {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

struct Scan {
    last_failure: [u64; 2],
    failures: [u64; 2],
    indeterminate: Vec<u64>,
}

fn scan(c0: usize, alpha: f64, strict: bool, opts: &QhatOptions) -> Result<Scan, ParamError> {
    const BLOCK: u64 = 8192;
    let bits = precise::digits_to_bits(opts.digits);
    let mut out = Scan {
        last_failure: [1, 1],
        failures: [0, 0],
        indeterminate: Vec::new(),
    };
    let mut start = 2u64;
    loop {
        let end = start + BLOCK;
        let verdicts: Vec<(u64, Verdict)> = (start..end)
            .into_par_iter()
            .map(|q| (q, verdict(c0, alpha, q, strict, bits)))
            .collect();
        for (q, v) in verdicts {
            match v {
                Verdict::Holds => {}
                Verdict::Fails | Verdict::Indeterminate => {
                    if v == Verdict::Indeterminate {
                        out.indeterminate.push(q);
                    }
                    // an undecided point counts as a failure: the threshold
                    // must not rest on it
                    out.last_failure[0] = q;
                    out.failures[0] += 1;
                    if is_prime_power(q).is_some() {
                        out.last_failure[1] = q;
                        out.failures[1] += 1;
                    }
                }
            }
        }
        if end - 1 >= out.last_failure[0] + opts.scan_margin {
            return Ok(out);
        }
        if end > opts.max_q {
            return Err(ParamError::ScanLimit(end));
        }
        start = end;
    }
}

/// Smallest `q̂` such that the gadget inequality holds for every `q ≥ q̂` in
/// the scanned range past the last failure.
///
/// ```
/// use une::params::{qhat, Interpretation, QhatOptions};
///
/// let r = qhat(35, 2.0, Interpretation::default(), &QhatOptions::default()).unwrap();
/// assert_eq!(r.q_hat, 1492);
/// ```
pub fn qhat(
    c0: usize,
    alpha: f64,
    interp: Interpretation,
    opts: &QhatOptions,
) -> Result<ParamReport, ParamError> {
    if c0 <= 5 {
        return Err(ParamError::C0TooSmall(c0));
    }
    if !(alpha > 1.0) {
        return Err(ParamError::AlphaTooSmall(alpha));
    }
    let s = scan(c0, alpha, interp.strictness == Strictness::Strict, opts)?;
    let (this, other) = match interp.domain {
        Domain::AllIntegers => (0, 1),
        Domain::PrimePowers => (1, 0),
    };
    Ok(ParamReport {
        c0,
        alpha,
        interpretation: interp,
        q_hat: s.last_failure[this] + 1,
        last_failure: s.last_failure[this],
        failures: s.failures[this],
        scan_margin: opts.scan_margin,
        other_domain_q_hat: s.last_failure[other] + 1,
        domains_differ: s.last_failure[0] != s.last_failure[1],
        indeterminate: s.indeterminate,
    })
}

/// `Some((p, k))` when `n = p^k` with `p` prime and `k ≥ 1`.
pub fn is_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let (mut m, mut k) = (n, 0u32);
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            return (m == 1).then_some((p, k));
        }
        p += 1;
    }
    Some((n, 1))
}

fn check_degrees(c: usize, d: usize) -> Result<(), ParamError> {
    if c < 2 || c >= d {
        return Err(ParamError::BadDegrees { c, d });
    }
    Ok(())
}

/// `1 + (1+ε)√((d−1)/(c−1))`.
pub fn theorem2_bound(c: usize, d: usize, eps: f64) -> f64 {
    1.0 + (1.0 + eps) * ((d - 1) as f64 / (c - 1) as f64).sqrt()
}

/// `★(ℓ) = ((2+√(d−1))ℓ+2)√(c−1)√(d−1)/c`.
pub fn star(c: usize, d: usize, ell: u64) -> f64 {
    let (cm, dm) = ((c - 1) as f64, (d - 1) as f64);
    ((2.0 + dm.sqrt()) * ell as f64 + 2.0) * cm.sqrt() * dm.sqrt() / c as f64
}

pub const MAX_ELL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Constants {
    pub c: usize,
    pub d: usize,
    pub eps: f64,
    pub ell: u64,
    pub delta: f64,
    pub log2_delta: f64,
    pub star: f64,
    pub bound: f64,
}

/// Minimal `ℓ` with `★(ℓ)^{1/ℓ} ≤ 1+ε`, and `δ = ((c−1)(d−1))^{−ℓ/2}`.
///
/// ```
/// use une::params::theorem2_constants;
///
/// let k = theorem2_constants(2, 3, 0.5).unwrap();
/// assert_eq!(k.ell, 8);
/// assert_eq!(k.delta, 1.0 / 16.0);
/// ```
pub fn theorem2_constants(c: usize, d: usize, eps: f64) -> Result<Theorem2Constants, ParamError> {
    check_degrees(c, d)?;
    if !(eps > 0.0) {
        return Err(ParamError::BadEps(eps));
    }
    let target = eps.ln_1p();
    let ell = (1..=MAX_ELL)
        .find(|&l| star(c, d, l).ln() / l as f64 <= target)
        .ok_or(ParamError::NoEll { max: MAX_ELL })?;
    let base = ((c - 1) * (d - 1)) as f64;
    Ok(Theorem2Constants {
        c,
        d,
        eps,
        ell,
        delta: base.powf(-(ell as f64) / 2.0),
        log2_delta: -(ell as f64) / 2.0 * base.log2(),
        star: star(c, d, ell),
        bound: theorem2_bound(c, d, eps),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmlBound {
    pub bound: f64,
    pub delta: f64,
}

/// `(1+ε)(1 + (d−1)/(c−1) + 2√((d−1)/(c−1)))` with `δ = (1−(1+ε)^{−1/2})/d`.
pub fn eml_bound(c: usize, d: usize, eps: f64) -> Result<EmlBound, ParamError> {
    check_degrees(c, d)?;
    if !(eps >= 0.0) {
        return Err(ParamError::BadEps(eps));
    }
    let r = (d - 1) as f64 / (c - 1) as f64;
    Ok(EmlBound {
        bound: (1.0 + eps) * (1.0 + r + 2.0 * r.sqrt()),
        delta: (1.0 - (1.0 + eps).powf(-0.5)) / d as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WiringSheet {
    pub c0: usize,
    pub alpha: f64,
    pub q: u64,
    pub c: u64,
    pub d: u64,
    pub r0: f64,
    pub required_k: u64,
    pub product_left_degree: u64,
    pub product_right_degree: f64,
    pub gadget_margin: f64,
    pub q_hat: u64,
    /// Any `ε` below this keeps the small-set right degree under `q + 2`.
    pub eps_limit: f64,
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0)
}

/// Parameter sheet for the construction at `q`. Checks, in order: `q` is a
/// prime power, `αc₀(q+1)` is an integer, `q > q̂`, and `R₀` is an integer.
pub fn theorem1_wiring(c0: usize, alpha: f64, q: u64) -> Result<WiringSheet, ParamError> {
    theorem1_wiring_with(c0, alpha, q, &QhatOptions::default())
}

pub fn theorem1_wiring_with(
    c0: usize,
    alpha: f64,
    q: u64,
    opts: &QhatOptions,
) -> Result<WiringSheet, ParamError> {
    if is_prime_power(q).is_none() {
        return Err(ParamError::NotPrimePower(q));
    }
    let deg = alpha * c0 as f64 * (q + 1) as f64;
    if !near_integer(deg) {
        return Err(ParamError::DegreeNotIntegral(deg));
    }
    let report = qhat(c0, alpha, Interpretation::default(), opts)?;
    let d = q.pow(3) + 1;
    let sheet = WiringSheet {
        c0,
        alpha,
        q,
        c: q + 1,
        d,
        r0: d as f64 / (alpha * (q + 1) as f64),
        required_k: q + 1,
        product_left_degree: c0 as u64 * (q + 1),
        product_right_degree: deg.round(),
        gadget_margin: gadget_margin(c0, alpha, q),
        q_hat: report.q_hat,
        eps_limit: 1.0 / q as f64,
    };
    if q <= report.q_hat {
        return Err(ParamError::QBelowThreshold {
            q,
            q_hat: report.q_hat,
            sheet: Box::new(sheet),
        });
    }
    if !near_integer(sheet.r0) {
        return Err(ParamError::R0NotIntegral(sheet.r0));
    }
    Ok(sheet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factor_oracle(mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut p = 2;
        while n > 1 {
            while n % p == 0 {
                out.push(p);
                n /= p;
            }
            p += 1;
        }
        out
    }

    #[test]
    fn prime_powers() {
        assert_eq!(is_prime_power(8), Some((2, 3)));
        assert_eq!(is_prime_power(6), None);
        assert_eq!(is_prime_power(1), None);
        assert_eq!(is_prime_power(0), None);
        assert_eq!(is_prime_power(1_048_576), Some((2, 20)));
        for n in 2..5000u64 {
            let f = factor_oracle(n);
            assert_eq!(
                is_prime_power(n).is_some(),
                f.iter().all(|&p| p == f[0]),
                "{n}"
            );
        }
    }

    #[test]
    fn table_row_small() {
        let r = qhat(35, 2.0, Interpretation::default(), &QhatOptions::default()).unwrap();
        assert_eq!((r.q_hat, r.last_failure), (1492, 1491));
        assert!(r.indeterminate.is_empty());
        assert!(gadget_margin(35, 2.0, 1491) < 0.0);
        assert!(gadget_margin(35, 2.0, 1492) > 0.0);
        let r = qhat(
            100,
            1.01,
            Interpretation::default(),
            &QhatOptions::default(),
        )
        .unwrap();
        assert_eq!(r.q_hat, 1135);
    }

    #[test]
    fn precise_margin_agrees() {
        for (c0, a, q) in [(10, 2.0, 18906u64), (100, 100.0, 136_051), (35, 2.0, 7)] {
            let lo = gadget_margin(c0, a, q);
            let hi = precise::to_f64(&gadget_margin_precise(c0, a, q, 128));
            assert!((lo - hi).abs() < 1e-10, "{lo} vs {hi}");
        }
    }

    #[test]
    fn qhat_preconditions() {
        let o = QhatOptions::default();
        assert!(matches!(
            qhat(5, 2.0, Interpretation::default(), &o),
            Err(ParamError::C0TooSmall(5))
        ));
        assert!(matches!(
            qhat(10, 1.0, Interpretation::default(), &o),
            Err(ParamError::AlphaTooSmall(_))
        ));
    }

    #[test]
    fn constants() {
        let k = theorem2_constants(2, 3, 0.5).unwrap();
        assert_eq!(k.ell, 8);
        assert!((k.bound - (1.0 + 1.5 * 2f64.sqrt())).abs() < 1e-12);
        assert!(star(2, 3, 8).powf(1.0 / 8.0) <= 1.5);
        assert!(star(2, 3, 7).powf(1.0 / 7.0) > 1.5);
        // huge eps accepts ℓ = 1 once ★(1) ≤ 1 + eps
        assert_eq!(theorem2_constants(2, 3, star(2, 3, 1)).unwrap().ell, 1);
        assert!(theorem2_constants(3, 3, 0.5).is_err());
        assert!(theorem2_constants(2, 3, 0.0).is_err());
    }

    #[test]
    fn eml_comparison() {
        let e = eml_bound(2, 3, 0.0).unwrap();
        assert!((e.bound - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(theorem2_bound(2, 3, 0.0) < e.bound);
        for c in 2..50 {
            for d in c + 1..=50 {
                for eps in [0.0, 0.1, 1.0] {
                    assert!(theorem2_bound(c, d, eps) < eml_bound(c, d, eps).unwrap().bound);
                }
            }
        }
    }

    #[test]
    fn wiring_checks() {
        let o = QhatOptions {
            scan_margin: 200,
            ..Default::default()
        };
        assert!(matches!(
            theorem1_wiring_with(10, 2.0, 20, &o),
            Err(ParamError::NotPrimePower(20))
        ));
        assert!(matches!(
            theorem1_wiring_with(10, std::f64::consts::SQRT_2, 19, &o),
            Err(ParamError::DegreeNotIntegral(_))
        ));
        match theorem1_wiring_with(35, 2.0, 19, &o) {
            Err(ParamError::QBelowThreshold { q_hat, sheet, .. }) => {
                assert_eq!(q_hat, 1492);
                assert_eq!((sheet.c, sheet.d, sheet.required_k), (20, 6860, 20));
                assert_eq!(sheet.product_left_degree, 700);
                assert!(sheet.gadget_margin < 0.0);
            }
            other => panic!("{other:?}"),
        }
        // q²−q+1 is odd, so α = 2 never gives an integral R₀.
        assert!(matches!(
            theorem1_wiring_with(35, 2.0, 1493, &o),
            Err(ParamError::R0NotIntegral(_))
        ));
        // With α = 3, R₀ = (q²−q+1)/3 is integral exactly when q ≡ 2 mod 3.
        let q_hat = qhat(35, 3.0, Interpretation::default(), &o).unwrap().q_hat;
        let q = (q_hat + 1..)
            .find(|&q| q % 3 == 2 && is_prime_power(q).is_some())
            .unwrap();
        let sheet = theorem1_wiring_with(35, 3.0, q, &o).unwrap();
        assert_eq!(sheet.r0, ((q * q - q + 1) / 3) as f64);
        assert_eq!(sheet.product_right_degree, (105 * (q + 1)) as f64);
        assert!(sheet.gadget_margin >= 0.0);
        // 1 + (1+ε)q < q + 2 for any ε below 1/q
        let eps = 0.99 * sheet.eps_limit;
        assert!(
            1.0 + (1.0 + eps) * q as f64 > (q + 1) as f64
                && 1.0 + (1.0 + eps) * (q as f64) < (q + 2) as f64
        );
    }
}
