use num_complex::Complex64;
use serde::Serialize;

/// Below this `|Δ(x)|` the two roots are treated as one.
pub const REPEATED_ROOT_THRESHOLD: f64 = 1e-8;

/// `Δ(x) = x² − 2x((c−1)+(d−1)) + (c−d)²`.
pub fn delta(c: usize, d: usize, x: f64) -> f64 {
    let (c, d) = (c as f64, d as f64);
    x * x - 2.0 * x * (c - 1.0 + d - 1.0) + (c - d) * (c - d)
}

/// Roots of `λ² − (x − (c−1) − (d−1))λ + (c−1)(d−1)` and the coefficients
/// that match `p_0`, `p_1`.
///
/// With distinct roots `p_n(x) = αλ₁ⁿ + βλ₂ⁿ`. When `repeated` is set,
/// `lambda1 == lambda2` and `p_n(x) = (α + nβ)λⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharRoots {
    pub x: f64,
    pub delta: f64,
    #[serde(serialize_with = "ser_complex")]
    pub lambda1: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub lambda2: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub alpha: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub beta: Complex64,
    pub repeated: bool,
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl CharRoots {
    /// `p_n(x)` from the closed form.
    pub fn eval(&self, n: u32) -> Complex64 {
        if self.repeated {
            (self.alpha + self.beta * n as f64) * self.lambda1.powu(n)
        } else {
            self.alpha * self.lambda1.powu(n) + self.beta * self.lambda2.powu(n)
        }
    }
}

/// ```
/// use une::nbwalk::char_roots;
///
/// let r = char_roots(2, 5, 0.0);
/// assert_eq!(r.beta.norm(), 0.0);
/// assert_eq!(r.alpha.re, 2.0);
/// ```
pub fn char_roots(c: usize, d: usize, x: f64) -> CharRoots {
    let (cm, dm) = ((c - 1) as f64, (d - 1) as f64);
    let x0 = c as f64 / cm;
    let x1 = x - c as f64;
    let dlt = delta(c, d, x);
    let sum = x - cm - dm;
    if x == 0.0 {
        let (l1, l2) = (Complex64::new(-cm, 0.0), Complex64::new(-dm, 0.0));
        if c != d {
            return CharRoots {
                x,
                delta: dlt,
                lambda1: l1,
                lambda2: l2,
                alpha: Complex64::new(x0, 0.0),
                beta: Complex64::new(0.0, 0.0),
                repeated: false,
            };
        }
    }
    if dlt.abs() < REPEATED_ROOT_THRESHOLD {
        let lambda = Complex64::new(sum / 2.0, 0.0);
        return CharRoots {
            x,
            delta: dlt,
            lambda1: lambda,
            lambda2: lambda,
            alpha: Complex64::new(x0, 0.0),
            beta: Complex64::new(x1, 0.0) / lambda - x0,
            repeated: true,
        };
    }
    let root = Complex64::new(dlt, 0.0).sqrt();
    let l1 = (sum + root) / 2.0;
    let l2 = (sum - root) / 2.0;
    let beta = (x1 - l1 * x0) / (l2 - l1);
    CharRoots {
        x,
        delta: dlt,
        lambda1: l1,
        lambda2: l2,
        alpha: x0 - beta,
        beta,
        repeated: false,
    }
}
