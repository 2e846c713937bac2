use num_complex::Complex64;
use serde::Serialize;

use super::roots::ser_complex;

/// Closed form of `x_{n+1} = A x_n + B x_{n−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClosedForm {
    /// `x_n = αλ₁ⁿ + βλ₂ⁿ`.
    Distinct {
        #[serde(serialize_with = "ser_complex")]
        lambda1: Complex64,
        #[serde(serialize_with = "ser_complex")]
        lambda2: Complex64,
        #[serde(serialize_with = "ser_complex")]
        alpha: Complex64,
        #[serde(serialize_with = "ser_complex")]
        beta: Complex64,
    },
    /// `x_n = (α + nβ)λⁿ`.
    Repeated {
        #[serde(serialize_with = "ser_complex")]
        lambda: Complex64,
        #[serde(serialize_with = "ser_complex")]
        alpha: Complex64,
        #[serde(serialize_with = "ser_complex")]
        beta: Complex64,
    },
    /// `A = B = 0`: only the two initial terms can be nonzero.
    Degenerate {
        #[serde(serialize_with = "ser_complex")]
        x0: Complex64,
        #[serde(serialize_with = "ser_complex")]
        x1: Complex64,
    },
}

impl ClosedForm {
    pub fn eval(&self, n: u32) -> Complex64 {
        match *self {
            ClosedForm::Distinct {
                lambda1,
                lambda2,
                alpha,
                beta,
            } => alpha * lambda1.powu(n) + beta * lambda2.powu(n),
            ClosedForm::Repeated {
                lambda,
                alpha,
                beta,
            } => (alpha + beta * n as f64) * lambda.powu(n),
            ClosedForm::Degenerate { x0, x1 } => match n {
                0 => x0,
                1 => x1,
                _ => Complex64::new(0.0, 0.0),
            },
        }
    }
}

/// Solves the recurrence from its initial terms.
///
/// ```
/// use num_complex::Complex64;
/// use une::nbwalk::solve_linear_recurrence;
///
/// let one = Complex64::new(1.0, 0.0);
/// let fib = solve_linear_recurrence(one, one, Complex64::new(0.0, 0.0), one);
/// assert!((fib.eval(10).re - 55.0).abs() < 1e-9);
/// ```
pub fn solve_linear_recurrence(
    a: Complex64,
    b: Complex64,
    x0: Complex64,
    x1: Complex64,
) -> ClosedForm {
    let zero = Complex64::new(0.0, 0.0);
    if a == zero && b == zero {
        return ClosedForm::Degenerate { x0, x1 };
    }
    let disc = a * a + b * 4.0;
    let scale = a.norm_sqr() + b.norm();
    if disc.norm() <= 1e-12 * scale {
        let lambda = a / 2.0;
        return ClosedForm::Repeated {
            lambda,
            alpha: x0,
            beta: x1 / lambda - x0,
        };
    }
    let root = disc.sqrt();
    let lambda1 = (a + root) / 2.0;
    let lambda2 = (a - root) / 2.0;
    let beta = (x1 - x0 * lambda1) / (lambda2 - lambda1);
    ClosedForm::Distinct {
        lambda1,
        lambda2,
        alpha: x0 - beta,
        beta,
    }
}
