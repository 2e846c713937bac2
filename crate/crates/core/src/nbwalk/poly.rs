use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::matrix::DenseMatrix;
use super::operators::{biadjacency_int, build_nb_operators};
use super::NbError;
use crate::bigraph::BipartiteMultigraph;

/// Largest `n` for which the operator identity is checked.
pub const MAX_IDENTITY_DEGREE: usize = 6;

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPolynomial {
    coefficients: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coefficients: Vec<BigRational>) -> Self {
        while coefficients.len() > 1 && coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(BigRational::zero());
        }
        RationalPolynomial { coefficients }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> &BigRational {
        self.coefficients.last().expect("nonempty")
    }

    /// `(x − shift) · self`.
    fn times_x_minus(&self, shift: &BigRational) -> Self {
        let mut out = vec![BigRational::zero(); self.coefficients.len() + 1];
        for (k, a) in self.coefficients.iter().enumerate() {
            out[k + 1] += a;
            out[k] -= a * shift;
        }
        Self::new(out)
    }

    fn sub_scaled(&self, other: &Self, s: &BigRational) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        let out = (0..n)
            .map(|k| {
                let a = self
                    .coefficients
                    .get(k)
                    .cloned()
                    .unwrap_or_else(BigRational::zero);
                let b = other
                    .coefficients
                    .get(k)
                    .cloned()
                    .unwrap_or_else(BigRational::zero);
                a - b * s
            })
            .collect();
        Self::new(out)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * x + a.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    /// Horner evaluation at a square rational matrix.
    pub fn eval_matrix(&self, x: &DenseMatrix<BigRational>) -> DenseMatrix<BigRational> {
        let n = x.rows();
        let identity = DenseMatrix::<BigRational>::identity(n);
        let mut acc = DenseMatrix::<BigRational>::zeros(n, n);
        for a in self.coefficients.iter().rev() {
            acc = acc.matmul(x).add(&identity.scale(a));
        }
        acc
    }

    /// Coefficients rendered as `p/q` strings, lowest degree first.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coefficients.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.coefficients.iter().enumerate().rev() {
            if a.is_zero() && !(first && k == 0) {
                continue;
            }
            let sign = if a.is_negative() { "-" } else { "+" };
            if first {
                if a.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = a.abs();
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{mag}x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for RationalPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coefficient_strings().serialize(serializer)
    }
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// The polynomials with `A_{2n}^{LL} = p_n(MMᵀ)`:
/// `p_0 = c/(c−1)`, `p_1 = x − c`,
/// `p_{n+1} = (x − (c−1) − (d−1)) p_n − (c−1)(d−1) p_{n−1}`.
///
/// ```
/// use une::nbwalk::p_polynomial;
///
/// let p2 = p_polynomial(3, 5, 2).unwrap();
/// // x² + (2 − 2c − d)x + c(c − 1)
/// assert_eq!(p2.to_string(), "x^2 - 9x + 6");
/// ```
pub fn p_polynomial(c: usize, d: usize, n: usize) -> Result<RationalPolynomial, NbError> {
    Ok(p_polynomials(c, d, n)?.pop().expect("nonempty"))
}

/// `[p_0, ..., p_n]`.
pub fn p_polynomials(c: usize, d: usize, n: usize) -> Result<Vec<RationalPolynomial>, NbError> {
    if c < 2 || d < 2 {
        return Err(NbError::InvalidDegrees { c, d });
    }
    let (ci, di) = (c as i64, d as i64);
    let p0 = RationalPolynomial::constant(BigRational::new(BigInt::from(ci), BigInt::from(ci - 1)));
    let p1 = RationalPolynomial::new(vec![rat(-ci), rat(1)]);
    let mut out = vec![p0, p1];
    let shift = rat(ci - 1 + di - 1);
    let product = rat((ci - 1) * (di - 1));
    while out.len() <= n {
        let k = out.len();
        let next = out[k - 1]
            .times_x_minus(&shift)
            .sub_scaled(&out[k - 2], &product);
        out.push(next);
    }
    out.truncate(n + 1);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityMismatch {
    pub row: usize,
    pub col: usize,
    pub operator: String,
    pub polynomial: String,
}

/// Checks `A_{2n}^{LL} = p_n(MMᵀ)` exactly. Returns 0 on success.
pub fn verify_operator_polynomial_identity(
    g: &BipartiteMultigraph,
    n: usize,
) -> Result<u64, NbError> {
    if n == 0 || n > MAX_IDENTITY_DEGREE {
        return Err(NbError::LengthOutOfRange {
            len: n,
            max: MAX_IDENTITY_DEGREE,
        });
    }
    let (c, d) = g.require_biregular()?;
    let ops = build_nb_operators(g, 2 * n)?;
    let p = p_polynomial(c, d, n)?;
    let m = biadjacency_int(g).map(|x| BigRational::from_integer(x.clone()));
    let gram = m.matmul(&m.transpose());
    let value = p.eval_matrix(&gram);
    let a = ops.ll(2 * n);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let lhs = BigRational::from_integer(a.get(i, j).clone());
            if &lhs != value.get(i, j) {
                return Err(NbError::IdentityMismatch(IdentityMismatch {
                    row: i,
                    col: j,
                    operator: lhs.to_string(),
                    polynomial: value.get(i, j).to_string(),
                }));
            }
        }
    }
    Ok(0)
}
