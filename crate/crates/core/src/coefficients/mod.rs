//! Exact arithmetic over Q and Q(k).

mod poly;
mod roots;
mod scalar;

pub use poly::Poly;
pub use roots::{poly_roots, render_rational, scalar_poles, PoleSet};
pub use scalar::Scalar;

use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoefficientError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("evaluation at a pole k = {at}")]
    Pole { at: BigRational },
}

/// Parses `p`, `-p` or `p/q` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: num_bigint::BigInt = p.trim().parse().ok()?;
            let q: num_bigint::BigInt = q.trim().parse().ok()?;
            if q == num_bigint::BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(text.parse().ok()?)),
    }
}

/// `n (n-1) ... (n-p+1)`, defined for any integer `n`.
pub fn falling(n: i64, p: u32) -> num_bigint::BigInt {
    (0..p as i64).map(|i| num_bigint::BigInt::from(n - i)).product()
}

/// Generalized binomial coefficient `n choose j` for integer `n`.
pub fn binomial(n: i64, j: u32) -> num_bigint::BigInt {
    falling(n, j) / factorial(j)
}

pub fn factorial(n: u32) -> num_bigint::BigInt {
    (1..=n as u64).map(num_bigint::BigInt::from).product()
}
