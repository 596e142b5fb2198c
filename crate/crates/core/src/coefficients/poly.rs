//! Dense univariate polynomials in the level `k` with big-integer coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial in `k` over Z, stored little-endian (`coeffs[i]` multiplies `k^i`).
///
/// The zero polynomial has no coefficients; otherwise the last coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `k`.
    pub fn var() -> Self {
        Poly::from_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    /// Number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_exact_int(&self, c: &BigInt) -> Poly {
        if c.is_one() {
            return self.clone();
        }
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .map(|a| {
                    debug_assert!((a % c).is_zero());
                    a / c
                })
                .collect(),
        )
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            c = -c;
        }
        self.div_exact_int(&c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    fn shift(&self, by: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); by];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub fn pseudo_rem(&self, b: &Poly) -> Poly {
        let db = b.degree().expect("pseudo-remainder by zero polynomial");
        let lb = b.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading().unwrap().clone();
            r = r.scale(&lb) - b.shift(dr - db).scale(&lr);
        }
        r
    }

    /// Primitive gcd over Q[k], normalized to positive leading coefficient.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        let (mut a, mut b) = (self.primitive(), other.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.is_constant() {
                return Poly::one();
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive();
        }
        a
    }

    /// Long division where `divisor` is known to divide `self` exactly over Z.
    ///
    /// Returns `None` when the division is not exact.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let dd = divisor.degree().expect("division by zero polynomial");
        let ld = divisor.leading().unwrap();
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let mut r = self.clone();
        let ds = r.degree().unwrap();
        if ds < dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); ds - dd + 1];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return None;
            }
            let (c, rem) = r.leading().unwrap().div_rem(ld);
            if !rem.is_zero() {
                return None;
            }
            r = r - divisor.shift(dr - dd).scale(&c);
            q[dr - dd] = c;
        }
        Some(Poly::from_coeffs(q))
    }

    /// Exact value at a rational point.
    pub fn eval(&self, at: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// `q^deg * self(p/q)`, an integer that vanishes exactly when `p/q` is a root.
    pub fn eval_homogenized(&self, p: &BigInt, q: &BigInt) -> BigInt {
        let Some(d) = self.degree() else {
            return BigInt::zero();
        };
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        // Horner in p with the q powers accumulated from the top coefficient down.
        let mut terms = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            terms.push(qpow.clone());
            qpow *= q;
        }
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * p + c * &terms[d - i];
        }
        acc
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = rhs.coeffs.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = rhs.coeffs.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a - b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => -b,
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(out)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top; only used to give maps a stable key order.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Ascending powers, e.g. `16 - 51*k` or `32 + 3*k + k^2`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let var = match i {
                0 => String::new(),
                1 => "k".to_string(),
                _ => format!("k^{i}"),
            };
            if var.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{abs}*{var}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64s(c)
    }

    #[test]
    fn gcd_of_shared_linear_factor() {
        // (k+1)(k-2) and (k+1)(3k+5)
        let a = p(&[1, 1]) * p(&[-2, 1]);
        let b = p(&[1, 1]) * p(&[5, 3]);
        assert_eq!(a.gcd(&b), p(&[1, 1]));
        assert_eq!(p(&[2, 4]).gcd(&p(&[3])), Poly::one());
    }

    #[test]
    fn exact_division_round_trips() {
        let a = p(&[32, 3]) * p(&[-16, 51]) * p(&[0, 9]);
        assert_eq!(a.div_exact(&p(&[32, 3])).unwrap(), p(&[-16, 51]) * p(&[0, 9]));
        assert!(p(&[1, 0, 1]).div_exact(&p(&[1, 1])).is_none());
    }

    #[test]
    fn renders_ascending() {
        assert_eq!(p(&[16, -51]).to_string(), "16 - 51*k");
        assert_eq!(p(&[0, 9]).to_string(), "9*k");
        assert_eq!(p(&[1, 0, 1]).to_string(), "1 + k^2");
        assert_eq!(p(&[0, -1]).to_string(), "-k");
    }

    #[test]
    fn homogenized_evaluation_detects_roots() {
        let f = p(&[32, 3]);
        assert!(f.eval_homogenized(&BigInt::from(-32), &BigInt::from(3)).is_zero());
        assert!(!f.eval_homogenized(&BigInt::from(32), &BigInt::from(3)).is_zero());
    }
}
