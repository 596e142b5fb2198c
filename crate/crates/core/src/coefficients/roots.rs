//! Rational-root extraction for denominators in Q(k).

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Poly, Scalar};

/// Rational zeros of a denominator plus whatever is left once they are divided out.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PoleSet {
    pub roots: BTreeSet<BigRational>,
    /// Squarefree, primitive factors of degree >= 2 with no rational root.
    pub residual: Vec<Poly>,
}

impl PoleSet {
    pub fn merge(&mut self, other: PoleSet) {
        self.roots.extend(other.roots);
        for r in other.residual {
            if !self.residual.contains(&r) {
                self.residual.push(r);
            }
        }
        self.residual.sort();
    }
}

/// Poles of `f`: exact rational roots of the denominator, plus residual factors.
pub fn scalar_poles(f: &Scalar) -> PoleSet {
    poly_roots(f.denom())
}

/// Rational roots of `p` and its rational-root-free squarefree remainder.
///
/// Residual factors of degree 2 or 3 are irreducible over Q; higher-degree
/// residuals are reported as found, without further factorization.
pub fn poly_roots(p: &Poly) -> PoleSet {
    let mut out = PoleSet::default();
    if p.is_constant() {
        return out;
    }
    let mut rest = squarefree(&p.primitive());
    // Zero root first so the constant term below is nonzero.
    while rest.constant_term().is_zero() {
        out.roots.insert(BigRational::zero());
        rest = rest.div_exact(&Poly::var()).unwrap();
    }
    if !rest.is_constant() {
        let lead = rest.leading().unwrap().abs();
        let tail = rest.constant_term().abs();
        let qs = divisors(&lead);
        let ps = divisors(&tail);
        'outer: for q in &qs {
            for p in &ps {
                for sign in [1i32, -1] {
                    if rest.degree().unwrap_or(0) < 1 {
                        break 'outer;
                    }
                    let num = if sign > 0 { p.clone() } else { -p.clone() };
                    if !num.gcd(q).is_one() {
                        continue;
                    }
                    if rest.eval_homogenized(&num, q).is_zero() {
                        // Squarefree, so the linear factor divides exactly once.
                        let factor = Poly::from_coeffs(vec![-num.clone(), q.clone()]);
                        rest = rest.div_exact(&factor).expect("root factor divides");
                        out.roots.insert(BigRational::new(num, q.clone()));
                    }
                }
            }
        }
    }
    if rest.degree().unwrap_or(0) >= 2 {
        out.residual.push(rest.primitive());
    }
    out
}

/// Product of the distinct irreducible factors of `p`.
fn squarefree(p: &Poly) -> Poly {
    let g = p.gcd(&p.derivative());
    if g.is_constant() {
        return p.clone();
    }
    p.div_exact(&g).map(|q| q.primitive()).unwrap_or_else(|| p.clone())
}

/// Positive divisors by trial division.
///
/// Any cofactor left after dividing out primes below the trial bound is
/// treated as prime; denominators produced here have small prime factors.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m: BigUint = n.to_biguint().unwrap();
    let mut d: u64 = 2;
    const TRIAL_BOUND: u64 = 1 << 20;
    while d <= TRIAL_BOUND {
        let dd = BigUint::from(d);
        if &dd * &dd > m {
            break;
        }
        let mut e = 0;
        while (&m % &dd).is_zero() {
            m /= &dd;
            e += 1;
        }
        if e > 0 {
            factors.push((BigInt::from(d), e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigUint::one() {
        factors.push((BigInt::from(m), 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for base in &divs {
            let mut acc = base.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc *= &p;
                next.push(acc.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Renders a rational as `p/q` (or `p` when integral).
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn explicit_linear_factors() {
        let den = Poly::from_i64s(&[0, 1]) * Poly::from_i64s(&[32, 3]);
        let f = Scalar::new(Poly::one(), den).unwrap();
        let poles = scalar_poles(&f);
        assert_eq!(poles.roots, [rat(0, 1), rat(-32, 3)].into_iter().collect());
        assert!(poles.residual.is_empty());
    }

    #[test]
    fn polynomial_has_no_poles() {
        let f = Scalar::from_poly(Poly::from_i64s(&[1, 1]));
        assert_eq!(scalar_poles(&f), PoleSet::default());
    }

    #[test]
    fn irreducible_quadratic_is_residual() {
        let f = Scalar::new(Poly::one(), Poly::from_i64s(&[1, 0, 1])).unwrap();
        let poles = scalar_poles(&f);
        assert!(poles.roots.is_empty());
        assert_eq!(poles.residual, vec![Poly::from_i64s(&[1, 0, 1])]);
    }

    #[test]
    fn repeated_and_mixed_factors() {
        // k^2 (51k - 16)^3 (9k - 16) (k^2 + 2)
        let mut den = Poly::from_i64s(&[0, 0, 1]);
        for _ in 0..3 {
            den = den * Poly::from_i64s(&[-16, 51]);
        }
        den = den * Poly::from_i64s(&[-16, 9]) * Poly::from_i64s(&[2, 0, 1]);
        let poles = poly_roots(&den);
        assert_eq!(poles.roots, [rat(0, 1), rat(16, 51), rat(16, 9)].into_iter().collect());
        assert_eq!(poles.residual, vec![Poly::from_i64s(&[2, 0, 1])]);
    }

    #[test]
    fn divisor_enumeration() {
        let d = divisors(&BigInt::from(36));
        assert_eq!(d, [1, 2, 3, 4, 6, 9, 12, 18, 36].map(BigInt::from).to_vec());
    }
}
