use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{CoefficientError, Poly};

/// An element of Q(k) in canonical form.
///
/// `num/den` with `gcd(num, den) = 1` over Q[k], `den` nonzero with positive
/// leading coefficient, and the integer content of the pair removed. Two equal
/// rational functions therefore have identical representations, so equality
/// and hashing are structural.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.coeffs().hash(state);
        self.den.coeffs().hash(state);
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: Poly::one(), den: Poly::one() }
    }

    /// The formal level `k`.
    pub fn k() -> Self {
        Scalar { num: Poly::var(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar { num: Poly::constant(n), den: Poly::one() }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::from_rational(&BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Scalar::new(Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
            .expect("rational has nonzero denominator")
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar::new(p, Poly::one()).unwrap()
    }

    /// Builds the canonical form of `num/den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self, CoefficientError> {
        if den.is_zero() {
            return Err(CoefficientError::DivisionByZero);
        }
        Ok(Scalar::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
            }
        };
        let mut c = num.content().gcd(&den.content());
        if den.leading().unwrap().is_negative() {
            c = -c;
        }
        Scalar { num: num.div_exact_int(&c), den: den.div_exact_int(&c) }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value does not depend on `k`.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.is_constant() {
            return None;
        }
        Some(BigRational::new(self.num.constant_term(), self.den.constant_term()))
    }

    /// `deg(num) - deg(den)`; `None` for zero.
    pub fn degree_at_infinity(&self) -> Option<i64> {
        let n = self.num.degree()? as i64;
        Some(n - self.den.degree().unwrap() as i64)
    }

    /// Ratio of leading coefficients, i.e. the limit `k -> oo` when the degree is zero.
    pub fn leading_ratio(&self) -> Option<BigRational> {
        Some(BigRational::new(self.num.leading()?.clone(), self.den.leading()?.clone()))
    }

    /// A rough size measure used to prefer simple pivots.
    pub fn complexity(&self) -> (usize, usize, u64) {
        let deg = self.num.degree().unwrap_or(0) + self.den.degree().unwrap_or(0);
        let terms = self.num.term_count() + self.den.term_count();
        let bits = self
            .num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .map(|c| c.bits())
            .max()
            .unwrap_or(0);
        (deg, terms, bits)
    }

    pub fn inv(&self) -> Result<Scalar, CoefficientError> {
        if self.is_zero() {
            return Err(CoefficientError::DivisionByZero);
        }
        Ok(Scalar::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, CoefficientError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut out = Scalar::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Exact value at `k = at`.
    pub fn eval(&self, at: &BigRational) -> Result<BigRational, CoefficientError> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return Err(CoefficientError::Pole { at: at.clone() });
        }
        Ok(self.num.eval(at) / d)
    }

    /// Specializes the level, keeping the result as a constant Scalar.
    pub fn specialize(&self, at: &BigRational) -> Result<Scalar, CoefficientError> {
        self.eval(at).map(|r| Scalar::from_rational(&r))
    }

    fn add_impl(&self, rhs: &Scalar, negate: bool) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -rhs.clone() } else { rhs.clone() };
        }
        let rn = if negate { -rhs.num.clone() } else { rhs.num.clone() };
        if self.den == rhs.den {
            return Scalar::normalize(&self.num + &rn, self.den.clone());
        }
        if self.den.is_constant() && rhs.den.is_constant() {
            let a = self.den.constant_term();
            let b = rhs.den.constant_term();
            let l = a.lcm(&b);
            let num = self.num.scale(&(&l / &a)) + rn.scale(&(&l / &b));
            return Scalar::normalize(num, Poly::constant(l));
        }
        let num = &self.num * &rhs.den + &rn * &self.den;
        Scalar::normalize(num, &self.den * &rhs.den)
    }

    fn mul_impl(&self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_constant() && rhs.den.is_constant() {
            return Scalar::normalize(&self.num * &rhs.num, &self.den * &rhs.den);
        }
        // Cross-cancel before multiplying to keep the gcd work small.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (n1, d2) = if g1.is_constant() {
            (self.num.clone(), rhs.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), rhs.den.div_exact(&g1).unwrap())
        };
        let (n2, d1) = if g2.is_constant() {
            (rhs.num.clone(), self.den.clone())
        } else {
            (rhs.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let mut c = num.content().gcd(&den.content());
        if den.leading().unwrap().is_negative() {
            c = -c;
        }
        Scalar { num: num.div_exact_int(&c), den: den.div_exact_int(&c) }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<&BigRational> for Scalar {
    fn from(r: &BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_impl(rhs, false)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.add_impl(&rhs, false)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = self.add_impl(rhs, false);
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.add_impl(rhs, true)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.add_impl(&rhs, true)
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = self.add_impl(rhs, true);
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_impl(rhs)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.mul_impl(&rhs)
    }
}

/// Panics on a zero divisor; use [`Scalar::checked_div`] when that can happen.
impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -self.num, den: self.den }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `(16 - 51*k)/(9*k)`, `-5/4`, `k/(32 + 3*k)`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.term_count() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let bare = self.den.term_count() == 1 && self.den.leading().is_some_and(|c| c.is_one());
        if self.den.is_constant() || bare {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}
