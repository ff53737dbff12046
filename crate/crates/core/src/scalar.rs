//! Coefficient fields for the graded machinery.
//!
//! All combinatorial identities in this crate (monomial norms, inner
//! products, kernel pairings, weight tables) are rational, so the core
//! vector and polynomial types are generic over a complex coefficient
//! field.  Two instances are provided: [`C64`] for the floating lane and
//! [`CQ`] (Gaussian rationals over arbitrary-precision integers) for the
//! exact lane used by the zero-tolerance checks.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Complex double: the floating lane.
pub type C64 = Complex<f64>;

/// Complex rational (Gaussian rational): the exact lane.
pub type CQ = Complex<BigRational>;

/// A complex coefficient field with an embedding of the rationals.
///
/// `Num` supplies ring/field arithmetic and `zero`/`one`; the extra
/// methods are what the graded inner products need: conjugation, the
/// rational embedding for the weights alpha!/|alpha|!, and a float view
/// at the linear-algebra boundary.
pub trait Scalar: Num + Clone + std::fmt::Debug + std::ops::Neg<Output = Self> {
    fn from_rational(q: &BigRational) -> Self;
    fn conj(&self) -> Self;
    /// `self * conj(self)`, a non-negative real element of the field.
    fn abs_sq(&self) -> Self;
    /// Lossy view into the floating lane.
    fn to_c64(&self) -> C64;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }
}

impl Scalar for C64 {
    fn from_rational(q: &BigRational) -> Self {
        C64::new(rational_to_f64(q), 0.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn abs_sq(&self) -> Self {
        C64::new(self.norm_sqr(), 0.0)
    }

    fn to_c64(&self) -> C64 {
        *self
    }
}

impl Scalar for CQ {
    fn from_rational(q: &BigRational) -> Self {
        Complex::new(q.clone(), BigRational::zero())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn abs_sq(&self) -> Self {
        Complex::new(&self.re * &self.re + &self.im * &self.im, BigRational::zero())
    }

    fn to_c64(&self) -> C64 {
        C64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Convert a big rational to f64, falling back to a quotient of
/// approximations when the parts individually overflow.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(if q.numer().is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Rational from an integer pair; panics on zero denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Gaussian rational from two integer pairs.
pub fn cq(re: (i64, i64), im: (i64, i64)) -> CQ {
    Complex::new(ratio(re.0, re.1), ratio(im.0, im.1))
}

/// Real Gaussian rational.
pub fn cq_int(n: i64) -> CQ {
    Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// True if `q` is the square of a rational; used by exact norm checks.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let ns = q.numer().sqrt();
    let ds = q.denom().sqrt();
    if &(&ns * &ns) == q.numer() && &(&ds * &ds) == q.denom() {
        Some(BigRational::new(ns, ds))
    } else {
        None
    }
}
