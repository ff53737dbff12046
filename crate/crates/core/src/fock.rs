//! Truncated elements of the Drury-Arveson space H^2_d.
//!
//! A [`FockVector`] stores a sparse coefficient map over multi-indices,
//! together with the degree through which those coefficients are exact.
//! The inner product carries the weights ||z^alpha||^2 = alpha!/|alpha|!,
//! so pairings of rational-lane vectors are exact rationals, and the
//! reproducing identity <p, k_z> = p(z) holds with zero tolerance for
//! rational data.

use crate::error::{Error, Result};
use crate::multiindex::{binomial, MultiIndex};
use crate::scalar::{rational_to_f64, Scalar};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Truncated H^2_d element: coefficients are exact through `degree_bound`
/// and unknown beyond it (absent keys below the bound are exactly zero).
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S: Scalar> {
    dim: usize,
    degree_bound: usize,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> FockVector<S> {
    pub fn zero(dim: usize, degree_bound: usize) -> Self {
        FockVector { dim, degree_bound, coeffs: BTreeMap::new() }
    }

    /// The constant function 1, exact through `degree_bound`.
    pub fn constant(dim: usize, degree_bound: usize) -> Self {
        let mut v = Self::zero(dim, degree_bound);
        v.set(MultiIndex::zero(dim), S::one());
        v
    }

    pub fn from_terms<I>(dim: usize, degree_bound: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, S)>,
    {
        let mut v = Self::zero(dim, degree_bound);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch { left: alpha.dim(), right: dim });
            }
            if alpha.degree() > degree_bound {
                return Err(Error::DegreeExceedsBound {
                    degree: alpha.degree(),
                    bound: degree_bound,
                });
            }
            v.set(alpha, c);
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Largest degree with a stored nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|a| a.degree()).max().unwrap_or(0)
    }

    pub fn set(&mut self, alpha: MultiIndex, c: S) {
        debug_assert_eq!(alpha.dim(), self.dim);
        debug_assert!(alpha.degree() <= self.degree_bound);
        if c.is_zero() {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, c);
        }
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> S {
        self.coeffs.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Weighted inner product <v, w> = sum v_a conj(w_a) alpha!/|alpha|!.
    pub fn inner_product(&self, other: &FockVector<S>) -> Result<S> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut acc = S::zero();
        for (alpha, c) in &self.coeffs {
            if let Some(w) = other.coeffs.get(alpha) {
                let weight = S::from_rational(&alpha.norm_sq());
                acc = acc + c.clone() * Scalar::conj(w) * weight;
            }
        }
        Ok(acc)
    }

    /// Squared norm as a real element of the field.
    pub fn norm_sq(&self) -> S {
        let mut acc = S::zero();
        for (alpha, c) in &self.coeffs {
            acc = acc + c.abs_sq() * S::from_rational(&alpha.norm_sq());
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().to_c64().re.max(0.0).sqrt()
    }

    /// Power-series evaluation sum v_a z^a over the stored coefficients.
    pub fn evaluate(&self, z: &[S]) -> Result<S> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { left: z.len(), right: self.dim });
        }
        let mut acc = S::zero();
        for (alpha, c) in &self.coeffs {
            acc = acc + c.clone() * monomial_value(z, alpha);
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.dim, self.degree_bound);
        for (alpha, v) in &self.coeffs {
            out.set(alpha.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn add(&self, other: &FockVector<S>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = self.clone();
        out.degree_bound = self.degree_bound.min(other.degree_bound);
        out.coeffs.retain(|a, _| a.degree() <= out.degree_bound);
        for (alpha, c) in &other.coeffs {
            if alpha.degree() <= out.degree_bound {
                let cur = out.coeff(alpha);
                out.set(alpha.clone(), cur + c.clone());
            }
        }
        Ok(out)
    }

    pub fn to_c64(&self) -> FockVector<crate::scalar::C64> {
        let mut out = FockVector::zero(self.dim, self.degree_bound);
        for (alpha, c) in &self.coeffs {
            out.set(alpha.clone(), c.to_c64());
        }
        out
    }
}

pub fn monomial_value<S: Scalar>(z: &[S], alpha: &MultiIndex) -> S {
    let mut acc = S::one();
    for (zi, &a) in z.iter().zip(&alpha.0) {
        for _ in 0..a {
            acc = acc * zi.clone();
        }
    }
    acc
}

/// Truncation of the reproducing kernel k_z: the coefficient of z^alpha is
/// (|alpha|!/alpha!) conj(z)^alpha.  Requires |z| < 1; pairing against any
/// polynomial of degree <= n reproduces its value at z.
pub fn kernel_vector<S: Scalar>(z: &[S], n: usize) -> Result<FockVector<S>> {
    let norm_sq: f64 = z.iter().map(|c| c.to_c64().norm_sqr()).sum();
    if norm_sq >= 1.0 {
        return Err(Error::PointOutsideBall { norm_sq });
    }
    let d = z.len();
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let zbar: Vec<S> = z.iter().map(Scalar::conj).collect();
    let mut v = FockVector::zero(d, n);
    for k in 0..=n {
        for alpha in crate::multiindex::enum_multiindices(d, k)? {
            let multinom =
                S::from_rational(&num_rational::BigRational::from_integer(alpha.multinomial()));
            let c = multinom * monomial_value(&zbar, &alpha);
            v.set(alpha, c);
        }
    }
    Ok(v)
}

/// sum_{k<=n} <w, z>^k, the exact pairing of two truncated kernel vectors.
pub fn kernel_pairing_oracle<S: Scalar>(z: &[S], w: &[S], n: usize) -> S {
    let ip: S = w
        .iter()
        .zip(z)
        .fold(S::zero(), |acc, (wi, zi)| acc + wi.clone() * Scalar::conj(zi));
    let mut acc = S::zero();
    let mut pow = S::one();
    for _ in 0..=n {
        acc = acc + pow.clone();
        pow = pow * ip.clone();
    }
    acc
}

/// Coefficients of the Cauchy kernel Gamma(., zeta) = (1 - <., zeta>)^{-d}
/// through degree `n`: the coefficient of z^alpha is
/// C(|alpha|+d-1, d-1) (|alpha|!/alpha!) conj(zeta)^alpha.
/// `zeta` may lie on the closed ball, sphere included.
pub fn cauchy_coeffs<S: Scalar>(zeta: &[S], n: usize) -> Result<FockVector<S>> {
    let d = zeta.len();
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let norm_sq: f64 = zeta.iter().map(|c| c.to_c64().norm_sqr()).sum();
    if norm_sq > 1.0 + 1e-12 {
        return Err(Error::PointOutsideClosedBall { norm_sq });
    }
    let zbar: Vec<S> = zeta.iter().map(Scalar::conj).collect();
    let mut v = FockVector::zero(d, n);
    for k in 0..=n {
        let binom = num_rational::BigRational::from_integer(binomial(k + d - 1, d - 1));
        for alpha in crate::multiindex::enum_multiindices(d, k)? {
            let multinom =
                num_rational::BigRational::from_integer(alpha.multinomial());
            let c = S::from_rational(&(&binom * &multinom)) * monomial_value(&zbar, &alpha);
            v.set(alpha, c);
        }
    }
    Ok(v)
}

/// f64 view of a rational weight, for callers sitting on the float lane.
pub fn norm_sq_f64(alpha: &MultiIndex) -> f64 {
    rational_to_f64(&alpha.norm_sq())
}
