//! Multi-indices and the exact combinatorics attached to them.
//!
//! A [`MultiIndex`] is an exponent vector in N_0^d indexing the monomial
//! z^alpha.  The basis order used everywhere in the crate is graded
//! lexicographic: degree-major, and within a degree the index with the
//! larger leading exponent comes first, so for d = 2, degree 2 the order
//! is (2,0), (1,1), (0,2).  Factorials and binomials are computed in
//! arbitrary precision; squared monomial norms alpha!/|alpha|! overflow
//! 64-bit factorials well before the degrees the experiments need.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Exponent vector alpha in N_0^d.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// Standard basis index e_k (0-based coordinate).
    pub fn unit(d: usize, k: usize) -> Self {
        let mut e = vec![0; d];
        e[k] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, `None` unless `self >= other` everywhere.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Number of nonzero exponents.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&a| a > 0).count()
    }

    /// Squared monomial norm ||z^alpha||^2 = alpha!/|alpha|! as an exact rational.
    pub fn norm_sq(&self) -> BigRational {
        let mut num = BigInt::one();
        for &a in &self.0 {
            num *= factorial(a as usize);
        }
        BigRational::new(num, factorial(self.degree()))
    }

    /// Multinomial coefficient |alpha|!/alpha! (reciprocal of `norm_sq`).
    pub fn multinomial(&self) -> BigInt {
        // norm_sq reduces to 1/m with m = |alpha|!/alpha! an integer
        let q = self.norm_sq();
        q.denom() / q.numer()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "z{}", i + 1)?;
            if a > 1 {
                write!(f, "^{}", a)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Graded lexicographic order: by degree, then lexicographically with the
/// larger leading exponent first, matching the enumeration order.
impl Ord for MultiIndex {
    fn cmp(&self, other: &MultiIndex) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &MultiIndex) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All multi-indices of dimension `d` and exact degree `k`, graded-lex order.
///
/// Returns exactly C(k+d-1, d-1) indices; deterministic.
pub fn enum_multiindices(d: usize, k: usize) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut out = Vec::with_capacity(count_of_degree(d, k));
    let mut current = vec![0u32; d];
    fill(&mut out, &mut current, 0, k);
    Ok(out)
}

fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u32;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a as u32;
        fill(out, current, pos + 1, remaining - a);
    }
}

/// All multi-indices of degree 0..=n, graded-lex order.
pub fn enum_up_to(d: usize, n: usize) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(enum_multiindices(d, k)?);
    }
    Ok(out)
}

/// C(k+d-1, d-1), the number of degree-k monomials in d variables.
pub fn count_of_degree(d: usize, k: usize) -> usize {
    use num_traits::ToPrimitive;
    binomial(k + d - 1, d - 1).to_usize().expect("count fits usize")
}

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn enumeration_d2_k2() {
        let idx = enum_multiindices(2, 2).unwrap();
        let expected: Vec<MultiIndex> = vec![
            MultiIndex::new(vec![2, 0]),
            MultiIndex::new(vec![1, 1]),
            MultiIndex::new(vec![0, 2]),
        ];
        assert_eq!(idx, expected);
    }

    #[test]
    fn enumeration_degree_zero() {
        assert_eq!(enum_multiindices(3, 0).unwrap(), vec![MultiIndex::zero(3)]);
    }

    #[test]
    fn enumeration_count_d3_k2() {
        let idx = enum_multiindices(3, 2).unwrap();
        assert_eq!(idx.len(), 6);
        assert_eq!(idx.len(), count_of_degree(3, 2));
    }

    #[test]
    fn enumeration_counts_match_binomial() {
        // brute force: every exponent vector summing to k appears exactly once
        for d in 1..=5 {
            for k in 0..=12 {
                let idx = enum_multiindices(d, k).unwrap();
                assert_eq!(idx.len(), count_of_degree(d, k), "d={d} k={k}");
                assert!(idx.iter().all(|a| a.degree() == k && a.dim() == d));
                let mut sorted = idx.clone();
                sorted.sort();
                assert_eq!(sorted, idx, "graded-lex order is the sort order");
                let mut dedup = idx.clone();
                dedup.dedup();
                assert_eq!(dedup.len(), idx.len());
            }
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(enum_multiindices(0, 3), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn norm_sq_values() {
        assert_eq!(MultiIndex::new(vec![1, 1]).norm_sq(), ratio(1, 2));
        assert_eq!(MultiIndex::new(vec![2, 0]).norm_sq(), ratio(1, 1));
        assert_eq!(MultiIndex::new(vec![1, 1, 1]).norm_sq(), ratio(1, 6));
    }

    #[test]
    fn norm_sq_is_one_iff_single_variable() {
        for d in 1..=4 {
            for k in 0..=8 {
                for alpha in enum_multiindices(d, k).unwrap() {
                    let q = MultiIndex::norm_sq(&alpha);
                    assert!(q > ratio(0, 1) && q <= ratio(1, 1));
                    assert_eq!(q == ratio(1, 1), alpha.support_size() <= 1, "{alpha:?}");
                }
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), BigInt::from(4 + 2));
        assert_eq!(binomial(10, 5), BigInt::from(252));
        assert_eq!(binomial(3, 7), BigInt::from(0));
        assert_eq!(factorial(6), BigInt::from(720));
    }

    #[test]
    fn ordering_is_graded() {
        let a = MultiIndex::new(vec![0, 2]);
        let b = MultiIndex::new(vec![3, 0]);
        assert!(a < b);
        assert!(MultiIndex::new(vec![2, 0]) < MultiIndex::new(vec![1, 1]));
    }

    #[test]
    fn display_form() {
        assert_eq!(MultiIndex::new(vec![1, 2]).to_string(), "z1*z2^2");
        assert_eq!(MultiIndex::zero(2).to_string(), "1");
    }
}
