//! A small full Fock space model over d letters.
//!
//! Words index an orthonormal basis xi_w; the left creation operators
//! L_k prepend a letter.  Symmetrizing the words of a fixed letter
//! multiplicity recovers the monomial basis of H^2_d, and compressing
//! L_k to the symmetrized vectors reproduces the matrix of M_{z_k}
//! exactly.  Everything here is exact: pairings are integer counts and
//! the compression comparison is done on squared rational entries.

use crate::error::{Error, Result};
use crate::multiindex::{enum_up_to, MultiIndex};
use crate::scalar::{rational_to_f64, Scalar, C64};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

pub const DEFAULT_MAX_WORD_LEN: usize = 8;
pub const DEFAULT_MAX_DIM: usize = 3;

/// A word over the alphabet {1, ..., d}, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letter multiplicities as a multi-index.
    pub fn multiplicity(&self, d: usize) -> MultiIndex {
        let mut m = vec![0u32; d];
        for &l in &self.0 {
            m[l as usize] += 1;
        }
        MultiIndex::new(m)
    }

    pub fn prepend(&self, letter: u8) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Word(v)
    }
}

/// Sparse element of the full Fock space, coefficients exact through
/// `len_bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct FullFockVector<S: Scalar> {
    dim: usize,
    len_bound: usize,
    coeffs: BTreeMap<Word, S>,
}

impl<S: Scalar> FullFockVector<S> {
    pub fn zero(dim: usize, len_bound: usize) -> Self {
        FullFockVector { dim, len_bound, coeffs: BTreeMap::new() }
    }

    pub fn basis(dim: usize, len_bound: usize, w: Word) -> Result<Self> {
        let mut v = Self::zero(dim, len_bound);
        v.set(w, S::one())?;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, w: Word, c: S) -> Result<()> {
        if w.len() > self.len_bound {
            return Err(Error::DegreeExceedsBound { degree: w.len(), bound: self.len_bound });
        }
        if c.is_zero() {
            self.coeffs.remove(&w);
        } else {
            self.coeffs.insert(w, c);
        }
        Ok(())
    }

    pub fn coeff(&self, w: &Word) -> S {
        self.coeffs.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.coeffs.iter()
    }

    /// <v, u> with the words orthonormal.
    pub fn inner_product(&self, other: &FullFockVector<S>) -> Result<S> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut acc = S::zero();
        for (w, c) in &self.coeffs {
            if let Some(u) = other.coeffs.get(w) {
                acc = acc + c.clone() * Scalar::conj(u);
            }
        }
        Ok(acc)
    }

    /// Left creation L_k (0-based letter): xi_w -> xi_{k w}.
    pub fn left_shift(&self, k: usize) -> Result<Self> {
        if k >= self.dim {
            return Err(Error::DimensionMismatch { left: k + 1, right: self.dim });
        }
        let mut out = Self::zero(self.dim, self.len_bound);
        for (w, c) in &self.coeffs {
            out.set(w.prepend(k as u8), c.clone())?;
        }
        Ok(out)
    }
}

/// All words with letter multiplicities `alpha`, in lexicographic order.
pub fn words_with_multiplicity(alpha: &MultiIndex) -> Vec<Word> {
    let mut out = Vec::new();
    let mut remaining = alpha.0.clone();
    let mut current = Vec::with_capacity(alpha.degree());
    fn rec(remaining: &mut Vec<u32>, current: &mut Vec<u8>, left: usize, out: &mut Vec<Word>) {
        if left == 0 {
            out.push(Word(current.clone()));
            return;
        }
        for l in 0..remaining.len() {
            if remaining[l] > 0 {
                remaining[l] -= 1;
                current.push(l as u8);
                rec(remaining, current, left - 1, out);
                current.pop();
                remaining[l] += 1;
            }
        }
    }
    rec(&mut remaining, &mut current, alpha.degree(), &mut out);
    out
}

/// Unnormalized symmetrization: the sum of xi_w over all words with
/// multiplicity `alpha`.  Its squared norm is the integer |alpha|!/alpha!.
pub fn symmetrization<S: Scalar>(alpha: &MultiIndex, len_bound: usize) -> Result<FullFockVector<S>> {
    if alpha.degree() > len_bound {
        return Err(Error::DegreeExceedsBound { degree: alpha.degree(), bound: len_bound });
    }
    let mut v = FullFockVector::zero(alpha.dim(), len_bound);
    for w in words_with_multiplicity(alpha) {
        v.set(w, S::one())?;
    }
    Ok(v)
}

/// Unit-norm embedding of the normalized monomial z^alpha/||z^alpha||:
/// the symmetrization scaled by sqrt(alpha!/|alpha|!).
pub fn symmetric_embedding(alpha: &MultiIndex, len_bound: usize) -> Result<FullFockVector<C64>> {
    let sym = symmetrization::<C64>(alpha, len_bound)?;
    let scale = rational_to_f64(&alpha.norm_sq()).sqrt();
    let mut out = FullFockVector::zero(alpha.dim(), len_bound);
    for (w, c) in sym.terms() {
        out.set(w.clone(), *c * C64::new(scale, 0.0))?;
    }
    Ok(out)
}

/// Report from [`compression_check`]: the maximum absolute deviation
/// between P_sym L_k iota and the matrix of M_{z_k}, entry by entry.
#[derive(Clone, Debug)]
pub struct CompressionReport {
    pub dim: usize,
    pub letter: usize,
    pub len_bound: usize,
    pub entries_checked: usize,
    /// Exactly zero when the compression identity holds.
    pub max_deviation: f64,
    /// True when every squared entry matched as an exact rational.
    pub exact: bool,
}

/// Compare the compression of L_k to the symmetric vectors against the
/// matrix of M_{z_k} on normalized monomials, through domain degree
/// `len_bound - 1`.  Both squared entries are rationals and are compared
/// exactly; `k` is 1-based as in the operator family L_1, ..., L_d.
pub fn compression_check(d: usize, k: usize, len_bound: usize) -> Result<CompressionReport> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if k == 0 || k > d {
        return Err(Error::DimensionMismatch { left: k, right: d });
    }
    if len_bound == 0 {
        return Err(Error::TruncationTooSmall { truncation: 0, required: 1 });
    }
    let letter = k - 1;
    let domain = enum_up_to(d, len_bound - 1)?;
    let codomain = enum_up_to(d, len_bound)?;
    let mut max_dev = BigRational::zero();
    let mut entries = 0usize;
    for alpha in &domain {
        // L_k applied to the unnormalized symmetrization of alpha
        let lk: FullFockVector<BigRationalScalar> =
            symmetrization::<BigRationalScalar>(alpha, len_bound)?.left_shift(letter)?;
        for beta in &codomain {
            let sym_beta = symmetrization::<BigRationalScalar>(beta, len_bound)?;
            // integer pairing count
            let count = sym_beta.inner_product(&lk)?.0;
            // fock side entry squared: (count^2) * norm_sq(alpha) * norm_sq(beta)
            let fock_sq = &count * &count * alpha.norm_sq() * beta.norm_sq();
            // multiplier side: ||z^{alpha+e_k}|| / ||z^alpha|| at beta = alpha+e_k
            let mult_sq = match beta.checked_sub(alpha) {
                Some(diff) if diff == MultiIndex::unit(d, letter) => {
                    beta.norm_sq() / alpha.norm_sq()
                }
                _ => BigRational::zero(),
            };
            // both entries are non-negative square roots, so comparing
            // squares is equivalent
            let dev = abs_rational(&fock_sq - &mult_sq);
            if dev > max_dev {
                max_dev = dev;
            }
            entries += 1;
        }
    }
    Ok(CompressionReport {
        dim: d,
        letter: k,
        len_bound,
        entries_checked: entries,
        max_deviation: rational_to_f64(&max_dev),
        exact: max_dev.is_zero(),
    })
}

fn abs_rational(q: BigRational) -> BigRational {
    if q < BigRational::zero() {
        -q
    } else {
        q
    }
}

/// Real rational as a degenerate "complex" scalar for exact word counts.
#[derive(Clone, Debug, PartialEq)]
struct BigRationalScalar(BigRational);

impl std::ops::Add for BigRationalScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        BigRationalScalar(self.0 + rhs.0)
    }
}
impl std::ops::Sub for BigRationalScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        BigRationalScalar(self.0 - rhs.0)
    }
}
impl std::ops::Mul for BigRationalScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        BigRationalScalar(self.0 * rhs.0)
    }
}
impl std::ops::Div for BigRationalScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        BigRationalScalar(self.0 / rhs.0)
    }
}
impl std::ops::Rem for BigRationalScalar {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        BigRationalScalar(self.0 % rhs.0)
    }
}
impl std::ops::Neg for BigRationalScalar {
    type Output = Self;
    fn neg(self) -> Self {
        BigRationalScalar(-self.0)
    }
}
impl num_traits::Zero for BigRationalScalar {
    fn zero() -> Self {
        BigRationalScalar(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}
impl num_traits::One for BigRationalScalar {
    fn one() -> Self {
        BigRationalScalar(BigRational::from_integer(1.into()))
    }
}
impl num_traits::Num for BigRationalScalar {
    type FromStrRadixErr = <BigRational as num_traits::Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(BigRationalScalar)
    }
}
impl Scalar for BigRationalScalar {
    fn from_rational(q: &BigRational) -> Self {
        BigRationalScalar(q.clone())
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn abs_sq(&self) -> Self {
        BigRationalScalar(&self.0 * &self.0)
    }
    fn to_c64(&self) -> C64 {
        C64::new(rational_to_f64(&self.0), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::enum_multiindices;
    use crate::scalar::ratio;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn single_letter_embedding() {
        let v = symmetric_embedding(&mi(&[1, 0]), 4).unwrap();
        assert_eq!(v.terms().count(), 1);
        assert_eq!(v.coeff(&Word(vec![0])), C64::new(1.0, 0.0));
    }

    #[test]
    fn mixed_word_embedding_normalized() {
        // alpha = (1,1): (xi_12 + xi_21)/sqrt(2)
        let v = symmetric_embedding(&mi(&[1, 1]), 4).unwrap();
        let c = v.coeff(&Word(vec![0, 1]));
        assert!((c.re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c, v.coeff(&Word(vec![1, 0])));
        let n2 = v.inner_product(&v).unwrap();
        assert!((n2.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn repeated_letter_embedding() {
        let v = symmetric_embedding(&mi(&[2, 0]), 4).unwrap();
        assert_eq!(v.terms().count(), 1);
        assert_eq!(v.coeff(&Word(vec![0, 0])), C64::new(1.0, 0.0));
    }

    #[test]
    fn embedding_exceeding_bound_rejected() {
        assert!(matches!(
            symmetric_embedding(&mi(&[5, 4]), 8),
            Err(Error::DegreeExceedsBound { .. })
        ));
    }

    #[test]
    fn embedding_isometric_exact() {
        // the unnormalized pairings are integer counts; diagonal count
        // times alpha!/|alpha|! is exactly 1, off-diagonal exactly 0
        for d in 1..=3usize {
            for k in 0..=6usize {
                let indices = enum_multiindices(d, k).unwrap();
                for a in &indices {
                    for b in &indices {
                        let sa = symmetrization::<BigRationalScalar>(a, 6).unwrap();
                        let sb = symmetrization::<BigRationalScalar>(b, 6).unwrap();
                        let count = sa.inner_product(&sb).unwrap().0;
                        if a == b {
                            assert_eq!(&count * a.norm_sq(), ratio(1, 1), "{a:?}");
                        } else {
                            assert!(count.is_zero(), "{a:?} {b:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn word_count_is_multinomial() {
        let alpha = mi(&[2, 1, 1]);
        assert_eq!(
            words_with_multiplicity(&alpha).len(),
            12,
            "4!/(2!1!1!) = 12"
        );
    }

    #[test]
    fn norm_sq_cross_check_via_word_symmetrization() {
        // ||z1 z2 z3||^2 = 1/6 by symmetrizing the word 123
        let alpha = mi(&[1, 1, 1]);
        let count = words_with_multiplicity(&alpha).len();
        assert_eq!(BigRational::from_integer((count as i64).into()), ratio(6, 1));
        assert_eq!(alpha.norm_sq(), ratio(1, 6));
    }

    #[test]
    fn compression_identity_small() {
        let r = compression_check(2, 1, 2).unwrap();
        assert!(r.exact);
        assert_eq!(r.max_deviation, 0.0);
    }

    #[test]
    fn compression_identity_unilateral_shift() {
        let r = compression_check(1, 1, 4).unwrap();
        assert!(r.exact);
    }

    #[test]
    fn compression_identity_d3() {
        let r = compression_check(3, 2, 3).unwrap();
        assert!(r.exact);
        assert_eq!(r.max_deviation, 0.0);
    }

    #[test]
    fn compression_rejects_bad_letter() {
        assert!(compression_check(2, 3, 2).is_err());
        assert!(compression_check(2, 0, 2).is_err());
    }

    #[test]
    fn left_shift_prepends() {
        let v = FullFockVector::<C64>::basis(2, 3, Word(vec![1])).unwrap();
        let s = v.left_shift(0).unwrap();
        assert_eq!(s.coeff(&Word(vec![0, 1])), C64::new(1.0, 0.0));
    }
}
