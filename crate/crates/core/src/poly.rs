//! Multiplier symbols: finite coefficient maps with ring operations,
//! the shared text format, and the JSON form.
//!
//! Text grammar:
//!
//! ```text
//! poly     := term (('+'|'-') term)*
//! term     := factor ('*'? factor)*
//! factor   := coeff | 'z' INT ('^' INT)? | '(' poly ')' ('^' INT)?
//! coeff    := decimal | '(' decimal (',' decimal)? ')'
//! ```
//!
//! so `2*z1*z2 + 0.5*z1^3`, `(0,1)*z2` and `(z1*z2)^2` all parse.
//! Parenthesized-power expansion is capped at total degree 64.
//!
//! JSON form: `{"d": int, "terms": [{"alpha": [ints], "re": f, "im": f}]}`.

use crate::error::{Error, Result};
use crate::fock::{monomial_value, FockVector};
use crate::multiindex::MultiIndex;
use crate::scalar::{Scalar, C64};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEGREE_CAP: usize = 64;

/// A polynomial multiplier symbol: sparse coefficients over multi-indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S: Scalar> {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: S) -> Self {
        let mut p = Self::zero(dim);
        p.set(MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, S::one())
    }

    /// The coordinate function z_{k+1} (0-based k).
    pub fn coordinate(dim: usize, k: usize) -> Self {
        let mut p = Self::zero(dim);
        p.set(MultiIndex::unit(dim, k), S::one());
        p
    }

    pub fn monomial(dim: usize, alpha: MultiIndex, c: S) -> Result<Self> {
        if alpha.dim() != dim {
            return Err(Error::DimensionMismatch { left: alpha.dim(), right: dim });
        }
        let mut p = Self::zero(dim);
        p.set(alpha, c);
        Ok(p)
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, S)>,
    {
        let mut p = Self::zero(dim);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch { left: alpha.dim(), right: dim });
            }
            let cur = p.coeff(&alpha);
            p.set(alpha, cur + c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|a| a.degree()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn set(&mut self, alpha: MultiIndex, c: S) {
        debug_assert_eq!(alpha.dim(), self.dim);
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

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, other: &Polynomial<S>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = self.clone();
        for (alpha, c) in &other.coeffs {
            let cur = out.coeff(alpha);
            out.set(alpha.clone(), cur + c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.dim);
        for (alpha, v) in &self.coeffs {
            out.set(alpha.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (alpha, v) in &self.coeffs {
            out.set(alpha.clone(), -v.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial<S>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let key = a.add(b);
                let cur = out.coeff(&key);
                out.set(key, cur + ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    /// p^n with the crate-wide total-degree cap.
    pub fn pow(&self, n: usize) -> Result<Self> {
        if self.degree() * n > DEGREE_CAP {
            return Err(Error::DegreeCapExceeded { cap: DEGREE_CAP });
        }
        let mut acc = Self::one(self.dim);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Radial dilation: the coefficient of z^alpha picks up r^{|alpha|}.
    pub fn dilate(&self, r: &S) -> Self {
        let mut out = Self::zero(self.dim);
        for (alpha, c) in &self.coeffs {
            let mut rk = S::one();
            for _ in 0..alpha.degree() {
                rk = rk * r.clone();
            }
            out.set(alpha.clone(), c.clone() * rk);
        }
        out
    }

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

    /// The homogeneous components, as (degree, component) pairs.
    pub fn homogeneous_components(&self) -> Vec<(usize, Polynomial<S>)> {
        let mut map: BTreeMap<usize, Polynomial<S>> = BTreeMap::new();
        for (alpha, c) in &self.coeffs {
            map.entry(alpha.degree())
                .or_insert_with(|| Polynomial::zero(self.dim))
                .set(alpha.clone(), c.clone());
        }
        map.into_iter().collect()
    }

    /// View as a Fock-space element exact through `degree_bound`.
    pub fn to_fock(&self, degree_bound: usize) -> Result<FockVector<S>> {
        let bound = degree_bound.max(self.degree());
        FockVector::from_terms(self.dim, bound, self.coeffs.clone())
    }

    /// l^1 coefficient mass: an upper bound for sup |p| on the closed ball.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.to_c64().norm()).sum()
    }

    pub fn to_c64(&self) -> Polynomial<C64> {
        let mut out = Polynomial::zero(self.dim);
        for (alpha, c) in &self.coeffs {
            out.set(alpha.clone(), c.to_c64());
        }
        out
    }
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PolyTermJson {
    pub alpha: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PolyJson {
    pub d: usize,
    pub terms: Vec<PolyTermJson>,
}

impl Polynomial<C64> {
    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            d: self.dim,
            terms: self
                .coeffs
                .iter()
                .map(|(a, c)| PolyTermJson { alpha: a.0.clone(), re: c.re, im: c.im })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        Polynomial::from_terms(
            j.d,
            j.terms
                .iter()
                .map(|t| (MultiIndex::new(t.alpha.clone()), C64::new(t.re, t.im))),
        )
    }
}

impl std::fmt::Display for Polynomial<C64> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({},{})", c.re, c.im)?;
            }
            if alpha.degree() > 0 {
                write!(f, "*{}", alpha)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Text format parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

/// Parse the shared polynomial text format in ambient dimension `d`.
pub fn parse_polynomial(text: &str, d: usize) -> Result<Polynomial<C64>> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim: d };
    p.skip_ws();
    let poly = p.parse_poly()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    if poly.degree() > DEGREE_CAP {
        return Err(Error::DegreeCapExceeded { cap: DEGREE_CAP });
    }
    Ok(poly)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { at: self.pos, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    fn parse_poly(&mut self) -> Result<Polynomial<C64>> {
        let mut acc;
        self.skip_ws();
        let mut sign = 1.0;
        if self.peek() == Some(b'-') {
            self.bump();
            sign = -1.0;
        } else if self.peek() == Some(b'+') {
            self.bump();
        }
        acc = self.parse_term()?.scale(&C64::new(sign, 0.0));
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = acc.add(&t)?;
                }
                Some(b'-') => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = acc.add(&t.neg())?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<Polynomial<C64>> {
        let mut acc = self.parse_factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    let f = self.parse_factor()?;
                    acc = acc.mul(&f)?;
                }
                // implicit product: a factor follows without '*'
                Some(b'z') | Some(b'(') => {
                    let f = self.parse_factor()?;
                    acc = acc.mul(&f)?;
                }
                _ => break,
            }
            if acc.degree() > DEGREE_CAP {
                return Err(Error::DegreeCapExceeded { cap: DEGREE_CAP });
            }
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Polynomial<C64>> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.bump();
            return Ok(self.parse_factor()?.neg());
        }
        if self.peek() == Some(b'+') {
            self.bump();
            return self.parse_factor();
        }
        match self.peek() {
            Some(b'z') => {
                self.bump();
                let idx = self.parse_uint()? as usize;
                if idx == 0 || idx > self.dim {
                    return Err(self.err(&format!(
                        "variable z{idx} out of range for dimension {}",
                        self.dim
                    )));
                }
                let e = self.parse_opt_power()?;
                let mut alpha = MultiIndex::zero(self.dim);
                alpha.0[idx - 1] = e;
                Polynomial::monomial(self.dim, alpha, C64::new(1.0, 0.0))
            }
            Some(b'(') => self.parse_paren(),
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.parse_decimal()?;
                Ok(Polynomial::constant(self.dim, C64::new(v, 0.0)))
            }
            _ => Err(self.err("expected coefficient, variable, or '('")),
        }
    }

    /// Either a complex coefficient `(re, im)` / `(re)`, or a
    /// parenthesized sub-polynomial, optionally raised to a power.
    fn parse_paren(&mut self) -> Result<Polynomial<C64>> {
        let open = self.pos;
        self.bump(); // '('
        // try the complex-coefficient form first
        if let Some(p) = self.try_complex_coeff() {
            let e = self.parse_opt_power()?;
            let base = Polynomial::constant(self.dim, p);
            return base.pow(e as usize);
        }
        self.pos = open;
        self.bump();
        let inner = self.parse_poly()?;
        self.skip_ws();
        if self.peek() != Some(b')') {
            return Err(self.err("expected ')'"));
        }
        self.bump();
        let e = self.parse_opt_power()?;
        if inner.degree() * e as usize > DEGREE_CAP {
            return Err(Error::DegreeCapExceeded { cap: DEGREE_CAP });
        }
        inner.pow(e as usize)
    }

    fn try_complex_coeff(&mut self) -> Option<C64> {
        let save = self.pos;
        self.skip_ws();
        let re = self.parse_signed_decimal().ok()?;
        self.skip_ws();
        let im = if self.peek() == Some(b',') {
            self.bump();
            self.skip_ws();
            let v = self.parse_signed_decimal().ok()?;
            self.skip_ws();
            v
        } else {
            0.0
        };
        if self.peek() == Some(b')') {
            self.bump();
            Some(C64::new(re, im))
        } else {
            self.pos = save;
            None
        }
    }

    fn parse_opt_power(&mut self) -> Result<u32> {
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.bump();
            self.parse_uint()
        } else {
            Ok(1)
        }
    }

    fn parse_uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().map_or(false, |c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|e| self.err(&e.to_string()))
    }

    fn parse_signed_decimal(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        self.parse_decimal_from(start)
    }

    fn parse_decimal(&mut self) -> Result<f64> {
        let start = self.pos;
        self.parse_decimal_from(start)
    }

    fn parse_decimal_from(&mut self, start: usize) -> Result<f64> {
        while self.peek().map_or(false, |c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().map_or(false, |c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            while self.peek().map_or(false, |c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if s.is_empty() || s == "+" || s == "-" || s == "." {
            return Err(self.err("expected number"));
        }
        s.parse::<f64>().map_err(|e| self.err(&e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn parse_basic_terms() {
        let p = parse_polynomial("2*z1*z2 + 0.5*z1^3", 2).unwrap();
        assert_eq!(p.coeff(&mi(&[1, 1])), c64(2.0, 0.0));
        assert_eq!(p.coeff(&mi(&[3, 0])), c64(0.5, 0.0));
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn parse_complex_coeff() {
        let p = parse_polynomial("(0,1)*z2", 2).unwrap();
        assert_eq!(p.coeff(&mi(&[0, 1])), c64(0.0, 1.0));
    }

    #[test]
    fn parse_power_syntax() {
        let p = parse_polynomial("(z1*z2)^2", 2).unwrap();
        assert_eq!(p.coeff(&mi(&[2, 2])), c64(1.0, 0.0));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn parse_leading_minus_and_subtraction() {
        let p = parse_polynomial("-z1 + 1 - 0.5*z2", 2).unwrap();
        assert_eq!(p.coeff(&mi(&[1, 0])), c64(-1.0, 0.0));
        assert_eq!(p.coeff(&mi(&[0, 0])), c64(1.0, 0.0));
        assert_eq!(p.coeff(&mi(&[0, 1])), c64(-0.5, 0.0));
    }

    #[test]
    fn parse_nested_expression() {
        let p = parse_polynomial("(1 + z1)^2 * 0.25", 1).unwrap();
        assert_eq!(p.coeff(&mi(&[0])), c64(0.25, 0.0));
        assert_eq!(p.coeff(&mi(&[1])), c64(0.5, 0.0));
        assert_eq!(p.coeff(&mi(&[2])), c64(0.25, 0.0));
    }

    #[test]
    fn parse_rejects_out_of_range_variable() {
        assert!(parse_polynomial("z3", 2).is_err());
        assert!(parse_polynomial("z0", 2).is_err());
    }

    #[test]
    fn parse_rejects_trailing_garbage() {
        assert!(parse_polynomial("z1 )", 2).is_err());
    }

    #[test]
    fn degree_cap_enforced() {
        assert!(matches!(
            parse_polynomial("(z1*z2)^40", 2),
            Err(Error::DegreeCapExceeded { .. })
        ));
    }

    #[test]
    fn json_roundtrip() {
        let p = parse_polynomial("2*z1*z2 + (0,1)*z2^3", 2).unwrap();
        let j = p.to_json();
        let q = Polynomial::from_json(&j).unwrap();
        assert_eq!(p, q);
        let s = serde_json::to_string(&j).unwrap();
        let j2: PolyJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Polynomial::from_json(&j2).unwrap(), p);
    }

    #[test]
    fn dilate_scales_by_degree() {
        let p = parse_polynomial("z1^2", 2).unwrap();
        let q = p.dilate(&c64(0.5, 0.0));
        assert_eq!(q.coeff(&mi(&[2, 0])), c64(0.25, 0.0));
        let r = p.dilate(&c64(1.0, 0.0));
        assert_eq!(r, p);
    }

    #[test]
    fn homogeneous_components_split() {
        let p = parse_polynomial("1 + z1 + 2*z1*z2", 2).unwrap();
        let comps = p.homogeneous_components();
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[0].0, 0);
        assert_eq!(comps[2].0, 2);
        assert_eq!(comps[2].1.coeff(&mi(&[1, 1])), c64(2.0, 0.0));
    }

    #[test]
    fn mul_convolves() {
        let p = parse_polynomial("1 + z1", 2).unwrap();
        let q = p.mul(&p).unwrap();
        assert_eq!(q.coeff(&mi(&[1, 0])), c64(2.0, 0.0));
    }

    #[test]
    fn display_roundtrips_through_parser() {
        let p = parse_polynomial("2*z1*z2 + 0.5*z1^3 + (0,1)*z2", 2).unwrap();
        let q = parse_polynomial(&p.to_string(), 2).unwrap();
        assert_eq!(p, q);
    }
}
