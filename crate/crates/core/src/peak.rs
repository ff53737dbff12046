//! Peak-function constructions and their verification.
//!
//! The point construction starts from f = (1 + z1)/2, which peaks at
//! e_1 on the sphere and has multiplier norm 1 because it depends on a
//! single variable.  The truncated series g = sum_{n<=M} 2^{-n} f^n then
//! peaks at e_1 with value 1 - 2^{-M} and multiplier norm strictly below
//! 1, and a unitary change of variables transports the construction to
//! any target on the sphere.  The balanced-circle functions
//! h_n = (1/n) sum_{k<=n} (2 z1 z2)^k equal 1 exactly on the circle
//! {(z, conj z): |z| = 1/sqrt 2} and have modulus < 1 elsewhere on S_2.

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::multop::{multiplier_norm, NormEstimate};
use crate::poly::Polynomial;
use crate::scalar::C64;
use crate::sphere::{sphere_points, SampleConfig};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Target set for a peak construction.
#[derive(Clone, Debug)]
pub enum PeakTarget {
    /// A point on the unit sphere of C^d.
    Point(Vec<C64>),
    /// The circle {(z, conj z): |z| = 1/sqrt 2} in S_2.
    BalancedCircle,
}

#[derive(Clone, Debug)]
pub struct PeakSpec {
    pub target: PeakTarget,
    /// Series truncation M; the on-target deficit is exactly 2^{-M}.
    pub series_len: u32,
}

impl PeakSpec {
    pub fn point(zeta: Vec<C64>, series_len: u32) -> Result<Self> {
        let norm_sq: f64 = zeta.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitVector { norm_sq });
        }
        if series_len == 0 {
            return Err(Error::TruncationTooSmall { truncation: 0, required: 1 });
        }
        Ok(PeakSpec { target: PeakTarget::Point(zeta), series_len })
    }

    pub fn tail_bound(&self) -> f64 {
        0.5f64.powi(self.series_len as i32)
    }

    pub fn dim(&self) -> usize {
        match &self.target {
            PeakTarget::Point(z) => z.len(),
            PeakTarget::BalancedCircle => 2,
        }
    }

    /// A representative point of the target set.
    pub fn representative(&self) -> Vec<C64> {
        match &self.target {
            PeakTarget::Point(z) => z.clone(),
            PeakTarget::BalancedCircle => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                vec![C64::new(r, 0.0), C64::new(r, 0.0)]
            }
        }
    }

    /// Chordal distance from a sphere point to the target set.
    pub fn distance(&self, z: &[C64]) -> f64 {
        match &self.target {
            PeakTarget::Point(zeta) => z
                .iter()
                .zip(zeta)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt(),
            PeakTarget::BalancedCircle => {
                // dist^2 = 2 - sqrt(2) |conj(z1) + z2|, minimized over the circle phase
                let m = (z[0].conj() + z[1]).norm();
                (2.0 - 2f64.sqrt() * m).max(0.0).sqrt()
            }
        }
    }
}

/// Verify unitarity and substitute z_k <- sum_j conj(u_{kj}) z_j.
///
/// This is the adjoint rotation action on symbols: degree is preserved
/// and homogeneous components map to homogeneous components.
pub fn rotation_pullback(u: &DMatrix<C64>, p: &Polynomial<C64>) -> Result<Polynomial<C64>> {
    let d = p.dim();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch { left: u.nrows(), right: d });
    }
    let dev = unitary_deviation(u);
    if dev > 1e-10 {
        return Err(Error::NotUnitary { deviation: dev });
    }
    // linear forms L_k = sum_j conj(u_{kj}) z_j
    let forms: Vec<Polynomial<C64>> = (0..d)
        .map(|k| {
            let mut f = Polynomial::zero(d);
            for j in 0..d {
                let c = u[(k, j)].conj();
                if c.norm_sqr() > 0.0 {
                    f.set(MultiIndex::unit(d, j), c);
                }
            }
            f
        })
        .collect();
    let mut out = Polynomial::zero(d);
    for (alpha, c) in p.terms() {
        let mut term = Polynomial::constant(d, *c);
        for (k, &e) in alpha.0.iter().enumerate() {
            for _ in 0..e {
                term = term.mul(&forms[k])?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

pub fn unitary_deviation(u: &DMatrix<C64>) -> f64 {
    let id = DMatrix::<C64>::identity(u.nrows(), u.ncols());
    (u.adjoint() * u - id).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Deterministic unitary whose pullback carries functions peaking at e_1
/// to functions peaking at `zeta`: a Householder-type reflection (with a
/// phase correction) built so that the first row of U equals zeta, hence
/// rotation_pullback(U, z1)(zeta) = <zeta, zeta> = 1.
pub fn unitary_for_target(zeta: &[C64]) -> Result<DMatrix<C64>> {
    let d = zeta.len();
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let norm_sq: f64 = zeta.iter().map(|c| c.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitVector { norm_sq });
    }
    // x = conj(zeta); build U with U x = e_1
    let x: Vec<C64> = zeta.iter().map(|c| c.conj()).collect();
    let off_axis: f64 = x.iter().skip(1).map(|c| c.norm_sqr()).sum();
    if off_axis < 1e-30 {
        // x = x1 e_1 with |x1| = 1: a diagonal phase suffices
        let mut u = DMatrix::<C64>::identity(d, d);
        u[(0, 0)] = x[0].conj();
        return Ok(u);
    }
    // mu = phase of x1 (1 if x1 = 0); w = x - mu e_1 is never tiny here
    let mu = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
    let mut w = x.clone();
    w[0] -= mu;
    let wn: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    // H = I - 2 w w* / |w|^2 maps x to mu e_1; kill the phase afterwards
    let mut h = DMatrix::<C64>::identity(d, d);
    for i in 0..d {
        for j in 0..d {
            h[(i, j)] -= w[i] * w[j].conj() * C64::new(2.0 / wn, 0.0);
        }
    }
    for j in 0..d {
        let v = h[(0, j)];
        h[(0, j)] = mu.conj() * v;
    }
    Ok(h)
}

/// The outcome of `peak_polynomial`: the expanded symbol plus the exact
/// on-target value of the construction.
#[derive(Clone, Debug)]
pub struct PeakFunction {
    pub poly: Polynomial<C64>,
    pub spec: PeakSpec,
    /// Value of the construction at the target: 1 - 2^{-M}, exact, since
    /// the base function equals 1 at the peak point by construction.
    pub on_target: C64,
}

/// g = sum_{n=1}^{M} 2^{-n} f^n pulled to the target point.
///
/// Each f^n has multiplier norm 1 (f depends on one variable), so the
/// multiplier norm of g is at most 1 - 2^{-M}.
pub fn peak_polynomial(spec: &PeakSpec) -> Result<PeakFunction> {
    let zeta = match &spec.target {
        PeakTarget::Point(z) => z.clone(),
        PeakTarget::BalancedCircle => {
            return Err(Error::DimensionMismatch { left: 1, right: 2 })
        }
    };
    let d = zeta.len();
    let m = spec.series_len;
    // base: f = (1 + z1)/2, g = sum 2^{-n} f^n
    let f = Polynomial::from_terms(
        d,
        [
            (MultiIndex::zero(d), C64::new(0.5, 0.0)),
            (MultiIndex::unit(d, 0), C64::new(0.5, 0.0)),
        ],
    )?;
    let mut g = Polynomial::zero(d);
    let mut fp = Polynomial::one(d);
    let mut on_target = 0.0f64; // sum of 2^{-n}: exact dyadic partials
    for n in 1..=m {
        fp = fp.mul(&f)?;
        g = g.add(&fp.scale(&C64::new(0.5f64.powi(n as i32), 0.0)))?;
        on_target += 0.5f64.powi(n as i32);
    }
    let u = unitary_for_target(&zeta)?;
    let rotated = rotation_pullback(&u, &g)?;
    Ok(PeakFunction { poly: rotated, spec: spec.clone(), on_target: C64::new(on_target, 0.0) })
}

/// h_n = (1/n) sum_{k=1}^{n} (2 z1 z2)^k: exact coefficients 2^k/n on
/// the diagonal indices (k, k).
pub fn circle_peak(n: u32) -> Result<Polynomial<C64>> {
    if n == 0 {
        return Err(Error::TruncationTooSmall { truncation: 0, required: 1 });
    }
    if 2 * n as usize > crate::poly::DEGREE_CAP {
        return Err(Error::DegreeCapExceeded { cap: crate::poly::DEGREE_CAP });
    }
    let mut p = Polynomial::zero(2);
    for k in 1..=n {
        p.set(
            MultiIndex::new(vec![k, k]),
            C64::new(2f64.powi(k as i32) / n as f64, 0.0),
        );
    }
    Ok(p)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeakReport {
    pub value_on_target: (f64, f64),
    pub max_off_target: f64,
    /// 1 - max_off_target: positive when the strict inequality shows up
    /// on the sampled grid.
    pub margin: f64,
    pub mult_norm: NormEstimate,
    pub grid_size: usize,
    pub exclusion_radius: f64,
}

#[derive(Clone, Debug)]
pub struct PeakVerifyConfig {
    pub samples: SampleConfig,
    pub exclusion_radius: f64,
    pub norm_truncation: usize,
    pub tol: f64,
}

impl PeakVerifyConfig {
    pub fn new(dim: usize, count: usize, seed: u64) -> Self {
        PeakVerifyConfig {
            samples: SampleConfig::new(dim, count, seed),
            exclusion_radius: 0.05,
            norm_truncation: 8,
            tol: 1e-9,
        }
    }
}

/// Evaluate |p| on the sphere grid outside an exclusion cap around the
/// target, report the maximum and the multiplier-norm estimate.
pub fn peak_verify(
    p: &Polynomial<C64>,
    spec: &PeakSpec,
    cfg: &PeakVerifyConfig,
) -> Result<PeakReport> {
    use rayon::prelude::*;
    let pts = sphere_points(&cfg.samples);
    let kept: Vec<&Vec<C64>> =
        pts.iter().filter(|z| spec.distance(z) > cfg.exclusion_radius).collect();
    if kept.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let max_off = kept
        .par_iter()
        .map(|z| p.evaluate(z).map(|v| v.norm()).unwrap_or(0.0))
        .reduce(|| 0.0, f64::max);
    let value = p.evaluate(&spec.representative())?;
    let mult = multiplier_norm(p, p.degree() + cfg.norm_truncation, cfg.tol)?;
    Ok(PeakReport {
        value_on_target: (value.re, value.im),
        max_off_target: max_off,
        margin: 1.0 - max_off,
        mult_norm: mult,
        grid_size: kept.len(),
        exclusion_radius: cfg.exclusion_radius,
    })
}

/// Which convex combinations of the powers {f^k} to sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombinationFamily {
    /// h_n = f^n (the powers themselves; fastest decay toward ||g||_K).
    Powers,
    /// h_n = (1/n) sum_{k<=n} f^k.
    CesaroMeans,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupKRecord {
    pub n: usize,
    /// ||g h_n||_M at the working truncation: an upper-bound sequence
    /// for inf over the convex hull, converging toward ||g||_K.
    pub norm: f64,
}

/// Table of ||g h_n||_M for convex combinations h_n of the powers of the
/// peak base f.  The infimum over the full convex hull is ||g||_K; the
/// table is non-increasing (up to solver tolerance) and bounded below by
/// ||g||_K.
pub fn supnorm_on_k_powers(
    g: &Polynomial<C64>,
    f: &Polynomial<C64>,
    n_max: usize,
    family: CombinationFamily,
    margin: usize,
    tol: f64,
) -> Result<Vec<SupKRecord>> {
    let mut out = Vec::with_capacity(n_max);
    let mut fp = Polynomial::one(g.dim());
    let mut cesaro_sum = Polynomial::zero(g.dim());
    for n in 1..=n_max {
        fp = fp.mul(f)?;
        let h = match family {
            CombinationFamily::Powers => fp.clone(),
            CombinationFamily::CesaroMeans => {
                cesaro_sum = cesaro_sum.add(&fp)?;
                cesaro_sum.scale(&C64::new(1.0 / n as f64, 0.0))
            }
        };
        let gh = g.mul(&h)?;
        let t = crate::multop::mult_matrix(&gh, gh.degree() + margin)?;
        out.push(SupKRecord { n, norm: crate::multop::op_norm(&t, tol)? });
    }
    Ok(out)
}
