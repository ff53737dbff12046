//! Concrete functionals on the polynomial multiplier algebra: vector
//! functionals [xi eta*] acting as p -> <M_p xi, eta>, and atomic
//! measures acting as p -> sum lambda_i p(zeta_i).
//!
//! The Henkin/singular dichotomy is not decidable from finite data, so
//! this module only ever emits certificates: peaking tables showing a
//! functional attains its norm on every power of the coordinate ideal,
//! and decay tables showing evaluations along the same witness family
//! tend to zero.  The extremal machinery realizes the isometry subspace
//! N = ker(I - M_f* M_f) on a truncation and the weak-* exposed
//! functionals [xi (f xi)*] built from it.

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::multiindex::MultiIndex;
use crate::multop::{mult_matrix, multiplier_norm, op_norm, sup_norm};
use crate::peak::{peak_polynomial, rotation_pullback, unitary_for_target, PeakSpec};
use crate::poly::{Polynomial, DEGREE_CAP};
use crate::scalar::{rational_to_f64, C64};
use crate::sphere::SampleConfig;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// A semantic representation of a functional on the multiplier algebra.
#[derive(Clone, Debug)]
pub enum Functional {
    /// p -> <M_p xi, eta>
    VectorPair { xi: FockVector<C64>, eta: FockVector<C64> },
    /// p -> sum_i lambda_i p(zeta_i) with unit atoms zeta_i
    AtomicMeasure { atoms: Vec<(C64, Vec<C64>)> },
}

impl Functional {
    pub fn vector_pair(xi: FockVector<C64>, eta: FockVector<C64>) -> Result<Self> {
        if xi.dim() != eta.dim() {
            return Err(Error::DimensionMismatch { left: xi.dim(), right: eta.dim() });
        }
        Ok(Functional::VectorPair { xi, eta })
    }

    pub fn atomic(atoms: Vec<(C64, Vec<C64>)>) -> Result<Self> {
        for (_, zeta) in &atoms {
            let norm_sq: f64 = zeta.iter().map(|c| c.norm_sqr()).sum();
            if (norm_sq - 1.0).abs() > 1e-12 {
                return Err(Error::NotUnitVector { norm_sq });
            }
        }
        Ok(Functional::AtomicMeasure { atoms })
    }

    pub fn dim(&self) -> usize {
        match self {
            Functional::VectorPair { xi, .. } => xi.dim(),
            Functional::AtomicMeasure { atoms } => {
                atoms.first().map(|(_, z)| z.len()).unwrap_or(0)
            }
        }
    }
}

/// Exact pairing of a functional with a polynomial symbol.
///
/// For vector pairs the product p*xi must stay within eta's declared
/// truncation; anything else would silently treat unknown coefficients
/// of eta as zero, so it fails instead.
pub fn eval_functional(phi: &Functional, p: &Polynomial<C64>) -> Result<C64> {
    match phi {
        Functional::VectorPair { xi, eta } => {
            if p.dim() != xi.dim() {
                return Err(Error::DimensionMismatch { left: p.dim(), right: xi.dim() });
            }
            let needed = p.degree() + xi.degree();
            if needed > eta.degree_bound() {
                return Err(Error::TruncationOverflow {
                    needed,
                    bound: eta.degree_bound(),
                });
            }
            // expand p * xi and pair
            let mut prod = FockVector::zero(xi.dim(), needed.max(xi.degree_bound()));
            for (alpha, c) in p.terms() {
                for (beta, v) in xi.terms() {
                    let key = alpha.add(beta);
                    let cur = prod.coeff(&key);
                    prod.set(key, cur + c * v);
                }
            }
            prod.inner_product(eta)
        }
        Functional::AtomicMeasure { atoms } => {
            let mut acc = C64::new(0.0, 0.0);
            for (lambda, zeta) in atoms {
                if p.dim() != zeta.len() {
                    return Err(Error::DimensionMismatch { left: p.dim(), right: zeta.len() });
                }
                acc += lambda * p.evaluate(zeta)?;
            }
            Ok(acc)
        }
    }
}

/// Certified two-sided bounds on the functional norm.
///
/// The upper bound is ||xi|| ||eta|| (or the total atomic mass); the
/// lower bound is the best |Phi(p)| over a candidate family scaled by a
/// certified upper bound of each candidate's multiplier norm: monomials
/// (norm exactly ||z^alpha||), truncated peak series at the atoms (norm
/// at most 1 - 2^{-M}), and balanced-circle means scaled by the triangle
/// inequality.
pub fn functional_norm_bounds(phi: &Functional) -> Result<(f64, f64)> {
    let upper = match phi {
        Functional::VectorPair { xi, eta } => xi.norm() * eta.norm(),
        Functional::AtomicMeasure { atoms } => atoms.iter().map(|(l, _)| l.norm()).sum(),
    };
    let d = phi.dim();
    if d == 0 || upper == 0.0 {
        return Ok((0.0, upper));
    }

    let mut candidates: Vec<(Polynomial<C64>, f64)> = Vec::new();
    // normalized monomials: || z^alpha ||_M = || z^alpha ||_{H^2} exactly
    for alpha in crate::multiindex::enum_up_to(d, 4)? {
        let cert = rational_to_f64(&alpha.norm_sq()).sqrt();
        let p = Polynomial::monomial(d, alpha, C64::new(1.0, 0.0))?;
        candidates.push((p, cert));
    }
    // axis-aligned high powers pick up point masses on the sphere
    for k in 0..d {
        for n in [8u32, 20] {
            let p = Polynomial::coordinate(d, k).pow(n as usize)?;
            candidates.push((p, 1.0));
        }
    }
    match phi {
        Functional::AtomicMeasure { atoms } => {
            for (_, zeta) in atoms {
                if let Ok(spec) = PeakSpec::point(zeta.clone(), 20) {
                    if let Ok(pf) = peak_polynomial(&spec) {
                        candidates.push((pf.poly, 1.0 - spec.tail_bound()));
                    }
                }
                // rotated monomial aligned with the atom
                let u = unitary_for_target(zeta)?;
                let zn = Polynomial::coordinate(d, 0).pow(12)?;
                candidates.push((rotation_pullback(&u, &zn)?, 1.0));
            }
        }
        Functional::VectorPair { .. } => {
            if d == 2 {
                for n in [1u32, 2, 4] {
                    let h = crate::peak::circle_peak(n)?;
                    // triangle-inequality certificate: sum of chain-top weights
                    let cert: f64 = (1..=n)
                        .map(|k| rational_to_f64(&crate::shift::alpha_weight_sq(k, 0)).sqrt())
                        .sum::<f64>()
                        / n as f64;
                    candidates.push((h, cert));
                }
            }
        }
    }

    let mut lower = 0.0f64;
    for (p, cert) in &candidates {
        if *cert <= 0.0 {
            continue;
        }
        if let Ok(v) = eval_functional(phi, p) {
            lower = lower.max(v.norm() / cert);
        }
    }
    Ok((lower, upper))
}

/// One row of a singularity certificate: the witness f_n, its multiplier
/// norm, and the modulus of the functional on it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessRow {
    pub n: usize,
    pub mult_norm: f64,
    pub value: f64,
}

/// Desk-scale singularity certificate for a single-atom measure: the
/// rotated monomials f_n = <z, zeta>^n lie in the n-th power of the
/// coordinate ideal, have multiplier norm 1, and satisfy
/// |Phi(f_n)| = |lambda| for every n.
pub fn singular_witness(
    phi: &Functional,
    n_max: usize,
    norm_truncation: usize,
    tol: f64,
) -> Result<Vec<WitnessRow>> {
    let atoms = match phi {
        Functional::AtomicMeasure { atoms } => atoms,
        Functional::VectorPair { .. } => return Err(Error::MultiAtom(0)),
    };
    if atoms.len() != 1 {
        return Err(Error::MultiAtom(atoms.len()));
    }
    let (_, zeta) = &atoms[0];
    let d = zeta.len();
    let u = unitary_for_target(zeta)?;
    let z1 = Polynomial::coordinate(d, 0);
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max.min(DEGREE_CAP) {
        let fn_poly = rotation_pullback(&u, &z1.pow(n)?)?;
        let t = mult_matrix(&fn_poly, norm_truncation)?;
        let norm = op_norm(&t, tol)?;
        let value = eval_functional(phi, &fn_poly)?;
        rows.push(WitnessRow { n, mult_norm: norm, value: value.norm() });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// max |value| over n > n_max / 2
    pub tail_max: f64,
}

/// Henkin-decay certificate for a vector functional: evaluate on the
/// rotated monomial family aligned with `direction` and report the tail.
pub fn henkin_decay(
    phi: &Functional,
    direction: &[C64],
    n_max: usize,
) -> Result<DecayTable> {
    if !matches!(phi, Functional::VectorPair { .. }) {
        return Err(Error::MultiAtom(1));
    }
    let d = direction.len();
    let u = unitary_for_target(direction)?;
    let z1 = Polynomial::coordinate(d, 0);
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max.min(DEGREE_CAP) {
        let fn_poly = rotation_pullback(&u, &z1.pow(n)?)?;
        let v = eval_functional(phi, &fn_poly)?;
        rows.push(DecayRow { n, re: v.re, im: v.im });
    }
    let tail_max = rows
        .iter()
        .filter(|r| r.n > n_max / 2)
        .map(|r| C64::new(r.re, r.im).norm())
        .fold(0.0, f64::max);
    Ok(DecayTable { rows, tail_max })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremalStatus {
    /// Top eigenvalue sits at 1 and the sup norm is strictly below 1.
    Conclusive,
    /// ||f||_inf is not strictly below 1; the finite-dimensionality
    /// guarantee for N fails (degenerate case, e.g. a coordinate).
    SupNormNotStrict,
    /// No eigenvalue near 1 at this truncation.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ExtremalResult {
    pub truncation: usize,
    pub top_eigenvalue: f64,
    /// Gap from the top eigenvalue to the first eigenvalue below the
    /// dim-N threshold.
    pub spectral_gap: f64,
    pub eigenvectors: Vec<FockVector<C64>>,
    pub dim_estimate: usize,
    pub status: ExtremalStatus,
    pub mult_norm_deviation: f64,
    pub sup_norm_estimate: f64,
}

/// Eigen-decomposition of the truncated M_f* M_f.
///
/// Eigenvalues within 10*tol of the top are counted into the estimate of
/// dim N = dim ker(I - M_f* M_f); the count is a heuristic in exactly
/// the way any finite truncation of a Fredholm kernel is.
pub fn extremal_subspace(f: &Polynomial<C64>, n: usize, tol: f64) -> Result<ExtremalResult> {
    let est = multiplier_norm(f, n, tol)?;
    let mult_norm_deviation = (est.value - 1.0).abs();
    let sup = sup_norm(f, &SampleConfig::new(f.dim(), 20_000, 1));

    let t = mult_matrix(f, n)?;
    let dense = t.to_dense();
    let gram = dense.adjoint() * &dense;
    let eig = gram.symmetric_eigen();
    // order eigenpairs by eigenvalue, descending, deterministically
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let top = eig.eigenvalues[order[0]];
    let threshold = 1.0 - 10.0 * tol;
    let dim_estimate = order.iter().filter(|&&i| eig.eigenvalues[i] > threshold).count();
    let next_below = order
        .iter()
        .map(|&i| eig.eigenvalues[i])
        .find(|&l| l <= threshold)
        .unwrap_or(top);
    let spectral_gap = top - next_below;

    let status = if (top - 1.0).abs() > 10.0 * tol {
        ExtremalStatus::Inconclusive
    } else if sup >= 1.0 - 1e-6 {
        ExtremalStatus::SupNormNotStrict
    } else {
        ExtremalStatus::Conclusive
    };

    let basis = crate::multiindex::enum_up_to(f.dim(), n)?;
    let mut eigenvectors = Vec::new();
    for &i in order.iter().take(dim_estimate.max(1)).take(8) {
        let col = eig.eigenvectors.column(i);
        let mut v = FockVector::zero(f.dim(), n);
        // fix the phase: first coefficient of largest modulus made real positive
        let mut phase = C64::new(1.0, 0.0);
        let mut best = 0.0;
        for j in 0..basis.len() {
            let c = col[j];
            if c.norm() > best + 1e-12 {
                best = c.norm();
                phase = c / c.norm();
            }
        }
        for (j, alpha) in basis.iter().enumerate() {
            let c = col[j] * phase.conj();
            if c.norm() > 1e-13 {
                v.set(alpha.clone(), c);
            }
        }
        eigenvectors.push(v);
    }

    Ok(ExtremalResult {
        truncation: n,
        top_eigenvalue: top,
        spectral_gap,
        eigenvectors,
        dim_estimate,
        status,
        mult_norm_deviation,
        sup_norm_estimate: sup,
    })
}

/// The weak-* exposed functional [xi (f xi)*] attached to a unit vector
/// xi on which M_f acts isometrically.
pub fn exposed_functional(f: &Polynomial<C64>, xi: &FockVector<C64>) -> Result<Functional> {
    if f.dim() != xi.dim() {
        return Err(Error::DimensionMismatch { left: f.dim(), right: xi.dim() });
    }
    let norm = xi.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotUnitVector { norm_sq: norm * norm });
    }
    // eta = f * xi, exact through xi's own exactness range shifted by deg f;
    // widen the bound so that evaluations up to deg f remain legal
    let bound = xi.degree() + 2 * f.degree().max(1) + DEGREE_CAP / 2;
    let mut eta = FockVector::zero(xi.dim(), bound);
    for (alpha, c) in f.terms() {
        for (beta, v) in xi.terms() {
            let key = alpha.add(beta);
            let cur = eta.coeff(&key);
            eta.set(key, cur + c * v);
        }
    }
    Functional::vector_pair(xi.clone(), eta)
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionalJson {
    Vector { xi: VecJson, eta: VecJson },
    Atomic { atoms: Vec<AtomJson> },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VecJson {
    pub d: usize,
    /// exactness bound; defaults to the degree cap when absent
    #[serde(default)]
    pub n: Option<usize>,
    pub terms: Vec<crate::poly::PolyTermJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AtomJson {
    pub lambda: [f64; 2],
    pub zeta: Vec<[f64; 2]>,
}

impl Functional {
    pub fn to_json(&self) -> FunctionalJson {
        match self {
            Functional::VectorPair { xi, eta } => FunctionalJson::Vector {
                xi: fock_to_json(xi),
                eta: fock_to_json(eta),
            },
            Functional::AtomicMeasure { atoms } => FunctionalJson::Atomic {
                atoms: atoms
                    .iter()
                    .map(|(l, z)| AtomJson {
                        lambda: [l.re, l.im],
                        zeta: z.iter().map(|c| [c.re, c.im]).collect(),
                    })
                    .collect(),
            },
        }
    }

    pub fn from_json(j: &FunctionalJson) -> Result<Self> {
        match j {
            FunctionalJson::Vector { xi, eta } => {
                Functional::vector_pair(fock_from_json(xi)?, fock_from_json(eta)?)
            }
            FunctionalJson::Atomic { atoms } => Functional::atomic(
                atoms
                    .iter()
                    .map(|a| {
                        (
                            C64::new(a.lambda[0], a.lambda[1]),
                            a.zeta.iter().map(|c| C64::new(c[0], c[1])).collect(),
                        )
                    })
                    .collect(),
            ),
        }
    }
}

fn fock_to_json(v: &FockVector<C64>) -> VecJson {
    VecJson {
        d: v.dim(),
        n: Some(v.degree_bound()),
        terms: v
            .terms()
            .map(|(a, c)| crate::poly::PolyTermJson { alpha: a.0.clone(), re: c.re, im: c.im })
            .collect(),
    }
}

fn fock_from_json(j: &VecJson) -> Result<FockVector<C64>> {
    let bound = j.n.unwrap_or(DEGREE_CAP);
    FockVector::from_terms(
        j.d,
        bound,
        j.terms
            .iter()
            .map(|t| (MultiIndex::new(t.alpha.clone()), C64::new(t.re, t.im))),
    )
}

/// Deterministic complex unitary from a seeded Gaussian QR, for the
/// rotation-invariance experiments.
pub fn random_unitary(d: usize, seed: u64) -> DMatrix<C64> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut g = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let z = crate::sphere::gaussian_unit_vector(&mut rng, 1).unwrap();
            g[(i, j)] = z[0] * C64::new(1.0 + i as f64 * 0.1 + j as f64 * 0.01, 0.0);
        }
    }
    let qr = g.qr();
    qr.q()
}
