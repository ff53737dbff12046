//! Deterministic sampling of the unit sphere of C^d.
//!
//! For d = 2 the sphere is parametrized exactly as
//! (e^{i theta} cos t, e^{i phi} sin t) on a (theta, phi, t) grid with
//! golden-ratio offsets; for d >= 3 normalized complex Gaussian samples
//! with a fixed seed are used.  Both choices are reproducible: the same
//! configuration always yields the same points in the same order.

use crate::scalar::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub dim: usize,
    /// Approximate number of points requested.
    pub count: usize,
    pub seed: u64,
}

impl SampleConfig {
    pub fn new(dim: usize, count: usize, seed: u64) -> Self {
        SampleConfig { dim, count, seed }
    }
}

/// Deterministic sphere sample of roughly `count` points.
pub fn sphere_points(cfg: &SampleConfig) -> Vec<Vec<C64>> {
    match cfg.dim {
        0 => Vec::new(),
        1 => circle_points(cfg.count.max(1)),
        2 => torus_simplex_grid(cfg.count.max(1)),
        _ => gaussian_points(cfg),
    }
}

fn circle_points(count: usize) -> Vec<Vec<C64>> {
    (0..count)
        .map(|i| {
            let theta = std::f64::consts::TAU * (i as f64 / count as f64 + GOLDEN * i as f64).fract();
            vec![C64::new(theta.cos(), theta.sin())]
        })
        .collect()
}

/// d = 2 exact parametrization on a grid in (theta, phi, t).
fn torus_simplex_grid(count: usize) -> Vec<Vec<C64>> {
    // grid resolution: n_t moduli levels, n_a x n_a phase pairs per level
    let n_t = ((count as f64).cbrt().ceil() as usize).max(2);
    let n_a = n_t;
    let mut out = Vec::with_capacity(n_t * n_a * n_a);
    for k in 0..n_t {
        // t in (0, pi/2), offset to avoid the degenerate poles while the
        // golden shift still sweeps near them as k varies
        let t = std::f64::consts::FRAC_PI_2 * ((k as f64 + 0.5 + GOLDEN * k as f64).fract().abs())
            .clamp(1e-6, 1.0 - 1e-6);
        let (c, s) = (t.cos(), t.sin());
        for i in 0..n_a {
            let theta = std::f64::consts::TAU * (i as f64 / n_a as f64);
            for j in 0..n_a {
                let phi = std::f64::consts::TAU * (j as f64 / n_a as f64 + GOLDEN * k as f64).fract();
                out.push(vec![
                    C64::new(theta.cos() * c, theta.sin() * c),
                    C64::new(phi.cos() * s, phi.sin() * s),
                ]);
            }
        }
    }
    // always include the axis points and the balanced torus point
    out.push(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    out.push(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    out.push(vec![C64::new(r, 0.0), C64::new(r, 0.0)]);
    out
}

fn gaussian_points(cfg: &SampleConfig) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    while out.len() < cfg.count {
        if let Some(z) = gaussian_unit_vector(&mut rng, cfg.dim) {
            out.push(z);
        }
    }
    out
}

/// One normalized complex Gaussian vector; `None` for the measure-zero
/// event of a vanishing norm.
pub fn gaussian_unit_vector<R: Rng>(rng: &mut R, d: usize) -> Option<Vec<C64>> {
    let mut z: Vec<C64> = (0..d)
        .map(|_| C64::new(standard_normal(rng), standard_normal(rng)))
        .collect();
    let n: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if n < 1e-12 {
        return None;
    }
    for c in &mut z {
        *c /= n;
    }
    Some(z)
}

/// Box-Muller from two uniform draws; avoids pulling a distributions
/// crate for one primitive.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Deterministic local refinement of `objective` around a starting sphere
/// point: coordinate-wise pattern search over the chart parameters with a
/// shrinking step.  Returns the best point found and its objective value;
/// the result never falls below the starting value.
pub fn refine_on_sphere<F>(start: &[C64], objective: &F, steps: usize) -> (Vec<C64>, f64)
where
    F: Fn(&[C64]) -> f64,
{
    let d = start.len();
    // chart: 2d real parameters (re, im per coordinate), renormalized
    let mut params: Vec<f64> = start.iter().flat_map(|c| [c.re, c.im]).collect();
    let renorm = |p: &[f64]| -> Vec<C64> {
        let mut z: Vec<C64> = (0..d).map(|i| C64::new(p[2 * i], p[2 * i + 1])).collect();
        let n: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            for c in &mut z {
                *c /= n;
            }
        }
        z
    };
    let mut best = objective(&renorm(&params));
    let mut step = 0.1;
    for _ in 0..steps {
        let mut improved = false;
        for i in 0..params.len() {
            for sgn in [1.0, -1.0] {
                let mut trial = params.clone();
                trial[i] += sgn * step;
                let v = objective(&renorm(&trial));
                if v > best {
                    best = v;
                    params = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    (renorm(&params), best)
}
