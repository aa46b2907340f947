//! Quadrature kernels.
//!
//! Real interval integrals with inverse-square-root endpoint singularities
//! are handled by the cosine substitution x = m + h cos(t), which turns the
//! weight ((x-a)(b-x))^{-1/2} into a constant.  Complex path legs use an
//! adaptive Gauss-Legendre pair.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Controls for the adaptive quadratures.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Initial node count for the doubling scheme.
    pub node_count: usize,
    /// Maximum number of refinement rounds.
    pub refinement_limit: usize,
    /// Absolute tolerance.
    pub abs_tol: f64,
}

impl QuadratureConfig {
    pub fn new(node_count: usize, refinement_limit: usize, abs_tol: f64) -> Result<Self> {
        if node_count < 8 {
            return Err(Error::InvalidInput(format!(
                "quadrature node_count must be >= 8, got {node_count}"
            )));
        }
        if abs_tol <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "quadrature abs_tol must be positive, got {abs_tol}"
            )));
        }
        if refinement_limit == 0 {
            return Err(Error::InvalidInput(
                "quadrature refinement_limit must be positive".into(),
            ));
        }
        Ok(Self {
            node_count,
            refinement_limit,
            abs_tol,
        })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            node_count: 32,
            refinement_limit: 12,
            abs_tol: 1e-11,
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(compute_gauss_legendre(n))))
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl_sum_real(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integrate `f` over `[a, b]` where `f` may have singularities up to
/// ((x-a)(b-x))^{-1/2} at the endpoints.
///
/// The substitution x = m + h cos t absorbs the endpoint weight; the
/// transformed integrand is evaluated at interior Gauss-Legendre nodes with
/// node doubling until two successive estimates agree to `cfg.abs_tol`.
pub fn integrate_cheb<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(Error::InvalidInput(format!(
            "integration interval must satisfy a < b, got [{a}, {b}]"
        )));
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // g(t) = f(x(t)) * h * sin t on [0, pi]; regular when f has at worst
    // inverse-sqrt endpoint blowup.
    let mut g = |t: f64| {
        let s = t.sin();
        let x = (mid + half * t.cos()).clamp(a, b);
        f(x) * half * s
    };
    let mut n = cfg.node_count.max(8);
    let mut prev = gl_sum_real(&mut g, 0.0, PI, n);
    for _ in 0..cfg.refinement_limit {
        n *= 2;
        let cur = gl_sum_real(&mut g, 0.0, PI, n);
        let err = (cur - prev).abs();
        if err <= cfg.abs_tol {
            return Ok(cur);
        }
        prev = cur;
    }
    let cur = gl_sum_real(&mut g, 0.0, PI, 2 * n);
    let err = (cur - prev).abs();
    if err <= cfg.abs_tol {
        return Ok(cur);
    }
    Err(Error::QuadratureNonConvergence {
        estimate: cur,
        error_estimate: err,
        tol: cfg.abs_tol,
    })
}

/// Adaptive integral of a smooth real integrand on [a, b] (no endpoint
/// singularities): Gauss-Legendre pair with bisection.  The per-interval
/// tolerance halves with each split but never below a machine-noise floor
/// tied to the local estimate, so the recursion always terminates.
pub fn integrate_smooth<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
        depth: usize,
        whole: f64,
    ) -> Result<f64> {
        let mut fa = |x| f(x);
        let refined = gl_sum_real(&mut fa, a, b, 21);
        let noise = 1e-15 * (1.0 + refined.abs());
        if (refined - whole).abs() <= tol.max(noise) || depth >= 28 {
            if depth >= 28 && (refined - whole).abs() > (100.0 * tol).max(1e-8) {
                return Err(Error::QuadratureNonConvergence {
                    estimate: refined,
                    error_estimate: (refined - whole).abs(),
                    tol,
                });
            }
            return Ok(refined);
        }
        let m = 0.5 * (a + b);
        let mut fb = |x| f(x);
        let left = gl_sum_real(&mut fb, a, m, 21);
        let mut fc = |x| f(x);
        let right = gl_sum_real(&mut fc, m, b, 21);
        Ok(recurse(f, a, m, 0.5 * tol, depth + 1, left)?
            + recurse(f, m, b, 0.5 * tol, depth + 1, right)?)
    }
    let mut fa = |x| f(x);
    let first = gl_sum_real(&mut fa, a, b, 10);
    recurse(&f, a, b, tol, 0, first)
}

fn gl_sum_complex(
    f: &dyn Fn(Complex64) -> Complex64,
    a: Complex64,
    b: Complex64,
    n: usize,
) -> Complex64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Adaptive integral of a holomorphic integrand along the straight segment
/// from `a` to `b`.
pub fn integrate_complex_leg<F>(f: F, a: Complex64, b: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    fn recurse(
        f: &dyn Fn(Complex64) -> Complex64,
        a: Complex64,
        b: Complex64,
        tol: f64,
        depth: usize,
        whole: Complex64,
    ) -> Result<Complex64> {
        let refined = gl_sum_complex(f, a, b, 21);
        let noise = 1e-15 * (1.0 + refined.norm());
        if (refined - whole).norm() <= tol.max(noise) || depth >= 30 {
            if depth >= 30 && (refined - whole).norm() > (100.0 * tol).max(1e-8) {
                return Err(Error::QuadratureNonConvergence {
                    estimate: refined.norm(),
                    error_estimate: (refined - whole).norm(),
                    tol,
                });
            }
            return Ok(refined);
        }
        let m = (a + b) * 0.5;
        let left = gl_sum_complex(f, a, m, 21);
        let right = gl_sum_complex(f, m, b, 21);
        Ok(recurse(f, a, m, 0.5 * tol, depth + 1, left)?
            + recurse(f, m, b, 0.5 * tol, depth + 1, right)?)
    }
    let first = gl_sum_complex(&f, a, b, 10);
    recurse(&f, a, b, tol, 0, first)
}
