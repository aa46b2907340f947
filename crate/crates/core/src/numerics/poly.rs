//! Dense univariate polynomials over the complex numbers and root finding
//! via the companion matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::linalg::hessenberg_eigenvalues;

/// Polynomial with coefficients in ascending degree order.
/// The representation is kept trimmed: the leading stored coefficient is
/// nonzero (except for the zero polynomial, stored as `[0]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim(0.0);
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].norm() == 0.0
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    /// Drop trailing coefficients with modulus <= tol * max|c|.
    pub fn trim(&mut self, tol: f64) {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let cut = tol * scale;
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().norm() <= cut {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex64::new(0.0, 0.0));
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            c[i] += a;
        }
        for (i, &b) in other.coeffs.iter().enumerate() {
            c[i] += b;
        }
        Polynomial::new(c)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }

    /// True when every coefficient is real within `tol` of the coefficient scale.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    /// Coefficient-wise conjugate-reflection: q(z) = conj(p(conj z)).
    pub fn conj_reflect(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }
}

/// All complex roots of `p`, with multiplicity, via the companion matrix
/// followed by one Newton polish per root.  Roots are sorted by real part,
/// then imaginary part, for determinism.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Err(Error::InvalidInput(
            "cannot take roots of the zero polynomial".into(),
        ));
    }
    if p.degree() == 0 {
        return Err(Error::InvalidInput(
            "cannot take roots of a constant polynomial".into(),
        ));
    }
    let mut q = p.clone();
    q.trim(1e-14);
    let n = q.degree();
    if n == 0 {
        return Err(Error::Degenerate(
            "polynomial degenerates to a constant after trimming".into(),
        ));
    }
    let lead = q.leading();
    if n == 1 {
        return Ok(vec![-q.coeffs()[0] / lead]);
    }

    // Companion matrix of the monic normalization, lower-Hessenberg-free
    // standard form: ones on the subdiagonal, -c_i/c_n in the last column.
    let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 1..n {
        h[i][i - 1] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        h[i][n - 1] = -q.coeffs()[i] / lead;
    }
    let mut roots = hessenberg_eigenvalues(h)?;

    // One or two Newton steps against the original polynomial.
    let dp = p.derivative();
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let f = p.eval(*r);
            let d = dp.eval(*r);
            if d.norm() < 1e-300 {
                break;
            }
            let step = f / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            // Guard against a polish step jumping to a different root.
            if step.norm() < 0.5 * (1.0 + r.norm()) {
                *r -= step;
            }
        }
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(roots)
}
