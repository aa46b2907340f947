//! Bivariate polynomials (polynomial-in-z coefficients attached to powers
//! of w) and the Sylvester resultant eliminating w, computed by
//! evaluation at scaled roots of unity in z followed by inverse DFT.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::linalg::{determinant, CMatrix};
use super::poly::Polynomial;

/// Polynomial in two variables, stored as z-polynomials per power of w.
#[derive(Debug, Clone)]
pub struct BivariatePoly {
    /// w_coeffs[i] is the z-polynomial multiplying w^i.
    pub w_coeffs: Vec<Polynomial>,
}

impl BivariatePoly {
    pub fn new(w_coeffs: Vec<Polynomial>) -> Self {
        let mut b = Self { w_coeffs };
        while b.w_coeffs.len() > 1 && b.w_coeffs.last().unwrap().is_zero() {
            b.w_coeffs.pop();
        }
        if b.w_coeffs.is_empty() {
            b.w_coeffs.push(Polynomial::zero());
        }
        b
    }

    pub fn w_degree(&self) -> usize {
        self.w_coeffs.len() - 1
    }

    pub fn z_degree(&self) -> usize {
        self.w_coeffs.iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in self.w_coeffs.iter().rev() {
            acc = acc * w + p.eval(z);
        }
        acc
    }

    /// Partial derivative in w.
    pub fn d_dw(&self) -> BivariatePoly {
        if self.w_coeffs.len() == 1 {
            return BivariatePoly::new(vec![Polynomial::zero()]);
        }
        let coeffs = self
            .w_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, p)| p.scale(Complex64::new(i as f64, 0.0)))
            .collect();
        BivariatePoly::new(coeffs)
    }

    /// The univariate polynomial in w at fixed z.
    pub fn at_z(&self, z: Complex64) -> Polynomial {
        Polynomial::new(self.w_coeffs.iter().map(|p| p.eval(z)).collect())
    }
}

/// Result of a resultant computation.
#[derive(Debug, Clone)]
pub struct ResultantOutput {
    /// Resultant as a polynomial in z.
    pub poly: Polynomial,
    /// True when a leading w-coefficient was identically zero and the
    /// effective w-degree had to be lowered.
    pub degree_dropped: bool,
}

/// Sylvester resultant of `f` and `g`, eliminating w.
///
/// Vanishes exactly at the z where f(z, .) and g(z, .) share a w-root
/// (assuming nondegenerate leading coefficients; identically-zero leading
/// z-polynomials are trimmed first and reported).
pub fn resultant_in_w(f: &BivariatePoly, g: &BivariatePoly) -> Result<ResultantOutput> {
    let ftrim = BivariatePoly::new(f.w_coeffs.clone());
    let gtrim = BivariatePoly::new(g.w_coeffs.clone());
    let degree_dropped =
        ftrim.w_degree() != f.w_coeffs.len() - 1 || gtrim.w_degree() != g.w_coeffs.len() - 1;
    let m = ftrim.w_degree();
    let n = gtrim.w_degree();
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput(
            "resultant requires positive w-degree in both arguments".into(),
        ));
    }

    // Degree bound for the z-polynomial.
    let bound = m * gtrim.z_degree() + n * ftrim.z_degree();
    let samples = bound + 1;

    // Evaluation radius keyed to coefficient scale to keep the Vandermonde
    // (here: DFT) well conditioned.
    let scale = ftrim
        .w_coeffs
        .iter()
        .chain(gtrim.w_coeffs.iter())
        .flat_map(|p| p.coeffs().iter().map(|c| c.norm()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let rho = 1.0 + 0.25 * scale.ln().max(0.0);

    let mut values = Vec::with_capacity(samples);
    for j in 0..samples {
        let ang = 2.0 * PI * j as f64 / samples as f64;
        let z = Complex64::from_polar(rho, ang);
        values.push(sylvester_det(&ftrim, &gtrim, z));
    }

    // Inverse DFT, then undo the radius scaling.
    let mut coeffs = Vec::with_capacity(samples);
    for k in 0..samples {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let ang = -2.0 * PI * (j * k) as f64 / samples as f64;
            acc += v * Complex64::from_polar(1.0, ang);
        }
        acc /= samples as f64;
        acc /= Complex64::from_polar(rho.powi(k as i32), 0.0);
        coeffs.push(acc);
    }
    let mut poly = Polynomial::new(coeffs);
    poly.trim(1e-12);
    Ok(ResultantOutput {
        poly,
        degree_dropped,
    })
}

fn sylvester_det(f: &BivariatePoly, g: &BivariatePoly, z: Complex64) -> Complex64 {
    let fm = f.at_z(z);
    let gn = g.at_z(z);
    let m = f.w_degree();
    let n = g.w_degree();
    let size = m + n;
    let mut s: CMatrix = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    // Row i (i < n): coefficients of w^{m} ... w^{0} of f, shifted by i.
    let fc = |k: usize| -> Complex64 {
        if k < fm.coeffs().len() {
            fm.coeffs()[k]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let gc = |k: usize| -> Complex64 {
        if k < gn.coeffs().len() {
            gn.coeffs()[k]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    for i in 0..n {
        for k in 0..=m {
            s[i][i + k] = fc(m - k);
        }
    }
    for i in 0..m {
        for k in 0..=n {
            s[n + i][i + k] = gc(n - k);
        }
    }
    determinant(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::poly::poly_roots;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn double_root_at_origin() {
        // f = w^2 - z, g = 2w: resultant proportional to z.
        let f = BivariatePoly::new(vec![
            Polynomial::from_real(&[0.0, -1.0]),
            Polynomial::zero(),
            Polynomial::one(),
        ]);
        let g = BivariatePoly::new(vec![Polynomial::zero(), Polynomial::from_real(&[2.0])]);
        let r = resultant_in_w(&f, &g).unwrap();
        assert_eq!(r.poly.degree(), 1);
        assert!(r.poly.coeffs()[0].norm() < 1e-12);
    }

    #[test]
    fn root_collision_of_factored_quadratic() {
        // f = (w-1)(w-z) = w^2 - (1+z)w + z, g = df/dw = 2w - (1+z):
        // resultant vanishes exactly at z = 1.
        let f = BivariatePoly::new(vec![
            Polynomial::from_real(&[0.0, 1.0]),
            Polynomial::from_real(&[-1.0, -1.0]),
            Polynomial::one(),
        ]);
        let g = f.d_dw();
        let r = resultant_in_w(&f, &g).unwrap();
        // discriminant-type resultant: proportional to (1 - z)^2
        let roots = poly_roots(&r.poly).unwrap();
        assert_eq!(roots.len(), 2);
        for root in roots {
            assert!((root - c(1.0, 0.0)).norm() < 1e-6, "root {root}");
        }
    }

    #[test]
    fn grid_scan_oracle_on_random_quartic() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        // Random quartic in w with low-degree z coefficients, paired with
        // its w-derivative; collisions of w-roots found by resultant must
        // match a brute-force minimum-separation scan over a z grid.
        let rand_poly = |rng: &mut rand_chacha::ChaCha8Rng, d: usize| {
            Polynomial::new(
                (0..=d)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
        };
        let f = BivariatePoly::new(vec![
            rand_poly(&mut rng, 2),
            rand_poly(&mut rng, 1),
            rand_poly(&mut rng, 2),
            rand_poly(&mut rng, 1),
            Polynomial::one(),
        ]);
        let g = f.d_dw();
        let r = resultant_in_w(&f, &g).unwrap();
        let roots = poly_roots(&r.poly).unwrap();

        // Every resultant root must be an actual w-root collision.
        for &z in &roots {
            let wroots = poly_roots(&f.at_z(z)).unwrap();
            let mut min_sep = f64::INFINITY;
            for i in 0..wroots.len() {
                for j in i + 1..wroots.len() {
                    min_sep = min_sep.min((wroots[i] - wroots[j]).norm());
                }
            }
            assert!(min_sep < 1e-4, "no collision at resultant root {z}: {min_sep}");
        }

        // Brute-force scan: grid points where the minimum root separation
        // dips below a threshold must be near some resultant root.
        for i in 0..200 {
            let ang = 2.0 * PI * i as f64 / 200.0;
            let z = Complex64::from_polar(0.9, ang);
            let wroots = poly_roots(&f.at_z(z)).unwrap();
            let mut min_sep = f64::INFINITY;
            for a in 0..wroots.len() {
                for b in a + 1..wroots.len() {
                    min_sep = min_sep.min((wroots[a] - wroots[b]).norm());
                }
            }
            if min_sep < 1e-6 {
                let near = roots.iter().any(|r| (r - z).norm() < 1e-3);
                assert!(near, "scan found unreported collision at {z}");
            }
        }
    }
}
