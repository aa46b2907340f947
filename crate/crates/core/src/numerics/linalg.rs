//! Dense complex linear algebra for small matrices: LU solves and
//! determinants, shifted QR on Hessenberg matrices, and a Hermitian
//! eigensolver (Householder tridiagonalization + implicit QL).

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = Vec<Vec<Complex64>>;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// LU factorization with partial pivoting; returns (LU, perm, sign swaps).
fn lu_factor(mut a: CMatrix) -> Result<(CMatrix, Vec<usize>, usize)> {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for k in 0..n {
        let (piv, mag) = (k..n)
            .map(|i| (i, a[i][k].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if mag == 0.0 {
            return Err(Error::Numerical("singular matrix in LU".into()));
        }
        if piv != k {
            a.swap(piv, k);
            perm.swap(piv, k);
            swaps += 1;
        }
        let pivot = a[k][k];
        for i in k + 1..n {
            let m = a[i][k] / pivot;
            a[i][k] = m;
            for j in k + 1..n {
                let s = a[k][j];
                a[i][j] -= m * s;
            }
        }
    }
    Ok((a, perm, swaps))
}

/// Solve A x = b for square complex A.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let (lu, perm, _) = lu_factor(a.clone())?;
    let mut x: Vec<Complex64> = perm.iter().map(|&p| b[p]).collect();
    for i in 1..n {
        for j in 0..i {
            let m = lu[i][j] * x[j];
            x[i] -= m;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let m = lu[i][j] * x[j];
            x[i] -= m;
        }
        x[i] /= lu[i][i];
    }
    Ok(x)
}

/// Solve a real system via the complex kernel.
pub fn solve_real(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let ac: CMatrix = a
        .iter()
        .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    let bc: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(solve(&ac, &bc)?.into_iter().map(|z| z.re).collect())
}

/// Determinant via LU.
pub fn determinant(a: &CMatrix) -> Complex64 {
    let n = a.len();
    match lu_factor(a.clone()) {
        Ok((lu, _, swaps)) => {
            let mut det = if swaps % 2 == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            };
            for i in 0..n {
                det *= lu[i][i];
            }
            det
        }
        Err(_) => czero(),
    }
}

/// Eigenvalues of a complex upper-Hessenberg matrix by the shifted QR
/// iteration with Givens rotations.
pub fn hessenberg_eigenvalues(mut h: CMatrix) -> Result<Vec<Complex64>> {
    let n = h.len();
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let mut iter_since_deflation = 0usize;
    let max_total = 60 * n.max(1);
    let mut total = 0usize;

    let norm_scale = {
        let mut s = 0.0f64;
        for row in &h {
            for v in row {
                s = s.max(v.norm());
            }
        }
        s.max(1e-300)
    };

    while hi > 0 {
        if hi == 1 {
            eigs.push(h[0][0]);
            hi = 0;
            continue;
        }
        // Deflate small subdiagonals.
        let mut deflated = false;
        for i in (1..hi).rev() {
            let tol = 1e-15 * (h[i - 1][i - 1].norm() + h[i][i].norm()).max(norm_scale * 1e-15);
            if h[i][i - 1].norm() <= tol {
                if i == hi - 1 {
                    eigs.push(h[hi - 1][hi - 1]);
                    hi -= 1;
                    iter_since_deflation = 0;
                    deflated = true;
                    break;
                }
            }
        }
        if deflated {
            continue;
        }
        total += 1;
        iter_since_deflation += 1;
        if total > max_total {
            return Err(Error::Numerical(
                "QR iteration failed to converge".into(),
            ));
        }

        // Find the lowest l such that h[l..hi] is unreduced.
        let mut lo = 0;
        for i in (1..hi).rev() {
            let tol = 1e-15 * (h[i - 1][i - 1].norm() + h[i][i].norm()).max(norm_scale * 1e-15);
            if h[i][i - 1].norm() <= tol {
                lo = i;
                break;
            }
        }

        // Wilkinson-style shift from the trailing 2x2 of the active block.
        let a = h[hi - 2][hi - 2];
        let b = h[hi - 2][hi - 1];
        let c = h[hi - 1][hi - 2];
        let d = h[hi - 1][hi - 1];
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr - det * 4.0).sqrt();
        let mu1 = (tr + disc) * 0.5;
        let mu2 = (tr - disc) * 0.5;
        let mut mu = if (mu1 - d).norm() < (mu2 - d).norm() {
            mu1
        } else {
            mu2
        };
        if iter_since_deflation % 12 == 0 {
            // Occasional exceptional shift to break cycles.
            mu = d + Complex64::new(1.5 * h[hi - 1][hi - 2].norm(), 0.0);
        }

        // QR step on h[lo..hi] via Givens rotations.
        let m = hi - lo;
        let mut g: Vec<(Complex64, Complex64)> = Vec::with_capacity(m - 1);
        for i in lo..hi {
            h[i][i] -= mu;
        }
        for i in lo..hi - 1 {
            let x = h[i][i];
            let y = h[i + 1][i];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), czero())
            } else {
                (x.conj() / r, y.conj() / r)
            };
            g.push((cs, sn));
            for j in i..hi {
                let hi_j = h[i][j];
                let hip_j = h[i + 1][j];
                h[i][j] = cs * hi_j + sn * hip_j;
                h[i + 1][j] = -sn.conj() * hi_j + cs.conj() * hip_j;
            }
        }
        for (idx, (cs, sn)) in g.iter().enumerate() {
            let i = lo + idx;
            let upper = (i + 2).min(hi - 1);
            for r in lo..=upper {
                let h_ri = h[r][i];
                let h_rip = h[r][i + 1];
                h[r][i] = h_ri * cs.conj() + h_rip * sn.conj();
                h[r][i + 1] = -h_ri * *sn + h_rip * *cs;
            }
        }
        for i in lo..hi {
            h[i][i] += mu;
        }
    }
    Ok(eigs)
}

/// Hermitian check; returns the offending entry on failure.
pub fn check_hermitian(m: &CMatrix, rel_tol: f64) -> Result<()> {
    check_hermitian_with_floor(m, rel_tol, 0.0)
}

/// Hermitian check with an external scale floor, for matrices that may be
/// close to zero while belonging to a family of unit scale.
pub fn check_hermitian_with_floor(m: &CMatrix, rel_tol: f64, scale_floor: f64) -> Result<()> {
    let n = m.len();
    let mut scale = scale_floor;
    for row in m {
        if row.len() != n {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        for v in row {
            scale = scale.max(v.norm());
        }
    }
    let scale = scale.max(1e-300);
    for i in 0..n {
        for j in i..n {
            let dev = (m[i][j] - m[j][i].conj()).norm();
            if dev > rel_tol * scale {
                return Err(Error::NotHermitian {
                    row: i,
                    col: j,
                    deviation: dev / scale,
                });
            }
        }
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Householder reduction to a real symmetric tridiagonal matrix followed by
/// the implicit-shift QL iteration.  Intended for dimensions up to ~64.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m, 1e-12)?;
    let (diag, off) = hermitian_tridiagonalize(m);
    let mut d = diag;
    let mut e = off;
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Reduce Hermitian `m` to real symmetric tridiagonal form; returns
/// (diagonal, subdiagonal) with the subdiagonal phases rotated away.
fn hermitian_tridiagonalize(m: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.len();
    let mut a = m.clone();
    let mut sub = vec![czero(); n.saturating_sub(1)];
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the diagonal.
        let mut xnorm2 = 0.0;
        for i in k + 1..n {
            xnorm2 += a[i][k].norm_sqr();
        }
        if xnorm2 == 0.0 {
            sub[k] = czero();
            continue;
        }
        let x0 = a[k + 1][k];
        let alpha = if x0.norm() == 0.0 {
            Complex64::new(-(xnorm2.sqrt()), 0.0)
        } else {
            -x0 / x0.norm() * xnorm2.sqrt()
        };
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 < 1e-300 {
            sub[k] = alpha;
            continue;
        }
        // Apply H = I - 2 v v*/|v|^2 on both sides of the trailing block.
        let msize = n - (k + 1);
        // w = A v
        let mut w = vec![czero(); msize];
        for i in 0..msize {
            let mut acc = czero();
            for j in 0..msize {
                acc += a[k + 1 + i][k + 1 + j] * v[j];
            }
            w[i] = acc * (2.0 / vnorm2);
        }
        // K = v* w / |v|^2 correction
        let mut vw = czero();
        for i in 0..msize {
            vw += v[i].conj() * w[i];
        }
        let kcorr = vw / vnorm2;
        for i in 0..msize {
            let wi = w[i] - kcorr * v[i];
            for j in 0..msize {
                let upd = wi * v[j].conj() + v[i] * (w[j] - kcorr * v[j]).conj();
                a[k + 1 + i][k + 1 + j] -= upd;
            }
        }
        for i in k + 1..n {
            a[i][k] = czero();
            a[k][i] = czero();
        }
        a[k + 1][k] = alpha;
        a[k][k + 1] = alpha.conj();
        sub[k] = alpha;
    }
    if n >= 2 {
        sub[n - 2] = a[n - 1][n - 2];
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    let off: Vec<f64> = sub.iter().map(|z| z.norm()).collect();
    (diag, off)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix (values only).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let mut e = {
        let mut v = e.to_vec();
        v.push(0.0);
        v
    };
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= 1e-16 * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Numerical("QL iteration failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sgn = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sgn);
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = 0.0;
                let _ = f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// One eigenvector of a Hermitian matrix for a given eigenvalue, by inverse
/// iteration; returns a unit vector.
pub fn hermitian_eigenvector(m: &CMatrix, lambda: f64) -> Result<Vec<Complex64>> {
    let n = m.len();
    let mut scale = 0.0f64;
    for row in m {
        for v in row {
            scale = scale.max(v.norm());
        }
    }
    let shift = lambda + 1e-11 * scale.max(1.0);
    let mut a = m.clone();
    for i in 0..n {
        a[i][i] -= Complex64::new(shift, 0.0);
    }
    // Deterministic pseudo-random start.
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.7390851332151607;
            Complex64::new(t.sin(), t.cos())
        })
        .collect();
    for _ in 0..3 {
        let w = solve(&a, &v)?;
        let nrm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::Numerical("inverse iteration broke down".into()));
        }
        v = w.into_iter().map(|z| z / nrm).collect();
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::poly::{poly_roots, Polynomial};
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_sorted() {
        let m = vec![
            vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        ];
        let e = hermitian_eigenvalues(&m).unwrap();
        assert_eq!(e.len(), 3);
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_x() {
        let m = vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ];
        let e = hermitian_eigenvalues(&m).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_names_entry() {
        let m = vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ];
        match hermitian_eigenvalues(&m) {
            Err(Error::NotHermitian { row, col, .. }) => {
                assert_eq!((row, col), (0, 1));
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let mut m = vec![vec![c(0.0, 0.0); n]; n];
        for i in 0..n {
            m[i][i] = c(rng.gen_range(-2.0..2.0), 0.0);
            for j in i + 1..n {
                let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[i][j] = v;
                m[j][i] = v.conj();
            }
        }
        m
    }

    #[test]
    fn matches_characteristic_polynomial_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let m = random_hermitian(6, &mut rng);
        let eigs = hermitian_eigenvalues(&m).unwrap();

        // char poly by interpolation of det(M - z I) at 7 points
        let nodes: Vec<Complex64> = (0..7).map(|i| c(-3.0 + i as f64, 0.0)).collect();
        let mut vals = Vec::new();
        for &z in &nodes {
            let mut a = m.clone();
            for i in 0..6 {
                a[i][i] -= z;
            }
            vals.push(determinant(&a));
        }
        // Newton interpolation to coefficients.
        let mut coef = vals.clone();
        for j in 1..7 {
            for i in (j..7).rev() {
                let num = coef[i] - coef[i - 1];
                coef[i] = num / (nodes[i] - nodes[i - j]);
            }
        }
        let mut p = Polynomial::new(vec![coef[6]]);
        for i in (0..6).rev() {
            let lin = Polynomial::new(vec![-nodes[i], c(1.0, 0.0)]);
            p = p.mul(&lin);
            p = p.add(&Polynomial::new(vec![coef[i]]));
        }
        let mut roots: Vec<f64> = poly_roots(&p).unwrap().iter().map(|z| z.re).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in eigs.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }

        // Trace identity.
        let tr: f64 = (0..7 - 1).map(|i| m[i][i].re).take(6).sum();
        let sum: f64 = eigs.iter().sum();
        assert!((tr - sum).abs() <= 1e-10 * tr.abs().max(1.0));

        // Residual contract with recomputed eigenvectors.
        let scale: f64 = m
            .iter()
            .flat_map(|r| r.iter().map(|v| v.norm()))
            .fold(0.0, f64::max);
        for &lam in &eigs {
            let v = hermitian_eigenvector(&m, lam).unwrap();
            let mut res = 0.0f64;
            for i in 0..6 {
                let mut acc = c(0.0, 0.0);
                for j in 0..6 {
                    acc += m[i][j] * v[j];
                }
                res += (acc - v[i] * lam).norm_sqr();
            }
            assert!(res.sqrt() <= 1e-10 * scale, "residual {}", res.sqrt());
        }
    }

    #[test]
    fn lu_solve_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 8;
        let a: CMatrix = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        let x0: Vec<Complex64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let b: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] * x0[j]).sum())
            .collect();
        let x = solve(&a, &b).unwrap();
        for (xi, x0i) in x.iter().zip(&x0) {
            assert!((xi - x0i).norm() < 1e-10);
        }
    }
}
