//! Floquet analysis of five-diagonal periodic operators: the symbol block
//! j(w), the spectral polynomial F(z, w) = w^2 + 1/w^2 + A(z) w + A_*(z)/w
//! + B(z), band spectra from |w| = 1, critical values of the two-sheeted
//! z-cover, and evaluation of the |w| < 1 multiplier on the curve.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    check_hermitian_with_floor, determinant, hermitian_eigenvalues, poly_roots, resultant_in_w,
    BivariatePoly, CMatrix, Polynomial,
};
use crate::operator::{add_symbol_band, FiveDiagonalPeriodic};

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Finite union of disjoint closed intervals on the real line, excluding 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSet {
    intervals: Vec<(f64, f64)>,
}

impl BandSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (i, &(lo, hi)) in intervals.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "intervals[{i}]: endpoints must be finite"
                )));
            }
            if lo > hi {
                return Err(Error::InvalidInput(format!(
                    "intervals[{i}]: lo {lo} exceeds hi {hi}"
                )));
            }
            if i + 1 < intervals.len() && hi >= intervals[i + 1].0 {
                return Err(Error::InvalidInput(format!(
                    "intervals[{i}] and intervals[{}] are not disjoint",
                    i + 1
                )));
            }
        }
        if intervals.is_empty() {
            return Err(Error::InvalidInput("band set must be nonempty".into()));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Whether 0 lies outside every interval.  Spectra of invertible
    /// operators (the sets fed to the Green-function machinery) must
    /// satisfy this; spectra of differences like A - A^{-1} need not.
    pub fn excludes_zero(&self) -> bool {
        !self.intervals.iter().any(|&(lo, hi)| lo <= 0.0 && hi >= 0.0)
    }

    /// Validate the 0-exclusion required of spectra of invertible operators.
    pub fn require_zero_free(&self) -> Result<()> {
        for (i, &(lo, hi)) in self.intervals.iter().enumerate() {
            if lo <= 0.0 && hi >= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "intervals[{i}] = [{lo}, {hi}] contains 0"
                )));
            }
        }
        Ok(())
    }

    /// Number of finite gaps.
    pub fn gap_count(&self) -> usize {
        self.intervals.len() - 1
    }

    /// Leftmost and rightmost points.
    pub fn support(&self) -> (f64, f64) {
        (
            self.intervals.first().unwrap().0,
            self.intervals.last().unwrap().1,
        )
    }

    /// All endpoints ascending: b0, a1, b1, ..., ak, a0 in gap labeling.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut e = Vec::with_capacity(2 * self.intervals.len());
        for &(lo, hi) in &self.intervals {
            e.push(lo);
            e.push(hi);
        }
        e
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.support();
        hi - lo
    }

    /// Image under a strictly increasing map, merging touching images.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64, merge_tol: f64) -> Result<BandSet> {
        let mapped: Vec<(f64, f64)> = self.intervals.iter().map(|&(a, b)| (f(a), f(b))).collect();
        BandSet::new(merge_intervals(mapped, merge_tol))
    }
}

pub(crate) fn merge_intervals(mut v: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in v {
        if let Some(last) = out.last_mut() {
            if lo <= last.1 + tol {
                last.1 = last.1.max(hi);
                continue;
            }
        }
        out.push((lo, hi));
    }
    out
}

/// The d x d Floquet block of a five-diagonal periodic operator at
/// quasimomentum w.  Column underflow multiplies by 1/w and overflow by w,
/// so the corner entries are r_0/w, p_0/w (top right) and r_0 w, conj(p_0) w
/// (bottom left).  For small d overlapping wrap contributions are summed.
pub fn floquet_block(j: &FiveDiagonalPeriodic, w: Complex64) -> Result<CMatrix> {
    if w.norm() == 0.0 {
        return Err(Error::InvalidInput("floquet block requires w != 0".into()));
    }
    let d = j.d;
    let mut block = vec![vec![czero(); d]; d];
    let qband: Vec<Complex64> = j.q.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let supp: Vec<Complex64> = (0..d).map(|n| j.p[(n + 1) % d].conj()).collect();
    let supr: Vec<Complex64> = (0..d).map(|n| j.r[(n + 2) % d].conj()).collect();
    let one = Complex64::new(1.0, 0.0);
    add_symbol_band(&mut block, d, 0, &qband, w, one);
    add_symbol_band(&mut block, d, -1, &j.p, w, one);
    add_symbol_band(&mut block, d, 1, &supp, w, one);
    add_symbol_band(&mut block, d, -2, &j.r, w, one);
    add_symbol_band(&mut block, d, 2, &supr, w, one);
    Ok(block)
}

/// Coefficient polynomials of F(z, w) = w^2 + 1/w^2 + A(z) w + A_*(z)/w + B(z).
#[derive(Debug, Clone)]
pub struct CurvePoly {
    pub a: Polynomial,
    pub astar: Polynomial,
    pub b: Polynomial,
    /// prod r_j used to normalize the determinant.
    pub normalization: f64,
    /// Half-period k = d/2.
    pub k: usize,
}

impl CurvePoly {
    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        w * w + 1.0 / (w * w) + self.a.eval(z) * w + self.astar.eval(z) / w + self.b.eval(z)
    }

    /// w^2 F(z, w) as a quartic in w.
    pub fn quartic(&self) -> BivariatePoly {
        BivariatePoly::new(vec![
            Polynomial::one(),
            self.astar.clone(),
            self.b.clone(),
            self.a.clone(),
            Polynomial::one(),
        ])
    }
}

/// Determinant of (j(w) - z I) divided by prod r.
fn normalized_det(j: &FiveDiagonalPeriodic, z: Complex64, w: Complex64, prod_r: f64) -> Result<Complex64> {
    let mut m = floquet_block(j, w)?;
    for i in 0..j.d {
        m[i][i] -= z;
    }
    Ok(determinant(&m) / prod_r)
}

/// Recover A, A_* and B by a 5-point DFT in w (w^2 F is quartic in w) at
/// Chebyshev z-nodes, followed by polynomial interpolation in z.
pub fn curve_coefficients(j: &FiveDiagonalPeriodic) -> Result<CurvePoly> {
    let d = j.d;
    if d % 2 != 0 {
        return Err(Error::InvalidInput(
            "curve coefficients require an even period".into(),
        ));
    }
    let k = d / 2;
    if !j.r_is_real(1e-12) {
        return Err(Error::Degenerate(
            "degenerate second diagonal: r must be real (apply the normal-form gauge)".into(),
        ));
    }
    let mut prod_r = 1.0;
    for r in &j.r {
        if r.re <= 0.0 {
            return Err(Error::Degenerate(
                "degenerate second diagonal: some r_j <= 0".into(),
            ));
        }
        prod_r *= r.re;
    }

    let scale = 2.0 * j.scale() + 1.0;
    let n_nodes = d + 1;
    let nodes: Vec<f64> = (0..n_nodes)
        .map(|i| scale * (PI * i as f64 / (n_nodes - 1) as f64).cos())
        .collect();

    // At each z node extract the five Laurent coefficients of F in w.
    let mut a_vals = Vec::with_capacity(n_nodes);
    let mut astar_vals = Vec::with_capacity(n_nodes);
    let mut b_vals = Vec::with_capacity(n_nodes);
    for &zr in &nodes {
        let z = Complex64::new(zr, 0.0);
        let mut g = [czero(); 5];
        for m in 0..5 {
            let w = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / 5.0);
            let f = normalized_det(j, z, w, prod_r)?;
            let gw = f * w * w; // quartic in w
            for (l, gl) in g.iter_mut().enumerate() {
                *gl += gw * Complex64::from_polar(1.0, -2.0 * PI * (m * l) as f64 / 5.0) / 5.0;
            }
        }
        // g = [1, A_*, B, A, 1]
        let tol = 1e-8 * (1.0 + g.iter().map(|x| x.norm()).fold(0.0, f64::max));
        if (g[0] - 1.0).norm() > tol || (g[4] - 1.0).norm() > tol {
            return Err(Error::Numerical(format!(
                "w-Laurent structure violated: g0 = {}, g4 = {}",
                g[0], g[4]
            )));
        }
        astar_vals.push(g[1]);
        b_vals.push(g[2]);
        a_vals.push(g[3]);
    }

    let interp = |vals: &[Complex64]| -> Polynomial {
        newton_interpolate(&nodes, vals)
    };
    let mut a = interp(&a_vals);
    let mut astar = interp(&astar_vals);
    let mut b = interp(&b_vals);
    a.trim(1e-9);
    astar.trim(1e-9);
    b.trim(1e-9);
    Ok(CurvePoly {
        a,
        astar,
        b,
        normalization: prod_r,
        k,
    })
}

/// Newton divided-difference interpolation expanded to monomial coefficients.
fn newton_interpolate(nodes: &[f64], vals: &[Complex64]) -> Polynomial {
    let n = nodes.len();
    let mut coef = vals.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = coef[i] - coef[i - 1];
            coef[i] = num / (nodes[i] - nodes[i - j]);
        }
    }
    let mut p = Polynomial::new(vec![coef[n - 1]]);
    for i in (0..n - 1).rev() {
        let lin = Polynomial::new(vec![
            Complex64::new(-nodes[i], 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        p = p.mul(&lin);
        p = p.add(&Polynomial::new(vec![coef[i]]));
    }
    p
}

/// Eigenvalues of j(e^{i phi}), ascending.  The block is Hermitian up to
/// the rounding of 1/w against conj(w); symmetrize before solving.
fn branch_values(j: &FiveDiagonalPeriodic, phi: f64) -> Result<Vec<f64>> {
    let w = Complex64::from_polar(1.0, phi);
    let mut block = floquet_block(j, w)?;
    check_hermitian_with_floor(&block, 1e-9, j.scale())?;
    let d = block.len();
    for i in 0..d {
        for l in i..d {
            let avg = (block[i][l] + block[l][i].conj()) * 0.5;
            block[i][l] = avg;
            block[l][i] = avg.conj();
        }
    }
    hermitian_eigenvalues(&block)
}

fn golden_refine(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    iters: usize,
) -> Result<(f64, f64)> {
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d)?;
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Band spectrum: union over |w| = 1 of the eigenvalues of j(w), returned
/// as merged disjoint intervals.  Per-branch extrema are refined by
/// golden-section search in the phase.
pub fn band_spectrum(j: &FiveDiagonalPeriodic, phi_samples: usize) -> Result<BandSet> {
    if phi_samples < 64 {
        return Err(Error::InvalidInput(
            "band_spectrum requires phi_samples >= 64".into(),
        ));
    }
    let d = j.d;
    let n = phi_samples;
    let mut grid = vec![Vec::with_capacity(d); n];
    for (m, row) in grid.iter_mut().enumerate() {
        *row = branch_values(j, 2.0 * PI * m as f64 / n as f64)?;
    }
    let h = 2.0 * PI / n as f64;
    let mut raw: Vec<(f64, f64)> = Vec::with_capacity(d);
    for b in 0..d {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut arg_lo = 0.0;
        let mut arg_hi = 0.0;
        for (m, row) in grid.iter().enumerate() {
            let v = row[b];
            if v < lo {
                lo = v;
                arg_lo = m as f64 * h;
            }
            if v > hi {
                hi = v;
                arg_hi = m as f64 * h;
            }
        }
        let (_, lo) = golden_refine(
            |phi| Ok(branch_values(j, phi)?[b]),
            arg_lo - h,
            arg_lo + h,
            60,
        )?;
        let (_, hi_neg) = golden_refine(
            |phi| Ok(-branch_values(j, phi)?[b]),
            arg_hi - h,
            arg_hi + h,
            60,
        )?;
        raw.push((lo, -hi_neg));
    }
    let merge_tol = 1e-9 * j.scale().max(1.0);
    BandSet::new(merge_intervals(raw, merge_tol))
}

/// Critical values of the z-projection lying strictly inside the unit
/// w-disk, deduplicated with multiplicities.
#[derive(Debug, Clone)]
pub struct CriticalValues {
    pub values: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
}

impl CriticalValues {
    /// Exactly two distinct interior critical values.
    pub fn is_simplest_structure(&self) -> bool {
        self.values.len() == 2
    }
}

/// Locate z where F(z, .) has a double w-root inside the unit disk, via the
/// resultant of w^2 F and its w-derivative.  Collisions on |w| = 1 (band
/// edges) are excluded.
pub fn critical_values(j: &FiveDiagonalPeriodic) -> Result<CriticalValues> {
    let curve = curve_coefficients(j)?;
    critical_values_of_curve(&curve, j.scale())
}

pub fn critical_values_of_curve(curve: &CurvePoly, scale: f64) -> Result<CriticalValues> {
    let p = curve.quartic();
    let dp = p.d_dw();
    let res = resultant_in_w(&p, &dp)?;
    let res_scale = res
        .poly
        .coeffs()
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    if res.poly.degree() == 0 || res_scale < 1e-10 {
        return Err(Error::Degenerate(
            "resultant in w degenerates; spectral curve has a multiple component".into(),
        ));
    }
    let roots = poly_roots(&res.poly)?;
    let ztol = 1e-5 * (1.0 + scale);
    let boundary_tol = 1e-6;

    let mut kept: Vec<Complex64> = Vec::new();
    for &z in &roots {
        let quart = p.at_z(z);
        if quart.degree() < 2 {
            continue;
        }
        let wroots = poly_roots(&quart)?;
        // closest pair
        let mut best = (0usize, 1usize, f64::INFINITY);
        for i in 0..wroots.len() {
            for l in i + 1..wroots.len() {
                let sep = (wroots[i] - wroots[l]).norm();
                if sep < best.2 {
                    best = (i, l, sep);
                }
            }
        }
        let wmid = (wroots[best.0] + wroots[best.1]) * 0.5;
        // Skip non-collisions (spurious resultant roots) and boundary
        // collisions.
        if best.2 > 1e-3 * (1.0 + wmid.norm()) {
            continue;
        }
        if wmid.norm() >= 1.0 - boundary_tol {
            continue;
        }
        kept.push(z);
    }
    // Cluster.
    let mut values: Vec<Complex64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    for z in kept {
        if let Some(i) = values.iter().position(|v| (v - z).norm() < ztol) {
            mult[i] += 1;
            // running mean keeps clusters tight
            let m = mult[i] as f64;
            values[i] = (values[i] * (m - 1.0) + z) / m;
        } else {
            values.push(z);
            mult.push(1);
        }
    }
    Ok(CriticalValues {
        values,
        multiplicities: mult,
    })
}

/// The holomorphic |w| < 1 multiplier on the spectral curve of an operator
/// in the z = lambda - 1/lambda normalization, evaluated by root tracking
/// from a real base point.
pub struct SpectralCurve {
    pub curve: CurvePoly,
    quartic: BivariatePoly,
    k: usize,
    base_lambda: f64,
    base_w: Complex64,
    path_height: f64,
}

pub fn map_z(lambda: Complex64) -> Complex64 {
    lambda - 1.0 / lambda
}

impl SpectralCurve {
    pub fn new(j: &FiveDiagonalPeriodic) -> Result<Self> {
        let curve = curve_coefficients(j)?;
        let k = curve.k;
        let quartic = curve.quartic();
        let mut prod_odd = 1.0;
        let mut prod_even = 1.0;
        for (n, r) in j.r.iter().enumerate() {
            if n % 2 == 0 {
                prod_even *= r.re;
            } else {
                prod_odd *= r.re;
            }
        }
        let scale = 1.0 + 2.0 * j.scale();

        // Anchor the branch at a large real base point where
        // w(lambda) z^k -> prod of odd-indexed r.
        let mut base_lambda = 40.0 * scale;
        let mut chosen: Option<Complex64> = None;
        for _ in 0..6 {
            let z = map_z(Complex64::new(base_lambda, 0.0));
            let zk = z.powi(k as i32);
            let roots = poly_roots(&quartic.at_z(z))?;
            let interior: Vec<Complex64> =
                roots.iter().copied().filter(|w| w.norm() < 1.0).collect();
            if interior.len() == 2 {
                let target_odd = Complex64::new(prod_odd, 0.0) / zk;
                let target_even = Complex64::new(prod_even, 0.0) / zk;
                let d0 = (interior[0] - target_odd).norm() + (interior[1] - target_even).norm();
                let d1 = (interior[1] - target_odd).norm() + (interior[0] - target_even).norm();
                let (w_odd, cross) = if d0 < d1 {
                    (interior[0], d1)
                } else {
                    (interior[1], d0)
                };
                let own = d0.min(d1);
                // require a clear assignment
                if own < 0.2 * cross {
                    chosen = Some(w_odd);
                    break;
                }
            }
            base_lambda *= 8.0;
        }
        let base_w = chosen.ok_or_else(|| {
            Error::BranchAmbiguity(
                "two interior roots cannot be assigned at the base point (equal diagonal products?)"
                    .into(),
            )
        })?;
        Ok(Self {
            curve,
            quartic,
            k,
            base_lambda,
            base_w,
            path_height: 2.0 * scale,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Track the interior root from the base point to `lambda` (upper
    /// closed half-plane or real axis, away from the spectrum).
    pub fn w_at(&self, lambda: Complex64) -> Result<Complex64> {
        if lambda.norm() == 0.0 {
            return Ok(czero());
        }
        if lambda.im < -1e-12 {
            return Err(Error::InvalidInput(
                "w_at expects Im lambda >= 0 (use conjugation for the lower half-plane)".into(),
            ));
        }
        let y = self.path_height.max(2.0 * lambda.im);
        let base = Complex64::new(self.base_lambda, 0.0);
        let waypoints = [
            base,
            Complex64::new(self.base_lambda, y),
            Complex64::new(lambda.re, y),
            lambda,
        ];
        let mut w = self.base_w;
        let mut lam = waypoints[0];
        for pair in waypoints.windows(2) {
            let (from, to) = (pair[0], pair[1]);
            let mut t = 0.0f64;
            let mut step = 0.125f64;
            while t < 1.0 {
                let tn = (t + step).min(1.0);
                let lam_next = from + (to - from) * tn;
                match self.advance(w, lam_next) {
                    Some(wn) => {
                        w = wn;
                        lam = lam_next;
                        t = tn;
                        step = (step * 1.6).min(0.25);
                    }
                    None => {
                        step *= 0.5;
                        if step < 1e-7 {
                            return Err(Error::BranchAmbiguity(format!(
                                "root tracking stalled near lambda = {lam}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(w)
    }

    /// One tracking step: nearest root with a separation guard.
    fn advance(&self, w_prev: Complex64, lam: Complex64) -> Option<Complex64> {
        let z = map_z(lam);
        let roots = poly_roots(&self.quartic.at_z(z)).ok()?;
        let mut best = (f64::INFINITY, czero());
        let mut second = f64::INFINITY;
        for &r in &roots {
            let dist = (r - w_prev).norm();
            if dist < best.0 {
                second = best.0;
                best = (dist, r);
            } else if dist < second {
                second = dist;
            }
        }
        // Accept when the nearest root is unambiguous.
        if best.0 < 0.35 * second || best.0 < 1e-13 {
            Some(best.1)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::testgen::random_coefficients;
    use crate::operator::{j_from_smp, smp_matrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn free_j() -> FiveDiagonalPeriodic {
        // d = 4, r = 1, p = 0, q = 0
        FiveDiagonalPeriodic::new(
            vec![0.0; 4],
            vec![czero(); 4],
            vec![Complex64::new(1.0, 0.0); 4],
        )
        .unwrap()
    }

    #[test]
    fn free_block_wrap_entries() {
        let j = free_j();
        let w = c(0.3, 0.4);
        let b = floquet_block(&j, w).unwrap();
        // (0,2) = 1 + 1/w, (2,0) = 1 + w
        assert!((b[0][2] - (Complex64::new(1.0, 0.0) + 1.0 / w)).norm() < 1e-14);
        assert!((b[2][0] - (Complex64::new(1.0, 0.0) + w)).norm() < 1e-14);
    }

    #[test]
    fn block_hermitian_on_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfs = random_coefficients(3, true, &mut rng);
        let j = j_from_smp(&cfs).unwrap().j;
        let w = Complex64::from_polar(1.0, 1.234);
        let b = floquet_block(&j, w).unwrap();
        assert!(crate::numerics::check_hermitian(&b, 1e-12).is_ok());
    }

    #[test]
    fn corner_entries_d6() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cfs = random_coefficients(3, true, &mut rng);
        let j = j_from_smp(&cfs).unwrap().j;
        let w = c(0.7, -0.2);
        let b = floquet_block(&j, w).unwrap();
        // top-right corners: (0, d-2) = r_0 / w, (0, d-1) = p_0 / w
        assert!((b[0][4] - j.r[0] / w).norm() < 1e-13);
        assert!((b[0][5] - j.p[0] / w).norm() < 1e-13);
        // bottom-left corners: (d-2, 0) = conj(r_0) w, (d-1, 0) = conj(p_0) w
        assert!((b[4][0] - j.r[0].conj() * w).norm() < 1e-13);
        assert!((b[5][0] - j.p[0].conj() * w).norm() < 1e-13);
        // (d-1, 1) = conj(r_1) w
        assert!((b[5][1] - j.r[1].conj() * w).norm() < 1e-13);
    }

    #[test]
    fn free_curve_coefficients() {
        let j = free_j();
        let curve = curve_coefficients(&j).unwrap();
        // A(z) = -2 z^2 + 4, B(z) = z^4 - 4 z^2 + 6
        let a = &curve.a;
        assert_eq!(a.degree(), 2);
        assert!((a.coeffs()[0] - 4.0).norm() < 1e-9);
        assert!(a.coeffs()[1].norm() < 1e-9);
        assert!((a.coeffs()[2] + 2.0).norm() < 1e-9);
        let b = &curve.b;
        assert_eq!(b.degree(), 4);
        assert!((b.coeffs()[0] - 6.0).norm() < 1e-9);
        assert!((b.coeffs()[2] + 4.0).norm() < 1e-9);
        assert!((b.coeffs()[4] - 1.0).norm() < 1e-9);
        // leading coefficient of A_* matches -1/(r0 r2) - 1/(r1 r3) = -2
        assert!((curve.astar.leading() + 2.0).norm() < 1e-10);
    }

    #[test]
    fn free_band_is_minus_two_two() {
        let j = free_j();
        let bands = band_spectrum(&j, 128).unwrap();
        assert_eq!(bands.intervals().len(), 1);
        let (lo, hi) = bands.intervals()[0];
        assert!((lo + 2.0).abs() < 1e-9 && (hi - 2.0).abs() < 1e-9, "{lo}, {hi}");
        // This set contains 0, so it is not usable as a spectrum of an
        // invertible operator.
        assert!(!bands.excludes_zero());
    }

    #[test]
    fn diagonal_bands_are_points() {
        let j = FiveDiagonalPeriodic::diagonal(vec![1.5, 0.0 + 3.0]).unwrap();
        let bands = band_spectrum(&j, 64).unwrap();
        assert_eq!(bands.intervals().len(), 2);
        for &(lo, hi) in bands.intervals() {
            assert!(hi - lo < 1e-9);
        }
    }

    #[test]
    fn curve_fit_matches_determinant_and_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for k in [1usize, 2, 3] {
            let cfs = random_coefficients(k, true, &mut rng);
            let j = j_from_smp(&cfs).unwrap().j;
            let curve = curve_coefficients(&j).unwrap();
            let mut prod_r = 1.0;
            for r in &j.r {
                prod_r *= r.re;
            }
            for _ in 0..50 {
                let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let wm = rng.gen_range(0.5..2.0);
                let w = Complex64::from_polar(wm, rng.gen_range(0.0..2.0 * PI));
                let direct = normalized_det(&j, z, w, prod_r).unwrap();
                let fitted = curve.eval(z, w);
                assert!(
                    (direct - fitted).norm() < 1e-8 * (1.0 + direct.norm()),
                    "curve mismatch at z={z}, w={w}: {direct} vs {fitted}"
                );
                // involution: conj(F(conj z, 1/conj w)) = F(z, w)
                let refl = curve.eval(z.conj(), 1.0 / w.conj()).conj();
                assert!(
                    (refl - fitted).norm() < 1e-10 * (1.0 + fitted.norm()),
                    "involution violated"
                );
            }
            // A_* is the conjugate reflection of A.
            let astar = curve.a.conj_reflect();
            for (x, y) in astar.coeffs().iter().zip(curve.astar.coeffs()) {
                assert!((x - y).norm() < 1e-8 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn real_coefficients_give_self_reflected_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let cfs = random_coefficients(2, false, &mut rng);
        let j = j_from_smp(&cfs).unwrap().j;
        let curve = curve_coefficients(&j).unwrap();
        for (x, y) in curve.a.coeffs().iter().zip(curve.astar.coeffs()) {
            assert!((x - y).norm() < 1e-10 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn branch_continuity_of_phase_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let cfs = random_coefficients(2, true, &mut rng);
        let j = j_from_smp(&cfs).unwrap().j;
        let n = 256;
        let mut prev = branch_values(&j, 0.0).unwrap();
        let scale = j.scale();
        for m in 1..=n {
            let cur = branch_values(&j, 2.0 * PI * m as f64 / n as f64).unwrap();
            for (a, b) in prev.iter().zip(&cur) {
                assert!((a - b).abs() < 10.0 * (2.0 * PI / n as f64) * scale * 4.0);
            }
            prev = cur;
        }
    }

    #[test]
    fn band_spectrum_stable_under_doubling() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cfs = random_coefficients(2, false, &mut rng);
        let j = j_from_smp(&cfs).unwrap().j;
        let b1 = band_spectrum(&j, 128).unwrap();
        let b2 = band_spectrum(&j, 256).unwrap();
        assert_eq!(b1.intervals().len(), b2.intervals().len());
        for (x, y) in b1.intervals().iter().zip(b2.intervals()) {
            assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9);
        }
    }

    #[test]
    fn smp_band_spectra_related_by_z_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for k in [1usize, 2] {
            let cfs = random_coefficients(k, false, &mut rng);
            let a = smp_matrix(&cfs).unwrap();
            let jr = j_from_smp(&cfs).unwrap();
            let ea = band_spectrum(&a, 256).unwrap();
            let ej = band_spectrum(&jr.j, 256).unwrap();
            let mapped = ea
                .map_monotone(|x| x - 1.0 / x, 1e-7 * (1.0 + jr.j.scale()))
                .unwrap();
            assert_eq!(
                mapped.intervals().len(),
                ej.intervals().len(),
                "band count mismatch k={k}: {:?} vs {:?}",
                mapped.intervals(),
                ej.intervals()
            );
            for (x, y) in mapped.intervals().iter().zip(ej.intervals()) {
                assert!(
                    (x.0 - y.0).abs() < 1e-7 && (x.1 - y.1).abs() < 1e-7,
                    "edges differ: {:?} vs {:?}",
                    x,
                    y
                );
            }
        }
    }

    #[test]
    fn multiplier_matches_pencil_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for k in [1usize, 2] {
            let cfs = random_coefficients(k, false, &mut rng);
            let jr = j_from_smp(&cfs).unwrap();
            let a = smp_matrix(&cfs).unwrap();
            let ea = band_spectrum(&a, 256).unwrap();
            let curve = SpectralCurve::new(&jr.j).unwrap();
            // sample real lambdas outside E and above the axis
            let (lo, hi) = ea.support();
            let samples = [
                Complex64::new(hi + 0.7 * (hi - lo).max(0.5), 0.0),
                Complex64::new(lo - 0.5 * (hi - lo).max(0.5), 0.0),
                Complex64::new(0.5 * (lo + hi), 1.5 * (hi - lo).max(0.5)),
            ];
            for &lam in &samples {
                if lam.im == 0.0 && (ea.contains(lam.re) || lam.re.abs() < 1e-6) {
                    continue;
                }
                let v = crate::operator::pencil_multiplier(&cfs, lam).unwrap();
                let w = curve.w_at(lam).unwrap();
                assert!(
                    (v.norm() - w.norm()).abs() < 1e-8 * (1.0 + v.norm()),
                    "k={k}: |pencil| = {}, |curve| = {}",
                    v.norm(),
                    w.norm()
                );
                assert!(w.norm() < 1.0);
            }
            // real lambda right of the spectrum gives real w
            let lam = Complex64::new(hi + (hi - lo).max(1.0), 0.0);
            let w = curve.w_at(lam).unwrap();
            assert!(w.im.abs() < 1e-9 * (1.0 + w.norm()), "w = {w}");
        }
    }
}
