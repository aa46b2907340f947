//! Finite-gap potential theory on the complement of a real band set E with
//! logarithmic poles at 0 and infinity.
//!
//! The sum of the two Green functions is G(lambda) = Re Phi(lambda) with
//!
//! ```text
//! Phi(lambda) = int_{a0}^{lambda} M(s) / (s sqrt(R(s))) ds,
//! R(s) = prod_j (s - a_j)(s - b_j),
//! ```
//!
//! where M is the monic polynomial of degree (gap count + 1) fixed by the
//! gap-vanishing conditions and the residue -1 at the origin.  The Abelian
//! integral is theta = i Phi; its imaginary part is G and the decrements of
//! its real part across the bands are pi times the harmonic measures.
//!
//! Branch convention: sqrt(R) is positive on (a0, +inf) and continued
//! through the upper half-plane, so on the real axis sqrt(R)(x) =
//! i^{c(x)} sqrt(|R(x)|) with c(x) the number of band endpoints to the
//! right of x.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::floquet::BandSet;
use crate::numerics::{
    integrate_cheb, integrate_complex_leg, integrate_smooth, poly_roots, solve_real, Polynomial,
    QuadratureConfig,
};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Where the origin sits relative to the bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroLocation {
    /// 0 < leftmost endpoint (spectrum entirely positive).
    LeftRay,
    /// 0 > rightmost endpoint (spectrum entirely negative).
    RightRay,
    /// 0 inside finite gap `g` (gap g separates bands g and g+1).
    Gap(usize),
}

/// Solved Green-function data on the complement of a band set.
#[derive(Debug, Clone)]
pub struct GreenModel {
    e: BandSet,
    m: Polynomial,
    quad: QuadratureConfig,
    endpoints: Vec<f64>,
    /// Phi at each endpoint (ascending order), upper-rim convention,
    /// normalized by Phi(a0) = 0.
    phi_end: Vec<Complex64>,
    zero_loc: ZeroLocation,
    scale: f64,
}

/// Harmonic data of a band set: per-band measures (seen jointly from 0 and
/// infinity), the phase invariant xi, and the rationality diagnosis.
#[derive(Debug, Clone)]
pub struct HarmonicData {
    pub omega: Vec<f64>,
    pub xi: f64,
    pub k_detected: Option<usize>,
    pub residual: f64,
}

/// Result of the bounded-denominator rationality scan.
#[derive(Debug, Clone)]
pub struct RationalityReport {
    pub k_detected: Option<usize>,
    /// Rounded k * omega_j at the detected k.
    pub numerators: Vec<i64>,
    /// Rounded k * xi at the detected k.
    pub xi_numerator: i64,
    pub residual: f64,
}

fn locate_zero(e: &BandSet) -> Result<ZeroLocation> {
    e.require_zero_free()?;
    let (lo, hi) = e.support();
    if 0.0 < lo {
        return Ok(ZeroLocation::LeftRay);
    }
    if 0.0 > hi {
        return Ok(ZeroLocation::RightRay);
    }
    for (g, w) in e.intervals().windows(2).enumerate() {
        if w[0].1 < 0.0 && 0.0 < w[1].0 {
            return Ok(ZeroLocation::Gap(g));
        }
    }
    Err(Error::InvalidInput(
        "0 is an endpoint of the band set".into(),
    ))
}

/// Solve for the monic numerator M: gap-vanishing conditions (principal
/// value on the gap containing 0) plus the residue -1 at the origin.
pub fn solve_green(e: &BandSet, quad: &QuadratureConfig) -> Result<GreenModel> {
    let zero_loc = locate_zero(e)?;
    let endpoints = e.endpoints();
    let scale = endpoints.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if e.distance(0.0) < 1e-8 * scale.max(1.0) {
        return Err(Error::Degenerate(
            "band set approaches 0 too closely for the pole at the origin".into(),
        ));
    }
    let kappa = e.gap_count();
    let deg = kappa + 1;

    let sqrt_abs_r = |s: f64| -> f64 {
        let mut acc = 1.0f64;
        for &ep in &endpoints {
            acc *= (s - ep).abs();
        }
        acc.sqrt()
    };

    // Linear system for the coefficients c_0..c_kappa of
    // M(s) = s^{kappa+1} + sum c_i s^i.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(deg);
    let mut rhs: Vec<f64> = Vec::with_capacity(deg);

    for g in 0..kappa {
        let a = endpoints[2 * g + 1];
        let b = endpoints[2 * g + 2];
        let is_zero_gap = matches!(zero_loc, ZeroLocation::Gap(gz) if gz == g);
        let mut row = vec![0.0; deg];
        // moment integrals T_i = int s^{i-1} / sqrt|R|
        for i in 0..=deg {
            let t_i = if i == 0 {
                if is_zero_gap {
                    pv_integral(&|s| 1.0 / sqrt_abs_r(s), a, b, quad)?
                } else {
                    integrate_cheb(|s| 1.0 / (s * sqrt_abs_r(s)), a, b, quad)?
                }
            } else {
                integrate_cheb(|s| s.powi(i as i32 - 1) / sqrt_abs_r(s), a, b, quad)?
            };
            if i < deg {
                row[i] = t_i;
            } else {
                rhs.push(-t_i);
            }
        }
        rows.push(row);
    }

    // Residue row: M(0) = c_0 = -sqrt(R)(0) with the rim sign.
    {
        let mut row = vec![0.0; deg];
        row[0] = 1.0;
        rows.push(row);
        let count = endpoints.iter().filter(|&&ep| ep > 0.0).count();
        // sqrt(R)(0) is real here (count even); i^count = (-1)^{count/2}
        debug_assert!(count % 2 == 0);
        let sign = if (count / 2) % 2 == 0 { 1.0 } else { -1.0 };
        rhs.push(-sign * sqrt_abs_r(0.0));
    }

    let coeffs = solve_real(&rows, &rhs)
        .map_err(|e| Error::Numerical(format!("green numerator system is singular: {e}")))?;
    let mut mcoef = coeffs;
    mcoef.push(1.0);
    let m = Polynomial::from_real(&mcoef);

    let mut model = GreenModel {
        e: e.clone(),
        m,
        quad: *quad,
        endpoints,
        phi_end: Vec::new(),
        zero_loc,
        scale,
    };
    model.phi_end = model.walk_endpoints()?;
    Ok(model)
}

/// PV int_a^b h(s)/s ds for a < 0 < b; h smooth inside, possibly with
/// inverse-square-root singularities at a and b.
fn pv_integral(
    h: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    assert!(a < 0.0 && 0.0 < b);
    let c = (-a).min(b);
    // symmetric part: int_0^c (h(s) - h(-s))/s ds
    let eps = 1e-9 * c;
    let sym = integrate_cheb(
        |s| {
            let s = s.max(eps);
            (h(s) - h(-s)) / s
        },
        0.0,
        c,
        quad,
    )?;
    let rest = if -a > c {
        integrate_cheb(|s| h(s) / s, a, -c, quad)?
    } else if b > c {
        integrate_cheb(|s| h(s) / s, c, b, quad)?
    } else {
        0.0
    };
    Ok(sym + rest)
}

impl GreenModel {
    pub fn band_set(&self) -> &BandSet {
        &self.e
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.m
    }

    pub fn zero_location(&self) -> ZeroLocation {
        self.zero_loc
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    /// Roots of the numerator: the critical points of G.
    pub fn critical_points(&self) -> Result<Vec<Complex64>> {
        poly_roots(&self.m)
    }

    fn sqrt_abs_r(&self, s: f64) -> f64 {
        let mut acc = 1.0f64;
        for &ep in &self.endpoints {
            acc *= (s - ep).abs();
        }
        acc.sqrt()
    }

    /// Number of endpoints strictly to the right of x.
    fn count_right(&self, x: f64) -> usize {
        self.endpoints.iter().filter(|&&ep| ep > x).count()
    }

    /// 1 / i^count: the factor carried by 1/sqrt(R) on the rim segment
    /// where `count` endpoints lie to the right.
    fn rim_rot(count: usize) -> Complex64 {
        match count % 4 {
            0 => c64(1.0, 0.0),
            1 => c64(0.0, -1.0),
            2 => c64(-1.0, 0.0),
            _ => c64(0.0, 1.0),
        }
    }

    /// sqrt(R) continued through the upper half-plane (Im lambda > 0), as a
    /// product of principal square roots of the factors.
    fn sqrt_r_upper(&self, lambda: Complex64) -> Complex64 {
        let mut acc = c64(1.0, 0.0);
        for &ep in &self.endpoints {
            acc *= (lambda - ep).sqrt();
        }
        acc
    }

    /// Integrand of Phi on the upper half-plane.
    fn phi_integrand(&self, lambda: Complex64) -> Complex64 {
        self.m.eval(lambda) / (lambda * self.sqrt_r_upper(lambda))
    }

    /// d(theta)/d(lambda) = i M / (lambda sqrt R), upper half-plane branch.
    pub fn theta_prime(&self, lambda: Complex64) -> Complex64 {
        c64(0.0, 1.0) * self.phi_integrand(lambda)
    }

    /// Real-segment integral of M(s)/(s sqrt|R(s)|) with endpoint
    /// square-root handling; no pole inside.
    fn base_segment(&self, a: f64, b: f64) -> Result<f64> {
        if (b - a).abs() < 1e-15 * self.scale.max(1.0) {
            return Ok(0.0);
        }
        let f = |s: f64| self.m.eval_real(s).re / (s * self.sqrt_abs_r(s));
        integrate_cheb(f, a, b, &self.quad)
    }

    /// PV variant for a segment containing 0.
    fn base_segment_pv(&self, a: f64, b: f64) -> Result<f64> {
        let h = |s: f64| self.m.eval_real(s).re / self.sqrt_abs_r(s);
        pv_integral(&h, a, b, &self.quad)
    }

    /// Phi at all endpoints by walking left from a0.  Crossing the pole at
    /// the origin leftwards (over the upper semicircle) adds -i pi times
    /// the residue -1, i.e. +i pi to the rightward segment value.
    fn walk_endpoints(&self) -> Result<Vec<Complex64>> {
        let n = self.endpoints.len();
        let mut phi = vec![c64(0.0, 0.0); n];
        for j in (0..n - 1).rev() {
            let a = self.endpoints[j];
            let b = self.endpoints[j + 1];
            let is_band = j % 2 == 0;
            let count = self.count_right(0.5 * (a + b));
            let rot = Self::rim_rot(count);
            let contrib = if is_band || !(a < 0.0 && 0.0 < b) {
                rot * self.base_segment(a, b)?
            } else {
                rot * self.base_segment_pv(a, b)? + c64(0.0, PI)
            };
            // Phi(e_j) = Phi(e_{j+1}) - int_{e_j}^{e_{j+1}}
            phi[j] = phi[j + 1] - contrib;
        }
        Ok(phi)
    }

    /// Phi on the real axis (upper-rim convention).
    pub fn phi_real_axis(&self, x: f64) -> Result<Complex64> {
        let n = self.endpoints.len();
        let a0 = self.endpoints[n - 1];
        let b0 = self.endpoints[0];
        if x == 0.0 {
            return Err(Error::InvalidInput("Phi has a pole at 0".into()));
        }
        if let Some(idx) = self
            .endpoints
            .iter()
            .position(|&ep| ep == x)
        {
            return Ok(self.phi_end[idx]);
        }
        if x > a0 {
            let contrib = if a0 < 0.0 && 0.0 < x {
                self.base_segment_pv(a0, x)? + c64(0.0, PI)
            } else {
                c64(self.base_segment(a0, x)?, 0.0)
            };
            return Ok(self.phi_end[n - 1] + contrib);
        }
        if x < b0 {
            let rot = Self::rim_rot(n);
            let contrib = if x < 0.0 && 0.0 < b0 {
                rot * self.base_segment_pv(x, b0)? + c64(0.0, PI)
            } else {
                rot * self.base_segment(x, b0)?
            };
            return Ok(self.phi_end[0] - contrib);
        }
        // interior: segment [e_j, e_{j+1}] containing x
        let jr = self.endpoints.iter().position(|&ep| ep > x).unwrap();
        let j = jr - 1;
        let b = self.endpoints[j + 1];
        let count = self.count_right(x);
        let rot = Self::rim_rot(count);
        let contrib = if x < 0.0 && 0.0 < b {
            rot * self.base_segment_pv(x, b)? + c64(0.0, PI)
        } else {
            rot * self.base_segment(x, b)?
        };
        Ok(self.phi_end[j + 1] - contrib)
    }

    /// Phi anywhere in the closed upper half-plane (pole at 0 excluded).
    pub fn phi(&self, lambda: Complex64) -> Result<Complex64> {
        if lambda.im < -1e-12 * self.scale.max(1.0) {
            return Err(Error::InvalidInput(
                "Phi is evaluated in the closed upper half-plane".into(),
            ));
        }
        if lambda.im.abs() <= 1e-13 * self.scale.max(1.0) {
            return self.phi_real_axis(lambda.re);
        }
        let (b0, a0) = self.e.support();
        let diam = (a0 - b0).max(1e-3);
        // reference point on the right ray, clear of the origin
        let mut delta = 0.25 * diam;
        if a0 < 0.0 {
            delta = delta.min(-0.5 * a0);
        }
        let lam_ref = a0 + delta;
        let phi_ref = self.phi_real_axis(lam_ref)?;
        let y = (0.75 * diam).max(1.5 * lambda.im);
        let p0 = c64(lam_ref, 0.0);
        let p1 = c64(lam_ref, y);
        let p2 = c64(lambda.re, y);
        let tol = self.quad.abs_tol;
        let f = |s: Complex64| self.phi_integrand(s);
        let leg1 = integrate_complex_leg(f, p0, p1, tol)?;
        let leg2 = integrate_complex_leg(f, p1, p2, tol)?;
        let leg3 = integrate_complex_leg(f, p2, lambda, tol)?;
        Ok(phi_ref + leg1 + leg2 + leg3)
    }

    /// G_0(lambda) + G_inf(lambda); symmetric under conjugation.
    pub fn green_sum(&self, lambda: Complex64) -> Result<f64> {
        if lambda.norm() == 0.0 {
            return Err(Error::InvalidInput("pole of G at 0".into()));
        }
        let lam = if lambda.im < 0.0 { lambda.conj() } else { lambda };
        Ok(self.phi(lam)?.re)
    }

    /// The Abelian integral theta(lambda) = i Phi(lambda), Im lambda >= 0.
    pub fn theta(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(c64(0.0, 1.0) * self.phi(lambda)?)
    }

    /// Harmonic measures omega_j = (1/pi) x decrement of Re theta across
    /// band j, read off the precomputed endpoint values.
    pub fn harmonic_measures(&self) -> Vec<f64> {
        let bands = self.e.intervals().len();
        (0..bands)
            .map(|j| (self.phi_end[2 * j].im - self.phi_end[2 * j + 1].im) / PI)
            .collect()
    }

    /// Limits A_inf = lim (Phi - log lambda) at +inf along the real axis
    /// and A_0 = lim (Phi + log lambda) at 0 (upper-rim log branch).
    pub fn log_limits(&self) -> Result<(Complex64, Complex64)> {
        let n = self.endpoints.len();
        let a0 = self.endpoints[n - 1];
        let b0 = self.endpoints[0];
        let diam = (a0 - b0).max(1.0);

        // --- A_inf ---
        let mut x_far = a0 + 6.0 * diam + 1.0;
        if a0 < 0.0 {
            x_far = x_far.max(-4.0 * a0);
        }
        let phi_far = self.phi_real_axis(x_far)?;
        // tail: int_{x_far}^inf (f - 1/s) ds via s = x_far / t
        let tail = integrate_smooth(
            |t| {
                if t <= 0.0 {
                    return 0.0;
                }
                let s = x_far / t;
                let f = self.m.eval_real(s).re / (s * self.sqrt_abs_r(s));
                (f - 1.0 / s) * x_far / (t * t)
            },
            0.0,
            1.0,
            self.quad.abs_tol,
        )?;
        let a_inf = phi_far - c64(x_far.ln(), 0.0) + c64(tail, 0.0);

        // --- A_0 ---
        let (x_near, from_right) = match self.zero_loc {
            ZeroLocation::LeftRay => (b0, true),
            ZeroLocation::RightRay => (a0, false),
            ZeroLocation::Gap(g) => (self.endpoints[2 * g + 2], true),
        };
        let phi_near = self.phi_real_axis(x_near)?;
        // rim sign on the segment between 0 and x_near
        let probe = 0.5 * x_near;
        let count = self.count_right(probe);
        debug_assert!(count % 2 == 0);
        let sign = if (count / 2) % 2 == 0 { 1.0 } else { -1.0 };
        // regularized integrand f + 1/s, f = sign * M/(s sqrt|R|)
        let reg_f = |s: f64| sign * self.m.eval_real(s).re / (s * self.sqrt_abs_r(s)) + 1.0 / s;
        let a_0 = if from_right {
            let reg = integrate_cheb(reg_f, 0.0, x_near, &self.quad)?;
            // A_0 = Phi(x_near) + ln(x_near) - int_0^{x_near} (f + 1/s) ds
            phi_near + c64(x_near.ln(), 0.0) - c64(reg, 0.0)
        } else {
            let reg = integrate_cheb(reg_f, x_near, 0.0, &self.quad)?;
            // approaching 0 from the left: log(x) = ln|x| + i pi upper rim
            phi_near + c64((-x_near).ln(), PI) + c64(reg, 0.0)
        };
        Ok((a_0, a_inf))
    }

    /// The phase invariant xi in [0, 1): the unimodular mismatch between
    /// the normalized directions of e^{-Phi} lambda at infinity and
    /// -e^{-Phi}/lambda at the origin, along the upper-rim continuation.
    pub fn xi(&self) -> Result<f64> {
        let (a_0, a_inf) = self.log_limits()?;
        let xi = 0.5 + (a_0.im - a_inf.im) / (2.0 * PI);
        Ok(xi.rem_euclid(1.0))
    }

    /// Difference of the Robin-type constants at 0 and infinity; vanishes
    /// for the inversion-balanced scaling of E.
    pub fn robin_difference(&self) -> Result<f64> {
        let (a_0, a_inf) = self.log_limits()?;
        Ok(a_0.re - a_inf.re)
    }

    /// Residual diagnostics: residue normalization, gap periods, boundary
    /// values of G at all endpoints.
    pub fn validate(&self) -> Result<GreenDiagnostics> {
        let count = self.count_right(0.0);
        let sign = if (count / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let residue = self.m.eval_real(0.0).re / (sign * self.sqrt_abs_r(0.0));
        let mut gap_periods = Vec::new();
        for g in 0..self.e.gap_count() {
            let a = self.endpoints[2 * g + 1];
            let b = self.endpoints[2 * g + 2];
            let v = if matches!(self.zero_loc, ZeroLocation::Gap(gz) if gz == g) {
                self.base_segment_pv(a, b)?
            } else {
                self.base_segment(a, b)?
            };
            gap_periods.push(v);
        }
        let boundary_g: Vec<f64> = self.phi_end.iter().map(|p| p.re).collect();
        Ok(GreenDiagnostics {
            residue_deviation: (residue + 1.0).abs(),
            gap_periods,
            boundary_g,
        })
    }
}

#[derive(Debug, Clone)]
pub struct GreenDiagnostics {
    pub residue_deviation: f64,
    pub gap_periods: Vec<f64>,
    pub boundary_g: Vec<f64>,
}

/// Smallest k <= qmax with k omega_j and k xi simultaneously within `tol`
/// of integers.
pub fn rationality_check(omega: &[f64], xi: f64, qmax: usize, tol: f64) -> RationalityReport {
    let dev_at = |k: usize| -> f64 {
        let mut dev = 0.0f64;
        for &w in omega {
            let kw = k as f64 * w;
            dev = dev.max((kw - kw.round()).abs());
        }
        let kxi = k as f64 * xi;
        dev.max((kxi - kxi.round()).abs())
    };
    for k in 1..=qmax {
        let dev = dev_at(k);
        if dev <= tol {
            return RationalityReport {
                k_detected: Some(k),
                numerators: omega
                    .iter()
                    .map(|&w| (k as f64 * w).round() as i64)
                    .collect(),
                xi_numerator: (k as f64 * xi).round() as i64,
                residual: dev,
            };
        }
    }
    let min_dev = (1..=qmax).map(dev_at).fold(f64::INFINITY, f64::min);
    RationalityReport {
        k_detected: None,
        numerators: Vec::new(),
        xi_numerator: 0,
        residual: min_dev,
    }
}

/// Full harmonic report for a band set.
pub fn harmonic_data(model: &GreenModel, qmax: usize, tol: f64) -> Result<HarmonicData> {
    let omega = model.harmonic_measures();
    let xi = model.xi()?;
    let report = rationality_check(&omega, xi, qmax, tol);
    Ok(HarmonicData {
        omega,
        xi,
        k_detected: report.k_detected,
        residual: report.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn bands(v: &[(f64, f64)]) -> BandSet {
        BandSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_positive_band_numerator() {
        // E = [1, 4]: mapping the complement to the exterior disk puts the
        // critical point of G at -2, so M(s) = s + 2.
        let e = bands(&[(1.0, 4.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        assert_eq!(model.numerator().degree(), 1);
        let root = -model.numerator().coeffs()[0].re;
        assert!((root + 2.0).abs() < 1e-8, "root {root}");
        let d = model.validate().unwrap();
        assert!(d.residue_deviation < 1e-10);
    }

    #[test]
    fn single_band_green_value() {
        // G(-2) = 2 log(3 + 2 sqrt 2)
        let e = bands(&[(1.0, 4.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        let g = model.green_sum(c64(-2.0, 0.0)).unwrap();
        let expect = 2.0 * (3.0 + 2.0 * 2f64.sqrt()).ln();
        assert!((g - expect).abs() < 1e-8, "g = {g}, expect = {expect}");
        // boundary value
        let gb = model.green_sum(c64(2.5, 0.0)).unwrap();
        assert!(gb.abs() < 1e-8, "G on E = {gb}");
        // base point
        let th = model.theta(c64(4.0, 0.0)).unwrap();
        assert!(th.norm() < 1e-10);
    }

    #[test]
    fn single_band_theta_values() {
        let e = bands(&[(1.0, 4.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        // Im theta at -2 equals G(-2)
        let th = model.theta(c64(-2.0, 0.0)).unwrap();
        let expect = 2.0 * (3.0 + 2.0 * 2f64.sqrt()).ln();
        assert!((th.im - expect).abs() < 1e-8, "Im theta = {}", th.im);
        // Re theta at the far endpoint b0 = 1 is -2 pi
        let th1 = model.theta(c64(1.0, 0.0)).unwrap();
        assert!((th1.re + 2.0 * PI).abs() < 1e-7, "Re theta(1) = {}", th1.re);
        // consistency Im theta = G at interior points
        for &lam in &[c64(0.5, 1.0), c64(-1.0, 2.0), c64(3.0, 0.5)] {
            let th = model.theta(lam).unwrap();
            let g = model.green_sum(lam).unwrap();
            assert!((th.im - g).abs() < 1e-9);
        }
    }

    #[test]
    fn single_band_harmonic_and_xi() {
        let e = bands(&[(1.0, 4.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        let omega = model.harmonic_measures();
        assert_eq!(omega.len(), 1);
        assert!((omega[0] - 2.0).abs() < 1e-8, "omega = {:?}", omega);
        let xi = model.xi().unwrap();
        assert!((xi - 0.5).abs() < 1e-8, "xi = {xi}");
        // k omega is integral already at k = 1 but k xi needs k = 2
        let rep = rationality_check(&omega, xi, 8, 1e-6);
        assert_eq!(rep.k_detected, Some(2));
    }

    #[test]
    fn mirror_band_xi_is_half() {
        let e = bands(&[(-4.0, -1.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        let xi = model.xi().unwrap();
        assert!((xi - 0.5).abs() < 1e-8, "xi = {xi}");
        let omega = model.harmonic_measures();
        assert!((omega[0] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn symmetric_two_band_model() {
        // E = [-2, -1] u [1, 2]: symmetry and the residue normalization
        // force M(s) = s^2 + 2, critical points +/- i sqrt 2.
        let e = bands(&[(-2.0, -1.0), (1.0, 2.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        assert_eq!(model.numerator().degree(), 2);
        let c1 = model.numerator().coeffs()[1].re;
        let c0 = model.numerator().coeffs()[0].re;
        assert!(c1.abs() < 1e-9, "linear coefficient {c1}");
        assert!((c0 - 2.0).abs() < 1e-9, "constant {c0}");
        let roots = model.critical_points().unwrap();
        for r in &roots {
            assert!(r.re.abs() < 1e-8, "critical point {r}");
        }
        let omega = model.harmonic_measures();
        assert!((omega[0] - 1.0).abs() < 1e-8 && (omega[1] - 1.0).abs() < 1e-8);
        // symmetry forces 2 xi integral; numerically xi = 0 here
        let xi = model.xi().unwrap();
        assert!(xi < 1e-8 || xi > 1.0 - 1e-8, "xi = {xi}");
    }

    #[test]
    fn two_band_measures_sum_to_two() {
        let e = bands(&[(1.0, 2.0), (3.0, 4.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        let omega = model.harmonic_measures();
        assert!(omega.iter().all(|&w| w > 0.0));
        let total: f64 = omega.iter().sum();
        assert!((total - 2.0).abs() < 1e-8, "sum = {total}");
        let d = model.validate().unwrap();
        for gp in &d.gap_periods {
            assert!(gp.abs() < 1e-8);
        }
    }

    #[test]
    fn log_pole_normalization_at_infinity() {
        let e = bands(&[(1.0, 4.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        let g3 = model.green_sum(c64(1e3, 0.0)).unwrap() - (1e3f64).ln();
        let g6 = model.green_sum(c64(1e6, 0.0)).unwrap() - (1e6f64).ln();
        assert!((g3 - g6).abs() < 1e-6, "{g3} vs {g6}");
    }

    #[test]
    fn generic_band_set_fails_rationality() {
        let e = bands(&[(0.9, 2.1), (3.05, 4.4)]);
        let model = solve_green(&e, &quad()).unwrap();
        let omega = model.harmonic_measures();
        let xi = model.xi().unwrap();
        let rep = rationality_check(&omega, xi, 50, 1e-4);
        assert!(rep.k_detected.is_none(), "unexpected k: {:?}", rep.k_detected);
        assert!(rep.residual > 1e-4);
    }

    #[test]
    fn rationality_examples() {
        let rep = rationality_check(&[2.0], 0.5, 8, 1e-8);
        assert_eq!(rep.k_detected, Some(2));
        assert!(rep.residual < 1e-8);
        let rep = rationality_check(&[1.0, 1.0], 0.5, 8, 1e-8);
        assert_eq!(rep.k_detected, Some(2));
        let rep = rationality_check(&[0.7003, 1.2997], 0.37, 50, 1e-4);
        assert_eq!(rep.k_detected, None);
    }

    #[test]
    fn green_nonnegative_off_bands() {
        let e = bands(&[(-2.0, -1.0), (1.0, 2.0)]);
        let model = solve_green(&e, &quad()).unwrap();
        for &x in &[-3.0, -0.5, 0.4, 2.5, 10.0] {
            let g = model.green_sum(c64(x, 0.0)).unwrap();
            assert!(g > -1e-10, "G({x}) = {g}");
        }
        for &(re, im) in &[(0.3, 0.7), (-1.5, 0.2), (2.0, 1.0)] {
            let g = model.green_sum(c64(re, im)).unwrap();
            assert!(g > -1e-10);
        }
    }

    #[test]
    fn xi_stable_under_quadrature_refinement() {
        let e = bands(&[(-2.0, -1.0), (1.0, 2.0)]);
        let coarse = solve_green(&e, &quad()).unwrap();
        let fine_cfg = QuadratureConfig::new(64, 13, 1e-12).unwrap();
        let fine = solve_green(&e, &fine_cfg).unwrap();
        let x1 = coarse.xi().unwrap();
        let x2 = fine.xi().unwrap();
        let d = (x1 - x2).abs().min(1.0 - (x1 - x2).abs());
        assert!(d < 1e-8, "{x1} vs {x2}");
    }
}
