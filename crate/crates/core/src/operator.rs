//! Periodic SMP operators.
//!
//! An SMP operator is the ratio A = A2 A1^{-1} of two invertible periodic
//! tridiagonal factors whose coefficient sequences are tied together by the
//! self-adjointness restrictions.  Both A and A^{-1} = A1 A2^{-1} are
//! five-diagonal, with three-term columns at even (resp. odd) positions,
//! and J = A - A^{-1} is a five-diagonal self-adjoint operator with (after
//! a diagonal gauge) a real second diagonal.

use num_complex::Complex64;

use crate::error::{Error, Result};

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn cone() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Generating coefficients of a period-2k SMP operator.
///
/// Index conventions: `p[i]` is p_i for i = 0..2k-1, `q[n]` is q_{2n},
/// `pi[i]` is pi_i, and `sigma[n]` is sigma_{2n+1}.  The self-adjointness
/// restrictions read, for every n mod 2k,
///
/// ```text
/// p_{2n+1}/q_{2n} = -pi_{2n+1}/sigma_{2n+1},
/// p_{2n+2}/q_{2n+2} = -pi_{2n+2}/sigma_{2n+1}.
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SmpCoefficients {
    pub k: usize,
    pub p: Vec<Complex64>,
    pub q: Vec<f64>,
    pub pi: Vec<Complex64>,
    pub sigma: Vec<f64>,
}

impl SmpCoefficients {
    /// Validate lengths, invertibility and the restrictions.
    pub fn new(
        k: usize,
        p: Vec<Complex64>,
        q: Vec<f64>,
        pi: Vec<Complex64>,
        sigma: Vec<f64>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be positive".into()));
        }
        if p.len() != 2 * k {
            return Err(Error::InvalidInput(format!(
                "p must have length 2k = {}, got {}",
                2 * k,
                p.len()
            )));
        }
        if pi.len() != 2 * k {
            return Err(Error::InvalidInput(format!(
                "pi must have length 2k = {}, got {}",
                2 * k,
                pi.len()
            )));
        }
        if q.len() != k {
            return Err(Error::InvalidInput(format!(
                "q must have length k = {}, got {}",
                k,
                q.len()
            )));
        }
        if sigma.len() != k {
            return Err(Error::InvalidInput(format!(
                "sigma must have length k = {}, got {}",
                k,
                sigma.len()
            )));
        }
        for (n, &v) in q.iter().enumerate() {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "q[{n}] must be nonzero and finite (invertibility of A2)"
                )));
            }
        }
        for (n, &v) in sigma.iter().enumerate() {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "sigma[{n}] must be nonzero and finite (invertibility of A1)"
                )));
            }
        }
        let c = Self { k, p, q, pi, sigma };
        c.check_restrictions()?;
        Ok(c)
    }

    /// Solve the restrictions for pi given free (p, q, sigma).
    pub fn from_free(k: usize, p: Vec<Complex64>, q: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if p.len() != 2 * k || q.len() != k || sigma.len() != k {
            return Err(Error::InvalidInput(
                "from_free expects |p| = 2k, |q| = k, |sigma| = k".into(),
            ));
        }
        let mut pi = vec![czero(); 2 * k];
        for n in 0..k {
            let s = sigma[n];
            // pi_{2n+1} = -sigma_{2n+1} p_{2n+1} / q_{2n}
            pi[(2 * n + 1) % (2 * k)] = -p[(2 * n + 1) % (2 * k)] * s / q[n];
            // pi_{2n+2} = -sigma_{2n+1} p_{2n+2} / q_{2n+2}
            let next = (n + 1) % k;
            pi[(2 * n + 2) % (2 * k)] = -p[(2 * n + 2) % (2 * k)] * s / q[next];
        }
        Self::new(k, p, q, pi, sigma)
    }

    fn check_restrictions(&self) -> Result<()> {
        let d = 2 * self.k;
        for n in 0..self.k {
            let s = self.sigma[n];
            let lhs1 = self.p[(2 * n + 1) % d] / self.q[n];
            let rhs1 = -self.pi[(2 * n + 1) % d] / s;
            if (lhs1 - rhs1).norm() > 1e-12 * (1.0 + lhs1.norm()) {
                return Err(Error::InvalidInput(format!(
                    "restriction violated at odd index {}: p/q = {lhs1}, -pi/sigma = {rhs1}",
                    2 * n + 1
                )));
            }
            let next = (n + 1) % self.k;
            let lhs2 = self.p[(2 * n + 2) % d] / self.q[next];
            let rhs2 = -self.pi[(2 * n + 2) % d] / s;
            if (lhs2 - rhs2).norm() > 1e-12 * (1.0 + lhs2.norm()) {
                return Err(Error::InvalidInput(format!(
                    "restriction violated at even index {}: p/q = {lhs2}, -pi/sigma = {rhs2}",
                    (2 * n + 2) % d
                )));
            }
        }
        Ok(())
    }

    pub fn period(&self) -> usize {
        2 * self.k
    }

    fn q_at(&self, i: usize) -> f64 {
        // q_{2n} stored at n
        self.q[(i / 2) % self.k]
    }

    fn sigma_at(&self, i: usize) -> f64 {
        // sigma_{2n+1} stored at n
        self.sigma[((i - 1) / 2) % self.k]
    }
}

/// Periodic banded operator: entry (i, i + offset) = bands[offset][i mod d].
#[derive(Debug, Clone)]
pub struct PeriodicBanded {
    pub d: usize,
    /// (offset, per-row coefficient sequence of length d)
    pub bands: Vec<(i64, Vec<Complex64>)>,
}

impl PeriodicBanded {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            bands: Vec::new(),
        }
    }

    pub fn set_band(&mut self, offset: i64, values: Vec<Complex64>) {
        assert_eq!(values.len(), self.d);
        if let Some(b) = self.bands.iter_mut().find(|(o, _)| *o == offset) {
            b.1 = values;
        } else {
            self.bands.push((offset, values));
            self.bands.sort_by_key(|(o, _)| *o);
        }
    }

    pub fn entry(&self, row: i64, col: i64) -> Complex64 {
        let offset = col - row;
        for (o, vals) in &self.bands {
            if *o == offset {
                return vals[row.rem_euclid(self.d as i64) as usize];
            }
        }
        czero()
    }

    pub fn bandwidth(&self) -> i64 {
        self.bands
            .iter()
            .filter(|(_, v)| v.iter().any(|x| x.norm() > 0.0))
            .map(|(o, _)| o.abs())
            .max()
            .unwrap_or(0)
    }

    /// Exact product of two periodic banded operators with equal period.
    pub fn mul(&self, other: &PeriodicBanded) -> PeriodicBanded {
        assert_eq!(self.d, other.d);
        let d = self.d as i64;
        let mut out = PeriodicBanded::new(self.d);
        for (o1, v1) in &self.bands {
            for (o2, v2) in &other.bands {
                let off = o1 + o2;
                let mut vals = out
                    .bands
                    .iter()
                    .find(|(o, _)| *o == off)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_else(|| vec![czero(); self.d]);
                for i in 0..self.d {
                    // (i, i+o1) * (i+o1, i+o1+o2)
                    let mid = (i as i64 + o1).rem_euclid(d) as usize;
                    vals[i] += v1[i] * v2[mid];
                }
                out.set_band(off, vals);
            }
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &PeriodicBanded) -> PeriodicBanded {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (o, v) in &other.bands {
            let mut vals = out
                .bands
                .iter()
                .find(|(oo, _)| oo == o)
                .map(|(_, vv)| vv.clone())
                .unwrap_or_else(|| vec![czero(); self.d]);
            for i in 0..self.d {
                vals[i] -= v[i];
            }
            out.set_band(*o, vals);
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.bands
            .retain(|(_, v)| v.iter().any(|x| x.norm() > 1e-300));
        self.bands.sort_by_key(|(o, _)| *o);
    }

    /// Dense window on rows/cols in [-half, half].
    pub fn window(&self, half: i64) -> Vec<Vec<Complex64>> {
        let n = (2 * half + 1) as usize;
        let mut m = vec![vec![czero(); n]; n];
        for (ri, row) in (-half..=half).enumerate() {
            for (ci, col) in (-half..=half).enumerate() {
                m[ri][ci] = self.entry(row, col);
            }
            let _ = ri;
        }
        m
    }

    /// Max deviation from Hermitian symmetry over one period.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.d as i64;
        let mut dev = 0.0f64;
        for (o, v) in &self.bands {
            for i in 0..self.d {
                let a = v[i];
                let b = self.entry(i as i64 + o, i as i64);
                dev = dev.max((a - b.conj()).norm());
            }
            let _ = d;
        }
        dev
    }

    pub fn scale(&self) -> f64 {
        self.bands
            .iter()
            .flat_map(|(_, v)| v.iter().map(|x| x.norm()))
            .fold(0.0, f64::max)
    }
}

/// Five-diagonal self-adjoint periodic operator.
///
/// Row form: entry (n, n-2) = r_n, (n, n-1) = p_n, (n, n) = q_n,
/// (n, n+1) = conj(p_{n+1}), (n, n+2) = conj(r_{n+2}).  For operators in
/// the normal form the second diagonal r is real (and positive for
/// nondegenerate J); complex r is tolerated for intermediate products such
/// as A itself and is flagged by [`FiveDiagonalPeriodic::r_is_real`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiveDiagonalPeriodic {
    pub d: usize,
    pub q: Vec<f64>,
    pub p: Vec<Complex64>,
    pub r: Vec<Complex64>,
}

impl FiveDiagonalPeriodic {
    pub fn new(q: Vec<f64>, p: Vec<Complex64>, r: Vec<Complex64>) -> Result<Self> {
        let d = q.len();
        if d < 2 {
            return Err(Error::InvalidInput("period must be at least 2".into()));
        }
        if p.len() != d || r.len() != d {
            return Err(Error::InvalidInput(
                "diagonals p, q, r must share the period length".into(),
            ));
        }
        Ok(Self { d, q, p, r })
    }

    pub fn diagonal(q: Vec<f64>) -> Result<Self> {
        let d = q.len();
        Self::new(q, vec![czero(); d], vec![czero(); d])
    }

    pub fn r_is_real(&self, tol: f64) -> bool {
        let scale = self.scale().max(1e-300);
        self.r.iter().all(|r| r.im.abs() <= tol * scale)
    }

    pub fn r_positive(&self, tol: f64) -> bool {
        let scale = self.scale().max(1e-300);
        self.r_is_real(tol) && self.r.iter().all(|r| r.re > tol * scale)
    }

    pub fn scale(&self) -> f64 {
        self.q
            .iter()
            .map(|x| x.abs())
            .chain(self.p.iter().map(|x| x.norm()))
            .chain(self.r.iter().map(|x| x.norm()))
            .fold(0.0, f64::max)
    }

    pub fn to_banded(&self) -> PeriodicBanded {
        let d = self.d;
        let mut b = PeriodicBanded::new(d);
        b.set_band(
            0,
            self.q.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        );
        // (n, n-1) = p_n: offset -1 at row n
        b.set_band(-1, self.p.clone());
        // (n, n+1) = conj(p_{n+1})
        b.set_band(
            1,
            (0..d).map(|n| self.p[(n + 1) % d].conj()).collect(),
        );
        b.set_band(-2, self.r.clone());
        b.set_band(
            2,
            (0..d).map(|n| self.r[(n + 2) % d].conj()).collect(),
        );
        b
    }

    /// Extract the five diagonals from a Hermitian periodic banded operator.
    pub fn from_banded(b: &PeriodicBanded) -> Result<Self> {
        if b.bandwidth() > 2 {
            return Err(Error::Numerical(format!(
                "operator has bandwidth {} > 2",
                b.bandwidth()
            )));
        }
        let d = b.d;
        let scale = b.scale().max(1e-300);
        let mut q = vec![0.0; d];
        for i in 0..d {
            let v = b.entry(i as i64, i as i64);
            if v.im.abs() > 1e-12 * scale {
                return Err(Error::Numerical(format!(
                    "diagonal entry {i} is not real: {v}"
                )));
            }
            q[i] = v.re;
        }
        let p: Vec<Complex64> = (0..d).map(|n| b.entry(n as i64, n as i64 - 1)).collect();
        let r: Vec<Complex64> = (0..d).map(|n| b.entry(n as i64, n as i64 - 2)).collect();
        Ok(Self { d, q, p, r })
    }
}

/// The two tridiagonal factors as periodic banded operators.
///
/// A1: odd diagonal sigma, unit even diagonal, pi entries in the even rows.
/// A2: even diagonal q, unit odd diagonal, p entries in the odd rows.
pub fn build_factors(c: &SmpCoefficients) -> Result<(PeriodicBanded, PeriodicBanded)> {
    let d = c.period();
    let mut a1 = PeriodicBanded::new(d);
    let mut diag = vec![cone(); d];
    let mut sub = vec![czero(); d];
    let mut sup = vec![czero(); d];
    for i in 0..d {
        if i % 2 == 1 {
            diag[i] = Complex64::new(c.sigma_at(i), 0.0);
        } else {
            // even row i = 2n: (2n, 2n-1) = pi_{2n}, (2n, 2n+1) = conj(pi_{2n+1})
            sub[i] = c.pi[i];
            sup[i] = c.pi[(i + 1) % d].conj();
        }
    }
    a1.set_band(0, diag);
    a1.set_band(-1, sub);
    a1.set_band(1, sup);

    let mut a2 = PeriodicBanded::new(d);
    let mut diag = vec![cone(); d];
    let mut sub = vec![czero(); d];
    let mut sup = vec![czero(); d];
    for i in 0..d {
        if i % 2 == 0 {
            diag[i] = Complex64::new(c.q_at(i), 0.0);
        } else {
            // odd row i = 2n+1: (i, i-1) = p_{2n+1}, (i, i+1) = conj(p_{2n+2})
            sub[i] = c.p[i];
            sup[i] = c.p[(i + 1) % d].conj();
        }
    }
    a2.set_band(0, diag);
    a2.set_band(-1, sub);
    a2.set_band(1, sup);
    Ok((a1, a2))
}

/// Closed-form tridiagonal inverse of A1 (odd rows are pure sigma).
fn invert_a1(c: &SmpCoefficients) -> PeriodicBanded {
    let d = c.period();
    let mut inv = PeriodicBanded::new(d);
    let mut diag = vec![cone(); d];
    let mut sub = vec![czero(); d];
    let mut sup = vec![czero(); d];
    for i in 0..d {
        if i % 2 == 1 {
            diag[i] = Complex64::new(1.0 / c.sigma_at(i), 0.0);
        } else {
            // x_{2n} = e_{2n} - pi_{2n} e_{2n-1}/sigma_{2n-1}
            //        - conj(pi_{2n+1}) e_{2n+1}/sigma_{2n+1}
            let im1 = (i + d - 1) % d;
            sub[i] = -c.pi[i] / c.sigma_at(im1);
            sup[i] = -c.pi[(i + 1) % d].conj() / c.sigma_at(i + 1);
        }
    }
    inv.set_band(0, diag);
    inv.set_band(-1, sub);
    inv.set_band(1, sup);
    inv
}

/// Closed-form tridiagonal inverse of A2 (even rows are pure q).
fn invert_a2(c: &SmpCoefficients) -> PeriodicBanded {
    let d = c.period();
    let mut inv = PeriodicBanded::new(d);
    let mut diag = vec![cone(); d];
    let mut sub = vec![czero(); d];
    let mut sup = vec![czero(); d];
    for i in 0..d {
        if i % 2 == 0 {
            diag[i] = Complex64::new(1.0 / c.q_at(i), 0.0);
        } else {
            let im1 = (i + d - 1) % d;
            sub[i] = -c.p[i] / c.q_at(im1);
            sup[i] = -c.p[(i + 1) % d].conj() / c.q_at((i + 1) % d);
        }
    }
    inv.set_band(0, diag);
    inv.set_band(-1, sub);
    inv.set_band(1, sup);
    inv
}

/// The SMP operator A = A2 A1^{-1} as a five-diagonal periodic operator.
///
/// The second diagonal of A is complex in general; see
/// [`FiveDiagonalPeriodic::r_is_real`].
pub fn smp_matrix(c: &SmpCoefficients) -> Result<FiveDiagonalPeriodic> {
    let (_, a2) = build_factors(c)?;
    let a = a2.mul(&invert_a1(c));
    let dev = a.hermiticity_defect();
    if dev > 1e-10 * a.scale().max(1.0) {
        return Err(Error::Numerical(format!(
            "A = A2 A1^-1 failed hermiticity check: defect {dev:.3e}"
        )));
    }
    FiveDiagonalPeriodic::from_banded(&a)
}

/// The inverse operator A^{-1} = A1 A2^{-1}.
pub fn smp_inverse_matrix(c: &SmpCoefficients) -> Result<FiveDiagonalPeriodic> {
    let (a1, _) = build_factors(c)?;
    let ainv = a1.mul(&invert_a2(c));
    let dev = ainv.hermiticity_defect();
    if dev > 1e-10 * ainv.scale().max(1.0) {
        return Err(Error::Numerical(format!(
            "A^-1 = A1 A2^-1 failed hermiticity check: defect {dev:.3e}"
        )));
    }
    FiveDiagonalPeriodic::from_banded(&ainv)
}

/// Outcome of forming J = A - A^{-1} in the normal (real-r) form.
#[derive(Debug, Clone)]
pub struct JFromSmp {
    pub j: FiveDiagonalPeriodic,
    /// True when some r_m vanishes (within tolerance) or the diagonal gauge
    /// could not make all r_m positive.
    pub degenerate: bool,
    /// Gauge phases applied: conjugation entry e^{i phase[n]} per residue n.
    pub gauge: Vec<f64>,
}

/// J = A - A^{-1}, gauged by a diagonal unitary so the second diagonal is
/// real and (generically) positive.
///
/// The raw difference has complex second diagonal whenever p is complex;
/// the spectrum-preserving diagonal conjugation that fixes this exists when
/// the phase accumulated around the even-index chain matches the odd one.
/// A mismatch (or a vanishing r entry) is reported via `degenerate`.
pub fn j_from_smp(c: &SmpCoefficients) -> Result<JFromSmp> {
    let a = smp_matrix(c)?.to_banded();
    let ainv = smp_inverse_matrix(c)?.to_banded();
    let diff = a.sub(&ainv);
    let dev = diff.hermiticity_defect();
    let scale = diff.scale().max(1e-300);
    if dev > 1e-11 * scale {
        return Err(Error::Numerical(format!(
            "J = A - A^-1 failed hermiticity check: defect {dev:.3e}"
        )));
    }
    let raw = FiveDiagonalPeriodic::from_banded(&diff)?;
    let d = raw.d;

    // Diagonal gauge U = diag(e^{i phi(n)}) rotates entry (i, j) by
    // e^{i(phi(i) - phi(j))}.  Making r_n = entry (n, n-2) real positive
    // needs phi(n) - phi(n-2) = -arg(r_n) along each parity chain; a linear
    // twist phi(n + d) = phi(n) + tau keeps the result periodic, and the
    // two chains must agree on tau modulo 2 pi.
    let mut degenerate = false;
    let mut phases = vec![0.0f64; d];
    let mut chain_tau = [0.0f64; 2];
    for parity in 0..2usize {
        let mut n = parity;
        loop {
            let next = n + 2;
            let r = raw.r[next % d];
            if r.norm() <= 1e-13 * scale {
                degenerate = true;
            }
            let phi_next = phases[n] - r.arg();
            if next >= d {
                // wrap: phi(parity + d) = phi(parity) + tau = tau
                chain_tau[parity] = phi_next;
                break;
            }
            phases[next] = phi_next;
            n = next;
        }
    }
    let tau = chain_tau[0];
    let mismatch = {
        let delta = chain_tau[0] - chain_tau[1];
        (delta - 2.0 * std::f64::consts::PI * (delta / (2.0 * std::f64::consts::PI)).round()).abs()
    };
    if mismatch > 1e-9 {
        degenerate = true;
    }

    let phi = |m: i64| -> f64 {
        let res = m.rem_euclid(d as i64) as usize;
        let wraps = (m - res as i64) / d as i64;
        phases[res] + wraps as f64 * tau
    };
    let mut p = vec![czero(); d];
    let mut r = vec![czero(); d];
    for n in 0..d {
        let rot_p = Complex64::from_polar(1.0, phi(n as i64) - phi(n as i64 - 1));
        let rot_r = Complex64::from_polar(1.0, phi(n as i64) - phi(n as i64 - 2));
        p[n] = raw.p[n] * rot_p;
        let rn = raw.r[n] * rot_r;
        // Exact up to the chain mismatch, which parks on the odd wrap.
        if rn.im.abs() > 1e-9 * scale {
            degenerate = true;
        }
        r[n] = Complex64::new(rn.re, 0.0);
    }
    let j = FiveDiagonalPeriodic::new(raw.q.clone(), p, r)?;
    if !j.r_positive(1e-12) {
        degenerate = true;
    }
    Ok(JFromSmp {
        j,
        degenerate,
        gauge: phases,
    })
}

/// Rank-2 splitting of A against the half-line decomposition at index 0.
#[derive(Debug, Clone)]
pub struct Rank2Decomposition {
    /// Norm of the cross-block column P_+ A e_{-1}.
    pub coupling_norm: f64,
    /// Unit coupling vector supported on indices 0 and 1 (empty when the
    /// coupling vanishes).
    pub coupling_vector: Vec<Complex64>,
}

/// Split A into block-diagonal halves plus the rank-2 coupling through
/// e_{-1}; the cross entries of an SMP operator live only at
/// (-1,0), (-1,1), (0,-1), (1,-1).
pub fn rank2_decomposition(a: &FiveDiagonalPeriodic) -> Rank2Decomposition {
    let d = a.d;
    // P_+ A e_{-1} = p_0 e_0 + r_1 e_1 with row-form entries:
    // (0, -1) = p_0, (1, -1) = r_1.
    let p0 = a.p[0];
    let r1 = a.r[1 % d];
    let norm = (p0.norm_sqr() + r1.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Rank2Decomposition {
            coupling_norm: 0.0,
            coupling_vector: Vec::new(),
        };
    }
    Rank2Decomposition {
        coupling_norm: norm,
        coupling_vector: vec![p0 / norm, r1 / norm],
    }
}

/// Floquet multiplier of the tridiagonal pencil A2 - lambda A1 with
/// modulus < 1 (decaying direction); independent of the five-diagonal
/// machinery and used as an oracle for the curve-side multiplier.
pub fn pencil_multiplier(c: &SmpCoefficients, lambda: Complex64) -> Result<Complex64> {
    use crate::numerics::determinant;
    let (a1, a2) = build_factors(c)?;
    let d = c.period();
    // det(a2(v) - lambda a1(v)) = c_- / v + c_0 + c_+ v; sample at cube
    // roots of unity and invert the 3-point DFT.
    let mut vals = Vec::with_capacity(3);
    for m in 0..3 {
        let ang = 2.0 * std::f64::consts::PI * m as f64 / 3.0;
        let v = Complex64::from_polar(1.0, ang);
        let mut block = vec![vec![czero(); d]; d];
        for (o, band) in a2.bands.iter() {
            add_symbol_band(&mut block, d, *o, band, v, cone());
        }
        for (o, band) in a1.bands.iter() {
            add_symbol_band(&mut block, d, *o, band, v, -lambda);
        }
        vals.push(determinant(&block));
    }
    let third = 1.0 / 3.0;
    let omega = |j: i32| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 3.0);
    let mut cm = czero();
    let mut c0 = czero();
    let mut cp = czero();
    for m in 0..3 {
        cm += vals[m as usize] * omega(m) * third;
        c0 += vals[m as usize] * third;
        cp += vals[m as usize] * omega(-m) * third;
    }
    // c_+ v^2 + c_0 v + c_- = 0
    if cp.norm() < 1e-300 {
        return Err(Error::Degenerate("pencil symbol lost its v-degree".into()));
    }
    let disc = (c0 * c0 - cp * cm * 4.0).sqrt();
    let v1 = (-c0 + disc) / (cp * 2.0);
    let v2 = (-c0 - disc) / (cp * 2.0);
    let (inside, outside) = if v1.norm() < v2.norm() {
        (v1, v2)
    } else {
        (v2, v1)
    };
    if inside.norm() >= 1.0 - 1e-10 || outside.norm() <= 1.0 + 1e-10 {
        return Err(Error::BranchAmbiguity(format!(
            "pencil multipliers not separated by the unit circle at lambda = {lambda}: |v| = {}, {}",
            inside.norm(),
            outside.norm()
        )));
    }
    Ok(inside)
}

/// Add `factor * band` of a periodic symbol to a dense block, with the
/// wrap rule: column underflow multiplies by 1/v, overflow by v.
pub(crate) fn add_symbol_band(
    block: &mut [Vec<Complex64>],
    d: usize,
    offset: i64,
    band: &[Complex64],
    v: Complex64,
    factor: Complex64,
) {
    for i in 0..d {
        let mut col = i as i64 + offset;
        let mut w_pow = cone();
        while col < 0 {
            col += d as i64;
            w_pow /= v;
        }
        while col >= d as i64 {
            col -= d as i64;
            w_pow *= v;
        }
        block[i][col as usize] += factor * band[i] * w_pow;
    }
}
