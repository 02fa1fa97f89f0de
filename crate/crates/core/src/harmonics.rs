//! Scalar and vector spherical harmonics and the vector Debye potentials in
//! the local spherical frame `(e_r, e_θ, e_φ)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::specfun::{BesselKind, RadialTable, SpecFunError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarmonicsError {
    #[error("invalid harmonic index n={n}, m={m}")]
    Index { n: usize, m: i64 },
    #[error("{kind:?} modes require n >= 1")]
    KindOrder { kind: ModeKind },
    #[error("invalid direction: {0}")]
    Direction(&'static str),
    #[error("radiating field evaluated at r = 0")]
    Singular,
    #[error("radius must be finite and non-negative, got {0}")]
    Radius(f64),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Polar angle in `[0, π]` and azimuth in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SphericalDirection {
    theta: f64,
    phi: f64,
}

impl SphericalDirection {
    /// `phi` is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self, HarmonicsError> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(HarmonicsError::Direction("non-finite angle"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(HarmonicsError::Direction("theta outside [0, pi]"));
        }
        let mut phi = phi % (2.0 * PI);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    /// Direction of a nonzero vector (need not be unit).
    pub fn from_vector(x: [f64; 3]) -> Result<Self, HarmonicsError> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if !r.is_finite() || r <= 0.0 {
            return Err(HarmonicsError::Direction("zero or non-finite vector"));
        }
        let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
        Self::new(theta, x[1].atan2(x[0]))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn e_r(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn e_theta(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [ct * cp, ct * sp, -st]
    }

    pub fn e_phi(&self) -> [f64; 3] {
        let (sp, cp) = self.phi.sin_cos();
        [-sp, cp, 0.0]
    }
}

/// Debye mode family: pressure `L`, shear `M` (toroidal) and shear `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModeKind {
    L,
    M,
    N,
}

impl ModeKind {
    pub const ALL: [ModeKind; 3] = [ModeKind::L, ModeKind::M, ModeKind::N];

    pub fn index(self) -> usize {
        match self {
            ModeKind::L => 0,
            ModeKind::M => 1,
            ModeKind::N => 2,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            ModeKind::L => 'L',
            ModeKind::M => 'M',
            ModeKind::N => 'N',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'L' => Some(ModeKind::L),
            'M' => Some(ModeKind::M),
            'N' => Some(ModeKind::N),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    kind: ModeKind,
    n: usize,
    m: i64,
}

impl ModeIndex {
    pub fn new(kind: ModeKind, n: usize, m: i64) -> Result<Self, HarmonicsError> {
        if m.unsigned_abs() as usize > n {
            return Err(HarmonicsError::Index { n, m });
        }
        if kind != ModeKind::L && n == 0 {
            return Err(HarmonicsError::KindOrder { kind });
        }
        Ok(Self { kind, n, m })
    }

    pub fn kind(&self) -> ModeKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> i64 {
        self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VecHarmKind {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `h_n^{(1)}`-based, outgoing.
    Radiating,
    /// `j_n`-based, finite at the origin.
    Entire,
}

/// Complex vector in the `(e_r, e_θ, e_φ)` frame of some direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector3(pub [Complex64; 3]);

impl FrameVector3 {
    pub const ZERO: FrameVector3 = FrameVector3([Complex64::new(0.0, 0.0); 3]);

    pub fn new(r: Complex64, theta: Complex64, phi: Complex64) -> Self {
        Self([r, theta, phi])
    }

    pub fn r(&self) -> Complex64 {
        self.0[0]
    }

    pub fn theta(&self) -> Complex64 {
        self.0[1]
    }

    pub fn phi(&self) -> Complex64 {
        self.0[2]
    }

    /// `Σ a_i conj(b_i)`.
    pub fn dot_conj(&self, other: &FrameVector3) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_cartesian(&self, dir: &SphericalDirection) -> [Complex64; 3] {
        let (er, et, ep) = (dir.e_r(), dir.e_theta(), dir.e_phi());
        core::array::from_fn(|i| self.0[0] * er[i] + self.0[1] * et[i] + self.0[2] * ep[i])
    }

    pub fn from_cartesian(v: [Complex64; 3], dir: &SphericalDirection) -> Self {
        let dot = |e: [f64; 3]| v[0] * e[0] + v[1] * e[1] + v[2] * e[2];
        Self([dot(dir.e_r()), dot(dir.e_theta()), dot(dir.e_phi())])
    }
}

impl Add for FrameVector3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(core::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for FrameVector3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(core::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<Complex64> for FrameVector3 {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }
}

impl Mul<f64> for FrameVector3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }
}

/// Orthonormalised associated Legendre data of degree `n` at one polar angle,
/// Condon–Shortley phase included, for `m = 0..=n`.
#[derive(Debug, Clone)]
pub struct LegendreRow {
    pub value: Vec<f64>,
    /// `value[m] / sin θ`, finite at the poles; zero for `m = 0`.
    pub over_sin: Vec<f64>,
    pub dtheta: Vec<f64>,
}

impl LegendreRow {
    pub fn new(n: usize, theta: f64) -> Self {
        let (s, x) = theta.sin_cos();
        let mut value = vec![0.0; n + 1];
        let mut over_sin = vec![0.0; n + 1];
        let mut diag = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=n {
            let mut diag_over_sin = 0.0;
            if m > 0 {
                let f = -((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
                diag_over_sin = f * diag;
                diag *= f * s;
            }
            value[m] = climb(n, m, x, diag);
            over_sin[m] = if m > 0 { climb(n, m, x, diag_over_sin) } else { 0.0 };
        }
        let nf = n as f64;
        let dtheta = (0..=n)
            .map(|m| {
                let mf = m as f64;
                let up = if m < n { value[m + 1] } else { 0.0 };
                if m == 0 {
                    (nf * (nf + 1.0)).sqrt() * up
                } else {
                    0.5 * (((nf - mf) * (nf + mf + 1.0)).sqrt() * up
                        - ((nf + mf) * (nf - mf + 1.0)).sqrt() * value[m - 1])
                }
            })
            .collect();
        Self { value, over_sin, dtheta }
    }
}

/// Three-term recurrence in degree at fixed order, started from `ȳ_m^m`.
fn climb(n: usize, m: usize, x: f64, start: f64) -> f64 {
    if n == m {
        return start;
    }
    let mut prev = start;
    let mut cur = ((2 * m + 3) as f64).sqrt() * x * start;
    let mf = (m * m) as f64;
    for l in m + 2..=n {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf)).sqrt();
        let b = (((lf - 1.0) * (lf - 1.0) - mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
    }
    cur
}

fn check_index(n: usize, m: i64) -> Result<usize, HarmonicsError> {
    let am = m.unsigned_abs() as usize;
    if am > n {
        return Err(HarmonicsError::Index { n, m });
    }
    Ok(am)
}

fn neg_m_sign(m: i64) -> f64 {
    if m < 0 && m % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

/// `Y_nm(θ, φ)`.
pub fn sph_harm(n: usize, m: i64, dir: &SphericalDirection) -> Result<Complex64, HarmonicsError> {
    let am = check_index(n, m)?;
    let row = LegendreRow::new(n, dir.theta);
    let y = Complex64::from_polar(row.value[am], am as f64 * dir.phi);
    Ok(if m < 0 { y.conj() * neg_m_sign(m) } else { y })
}

/// Vector spherical harmonics `A_nm = e_r Y_nm`, `B_nm = ∇_S Y_nm / √(n(n+1))`
/// and `C_nm = B_nm × e_r`.
pub fn vec_harm(
    kind: VecHarmKind,
    n: usize,
    m: i64,
    dir: &SphericalDirection,
) -> Result<FrameVector3, HarmonicsError> {
    let am = check_index(n, m)?;
    if kind != VecHarmKind::A && n == 0 {
        return Err(HarmonicsError::Index { n, m });
    }
    let row = LegendreRow::new(n, dir.theta);
    let e = Complex64::from_polar(1.0, am as f64 * dir.phi);
    let z = Complex64::zero();
    let v = match kind {
        VecHarmKind::A => FrameVector3::new(e * row.value[am], z, z),
        VecHarmKind::B | VecHarmKind::C => {
            let s = 1.0 / ((n * (n + 1)) as f64).sqrt();
            let bt = e * (row.dtheta[am] * s);
            let bp = e * Complex64::new(0.0, am as f64 * row.over_sin[am] * s);
            if kind == VecHarmKind::B {
                FrameVector3::new(z, bt, bp)
            } else {
                FrameVector3::new(z, bp, -bt)
            }
        }
    };
    Ok(if m < 0 { v.conj() * neg_m_sign(m) } else { v })
}

/// Vector Debye potential `H^ȷ_nm` (radiating) or `J^ȷ_nm` (entire) at
/// `r · dir`.
pub fn debye_potential(
    mode: ModeIndex,
    family: Family,
    r: f64,
    dir: &SphericalDirection,
    kappa_p: f64,
    kappa_s: f64,
) -> Result<FrameVector3, HarmonicsError> {
    if !r.is_finite() || r < 0.0 {
        return Err(HarmonicsError::Radius(r));
    }
    if r == 0.0 && family == Family::Radiating {
        return Err(HarmonicsError::Singular);
    }
    let bessel = match family {
        Family::Radiating => BesselKind::H1,
        Family::Entire => BesselKind::J,
    };
    let (n, m) = (mode.n, mode.m);
    let nn = (n * (n + 1)) as f64;
    let sq = nn.sqrt();
    match mode.kind {
        ModeKind::L => {
            let f = RadialTable::new(bessel, n, kappa_p * r)?;
            let mut v = vec_harm(VecHarmKind::A, n, m, dir)? * f.deriv[n];
            if n > 0 {
                v = v + vec_harm(VecHarmKind::B, n, m, dir)? * (f.over_t(n) * sq);
            }
            Ok(v)
        }
        ModeKind::M => {
            let f = RadialTable::new(bessel, n, kappa_s * r)?;
            Ok(vec_harm(VecHarmKind::C, n, m, dir)? * (f.value[n] * sq))
        }
        ModeKind::N => {
            let f = RadialTable::new(bessel, n, kappa_s * r)?;
            Ok(vec_harm(VecHarmKind::A, n, m, dir)? * (f.over_t(n) * nn)
                + vec_harm(VecHarmKind::B, n, m, dir)? * (f.riccati_over_t(n) * sq))
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(order);
    for i in 0..order {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 1 { x } else { p1 };
            let pm1 = if order == 1 { 1.0 } else { p0 };
            dp = order as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos θ` with `order`
/// nodes times a uniform `2·order`-point rule in `φ`.
pub fn sphere_quadrature(order: usize) -> Vec<(SphericalDirection, f64)> {
    let order = order.max(1);
    let nphi = 2 * order;
    let dphi = 2.0 * PI / nphi as f64;
    let mut out = Vec::with_capacity(order * nphi);
    for (x, w) in gauss_legendre(order) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for k in 0..nphi {
            let dir = SphericalDirection { theta, phi: k as f64 * dphi };
            out.push((dir, w * dphi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(t: f64, p: f64) -> SphericalDirection {
        SphericalDirection::new(t, p).unwrap()
    }

    #[test]
    fn low_order_values() {
        let y00 = sph_harm(0, 0, &dir(0.7, 1.1)).unwrap();
        assert!((y00.re - 0.282094791774).abs() < 1e-12 && y00.im == 0.0);
        let y10 = sph_harm(1, 0, &dir(0.0, 0.0)).unwrap();
        assert!((y10.re - 0.488602511903).abs() < 1e-12);
        let b = vec_harm(VecHarmKind::B, 1, 0, &dir(PI / 2.0, 0.3)).unwrap();
        assert!((b.theta().re + 0.345494149471).abs() < 1e-12);
        assert!(b.r().norm() == 0.0 && b.phi().norm() < 1e-15);
    }

    #[test]
    fn matches_closed_form_y21() {
        let d = dir(0.9, 2.3);
        let (st, ct) = d.theta().sin_cos();
        let expect = Complex64::from_polar(-(15.0 / (8.0 * PI)).sqrt() * st * ct, d.phi());
        assert!((sph_harm(2, 1, &d).unwrap() - expect).norm() < 1e-14);
        let neg = sph_harm(2, -1, &d).unwrap();
        assert!((neg + expect.conj()).norm() < 1e-14);
    }

    #[test]
    fn index_errors() {
        assert!(sph_harm(1, 2, &dir(0.1, 0.0)).is_err());
        assert!(vec_harm(VecHarmKind::B, 0, 0, &dir(0.1, 0.0)).is_err());
        assert!(ModeIndex::new(ModeKind::M, 0, 0).is_err());
        assert!(SphericalDirection::new(4.0, 0.0).is_err());
    }

    #[test]
    fn pole_limits_are_finite_and_continuous() {
        for m in -3..=3i64 {
            let at = vec_harm(VecHarmKind::B, 3, m, &dir(0.0, 0.4)).unwrap();
            let near = vec_harm(VecHarmKind::B, 3, m, &dir(1e-10, 0.4)).unwrap();
            assert!(at.is_finite());
            assert!((at - near).norm_sqr().sqrt() < 1e-8, "m={m}");
        }
    }

    #[test]
    fn quadrature_weights() {
        let q = sphere_quadrature(9);
        let s: f64 = q.iter().map(|(_, w)| w).sum();
        assert!((s - 4.0 * PI).abs() < 1e-12);
        let y: Complex64 = q.iter().map(|(d, w)| sph_harm(0, 0, d).unwrap() * *w).sum();
        assert!((y.re - (4.0 * PI).sqrt()).abs() < 1e-12);
        let n32: f64 = q.iter().map(|(d, w)| sph_harm(3, 2, d).unwrap().norm_sqr() * w).sum();
        assert!((n32 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn monopole_entire_l() {
        let d = dir(0.3, 0.2);
        let mode = ModeIndex::new(ModeKind::L, 0, 0).unwrap();
        let v = debye_potential(mode, Family::Entire, 1.3, &d, 0.7, 1.1).unwrap();
        let t = 0.7 * 1.3;
        let j0p = t.cos() / t - t.sin() / (t * t);
        assert!((v.r().re - j0p / (4.0 * PI).sqrt()).abs() < 1e-14);
        assert!(v.theta().norm() == 0.0 && v.phi().norm() == 0.0);
    }

    #[test]
    fn entire_fields_bounded_near_origin() {
        let d = dir(1.0, 0.5);
        for kind in ModeKind::ALL {
            for n in 1..4 {
                let mode = ModeIndex::new(kind, n, 1).unwrap();
                let v = debye_potential(mode, Family::Entire, 1e-8, &d, 0.6, 1.0).unwrap();
                assert!(v.is_finite() && v.norm_sqr() < 10.0);
            }
        }
        let mode = ModeIndex::new(ModeKind::N, 1, 0).unwrap();
        assert!(matches!(
            debye_potential(mode, Family::Radiating, 0.0, &d, 1.0, 1.0),
            Err(HarmonicsError::Singular)
        ));
    }
}
