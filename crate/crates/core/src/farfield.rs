//! Plane-wave incident expansions, scattered multipole amplitudes `γ` and
//! far-field patterns.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::harmonics::{
    debye_potential, sphere_quadrature, vec_harm, Family, FrameVector3, HarmonicsError, ModeIndex,
    ModeKind, SphericalDirection, VecHarmKind,
};
use crate::medium::{wave_numbers, Material, MediumError};
use crate::scattering::{EscPair, EscTable};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FarFieldError {
    #[error("direction must be a unit vector")]
    NotUnit,
    #[error("shear polarisation must be a unit vector orthogonal to the direction")]
    Polarization,
    #[error("truncation order must be at least 1")]
    Order,
    #[error("ESC table has order {table} but the incident expansion needs {needed}")]
    Truncation { table: usize, needed: usize },
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum IncidentKind {
    Pressure,
    Shear,
}

/// `d e^{iκ_P x·d}` or `q e^{iκ_S x·d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentWave {
    kind: IncidentKind,
    d: [f64; 3],
    q: [f64; 3],
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn is_unit(v: [f64; 3]) -> bool {
    (dot(v, v).sqrt() - 1.0).abs() <= 1e-12
}

impl IncidentWave {
    pub fn pressure(d: [f64; 3]) -> Result<Self, FarFieldError> {
        if !is_unit(d) {
            return Err(FarFieldError::NotUnit);
        }
        Ok(Self { kind: IncidentKind::Pressure, d, q: d })
    }

    pub fn shear(d: [f64; 3], q: [f64; 3]) -> Result<Self, FarFieldError> {
        if !is_unit(d) {
            return Err(FarFieldError::NotUnit);
        }
        if !is_unit(q) || dot(d, q).abs() > 1e-12 {
            return Err(FarFieldError::Polarization);
        }
        Ok(Self { kind: IncidentKind::Shear, d, q })
    }

    pub fn kind(&self) -> IncidentKind {
        self.kind
    }

    pub fn direction(&self) -> [f64; 3] {
        self.d
    }

    /// `p = (d × q) × d`; equal to `q` for a unit orthogonal `q`.
    pub fn p(&self) -> [f64; 3] {
        cross(cross(self.d, self.q), self.d)
    }

    /// Exact displacement at `x`.
    pub fn field(&self, x: [f64; 3], kappa_p: f64, kappa_s: f64) -> [Complex64; 3] {
        let (kappa, pol) = match self.kind {
            IncidentKind::Pressure => (kappa_p, self.d),
            IncidentKind::Shear => (kappa_s, self.q),
        };
        let e = Complex64::from_polar(1.0, kappa * dot(x, self.d));
        pol.map(|c| e * c)
    }
}

/// Flat index of `(n, m)` in arrays covering `n = 0..=K`, `|m| ≤ n`.
pub fn nm_index(n: usize, m: i64) -> usize {
    ((n * n + n) as i64 + m) as usize
}

fn nm_len(order: usize) -> usize {
    (order + 1) * (order + 1)
}

/// Incident expansion `Σ a_kl J^L_kl + Σ (b_kl J^M_kl + c_kl J^N_kl)/√(k(k+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidentCoeffs {
    pub order: usize,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub c: Vec<Complex64>,
}

fn cart_conj_dot(v: &FrameVector3, dir: &SphericalDirection, p: [f64; 3]) -> Complex64 {
    let c = v.to_cartesian(dir);
    c[0].conj() * p[0] + c[1].conj() * p[1] + c[2].conj() * p[2]
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Vector Jacobi–Anger coefficients of a plane wave up to order `K`.
pub fn plane_wave_coeffs(
    wave: &IncidentWave,
    order: usize,
    kappa_p: f64,
    kappa_s: f64,
) -> Result<IncidentCoeffs, FarFieldError> {
    if order < 1 {
        return Err(FarFieldError::Order);
    }
    if !(kappa_p > 0.0 && kappa_s > 0.0) {
        return Err(FarFieldError::Medium(MediumError::Omega(kappa_p.min(kappa_s))));
    }
    let len = nm_len(order);
    let mut out = IncidentCoeffs {
        order,
        a: vec![Complex64::zero(); len],
        b: vec![Complex64::zero(); len],
        c: vec![Complex64::zero(); len],
    };
    let dir = SphericalDirection::from_vector(wave.d)?;
    let four_pi = -4.0 * PI;
    for k in 0..=order {
        for l in -(k as i64)..=k as i64 {
            let i = nm_index(k, l);
            match wave.kind {
                IncidentKind::Pressure => {
                    let a = vec_harm(VecHarmKind::A, k, l, &dir)?;
                    out.a[i] = i_pow(k + 1) * cart_conj_dot(&a, &dir, wave.d) * four_pi;
                }
                IncidentKind::Shear if k >= 1 => {
                    let p = wave.p();
                    let cv = vec_harm(VecHarmKind::C, k, l, &dir)?;
                    let bv = vec_harm(VecHarmKind::B, k, l, &dir)?;
                    // With C = B × e_r the toroidal coefficient carries +4π.
                    out.b[i] = -(i_pow(k) * cart_conj_dot(&cv, &dir, p) * four_pi);
                    out.c[i] = i_pow(k + 1) * cart_conj_dot(&bv, &dir, p) * four_pi;
                }
                IncidentKind::Shear => {}
            }
        }
    }
    Ok(out)
}

/// Truncated incident expansion evaluated at a nonzero point `x`.
pub fn incident_partial_sum(
    coeffs: &IncidentCoeffs,
    x: [f64; 3],
    kappa_p: f64,
    kappa_s: f64,
) -> Result<[Complex64; 3], FarFieldError> {
    let r = dot(x, x).sqrt();
    let dir = SphericalDirection::from_vector(x)?;
    let mut sum = FrameVector3::ZERO;
    for k in 0..=coeffs.order {
        let w = if k > 0 { 1.0 / ((k * (k + 1)) as f64).sqrt() } else { 0.0 };
        for l in -(k as i64)..=k as i64 {
            let i = nm_index(k, l);
            let mut add = |kind: ModeKind, coef: Complex64| -> Result<(), FarFieldError> {
                if !coef.is_zero() {
                    let mode = ModeIndex::new(kind, k, l)?;
                    sum = sum + debye_potential(mode, Family::Entire, r, &dir, kappa_p, kappa_s)? * coef;
                }
                Ok(())
            };
            add(ModeKind::L, coeffs.a[i])?;
            if k > 0 {
                add(ModeKind::M, coeffs.b[i] * w)?;
                add(ModeKind::N, coeffs.c[i] * w)?;
            }
        }
    }
    Ok(sum.to_cartesian(&dir))
}

/// Scattered multipole amplitudes `γ^ȷ_nm` for `n = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaCoeffs {
    pub order: usize,
    pub l: Vec<Complex64>,
    pub m: Vec<Complex64>,
    pub n: Vec<Complex64>,
}

impl GammaCoeffs {
    pub fn zeros(order: usize) -> Self {
        let len = nm_len(order);
        Self { order, l: vec![Complex64::zero(); len], m: vec![Complex64::zero(); len], n: vec![Complex64::zero(); len] }
    }

    pub fn get(&self, kind: ModeKind, n: usize, m: i64) -> Complex64 {
        let i = nm_index(n, m);
        match kind {
            ModeKind::L => self.l[i],
            ModeKind::M => self.m[i],
            ModeKind::N => self.n[i],
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let f = |v: &Vec<Complex64>| v.iter().map(|z| z * s).collect();
        Self { order: self.order, l: f(&self.l), m: f(&self.m), n: f(&self.n) }
    }
}

/// `γ` for a spherical stack, where the ESC are diagonal in `(n, m)`.
pub fn gamma_coeffs(table: &EscTable, inc: &IncidentCoeffs) -> Result<GammaCoeffs, FarFieldError> {
    if table.order() < inc.order {
        return Err(FarFieldError::Truncation { table: table.order(), needed: inc.order });
    }
    let mut g = GammaCoeffs::zeros(inc.order);
    for n in 0..=inc.order {
        let row = &table.rows[n];
        let w = if n > 0 { 1.0 / ((n * (n + 1)) as f64).sqrt() } else { 0.0 };
        for m in -(n as i64)..=n as i64 {
            let i = nm_index(n, m);
            let (a, b, c) = (inc.a[i], inc.b[i] * w, inc.c[i] * w);
            g.l[i] = a * row.get(EscPair::LL) + c * row.get(EscPair::LN) + b * row.get(EscPair::new(ModeKind::L, ModeKind::M));
            g.n[i] = a * row.get(EscPair::NL) + c * row.get(EscPair::NN) + b * row.get(EscPair::new(ModeKind::N, ModeKind::M));
            g.m[i] = b * row.get(EscPair::MM)
                + a * row.get(EscPair::new(ModeKind::M, ModeKind::L))
                + c * row.get(EscPair::new(ModeKind::M, ModeKind::N));
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldSample {
    pub direction: SphericalDirection,
    pub u_p: FrameVector3,
    pub u_s: FrameVector3,
}

/// Longitudinal and transverse far-field patterns in the frame of `direction`.
pub fn far_field_amplitude(
    gammas: &GammaCoeffs,
    direction: &SphericalDirection,
    background: &Material,
    omega: f64,
) -> Result<FarFieldSample, FarFieldError> {
    let w = wave_numbers(background, omega)?;
    let mut u_p = FrameVector3::ZERO;
    let mut u_s = FrameVector3::ZERO;
    let ip = Complex64::new(0.0, w.kappa_p / (w.c_p * w.c_p));
    for n in 0..=gammas.order {
        // e^{-inπ/2} = (-i)^n
        let e_n = i_pow(n).conj();
        let e_n1 = i_pow(n + 1).conj();
        let is = if n > 0 {
            Complex64::new(0.0, w.kappa_s / (((n * (n + 1)) as f64).sqrt() * w.c_s * w.c_s))
        } else {
            Complex64::zero()
        };
        for m in -(n as i64)..=n as i64 {
            let i = nm_index(n, m);
            if !gammas.l[i].is_zero() {
                u_p = u_p + vec_harm(VecHarmKind::A, n, m, direction)? * (ip * gammas.l[i] * e_n);
            }
            if n > 0 && !(gammas.m[i].is_zero() && gammas.n[i].is_zero()) {
                u_s = u_s
                    + vec_harm(VecHarmKind::C, n, m, direction)? * (is * gammas.m[i] * e_n1)
                    + vec_harm(VecHarmKind::B, n, m, direction)? * (is * gammas.n[i] * e_n);
            }
        }
    }
    Ok(FarFieldSample { direction: *direction, u_p, u_s })
}

/// Coefficient-space values of `∫|u∞_P|²` and `∫|u∞_S|²` over the sphere.
pub fn parseval_parts(gammas: &GammaCoeffs, background: &Material, omega: f64) -> Result<(f64, f64), FarFieldError> {
    let w = wave_numbers(background, omega)?;
    let cp = (w.kappa_p / (w.c_p * w.c_p)).powi(2);
    let mut p = 0.0;
    let mut s = 0.0;
    for n in 0..=gammas.order {
        let cs = if n > 0 { (w.kappa_s / (((n * (n + 1)) as f64).sqrt() * w.c_s * w.c_s)).powi(2) } else { 0.0 };
        for m in -(n as i64)..=n as i64 {
            let i = nm_index(n, m);
            p += cp * gammas.l[i].norm_sqr();
            if n > 0 {
                s += cs * (gammas.m[i].norm_sqr() + gammas.n[i].norm_sqr());
            }
        }
    }
    Ok((p, s))
}

/// `∫_{S²} |u∞_P|² + |u∞_S|²` from the Parseval identity.
pub fn total_scattering_strength(gammas: &GammaCoeffs, background: &Material, omega: f64) -> Result<f64, FarFieldError> {
    let (p, s) = parseval_parts(gammas, background, omega)?;
    Ok(p + s)
}

/// Quadrature values of `∫|u∞_P|²` and `∫|u∞_S|²`.
pub fn quadrature_parts(
    gammas: &GammaCoeffs,
    background: &Material,
    omega: f64,
    order: usize,
) -> Result<(f64, f64), FarFieldError> {
    let mut p = 0.0;
    let mut s = 0.0;
    for (dir, wt) in sphere_quadrature(order) {
        let f = far_field_amplitude(gammas, &dir, background, omega)?;
        p += wt * f.u_p.norm_sqr();
        s += wt * f.u_s.norm_sqr();
    }
    Ok((p, s))
}

/// Far-field data of a plane wave hitting a stack whose ESC table is given.
pub fn plane_wave_gammas(
    table: &EscTable,
    wave: &IncidentWave,
    background: &Material,
    order: usize,
) -> Result<GammaCoeffs, FarFieldError> {
    let w = wave_numbers(background, table.omega)?;
    let inc = plane_wave_coeffs(wave, order, w.kappa_p, w.kappa_s)?;
    gamma_coeffs(table, &inc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::EscRow;

    fn table_with(order: usize, f: impl Fn(&mut EscRow)) -> EscTable {
        let rows = (0..=order)
            .map(|n| {
                let mut r = EscRow::zero(n);
                f(&mut r);
                r
            })
            .collect();
        EscTable { omega: 1.0, rows }
    }

    #[test]
    fn shear_has_no_pressure_part() {
        let wave = IncidentWave::shear([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        let c = plane_wave_coeffs(&wave, 4, 0.5, 1.0).unwrap();
        assert!(c.a.iter().all(|z| z.is_zero()));
    }

    #[test]
    fn axial_pressure_only_m_zero() {
        let wave = IncidentWave::pressure([0.0, 0.0, 1.0]).unwrap();
        let c = plane_wave_coeffs(&wave, 5, 0.5, 1.0).unwrap();
        for k in 0..=5usize {
            for l in -(k as i64)..=k as i64 {
                let v = c.a[nm_index(k, l)];
                if l == 0 {
                    assert!(v.norm() > 1e-3);
                } else {
                    assert!(v.norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn zero_table_gives_zero_gamma() {
        let wave = IncidentWave::pressure([0.0, 0.6, 0.8]).unwrap();
        let c = plane_wave_coeffs(&wave, 3, 0.5, 1.0).unwrap();
        let g = gamma_coeffs(&table_with(3, |_| {}), &c).unwrap();
        assert!(g.l.iter().chain(&g.m).chain(&g.n).all(|z| z.is_zero()));
        assert!(matches!(gamma_coeffs(&table_with(2, |_| {}), &c), Err(FarFieldError::Truncation { .. })));
    }

    #[test]
    fn single_mm_entry_collapses() {
        let w = Complex64::new(0.3, -0.2);
        let t = table_with(2, |r| {
            if r.n == 1 {
                r.set(EscPair::MM, w);
            }
        });
        let wave = IncidentWave::shear([0.0, 0.0, 1.0], [0.0, 1.0, 0.0]).unwrap();
        let inc = plane_wave_coeffs(&wave, 2, 0.5, 1.0).unwrap();
        let g = gamma_coeffs(&t, &inc).unwrap();
        for m in -1..=1 {
            let i = nm_index(1, m);
            assert!((g.m[i] - inc.b[i] * w / 2f64.sqrt()).norm() < 1e-15);
        }
        assert!(g.l.iter().chain(&g.n).all(|z| z.is_zero()));
    }

    #[test]
    fn single_monopole_term() {
        let mut g = GammaCoeffs::zeros(1);
        g.l[0] = Complex64::new(1.0, 0.0);
        let mat = Material::unit();
        let d = SphericalDirection::new(0.4, 1.0).unwrap();
        let f = far_field_amplitude(&g, &d, &mat, 1.0).unwrap();
        let w = wave_numbers(&mat, 1.0).unwrap();
        let want = w.kappa_p / (w.c_p * w.c_p) / (4.0 * PI).sqrt();
        assert!((f.u_p.r() - Complex64::new(0.0, want)).norm() < 1e-15);
        assert_eq!(f.u_s, FrameVector3::ZERO);
    }

    #[test]
    fn invalid_waves_rejected() {
        assert!(IncidentWave::pressure([1.0, 1.0, 0.0]).is_err());
        assert!(IncidentWave::shear([0.0, 0.0, 1.0], [0.0, 0.6, 0.8]).is_err());
        let wave = IncidentWave::pressure([0.0, 0.0, 1.0]).unwrap();
        assert!(plane_wave_coeffs(&wave, 0, 0.5, 1.0).is_err());
    }
}
