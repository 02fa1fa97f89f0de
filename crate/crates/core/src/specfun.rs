//! Spherical Bessel, Neumann and Hankel functions with derivatives and the
//! Riccati-type combinations used by the Debye potentials.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    #[error("argument must be a finite non-negative number, got {0}")]
    Domain(f64),
    #[error("{0} is singular at the origin")]
    Singular(&'static str),
    #[error("double factorial argument must be >= -1, got {0}")]
    DoubleFactorialDomain(i64),
    #[error("double factorial of {0} overflows u128")]
    DoubleFactorialOverflow(i64),
}

/// Which radial family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BesselKind {
    /// Spherical Bessel `j_n`, entire.
    J,
    /// Spherical Neumann `y_n`.
    Y,
    /// Outgoing spherical Hankel `h_n = j_n + i y_n`.
    H1,
}

/// `k!!` with `0!! = (-1)!! = 1`.
pub fn double_factorial(k: i64) -> Result<u128, SpecFunError> {
    if k < -1 {
        return Err(SpecFunError::DoubleFactorialDomain(k));
    }
    let mut acc: u128 = 1;
    let mut i = k;
    while i > 1 {
        acc = acc
            .checked_mul(i as u128)
            .ok_or(SpecFunError::DoubleFactorialOverflow(k))?;
        i -= 2;
    }
    Ok(acc)
}

/// `k!!` as a float, for use in asymptotic prefactors.
pub fn double_factorial_f64(k: i64) -> f64 {
    let mut acc = 1.0;
    let mut i = k;
    while i > 1 {
        acc *= i as f64;
        i -= 2;
    }
    acc
}

fn check_arg(t: f64) -> Result<(), SpecFunError> {
    if !t.is_finite() || t < 0.0 {
        return Err(SpecFunError::Domain(t));
    }
    Ok(())
}

/// Ascending series for a single order, accurate whenever `t` is not large
/// compared with `n`.
fn j_series(n: usize, t: f64) -> f64 {
    let mut lead = 1.0;
    for i in 1..=n {
        lead *= t / (2 * i + 1) as f64;
    }
    let x = -0.5 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..400 {
        term *= x / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Miller's downward recurrence for orders `0..=nmax`, normalised against
/// whichever of `j_0`, `j_1` is larger.
fn j_miller(nmax: usize, t: f64) -> Vec<f64> {
    let big = nmax.max(t.ceil() as usize);
    let start = big + 30 + (40.0 * big as f64).sqrt().ceil() as usize;
    let mut out = vec![0.0; nmax + 1];
    let mut f_next = 0.0;
    let mut f = 1e-30;
    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = f;
        }
        let f_prev = (2 * k + 1) as f64 / t * f - f_next;
        f_next = f;
        f = f_prev;
        if f.abs() > 1e200 {
            f *= 1e-200;
            f_next *= 1e-200;
            for v in out.iter_mut() {
                *v *= 1e-200;
            }
        }
    }
    out[0] = f;
    let (s, c) = t.sin_cos();
    let j0 = s / t;
    let j1 = s / (t * t) - c / t;
    let scale = if j0.abs() >= j1.abs() {
        j0 / out[0]
    } else {
        let f1 = if nmax >= 1 { out[1] } else { f_next };
        j1 / f1
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// `j_0 ..= j_nmax` at `t >= 0`.
pub(crate) fn j_array(nmax: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if t == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let series_all = t < 1.0;
    let miller = if series_all { None } else { Some(j_miller(nmax, t)) };
    for (n, v) in out.iter_mut().enumerate() {
        let use_series = t < (n as f64 / 2.0).max(1.0);
        *v = match (&miller, use_series) {
            (Some(m), false) => m[n],
            _ => j_series(n, t),
        };
    }
    out
}

/// `y_0 ..= y_nmax` at `t > 0` by upward recurrence.
pub(crate) fn y_array(nmax: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    let (s, c) = t.sin_cos();
    out[0] = -c / t;
    if nmax >= 1 {
        out[1] = -c / (t * t) - s / t;
    }
    for k in 1..nmax {
        out[k + 1] = (2 * k + 1) as f64 / t * out[k] - out[k - 1];
    }
    out
}

/// Values and first derivatives of one radial family up to a fixed order at
/// a fixed argument.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub t: f64,
    pub value: Vec<Complex64>,
    pub deriv: Vec<Complex64>,
}

impl RadialTable {
    /// Tabulate orders `0..=nmax`. `Y` and `H` require `t > 0`.
    pub fn new(kind: BesselKind, nmax: usize, t: f64) -> Result<Self, SpecFunError> {
        check_arg(t)?;
        if t == 0.0 && kind != BesselKind::J {
            return Err(SpecFunError::Singular(match kind {
                BesselKind::Y => "y_n",
                _ => "h_n",
            }));
        }
        let j = if kind == BesselKind::Y { None } else { Some(j_array(nmax + 1, t)) };
        let y = if kind == BesselKind::J { None } else { Some(y_array(nmax + 1, t)) };
        let raw: Vec<Complex64> = (0..=nmax + 1)
            .map(|k| {
                let re = j.as_ref().map_or(0.0, |v| v[k]);
                let im = y.as_ref().map_or(0.0, |v| v[k]);
                match kind {
                    BesselKind::J => Complex64::new(re, 0.0),
                    BesselKind::Y => Complex64::new(im, 0.0),
                    BesselKind::H1 => Complex64::new(re, im),
                }
            })
            .collect();
        let mut deriv = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            let d = if t == 0.0 {
                Complex64::new(if n == 1 { 1.0 / 3.0 } else { 0.0 }, 0.0)
            } else {
                -raw[n + 1] + raw[n] * (n as f64 / t)
            };
            deriv.push(d);
        }
        let mut value = raw;
        value.truncate(nmax + 1);
        Ok(Self { t, value, deriv })
    }

    /// `f_n(t) / t`, with the entire limit at the origin.
    pub fn over_t(&self, n: usize) -> Complex64 {
        if self.t == 0.0 {
            return Complex64::new(if n == 1 { 1.0 / 3.0 } else { 0.0 }, 0.0);
        }
        self.value[n] / self.t
    }

    /// Riccati combination `f_n + t f_n'`.
    pub fn riccati(&self, n: usize) -> Complex64 {
        self.value[n] + self.deriv[n] * self.t
    }

    /// `(f_n + t f_n') / t`, finite at the origin for the entire family.
    pub fn riccati_over_t(&self, n: usize) -> Complex64 {
        if self.t == 0.0 {
            return Complex64::new(if n == 1 { 2.0 / 3.0 } else { 0.0 }, 0.0);
        }
        self.riccati(n) / self.t
    }
}

pub fn sph_bessel_j(n: usize, t: f64) -> Result<f64, SpecFunError> {
    check_arg(t)?;
    Ok(j_array(n, t)[n])
}

pub fn sph_bessel_y(n: usize, t: f64) -> Result<f64, SpecFunError> {
    check_arg(t)?;
    if t == 0.0 {
        return Err(SpecFunError::Singular("y_n"));
    }
    Ok(y_array(n, t)[n])
}

pub fn sph_hankel1(n: usize, t: f64) -> Result<Complex64, SpecFunError> {
    check_arg(t)?;
    if t == 0.0 {
        return Err(SpecFunError::Singular("h_n"));
    }
    Ok(Complex64::new(j_array(n, t)[n], y_array(n, t)[n]))
}

pub fn sph_bessel_derivative(kind: BesselKind, n: usize, t: f64) -> Result<Complex64, SpecFunError> {
    Ok(RadialTable::new(kind, n, t)?.deriv[n])
}

/// `f_n(t) + t f_n'(t)` for `f = j` or `f = h`.
pub fn riccati(kind: BesselKind, n: usize, t: f64) -> Result<Complex64, SpecFunError> {
    Ok(RadialTable::new(kind, n, t)?.riccati(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_low_order() {
        for &t in &[0.3, 1.0, 2.5, 7.0, 40.0] {
            let (s, c) = t.sin_cos();
            let j2 = (3.0 / (t * t) - 1.0) * s / t - 3.0 * c / (t * t);
            let y2 = -(3.0 / (t * t) - 1.0) * c / t - 3.0 * s / (t * t);
            assert!((sph_bessel_j(2, t).unwrap() - j2).abs() < 1e-13 * (1.0 + j2.abs()));
            assert!((sph_bessel_y(2, t).unwrap() - y2).abs() < 1e-12 * (1.0 + y2.abs()));
        }
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(sph_bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(sph_bessel_j(3, 0.0).unwrap(), 0.0);
        assert!(matches!(sph_hankel1(1, 0.0), Err(SpecFunError::Singular(_))));
        assert!(matches!(sph_bessel_j(1, -1.0), Err(SpecFunError::Domain(_))));
    }

    #[test]
    fn series_and_miller_agree_at_switch() {
        for n in 0..25 {
            for &t in &[1.0, 2.0, 6.0, 11.0] {
                let a = j_series(n, t);
                let b = j_miller(n, t)[n];
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300) + 1e-300, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn double_factorial_cases() {
        assert_eq!(double_factorial(-1).unwrap(), 1);
        assert_eq!(double_factorial(0).unwrap(), 1);
        assert_eq!(double_factorial(7).unwrap(), 105);
        assert_eq!(double_factorial(8).unwrap(), 384);
        assert!(double_factorial(-2).is_err());
        assert!(double_factorial(80).is_err());
        assert_eq!(double_factorial_f64(9), 945.0);
    }

    #[test]
    fn riccati_definition() {
        let t = 1.7;
        let r = riccati(BesselKind::H1, 2, t).unwrap();
        let h = sph_hankel1(2, t).unwrap();
        let d = sph_bessel_derivative(BesselKind::H1, 2, t).unwrap();
        assert!((r - (h + d * t)).norm() < 1e-14);
    }
}
