//! Low-frequency diagnostics: power-law fits of `|W_n|` in `τ`, leading-order
//! checks of the core boundary matrix and decay of the ESC in `n`.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::medium::{wave_numbers, LayerStack, Material, MediumError};
use crate::scattering::{esc_row, q_matrix, EscPair, EscTable, ScatteringError};
use crate::specfun::double_factorial_f64;

/// Values below this are treated as underflow and left out of fits.
pub const UNDERFLOW: f64 = 1e-280;
/// Fits with a lower coefficient of determination are refitted once
/// without the largest `τ`.
pub const MIN_R_SQUARED: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error("tau grid must be strictly increasing inside (0, 0.1]")]
    Grid,
    #[error("only {usable} usable points; at least 3 are needed")]
    InsufficientData { usable: usize },
    #[error("decay report needs a table of order >= 4, got {0}")]
    Order(usize),
}

/// `count` points from `lo` to `hi`, equally spaced in `log`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| match i {
            0 => lo,
            i if i == count - 1 => hi,
            i => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScalingReport {
    pub n: usize,
    pub pair: EscPair,
    pub tau_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub fitted_slope: f64,
    pub r_squared: f64,
    /// Number of points used by the final fit.
    pub used: usize,
    /// The largest-`τ` point was dropped after a poor first fit.
    pub refit: bool,
}

/// Fits `log|W_n^{pair}|` against `log τ`, realising `τ` as the frequency at
/// the given (fixed) geometry.
pub fn scaling_exponent(
    stack: &LayerStack,
    n: usize,
    pair: EscPair,
    tau_grid: &[f64],
) -> Result<ScalingReport, AsymptoticsError> {
    let grid_ok = tau_grid.iter().all(|t| *t > 0.0 && *t <= 0.1) && tau_grid.windows(2).all(|w| w[0] < w[1]);
    if !grid_ok {
        return Err(AsymptoticsError::Grid);
    }
    let values = tau_grid
        .iter()
        .map(|&tau| esc_row(stack, tau, n).map(|r| r.get(pair).norm()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut pts: Vec<(f64, f64)> = tau_grid
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v > UNDERFLOW && v.is_finite())
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(AsymptoticsError::InsufficientData { usable: pts.len() });
    }
    let fit = |p: &[(f64, f64)]| {
        let (x, y): (Vec<f64>, Vec<f64>) = p.iter().copied().unzip();
        linear_fit(&x, &y)
    };
    let (mut slope, _, mut r2) = fit(&pts);
    let mut refit = false;
    if r2 < MIN_R_SQUARED && pts.len() > 3 {
        pts.pop();
        let (s, _, r) = fit(&pts);
        slope = s;
        r2 = r;
        refit = true;
    }
    Ok(ScalingReport {
        n,
        pair,
        tau_grid: tau_grid.to_vec(),
        values,
        fitted_slope: slope,
        r_squared: r2,
        used: pts.len(),
        refit,
    })
}

/// One entry of the `(L, N)` core matrix against its low-frequency leading
/// term. Columns follow the convention in which the shear columns of the
/// traction rows are divided by `√(n(n+1))`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QEntryRatio {
    /// 1-based row and column.
    pub row: usize,
    pub col: usize,
    pub exact: Complex64,
    /// Ratio against the leading term as printed in the reference
    /// derivation; `None` when the leading coefficient vanishes.
    pub ratio_printed: Option<Complex64>,
    /// Ratio against the leading term re-derived from the small-argument
    /// laws of `j_n` and `h_n`.
    pub ratio_rederived: Option<Complex64>,
}

/// Leading coefficients `(printed, re-derived)` of the core entries, without
/// the `1/φ_{n+1}` or `iφ_n` factors and powers of `t τ`.
fn q_leading(n: usize) -> [[(f64, f64); 4]; 2] {
    let nf = n as f64;
    let s = (nf * (nf + 1.0)).sqrt();
    let same = |v: f64| (v, v);
    [
        [same(nf * (nf - 1.0)), same(s * (nf - 1.0)), same(-(nf + 1.0) * (nf + 2.0)), same(s * (nf + 2.0))],
        [
            same(s * (nf - 1.0)),
            (nf * nf, nf * nf - 1.0),
            same(s * (nf + 2.0)),
            (-(nf + 1.0) * (nf + 1.0), -nf * (nf + 2.0)),
        ],
    ]
}

/// Exact core-matrix entries at `ω = τ` and core radius 1 divided by their
/// leading low-frequency terms.
pub fn q_entry_asymptotic_check(material: &Material, n: usize, tau: f64) -> Result<Vec<QEntryRatio>, AsymptoticsError> {
    let q = q_matrix(material, tau, 1.0, n)?;
    let w = wave_numbers(material, 1.0)?;
    let (tp, ts) = (1.0 / w.c_p, 1.0 / w.c_s);
    let nf = n as f64;
    let sq = (nf * (nf + 1.0)).sqrt();
    let phi_n = double_factorial_f64(2 * n as i64 - 1);
    let phi_n1 = double_factorial_f64(2 * n as i64 + 1);
    let lead = q_leading(n);
    let mut out = Vec::with_capacity(8);
    for (row, lead_row) in lead.iter().enumerate() {
        for (col, &(p, r)) in lead_row.iter().enumerate() {
            let t = if col % 2 == 0 { tp } else { ts };
            let base = if col < 2 {
                Complex64::new((t * tau).powi(n as i32 - 1) / phi_n1, 0.0)
            } else {
                Complex64::new(0.0, phi_n * (t * tau).powi(-(n as i32) - 2))
            };
            let scale = if col % 2 == 1 { 1.0 / sq } else { 1.0 };
            let exact = q.ln_block[(row, col)] * scale;
            let ratio = |c: f64| if c == 0.0 { None } else { Some(exact / (base * c)) };
            out.push(QEntryRatio { row: row + 1, col: col + 1, exact, ratio_printed: ratio(p), ratio_rederived: ratio(r) });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DecayReport {
    /// `|W_n^{LL}|` for `n = 0..=T`.
    pub magnitudes: Vec<f64>,
    /// Least-squares `C` in `log|W_n| ≈ (2n−2)(log C − log n)`, `n ≥ 2`.
    pub fitted_c: f64,
    /// Smallest `C` with `|W_n| ≤ (C/n)^{2n−2}` for every `n ≥ 2`.
    pub bound_c: f64,
    /// First order from which the magnitudes decrease strictly to `T`.
    pub decreasing_from: usize,
}

impl DecayReport {
    /// Decrease over at least the last three orders.
    pub fn eventually_decreasing(&self) -> bool {
        self.decreasing_from + 2 < self.magnitudes.len() || self.magnitudes.iter().all(|v| *v == 0.0)
    }
}

pub fn decay_in_n_report(table: &EscTable) -> Result<DecayReport, AsymptoticsError> {
    if table.order() < 4 {
        return Err(AsymptoticsError::Order(table.order()));
    }
    let magnitudes: Vec<f64> = table.rows.iter().map(|r| r.w_ll().norm()).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut bound_c: f64 = 0.0;
    for (n, &v) in magnitudes.iter().enumerate().skip(2) {
        if v <= UNDERFLOW {
            continue;
        }
        let k = 2.0 * n as f64 - 2.0;
        num += k * (v.ln() + k * (n as f64).ln());
        den += k * k;
        bound_c = bound_c.max(n as f64 * v.powf(1.0 / k));
    }
    let fitted_c = if den > 0.0 { (num / den).exp() } else { 0.0 };
    let mut decreasing_from = magnitudes.len() - 1;
    while decreasing_from > 0 && magnitudes[decreasing_from - 1] > magnitudes[decreasing_from] {
        decreasing_from -= 1;
    }
    if magnitudes.iter().all(|v| *v == 0.0) {
        decreasing_from = 0;
    }
    Ok(DecayReport { magnitudes, fitted_c, bound_c, decreasing_from })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{esc_table, EscRow};

    #[test]
    fn linear_fit_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (s, b, r2) = linear_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_spaced(1e-3, 1e-2, 8);
        assert_eq!(g.len(), 8);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[7] - 1e-2).abs() < 1e-16);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn grid_errors() {
        let s = LayerStack::bare_cavity(Material::unit(), 1.0).unwrap();
        assert!(matches!(scaling_exponent(&s, 1, EscPair::LL, &[0.2, 0.3, 0.4]), Err(AsymptoticsError::Grid)));
        assert!(matches!(
            scaling_exponent(&s, 1, EscPair::LL, &[1e-3, 2e-3]),
            Err(AsymptoticsError::InsufficientData { usable: 2 })
        ));
    }

    #[test]
    fn monopole_slope_nonnegative() {
        let s = LayerStack::bare_cavity(Material::unit(), 1.0).unwrap();
        let r = scaling_exponent(&s, 0, EscPair::LL, &log_spaced(1e-3, 1e-2, 8)).unwrap();
        assert!(r.fitted_slope >= -0.1);
    }

    #[test]
    fn q11_ratio_near_one() {
        let r = q_entry_asymptotic_check(&Material::unit(), 3, 1e-3).unwrap();
        let q11 = r[0].ratio_printed.unwrap();
        assert!((q11 - Complex64::new(1.0, 0.0)).norm() < 1e-2);
        let n1 = q_entry_asymptotic_check(&Material::unit(), 1, 1e-3).unwrap();
        assert!(n1[0].ratio_printed.is_none());
    }

    #[test]
    fn decay_report_on_bare_cavity() {
        let s = LayerStack::bare_cavity(Material::unit(), 1.0).unwrap();
        let t = esc_table(&s, 1.0, 8).unwrap();
        let d = decay_in_n_report(&t).unwrap();
        assert!(d.decreasing_from <= 3 && d.eventually_decreasing());
        assert!(d.fitted_c > 0.0 && d.bound_c > 0.0);
        let zero = EscTable { omega: 1.0, rows: (0..6).map(EscRow::zero).collect() };
        let z = decay_in_n_report(&zero).unwrap();
        assert!(z.eventually_decreasing() && z.fitted_c == 0.0);
        assert!(matches!(decay_in_n_report(&esc_table(&s, 1.0, 3).unwrap()), Err(AsymptoticsError::Order(3))));
    }
}
