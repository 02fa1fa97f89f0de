//! ESC-vanishing layer design: weighted objective over the ESC table,
//! central-difference gradients and projected gradient descent.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::harmonics::ModeKind;
use crate::medium::{LayerStack, Material, MediumError};
use crate::scattering::{esc_table, EscPair, EscTable, ScatteringError};

/// Margin used when restoring `3λ + 2μ > 0` after clamping.
pub const CONVEXITY_MARGIN: f64 = 1e-3;
/// Default relative finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DesignError {
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error("design problem needs at least one layer")]
    NoLayers,
    #[error("parameter vector has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("bounds for {name} are invalid: [{lo}, {hi}]")]
    Bounds { name: &'static str, lo: f64, hi: f64 },
    #[error("mode weight for {pair} must be finite and non-negative, got {value}")]
    Weight { pair: EscPair, value: f64 },
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }
}

/// Per-parameter box applied to every layer.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bounds {
    pub lambda: Interval,
    pub mu: Interval,
    pub rho: Interval,
}

impl Default for Bounds {
    fn default() -> Self {
        let i = Interval { lo: 0.05, hi: 3.0 };
        Self { lambda: i, mu: i, rho: i }
    }
}

impl Bounds {
    fn get(&self, k: usize) -> &Interval {
        match k % 3 {
            0 => &self.lambda,
            1 => &self.mu,
            _ => &self.rho,
        }
    }

    fn validate(&self) -> Result<(), DesignError> {
        let named = [("lambda", self.lambda), ("mu", self.mu), ("rho", self.rho)];
        for (name, i) in named {
            let positive_needed = name != "lambda";
            if !(i.lo.is_finite() && i.hi.is_finite() && i.lo <= i.hi) || (positive_needed && i.lo <= 0.0) {
                return Err(DesignError::Bounds { name, lo: i.lo, hi: i.hi });
            }
        }
        Ok(())
    }
}

/// Non-negative weight per `(scattered, incident)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeWeights([[f64; 3]; 3]);

impl Default for ModeWeights {
    fn default() -> Self {
        Self([[1.0; 3]; 3])
    }
}

impl ModeWeights {
    pub fn zeros() -> Self {
        Self([[0.0; 3]; 3])
    }

    /// Unit weight on every pair excited by one incident kind.
    pub fn incident(kind: ModeKind) -> Self {
        let mut w = Self::zeros();
        for s in ModeKind::ALL {
            w.set(EscPair::new(s, kind), 1.0);
        }
        w
    }

    pub fn get(&self, pair: EscPair) -> f64 {
        self.0[pair.scattered.index()][pair.incident.index()]
    }

    pub fn set(&mut self, pair: EscPair, w: f64) {
        self.0[pair.scattered.index()][pair.incident.index()] = w;
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|r| r.map(|w| w * s)))
    }

    fn validate(&self) -> Result<(), DesignError> {
        for p in EscPair::all() {
            let v = self.get(p);
            if !(v.is_finite() && v >= 0.0) {
                return Err(DesignError::Weight { pair: p, value: v });
            }
        }
        Ok(())
    }
}

/// Fixed geometry and background; the free parameters are `(λ, μ, ρ)` of
/// every layer, outermost first.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    radii: Vec<f64>,
    background: Material,
    pub omega: f64,
    pub order: usize,
    pub bounds: Bounds,
    pub mode_weights: ModeWeights,
}

impl DesignProblem {
    pub fn new(
        radii: Vec<f64>,
        background: Material,
        omega: f64,
        order: usize,
        bounds: Bounds,
        mode_weights: ModeWeights,
    ) -> Result<Self, DesignError> {
        if radii.len() < 2 {
            return Err(DesignError::NoLayers);
        }
        bounds.validate()?;
        mode_weights.validate()?;
        let probe = vec![background; radii.len() - 1];
        LayerStack::new(radii.clone(), background, probe)?;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(MediumError::Omega(omega).into());
        }
        Ok(Self { radii, background, omega, order, bounds, mode_weights })
    }

    /// Defaults: radii from 2 down to 1, `T = 2`, default box and
    /// unit weights.
    pub fn with_defaults(layer_count: usize, background: Material, omega: f64) -> Result<Self, DesignError> {
        Self::new(
            crate::medium::default_radii(layer_count),
            background,
            omega,
            2,
            Bounds::default(),
            ModeWeights::default(),
        )
    }

    pub fn layer_count(&self) -> usize {
        self.radii.len() - 1
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn background(&self) -> &Material {
        &self.background
    }

    pub fn dimension(&self) -> usize {
        3 * self.layer_count()
    }

    fn check_len(&self, params: &[f64]) -> Result<(), DesignError> {
        if params.len() != self.dimension() {
            return Err(DesignError::Length { expected: self.dimension(), found: params.len() });
        }
        Ok(())
    }

    pub fn materials(&self, params: &[f64]) -> Result<Vec<Material>, DesignError> {
        self.check_len(params)?;
        params
            .chunks(3)
            .map(|c| Material::new(c[0], c[1], c[2]).map_err(DesignError::from))
            .collect()
    }

    pub fn stack(&self, params: &[f64]) -> Result<LayerStack, DesignError> {
        Ok(LayerStack::new(self.radii.clone(), self.background, self.materials(params)?)?)
    }

    /// The uncoated cavity with the same core.
    pub fn bare_stack(&self) -> LayerStack {
        LayerStack::bare_cavity(self.background, self.radii[self.radii.len() - 1])
            .expect("core radius validated at construction")
    }

    /// Clamp into the box, then restore strong convexity by raising `λ`.
    pub fn project(&self, params: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = params.iter().enumerate().map(|(k, &x)| self.bounds.get(k).clamp(x)).collect();
        for c in out.chunks_mut(3) {
            if 3.0 * c[0] + 2.0 * c[1] <= CONVEXITY_MARGIN {
                c[0] = (CONVEXITY_MARGIN - 2.0 * c[1]) / 3.0 + CONVEXITY_MARGIN;
            }
        }
        out
    }

    /// The background material in every layer.
    pub fn background_params(&self) -> Vec<f64> {
        (0..self.layer_count()).flat_map(|_| self.background.as_array()).collect()
    }

    /// Uniform draw inside the box from a seeded ChaCha8 stream.
    pub fn random_start(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..self.dimension())
            .map(|k| {
                let i = self.bounds.get(k);
                let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                i.lo + u * (i.hi - i.lo)
            })
            .collect();
        self.project(&raw)
    }
}

/// `Σ_n Σ_{pairs} w · |W_n^{ȷȷ'}|²` over the coupled pairs of a table.
pub fn weighted_sum(table: &EscTable, weights: &ModeWeights) -> f64 {
    table
        .rows
        .iter()
        .flat_map(|row| row.entries())
        .map(|(p, w)| weights.get(p) * w.norm_sqr())
        .sum()
}

pub fn objective(problem: &DesignProblem, params: &[f64]) -> Result<f64, DesignError> {
    let table = esc_table(&problem.stack(params)?, problem.omega, problem.order)?;
    Ok(weighted_sum(&table, &problem.mode_weights))
}

/// Objective of the uncoated cavity.
pub fn bare_objective(problem: &DesignProblem) -> Result<f64, DesignError> {
    let table = esc_table(&problem.bare_stack(), problem.omega, problem.order)?;
    Ok(weighted_sum(&table, &problem.mode_weights))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub values: Vec<f64>,
    /// Some step had to be shortened to stay inside the box.
    pub shrunk: bool,
}

/// Central differences with step `h · max(|p_i|, 1)`, shortened near the box.
pub fn fd_gradient(problem: &DesignProblem, params: &[f64], h: f64) -> Result<Gradient, DesignError> {
    problem.check_len(params)?;
    let mut values = Vec::with_capacity(params.len());
    let mut shrunk = false;
    let mut x = params.to_vec();
    for k in 0..params.len() {
        let b = problem.bounds.get(k);
        let mut step = h * params[k].abs().max(1.0);
        let room = (params[k] - b.lo).min(b.hi - params[k]);
        if room < step {
            shrunk = true;
            step = room.max(h * 1e-3);
        }
        x[k] = params[k] + step;
        let fp = objective(problem, &x)?;
        x[k] = params[k] - step;
        let fm = objective(problem, &x)?;
        x[k] = params[k];
        values.push((fp - fm) / (2.0 * step));
    }
    Ok(Gradient { values, shrunk })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DesignStatus {
    Converged,
    MaxIters,
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DesignResult {
    pub materials: Vec<Material>,
    pub objective_trace: Vec<f64>,
    pub final_objective: f64,
    pub status: DesignStatus,
    pub iterations: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    pub tol: f64,
    pub fd_step: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { max_iters: 400, tol: 1e-10, fd_step: DEFAULT_FD_STEP }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Projected gradient descent with Barzilai–Borwein trial steps and Armijo
/// backtracking. Every accepted step lowers the objective.
pub fn optimize(problem: &DesignProblem, init: &[f64], opts: &OptimizeOptions) -> Result<DesignResult, DesignError> {
    problem.check_len(init)?;
    let mut x = problem.project(init);
    let mut f = objective(problem, &x)?;
    let mut trace = vec![f];
    let mut status = DesignStatus::MaxIters;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut alpha = 0.0;
    let mut iterations = 0;
    for _ in 0..opts.max_iters {
        let g = fd_gradient(problem, &x, opts.fd_step)?.values;
        alpha = match &prev {
            None => 0.1 / g.iter().fold(1e-12, |m, v| m.max(v.abs())),
            Some((xp, gp)) => {
                let s: Vec<f64> = x.iter().zip(xp).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g.iter().zip(gp).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 0.0 { dot(&s, &s) / sy } else { 2.0 * alpha }
            }
        }
        .clamp(1e-10, 1e4);
        let mut accepted = None;
        let mut trial_alpha = alpha;
        for _ in 0..MAX_BACKTRACKS {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - trial_alpha * gi).collect();
            let cand = problem.project(&cand);
            let d: Vec<f64> = cand.iter().zip(&x).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &d);
            if decrease >= 0.0 {
                break;
            }
            if let Ok(fc) = objective(problem, &cand) {
                if fc <= f + ARMIJO_C * decrease && fc < f {
                    accepted = Some((cand, fc, dot(&d, &d).sqrt()));
                    break;
                }
            }
            trial_alpha *= 0.5;
        }
        let Some((cand, fc, step_norm)) = accepted else {
            status = if trace.len() > 1 { DesignStatus::Converged } else { DesignStatus::Stalled };
            break;
        };
        iterations += 1;
        prev = Some((x, g));
        x = cand;
        f = fc;
        trace.push(f);
        if step_norm < opts.tol {
            status = DesignStatus::Converged;
            break;
        }
        if trace.len() > 10 {
            let old = trace[trace.len() - 11];
            if (old - f) <= opts.tol * old.abs().max(f64::MIN_POSITIVE) {
                status = DesignStatus::Converged;
                break;
            }
        }
    }
    Ok(DesignResult {
        materials: problem.materials(&x)?,
        objective_trace: trace,
        final_objective: f,
        status,
        iterations,
        seed: None,
    })
}

/// Seeds `base, base + 1, …` for `count` starts.
pub fn seed_sequence(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}

/// One optimisation from the seeded random start.
pub fn optimize_seeded(problem: &DesignProblem, seed: u64, opts: &OptimizeOptions) -> Result<DesignResult, DesignError> {
    let mut r = optimize(problem, &problem.random_start(seed), opts)?;
    r.seed = Some(seed);
    Ok(r)
}

/// Index of the run with the smallest final objective (first on ties).
pub fn best_run(runs: &[DesignResult]) -> Option<usize> {
    runs.iter()
        .enumerate()
        .min_by(|a, b| a.1.final_objective.total_cmp(&b.1.final_objective).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}

/// Sequential multistart over the given seeds.
pub fn multistart(problem: &DesignProblem, seeds: &[u64], opts: &OptimizeOptions) -> Result<Vec<DesignResult>, DesignError> {
    seeds.iter().map(|&s| optimize_seeded(problem, s, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem() -> DesignProblem {
        DesignProblem::with_defaults(1, Material::unit(), 1.0).unwrap()
    }

    #[test]
    fn projection_restores_convexity() {
        let b = Bounds { lambda: Interval { lo: -3.0, hi: 3.0 }, ..Bounds::default() };
        let p = DesignProblem::new(vec![2.0, 1.0], Material::unit(), 1.0, 2, b, ModeWeights::default()).unwrap();
        let x = p.project(&[-2.0, 0.1, 5.0]);
        assert_eq!(x[2], 3.0);
        assert!(3.0 * x[0] + 2.0 * x[1] > CONVEXITY_MARGIN);
        assert!(Material::new(x[0], x[1], x[2]).is_ok());
    }

    #[test]
    fn weight_linearity() {
        let p = problem();
        let x = [2.9, 0.7, 0.9];
        let f1 = objective(&p, &x).unwrap();
        let mut p2 = p.clone();
        p2.mode_weights = p.mode_weights.scaled(2.0);
        assert_eq!(objective(&p2, &x).unwrap(), 2.0 * f1);
    }

    #[test]
    fn background_layer_matches_bare() {
        let p = problem();
        let f = objective(&p, &p.background_params()).unwrap();
        let b = bare_objective(&p).unwrap();
        assert!((f - b).abs() < 1e-12 * b);
    }

    #[test]
    fn random_start_is_deterministic_and_in_box() {
        let p = DesignProblem::with_defaults(2, Material::unit(), 1.0).unwrap();
        let a = p.random_start(7);
        assert_eq!(a, p.random_start(7));
        assert_ne!(a, p.random_start(8));
        assert!(a.iter().all(|v| (0.05..=3.0).contains(v)));
    }

    #[test]
    fn gradient_matches_symmetric_difference() {
        let p = problem();
        let x = [1.3, 0.8, 1.7];
        let g = fd_gradient(&p, &x, 1e-5).unwrap();
        assert!(!g.shrunk);
        for k in 0..3 {
            let h = 1e-4;
            let mut a = x;
            let mut b = x;
            a[k] += h;
            b[k] -= h;
            let d = (objective(&p, &a).unwrap() - objective(&p, &b).unwrap()) / (2.0 * h);
            assert!((d - g.values[k]).abs() <= 1e-3 * d.abs().max(1e-8), "k={k}");
        }
    }

    #[test]
    fn gradient_step_shrinks_at_bound() {
        let p = problem();
        let g = fd_gradient(&p, &[0.05, 1.0, 1.0], 1e-5).unwrap();
        assert!(g.shrunk);
    }

    #[test]
    fn optimizer_trace_is_monotone() {
        let p = problem();
        let r = optimize(&p, &[2.9, 0.7, 0.9], &OptimizeOptions { max_iters: 15, ..Default::default() }).unwrap();
        assert!(r.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.final_objective <= r.objective_trace[0]);
        assert_eq!(r.final_objective, *r.objective_trace.last().unwrap());
    }

    #[test]
    fn length_and_bounds_errors() {
        let p = problem();
        assert!(matches!(objective(&p, &[1.0, 1.0]), Err(DesignError::Length { .. })));
        let mut b = Bounds::default();
        b.mu.lo = 0.0;
        assert!(DesignProblem::new(vec![2.0, 1.0], Material::unit(), 1.0, 2, b, ModeWeights::default()).is_err());
        assert!(matches!(DesignProblem::with_defaults(0, Material::unit(), 1.0), Err(DesignError::NoLayers)));
    }
}
