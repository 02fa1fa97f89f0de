//! Transfer-matrix solution of the layered cavity problem and assembly of the
//! elastic scattering coefficients `W_n^{ȷȷ'}`.
//!
//! Coefficient vectors are ordered `(a^L, a^N, b^L, b^N)` for the coupled
//! pressure/shear block and `(a^M, b^M)` for the toroidal block, where `a`
//! multiplies entire (`j_n`) fields and `b` radiating (`h_n`) fields. With
//! `u·e_r = U Y_nm`, `u_tan = V √(n(n+1)) B_nm`, `t·e_r = 2 T Y_nm` and
//! `t_tan = 2 S B_nm` for the traction `t = σ e_r`, the rows of the `(L, N)`
//! block are `(U, V, T, S)`. The `M` block rows are the coefficients of
//! `√(n(n+1)) C_nm` in the displacement and in the traction.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::harmonics::ModeKind;
use crate::linalg::{equilibrate, CMatrix, LinalgError};
use crate::medium::{wave_numbers, LayerStack, Material, MediumError};
use crate::specfun::{BesselKind, RadialTable, SpecFunError};

/// Largest accepted 1-norm condition number of an equilibrated interface block.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Relative size below which a solvability denominator counts as vanishing.
pub const DEGENERACY_LIMIT: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatteringError {
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("{kind:?} incidence requires n >= 1")]
    Order { kind: ModeKind },
    #[error("interface block of layer {layer} is ill-conditioned (cond {cond:.3e}) at n={n}, omega={omega}")]
    IllConditioned { layer: usize, n: usize, omega: f64, cond: f64 },
    #[error("degenerate frequency: solvability denominator vanishes at n={n}, omega={omega}")]
    Degenerate { n: usize, omega: f64 },
    #[error("singular global system at n={n}, omega={omega}")]
    Singular { n: usize, omega: f64 },
    #[error("solution does not match the stack ({0})")]
    Shape(&'static str),
}

/// The 4×4 `(L, N)` block and the 2×2 `M` block of one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrices {
    pub ln_block: CMatrix,
    pub m_block: CMatrix,
}

struct Columns {
    l: [Complex64; 4],
    n: [Complex64; 4],
    m: [Complex64; 2],
}

fn columns(mat: &Material, omega: f64, r: f64, n: usize, kind: BesselKind) -> Result<Columns, ScatteringError> {
    let w = wave_numbers(mat, omega)?;
    let (xp, xs) = (w.kappa_p * r, w.kappa_s * r);
    let tp = RadialTable::new(kind, n, xp)?;
    let ts = RadialTable::new(kind, n, xs)?;
    let nn = (n * (n + 1)) as f64;
    let s = nn.sqrt();
    let mu = mat.mu;
    let (fp, dp) = (tp.value[n], tp.deriv[n]);
    let (fs, ds) = (ts.value[n], ts.deriv[n]);
    let half_xs2 = 0.5 * xs * xs;
    let dp_over = dp / xp - fp / (xp * xp);
    let ds_over = ds / xs - fs / (xs * xs);
    let l = [
        dp,
        fp / xp,
        (fp * ((nn - half_xs2) / (xp * xp)) - dp * (2.0 / xp)) * (mu * w.kappa_p),
        dp_over * (mu * w.kappa_p * s),
    ];
    let ncol = [
        fs * (nn / xs),
        (fs + ds * xs) / xs,
        ds_over * (mu * w.kappa_s * nn),
        (fs * ((nn - 1.0 - half_xs2) / (xs * xs)) - ds / xs) * (mu * w.kappa_s * s),
    ];
    let m = [fs, (ds - fs / xs) * (mu * w.kappa_s)];
    Ok(Columns { l, n: ncol, m })
}

/// Interface matrices `[P^{L,N}]` and `[P^M]` of one material at radius `r`.
pub fn p_matrix(mat: &Material, omega: f64, r: f64, n: usize) -> Result<BlockMatrices, ScatteringError> {
    if n == 0 {
        return Err(ScatteringError::Order { kind: ModeKind::N });
    }
    let j = columns(mat, omega, r, n, BesselKind::J)?;
    let h = columns(mat, omega, r, n, BesselKind::H1)?;
    let mut ln = CMatrix::zeros(4, 4);
    let mut m = CMatrix::zeros(2, 2);
    for i in 0..4 {
        ln[(i, 0)] = j.l[i];
        ln[(i, 1)] = j.n[i];
        ln[(i, 2)] = h.l[i];
        ln[(i, 3)] = h.n[i];
    }
    for i in 0..2 {
        m[(i, 0)] = j.m[i];
        m[(i, 1)] = h.m[i];
    }
    Ok(BlockMatrices { ln_block: ln, m_block: m })
}

/// Monopole interface matrix: rows (radial displacement, half radial
/// traction), columns `(a^L, b^L)`.
pub fn p_matrix_monopole(mat: &Material, omega: f64, r: f64) -> Result<CMatrix, ScatteringError> {
    let j = columns(mat, omega, r, 0, BesselKind::J)?;
    let h = columns(mat, omega, r, 0, BesselKind::H1)?;
    Ok(CMatrix::from_rows(&[[j.l[0], h.l[0]], [j.l[2], h.l[2]]]))
}

/// Core boundary matrices: the traction rows of [`p_matrix`] of the innermost
/// material at the core radius, divided by its shear modulus.
pub fn q_matrix(innermost: &Material, omega: f64, core_radius: f64, n: usize) -> Result<BlockMatrices, ScatteringError> {
    let p = p_matrix(innermost, omega, core_radius, n)?;
    let mut ln = CMatrix::zeros(4, 4);
    let mut m = CMatrix::zeros(2, 2);
    for j in 0..4 {
        ln[(0, j)] = p.ln_block[(2, j)] / innermost.mu;
        ln[(1, j)] = p.ln_block[(3, j)] / innermost.mu;
    }
    for j in 0..2 {
        m[(0, j)] = p.m_block[(1, j)] / innermost.mu;
    }
    Ok(BlockMatrices { ln_block: ln, m_block: m })
}

/// `P_ℓ^{-1} P_{ℓ-1}` with `P_ℓ` equilibrated before inversion.
fn transfer(
    inner: &CMatrix,
    outer: &CMatrix,
    layer: usize,
    n: usize,
    omega: f64,
) -> Result<CMatrix, ScatteringError> {
    let (row, col) = equilibrate(inner);
    let mut a = inner.clone();
    a.scale_rows(&row);
    a.scale_cols(&col);
    let cond = a.cond1();
    if cond.is_nan() || cond > CONDITION_LIMIT {
        return Err(ScatteringError::IllConditioned { layer, n, omega, cond });
    }
    let mut b = outer.clone();
    b.scale_rows(&row);
    let mut x = a
        .lu()
        .and_then(|lu| lu.solve_matrix(&b))
        .map_err(|_| ScatteringError::IllConditioned { layer, n, omega, cond })?;
    x.scale_rows(&col);
    Ok(x)
}

struct Chain {
    ln: Vec<CMatrix>,
    m: Vec<CMatrix>,
}

fn interface_chain(stack: &LayerStack, omega: f64, n: usize) -> Result<Chain, ScatteringError> {
    let mut chain = Chain { ln: Vec::new(), m: Vec::new() };
    for l in 1..=stack.layer_count() {
        let r = stack.radii()[l - 1];
        let outer = p_matrix(stack.material(l - 1), omega, r, n)?;
        let inner = p_matrix(stack.material(l), omega, r, n)?;
        chain.ln.push(transfer(&inner.ln_block, &outer.ln_block, l, n, omega)?);
        chain.m.push(transfer(&inner.m_block, &outer.m_block, l, n, omega)?);
    }
    Ok(chain)
}

fn innermost(stack: &LayerStack) -> &Material {
    stack.material(stack.layer_count())
}

/// `R = Q · S_L ⋯ S_1` with `S_ℓ = P_ℓ(r_ℓ)^{-1} P_{ℓ-1}(r_ℓ)`.
pub fn r_matrices(stack: &LayerStack, omega: f64, n: usize) -> Result<BlockMatrices, ScatteringError> {
    let chain = interface_chain(stack, omega, n)?;
    let q = q_matrix(innermost(stack), omega, stack.core_radius(), n)?;
    Ok(apply_chain(q, &chain))
}

fn apply_chain(q: BlockMatrices, chain: &Chain) -> BlockMatrices {
    let mut ln = q.ln_block;
    let mut m = q.m_block;
    for s in chain.ln.iter().rev() {
        ln = ln.mul(s);
    }
    for s in chain.m.iter().rev() {
        m = m.mul(s);
    }
    BlockMatrices { ln_block: ln, m_block: m }
}

/// Incident (`a`) and scattered (`b`) amplitudes of one region, indexed by
/// [`ModeKind::index`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LayerCoefficients {
    pub a: [Complex64; 3],
    pub b: [Complex64; 3],
}

impl LayerCoefficients {
    fn ln_vector(&self) -> [Complex64; 4] {
        [self.a[0], self.a[2], self.b[0], self.b[2]]
    }

    fn m_vector(&self) -> [Complex64; 2] {
        [self.a[1], self.b[1]]
    }

    fn from_vectors(ln: &[Complex64], m: &[Complex64]) -> Self {
        Self { a: [ln[0], m[0], ln[1]], b: [ln[2], m[1], ln[3]] }
    }

    pub fn a(&self, kind: ModeKind) -> Complex64 {
        self.a[kind.index()]
    }

    pub fn b(&self, kind: ModeKind) -> Complex64 {
        self.b[kind.index()]
    }
}

/// Coefficients of every region for one order and one incident mode.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModeSolution {
    pub n: usize,
    pub incident: ModeKind,
    /// Region 0 is the background, region `ℓ` the `ℓ`-th shell.
    pub layers: Vec<LayerCoefficients>,
    pub residual: f64,
}

impl ModeSolution {
    /// Scattered amplitudes `b_0` in the background.
    pub fn scattered(&self) -> [Complex64; 3] {
        self.layers[0].b
    }
}

fn check_incidence(n: usize, incident: ModeKind) -> Result<(), ScatteringError> {
    if n == 0 && incident != ModeKind::L {
        return Err(ScatteringError::Order { kind: incident });
    }
    Ok(())
}

fn selector(incident: ModeKind) -> [Complex64; 3] {
    let mut a = [Complex64::zero(); 3];
    a[incident.index()] = Complex64::new(1.0, 0.0);
    a
}

fn degenerate(den: Complex64, scale: f64) -> bool {
    let d = den.norm();
    !d.is_finite() || d <= DEGENERACY_LIMIT * scale
}

fn solve_monopole(stack: &LayerStack, omega: f64) -> Result<ModeSolution, ScatteringError> {
    let mut chain = Vec::new();
    for l in 1..=stack.layer_count() {
        let r = stack.radii()[l - 1];
        let outer = p_matrix_monopole(stack.material(l - 1), omega, r)?;
        let inner = p_matrix_monopole(stack.material(l), omega, r)?;
        chain.push(transfer(&inner, &outer, l, 0, omega)?);
    }
    let p = p_matrix_monopole(innermost(stack), omega, stack.core_radius())?;
    let mut q = [p[(1, 0)] / innermost(stack).mu, p[(1, 1)] / innermost(stack).mu];
    for s in chain.iter().rev() {
        q = [q[0] * s[(0, 0)] + q[1] * s[(1, 0)], q[0] * s[(0, 1)] + q[1] * s[(1, 1)]];
    }
    if degenerate(q[1], q[0].norm() + q[1].norm()) {
        return Err(ScatteringError::Degenerate { n: 0, omega });
    }
    let b = -q[0] / q[1];
    let z = Complex64::zero();
    let mut c = vec![Complex64::new(1.0, 0.0), b];
    let mut layers = vec![LayerCoefficients { a: [c[0], z, z], b: [c[1], z, z] }];
    for s in &chain {
        c = s.mul_vec(&c);
        layers.push(LayerCoefficients { a: [c[0], z, z], b: [c[1], z, z] });
    }
    let mut sol = ModeSolution { n: 0, incident: ModeKind::L, layers, residual: 0.0 };
    sol.residual = interface_residual(stack, omega, 0, &sol)?;
    Ok(sol)
}

/// Scattered and interior coefficients for a unit incident mode, by the
/// recursive transfer product.
pub fn solve_modes(
    stack: &LayerStack,
    omega: f64,
    n: usize,
    incident: ModeKind,
) -> Result<ModeSolution, ScatteringError> {
    check_incidence(n, incident)?;
    if n == 0 {
        return solve_monopole(stack, omega);
    }
    let chain = interface_chain(stack, omega, n)?;
    let q = q_matrix(innermost(stack), omega, stack.core_radius(), n)?;
    let r = apply_chain(q, &chain);
    let z = Complex64::zero();
    let mut b = [z; 3];
    match incident {
        ModeKind::M => {
            let rm = &r.m_block;
            if degenerate(rm[(0, 1)], rm[(0, 0)].norm() + rm[(0, 1)].norm()) {
                return Err(ScatteringError::Degenerate { n, omega });
            }
            b[1] = -rm[(0, 0)] / rm[(0, 1)];
        }
        ModeKind::L | ModeKind::N => {
            let rl = &r.ln_block;
            let p = rl[(0, 3)] * rl[(1, 2)];
            let q = rl[(0, 2)] * rl[(1, 3)];
            let den = p - q;
            if degenerate(den, p.norm() + q.norm()) {
                return Err(ScatteringError::Degenerate { n, omega });
            }
            let col = if incident == ModeKind::L { 0 } else { 1 };
            let (r1, r2) = (rl[(0, col)], rl[(1, col)]);
            b[0] = (r1 * rl[(1, 3)] - rl[(0, 3)] * r2) / den;
            b[2] = (rl[(0, 2)] * r2 - r1 * rl[(1, 2)]) / den;
        }
    }
    let mut c = LayerCoefficients { a: selector(incident), b };
    let mut layers = vec![c];
    for (sl, sm) in chain.ln.iter().zip(&chain.m) {
        let ln = sl.mul_vec(&c.ln_vector());
        let m = sm.mul_vec(&c.m_vector());
        c = LayerCoefficients::from_vectors(&ln, &m);
        layers.push(c);
    }
    let mut sol = ModeSolution { n, incident, layers, residual: 0.0 };
    sol.residual = interface_residual(stack, omega, n, &sol)?;
    Ok(sol)
}

/// Independent solution of the whole boundary-value problem as one dense
/// system: every interface condition plus the core traction condition.
pub fn direct_solve_oracle(
    stack: &LayerStack,
    omega: f64,
    n: usize,
    incident: ModeKind,
) -> Result<ModeSolution, ScatteringError> {
    check_incidence(n, incident)?;
    let big_l = stack.layer_count();
    // Per region: unknown column count and the raw blocks at a radius.
    let per = if n == 0 { 2 } else { 6 };
    let unknowns = if n == 0 { 1 + 2 * big_l } else { 3 + 6 * big_l };
    let mut a = CMatrix::zeros(unknowns, unknowns);
    let mut rhs = vec![Complex64::zero(); unknowns];

    // Full region matrix over (aL, aN, bL, bN, aM, bM) or (aL, bL).
    let region = |l: usize, r: f64| -> Result<CMatrix, ScatteringError> {
        let mat = stack.material(l);
        if n == 0 {
            return p_matrix_monopole(mat, omega, r);
        }
        let p = p_matrix(mat, omega, r, n)?;
        let mut full = CMatrix::zeros(6, 6);
        for i in 0..4 {
            for j in 0..4 {
                full[(i, j)] = p.ln_block[(i, j)];
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                full[(4 + i, 4 + j)] = p.m_block[(i, j)];
            }
        }
        Ok(full)
    };
    let a0 = selector(incident);
    let known: Vec<Complex64> = if n == 0 { vec![a0[0]] } else { vec![a0[0], a0[2], a0[1]] };
    // Region-0 column j maps to either a known amplitude or an unknown.
    let region0_col = |j: usize| -> Result<usize, usize> {
        if n == 0 {
            if j == 0 { Err(0) } else { Ok(0) }
        } else {
            match j {
                0 => Err(0),
                1 => Err(1),
                4 => Err(2),
                2 => Ok(0),
                3 => Ok(1),
                _ => Ok(2),
            }
        }
    };
    let region_offset = |l: usize| if n == 0 { 1 + 2 * (l - 1) } else { 3 + 6 * (l - 1) };

    let mut row = 0;
    let add_region = |a: &mut CMatrix, rhs: &mut [Complex64], eq: usize, l: usize, block: &CMatrix, i: usize, sign: f64| {
        for j in 0..per {
            let v = block[(i, j)] * sign;
            if l == 0 {
                match region0_col(j) {
                    Ok(u) => a[(eq, u)] += v,
                    Err(k) => rhs[eq] -= v * known[k],
                }
            } else {
                a[(eq, region_offset(l) + j)] += v;
            }
        }
    };
    for l in 1..=big_l {
        let r = stack.radii()[l - 1];
        let outer = region(l - 1, r)?;
        let inner = region(l, r)?;
        for i in 0..per {
            add_region(&mut a, &mut rhs, row, l - 1, &outer, i, 1.0);
            add_region(&mut a, &mut rhs, row, l, &inner, i, -1.0);
            row += 1;
        }
    }
    let core = region(big_l, stack.core_radius())?;
    let traction_rows: &[usize] = if n == 0 { &[1] } else { &[2, 3, 5] };
    for &i in traction_rows {
        add_region(&mut a, &mut rhs, row, big_l, &core, i, 1.0);
        row += 1;
    }
    debug_assert_eq!(row, unknowns);

    for i in 0..unknowns {
        let m = a.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m > 0.0 {
            let s = 1.0 / m;
            for j in 0..unknowns {
                a[(i, j)] *= s;
            }
            rhs[i] *= s;
        }
    }
    let x = a
        .lu()
        .and_then(|lu| lu.solve(&rhs))
        .map_err(|_: LinalgError| ScatteringError::Singular { n, omega })?;

    let z = Complex64::zero();
    let mut layers = Vec::with_capacity(big_l + 1);
    if n == 0 {
        layers.push(LayerCoefficients { a: [a0[0], z, z], b: [x[0], z, z] });
        for l in 1..=big_l {
            let o = region_offset(l);
            layers.push(LayerCoefficients { a: [x[o], z, z], b: [x[o + 1], z, z] });
        }
    } else {
        layers.push(LayerCoefficients { a: a0, b: [x[0], x[2], x[1]] });
        for l in 1..=big_l {
            let o = region_offset(l);
            layers.push(LayerCoefficients::from_vectors(&[x[o], x[o + 1], x[o + 2], x[o + 3]], &[x[o + 4], x[o + 5]]));
        }
    }
    let mut sol = ModeSolution { n, incident, layers, residual: 0.0 };
    sol.residual = interface_residual(stack, omega, n, &sol)?;
    Ok(sol)
}

/// Row-by-row relative mismatch `|Σ terms| / Σ |terms|` (0 when every term
/// vanishes).
fn relative_row(terms: impl Iterator<Item = Complex64>) -> f64 {
    let (mut sum, mut mag) = (Complex64::zero(), 0.0);
    for t in terms {
        sum += t;
        mag += t.norm();
    }
    if mag == 0.0 {
        0.0
    } else {
        sum.norm() / mag
    }
}

fn region_vector(n: usize, c: &LayerCoefficients) -> Vec<Complex64> {
    if n == 0 {
        vec![c.a[0], c.b[0]]
    } else {
        let ln = c.ln_vector();
        let m = c.m_vector();
        vec![ln[0], ln[1], ln[2], ln[3], m[0], m[1]]
    }
}

fn region_rows(mat: &Material, omega: f64, r: f64, n: usize) -> Result<Vec<Vec<(usize, Complex64)>>, ScatteringError> {
    if n == 0 {
        let p = p_matrix_monopole(mat, omega, r)?;
        return Ok((0..2).map(|i| (0..2).map(|j| (j, p[(i, j)])).collect()).collect());
    }
    let p = p_matrix(mat, omega, r, n)?;
    let mut rows: Vec<Vec<(usize, Complex64)>> =
        (0..4).map(|i| (0..4).map(|j| (j, p.ln_block[(i, j)])).collect()).collect();
    rows.extend((0..2).map(|i| (0..2).map(|j| (4 + j, p.m_block[(i, j)])).collect::<Vec<_>>()));
    Ok(rows)
}

/// Largest relative mismatch of displacement and traction continuity over
/// all interfaces and of the traction-free condition on the core.
pub fn interface_residual(
    stack: &LayerStack,
    omega: f64,
    n: usize,
    sol: &ModeSolution,
) -> Result<f64, ScatteringError> {
    if sol.layers.len() != stack.layer_count() + 1 {
        return Err(ScatteringError::Shape("region count"));
    }
    if sol.n != n {
        return Err(ScatteringError::Shape("order"));
    }
    let mut worst: f64 = 0.0;
    for l in 1..=stack.layer_count() {
        let r = stack.radii()[l - 1];
        let outer = region_rows(stack.material(l - 1), omega, r, n)?;
        let inner = region_rows(stack.material(l), omega, r, n)?;
        let co = region_vector(n, &sol.layers[l - 1]);
        let ci = region_vector(n, &sol.layers[l]);
        for (ro, ri) in outer.iter().zip(&inner) {
            let terms = ro
                .iter()
                .map(|(j, v)| v * co[*j])
                .chain(ri.iter().map(|(j, v)| -(v * ci[*j])));
            worst = worst.max(relative_row(terms));
        }
    }
    let big_l = stack.layer_count();
    let core = region_rows(stack.material(big_l), omega, stack.core_radius(), n)?;
    let c = region_vector(n, &sol.layers[big_l]);
    let traction_rows: &[usize] = if n == 0 { &[1] } else { &[2, 3, 5] };
    for &i in traction_rows {
        worst = worst.max(relative_row(core[i].iter().map(|(j, v)| v * c[*j])));
    }
    Ok(worst)
}

/// Ordered (scattered, incident) pair of mode kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EscPair {
    pub scattered: ModeKind,
    pub incident: ModeKind,
}

impl EscPair {
    pub const fn new(scattered: ModeKind, incident: ModeKind) -> Self {
        Self { scattered, incident }
    }

    pub const LL: EscPair = EscPair::new(ModeKind::L, ModeKind::L);
    pub const NL: EscPair = EscPair::new(ModeKind::N, ModeKind::L);
    pub const LN: EscPair = EscPair::new(ModeKind::L, ModeKind::N);
    pub const NN: EscPair = EscPair::new(ModeKind::N, ModeKind::N);
    pub const MM: EscPair = EscPair::new(ModeKind::M, ModeKind::M);

    /// Every pair, row-major over `(L, M, N)`.
    pub fn all() -> impl Iterator<Item = EscPair> {
        ModeKind::ALL
            .into_iter()
            .flat_map(|s| ModeKind::ALL.into_iter().map(move |i| EscPair::new(s, i)))
    }

    /// Pairs that can be nonzero at order `n`, in output order.
    pub fn coupled(n: usize) -> &'static [EscPair] {
        if n == 0 {
            &[EscPair::LL]
        } else {
            &[EscPair::LL, EscPair::NL, EscPair::LN, EscPair::NN, EscPair::MM]
        }
    }

    pub fn label(&self) -> [char; 2] {
        [self.scattered.as_char(), self.incident.as_char()]
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut it = s.chars();
        let a = ModeKind::from_char(it.next()?)?;
        let b = ModeKind::from_char(it.next()?)?;
        if it.next().is_some() {
            return None;
        }
        Some(Self::new(a, b))
    }
}

impl core::fmt::Display for EscPair {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let [a, b] = self.label();
        write!(f, "{a}{b}")
    }
}

/// `W_n^{ȷȷ'}` for one order. Uncoupled pairs are stored as exact zeros.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EscRow {
    pub n: usize,
    values: [[Complex64; 3]; 3],
}

impl EscRow {
    pub fn zero(n: usize) -> Self {
        Self { n, values: [[Complex64::zero(); 3]; 3] }
    }

    pub fn get(&self, pair: EscPair) -> Complex64 {
        self.values[pair.scattered.index()][pair.incident.index()]
    }

    /// Sets a coupled pair; returns `false` (and leaves the row unchanged)
    /// for a structurally zero pair.
    pub fn set(&mut self, pair: EscPair, value: Complex64) -> bool {
        if !EscPair::coupled(self.n).contains(&pair) {
            return false;
        }
        self.values[pair.scattered.index()][pair.incident.index()] = value;
        true
    }

    pub fn w_ll(&self) -> Complex64 {
        self.get(EscPair::LL)
    }

    pub fn w_nl(&self) -> Complex64 {
        self.get(EscPair::NL)
    }

    pub fn w_ln(&self) -> Complex64 {
        self.get(EscPair::LN)
    }

    pub fn w_nn(&self) -> Complex64 {
        self.get(EscPair::NN)
    }

    pub fn w_mm(&self) -> Complex64 {
        self.get(EscPair::MM)
    }

    /// Coupled pairs with their values.
    pub fn entries(&self) -> impl Iterator<Item = (EscPair, Complex64)> + '_ {
        EscPair::coupled(self.n).iter().map(move |p| (*p, self.get(*p)))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EscTable {
    pub omega: f64,
    pub rows: Vec<EscRow>,
}

impl EscTable {
    pub fn order(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn row(&self, n: usize) -> Option<&EscRow> {
        self.rows.get(n)
    }

    /// Largest entrywise difference against another table of the same shape.
    pub fn max_abs_diff(&self, other: &EscTable) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| EscPair::all().map(move |p| (a.get(p) - b.get(p)).norm()))
            .fold(0.0, f64::max)
    }
}

/// Prefactor `ζ^ȷ` converting background scattered amplitudes into ESC.
pub fn zeta(background: &Material, omega: f64, n: usize, kind: ModeKind) -> Result<Complex64, ScatteringError> {
    let w = wave_numbers(background, omega)?;
    Ok(match kind {
        ModeKind::L => Complex64::new(0.0, -w.c_p * w.c_p / w.kappa_p),
        ModeKind::M | ModeKind::N => Complex64::new(0.0, -((n * (n + 1)) as f64) * w.c_s * w.c_s / w.kappa_s),
    })
}

/// ESC of one order.
pub fn esc_row(stack: &LayerStack, omega: f64, n: usize) -> Result<EscRow, ScatteringError> {
    let bg = stack.background();
    let mut row = EscRow::zero(n);
    let zl = zeta(bg, omega, n, ModeKind::L)?;
    let l = solve_modes(stack, omega, n, ModeKind::L)?;
    row.set(EscPair::LL, zl * l.layers[0].b(ModeKind::L));
    if n == 0 {
        return Ok(row);
    }
    let zn = zeta(bg, omega, n, ModeKind::N)?;
    let nsol = solve_modes(stack, omega, n, ModeKind::N)?;
    let msol = solve_modes(stack, omega, n, ModeKind::M)?;
    row.set(EscPair::NL, zn * l.layers[0].b(ModeKind::N));
    row.set(EscPair::LN, zl * nsol.layers[0].b(ModeKind::L));
    row.set(EscPair::NN, zn * nsol.layers[0].b(ModeKind::N));
    row.set(EscPair::MM, zn * msol.layers[0].b(ModeKind::M));
    Ok(row)
}

/// ESC for `n = 0..=order` at one frequency.
pub fn esc_table(stack: &LayerStack, omega: f64, order: usize) -> Result<EscTable, ScatteringError> {
    let rows = (0..=order).map(|n| esc_row(stack, omega, n)).collect::<Result<Vec<_>, _>>()?;
    Ok(EscTable { omega, rows })
}

/// Largest relative difference between the coefficients of two solutions.
pub fn solution_distance(a: &ModeSolution, b: &ModeSolution) -> f64 {
    let scale = a
        .layers
        .iter()
        .flat_map(|c| c.a.iter().chain(&c.b))
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    a.layers
        .iter()
        .zip(&b.layers)
        .flat_map(|(x, y)| x.a.iter().zip(&y.a).chain(x.b.iter().zip(&y.b)))
        .map(|(u, v)| (u - v).norm() / scale)
        .fold(0.0, f64::max)
}
