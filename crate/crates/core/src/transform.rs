//! Radial diffeomorphisms and the push-forward of an elasticity tensor and
//! density. The transformed tensor acts on the gradient indices only, so it
//! keeps major symmetry but generally loses the `(i, j)` minor symmetry.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::medium::{LayerStack, Material};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("eps must lie in (0, 1), got {0}")]
    Eps(f64),
    #[error("dilation factor must be finite and positive, got {0}")]
    Scale(f64),
    #[error("map is not orientation preserving here (det = {det})")]
    Orientation { det: f64 },
    #[error("density must be finite and positive, got {0}")]
    Density(f64),
    #[error("point has non-finite coordinates")]
    Point,
}

/// Which branch to use when a point sits exactly on a branch radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Side {
    Inner,
    #[default]
    Outer,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RadialMap {
    Identity,
    /// `x ↦ s x`.
    Dilation(f64),
    /// The regularised blow-up `F_ε`.
    BlowUp { eps: f64 },
    /// Inverse of `F_ε`.
    BlowUpInverse { eps: f64 },
    /// Maps applied left to right.
    Composite(Vec<RadialMap>),
}

/// `g(r) = a + b r` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
struct Branch {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
}

impl Branch {
    fn eval(&self, r: f64) -> (f64, f64) {
        (self.a + self.b * r, self.b)
    }

    fn inverse(&self) -> Branch {
        let (lo, _) = self.eval(self.lo);
        let hi = if self.hi.is_finite() { self.eval(self.hi).0 } else { f64::INFINITY };
        Branch { lo, hi, a: -self.a / self.b, b: 1.0 / self.b }
    }
}

fn blowup_branches(eps: f64) -> [Branch; 4] {
    let d = 1.0 - eps;
    [
        Branch { lo: 0.0, hi: eps, a: 0.0, b: 1.0 / eps },
        Branch { lo: eps, hi: 2.0 * eps, a: 0.5, b: 0.5 / eps },
        Branch { lo: 2.0 * eps, hi: 2.0, a: (3.0 - 4.0 * eps) / (2.0 * d), b: 0.25 / d },
        Branch { lo: 2.0, hi: f64::INFINITY, a: 0.0, b: 1.0 },
    ]
}

fn select(branches: &[Branch], r: f64, side: Side) -> Branch {
    let hit = match side {
        Side::Inner => branches.iter().find(|b| r <= b.hi),
        Side::Outer => branches.iter().find(|b| r < b.hi),
    };
    *hit.unwrap_or(&branches[branches.len() - 1])
}

impl RadialMap {
    pub fn identity() -> Self {
        RadialMap::Identity
    }

    pub fn dilation(s: f64) -> Result<Self, TransformError> {
        if s.is_finite() && s > 0.0 {
            Ok(RadialMap::Dilation(s))
        } else {
            Err(TransformError::Scale(s))
        }
    }

    /// `ψ_{1/ε}: x ↦ x/ε`.
    pub fn psi_inv_eps(eps: f64) -> Result<Self, TransformError> {
        check_eps(eps)?;
        Ok(RadialMap::Dilation(1.0 / eps))
    }

    pub fn blow_up(eps: f64) -> Result<Self, TransformError> {
        check_eps(eps)?;
        Ok(RadialMap::BlowUp { eps })
    }

    pub fn then(self, next: RadialMap) -> Self {
        let mut maps = match self {
            RadialMap::Composite(v) => v,
            m => alloc::vec![m],
        };
        match next {
            RadialMap::Composite(v) => maps.extend(v),
            m => maps.push(m),
        }
        RadialMap::Composite(maps)
    }

    pub fn inverse(&self) -> RadialMap {
        match self {
            RadialMap::Identity => RadialMap::Identity,
            RadialMap::Dilation(s) => RadialMap::Dilation(1.0 / s),
            RadialMap::BlowUp { eps } => RadialMap::BlowUpInverse { eps: *eps },
            RadialMap::BlowUpInverse { eps } => RadialMap::BlowUp { eps: *eps },
            RadialMap::Composite(v) => RadialMap::Composite(v.iter().rev().map(|m| m.inverse()).collect()),
        }
    }

    /// Radii where the profile changes branch.
    pub fn branch_radii(&self) -> Vec<f64> {
        match self {
            RadialMap::BlowUp { eps } => alloc::vec![*eps, 2.0 * eps, 2.0],
            RadialMap::BlowUpInverse { .. } => alloc::vec![1.0, 1.5, 2.0],
            _ => Vec::new(),
        }
    }

    /// `(g(r), g'(r))` of the radial profile.
    pub fn profile(&self, r: f64, side: Side) -> (f64, f64) {
        match self {
            RadialMap::Identity => (r, 1.0),
            RadialMap::Dilation(s) => (s * r, *s),
            RadialMap::BlowUp { eps } => select(&blowup_branches(*eps), r, side).eval(r),
            RadialMap::BlowUpInverse { eps } => {
                let inv = blowup_branches(*eps).map(|b| b.inverse());
                select(&inv, r, side).eval(r)
            }
            RadialMap::Composite(v) => v.iter().fold((r, 1.0), |(g, d), m| {
                let (g2, d2) = m.profile(g, side);
                (g2, d * d2)
            }),
        }
    }

    /// `g(r)/r`, with its limit at the origin where every profile is linear.
    fn ratio(&self, r: f64, side: Side) -> f64 {
        if r == 0.0 {
            self.profile(0.0, side).1
        } else {
            self.profile(r, side).0 / r
        }
    }
}

fn check_eps(eps: f64) -> Result<(), TransformError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(TransformError::Eps(eps))
    }
}

fn norm(x: &Vec3) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub fn apply_map(map: &RadialMap, x: Vec3) -> Vec3 {
    let k = map.ratio(norm(&x), Side::Outer);
    [k * x[0], k * x[1], k * x[2]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub matrix: Mat3,
    pub det: f64,
    /// The point lies on a branch radius; `side` says which branch was used.
    pub on_interface: bool,
    pub side: Side,
}

/// `M = g'(r) x̂x̂ᵀ + (g(r)/r)(I − x̂x̂ᵀ)`.
pub fn jacobian(map: &RadialMap, x: Vec3, side: Side) -> Result<Jacobian, TransformError> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(TransformError::Point);
    }
    let r = norm(&x);
    let on_interface = map.branch_radii().contains(&r);
    let (_, d) = map.profile(r, side);
    let k = map.ratio(r, side);
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        m[i][i] = k;
        if r > 0.0 {
            for j in 0..3 {
                m[i][j] += (d - k) * x[i] * x[j] / (r * r);
            }
        }
    }
    let det = if r > 0.0 { d * k * k } else { k * k * k };
    Ok(Jacobian { matrix: m, det, on_interface, side })
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Dense fourth-order tensor, `C[i][j][k][l]` flattened row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityTensor {
    pub entries: [f64; 81],
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SymmetryReport {
    /// `max |C_ijkl − C_klij|`.
    pub major: f64,
    /// `max |C_ijkl − C_jikl|`.
    pub minor_left: f64,
    /// `max |C_ijkl − C_ijlk|`.
    pub minor_right: f64,
}

impl SymmetryReport {
    pub fn has_major(&self, tol: f64) -> bool {
        self.major <= tol
    }

    pub fn has_minor_left(&self, tol: f64) -> bool {
        self.minor_left <= tol
    }

    pub fn has_minor_right(&self, tol: f64) -> bool {
        self.minor_right <= tol
    }
}

#[inline]
fn idx(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 3 + j) * 3 + k) * 3 + l
}

impl ElasticityTensor {
    pub fn zeros() -> Self {
        Self { entries: [0.0; 81] }
    }

    /// `λ δ_ij δ_kl + μ (δ_ik δ_jl + δ_il δ_jk)`.
    pub fn isotropic(lambda: f64, mu: f64) -> Self {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut t = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        t.entries[idx(i, j, k, l)] =
                            lambda * d(i, j) * d(k, l) + mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
                    }
                }
            }
        }
        t
    }

    pub fn from_material(m: &Material) -> Self {
        Self::isotropic(m.lambda, m.mu)
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.entries[idx(i, j, k, l)]
    }

    pub fn symmetry(&self) -> SymmetryReport {
        let mut s = SymmetryReport { major: 0.0, minor_left: 0.0, minor_right: 0.0 };
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let c = self.get(i, j, k, l);
                        s.major = s.major.max((c - self.get(k, l, i, j)).abs());
                        s.minor_left = s.minor_left.max((c - self.get(j, i, k, l)).abs());
                        s.minor_right = s.minor_right.max((c - self.get(i, j, l, k)).abs());
                    }
                }
            }
        }
        s
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushForward {
    /// Image point `x̃ = F(x)`.
    pub image: Vec3,
    pub tensor: ElasticityTensor,
    pub rho: f64,
    pub symmetry: SymmetryReport,
    pub jacobian: Jacobian,
}

/// `C̃_ijkl = (1/det M) Σ_pq C_ipkq M_jp M_lq` and `ρ̃ = ρ/det M`, both at
/// `x̃ = map(x)`.
pub fn pushforward(
    c: &ElasticityTensor,
    rho: f64,
    map: &RadialMap,
    x: Vec3,
    side: Side,
) -> Result<PushForward, TransformError> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(TransformError::Density(rho));
    }
    let jac = jacobian(map, x, side)?;
    if jac.det.is_nan() || jac.det <= 0.0 {
        return Err(TransformError::Orientation { det: jac.det });
    }
    let m = &jac.matrix;
    let mut out = ElasticityTensor::zeros();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut s = 0.0;
                    for p in 0..3 {
                        for q in 0..3 {
                            s += c.get(i, p, k, q) * m[j][p] * m[l][q];
                        }
                    }
                    out.entries[idx(i, j, k, l)] = s / jac.det;
                }
            }
        }
    }
    Ok(PushForward {
        image: apply_map(map, x),
        symmetry: out.symmetry(),
        tensor: out,
        rho: rho / jac.det,
        jacobian: jac,
    })
}

/// Material of `stack` shrunk by `ε`, at `x`; `None` inside the cavity.
pub fn shrunk_material(stack: &LayerStack, eps: f64, x: Vec3) -> Option<Material> {
    let r = norm(&x) / eps;
    let radii = stack.radii();
    if r < stack.core_radius() {
        return None;
    }
    let layer = radii.iter().take_while(|&&rl| r < rl).count();
    Some(*stack.material(layer))
}

/// Push-forward of the `ε`-shrunk stack under `F_ε` at the pre-image point
/// `x`; `None` inside the cavity.
pub fn cloak_at(stack: &LayerStack, eps: f64, x: Vec3) -> Result<Option<PushForward>, TransformError> {
    let map = RadialMap::blow_up(eps)?;
    match shrunk_material(stack, eps, x) {
        None => Ok(None),
        Some(m) => pushforward(&ElasticityTensor::from_material(&m), m.rho, &map, x, Side::Outer).map(Some),
    }
}
