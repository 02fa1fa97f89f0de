//! Interface-matrix rows checked against displacements and tractions computed
//! by finite differences of the Debye potential fields.

use escloak_core::harmonics::{
    debye_potential, sph_harm, vec_harm, Family, ModeIndex, ModeKind, SphericalDirection, VecHarmKind,
};
use escloak_core::medium::{wave_numbers, Material};
use escloak_core::scattering::p_matrix;
use escloak_core::Complex64;

type C3 = [Complex64; 3];

fn field(mode: ModeIndex, family: Family, x: [f64; 3], kp: f64, ks: f64) -> C3 {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let dir = SphericalDirection::from_vector(x).unwrap();
    debye_potential(mode, family, r, &dir, kp, ks).unwrap().to_cartesian(&dir)
}

/// Traction `σ e_r` with `∇u` from central differences.
fn traction(mode: ModeIndex, family: Family, x: [f64; 3], mat: &Material, kp: f64, ks: f64) -> C3 {
    let h = 1e-5;
    let mut grad = [[Complex64::new(0.0, 0.0); 3]; 3]; // grad[i][j] = ∂u_i/∂x_j
    for j in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[j] += h;
        xm[j] -= h;
        let up = field(mode, family, xp, kp, ks);
        let um = field(mode, family, xm, kp, ks);
        for i in 0..3 {
            grad[i][j] = (up[i] - um[i]) / (2.0 * h);
        }
    }
    let div = grad[0][0] + grad[1][1] + grad[2][2];
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let e = [x[0] / r, x[1] / r, x[2] / r];
    core::array::from_fn(|i| {
        let mut t = div * mat.lambda * e[i];
        for j in 0..3 {
            t += (grad[i][j] + grad[j][i]) * mat.mu * e[j];
        }
        t
    })
}

fn dot(a: C3, e: [f64; 3]) -> Complex64 {
    a[0] * e[0] + a[1] * e[1] + a[2] * e[2]
}

#[test]
fn rows_match_fields() {
    let mat = Material::new(1.7, 0.6, 1.3).unwrap();
    let omega = 1.2;
    let w = wave_numbers(&mat, omega).unwrap();
    let r = 1.35;
    let dir = SphericalDirection::new(0.9, 0.4).unwrap();
    let x = dir.e_r().map(|c| c * r);
    let (et, ep) = (dir.e_theta(), dir.e_phi());
    for n in 1..=3usize {
        let m = 1i64.min(n as i64);
        let nn = (n * (n + 1)) as f64;
        let sq = nn.sqrt();
        let y = sph_harm(n, m, &dir).unwrap();
        let b = vec_harm(VecHarmKind::B, n, m, &dir).unwrap();
        let c = vec_harm(VecHarmKind::C, n, m, &dir).unwrap();
        let p = p_matrix(&mat, omega, r, n).unwrap();
        let cols = [
            (ModeKind::L, Family::Entire, 0),
            (ModeKind::N, Family::Entire, 1),
            (ModeKind::L, Family::Radiating, 2),
            (ModeKind::N, Family::Radiating, 3),
        ];
        for (kind, family, col) in cols {
            let mode = ModeIndex::new(kind, n, m).unwrap();
            let u = field(mode, family, x, w.kappa_p, w.kappa_s);
            let t = traction(mode, family, x, &mat, w.kappa_p, w.kappa_s);
            let checks = [
                (dot(u, dir.e_r()), p.ln_block[(0, col)] * y),
                (dot(u, et), p.ln_block[(1, col)] * sq * b.theta()),
                (dot(t, dir.e_r()), p.ln_block[(2, col)] * 2.0 * y),
                (dot(t, et), p.ln_block[(3, col)] * 2.0 * b.theta()),
                (dot(t, ep), p.ln_block[(3, col)] * 2.0 * b.phi()),
            ];
            for (k, (got, want)) in checks.iter().enumerate() {
                let tol = 1e-6 * want.norm().max(1.0);
                assert!((got - want).norm() < tol, "n={n} {kind:?} {family:?} check {k}: {got} vs {want}");
            }
        }
        for (family, col) in [(Family::Entire, 0), (Family::Radiating, 1)] {
            let mode = ModeIndex::new(ModeKind::M, n, m).unwrap();
            let u = field(mode, family, x, w.kappa_p, w.kappa_s);
            let t = traction(mode, family, x, &mat, w.kappa_p, w.kappa_s);
            let checks = [
                (dot(u, et), p.m_block[(0, col)] * sq * c.theta()),
                (dot(t, et), p.m_block[(1, col)] * sq * c.theta()),
                (dot(t, dir.e_r()), Complex64::new(0.0, 0.0)),
            ];
            for (k, (got, want)) in checks.iter().enumerate() {
                let tol = 1e-6 * want.norm().max(1.0);
                assert!((got - want).norm() < tol, "n={n} M {family:?} check {k}: {got} vs {want}");
            }
        }
    }
}
