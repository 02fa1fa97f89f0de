use escloak_core::farfield::{
    far_field_amplitude, incident_partial_sum, nm_index, parseval_parts, plane_wave_coeffs, quadrature_parts,
    GammaCoeffs, IncidentWave,
};
use escloak_core::harmonics::{debye_potential, Family, FrameVector3, ModeIndex, ModeKind, SphericalDirection};
use escloak_core::medium::{wave_numbers, Material};
use escloak_core::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_gammas(order: usize, seed: u64) -> GammaCoeffs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GammaCoeffs::zeros(order);
    for v in [&mut g.l, &mut g.m, &mut g.n] {
        for z in v.iter_mut() {
            *z = Complex64::new(2.0 * uniform(&mut rng) - 1.0, 2.0 * uniform(&mut rng) - 1.0);
        }
    }
    g.m[0] = Complex64::new(0.0, 0.0);
    g.n[0] = Complex64::new(0.0, 0.0);
    g
}

#[test]
fn plane_waves_reconstructed_at_order_12() {
    let mat = Material::new(1.4, 0.9, 1.2).unwrap();
    let w = wave_numbers(&mat, 1.0).unwrap();
    let d = [0.48, -0.6, 0.64];
    let qn = (0.8f64 * 0.8 + 0.64 * 0.64).sqrt();
    let q = [0.8 / qn, 0.64 / qn, 0.0];
    let waves = [IncidentWave::pressure(d).unwrap(), IncidentWave::shear(d, q).unwrap()];
    let points = [[1.0, 0.0, 0.0], [0.0, 0.6, -0.8], [-0.36, 0.48, 0.8], [0.0, 0.0, 1.0]];
    for wave in &waves {
        let c = plane_wave_coeffs(wave, 12, w.kappa_p, w.kappa_s).unwrap();
        for x in points {
            let got = incident_partial_sum(&c, x, w.kappa_p, w.kappa_s).unwrap();
            let want = wave.field(x, w.kappa_p, w.kappa_s);
            for i in 0..3 {
                assert!((got[i] - want[i]).norm() < 1e-6, "{:?} at {x:?}: {got:?} vs {want:?}", wave.kind());
            }
        }
    }
}

#[test]
fn parseval_matches_quadrature() {
    let mat = Material::new(2.0, 0.8, 1.1).unwrap();
    for seed in 0..3 {
        let g = random_gammas(3, seed);
        let (p, s) = parseval_parts(&g, &mat, 1.3).unwrap();
        let (qp, qs) = quadrature_parts(&g, &mat, 1.3, 8).unwrap();
        assert!((p - qp).abs() < 1e-8 * p.max(1.0), "{p} {qp}");
        assert!((s - qs).abs() < 1e-8 * s.max(1.0), "{s} {qs}");
    }
}

/// The radiating multipole sum at large radius must approach the far-field
/// pattern times the outgoing spherical wave factors.
#[test]
fn far_field_is_limit_of_scattered_field() {
    let mat = Material::new(1.3, 0.7, 1.0).unwrap();
    let omega = 1.1;
    let w = wave_numbers(&mat, omega).unwrap();
    let g = random_gammas(3, 11);
    let r = 4.0e4;
    let dir = SphericalDirection::new(1.1, 2.3).unwrap();
    let mut near = FrameVector3::ZERO;
    for n in 0..=3usize {
        let nn = (n * (n + 1)) as f64;
        for m in -(n as i64)..=n as i64 {
            let i = nm_index(n, m);
            let lmode = ModeIndex::new(ModeKind::L, n, m).unwrap();
            let hl = debye_potential(lmode, Family::Radiating, r, &dir, w.kappa_p, w.kappa_s).unwrap();
            near = near + hl * (g.l[i] * Complex64::new(0.0, w.kappa_p / (w.c_p * w.c_p)));
            if n > 0 {
                let s = Complex64::new(0.0, w.kappa_s / (nn * w.c_s * w.c_s));
                for (kind, gam) in [(ModeKind::M, g.m[i]), (ModeKind::N, g.n[i])] {
                    let mode = ModeIndex::new(kind, n, m).unwrap();
                    let h = debye_potential(mode, Family::Radiating, r, &dir, w.kappa_p, w.kappa_s).unwrap();
                    near = near + h * (gam * s);
                }
            }
        }
    }
    let ff = far_field_amplitude(&g, &dir, &mat, omega).unwrap();
    let ep = Complex64::from_polar(1.0, w.kappa_p * r) / (w.kappa_p * r);
    let es = Complex64::from_polar(1.0, w.kappa_s * r) / (w.kappa_s * r);
    let far = ff.u_p * ep + ff.u_s * es;
    let scale = far.norm_sqr().sqrt();
    let err = (near - far).norm_sqr().sqrt() / scale;
    assert!(err < 1e-3, "relative mismatch {err}");
}
