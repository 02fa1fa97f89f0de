use escloak_core::design::{objective, DesignProblem, ModeWeights};
use escloak_core::farfield::{far_field_amplitude, GammaCoeffs};
use escloak_core::harmonics::SphericalDirection;
use escloak_core::medium::{LayerStack, Material};
use escloak_core::scattering::{esc_table, solve_modes, EscPair};
use escloak_core::specfun::{sph_bessel_derivative, sph_bessel_j, sph_bessel_y, BesselKind};
use escloak_core::transform::{apply_map, jacobian, pushforward, ElasticityTensor, RadialMap, Side};
use escloak_core::{Complex64, ModeKind};
use proptest::prelude::*;

fn material() -> impl Strategy<Value = Material> {
    (0.3f64..3.0, 0.3f64..3.0, 0.3f64..3.0).prop_map(|(l, m, r)| Material::new(l, m, r).unwrap())
}

fn stack() -> impl Strategy<Value = LayerStack> {
    (material(), prop::collection::vec(material(), 0..=3))
        .prop_map(|(bg, layers)| LayerStack::with_default_radii(bg, layers).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wronskian(n in 0usize..=20, t in 0.1f64..50.0) {
        let j = sph_bessel_j(n, t).unwrap();
        let y = sph_bessel_y(n, t).unwrap();
        let dj = sph_bessel_derivative(BesselKind::J, n, t).unwrap().re;
        let dy = sph_bessel_derivative(BesselKind::Y, n, t).unwrap().re;
        prop_assert!((t * t * (j * dy - dj * y) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn recurrence(n in 1usize..=20, t in 0.1f64..50.0) {
        let lhs = sph_bessel_j(n - 1, t).unwrap() + sph_bessel_j(n + 1, t).unwrap();
        let rhs = (2 * n + 1) as f64 / t * sph_bessel_j(n, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(rhs.abs()).max(1e-300));
    }

    #[test]
    fn coupling_symmetry(s in stack(), omega in 0.5f64..2.0) {
        let t = esc_table(&s, omega, 3).unwrap();
        for row in t.rows.iter().skip(1) {
            let (a, b) = (row.w_nl(), row.w_ln());
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-12));
        }
    }

    #[test]
    fn scattered_coefficients_scale_invariant(s in stack(), omega in 0.5f64..2.0, k in 0.5f64..2.0) {
        let big = s.scaled(k).unwrap();
        for n in 0..=3 {
            for inc in ModeKind::ALL {
                if n == 0 && inc != ModeKind::L {
                    continue;
                }
                let a = solve_modes(&s, omega, n, inc).unwrap().scattered();
                let b = solve_modes(&big, omega / k, n, inc).unwrap().scattered();
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).norm() <= 1e-10 * x.norm().max(1.0));
                }
            }
        }
        let w = esc_table(&s, omega, 3).unwrap();
        let wb = esc_table(&big, omega / k, 3).unwrap();
        for (r, rb) in w.rows.iter().zip(&wb.rows) {
            for (p, v) in r.entries() {
                prop_assert!((rb.get(p) - v * k).norm() <= 1e-10 * v.norm().max(1.0));
            }
        }
    }

    #[test]
    fn weight_linearity(m in material(), c in 0.1f64..5.0) {
        let p = DesignProblem::with_defaults(1, Material::unit(), 1.0).unwrap();
        let mut q = p.clone();
        q.mode_weights = p.mode_weights.scaled(c);
        let x = m.as_array();
        let (a, b) = (objective(&p, &x).unwrap(), objective(&q, &x).unwrap());
        prop_assert!((b - c * a).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn incident_weights_split_objective(m in material()) {
        let p = DesignProblem::with_defaults(1, Material::unit(), 1.0).unwrap();
        let x = m.as_array();
        let total = objective(&p, &x).unwrap();
        let parts: f64 = ModeKind::ALL
            .iter()
            .map(|k| {
                let mut q = p.clone();
                q.mode_weights = ModeWeights::incident(*k);
                objective(&q, &x).unwrap()
            })
            .sum();
        prop_assert!((total - parts).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn far_field_linear(re in -2.0f64..2.0, im in -2.0f64..2.0, theta in 0.01f64..3.1, phi in 0.0f64..6.0) {
        let mat = Material::unit();
        let mut g = GammaCoeffs::zeros(2);
        for (i, z) in g.l.iter_mut().enumerate() {
            *z = Complex64::new(0.3 * i as f64, -0.2);
        }
        for (i, z) in g.n.iter_mut().enumerate().skip(1) {
            *z = Complex64::new(0.1, 0.05 * i as f64);
        }
        let c = Complex64::new(re, im);
        let d = SphericalDirection::new(theta, phi).unwrap();
        let a = far_field_amplitude(&g, &d, &mat, 1.0).unwrap();
        let b = far_field_amplitude(&g.scale(c), &d, &mat, 1.0).unwrap();
        for i in 0..3 {
            prop_assert!((b.u_p.0[i] - a.u_p.0[i] * c).norm() < 1e-12);
            prop_assert!((b.u_s.0[i] - a.u_s.0[i] * c).norm() < 1e-12);
        }
    }

    #[test]
    fn pushforward_keeps_major_symmetry(
        m in material(),
        eps in 0.05f64..0.5,
        x in prop::array::uniform3(-2.5f64..2.5),
    ) {
        let f = RadialMap::blow_up(eps).unwrap();
        let out = pushforward(&ElasticityTensor::from_material(&m), m.rho, &f, x, Side::Outer).unwrap();
        prop_assert!(out.symmetry.major <= 1e-12 * out.tensor.entries.iter().fold(1.0f64, |a, v| a.max(v.abs())));
        prop_assert!(out.jacobian.det > 0.0 && out.rho > 0.0);
    }

    #[test]
    fn blow_up_round_trip(eps in 0.05f64..0.9, x in prop::array::uniform3(-3.0f64..3.0)) {
        let f = RadialMap::blow_up(eps).unwrap();
        let y = apply_map(&f.inverse(), apply_map(&f, x));
        for i in 0..3 {
            prop_assert!((y[i] - x[i]).abs() < 1e-12);
        }
        prop_assert!(jacobian(&f, x, Side::Inner).unwrap().det > 0.0);
    }
}

#[test]
fn structural_pairs_are_exactly_zero() {
    let s = LayerStack::with_default_radii(Material::unit(), vec![Material::new(2.0, 0.5, 1.3).unwrap()]).unwrap();
    let t = esc_table(&s, 1.0, 4).unwrap();
    for row in &t.rows {
        for p in EscPair::all() {
            if (p.scattered == ModeKind::M) != (p.incident == ModeKind::M) {
                assert_eq!(row.get(p), Complex64::new(0.0, 0.0));
            }
        }
    }
}
