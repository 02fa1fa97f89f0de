//! ESC values checked against an independent SciPy-based evaluation of the
//! same boundary-value problem (double precision, `scipy.special`
//! spherical Bessel functions, dense `numpy.linalg.solve`).

use escloak_core::medium::{LayerStack, Material};
use escloak_core::scattering::{esc_table, EscPair};
use escloak_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Case {
    radii: Vec<f64>,
    layers: Vec<(f64, f64, f64)>,
    w0: Complex64,
    // LL, NL, LN, NN, MM for n = 1 and n = 2
    rows: [[Complex64; 5]; 2],
}

fn cases() -> Vec<Case> {
    vec![
        Case {
            radii: vec![1.0],
            layers: vec![],
            w0: c(0.40726666656491445, 0.032119496538137546),
            rows: [
                [
                    c(-0.0798607368947, 0.0144551154594),
                    c(-0.1602358205602, 0.0264479765889),
                    c(-0.1602358205602, 0.0264479765889),
                    c(-0.2904622413293, 0.0484329036414),
                    c(-0.0344057618798, 0.0005920534889),
                ],
                [
                    c(0.0513554356449, 0.0113357024138),
                    c(0.248594613139, 0.0549651791947),
                    c(0.248594613139, 0.0549651791947),
                    c(1.2054995622257, 0.2665182287142),
                    c(0.0244023865269, 9.92477197e-05),
                ],
            ],
        },
        Case {
            radii: vec![2.0, 1.0],
            layers: vec![(2.9, 0.7, 0.9)],
            w0: c(-0.12391525350192496, 0.0029567516849264915),
            rows: [
                [
                    c(-0.1799176523452, 0.0316779142364),
                    c(-0.2203282237325, 0.0443362236038),
                    c(-0.2203282237325, 0.0443362236038),
                    c(-0.3182173689141, 0.0622919906899),
                    c(-0.0761620296692, 0.0029045455742),
                ],
                [
                    c(0.0815307858781, 0.0269591425117),
                    c(0.3712941373419, 0.1240188796141),
                    c(0.3712941373419, 0.1240188796141),
                    c(1.7090014786041, 0.5705211230029),
                    c(0.149268310922, 0.0037158059766),
                ],
            ],
        },
        Case {
            radii: vec![2.0, 1.4, 1.0],
            layers: vec![(2.0, 0.5, 1.3), (0.7, 1.9, 0.4)],
            w0: c(0.10039625563731369, 0.001940507686420367),
            rows: [
                [
                    c(-0.0552205066383, 0.0056853650725),
                    c(-0.1006637218179, 0.0071712055232),
                    c(-0.1006637218179, 0.0071712055232),
                    c(-0.1204090689531, 0.0092520010205),
                    c(0.1785465929053, 0.0160685419391),
                ],
                [
                    c(0.0931011404228, 0.025749534253),
                    c(0.3645040576874, 0.1042096319277),
                    c(0.3645040576874, 0.1042096319277),
                    c(1.4787789468268, 0.4217727082648),
                    c(0.2589752198684, 0.0111989300902),
                ],
            ],
        },
    ]
}

#[test]
fn esc_matches_independent_reference() {
    let pairs = [EscPair::LL, EscPair::NL, EscPair::LN, EscPair::NN, EscPair::MM];
    for case in cases() {
        let layers = case
            .layers
            .iter()
            .map(|&(l, m, r)| Material::new(l, m, r).unwrap())
            .collect();
        let stack = LayerStack::new(case.radii.clone(), Material::unit(), layers).unwrap();
        let t = esc_table(&stack, 1.0, 2).unwrap();
        assert!((t.rows[0].w_ll() - case.w0).norm() < 1e-11, "n=0 {:?}", case.radii);
        for (k, row) in case.rows.iter().enumerate() {
            for (p, want) in pairs.iter().zip(row) {
                let got = t.rows[k + 1].get(*p);
                assert!((got - want).norm() < 1e-11, "{:?} n={} {p}: {got} vs {want}", case.radii, k + 1);
            }
        }
    }
}
