mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use regge_core::io_model::{CamWindow, SMatrixTable};
use regge_core::pade_recon::*;
use regge_core::Error;

fn rational_table(poles: &[Complex64], zeros: &[Complex64], n: usize) -> SMatrixTable {
    let s = (0..n)
        .map(|j| {
            let x = c(j as f64, 0.0);
            let num: Complex64 = zeros.iter().map(|z| x - z).product();
            let den: Complex64 = poles.iter().map(|p| x - p).product();
            0.7 * num / den
        })
        .collect();
    SMatrixTable {
        energy: 10.0,
        s_values: s,
        nread: n,
        niter: 0,
        sht: 0.0,
        jstart: 1,
        jfin: n,
        dxl: 0.1,
        file_index: 1,
    }
}

fn contains(set: &[Complex64], z: Complex64, tol: f64) -> bool {
    set.iter().any(|p| (p - z).norm() < tol)
}

#[test]
fn recovers_a_rational_function() {
    let poles = [c(3.0, 0.4), c(6.5, 1.2)];
    let zeros = [c(2.0, -0.5), c(8.0, 0.3)];
    let t = rational_table(&poles, &zeros, 12);
    for mp in [false, true] {
        let m = build_approximant(&t, false, false, mp).unwrap();
        for p in poles {
            assert!(contains(&m.poles, p, 1e-6), "mp = {mp}: {:?}", m.poles);
        }
        for z in zeros {
            assert!(contains(&m.zeros, z, 1e-6), "mp = {mp}: {:?}", m.zeros);
        }
        let probe = c(4.3, 2.1);
        let exact = 0.7 * (probe - zeros[0]) * (probe - zeros[1])
            / ((probe - poles[0]) * (probe - poles[1]));
        assert!(rel(m.evaluate(probe).unwrap(), exact) < 1e-6);
    }
}

#[test]
fn multi_precision_matches_double_on_example_data() {
    let t = table(&example1(), 30.0);
    let a = build_approximant(&t, true, true, false).unwrap();
    let b = build_approximant(&t, true, true, true).unwrap();
    let w = CamWindow::default();
    let pa = poles_zeros_in_window(&a, &w).poles;
    let pb = poles_zeros_in_window(&b, &w).poles;
    assert_eq!(pa.len(), pb.len());
    for p in &pa {
        assert!(pb.iter().any(|q| (q.position - p.position).norm() < 1e-6));
    }
}

#[test]
fn interpolates_every_retained_point() {
    for (p, e) in [(example1(), 18.0), (example1(), 45.0), (example2(), 70.0)] {
        let t = table(&p, e);
        let m = build_approximant(&t, true, true, false).unwrap();
        for j in t.retained_j() {
            assert!((m.physical(c(j as f64, 0.0)) - t.s_values[j]).norm() < 1e-9);
        }
    }
}

#[test]
fn parity_flip_changes_model_not_physics() {
    let t = table(&example1(), 30.0);
    let a = build_approximant(&t, true, true, false).unwrap();
    let b = build_approximant(&t, false, true, false).unwrap();
    for j in t.retained_j() {
        let x = c(j as f64, 0.0);
        assert!((a.physical(x) - b.physical(x)).norm() < 1e-8);
    }
    // the flipped model carries e^{−iπJ}
    let x = c(3.3, 0.2);
    let f = (-I * std::f64::consts::PI * x).exp();
    assert!((a.physical(x) - f * a.evaluate(x).unwrap()).norm() < 1e-12);
}

#[test]
fn residue_matches_limit_probe() {
    let t = table(&example1(), 30.0);
    let m = build_approximant(&t, true, true, false).unwrap();
    let i = m
        .poles
        .iter()
        .position(|p| (p - c(8.2, 0.34)).norm() < 0.1)
        .unwrap();
    let res = m.physical_residue(i).unwrap();
    let p = m.poles[i];
    for dir in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)] {
        let eps = 1e-7 * dir;
        let probe = eps * m.physical(p + eps);
        assert!(rel(probe, res) < 1e-6, "direction {dir}");
    }
}

#[test]
fn evaluation_on_a_pole_is_rejected() {
    let m = PadeModel::from_parts(c(1.0, 0.0), (0.0, 0.0, 0.0), vec![], vec![c(2.0, 0.5)]);
    assert!(matches!(m.evaluate(c(2.0, 0.5)), Err(Error::Proximity { .. })));
    assert!(m.evaluate(c(2.0, 0.6)).is_ok());
}

#[test]
fn coincident_poles_have_no_residue() {
    let m = PadeModel::from_parts(
        c(1.0, 0.0),
        (0.0, 0.0, 0.0),
        vec![],
        vec![c(2.0, 0.5), c(2.0, 0.5 + 1e-12)],
    );
    assert!(matches!(m.residue_at(0), Err(Error::Degeneracy { .. })));
    assert!(m.residue_at(5).is_err());
}

#[test]
fn identity_model_is_one() {
    let m = PadeModel::identity();
    assert_eq!(m.evaluate(c(3.7, -1.0)).unwrap(), c(1.0, 0.0));
}

#[test]
fn too_few_points_is_a_validation_error() {
    let t = rational_table(&[c(1.0, 1.0)], &[], 3);
    assert!(matches!(build_approximant(&t, false, false, false), Err(Error::Validation(_))));
}

#[test]
fn window_and_froissart_filter() {
    let m = PadeModel::from_parts(
        c(1.0, 0.0),
        (0.0, 0.0, 0.0),
        vec![c(5.0 + 1e-9, 1.0), c(20.0, 2.0), c(70.0, 1.0)],
        vec![c(5.0, 1.0), c(8.0, 0.3), c(3.0, -0.5)],
    );
    let set = poles_zeros_in_window(&m, &CamWindow::default());
    assert_eq!(set.poles.len(), 2);
    assert_eq!(set.zeros.len(), 2);
    let f = filter_froissart(&set, 1e-6);
    assert_eq!(f.poles.len(), 1);
    assert_eq!(f.poles[0].position, c(8.0, 0.3));
    assert_eq!(f.zeros, vec![c(20.0, 2.0)]);
    assert_eq!(filter_froissart(&set, 0.0), set);
}

#[test]
fn phase_walk_rejects_descending_grid() {
    let m = build_approximant(&table(&example1(), 30.0), true, true, false).unwrap();
    assert!(phase_on_grid(&m, &[3.0, 2.0]).is_err());
    let fwd = phase_on_grid(&m, &[2.0, 5.0, 9.0]).unwrap();
    let single = s_phase_and_modulus(&m, 9.0).unwrap();
    assert!((fwd[2].0 - single.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_models_are_reproduced(
        pr in 1.0f64..10.0, pi in 0.3f64..3.0,
        zr in 1.0f64..10.0, zi in -3.0f64..-0.3,
    ) {
        let p = c(pr, pi);
        let z = c(zr, zi);
        let t = rational_table(&[p], &[z], 10);
        // the system is rank deficient, so double precision may refuse it
        let m = match build_approximant(&t, false, false, false) {
            Err(Error::Conditioning { .. }) => build_approximant(&t, false, false, true).unwrap(),
            other => other.unwrap(),
        };
        prop_assert!(contains(&m.poles, p, 1e-6));
        for j in 0..10 {
            prop_assert!((m.physical(c(j as f64, 0.0)) - t.s_values[j]).norm() < 1e-9);
        }
    }

    #[test]
    fn phase_derivative_matches_finite_difference(lam in 1.0f64..14.0) {
        let m = build_approximant(&table(&example1(), 30.0), true, true, false).unwrap();
        let h = 1e-4;
        let ph = phase_on_grid(&m, &[lam - h, lam + h]).unwrap();
        let fd = (ph[1].0 - ph[0].0) / (2.0 * h);
        prop_assert!((fd - m.phase_derivative(lam)).abs() < 1e-4);
    }
}
