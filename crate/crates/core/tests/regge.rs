mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use regge_core::regge_analysis::*;
use regge_core::Error;

fn pole(re: f64, im: f64, e: f64) -> ReggePole {
    ReggePole::new(c(re, im), c(0.3, -0.2), e)
}

fn cands(e: f64, poles: &[(f64, f64)]) -> PoleCandidates {
    PoleCandidates {
        energy: e,
        poles: poles.iter().map(|&(r, i)| pole(r, i, e)).collect(),
    }
}

#[test]
fn tails_are_defined_beyond_the_first_zone() {
    let p = pole(5.0, 0.4, 1.0);
    assert!(matches!(tail_f(&p, 3.0), Err(Error::Domain(_))));
    assert!(matches!(tail_g(&p, 3.0), Err(Error::Domain(_))));
    let g = tail_g(&p, PI).unwrap();
    let expect = 2.0 * PI * I * p.lambda_n * p.residue * (I * p.lambda_n * PI).exp();
    assert!((g - expect).norm() < 1e-15);
    let f = tail_f(&p, 2.0 * PI).unwrap();
    assert!(rel(f * p.lambda_n.sqrt(), tail_g(&p, 2.0 * PI).unwrap()) < 1e-14);
}

#[test]
fn tails_decay_with_the_pole_width() {
    let p = pole(5.0, 0.4, 1.0);
    let a = tail_g(&p, 2.0 * PI).unwrap().norm();
    let b = tail_g(&p, 4.0 * PI).unwrap().norm();
    assert!((b / a - (-0.4 * 2.0 * PI).exp()).abs() < 1e-12);
}

#[test]
fn closed_forms_need_a_convergent_series() {
    let p = pole(5.0, -0.1, 1.0);
    assert!(matches!(fw_tail_closed(&p, 1.0), Err(Error::Domain(_))));
    assert!(matches!(bw_tail_closed(&p, 1.0), Err(Error::Domain(_))));
    assert!(matches!(sw_tail_closed(&pole(5.0, 0.3, 1.0), 1.0, 0.0), Err(Error::Endpoint { .. })));
}

#[test]
fn resonance_denominator_is_detected() {
    // 1 + e^{2πiλ} vanishes at λ = ½ on the real axis; push just off it.
    let p = ReggePole::new(c(0.5, 1e-13), c(1.0, 0.0), 1.0);
    assert!(matches!(fw_tail_closed(&p, 1.0), Err(Error::ResonanceDenominator { .. })));
}

#[test]
fn zone_angles_alternate_far_and_near() {
    let t = 0.4;
    assert!((zone_angle(1, t) - (PI + t)).abs() < 1e-15);
    assert!((zone_angle(2, t) - (3.0 * PI - t)).abs() < 1e-15);
    assert!((zone_angle(3, t) - (3.0 * PI + t)).abs() < 1e-15);
    assert!((zone_angle(4, t) - (5.0 * PI - t)).abs() < 1e-15);
}

#[test]
fn sideways_terms_are_projected_tails() {
    // Each zone term is the f-tail at φ_K with the NS/FS prefactor.
    let p = pole(6.0, 0.5, 1.0);
    let (k, t) = (2.5, 1.1);
    let terms = sw_tail_terms(&p, k, t, (1, 4)).unwrap();
    for (i, term) in terms.iter().enumerate() {
        let kk = i as i32 + 1;
        let tail = tail_f(&p, zone_angle(kk, t)).unwrap();
        let pre = 1.0 / (I * k * (2.0 * PI * t.sin()).sqrt());
        let m = (kk / 2) as f64;
        let phase = if kk % 2 == 1 { -(m + 0.75) * PI } else { -(m + 0.25) * PI };
        let expect = pre * tail * Complex64::from_polar(1.0, phase);
        assert!(rel(*term, expect) < 1e-12, "K = {kk}");
    }
}

#[test]
fn forward_terms_are_projected_tails() {
    let p = pole(6.0, 0.5, 1.0);
    let k = 2.5;
    let terms = fw_tail_terms(&p, k, (0, 3));
    for (m, term) in terms.iter().enumerate() {
        let g = tail_g(&p, (2 * m + 1) as f64 * PI).unwrap();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        assert!(rel(*term, -sign * g / k) < 1e-14);
    }
    let terms = bw_tail_terms(&p, k, (0, 3));
    assert_eq!(terms.len(), 3);
    let g = tail_g(&p, 2.0 * PI).unwrap();
    assert!(rel(terms[0], -g / (I * k)) < 1e-14);
}

#[test]
fn selection_by_index_near_and_skip() {
    let c0 = cands(10.0, &[(4.0, 0.3), (9.0, 0.5)]);
    assert_eq!(resolve_selection(&c0, Selection::Skip).unwrap(), None);
    assert_eq!(resolve_selection(&c0, Selection::Index(1)).unwrap().unwrap().lambda_n, c(9.0, 0.5));
    let near = resolve_selection(&c0, Selection::Near(c(3.4, -0.1))).unwrap().unwrap();
    assert_eq!(near.lambda_n, c(4.0, 0.3));
    match resolve_selection(&c0, Selection::Near(c(6.0, 0.0))) {
        Err(Error::Selection { candidates, .. }) => assert_eq!(candidates.len(), 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(resolve_selection(&c0, Selection::Index(2)), Err(Error::Selection { .. })));
}

#[test]
fn nearest_successor_breaks_ties_deterministically() {
    let prev = pole(5.0, 0.5, 1.0);
    let next = [pole(5.5, 0.5, 2.0), pole(4.5, 0.5, 2.0), pole(5.2, 2.0, 2.0)];
    assert_eq!(nearest_successor(&prev, &next).unwrap().lambda_n, c(5.2, 2.0));
    let tie = [pole(5.5, 0.5, 2.0), pole(4.5, 0.5, 2.0)];
    assert_eq!(nearest_successor(&prev, &tie).unwrap().lambda_n, c(4.5, 0.5));
    assert!(nearest_successor(&prev, &[]).is_none());
}

#[test]
fn automatic_following_records_gaps() {
    let list = vec![
        cands(10.0, &[(4.0, 0.3), (9.0, 0.5)]),
        cands(11.0, &[(4.2, 0.32), (9.1, 0.5)]),
        cands(12.0, &[]),
        cands(13.0, &[(4.5, 0.36)]),
    ];
    let mut calls = 0;
    let t = follow_trajectory(&list, "r", FollowMode::Automatic, |_, last| {
        calls += 1;
        assert!(last.is_none());
        Ok(Selection::Index(0))
    })
    .unwrap();
    assert_eq!(calls, 1);
    assert_eq!(t.points.len(), 3);
    assert_eq!(t.gaps, vec![12.0]);
    assert_eq!(t.at_energy(13.0).unwrap().lambda_n, c(4.5, 0.36));
    assert!(t.at_energy(12.0).is_none());
}

#[test]
fn manual_following_asks_at_every_energy() {
    let list = vec![
        cands(10.0, &[(4.0, 0.3), (9.0, 0.5)]),
        cands(11.0, &[(4.2, 0.32), (9.1, 0.5)]),
    ];
    let mut seen = Vec::new();
    let t = follow_trajectory(&list, "m", FollowMode::Manual, |c, last| {
        seen.push((c.energy, last.map(|p| p.lambda_n)));
        Ok(if c.energy == 10.0 { Selection::Index(1) } else { Selection::Skip })
    })
    .unwrap();
    assert_eq!(seen, vec![(10.0, None), (11.0, Some(c(9.0, 0.5)))]);
    assert_eq!(t.points.len(), 1);
    assert_eq!(t.gaps, vec![11.0]);
}

#[test]
fn following_rejects_bad_input() {
    let empty = vec![cands(10.0, &[])];
    assert!(matches!(
        follow_trajectory(&empty, "x", FollowMode::Automatic, |_, _| Ok(Selection::Index(0))),
        Err(Error::NoCandidates { .. })
    ));
    let unsorted = vec![cands(11.0, &[(4.0, 0.3)]), cands(10.0, &[(4.0, 0.3)])];
    assert!(follow_trajectory(&unsorted, "x", FollowMode::Automatic, |_, _| Ok(Selection::Index(0))).is_err());
    let unphysical = vec![cands(10.0, &[(-1.0, 0.3)])];
    assert!(matches!(
        follow_trajectory(&unphysical, "x", FollowMode::Automatic, |_, _| Ok(Selection::Index(0))),
        Err(Error::Selection { .. })
    ));
}

#[test]
fn trajectory_serialises() {
    let list = vec![cands(10.0, &[(4.0, 0.3)])];
    let t = follow_trajectory(&list, "s", FollowMode::Automatic, |_, _| Ok(Selection::Index(0))).unwrap();
    let back: Trajectory = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
}

#[test]
fn subtraction_skips_trajectories_without_a_point() {
    let a = follow_trajectory(&[cands(10.0, &[(4.0, 0.3)])], "a", FollowMode::Automatic, |_, _| {
        Ok(Selection::Index(0))
    })
    .unwrap();
    let f = c(1.0, 2.0);
    let (tail, bg) = subtract_resonance(f, 11.0, 2.0, &[a], ThetaMode::Forward).unwrap();
    assert_eq!(tail, c(0.0, 0.0));
    assert_eq!(bg, f);
}

fn arb_pole() -> impl Strategy<Value = ReggePole> {
    (0.5f64..25.0, 0.2f64..5.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(a, b, r, i)| ReggePole::new(c(a, b), c(r, i), 1.0))
}

proptest! {
    #[test]
    fn forward_closed_form_is_the_geometric_sum(p in arb_pole(), k in 0.5f64..10.0) {
        let partial: Complex64 = fw_tail_terms(&p, k, (0, 199)).iter().sum();
        prop_assert!(rel(partial, fw_tail_closed(&p, k).unwrap()) < 1e-12);
    }

    #[test]
    fn backward_closed_form_is_the_geometric_sum(p in arb_pole(), k in 0.5f64..10.0) {
        let partial: Complex64 = bw_tail_terms(&p, k, (1, 200)).iter().sum();
        prop_assert!(rel(partial, bw_tail_closed(&p, k).unwrap()) < 1e-12);
    }

    #[test]
    fn sideways_closed_form_is_the_geometric_sum(
        p in arb_pole(), k in 0.5f64..10.0, t in 0.1f64..3.0,
    ) {
        let partial: Complex64 = sw_tail_terms(&p, k, t, (1, 400)).unwrap().iter().sum();
        prop_assert!(rel(partial, sw_tail_closed(&p, k, t).unwrap()) < 1e-11);
    }

    #[test]
    fn zone_angles_increase_past_pi(t in 0.01f64..3.13, kk in 1i32..30) {
        let a = zone_angle(kk, t);
        prop_assert!(a > PI);
        prop_assert!(zone_angle(kk + 1, t) > a);
    }

    #[test]
    fn subtraction_is_linear(
        p1 in arb_pole(), p2 in arb_pole(),
        fr in -1.0f64..1.0, fi in -1.0f64..1.0, k in 0.5f64..5.0,
    ) {
        let mk = |p: ReggePole, label: &str| Trajectory {
            label: label.into(),
            mode: FollowMode::Automatic,
            points: vec![p],
            gaps: vec![],
        };
        let trajs = [mk(p1, "a"), mk(p2, "b")];
        let f = c(fr, fi);
        for mode in [ThetaMode::Forward, ThetaMode::Backward, ThetaMode::Sideway(0.9)] {
            let (tail, bg) = subtract_resonance(f, 1.0, k, &trajs, mode).unwrap();
            let expect = closed_form(&p1, k, mode).unwrap() + closed_form(&p2, k, mode).unwrap();
            prop_assert!((tail - expect).norm() <= 1e-12 * expect.norm().max(1e-300));
            prop_assert!((bg - (f - expect)).norm() <= 1e-12 * (1.0 + f.norm() + expect.norm()));
        }
    }
}
