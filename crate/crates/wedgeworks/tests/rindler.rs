use num_complex::Complex64 as C;
use proptest::prelude::*;
use wedgeworks::oscint::{beta_overlap_integral, kg_inner_product, ModeFunction, RegulatorParams, Wavepacket};
use wedgeworks::rindler::*;
use wedgeworks::Error;

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1e-300)
}

#[test]
fn coordinates_trace_hyperbola() {
    let a = 0.7;
    for &tau in &[-2.0, 0.0, 1.5] {
        let (t, x) = rindler_coords(tau, 0.0, a).unwrap();
        assert!((x * x - t * t - 1.0 / (a * a)).abs() < 1e-12);
        assert!(x > 0.0);
        let (tl, xl) = rindler_coords_left(tau, 0.0, a).unwrap();
        assert_eq!((tl, xl), (-t, -x));
    }
}

#[test]
fn proper_acceleration_of_xi_zero_worldline() {
    let a = 1.7;
    let h = 1e-3;
    let tau = 0.4;
    let p = |s: f64| rindler_coords(s, 0.0, a).unwrap();
    let (t0, x0) = p(tau - h);
    let (t1, x1) = p(tau);
    let (t2, x2) = p(tau + h);
    let at = (t2 - 2.0 * t1 + t0) / (h * h);
    let ax = (x2 - 2.0 * x1 + x0) / (h * h);
    let mag = (ax * ax - at * at).sqrt();
    assert!((mag - a).abs() < 1e-5, "{mag}");
}

#[test]
fn closed_form_matches_frozen_values() {
    let w = WedgeSpec::right(1.3).unwrap();
    let p = rindler_alpha_beta(1.0, 0.7, &w).unwrap();
    assert!(close(p.alpha, C::new(0.0729166474350671130152759118212, -0.413499932990202431927868553756), 1e-13));
    assert!(close(p.beta, C::new(-0.00650588556853482880259200007882, -0.036893951398776356769662141177), 1e-13));

    let w = WedgeSpec::right(0.8).unwrap();
    let p = rindler_alpha_beta(2.5, 0.01, &w).unwrap();
    assert!(close(p.alpha, C::new(3.26040789491246431492171745574, 3.04369977237422024514227678776), 1e-13));
    assert!(close(p.beta, C::new(-0.000177662525071991776060736957782, 0.000165853906796397541363857197725), 1e-12));

    let w = WedgeSpec::right(1.3).unwrap().shifted(0.5);
    let p = rindler_alpha_beta(1.0, 0.7, &w).unwrap();
    assert!(close(p.alpha, C::new(0.180276728124222467020739817258, -0.379208825520842746506237831673), 1e-13));
    assert!(close(p.beta, C::new(0.0035419057953427623743479965051, -0.0372953763914920021920261095172), 1e-13));
}

#[test]
fn left_wedge_is_conjugate_of_right() {
    let r = rindler_alpha_beta(0.9, 2.1, &WedgeSpec::right(1.1).unwrap()).unwrap();
    let l = rindler_alpha_beta(0.9, 2.1, &WedgeSpec::left(1.1).unwrap()).unwrap();
    assert!(close(l.alpha, r.alpha.conj(), 1e-14));
    assert!(close(l.beta, r.beta.conj(), 1e-14));
}

#[test]
fn large_frequency_does_not_overflow() {
    let p = rindler_alpha_beta(500.0, 1.0, &WedgeSpec::right(1.0).unwrap()).unwrap();
    assert!(p.alpha.norm().is_finite() && p.alpha.norm() > 0.0);
    assert!(p.beta.norm() < 1e-300 || p.beta.norm().is_finite());
    let ratio = p.beta.norm() / p.alpha.norm();
    assert!(ratio < 1e-300);
}

#[test]
fn kg_products_reproduce_closed_form() {
    let reg = RegulatorParams::default();
    for wedge in [
        WedgeSpec::right(1.3).unwrap(),
        WedgeSpec::left(1.3).unwrap(),
        WedgeSpec::right(1.3).unwrap().shifted(0.5),
        WedgeSpec::left(0.6).unwrap().shifted(-0.8),
    ] {
        let (om, k) = (1.0, 0.7);
        let g = rindler_mode(om, &wedge).unwrap();
        let u = ModeFunction::plane_wave(k).unwrap();
        let alpha = kg_inner_product(&g, &u, &reg).unwrap().value;
        // expansion g = Σ(α* u + β u*)
        let beta = -kg_inner_product(&g, &u.conjugate(), &reg).unwrap().value.conj();
        let cf = rindler_alpha_beta(om, k, &wedge).unwrap();
        assert!(close(alpha, cf.alpha, 1e-8), "{wedge:?}: {alpha} vs {}", cf.alpha);
        assert!(close(beta, cf.beta, 1e-8), "{wedge:?}: {beta} vs {}", cf.beta);
    }
}

#[test]
fn smeared_beta_recovers_planck() {
    let a = 1.0;
    let pack = Wavepacket::new(1.0, 0.01).unwrap();
    let kern = RindlerKernel {
        wedge: WedgeSpec::right(a).unwrap(),
        which: Coefficient::Beta,
    };
    let est = beta_overlap_integral(&kern, &kern, &pack, &pack, a, &RegulatorParams::default()).unwrap();
    let n = est.value.re / pack.norm();
    let planck = pack.average(|w| planck_number(w, a));
    assert!((n / planck - 1.0).abs() < 1e-8, "{n} vs {planck}");
    assert!(est.value.im.abs() < 1e-10 * est.value.re);
}

#[test]
fn cross_term_frozen_values_and_hermiticity() {
    let v = cross_term_rr_shifted(1.0, 1.3, 1.0, 2.0, CrossTermForm::MainText).unwrap();
    let want = C::new(-0.0000942337547894713798929329584477, -0.000203754972726428715980473890842);
    assert!(close(v, want, 1e-12), "{v}");
    let h = cross_term_rr_shifted(1.3, 1.0, 1.0, -2.0, CrossTermForm::MainText).unwrap();
    assert!(close(h.conj(), want, 1e-12));
    let v = cross_term_rr_shifted(0.7, 1.1, 1.5, -0.4, CrossTermForm::MainText).unwrap();
    assert!(close(v, C::new(0.00220357249632246744440887131305, -0.0134241588544616525987396055282), 1e-12));
}

#[test]
fn cross_term_rejects_equal_frequencies() {
    let e = cross_term_rr_shifted(1.0, 1.0, 1.0, 2.0, CrossTermForm::MainText).unwrap_err();
    assert!(matches!(e, Error::Degenerate { .. }));
    assert!(cross_term_rr_shifted(1.0, 1.2, 1.0, 0.0, CrossTermForm::MainText).is_err());
}

#[test]
fn cross_term_matches_smeared_oracle() {
    // Separated packets: no δ(ω − ω′) piece, so the pointwise form integrates directly.
    let a = 1.0;
    let s = 2.0;
    let (p1, p2) = (Wavepacket::new(1.0, 0.02).unwrap(), Wavepacket::new(1.3, 0.02).unwrap());
    let k1 = RindlerKernel {
        wedge: WedgeSpec::right(a).unwrap(),
        which: Coefficient::Beta,
    };
    let k2 = RindlerKernel {
        wedge: WedgeSpec::right(a).unwrap().shifted(s),
        which: Coefficient::Beta,
    };
    let oracle = beta_overlap_integral(&k1, &k2, &p1, &p2, a, &RegulatorParams::default()).unwrap().value;
    let mut closed = C::new(0.0, 0.0);
    for (w1, q1) in p1.nodes() {
        for (w2, q2) in p2.nodes() {
            closed += cross_term_rr_shifted(w1, w2, a, s, CrossTermForm::MainText).unwrap() * (q1 * q2);
        }
    }
    assert!(close(closed, oracle, 1e-7), "{closed} vs {oracle}");
}

#[test]
fn antiparallel_cross_term_vanishes() {
    assert_eq!(cross_term_antiparallel(1.0, 2.0, 1.0).unwrap(), C::new(0.0, 0.0));
}

#[test]
fn three_plus_one_frozen_values() {
    let p = bogoliubov_3p1(1.0, 0.4, 0.9, 1.2).unwrap();
    assert!(close(p.alpha, C::new(0.344470589727384902875080261118, -0.129324940275879853100244667086), 1e-13));
    assert!(close(p.beta, C::new(-0.025128806010830732854679385695, 0.00943413293752230706979082353457), 1e-13));
    let p = bogoliubov_3p1(3.0, -2.0, 0.3, 0.5).unwrap();
    assert!(close(p.alpha, C::new(-0.393231265492058662937421889593, 0.0525669173699057652117765388871), 1e-12));
    assert!(close(p.beta, C::new(0.00000000256088406567654031260620573725, -3.4233743063608364151926422944e-10), 1e-12));
}

#[test]
fn three_plus_one_rejects_collinear_momentum() {
    assert!(bogoliubov_3p1(1.0, 1.0, 0.0, 1.0).is_err());
}

#[test]
fn transverse_shift_is_a_common_phase() {
    let w0 = WedgeSpec::right(1.0).unwrap();
    let w1 = w0.transverse(0.3, -1.7);
    let (p0, ph0) = bogoliubov_3p1_wedge(1.0, 0.2, 0.5, 0.4, &w0, InPlanePhase::Printed).unwrap();
    let (p1, ph1) = bogoliubov_3p1_wedge(1.0, 0.2, 0.5, 0.4, &w1, InPlanePhase::Printed).unwrap();
    assert_eq!(ph0, 0.0);
    assert!((ph1 - -(0.5 * 0.3 + 0.4 * -1.7)).abs() < 1e-15);
    assert_eq!(p0.alpha, p1.alpha);
    assert_eq!(p0.beta, p1.beta);
}

#[test]
fn in_plane_shift_phases() {
    let w = WedgeSpec::right(2.0).unwrap().shifted(0.6);
    let (kx, ky, kz): (f64, f64, f64) = (0.2, 0.5, 0.4);
    let base = bogoliubov_3p1(1.0, kx, ky.hypot(kz), 2.0).unwrap();
    let k0 = (kx * kx + ky * ky + kz * kz).sqrt();
    for (variant, kk) in [(InPlanePhase::Printed, kz), (InPlanePhase::LightCone, kx)] {
        let (p, _) = bogoliubov_3p1_wedge(1.0, kx, ky, kz, &w, variant).unwrap();
        let th = (k0 - kk) * 0.6 / 4.0;
        assert!(close(p.alpha, base.alpha * C::new(0.0, -th).exp(), 1e-14));
        assert!(close(p.beta, base.beta * C::new(0.0, th).exp(), 1e-14));
    }
}

proptest! {
    #[test]
    fn beta_alpha_ratio_is_boltzmann(om in 0.01f64..20.0, kx in -50.0f64..50.0, kp in 0.01f64..10.0, a in 0.1f64..10.0) {
        let r = left_right_relation_check(om, kx, kp, a).unwrap();
        prop_assert!(r.max_deviation < 1e-14);
        let boltz = (-std::f64::consts::PI * (om / a)).exp();
        prop_assert!(r.ratio_deviation <= 1e-14 * boltz.max(1e-300) || r.ratio_deviation < 1e-300);
    }

    #[test]
    fn unitarity_alpha_minus_beta(om in 0.05f64..10.0, a in 0.2f64..5.0) {
        // |α|² − |β|² integrated against dk is δ-normalised; pointwise, |α|²/|β|² = e^{2πΩ}.
        let p = rindler_alpha_beta(om, 1.3, &WedgeSpec::right(a).unwrap()).unwrap();
        let r = p.alpha.norm_sqr() / p.beta.norm_sqr();
        let want = (2.0 * std::f64::consts::PI * om / a).exp();
        prop_assert!((r / want - 1.0).abs() < 1e-11);
    }

    #[test]
    fn cross_term_hermitian(w1 in 0.2f64..3.0, w2 in 0.2f64..3.0, s in -5.0f64..5.0) {
        prop_assume!((w1 - w2).abs() > 1e-3 && s.abs() > 1e-3);
        let x = cross_term_rr_shifted(w1, w2, 1.0, s, CrossTermForm::MainText).unwrap();
        let y = cross_term_rr_shifted(w2, w1, 1.0, -s, CrossTermForm::MainText).unwrap();
        prop_assert!((x - y.conj()).norm() <= 1e-12 * x.norm());
    }
}
