use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use wedgeworks::detectors::*;
use wedgeworks::{Complex64 as C, Error};

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn desk() -> BTZParams {
    BTZParams::new(1.0, 1.0, 1.5).unwrap()
}

#[test]
fn desitter_frozen_values() {
    assert!(rel(desitter_superposed_response(1.0, 1.0, 1.3).unwrap(), 0.00023914099464581974310347168282) < 1e-13);
    assert!(rel(desitter_superposed_response(-0.7, 2.0, 0.4).unwrap(), 0.118672597942289411497600898586) < 1e-13);
    assert!(rel(desitter_superposed_response(2.5, 0.5, 0.0).unwrap(), 9.03642403212680161783184378318e-15) < 1e-13);
}

#[test]
fn desitter_limits() {
    assert_eq!(desitter_bracket(1.0, 1.0, 0.0), 2.0);
    assert!((desitter_bracket(1.0, 1.0, 1e-7) - 2.0).abs() < 1e-12);
    assert!((desitter_bracket(1.0, 1.0, 1e6) - 1.0).abs() < 1e-5);
    assert!(desitter_superposed_response(1.0, 0.0, 1.0).is_err());
    assert!(desitter_superposed_response(1.0, 1.0, -1.0).is_err());
    let f0 = desitter_superposed_response(0.0, 1.0, 1.0).unwrap();
    assert!(f0.is_finite() && f0 > 0.0);
}

#[test]
fn desitter_detailed_balance() {
    for s in [0.0, 0.5, 1.3, 2.0, 10.0] {
        for i in 0..=29 {
            let om = 0.1 + 0.1 * i as f64;
            let r = desitter_superposed_response(om, 1.0, s).unwrap() / desitter_superposed_response(-om, 1.0, s).unwrap();
            assert!((r.ln() + 2.0 * PI * om).abs() < 1e-12, "s = {s}, om = {om}");
        }
    }
}

#[test]
fn kms_fit_recovers_desitter_temperature() {
    let gaps = ResponseCurve::symmetric_gaps(&[0.1, 0.5, 1.0, 2.0, 3.0]);
    for s in [0.0, 2.0] {
        let rep = kms_fit(&ResponseCurve::desitter(&gaps, 1.0, s).unwrap()).unwrap();
        assert!((rep.t_eff - 1.0 / (2.0 * PI)).abs() < 1e-10);
        assert!(rep.max_residual < 1e-12);
        assert_eq!(rep.pairs, 5);
    }
}

#[test]
fn kms_fit_planck_and_perturbation() {
    let t = 1.0 / (2.0 * PI);
    let gaps = ResponseCurve::symmetric_gaps(&[0.2, 0.4, 0.8, 1.6]);
    let values: Vec<f64> = gaps
        .iter()
        .map(|w| if *w == 0.0 { t } else { w / (w / t).exp_m1() })
        .collect();
    let rep = kms_fit(&ResponseCurve::new(gaps.clone(), values.clone()).unwrap()).unwrap();
    assert!((rep.t_eff - t).abs() < 1e-12);
    assert!(rep.max_residual < 1e-12);
    let mut bumped = values;
    let i = gaps.iter().position(|w| *w == 0.8).unwrap();
    bumped[i] *= 1.1;
    let rep = kms_fit(&ResponseCurve::new(gaps, bumped).unwrap()).unwrap();
    assert_eq!(rep.worst_gap, 0.8);
    assert!(rep.max_residual > 0.05);
}

#[test]
fn kms_fit_errors() {
    let c = ResponseCurve::new(vec![-1.0, 1.0], vec![1.0, 0.0]).unwrap();
    assert!(matches!(kms_fit(&c), Err(Error::Fit(_))));
    let c = ResponseCurve::new(vec![1.0, 2.0], vec![1.0, 1.0]).unwrap();
    assert!(matches!(kms_fit(&c), Err(Error::Fit(_))));
    assert!(ResponseCurve::new(vec![1.0], vec![f64::NAN]).is_err());
}

#[test]
fn gaussian_transform_of_constant() {
    let w = WightmanFn { f: |_s: C| C::new(2.0, 0.0), strip: f64::INFINITY };
    for (om, sig) in [(0.7, 1.3), (-2.0, 0.5), (0.0, 3.0)] {
        let cfg = DetectorConfig::new(om, sig).unwrap();
        let v = response_from_wightman(&w, &cfg, 1e-10).unwrap().value;
        let expect = 2.0 * 2.0 * sig * PI.sqrt() * (-(sig * om).powi(2)).exp();
        assert!((v - expect).abs() < 1e-12 * expect.max(1e-300) + 1e-15, "{v} vs {expect}");
    }
}

#[test]
fn response_is_linear() {
    let a = WightmanFn { f: |s: C| (-s * s).exp(), strip: f64::INFINITY };
    let b = WightmanFn { f: |s: C| C::new(0.3, 0.0) / (s * s + 1.0), strip: 1.0 };
    let sum = SumWightman(&a, &b);
    let cfg = DetectorConfig::new(0.4, 2.0).unwrap();
    let fa = response_from_wightman(&a, &cfg, 1e-11).unwrap().value;
    let fb = response_from_wightman(&b, &cfg, 1e-11).unwrap().value;
    let fs = response_from_wightman(&sum, &cfg, 1e-11).unwrap().value;
    assert!((fs - fa - fb).abs() < 1e-10 * fs.abs());
}

#[test]
fn non_hermitian_wightman_is_rejected() {
    let w = WightmanFn { f: |s: C| C::new(0.0, 1.0) * (-s * s).exp(), strip: f64::INFINITY };
    let cfg = DetectorConfig::new(0.4, 2.0).unwrap();
    assert!(matches!(response_from_wightman(&w, &cfg, 1e-10), Err(Error::Domain(_))));
}

#[test]
fn btz_parameters() {
    let p = desk();
    assert!((p.temperature() - 0.142352508683435411695352535281).abs() < 1e-15);
    assert!((p.x() - 4.0 * PI * PI * p.temperature().powi(2)).abs() < 1e-15);
    let ch = (1.0 + p.x()) * (2.0 * PI * 2.0f64).cosh() - p.x();
    assert!(rel(p.alpha_n(2).cosh(), ch) < 1e-14);
    assert!(BTZParams::new(1.0, 1.0, 0.9).is_err());
    assert!(p.with_images(0).is_err());
    assert!(p.with_delta_phi(2.0 * PI).is_err());
}

#[test]
fn btz_local_frozen_and_kms() {
    let p = desk();
    let f = |om: f64| btz_local_response(&DetectorConfig::new(om, 1.0).unwrap(), &p).unwrap();
    let (fp, fm) = (f(0.5), f(-0.5));
    assert!(rel(fp.value, 0.0233441901115891497771315916805) < 1e-12);
    assert!(rel(fm.value, 0.78270471216047655698995775129) < 1e-12);
    let t = p.temperature();
    assert!(((fp.value / fm.value).ln() + 0.5 / t).abs() < 1e-12);
    assert!(fp.tail_bound < 1e-20);
}

#[test]
fn btz_superposed_frozen_and_variants() {
    let p = desk().with_delta_phi(FRAC_PI_2).unwrap();
    let cfg = DetectorConfig::new(0.5, 1.0).unwrap();
    let c = btz_superposed_response(&cfg, &p, BtzPrefactor::Canonical).unwrap();
    assert!(rel(c.value, 0.0183883259363512457940132686658) < 1e-12);
    let pr = btz_superposed_response(&cfg, &p, BtzPrefactor::Printed).unwrap();
    assert!(rel(pr.value, 0.00056428739770451830719225289527) < 1e-12);
    let m = btz_superposed_response(&cfg.with_gap(-0.5), &p, BtzPrefactor::Canonical).unwrap();
    assert!(((c.value / m.value).ln() + 0.5 / p.temperature()).abs() < 1e-12);
    let mp = btz_superposed_response(&cfg.with_gap(-0.5), &p, BtzPrefactor::Printed).unwrap();
    // the printed prefactor gives e^{−2Ω/T}
    assert!(((pr.value / mp.value).ln() + 1.0 / p.temperature()).abs() < 1e-12);
    assert!(((pr.value / mp.value).ln() + 0.5 / p.temperature()).abs() > 0.1);
}

#[test]
fn btz_superposed_reduces_to_local() {
    let p = desk();
    let cfg = DetectorConfig::new(0.5, 1.0).unwrap();
    let s = btz_superposed_response(&cfg, &p, BtzPrefactor::Canonical).unwrap().value;
    let l = btz_local_response(&cfg, &p).unwrap().value;
    assert!(rel(s, l) < 1e-14);
    for t in [0.0, 0.4, 3.0] {
        let a = btz_wightman(t + 0.1, &p, false).unwrap().0;
        let b = btz_wightman(t + 0.1, &p, true).unwrap().0;
        assert_eq!(a, b);
    }
}

#[test]
fn btz_angular_reflection() {
    let cfg = DetectorConfig::new(0.3, 1.0).unwrap();
    for dphi in [0.4, 1.7, 2.9] {
        let a = btz_superposed_response(&cfg, &desk().with_delta_phi(dphi).unwrap(), BtzPrefactor::Canonical).unwrap();
        let b = btz_superposed_response(&cfg, &desk().with_delta_phi(2.0 * PI - dphi).unwrap(), BtzPrefactor::Canonical)
            .unwrap();
        assert!(rel(a.value, b.value) < 1e-12);
    }
}

#[test]
fn btz_image_convergence() {
    let cfg = DetectorConfig::new(0.5, 1.0).unwrap();
    let p10 = desk().with_images(10).unwrap();
    let (_, tail) = btz_wightman(0.2, &p10, false).unwrap();
    assert!(tail < 1e-8);
    let a = btz_local_response(&cfg, &desk().with_images(3).unwrap()).unwrap();
    let b = btz_local_response(&cfg, &desk().with_images(6).unwrap()).unwrap();
    assert!((a.value - b.value).abs() <= a.tail_bound);
    assert!(a.tail_bound > 0.0);
    let p = desk();
    let lam = 0.5 / (2.0 * PI * p.temperature());
    let terms: Vec<f64> = (1..8)
        .map(|n| wedgeworks::specfun::conical_p_rapidity(lam, p.alpha_n(n)).unwrap().abs())
        .collect();
    for w in terms.windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn btz_wightman_decays_and_flags_light_cone() {
    let p = desk();
    let mut prev = f64::INFINITY;
    for i in 0..20 {
        let s = 0.05 + 0.3 * i as f64;
        let w = btz_wightman(s, &p.with_images(1).unwrap(), false);
        if let Ok((v, _)) = w {
            if s > 4.0 {
                assert!(v.norm() < prev);
            }
            prev = v.norm();
        }
    }
    // light cone of image n = 1 at s = α₁/(2πT)
    let s1 = p.alpha_n(1) / (2.0 * PI * p.temperature());
    assert!(matches!(btz_wightman(s1, &p, false), Err(Error::Domain(_))));
    assert!(btz_wightman(0.0, &p, false).is_err());
}

#[test]
fn btz_quadrature_matches_closed_forms() {
    let p = desk().with_images(10).unwrap();
    let cfg = DetectorConfig::new(0.5, 100.0).unwrap();
    let local = BtzWightman { params: p, cross: false };
    let ql = response_from_wightman(&local, &cfg, 1e-8).unwrap();
    let cl = btz_local_response(&cfg, &p).unwrap();
    // The closed forms carry the √π of the normalised long-switching limit.
    assert!(rel(PI.sqrt() * ql.value, cl.value) < 1e-2);
    assert!(ql.imag_residual < 1e-12);

    let pc = p.with_delta_phi(FRAC_PI_2).unwrap();
    let cross = BtzWightman { params: pc, cross: true };
    let qc = response_from_wightman(&cross, &cfg, 1e-8).unwrap();
    // ¼ ∫[2 W_A + 2 W_AB]
    let assembled = 0.5 * (ql.value + qc.value);
    let closed = btz_superposed_response(&cfg, &pc, BtzPrefactor::Canonical).unwrap();
    assert!(rel(PI.sqrt() * assembled, closed.value) < 1e-2);
}

#[test]
fn coupling_flag_scales_by_sigma() {
    let p = desk();
    let mut cfg = DetectorConfig::new(0.5, 2.5).unwrap();
    let a = btz_local_response(&cfg, &p).unwrap().value;
    cfg.coupling_absorbed = false;
    let b = btz_local_response(&cfg, &p).unwrap().value;
    assert!(rel(b, 2.5 * a) < 1e-15);
    assert!(DetectorConfig::new(1.0, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn desitter_response_nonnegative(om in -5.0f64..5.0, kappa in 0.1f64..5.0, s in 0.0f64..50.0) {
        prop_assert!(desitter_superposed_response(om, kappa, s).unwrap() >= 0.0);
    }

    #[test]
    fn btz_kms_holds(om in 0.05f64..2.0, mass in 0.5f64..3.0, r_over in 1.05f64..3.0, dphi in 0.0f64..6.2) {
        let p = BTZParams::new(mass, 1.0, r_over * mass.sqrt()).unwrap().with_delta_phi(dphi).unwrap();
        let cfg = DetectorConfig::new(om, 1.0).unwrap();
        let a = btz_superposed_response(&cfg, &p, BtzPrefactor::Canonical).unwrap();
        let b = btz_superposed_response(&cfg.with_gap(-om), &p, BtzPrefactor::Canonical).unwrap();
        prop_assert!(a.value >= 0.0 && b.value > 0.0);
        let resid = ((a.value / b.value).ln() + om / p.temperature()).abs();
        prop_assert!(resid < 1e-10 + 10.0 * (a.tail_bound / a.value + b.tail_bound / b.value));
    }
}
