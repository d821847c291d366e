use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use wedgeworks::specfun::*;
use wedgeworks::Error;

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn gamma_basic_values() {
    assert!((cgamma(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
    assert!((cgamma(c(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() < 1e-14);
    for x in [0.5, 1.0, 2.0] {
        let g = cgamma(c(1.0, x)).unwrap();
        let expect = PI * x / (PI * x).sinh();
        assert!((g.norm_sqr() / expect - 1.0).abs() < 1e-12);
    }
}

#[test]
fn gamma_against_mpmath() {
    let cases = [
        (c(0.3, 2.7), c(0.028059879610273215969, -0.0094330718364571135776)),
        (c(-3.7, 1.2), c(0.004910735090013594441, 0.0099625517191866704861)),
        (c(12.5, -30.0), c(0.0051671343150484892346, -0.0034023841882272488202)),
        (c(-0.5, 0.0), c(-3.5449077018110320546, 0.0)),
        (c(2.5, 40.0), c(-1.5939139971949856104e-24, -1.3211191862835635326e-24)),
    ];
    for (z, want) in cases {
        let g = cgamma(z).unwrap();
        assert!(rel(g, want) < 1e-12, "gamma({z}) = {g}, want {want}");
        assert!(rel(ln_cgamma(z).unwrap().exp(), want) < 1e-12);
    }
}

#[test]
fn gamma_poles() {
    for n in [0.0, -1.0, -7.0] {
        assert!(matches!(cgamma(c(n, 0.0)), Err(Error::Pole { .. })));
    }
    assert_eq!(rgamma(c(-3.0, 0.0)), c(0.0, 0.0));
}

#[test]
fn gamma_modulus_log_grid() {
    for i in 0..=40 {
        let x = 10f64.powf(-3.0 + 4.0 * i as f64 / 40.0);
        let g = cgamma(c(1.0, x)).unwrap();
        let v = g.norm_sqr() * (PI * x).sinh() / (PI * x);
        assert!((v - 1.0).abs() < 1e-12, "x = {x}: {v}");
    }
}

proptest! {
    #[test]
    fn gamma_recurrence(re in -20.0f64..20.0, im in -20.0f64..20.0) {
        let z = c(re, im);
        prop_assume!(z.norm() <= 20.0 && (z - c(re.round(), 0.0)).norm() > 1e-3);
        let lhs = cgamma(z + 1.0).unwrap();
        let rhs = z * cgamma(z).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-12, "z = {}", z);
    }

    #[test]
    fn kummer_contiguous_imaginary(ar in -2.0f64..2.0, ai in -2.0f64..2.0, y in -90.0f64..90.0) {
        let (a, b, z) = (c(ar, ai), c(2.0, 0.0), c(0.0, y));
        let m0 = kummer_m(a, b, z).unwrap();
        let mm = kummer_m(a - 1.0, b, z).unwrap();
        let mp = kummer_m(a + 1.0, b, z).unwrap();
        let lhs = (b - a) * mm + (a * 2.0 - b + z) * m0 - a * mp;
        let scale = ((b - a) * mm).norm() + ((a * 2.0 - b + z) * m0).norm() + (a * mp).norm();
        prop_assert!(lhs.norm() <= 1e-9 * scale);
    }

    #[test]
    fn hyp2f1_symmetric(ar in -2.0f64..2.0, br in -2.0f64..2.0, zr in -3.0f64..0.9, zi in -2.0f64..2.0) {
        let (a, b, cc, z) = (c(ar, 0.3), c(br, -0.2), c(1.7, 0.1), c(zr, zi));
        let f1 = gauss_2f1(a, b, cc, z);
        let f2 = gauss_2f1(b, a, cc, z);
        match (f1, f2) {
            (Ok(x), Ok(y)) => prop_assert!(rel(x, y) < 1e-9),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "asymmetric failure"),
        }
    }
}

#[test]
fn kummer_values() {
    assert_eq!(kummer_m(c(0.3, 1.0), c(2.0, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    let cases = [
        (c(1.0, 2.0), 2.0, c(0.0, 4.0), c(0.035148895860474270376, -0.076801738604764070661)),
        (c(1.0, 1.0), 2.0, c(0.0, -2.8), c(0.42977157566919654129, -2.4917656199498557756)),
        (c(0.5, 1.0), 2.0, c(0.0, 60.0), c(-0.045262838199773358321, 0.0015353002295559766324)),
        (c(1.0, 1.5), 2.0, c(0.0, -90.0), c(0.17302155537558895573, -0.28025602282668989341)),
        (c(0.3, 0.0), 1.7, c(55.0, 0.0), c(8.7126452797099597578e20, 0.0)),
    ];
    for (a, b, z, want) in cases {
        let m = kummer_m(a, c(b, 0.0), z).unwrap();
        assert!(rel(m, want) < 1e-10, "M({a},{b},{z}) = {m}, want {want}");
    }
    assert!(matches!(kummer_m(c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)), Err(Error::Pole { .. })));
}

#[test]
fn kummer_transformation() {
    let (a, b, z) = (c(1.0, 2.0), c(2.0, 0.0), c(0.0, 4.0));
    let lhs = kummer_m(a, b, z).unwrap();
    let rhs = z.exp() * kummer_m(b - a, b, -z).unwrap();
    assert!(rel(lhs, rhs) < 1e-10);
}

#[test]
fn kummer_matches_integral_form() {
    // α⁽⁰⁾ at Ω = 1, κ = 0.7 from the s-integral over (-1, 1)
    let (om, ka) = (1.0f64, 0.7f64);
    let m = kummer_m(c(1.0, om), c(2.0, 0.0), c(0.0, -4.0 * ka)).unwrap();
    let closed = 2.0 * (om * ka).sqrt() / (PI * om).sinh() * c(0.0, 2.0 * ka).exp() * m;
    let integral = c(1.3756818358250826535, 0.0);
    let oracle = (ka / om).sqrt() / PI * integral;
    assert!(rel(closed, oracle) < 1e-10);
}

#[test]
fn hyp2f1_values() {
    let (a, b, cc) = (c(0.3, 0.2), c(1.1, -0.4), c(2.2, 0.0));
    let cases = [
        (c(0.9, 0.1), c(1.3038863889577850587, 0.15435636408827847539)),
        (c(-5.0, 1.0), c(0.64464244678330672843, -0.057935422753504393636)),
        (c(3.0, 0.5), c(0.63986403668855143971, 0.67240938702899064276)),
        (c(0.5, 0.85), c(0.96562350286516232999, 0.20498371238546552158)),
        (c(1.5, -0.2), c(1.3966377584668624771, -0.41997327935189007197)),
        (c(-0.8, -0.6), c(0.89389671408455671933, -0.093664099887426146892)),
    ];
    for (z, want) in cases {
        let f = gauss_2f1(a, b, cc, z).unwrap();
        assert!(rel(f, want) < 1e-9, "z = {z}: {f} vs {want}");
    }
}

#[test]
fn hyp2f1_degenerate_parameters() {
    let one = c(1.0, 0.0);
    let cases = [
        (one, c(1.5, 0.0), c(2.5, 0.0), c(-4.0, 0.0), None, c(0.33481923082721606137, 0.0)),
        (one, c(2.0, 0.0), c(2.5, 0.0), c(0.5, 0.85), None, c(0.70769690443723675081, 0.77554167481567581467)),
        (one, c(3.0, 0.0), c(4.0, 0.0), c(2.0, 0.0), Some(Side::Above), c(-1.5, 1.1780972450961724644)),
        (one, c(2.0, 0.0), c(3.0, 0.0), c(0.95, 0.0), None, c(4.5334787225573193151, 0.0)),
    ];
    for (a, b, cc, z, side, want) in cases {
        let f = gauss_2f1_side(a, b, cc, z, side).unwrap();
        assert!(rel(f, want) < 1e-9, "F({a},{b};{cc};{z}) = {f} vs {want}");
    }
}

#[test]
fn hyp2f1_branch_cut() {
    let (a, b, cc, z) = (c(1.0, 0.0), c(2.0, 0.0), c(3.5, 0.0), c(3.0, 0.0));
    assert!(matches!(gauss_2f1(a, b, cc, z), Err(Error::BranchCut(_))));
    let up = gauss_2f1_side(a, b, cc, z, Some(Side::Above)).unwrap();
    let dn = gauss_2f1_side(a, b, cc, z, Some(Side::Below)).unwrap();
    let want = c(-0.77990109175297509207, 1.0687915251348867463);
    assert!(rel(up, want) < 1e-9);
    assert!(rel(dn, want.conj()) < 1e-9);
}

#[test]
fn hyp2f1_identities() {
    assert_eq!(gauss_2f1(c(1.0, 1.0), c(2.0, 0.0), c(3.0, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    let (a, b, z) = (c(1.0, 0.5), c(0.7, -0.3), c(0.3, 0.2));
    let f = gauss_2f1(a, b, b, z).unwrap();
    let want = (-a * (c(1.0, 0.0) - z).ln()).exp();
    assert!(rel(f, want) < 1e-10);
}

#[test]
fn hyp2f1_cross_term_argument() {
    // Argument 1/(α−1)² with α = −6i, the n = 1 diamond value.
    let al = c(0.0, -6.0);
    let z = c(1.0, 0.0) / ((al - 1.0) * (al - 1.0));
    let f = gauss_2f1(c(1.0, -1.0), c(1.0, 1.3), c(2.0, 0.0), z).unwrap();
    let want = c(0.97237574776136456574, -0.013340528893214064523);
    assert!(rel(f, want) < 1e-9);
}

#[test]
fn conical_values() {
    assert_eq!(conical_p(0.7, 1.0).unwrap(), 1.0);
    let cases = [
        (1.0, 3.0, 0.31549987815043839785),
        (0.8, 2.5, 0.56399913060779184182),
        (0.0, 10.0, 0.62452096119108594539),
        (2.5, 50.0, -0.022360241565010224676),
        (0.3, 1.01, 0.9983049550530157279),
    ];
    for (lam, x, want) in cases {
        let p = conical_p(lam, x).unwrap();
        assert!((p - want).abs() < 1e-9 * want.abs().max(1e-2), "P({lam},{x}) = {p}");
    }
    assert!(matches!(conical_p(1.0, 0.5), Err(Error::Domain(_))));
}

#[test]
fn conical_symmetry_and_monotonicity() {
    let p1 = conical_p(0.8, 2.5).unwrap();
    let p2 = conical_p(-0.8, 2.5).unwrap();
    assert!((p1 - p2).abs() < 1e-12);
    let mut last = 0.0;
    for i in 0..30 {
        let x = 1.0 + 0.7 * i as f64;
        let p = conical_p(0.0, x).unwrap();
        assert!(p <= 1.0 + 1e-12);
        if i > 0 {
            // P_{-1/2} decreases towards zero, so check monotone in x.
            assert!(p < last);
        }
        last = p;
    }
}

#[test]
fn conical_agm_closed_form() {
    // P_{-1/2}(cosh α) = sech(α/2) / AGM(1, sech(α/2))
    for alpha in [0.3, 1.0, 2.0, 5.0] {
        let s = 1.0 / (0.5f64 * alpha).cosh();
        let (mut x, mut y) = (1.0f64, s);
        for _ in 0..40 {
            let m = 0.5 * (x + y);
            y = (x * y).sqrt();
            x = m;
        }
        let want = s / x;
        let p = conical_p_rapidity(0.0, alpha).unwrap();
        assert!((p - want).abs() < 1e-12 * want, "alpha = {alpha}");
    }
}
