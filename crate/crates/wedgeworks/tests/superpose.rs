use std::sync::Arc;

use proptest::prelude::*;
use wedgeworks::diamond::DiamondSpec;
use wedgeworks::oscint::{kg_inner_product, ModeFunction, RegulatorParams, Wavepacket};
use wedgeworks::rindler::{planck_number, rindler_mode, WedgeSpec};
use wedgeworks::superpose::*;
use wedgeworks::{Complex64 as C, Error};

fn right() -> WedgeSpec {
    WedgeSpec::right(1.0).unwrap()
}

fn left() -> WedgeSpec {
    WedgeSpec::left(1.0).unwrap()
}

fn grid() -> Vec<f64> {
    geometric_grid(0.2, 5.0, 12).unwrap()
}

fn of(points: &[SpectrumPoint], b: SpectrumBranch) -> Vec<SpectrumPoint> {
    points.iter().filter(|p| p.branch == b).copied().collect()
}

#[test]
fn grid_endpoints_and_spacing() {
    let g = geometric_grid(0.1, 10.0, 32).unwrap();
    assert_eq!(g.len(), 32);
    assert_eq!(g[0], 0.1);
    assert_eq!(g[31], 10.0);
    let r = g[1] / g[0];
    for w in g.windows(2) {
        assert!((w[1] / w[0] / r - 1.0).abs() < 1e-12);
    }
    assert!(geometric_grid(0.0, 1.0, 4).is_err());
}

#[test]
fn coincident_wedges_give_planck() {
    let pair = BranchPair::wedges(right(), right()).unwrap();
    let sp = conditional_spectrum(&pair, &grid(), &SpectrumOptions::default()).unwrap();
    for p in of(&sp, SpectrumBranch::Total) {
        let n = planck_number(p.omega, 1.0);
        assert!((p.value.re / n - 1.0).abs() < 1e-12, "{p:?}");
        assert_eq!(p.value.im, 0.0);
    }
    let fit = nonthermality_metric(&sp, FitModel::ScaledPlanck).unwrap();
    assert!(fit.is_thermal());
    assert!((fit.temperature - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-10);
}

#[test]
fn antiparallel_wedges_give_half_planck() {
    let pair = BranchPair::wedges(right(), left()).unwrap();
    let sp = conditional_spectrum(&pair, &grid(), &SpectrumOptions::default()).unwrap();
    for p in of(&sp, SpectrumBranch::Total) {
        let n = planck_number(p.omega, 1.0);
        assert!((p.value.re / (0.5 * n) - 1.0).abs() < 1e-12);
    }
    let fit = nonthermality_metric(&sp, FitModel::ScaledPlanck).unwrap();
    assert!(fit.is_thermal(), "{fit:?}");
    assert!((fit.amplitude - 0.5).abs() < 1e-10);
    // Detailed balance alone cannot absorb the factor 1/2.
    let db = nonthermality_metric(&sp, FitModel::DetailedBalance).unwrap();
    assert!(!db.is_thermal());
}

#[test]
fn shifted_wedges_are_nonthermal() {
    let pair = BranchPair::wedges(right(), right().shifted(2.0)).unwrap();
    let sp = conditional_spectrum(&pair, &grid(), &SpectrumOptions::default()).unwrap();
    let fit = nonthermality_metric(&sp, FitModel::ScaledPlanck).unwrap();
    assert!(fit.residual > 10.0 * THERMAL_THRESHOLD, "{fit:?}");
    for p in of(&sp, SpectrumBranch::CrossAB) {
        assert!(p.value.norm() < planck_number(p.omega, 1.0));
        assert!(p.tolerance < 1e-8 * p.value.norm().max(1e-300) + 1e-12);
    }
}

#[test]
fn branch_hermiticity_and_positive_total() {
    let pair = BranchPair::wedges(right(), right().shifted(0.7)).unwrap();
    let sp = conditional_spectrum(&pair, &[0.5, 1.0, 2.0], &SpectrumOptions::default()).unwrap();
    let ab = of(&sp, SpectrumBranch::CrossAB);
    let ba = of(&sp, SpectrumBranch::CrossBA);
    for (x, y) in ab.iter().zip(&ba) {
        assert_eq!(x.value, y.value.conj());
    }
    for t in of(&sp, SpectrumBranch::Total) {
        assert!(t.value.im.abs() <= 1e-15 * t.value.re.abs());
        assert!(t.value.re >= 0.0);
    }
}

#[test]
fn unbalanced_amplitudes_weight_the_terms() {
    let c = [C::new(0.6, 0.0), C::new(0.0, 0.8)];
    let m = [C::new(0.8, 0.0), C::new(0.6, 0.0)];
    let pair = BranchPair::wedges(right(), right().shifted(1.0))
        .unwrap()
        .with_amplitudes(c, m)
        .unwrap();
    let w = pair.weights();
    let sp = conditional_spectrum(&pair, &[1.0], &SpectrumOptions::default()).unwrap();
    let n = planck_number(1.0, 1.0);
    let x = of(&sp, SpectrumBranch::CrossAB)[0].value;
    let expect = (w[0].norm_sqr() + w[1].norm_sqr()) * n + 2.0 * (w[0].conj() * w[1] * x).re;
    let total = of(&sp, SpectrumBranch::Total)[0].value;
    assert!((total.re - expect).abs() < 1e-15);
}

#[test]
fn pair_validation() {
    let d = DiamondSpec::zeroth(1.0).unwrap();
    assert!(matches!(
        BranchPair::new(Branch::Wedge(right()), Branch::Diamond(d)),
        Err(Error::Domain(_))
    ));
    assert!(BranchPair::wedges(right(), WedgeSpec::right(2.0).unwrap()).is_err());
    let bad = [C::new(1.0, 0.0), C::new(1.0, 0.0)];
    let pair = BranchPair::wedges(right(), left()).unwrap();
    assert!(pair.with_amplitudes(bad, bad).is_err());
    let pair = BranchPair::wedges(right(), right()).unwrap();
    assert!(matches!(
        conditional_spectrum(&pair, &[0.01], &SpectrumOptions { relative_width: 0.3, ..Default::default() }),
        Err(Error::PacketWidth { .. })
    ));
}

#[test]
fn diamond_branches() {
    let d0 = DiamondSpec::zeroth(1.0).unwrap();
    let d2 = DiamondSpec::new(1.0, 2).unwrap();
    let same = BranchPair::diamonds(d0, d0).unwrap();
    let sp = conditional_spectrum(&same, &[1.0, 2.0], &SpectrumOptions::default()).unwrap();
    for t in of(&sp, SpectrumBranch::Total) {
        assert!((t.value.re / planck_number(t.omega, 1.0) - 1.0).abs() < 1e-12);
    }
    let fwd = conditional_spectrum(&BranchPair::diamonds(d0, d2).unwrap(), &[1.0], &SpectrumOptions::default()).unwrap();
    let bwd = conditional_spectrum(&BranchPair::diamonds(d2, d0).unwrap(), &[1.0], &SpectrumOptions::default()).unwrap();
    let xf = of(&fwd, SpectrumBranch::CrossAB)[0].value;
    let xb = of(&bwd, SpectrumBranch::CrossAB)[0].value;
    assert!((xf - xb.conj()).norm() < 1e-14);
    assert!(xf.norm() < planck_number(1.0, 1.0));
    assert!(xf.norm() > 0.0);
}

#[test]
fn fit_recovers_planck_and_rejects_bad_input() {
    let om: Vec<f64> = geometric_grid(0.1, 10.0, 32).unwrap();
    let n: Vec<f64> = om.iter().map(|w| 0.3 / (w / 0.7f64).exp_m1()).collect();
    let fit = fit_thermal(&om, &n, FitModel::ScaledPlanck).unwrap();
    assert!((fit.temperature - 0.7).abs() < 1e-10);
    assert!((fit.amplitude - 0.3).abs() < 1e-10);
    assert!(fit.residual < 1e-10);
    assert!(matches!(fit_thermal(&om[..5], &n[..5], FitModel::ScaledPlanck), Err(Error::Fit(_))));
    let mut neg = n.clone();
    neg[3] = -1.0;
    assert!(matches!(fit_thermal(&om, &neg, FitModel::ScaledPlanck), Err(Error::Fit(_))));
}

fn smeared_left(p: &Wavepacket, w: &WedgeSpec) -> ModeFunction {
    let modes: Arc<Vec<(f64, ModeFunction)>> = Arc::new(
        p.nodes()
            .into_iter()
            .map(|(om, wt)| (wt, rindler_mode(om, w).unwrap()))
            .collect(),
    );
    let m2 = modes.clone();
    ModeFunction::new(
        "smeared",
        w.support(),
        Arc::new(move |at| modes.iter().map(|(c, m)| *c * m.value(at)).sum::<C>()),
        Arc::new(move |at| m2.iter().map(|(c, m)| *c * m.derivative(at)).sum::<C>()),
    )
}

#[test]
fn purification_overlap_limits_and_oracle() {
    let reg = RegulatorParams::default();
    let l = left();
    let p = Wavepacket::new(1.0, 0.1).unwrap();
    let at = |s: f64| purification_overlap(&l, &l.shifted(s), &p, &p, &reg).unwrap();
    assert!((at(0.0) - 1.0).abs() < 1e-10);
    let kg = kg_inner_product(&smeared_left(&p, &l), &smeared_left(&p, &l.shifted(1.0)), &reg).unwrap();
    let oracle = kg.value.norm_sqr() / (p.norm() * p.norm());
    assert!((at(1.0) / oracle - 1.0).abs() < 1e-2, "{} vs {oracle}", at(1.0));
    let seq: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0].iter().map(|&s| at(s)).collect();
    for w in seq.windows(2) {
        assert!(w[1] < w[0], "{seq:?}");
    }
    let wide = Wavepacket::new(3.0, 0.4).unwrap();
    let far = purification_overlap(&l, &l.shifted(1e3), &wide, &wide, &reg).unwrap();
    assert!(far < 1e-6, "{far}");
    assert!(purification_overlap(&right(), &right(), &p, &p, &reg).is_err());
}

#[test]
fn squeezed_state_traces_to_thermal() {
    let st = TruncatedSqueezedState::new(&[1.0], 1.0, 6).unwrap();
    let rep = squeezed_vacuum_check(&st);
    assert!(rep.passed(1e-12), "{rep:?}");
    let st = TruncatedSqueezedState::new(&[0.5, 1.0, 2.0], 1.5, 4).unwrap();
    let rep = squeezed_vacuum_check(&st);
    assert!(rep.passed(1e-12), "{rep:?}");
    assert_eq!(rep.occupation.len(), 3);
}

#[test]
fn squeeze_weights_are_geometric() {
    let w = squeeze_weights(1.0, 2.0, 5);
    assert!((w.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);
    for p in w.windows(2) {
        assert!((p[1] / p[0] - (-std::f64::consts::PI / 2.0).exp()).abs() < 1e-15);
    }
}

#[test]
fn fock_dimension_guard() {
    assert!(matches!(
        TruncatedSqueezedState::new(&[1.0], 1.0, 7),
        Err(Error::Dimension { dim: 7, limit: 6 })
    ));
    assert!(matches!(
        TruncatedSqueezedState::new(&[1.0; 4], 1.0, 2),
        Err(Error::Dimension { dim: 4, limit: 3 })
    ));
}

fn plus() -> [C; 2] {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [h, h]
}

#[test]
fn reduced_state_limits() {
    let st = TruncatedSqueezedState::new(&[0.8], 1.0, 6).unwrap();
    let thermal = st.right_reduced_state();
    let th_purity = (&thermal * &thermal).trace();

    let full = conditional_reduced_state(&st, &OverlapKernel::uniform(1.0, 1).unwrap(), plus()).unwrap();
    let ctl = full.control_state();
    for j in 0..2 {
        for l in 0..2 {
            assert!((ctl[(j, l)] - C::new(0.5, 0.0)).norm() < 1e-14);
        }
    }
    assert!((full.purity() - th_purity).abs() < 1e-14);

    let none = conditional_reduced_state(&st, &OverlapKernel::uniform(0.0, 1).unwrap(), plus()).unwrap();
    // Π(0) = 1: only the vacuum component stays coherent.
    let p0 = thermal[(0, 0)];
    let ctl = none.control_state();
    assert!((ctl[(0, 1)] - C::new(0.5 * p0, 0.0)).norm() < 1e-15);
    assert!((none.purity() - 0.5 * (th_purity + p0 * p0)).abs() < 1e-14);

    for r in [&full, &none] {
        let marg = r.fock_marginal();
        for i in 0..thermal.nrows() {
            for j in 0..thermal.ncols() {
                assert!((marg[(i, j)] - C::new(thermal[(i, j)], 0.0)).norm() < 1e-14);
            }
        }
    }

    let reg = RegulatorParams::default();
    let p = Wavepacket::new(0.8, 0.08).unwrap();
    let pi1 = purification_overlap(&left(), &left().shifted(1.0), &p, &p, &reg).unwrap();
    let mid = conditional_reduced_state(&st, &OverlapKernel::uniform(pi1, 1).unwrap(), plus()).unwrap();
    assert!(mid.purity() > none.purity());
    assert!(mid.purity() < full.purity());
}

#[test]
fn kernel_validation() {
    assert!(OverlapKernel::new(vec![1.2]).is_err());
    let st = TruncatedSqueezedState::new(&[1.0, 2.0], 1.0, 2).unwrap();
    assert!(conditional_reduced_state(&st, &OverlapKernel::uniform(0.5, 1).unwrap(), plus()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduced_state_is_a_density_matrix(
        pis in proptest::collection::vec(0.0f64..=1.0, 2),
        omegas in proptest::collection::vec(0.2f64..3.0, 2),
        a in 0.5f64..2.0,
        theta in 0.0f64..std::f64::consts::FRAC_PI_2,
        phase in -3.0f64..3.0,
        n_max in 1usize..=3,
    ) {
        let st = TruncatedSqueezedState::new(&omegas, a, n_max).unwrap();
        let c = [C::new(theta.cos(), 0.0), C::from_polar(theta.sin(), phase)];
        let r = conditional_reduced_state(&st, &OverlapKernel::new(pis).unwrap(), c).unwrap();
        prop_assert!((r.trace() - C::new(1.0, 0.0)).norm() < 1e-13);
        prop_assert!(r.hermiticity_defect() < 1e-15);
        prop_assert!(r.eigenvalues()[0] >= -1e-12);
        prop_assert!(r.purity() <= 1.0 + 1e-12);
    }

    #[test]
    fn squeezed_state_matches_planck(omega in 0.1f64..5.0, a in 0.3f64..3.0, n_max in 2usize..=6) {
        let rep = squeezed_vacuum_check(&TruncatedSqueezedState::new(&[omega], a, n_max).unwrap());
        prop_assert!(rep.passed(1e-11), "{:?}", rep);
    }
}

#[test]
fn common_transverse_shift_is_bit_identical() {
    use wedgeworks::rindler::InPlanePhase;
    let base = right().shifted(0.3);
    let moved = base.transverse(1.7, -0.4);
    let plain = BranchPair::wedges(base, base).unwrap();
    let shifted = BranchPair::wedges(moved, moved).unwrap();
    for (kx, ky, kz) in [(0.3, 0.5, 0.2), (-1.2, 0.1, 2.0), (4.0, 3.0, 0.0)] {
        let x = transverse_mode_density(&plain, 1.1, kx, ky, kz, InPlanePhase::Printed).unwrap();
        let y = transverse_mode_density(&shifted, 1.1, kx, ky, kz, InPlanePhase::Printed).unwrap();
        assert_eq!(x, y);
        assert!((x.total - x.local_a).abs() <= 1e-15 * x.local_a);
    }
    let half = BranchPair::wedges(base, moved).unwrap();
    let d = transverse_mode_density(&half, 1.1, 0.3, 0.5, 0.2, InPlanePhase::Printed).unwrap();
    assert_eq!(d.local_a, d.local_b);
    assert!((d.cross_ab.norm() - d.local_a).abs() < 1e-15 * d.local_a);
    assert!(transverse_mode_density(&BranchPair::wedges(base, right()).unwrap(), 1.1, 0.3, 0.5, 0.2, InPlanePhase::Printed).is_err());
}
