use std::f64::consts::PI;

use anyhow::{bail, Context};
use wedgeworks::detectors::{
    desitter_superposed_response, kms_fit, BTZParams, BtzPrefactor, DetectorConfig, ResponseCurve, DEFAULT_IMAGES,
};
use wedgeworks::diamond::{
    cross_term_diamond, diamond_alpha_beta, diamond_mode, diamond_planck_number, DiamondCrossForm, DiamondCrossOptions,
    DiamondSpec, ShiftConvention,
};
use wedgeworks::oscint::{iepsilon_integral, kg_inner_product, ModeFunction, RegulatorParams};
use wedgeworks::rindler::{
    cross_term_rr_shifted, planck_number, rindler_alpha_beta, rindler_mode, CrossTermForm, InPlanePhase, WedgeSpec,
};
use wedgeworks::specfun::{cgamma, conical_p, gauss_2f1, kummer_m};
use wedgeworks::superpose::{
    conditional_spectrum, nonthermality_metric, squeezed_vacuum_check, transverse_mode_density, BranchPair, FitModel,
    SpectrumBranch, SpectrumOptions, TruncatedSqueezedState,
};
use wedgeworks::Complex64 as C;

use crate::config::{CrossForm, DiamondShift, InPlane, Prefactor, Resolved, Scenario};
use crate::output::{CheckRow, KmsRow, Meta, OracleRow, Report, ResponseRow, SpectrumRow, Table};
use crate::Failure;

/// Largest relative deviation accepted between closed forms and the KG oracle.
pub const ORACLE_TOL: f64 = 1e-8;

pub fn run(r: &Resolved) -> anyhow::Result<Report> {
    match r.scenario {
        Scenario::RindlerSpectrum => {
            let wa = WedgeSpec::right(r.a)?;
            spectrum(r, BranchPair::wedges(wa, wa.shifted(r.s))?)
        }
        Scenario::Antiparallel => spectrum(r, BranchPair::wedges(WedgeSpec::right(r.a)?, WedgeSpec::left(r.a)?)?),
        Scenario::DiamondSpectrum => {
            spectrum(r, BranchPair::diamonds(DiamondSpec::zeroth(r.a)?, DiamondSpec::new(r.a, r.n)?)?)
        }
        Scenario::CrossTerm => cross_term(r),
        Scenario::Transverse3p1 => transverse(r),
        Scenario::DesitterResponse => desitter(r),
        Scenario::BtzResponse => btz(r),
        Scenario::KmsCheck => kms_check(r),
        Scenario::Oracle => oracle(r),
        Scenario::Selftest => selftest(r, false),
    }
}

fn reg(r: &Resolved) -> RegulatorParams {
    RegulatorParams {
        tol: r.tolerance,
        ..RegulatorParams::default()
    }
}

fn diamond_shift(r: &Resolved) -> ShiftConvention {
    match r.p.diamond_shift {
        Some(DiamondShift::CommonPhase) => ShiftConvention::CommonPhase,
        _ => ShiftConvention::Printed,
    }
}

fn base_meta(r: &Resolved) -> Meta {
    let mut m = Meta::new(r.scenario.name());
    m.parameters.insert("a".into(), r.a);
    m.parameters.insert("tolerance".into(), r.tolerance);
    m
}

fn spectrum(r: &Resolved, pair: BranchPair) -> anyhow::Result<Report> {
    let opts = SpectrumOptions {
        relative_width: r.packet_width,
        reg: reg(r),
        diamond_shift: diamond_shift(r),
    };
    let points = conditional_spectrum(&pair, &r.omegas, &opts)?;
    let diamond = r.scenario == Scenario::DiamondSpectrum;
    let mut meta = base_meta(r);
    meta.parameters.insert("packet_width".into(), r.packet_width);
    match r.scenario {
        Scenario::RindlerSpectrum => {
            meta.parameters.insert("s".into(), r.s);
        }
        Scenario::DiamondSpectrum => {
            meta.parameters.insert("n".into(), r.n as f64);
            meta.variants.insert(
                "diamond_shift".into(),
                match opts.diamond_shift {
                    ShiftConvention::Printed => "printed",
                    ShiftConvention::CommonPhase => "common-phase",
                }
                .into(),
            );
        }
        _ => {}
    }
    meta.variants.insert("fit".into(), "scaled-planck".into());
    meta.notes
        .push("cross terms are packet-smeared ratios to the smeared diagonal, scaled by the Planck number".into());
    if r.omegas.len() >= 8 {
        match nonthermality_metric(&points, FitModel::ScaledPlanck) {
            Ok(fit) => {
                meta.bounds.insert("fit_residual".into(), fit.residual);
                meta.bounds.insert("fit_temperature".into(), fit.temperature);
                meta.bounds.insert("fit_amplitude".into(), fit.amplitude);
            }
            Err(e) => meta.notes.push(format!("thermal fit unavailable: {e}")),
        }
    }
    let mut rows = Vec::with_capacity(points.len() + r.omegas.len());
    for &w in &r.omegas {
        let planck = if diamond {
            diamond_planck_number(w, r.a)
        } else {
            planck_number(w, r.a)
        };
        rows.push(SpectrumRow {
            omega: w,
            omega_prime: w,
            branch: "planck".into(),
            value_re: planck,
            value_im: 0.0,
            tolerance: 0.0,
        });
        for p in points.iter().filter(|p| p.omega == w) {
            rows.push(SpectrumRow {
                omega: p.omega,
                omega_prime: p.omega_prime,
                branch: p.branch.label().into(),
                value_re: p.value.re,
                value_im: p.value.im,
                tolerance: p.tolerance,
            });
        }
    }
    Ok(Report {
        meta,
        table: Table::Spectrum(rows),
    })
}

fn cross_term(r: &Resolved) -> anyhow::Result<Report> {
    let wp = r.p.omega_prime.context("omega-prime is required")?;
    let mut meta = base_meta(r);
    meta.parameters.insert("omega_prime".into(), wp);
    let diamond = r.p.n.is_some();
    let eval: Box<dyn Fn(f64) -> wedgeworks::Result<C> + Sync> = if diamond {
        let form = match r.p.cross_form {
            None | Some(CrossForm::Quadrature) => DiamondCrossForm::Quadrature,
            Some(CrossForm::Printed) => DiamondCrossForm::Printed,
            Some(f) => bail!(Failure::Validation(vec![format!(
                "cross-form {f:?} applies to wedges; diamonds take quadrature or printed"
            )])),
        };
        let opts = DiamondCrossOptions {
            form,
            shift: diamond_shift(r),
            ..DiamondCrossOptions::default()
        };
        meta.parameters.insert("n".into(), r.n as f64);
        meta.variants
            .insert("cross_form".into(), format!("{form:?}").to_lowercase());
        meta.variants.insert("diamond_shift".into(), format!("{:?}", opts.shift).to_lowercase());
        let (a, n) = (r.a, r.n as u32);
        Box::new(move |w| cross_term_diamond(w, wp, a, n, &opts))
    } else {
        let form = match r.p.cross_form {
            None | Some(CrossForm::MainText) => CrossTermForm::MainText,
            Some(CrossForm::Appendix) => CrossTermForm::Appendix,
            Some(f) => bail!(Failure::Validation(vec![format!(
                "cross-form {f:?} applies to diamonds; wedges take main-text or appendix"
            )])),
        };
        if r.s == 0.0 {
            bail!(Failure::Validation(vec!["s must be nonzero for the wedge cross term".into()]));
        }
        meta.parameters.insert("s".into(), r.s);
        meta.variants.insert(
            "cross_form".into(),
            match form {
                CrossTermForm::MainText => "main-text",
                CrossTermForm::Appendix => "appendix",
            }
            .into(),
        );
        let (a, s) = (r.a, r.s);
        Box::new(move |w| cross_term_rr_shifted(w, wp, a, s, form))
    };
    let mut rows = Vec::new();
    for &w in &r.omegas {
        if (w - wp).abs() <= 1e-12 * w.max(wp) {
            meta.notes.push(format!("omega = {w:e} skipped: coincides with omega-prime"));
            continue;
        }
        let v = eval(w).with_context(|| format!("cross term at omega = {w}"))?;
        rows.push(SpectrumRow {
            omega: w,
            omega_prime: wp,
            branch: "cross".into(),
            value_re: v.re,
            value_im: v.im,
            tolerance: r.tolerance * v.norm(),
        });
    }
    Ok(Report {
        meta,
        table: Table::Spectrum(rows),
    })
}

fn transverse(r: &Resolved) -> anyhow::Result<Report> {
    let (kx, ky, kz) = (r.p.kx.unwrap_or(0.3), r.p.ky.unwrap_or(0.5), r.p.kz.unwrap_or(0.0));
    let (dy, dz) = (r.p.dy.unwrap_or(0.0), r.p.dz.unwrap_or(0.0));
    let in_plane = match r.p.in_plane {
        Some(InPlane::LightCone) => InPlanePhase::LightCone,
        _ => InPlanePhase::Printed,
    };
    let wa = WedgeSpec::right(r.a)?.shifted(r.s);
    let pair = BranchPair::wedges(wa, wa.transverse(dy, dz))?;
    let mut meta = base_meta(r);
    for (k, v) in [("s", r.s), ("kx", kx), ("ky", ky), ("kz", kz), ("dy", dy), ("dz", dz)] {
        meta.parameters.insert(k.into(), v);
    }
    meta.variants.insert(
        "in_plane".into(),
        match in_plane {
            InPlanePhase::Printed => "printed",
            InPlanePhase::LightCone => "light-cone",
        }
        .into(),
    );
    meta.notes.push("mode-resolved densities at fixed momentum (kx, ky, kz)".into());
    let mut rows = Vec::new();
    for &w in &r.omegas {
        let d = transverse_mode_density(&pair, w, kx, ky, kz, in_plane)?;
        for (branch, v) in [
            (SpectrumBranch::LocalA, C::new(d.local_a, 0.0)),
            (SpectrumBranch::LocalB, C::new(d.local_b, 0.0)),
            (SpectrumBranch::CrossAB, d.cross_ab),
            (SpectrumBranch::Total, C::new(d.total, 0.0)),
        ] {
            rows.push(SpectrumRow {
                omega: w,
                omega_prime: w,
                branch: branch.label().into(),
                value_re: v.re,
                value_im: v.im,
                tolerance: 0.0,
            });
        }
    }
    Ok(Report {
        meta,
        table: Table::Spectrum(rows),
    })
}

fn attach_kms(meta: &mut Meta, curve: &ResponseCurve) {
    match kms_fit(curve) {
        Ok(k) => {
            meta.bounds.insert("kms_t_eff".into(), k.t_eff);
            meta.bounds.insert("kms_max_residual".into(), k.max_residual);
        }
        Err(e) => meta.notes.push(format!("KMS fit unavailable: {e}")),
    }
}

fn desitter(r: &Resolved) -> anyhow::Result<Report> {
    let kappa = r.p.kappa.unwrap_or(1.0);
    let sep = r.p.separation.unwrap_or(1.0);
    let mut meta = base_meta(r);
    meta.parameters.remove("a");
    meta.parameters.insert("kappa".into(), kappa);
    meta.parameters.insert("separation".into(), sep);
    meta.bounds.insert("temperature".into(), kappa / (2.0 * PI));
    let curve = ResponseCurve::desitter(&r.gaps, kappa, sep)?;
    attach_kms(&mut meta, &curve);
    let rows = r
        .gaps
        .iter()
        .map(|&g| {
            Ok(ResponseRow {
                gap: g,
                value: desitter_superposed_response(g, kappa, sep)?,
                tail_bound: 0.0,
            })
        })
        .collect::<wedgeworks::Result<Vec<_>>>()?;
    Ok(Report {
        meta,
        table: Table::Response(rows),
    })
}

fn btz(r: &Resolved) -> anyhow::Result<Report> {
    let m = r.p.mass.unwrap_or(1.0);
    let l = r.p.ads_length.unwrap_or(1.0);
    let radius = r.p.radius.unwrap_or(1.5 * m.sqrt() * l);
    let n_max = r.p.n_max.unwrap_or(DEFAULT_IMAGES);
    let mut p = BTZParams::new(m, l, radius)?.with_images(n_max)?;
    let prefactor = r.p.delta_phi.map(|_| match r.p.btz_prefactor {
        Some(Prefactor::Printed) => BtzPrefactor::Printed,
        _ => BtzPrefactor::Canonical,
    });
    if let Some(d) = r.p.delta_phi {
        p = p.with_delta_phi(d)?;
    }
    let cfg = DetectorConfig::new(0.0, r.p.sigma.unwrap_or(1.0))?;
    let curve = ResponseCurve::btz(&r.gaps, &cfg, &p, prefactor)?;
    let mut meta = base_meta(r);
    meta.parameters.remove("a");
    for (k, v) in [("mass", m), ("ads_length", l), ("radius", radius), ("n_max", n_max as f64)] {
        meta.parameters.insert(k.into(), v);
    }
    if let Some(d) = r.p.delta_phi {
        meta.parameters.insert("delta_phi".into(), d);
    }
    meta.variants.insert(
        "response".into(),
        match prefactor {
            None => "local",
            Some(BtzPrefactor::Canonical) => "superposed-canonical",
            Some(BtzPrefactor::Printed) => "superposed-printed",
        }
        .into(),
    );
    meta.bounds.insert("temperature".into(), p.temperature());
    meta.bounds.insert("image_tail".into(), curve.tail_bound);
    attach_kms(&mut meta, &curve);
    let rows = r
        .gaps
        .iter()
        .zip(&curve.values)
        .map(|(&g, &v)| ResponseRow {
            gap: g,
            value: v,
            tail_bound: curve.tail_bound,
        })
        .collect();
    Ok(Report {
        meta,
        table: Table::Response(rows),
    })
}

fn kms_check(r: &Resolved) -> anyhow::Result<Report> {
    let path = r.p.input.as_deref().context("input is required for kms-check")?;
    let (gaps, values) = crate::output::read_curve(path)?;
    let curve = ResponseCurve::new(gaps, values)?;
    let k = kms_fit(&curve)?;
    let mut meta = Meta::new(r.scenario.name());
    meta.notes.push(format!("input {}", path.display()));
    Ok(Report {
        meta,
        table: Table::Kms(vec![KmsRow {
            t_eff: k.t_eff,
            max_residual: k.max_residual,
            worst_gap: k.worst_gap,
            pairs: k.pairs,
        }]),
    })
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn oracle(r: &Resolved) -> anyhow::Result<Report> {
    let reg = reg(r);
    let k = r.p.k.unwrap_or(0.7);
    let omegas = if r.p.omega_grid.is_some() {
        r.omegas.clone()
    } else {
        vec![0.5 * r.a, r.a, 2.0 * r.a]
    };
    let wedge = WedgeSpec::right(r.a)?.shifted(r.s);
    let spec = DiamondSpec::new(r.a, r.n)?;
    let u = ModeFunction::plane_wave(k)?;
    let mut rows = Vec::new();
    for &w in &omegas {
        let g = rindler_mode(w, &wedge)?;
        let alpha = kg_inner_product(&g, &u, &reg)?.value;
        let beta = -kg_inner_product(&g, &u.conjugate(), &reg)?.value.conj();
        let cf = rindler_alpha_beta(w, k, &wedge)?;
        let g = diamond_mode(w, &spec)?;
        let d_alpha = kg_inner_product(&g, &u, &reg)?.value;
        let d_beta = kg_inner_product(&g, &u.conjugate(), &reg)?.value;
        let dcf = diamond_alpha_beta(w, k, &spec, ShiftConvention::Printed)?;
        for (family, coefficient, closed, oracle) in [
            ("wedge", "alpha", cf.alpha, alpha),
            ("wedge", "beta", cf.beta, beta),
            ("diamond", "alpha", dcf.alpha, d_alpha),
            ("diamond", "beta", dcf.beta, d_beta),
        ] {
            rows.push(OracleRow {
                family: family.into(),
                omega: w,
                k,
                coefficient: coefficient.into(),
                closed_re: closed.re,
                closed_im: closed.im,
                oracle_re: oracle.re,
                oracle_im: oracle.im,
                deviation: rel(oracle, closed),
            });
        }
    }
    let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let mut meta = base_meta(r);
    meta.parameters.insert("s".into(), r.s);
    meta.parameters.insert("n".into(), r.n as f64);
    meta.parameters.insert("k".into(), k);
    meta.bounds.insert("max_deviation".into(), worst);
    meta.bounds.insert("oracle_tol".into(), ORACLE_TOL);
    Ok(Report {
        meta,
        table: Table::Oracle(rows),
    })
}

fn check(rows: &mut Vec<CheckRow>, name: &str, value: f64, limit: f64) {
    rows.push(CheckRow {
        check: name.into(),
        value,
        limit,
        pass: value <= limit,
    });
}

fn specfun_checks(rows: &mut Vec<CheckRow>) -> anyhow::Result<()> {
    let mut g: f64 = 0.0;
    for i in 1..=100 {
        let x = 0.1 * i as f64;
        let v = cgamma(C::new(1.0, x))?.norm_sqr() * (PI * x).sinh() / (PI * x);
        g = g.max((v - 1.0).abs());
    }
    check(rows, "gamma |Γ(1+ix)|² = πx/sinh πx", g, 1e-12);
    let (a, b, z) = (C::new(1.0, 1.3), C::new(2.0, 0.0), C::new(0.0, 4.0));
    let k = rel(kummer_m(a, b, z)?, z.exp() * kummer_m(b - a, b, -z)?);
    check(rows, "kummer transformation", k, 1e-9);
    let (a, b, c, z) = (C::new(1.0, -1.0), C::new(1.0, 1.3), C::new(2.0, 0.0), C::new(0.3, 0.2));
    let f = gauss_2f1(a, b, c, z)?;
    let pfaff = (C::new(1.0, 0.0) - z).powc(-a) * gauss_2f1(a, c - b, c, z / (z - 1.0))?;
    check(rows, "2F1 pfaff transformation", rel(pfaff, f), 1e-9);
    let p = conical_p(2.3, 5.0)?;
    check(rows, "conical P symmetric in lambda", (p - conical_p(-2.3, 5.0)?).abs() / p.abs(), 1e-12);
    Ok(())
}

pub fn selftest(r: &Resolved, specfun_only: bool) -> anyhow::Result<Report> {
    let mut rows = Vec::new();
    specfun_checks(&mut rows)?;
    if !specfun_only {
        let reg = RegulatorParams::default();
        let ieps = iepsilon_integral(&[-2.0, -0.5, 0.5, 2.0], &reg)?;
        let worst = ieps.iter().map(|row| rel(row.numeric, row.analytic)).fold(0.0, f64::max);
        check(&mut rows, "i-epsilon integral", worst, 1e-8);

        let wa = WedgeSpec::right(1.0)?;
        let pts = conditional_spectrum(&BranchPair::wedges(wa, wa)?, &[0.5, 1.0, 2.0], &SpectrumOptions::default())?;
        let planck = pts
            .iter()
            .filter(|p| p.branch == SpectrumBranch::Total)
            .map(|p| (p.value.re / planck_number(p.omega, 1.0) - 1.0).abs())
            .fold(0.0, f64::max);
        check(&mut rows, "coincident wedges reproduce Planck", planck, 1e-12);

        let gaps = ResponseCurve::symmetric_gaps(&[0.25, 0.5, 1.0, 2.0]);
        let ds = kms_fit(&ResponseCurve::desitter(&gaps, 1.0, 0.7)?)?;
        check(&mut rows, "de Sitter KMS residual", ds.max_residual, 1e-10);
        check(&mut rows, "de Sitter temperature κ/2π", (ds.t_eff * 2.0 * PI - 1.0).abs(), 1e-10);

        let p = BTZParams::new(1.0, 1.0, 1.5)?;
        let cfg = DetectorConfig::new(0.0, 1.0)?;
        let bt = kms_fit(&ResponseCurve::btz(&gaps, &cfg, &p, None)?)?;
        check(&mut rows, "BTZ local KMS temperature", (bt.t_eff / p.temperature() - 1.0).abs(), 1e-8);

        let state = TruncatedSqueezedState::new(&[1.0], 1.0, 6)?;
        let rep = squeezed_vacuum_check(&state);
        check(&mut rows, "squeezed vacuum reduced state diagonal", rep.max_offdiag, 1e-14);
        check(&mut rows, "squeezed vacuum Boltzmann ratios", rep.max_ratio_deviation, 1e-12);
    }
    let mut meta = Meta::new(if specfun_only { "specfun-selftest" } else { r.scenario.name() });
    let failed = rows.iter().filter(|c| !c.pass).count();
    meta.bounds.insert("failed".into(), failed as f64);
    Ok(Report {
        meta,
        table: Table::Check(rows),
    })
}
