//! Quantum-controlled superpositions of frames: the conditional four-term
//! spectrum, purification overlaps, thermality fits and truncated Fock states.

use nalgebra::{DMatrix, Matrix2, Vector2};
use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::diamond::{DiamondSpec, ShiftConvention};
use crate::oscint::{
    beta_overlap_integral, diamond_double_integral, diamond_shifted_double_integral, RegulatorParams, Wavepacket,
};
use crate::rindler::{bogoliubov_3p1_wedge, planck_number, Coefficient, InPlanePhase, RindlerKernel, Side, WedgeSpec};
use crate::{Error, Result};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Residual below which a spectrum counts as thermal.
pub const THERMAL_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    Wedge(WedgeSpec),
    Diamond(DiamondSpec),
}

impl Branch {
    pub fn a(&self) -> f64 {
        match self {
            Branch::Wedge(w) => w.a,
            Branch::Diamond(d) => d.a,
        }
    }
}

/// Two branches in superposition, the control state and the state the
/// control is finally projected on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPair {
    pub branch_a: Branch,
    pub branch_b: Branch,
    pub control: [C; 2],
    pub measurement: [C; 2],
}

fn balanced() -> [C; 2] {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [h, h]
}

fn check_normalized(v: &[C; 2], what: &str) -> Result<()> {
    let n = v[0].norm_sqr() + v[1].norm_sqr();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("{what} amplitudes must be normalized, |c|^2 = {n}")));
    }
    Ok(())
}

impl BranchPair {
    pub fn new(branch_a: Branch, branch_b: Branch) -> Result<Self> {
        match (&branch_a, &branch_b) {
            (Branch::Wedge(_), Branch::Wedge(_)) | (Branch::Diamond(_), Branch::Diamond(_)) => {}
            _ => return Err(Error::domain("branches must both be wedges or both be diamonds")),
        }
        if branch_a.a() != branch_b.a() {
            return Err(Error::domain(format!(
                "branches must share the scale a ({} vs {})",
                branch_a.a(),
                branch_b.a()
            )));
        }
        Ok(BranchPair {
            branch_a,
            branch_b,
            control: balanced(),
            measurement: balanced(),
        })
    }

    pub fn wedges(a: WedgeSpec, b: WedgeSpec) -> Result<Self> {
        Self::new(Branch::Wedge(a), Branch::Wedge(b))
    }

    pub fn diamonds(a: DiamondSpec, b: DiamondSpec) -> Result<Self> {
        Self::new(Branch::Diamond(a), Branch::Diamond(b))
    }

    pub fn with_amplitudes(mut self, control: [C; 2], measurement: [C; 2]) -> Result<Self> {
        check_normalized(&control, "control")?;
        check_normalized(&measurement, "measurement")?;
        self.control = control;
        self.measurement = measurement;
        Ok(self)
    }

    /// Weights w_j = m_j* c_j of the conditional operator Σ_j w_j b_j.
    pub fn weights(&self) -> [C; 2] {
        [
            self.measurement[0].conj() * self.control[0],
            self.measurement[1].conj() * self.control[1],
        ]
    }

    pub fn a(&self) -> f64 {
        self.branch_a.a()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumBranch {
    LocalA,
    LocalB,
    CrossAB,
    CrossBA,
    Total,
}

impl SpectrumBranch {
    pub fn label(self) -> &'static str {
        match self {
            SpectrumBranch::LocalA => "local_a",
            SpectrumBranch::LocalB => "local_b",
            SpectrumBranch::CrossAB => "cross_ab",
            SpectrumBranch::CrossBA => "cross_ba",
            SpectrumBranch::Total => "total",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub omega_prime: f64,
    pub value: C,
    pub branch: SpectrumBranch,
    /// Absolute error estimate.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Packet width σ/ω₀ used for the smeared cross terms.
    pub relative_width: f64,
    pub reg: RegulatorParams,
    pub diamond_shift: ShiftConvention,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            relative_width: 0.1,
            reg: RegulatorParams::default(),
            diamond_shift: ShiftConvention::Printed,
        }
    }
}

/// `count` points spaced geometrically over [lo, hi].
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || count == 0 {
        return Err(Error::domain(format!("bad grid {lo}:{hi}:{count}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let r = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i + 1 == count { hi } else { lo * (r * i as f64).exp() })
        .collect())
}

/// Smeared cross term relative to the smeared diagonal, (value, relative error).
fn cross_ratio(pair: &BranchPair, pack: &Wavepacket, opts: &SpectrumOptions) -> Result<(C, f64)> {
    let a = pair.a();
    match (&pair.branch_a, &pair.branch_b) {
        (Branch::Wedge(wa), Branch::Wedge(wb)) => {
            if wa == wb {
                return Ok((C::new(1.0, 0.0), 0.0));
            }
            if wa.side != wb.side && wa.apex() == wb.apex() {
                // ∫dk β^{R*}β^{L} ∝ δ(Ω + Ω′)
                return Ok((ZERO, 0.0));
            }
            let ka = RindlerKernel {
                wedge: *wa,
                which: Coefficient::Beta,
            };
            let kb = RindlerKernel {
                wedge: *wb,
                which: Coefficient::Beta,
            };
            let num = beta_overlap_integral(&ka, &kb, pack, pack, a, &opts.reg)?;
            let den = beta_overlap_integral(&ka, &ka, pack, pack, a, &opts.reg)?;
            let d = den.value.re;
            Ok((num.value / d, num.error / d + num.value.norm() * den.error / (d * d)))
        }
        (Branch::Diamond(da), Branch::Diamond(db)) => {
            let m = db.n - da.n;
            if m == 0 {
                return Ok((C::new(1.0, 0.0), 0.0));
            }
            let den = diamond_double_integral(pack, pack, a)?;
            let num = diamond_shifted_double_integral(pack, pack, a, m.unsigned_abs() as u32, opts.diamond_shift.kernel_sign())?;
            let v = if m > 0 { num.value } else { num.value.conj() };
            let d = den.value.re;
            Ok((v / d, num.error / d + num.value.norm() * den.error / (d * d)))
        }
        _ => Err(Error::domain("branches must both be wedges or both be diamonds")),
    }
}

fn attribute(e: Error, branch: &str, omega: f64) -> Error {
    match e {
        Error::NoConvergence { what, estimate, tol } => Error::NoConvergence {
            what: format!("{branch} at omega = {omega}: {what}"),
            estimate,
            tol,
        },
        other => other,
    }
}

/// Conditional particle spectrum of the superposed frames on a frequency grid.
///
/// Local terms are the Planck occupation. Each cross term is Planck times the
/// ratio of packet-smeared cross and diagonal overlaps, which cancels the
/// packet-averaging bias. Total = Σ_{jl} w_j* w_l N_{jl}; for balanced
/// amplitudes this is (N_AA + N_AB + N_BA + N_BB)/4.
pub fn conditional_spectrum(pair: &BranchPair, grid: &[f64], opts: &SpectrumOptions) -> Result<Vec<SpectrumPoint>> {
    opts.reg.validate()?;
    let a = pair.a();
    let w = pair.weights();
    let rows: Vec<Result<Vec<SpectrumPoint>>> = grid
        .par_iter()
        .map(|&om| {
            let pack = Wavepacket::new(om, opts.relative_width * om)?;
            let planck = planck_number(om, a);
            let (ratio, rel) = cross_ratio(pair, &pack, opts).map_err(|e| attribute(e, "cross_ab", om))?;
            let cross = ratio * planck;
            let tol_cross = rel * planck + 1e-15 * planck;
            let n = [[C::new(planck, 0.0), cross], [cross.conj(), C::new(planck, 0.0)]];
            let mut total = ZERO;
            for j in 0..2 {
                for l in 0..2 {
                    total += w[j].conj() * w[l] * n[j][l];
                }
            }
            let tol_total = 2.0 * (w[0] * w[1]).norm() * tol_cross + 1e-15 * planck;
            let pt = |value: C, branch, tolerance| SpectrumPoint {
                omega: om,
                omega_prime: om,
                value,
                branch,
                tolerance,
            };
            Ok(vec![
                pt(C::new(planck, 0.0), SpectrumBranch::LocalA, 1e-15 * planck),
                pt(C::new(planck, 0.0), SpectrumBranch::LocalB, 1e-15 * planck),
                pt(cross, SpectrumBranch::CrossAB, tol_cross),
                pt(cross.conj(), SpectrumBranch::CrossBA, tol_cross),
                pt(total, SpectrumBranch::Total, tol_total),
            ])
        })
        .collect();
    let mut out = Vec::with_capacity(grid.len() * 5);
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// Mode-resolved (3+1)D occupation densities |β|² and β_A* β_B at one
/// Minkowski momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDensity {
    pub local_a: f64,
    pub local_b: f64,
    pub cross_ab: C,
    pub total: f64,
}

/// Densities for two wedges that differ only by transverse translations.
/// The relative transverse phase is formed before exponentiating, so a common
/// shift cancels exactly.
pub fn transverse_mode_density(
    pair: &BranchPair,
    omega: f64,
    kx: f64,
    ky: f64,
    kz: f64,
    in_plane: InPlanePhase,
) -> Result<ModeDensity> {
    let (Branch::Wedge(wa), Branch::Wedge(wb)) = (&pair.branch_a, &pair.branch_b) else {
        return Err(Error::domain("transverse densities need two wedges"));
    };
    if wa.side != wb.side || wa.null_shift != wb.null_shift {
        return Err(Error::domain("branches may differ only by a transverse shift"));
    }
    let (pa, phi_a) = bogoliubov_3p1_wedge(omega, kx, ky, kz, wa, in_plane)?;
    let (pb, phi_b) = bogoliubov_3p1_wedge(omega, kx, ky, kz, wb, in_plane)?;
    let local_a = pa.beta.norm_sqr();
    let local_b = pb.beta.norm_sqr();
    let rel = phi_b - phi_a;
    let cross_ab = if rel == 0.0 {
        pa.beta.conj() * pb.beta
    } else {
        pa.beta.conj() * pb.beta * C::new(0.0, rel).exp()
    };
    let w = pair.weights();
    let total = w[0].norm_sqr() * local_a + w[1].norm_sqr() * local_b + 2.0 * (w[0].conj() * w[1] * cross_ab).re;
    Ok(ModeDensity {
        local_a,
        local_b,
        cross_ab,
        total,
    })
}

/// |⟨1_ω, L | 1_ω′, L′⟩|² for packet-smeared single-particle states of a left
/// wedge and a translated left wedge: the KG overlap of the smeared modes,
/// normalised by the packet norms and squared. Since α is stored conjugated
/// and β is not, the overlap is (∫α*α′)* − ∫β*β′.
pub fn purification_overlap(
    wedge_l: &WedgeSpec,
    wedge_l_shifted: &WedgeSpec,
    p1: &Wavepacket,
    p2: &Wavepacket,
    reg: &RegulatorParams,
) -> Result<f64> {
    if wedge_l.side != Side::Left || wedge_l_shifted.side != Side::Left {
        return Err(Error::domain("purification overlap needs two left wedges"));
    }
    if wedge_l.a != wedge_l_shifted.a {
        return Err(Error::domain("wedges must share the acceleration"));
    }
    let a = wedge_l.a;
    let k = |w: &WedgeSpec, which| RindlerKernel { wedge: *w, which };
    let aa = beta_overlap_integral(
        &k(wedge_l, Coefficient::Alpha),
        &k(wedge_l_shifted, Coefficient::Alpha),
        p1,
        p2,
        a,
        reg,
    )?;
    let bb = beta_overlap_integral(
        &k(wedge_l, Coefficient::Beta),
        &k(wedge_l_shifted, Coefficient::Beta),
        p1,
        p2,
        a,
        reg,
    )?;
    let v = (aa.value.conj() - bb.value) / (p1.norm() * p2.norm()).sqrt();
    Ok(v.norm_sqr())
}

/// Model used by [`fit_thermal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FitModel {
    /// N = A/(e^{ω/T} − 1) with free amplitude A and temperature T.
    #[default]
    ScaledPlanck,
    /// ln(1 + 1/N) = ω/T through the origin (A fixed to 1).
    DetailedBalance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalFit {
    pub temperature: f64,
    pub amplitude: f64,
    /// max_i |N_fit(ω_i)/N_i − 1|.
    pub residual: f64,
    pub model: FitModel,
}

impl ThermalFit {
    pub fn is_thermal(&self) -> bool {
        self.residual < THERMAL_THRESHOLD
    }
}

/// Least-squares thermal fit of occupations `n` on frequencies `omega`.
pub fn fit_thermal(omega: &[f64], n: &[f64], model: FitModel) -> Result<ThermalFit> {
    if omega.len() != n.len() {
        return Err(Error::Fit("frequency and occupation lengths differ".into()));
    }
    if omega.len() < 8 {
        return Err(Error::Fit(format!("need at least 8 points, got {}", omega.len())));
    }
    if let Some(bad) = n.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Fit(format!("occupations must be positive, got {bad}")));
    }
    if let Some(bad) = omega.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Fit(format!("frequencies must be positive, got {bad}")));
    }
    let (ln_amp, beta) = match model {
        FitModel::DetailedBalance => {
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (w, v) in omega.iter().zip(n) {
                sxy += w * (1.0 / v).ln_1p();
                sxx += w * w;
            }
            (0.0, sxy / sxx)
        }
        FitModel::ScaledPlanck => scaled_planck_fit(omega, n)?,
    };
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Fit(format!("fitted inverse temperature {beta} is not positive")));
    }
    let amp = ln_amp.exp();
    let residual = omega
        .iter()
        .zip(n)
        .map(|(w, v)| (amp / (beta * w).exp_m1() / v - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(ThermalFit {
        temperature: 1.0 / beta,
        amplitude: amp,
        residual,
        model,
    })
}

/// Levenberg–Marquardt on r_i = ln N_i − ln A + ln(e^{βω_i} − 1) over (ln A, β).
fn scaled_planck_fit(omega: &[f64], n: &[f64]) -> Result<(f64, f64)> {
    let ln_expm1 = |x: f64| if x > 30.0 { x + (-(-x).exp()).ln_1p() } else { x.exp_m1().ln() };
    let resid = |p: &Vector2<f64>| -> Vec<f64> {
        omega
            .iter()
            .zip(n)
            .map(|(w, v)| v.ln() - p[0] + ln_expm1(p[1] * w))
            .collect()
    };
    let cost = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    // Initial guess: detailed balance through the origin.
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (w, v) in omega.iter().zip(n) {
        sxy += w * (1.0 / v).ln_1p();
        sxx += w * w;
    }
    let mut p = Vector2::new(0.0, (sxy / sxx).max(1e-6));
    let mut r = resid(&p);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let mut jtj = Matrix2::zeros();
        let mut jtr = Vector2::zeros();
        for (i, w) in omega.iter().enumerate() {
            let j = Vector2::new(-1.0, w / -(-p[1] * w).exp_m1());
            jtj += j * j.transpose();
            jtr += j * r[i];
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj;
            m[(0, 0)] *= 1.0 + lambda;
            m[(1, 1)] *= 1.0 + lambda;
            let Some(step) = m.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let mut q = p + step;
            if q[1] <= 0.0 {
                q[1] = 0.5 * p[1];
            }
            let rq = resid(&q);
            let cq = cost(&rq);
            if cq.is_finite() && cq <= c {
                let done = (c - cq) <= 1e-30 + 1e-15 * c || step.norm() < 1e-15 * (1.0 + p.norm());
                p = q;
                r = rq;
                c = cq;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if done {
                    return Ok((p[0], p[1]));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if !c.is_finite() {
        return Err(Error::Fit("thermal fit diverged".into()));
    }
    Ok((p[0], p[1]))
}

/// Thermal fit of a spectrum. Uses the `Total` points when present, otherwise
/// every point, taking the real part of the value.
pub fn nonthermality_metric(points: &[SpectrumPoint], model: FitModel) -> Result<ThermalFit> {
    let has_total = points.iter().any(|p| p.branch == SpectrumBranch::Total);
    let sel: Vec<&SpectrumPoint> = points
        .iter()
        .filter(|p| !has_total || p.branch == SpectrumBranch::Total)
        .collect();
    let omega: Vec<f64> = sel.iter().map(|p| p.omega).collect();
    let n: Vec<f64> = sel.iter().map(|p| p.value.re).collect();
    fit_thermal(&omega, &n, model)
}

/// Largest Fock level kept per mode.
pub const MAX_FOCK_LEVEL: usize = 6;
/// Largest number of (L, R) mode pairs.
pub const MAX_MODES: usize = 3;

/// Minkowski vacuum truncated to n ≤ n_max quanta in each of a few (L, R)
/// mode pairs: ⊗_i C_i Σ_n e^{−πnω_i/a} |n⟩_L |n⟩_R, renormalised.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSqueezedState {
    pub a: f64,
    pub omegas: Vec<f64>,
    pub n_max: usize,
    /// Row = left multi-index, column = right multi-index (mode 0 slowest).
    psi: DMatrix<f64>,
}

fn check_fock_dims(modes: usize, n_max: usize) -> Result<()> {
    if n_max > MAX_FOCK_LEVEL {
        return Err(Error::Dimension {
            dim: n_max,
            limit: MAX_FOCK_LEVEL,
        });
    }
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::Dimension {
            dim: modes,
            limit: MAX_MODES,
        });
    }
    Ok(())
}

fn multi_index(mut idx: usize, base: usize, modes: usize) -> Vec<usize> {
    let mut out = vec![0; modes];
    for m in (0..modes).rev() {
        out[m] = idx % base;
        idx /= base;
    }
    out
}

impl TruncatedSqueezedState {
    pub fn new(omegas: &[f64], a: f64, n_max: usize) -> Result<Self> {
        check_fock_dims(omegas.len(), n_max)?;
        if !(a > 0.0) {
            return Err(Error::domain("acceleration must be positive"));
        }
        if let Some(w) = omegas.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::domain(format!("mode frequency must be positive, got {w}")));
        }
        let modes = omegas.len();
        let base = n_max + 1;
        let dim = base.pow(modes as u32);
        let weights: Vec<Vec<f64>> = omegas.iter().map(|&w| squeeze_weights(w, a, n_max)).collect();
        let mut psi = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let n = multi_index(i, base, modes);
            psi[(i, i)] = n.iter().enumerate().map(|(m, &k)| weights[m][k]).product();
        }
        let norm = psi.norm();
        psi /= norm;
        Ok(TruncatedSqueezedState {
            a,
            omegas: omegas.to_vec(),
            n_max,
            psi,
        })
    }

    pub fn modes(&self) -> usize {
        self.omegas.len()
    }

    /// Dimension of the right (or left) factor.
    pub fn side_dim(&self) -> usize {
        self.psi.ncols()
    }

    /// Amplitude of |l⟩_L |r⟩_R for multi-indices given as flat indices.
    pub fn amplitude(&self, left: usize, right: usize) -> f64 {
        self.psi[(left, right)]
    }

    /// ρ_R = Tr_L |ψ⟩⟨ψ|.
    pub fn right_reduced_state(&self) -> DMatrix<f64> {
        self.psi.transpose() * &self.psi
    }

    /// Occupation probabilities of one right mode.
    pub fn right_marginal(&self, mode: usize) -> Vec<f64> {
        let rho = self.right_reduced_state();
        let base = self.n_max + 1;
        let mut p = vec![0.0; base];
        for i in 0..rho.nrows() {
            p[multi_index(i, base, self.modes())[mode]] += rho[(i, i)];
        }
        p
    }
}

/// Normalised amplitudes e^{−πnω/a}, n = 0..=n_max.
pub fn squeeze_weights(omega: f64, a: f64, n_max: usize) -> Vec<f64> {
    let q = (-std::f64::consts::PI * omega / a).exp();
    let raw: Vec<f64> = (0..=n_max).map(|n| q.powi(n as i32)).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.into_iter().map(|x| x / norm).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeReport {
    /// Largest |ρ_R(i, j)| with i ≠ j.
    pub max_offdiag: f64,
    /// Largest relative deviation of p(n+1)/p(n) from e^{−2πω/a}, over modes.
    pub max_ratio_deviation: f64,
    pub trace_defect: f64,
    pub occupation: Vec<f64>,
    pub planck: Vec<f64>,
    /// Bound on |occupation − planck| from the truncation.
    pub tail_bound: Vec<f64>,
}

impl SqueezeReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_offdiag <= tol
            && self.max_ratio_deviation <= tol
            && self.trace_defect <= tol
            && self
                .occupation
                .iter()
                .zip(&self.planck)
                .zip(&self.tail_bound)
                .all(|((o, p), b)| (o - p).abs() <= b + tol * p)
    }
}

/// Traces out the left modes explicitly and compares with the thermal state.
pub fn squeezed_vacuum_check(state: &TruncatedSqueezedState) -> SqueezeReport {
    let rho = state.right_reduced_state();
    let mut max_offdiag: f64 = 0.0;
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            if i != j {
                max_offdiag = max_offdiag.max(rho[(i, j)].abs());
            }
        }
    }
    let trace_defect = (rho.trace() - 1.0).abs();
    let mut max_ratio_deviation: f64 = 0.0;
    let (mut occupation, mut planck, mut tail_bound) = (vec![], vec![], vec![]);
    let nn = state.n_max as i32;
    for (m, &w) in state.omegas.iter().enumerate() {
        let p = state.right_marginal(m);
        let q = (-2.0 * std::f64::consts::PI * w / state.a).exp();
        for n in 0..state.n_max {
            max_ratio_deviation = max_ratio_deviation.max((p[n + 1] / p[n] / q - 1.0).abs());
        }
        occupation.push(p.iter().enumerate().map(|(n, x)| n as f64 * x).sum());
        let nbar = planck_number(w, state.a);
        planck.push(nbar);
        let qn = q.powi(nn + 1);
        let tail = qn * ((nn + 1) as f64 / (1.0 - q) + q / ((1.0 - q) * (1.0 - q)));
        tail_bound.push((tail * (1.0 - q) + nbar * qn) / (1.0 - qn));
    }
    SqueezeReport {
        max_offdiag,
        max_ratio_deviation,
        trace_defect,
        occupation,
        planck,
        tail_bound,
    }
}

/// Overlap of the two branches' purifying left states, Π(n) = Π₁ⁿ per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapKernel {
    pub single: Vec<f64>,
}

impl OverlapKernel {
    pub fn new(single: Vec<f64>) -> Result<Self> {
        if let Some(v) = single.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::domain(format!("overlap must lie in [0, 1], got {v}")));
        }
        Ok(OverlapKernel { single })
    }

    pub fn uniform(value: f64, modes: usize) -> Result<Self> {
        Self::new(vec![value; modes])
    }

    pub fn pi(&self, mode: usize, n: usize) -> f64 {
        self.single[mode].powi(n as i32)
    }
}

/// State of the control qubit ⊗ right modes, row index = control·dim + fock.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub matrix: DMatrix<C>,
    pub fock_dim: usize,
}

impl ReducedState {
    pub fn trace(&self) -> C {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * C::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Tr over the control qubit.
    pub fn fock_marginal(&self) -> DMatrix<C> {
        let d = self.fock_dim;
        self.matrix.view((0, 0), (d, d)) + self.matrix.view((d, d), (d, d))
    }

    /// Tr over the field modes.
    pub fn control_state(&self) -> Matrix2<C> {
        let d = self.fock_dim;
        let mut m = Matrix2::zeros();
        for j in 0..2 {
            for l in 0..2 {
                m[(j, l)] = self.matrix.view((j * d, l * d), (d, d)).trace();
            }
        }
        m
    }
}

/// Reduced state of control ⊗ right modes after tracing the purifying left
/// modes of two superposed wedges. Diagonal blocks are the thermal ρ_R; the
/// coherence blocks carry Π(n) on each Fock level. Renormalised to unit trace.
pub fn conditional_reduced_state(
    state: &TruncatedSqueezedState,
    kernel: &OverlapKernel,
    control: [C; 2],
) -> Result<ReducedState> {
    check_normalized(&control, "control")?;
    if kernel.single.len() != state.modes() {
        return Err(Error::domain(format!(
            "kernel has {} modes, state has {}",
            kernel.single.len(),
            state.modes()
        )));
    }
    let rho = state.right_reduced_state();
    let d = rho.nrows();
    let base = state.n_max + 1;
    let pis: Vec<f64> = (0..d)
        .map(|i| {
            multi_index(i, base, state.modes())
                .iter()
                .enumerate()
                .map(|(m, &n)| kernel.pi(m, n))
                .product()
        })
        .collect();
    let mut out = DMatrix::<C>::zeros(2 * d, 2 * d);
    for j in 0..2 {
        for l in 0..2 {
            let c = control[j] * control[l].conj();
            for r in 0..d {
                for s in 0..d {
                    let w = if j == l { 1.0 } else { (pis[r] * pis[s]).sqrt() };
                    out[(j * d + r, l * d + s)] = c * rho[(r, s)] * w;
                }
            }
        }
    }
    let tr = out.trace();
    if tr.norm() == 0.0 {
        return Err(Error::domain("reduced state has zero trace"));
    }
    out /= tr;
    Ok(ReducedState { matrix: out, fock_dim: d })
}
