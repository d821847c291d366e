//! Rindler wedges: coordinates, Bogoliubov coefficients against Minkowski left
//! movers, the Planck spectrum and the shifted-wedge cross term.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::oscint::{At, ModeFunction, Spectral, Support};
use crate::specfun::{cgamma, ln_cgamma};
use crate::{Error, Result};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Right,
    Left,
}

/// A Rindler wedge with proper acceleration `a`. The apex sits at V = −s/a
/// (`null_shift` = s); `transverse_shift` = (Δy, Δz) only matters in 3+1 dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeSpec {
    pub a: f64,
    pub side: Side,
    pub null_shift: f64,
    pub transverse_shift: (f64, f64),
}

impl WedgeSpec {
    pub fn new(a: f64, side: Side) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("acceleration a must be positive, got {a}")));
        }
        Ok(WedgeSpec {
            a,
            side,
            null_shift: 0.0,
            transverse_shift: (0.0, 0.0),
        })
    }

    pub fn right(a: f64) -> Result<Self> {
        Self::new(a, Side::Right)
    }

    pub fn left(a: f64) -> Result<Self> {
        Self::new(a, Side::Left)
    }

    pub fn shifted(mut self, s: f64) -> Self {
        self.null_shift = s;
        self
    }

    pub fn transverse(mut self, dy: f64, dz: f64) -> Self {
        self.transverse_shift = (dy, dz);
        self
    }

    /// Apex position in V.
    pub fn apex(&self) -> f64 {
        -self.null_shift / self.a
    }

    pub fn support(&self) -> Support {
        match self.side {
            Side::Right => Support::above(self.apex()),
            Side::Left => Support::below(self.apex()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair {
    pub alpha: C,
    pub beta: C,
    pub omega: f64,
    pub k: f64,
    pub provenance: Provenance,
}

/// Minkowski (t, x) of the right-wedge point (τ, ξ).
pub fn rindler_coords(tau: f64, xi: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::domain("acceleration a must be positive"));
    }
    let r = (a * xi).exp() / a;
    Ok((r * (a * tau).sinh(), r * (a * tau).cosh()))
}

/// Left-wedge counterpart: both coordinates negated.
pub fn rindler_coords_left(tau: f64, xi: f64, a: f64) -> Result<(f64, f64)> {
    let (t, x) = rindler_coords(tau, xi, a)?;
    Ok((-t, -x))
}

/// Planck occupation 1/(e^{2πω/a} − 1).
pub fn planck_number(omega: f64, a: f64) -> f64 {
    1.0 / (2.0 * PI * omega / a).exp_m1()
}

fn check_freqs(omega: f64, k: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!("omega must be positive, got {omega}")));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("k must be positive, got {k}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Alpha,
    Beta,
}

/// Coefficient of the wedge as amp(ω)·k^{−1/2}·k^{rate}·e^{iks/a}.
///
/// Right wedge: α = −i e^{πΩ/2} Γ(1+iΩ) (k/a)^{−iΩ} / (2π√(ωk)),
///              β = −i e^{−πΩ/2} Γ(1−iΩ) (k/a)^{iΩ} / (2π√(ωk)).
/// Left wedge: complex conjugates of these at real k.
fn separable(wedge: &WedgeSpec, which: Coefficient, omega: f64) -> (C, C) {
    let om = omega / wedge.a;
    let ln_a = wedge.a.ln();
    let (sgn, rate_r) = match which {
        Coefficient::Alpha => (1.0, C::new(0.0, -om)),
        Coefficient::Beta => (-1.0, C::new(0.0, om)),
    };
    let lg = ln_cgamma(C::new(1.0, sgn * om)).expect("Γ(1 ± iΩ) has no poles");
    let amp_r = -I * (lg + sgn * PI * om / 2.0 - rate_r * ln_a).exp() / (2.0 * PI * omega.sqrt());
    match wedge.side {
        Side::Right => (amp_r, rate_r),
        Side::Left => (amp_r.conj(), rate_r.conj()),
    }
}

/// Closed-form (α, β) of a left-moving Rindler mode against the plane wave u_k.
pub fn rindler_alpha_beta(omega: f64, k: f64, wedge: &WedgeSpec) -> Result<BogoliubovPair> {
    check_freqs(omega, k)?;
    let eval = |which| {
        let (amp, rate) = separable(wedge, which, omega);
        let lk = k.ln();
        amp * (rate * lk - 0.5 * lk).exp() * C::new(0.0, k * wedge.null_shift / wedge.a).exp()
    };
    Ok(BogoliubovPair {
        alpha: eval(Coefficient::Alpha),
        beta: eval(Coefficient::Beta),
        omega,
        k,
        provenance: Provenance::ClosedForm,
    })
}

/// A wedge coefficient as a k-kernel for packet-smeared overlaps.
#[derive(Debug, Clone, Copy)]
pub struct RindlerKernel {
    pub wedge: WedgeSpec,
    pub which: Coefficient,
}

impl Spectral for RindlerKernel {
    fn reduced(&self, omega: f64, ln_k: C) -> C {
        let (amp, rate) = separable(&self.wedge, self.which, omega);
        amp * (rate * ln_k).exp()
    }

    fn phase(&self) -> f64 {
        self.wedge.null_shift / self.wedge.a
    }

    fn separable(&self, omega: f64) -> Option<(C, C)> {
        Some(separable(&self.wedge, self.which, omega))
    }
}

/// The normalised mode g_ω of the wedge as a function of V:
/// right (aV + s)^{−iΩ}/√(4πω) for V > −s/a, left (−aV − s)^{iΩ}/√(4πω) for V < −s/a.
pub fn rindler_mode(omega: f64, wedge: &WedgeSpec) -> Result<ModeFunction> {
    check_freqs(omega, 1.0)?;
    let om = omega / wedge.a;
    let a = wedge.a;
    let norm = 1.0 / (4.0 * PI * omega).sqrt();
    let support = wedge.support();
    let label = format!("g_{omega}^{:?}(s={})", wedge.side, wedge.null_shift);
    let mode = match wedge.side {
        Side::Right => ModeFunction::new(
            label,
            support,
            Arc::new(move |at: At| norm * (-I * om * (a * at.from_lo).ln()).exp()),
            Arc::new(move |at: At| -I * om / at.from_lo * norm * (-I * om * (a * at.from_lo).ln()).exp()),
        ),
        Side::Left => ModeFunction::new(
            label,
            support,
            Arc::new(move |at: At| norm * (I * om * (a * at.to_hi).ln()).exp()),
            Arc::new(move |at: At| -I * om / at.to_hi * norm * (I * om * (a * at.to_hi).ln()).exp()),
        ),
    };
    Ok(mode)
}

/// Which printed form of the shifted-wedge cross term to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CrossTermForm {
    /// Λ s^{iμ} e^{πμ/2} Γ(−iμ), Λ = e^{−π(Ω+Ω′)/2} Γ(1+iΩ) Γ(1−iΩ′) / (4π² a √(ΩΩ′)).
    #[default]
    MainText,
    /// Λ′ (s/a)^{iμ} e^{πμ} Γ(−iμ), Λ′ = e^{−π(Ω+Ω′)/2} Γ(1+iΩ) Γ(1−iΩ′) (1/a)^{−iμ} / (2π√(ΩΩ′)).
    Appendix,
}

/// ∫dk β^{R*}_{ωk} β^{R′}_{ω′k} between a right wedge and the right wedge whose
/// apex is moved to V = −s/a, as a function of ω ≠ ω′ (μ = (ω − ω′)/a).
/// Negative s places the second apex on the other side.
pub fn cross_term_rr_shifted(omega: f64, omega_prime: f64, a: f64, s: f64, form: CrossTermForm) -> Result<C> {
    check_freqs(omega, omega_prime)?;
    if !(a > 0.0) {
        return Err(Error::domain("acceleration a must be positive"));
    }
    if s == 0.0 || !s.is_finite() {
        return Err(Error::domain("shift s must be finite and nonzero; s = 0 is the distributional diagonal"));
    }
    let (om, omp) = (omega / a, omega_prime / a);
    let mu = om - omp;
    if mu.abs() < 1e-12 * om.max(omp) {
        return Err(Error::Degenerate { omega });
    }
    let lg = ln_cgamma(C::new(1.0, om))? + ln_cgamma(C::new(1.0, -omp))? - PI * (om + omp) / 2.0;
    let g_mu = cgamma(C::new(0.0, -mu))?;
    let value = match form {
        CrossTermForm::MainText => {
            let pre = lg.exp() / (4.0 * PI * PI * a * (om * omp).sqrt());
            let sgn = s.signum();
            pre * (I * mu * s.abs().ln()).exp() * (sgn * PI * mu / 2.0).exp() * g_mu
        }
        CrossTermForm::Appendix => {
            let pre = lg.exp() / (2.0 * PI * (om * omp).sqrt()) * (I * mu * a.ln()).exp();
            pre * (I * mu * (s / a).ln()).exp() * (PI * mu).exp() * g_mu
        }
    };
    Ok(value)
}

/// Cross term between a right and a left wedge sharing their apex. The overlap
/// ∫dk β^{R*}β^{L} carries δ(Ω + Ω′), which never fires for positive frequencies.
pub fn cross_term_antiparallel(omega: f64, omega_prime: f64, a: f64) -> Result<C> {
    check_freqs(omega, omega_prime)?;
    if !(a > 0.0) {
        return Err(Error::domain("acceleration a must be positive"));
    }
    Ok(C::new(0.0, 0.0))
}

/// Phase of an in-plane translation in 3+1 dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InPlanePhase {
    /// e^{∓i(k₀ − k_z)s/2a}, as printed.
    #[default]
    Printed,
    /// e^{∓i(k₀ − k_x)s/2a}, the light-cone momentum along the direction of motion.
    LightCone,
}

/// e^{πΩ/2}/√sinh(πΩ) and e^{−πΩ/2}/√sinh(πΩ), overflow-free.
fn thermal_weights(om: f64) -> (f64, f64) {
    let w = (2.0 / -(-2.0 * PI * om).exp_m1()).sqrt();
    (w, w * (-PI * om).exp())
}

fn rapidity_power(omega: f64, kx: f64, kperp: f64, a: f64) -> Result<(f64, C)> {
    if !(kperp >= 0.0) {
        return Err(Error::domain("k_perp must be non-negative"));
    }
    let k0 = kx.hypot(kperp);
    if !(k0 > 0.0) {
        return Err(Error::domain("k0 = sqrt(kx^2 + kperp^2) must be positive"));
    }
    if kperp == 0.0 {
        return Err(Error::domain("k_perp = 0 makes (k0 + kx)/(k0 - kx) singular"));
    }
    // ln((k0 + kx)/(k0 − kx)) = 2 asinh(kx/kperp)
    let y = (kx / kperp).asinh();
    let om = omega / a;
    Ok((k0, C::new(0.0, -om * y).exp()))
}

/// (3+1)D right-wedge coefficients at transverse momentum magnitude k_⊥:
/// α = e^{πΩ/2} ((k₀+k_x)/(k₀−k_x))^{−iΩ/2} / √(4πk₀ a sinh πΩ), β = −e^{−πΩ}·(same with e^{−πΩ/2}).
pub fn bogoliubov_3p1(omega: f64, kx: f64, kperp: f64, a: f64) -> Result<BogoliubovPair> {
    check_freqs(omega, 1.0)?;
    if !(a > 0.0) {
        return Err(Error::domain("acceleration a must be positive"));
    }
    let (k0, pw) = rapidity_power(omega, kx, kperp, a)?;
    let (wa, wb) = thermal_weights(omega / a);
    let base = 1.0 / (4.0 * PI * k0 * a).sqrt();
    Ok(BogoliubovPair {
        alpha: pw * (wa * base),
        beta: -pw * (wb * base),
        omega,
        k: k0,
        provenance: Provenance::ClosedForm,
    })
}

/// Left-wedge (3+1)D coefficients, the mirror image x → −x of the right wedge:
/// ((k₀−k_x)/(k₀+k_x))^{−iΩ/2} in place of ((k₀+k_x)/(k₀−k_x))^{−iΩ/2}.
pub fn bogoliubov_3p1_left(omega: f64, kx: f64, kperp: f64, a: f64) -> Result<BogoliubovPair> {
    check_freqs(omega, 1.0)?;
    if !(a > 0.0) {
        return Err(Error::domain("acceleration a must be positive"));
    }
    let (k0, pw) = rapidity_power(omega, kx, kperp, a)?;
    let (wa, wb) = thermal_weights(omega / a);
    let base = 1.0 / (4.0 * PI * k0 * a).sqrt();
    let pw = pw.conj();
    Ok(BogoliubovPair {
        alpha: pw * (wa * base),
        beta: -pw * (wb * base),
        omega,
        k: k0,
        provenance: Provenance::ClosedForm,
    })
}

/// (3+1)D coefficients of a translated wedge at momentum (k_x, k_y, k_z).
///
/// A transverse offset (Δy, Δz) contributes the common phase e^{−i(k_yΔy + k_zΔz)},
/// returned separately so that spectra can cancel it exactly. An in-plane shift s
/// multiplies α by e^{−iθ} and β by e^{+iθ}, θ = (k₀ − k_z)s/2a (printed) or
/// (k₀ − k_x)s/2a.
pub fn bogoliubov_3p1_wedge(
    omega: f64,
    kx: f64,
    ky: f64,
    kz: f64,
    wedge: &WedgeSpec,
    phase: InPlanePhase,
) -> Result<(BogoliubovPair, f64)> {
    let kperp = ky.hypot(kz);
    let mut pair = match wedge.side {
        Side::Right => bogoliubov_3p1(omega, kx, kperp, wedge.a)?,
        Side::Left => bogoliubov_3p1_left(omega, kx, kperp, wedge.a)?,
    };
    if wedge.null_shift != 0.0 {
        let k0 = pair.k;
        let kk = match phase {
            InPlanePhase::Printed => kz,
            InPlanePhase::LightCone => kx,
        };
        let theta = (k0 - kk) * wedge.null_shift / (2.0 * wedge.a);
        pair.alpha *= C::new(0.0, -theta).exp();
        pair.beta *= C::new(0.0, theta).exp();
    }
    let (dy, dz) = wedge.transverse_shift;
    let transverse = -(ky * dy + kz * dz);
    Ok((pair, transverse))
}

/// Report of the R ↔ L reflection check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionReport {
    /// max |α^R(k_x) − α^L(−k_x)|, |β^R(k_x) − β^L(−k_x)| relative to |α|.
    pub max_deviation: f64,
    /// |β^R/α^R + e^{−πω/a}|.
    pub ratio_deviation: f64,
}

pub fn left_right_relation_check(omega: f64, kx: f64, kperp: f64, a: f64) -> Result<ReflectionReport> {
    let r = bogoliubov_3p1(omega, kx, kperp, a)?;
    let l = bogoliubov_3p1_left(omega, -kx, kperp, a)?;
    let scale = r.alpha.norm();
    let dev = ((r.alpha - l.alpha).norm() / scale).max((r.beta - l.beta).norm() / scale);
    let ratio = (r.beta / r.alpha + (-PI * (omega / a)).exp()).norm();
    Ok(ReflectionReport {
        max_deviation: dev,
        ratio_deviation: ratio,
    })
}
