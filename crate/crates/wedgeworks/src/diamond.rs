//! Spacetime diamonds: coordinate maps, Bogoliubov coefficients, the diamond
//! temperature and the shifted-diamond cross term.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector4;
use num_complex::Complex64;

use crate::oscint::{diamond_shifted_double_integral, At, ModeFunction, Support, Wavepacket};
use crate::quad::{tanh_sinh, DeOptions};
use crate::rindler::{planck_number, BogoliubovPair, Provenance};
use crate::specfun::{gauss_2f1, kummer_m};
use crate::{Error, Result};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Diamond of lifetime 4/a, translated by 4n/a along V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondSpec {
    pub a: f64,
    pub n: i64,
}

impl DiamondSpec {
    pub fn new(a: f64, n: i64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("diamond scale a must be positive, got {a}")));
        }
        Ok(DiamondSpec { a, n })
    }

    pub fn zeroth(a: f64) -> Result<Self> {
        Self::new(a, 0)
    }

    pub fn center(&self) -> f64 {
        4.0 * self.n as f64 / self.a
    }

    pub fn lifetime(&self) -> f64 {
        4.0 / self.a
    }

    /// The V-interval covered by the diamond.
    pub fn support(&self) -> Support {
        let c = self.center();
        Support::interval(c - 2.0 / self.a, c + 2.0 / self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondCoords {
    pub eta: f64,
    pub xi: f64,
    pub zeta: f64,
    pub rho: f64,
}

/// f₊(t, r; a) = 1 − (at/2)² + (ar/2)² + ax.
pub fn f_plus(t: f64, x: f64, y: f64, z: f64, a: f64) -> f64 {
    let r2 = x * x + y * y + z * z;
    1.0 - (a * t / 2.0).powi(2) + a * a * r2 / 4.0 + a * x
}

/// f₋(t, r; a) = 1 − (at/2)² + (ar/2)² − ax.
pub fn f_minus(t: f64, x: f64, y: f64, z: f64, a: f64) -> f64 {
    let r2 = x * x + y * y + z * z;
    1.0 - (a * t / 2.0).powi(2) + a * a * r2 / 4.0 - a * x
}

fn check_a(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("diamond scale a must be positive, got {a}")));
    }
    Ok(())
}

fn inside(t: f64, x: f64, y: f64, z: f64, a: f64) -> bool {
    let r = (x * x + y * y + z * z).sqrt();
    t.abs() + r < 2.0 / a
}

fn forward(p: &Vector4<f64>, a: f64) -> Vector4<f64> {
    let (t, x, y, z) = (p[0], p[1], p[2], p[3]);
    let r2 = x * x + y * y + z * z;
    let g = 1.0 + (a * t / 2.0).powi(2) - a * a * r2 / 4.0;
    let fp = f_plus(t, x, y, z, a);
    let eta = (a * t / g).atanh() / a;
    let xi = 0.5 * ((g * g - (a * t).powi(2)) / (fp * fp)).ln() / a;
    Vector4::new(eta, xi, 2.0 * y / fp, 2.0 * z / fp)
}

/// Diamond coordinates (η, ξ, ζ, ρ) of a point inside the zeroth diamond.
pub fn minkowski_to_diamond(t: f64, x: f64, y: f64, z: f64, a: f64) -> Result<DiamondCoords> {
    check_a(a)?;
    if !inside(t, x, y, z, a) {
        return Err(Error::domain(format!("({t}, {x}, {y}, {z}) lies outside the diamond |t| + r < 2/a")));
    }
    let v = forward(&Vector4::new(t, x, y, z), a);
    Ok(DiamondCoords {
        eta: v[0],
        xi: v[1],
        zeta: v[2],
        rho: v[3],
    })
}

/// Inverse of [`minkowski_to_diamond`].
///
/// With g = 1 + (at/2)² − (ar/2)², the map Φ(t, r) = (2t, 2g/a, 2y, 2z)/f₊ is an
/// involution, and (η, ξ, ζ, ρ) are Rindler coordinates of Φ(t, r):
/// Φ = ((2/a)e^{aξ} sinh aη, (2/a)e^{aξ} cosh aη, ζ, ρ).
pub fn diamond_to_minkowski(c: &DiamondCoords, a: f64) -> Result<(f64, f64, f64, f64)> {
    check_a(a)?;
    let r = 2.0 / a * (a * c.xi).exp();
    let q = Vector4::new(r * (a * c.eta).sinh(), r * (a * c.eta).cosh(), c.zeta, c.rho);
    let p = involution(&q, a);
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::domain(format!("{c:?} has no preimage inside the diamond")));
    }
    Ok((p[0], p[1], p[2], p[3]))
}

fn involution(p: &Vector4<f64>, a: f64) -> Vector4<f64> {
    let (t, x, y, z) = (p[0], p[1], p[2], p[3]);
    let r2 = x * x + y * y + z * z;
    let g = 1.0 + (a * t / 2.0).powi(2) - a * a * r2 / 4.0;
    let fp = f_plus(t, x, y, z, a);
    Vector4::new(2.0 * t / fp, 2.0 / a * g / fp, 2.0 * y / fp, 2.0 * z / fp)
}

/// Minkowski time on the static worldline ξ = ζ = ρ = 0.
pub fn static_worldline_time(eta: f64, a: f64) -> f64 {
    2.0 / a * (a * eta / 2.0).tanh()
}

/// Conformal map of the diamond onto a Rindler wedge.
pub fn conformal_map(t: f64, x: f64, y: f64, z: f64, a: f64) -> Result<(f64, f64, f64, f64)> {
    check_a(a)?;
    let fm = f_minus(t, x, y, z, a);
    if fm == 0.0 || !fm.is_finite() {
        return Err(Error::domain(format!("conformal map is singular where f- = 0 ({t}, {x}, {y}, {z})")));
    }
    let r2 = x * x + y * y + z * z;
    let g = 1.0 + (a * t / 2.0).powi(2) - a * a * r2 / 4.0;
    Ok((2.0 * t / fm, 2.0 / a * g / fm, 2.0 * y / fm, 2.0 * z / fm))
}

/// Factor f₊²(x′)/4 with η(dx′, dx′) = (f₊²/4) η(dx, dx).
pub fn conformal_factor(tp: f64, xp: f64, yp: f64, zp: f64, a: f64) -> f64 {
    f_plus(tp, xp, yp, zp, a).powi(2) / 4.0
}

/// Diamond temperature occupation, identical in form to the Unruh result.
pub fn diamond_planck_number(omega: f64, a: f64) -> f64 {
    planck_number(omega, a)
}

/// Phase pair attached to the nth diamond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ShiftConvention {
    /// α e^{−4iκn}, β e^{+4iκn}.
    #[default]
    Printed,
    /// Both e^{−4iκn}, the convention with β conjugated as for Rindler wedges.
    CommonPhase,
}

impl ShiftConvention {
    /// Sign entering the oracle kernel (s − s′ − 2·sign·n)^{−2}.
    pub fn kernel_sign(self) -> f64 {
        match self {
            ShiftConvention::Printed => 1.0,
            ShiftConvention::CommonPhase => -1.0,
        }
    }

    fn phases(self, kappa: f64, n: i64) -> (C, C) {
        let th = 4.0 * kappa * n as f64;
        let a = C::new(0.0, -th).exp();
        match self {
            ShiftConvention::Printed => (a, a.conj()),
            ShiftConvention::CommonPhase => (a, a),
        }
    }
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

/// (2/a) √(Ωκ) / sinh(πΩ), overflow-free.
fn prefactor(om: f64, kappa: f64, a: f64) -> f64 {
    let e = (-PI * om).exp();
    2.0 / a * (om * kappa).sqrt() * 2.0 * e / -(-2.0 * PI * om).exp_m1()
}

/// Closed-form diamond coefficients:
/// α⁽⁰⁾ = (2/a)√(Ωκ)/sinh(πΩ) e^{2iκ} M(1+iΩ, 2, −4iκ),
/// β⁽⁰⁾ = −(2/a)√(Ωκ)/sinh(πΩ) e^{−2iκ} M(1+iΩ, 2, 4iκ),
/// with the nth diamond carrying the phases of `conv`.
pub fn diamond_alpha_beta(omega: f64, k: f64, spec: &DiamondSpec, conv: ShiftConvention) -> Result<BogoliubovPair> {
    check_freqs(omega, k)?;
    check_a(spec.a)?;
    let (om, kappa) = (omega / spec.a, k / spec.a);
    let pre = prefactor(om, kappa, spec.a);
    let b = C::new(1.0, om);
    let two = C::new(2.0, 0.0);
    let alpha0 = pre * C::new(0.0, 2.0 * kappa).exp() * kummer_m(b, two, C::new(0.0, -4.0 * kappa))?;
    let beta0 = -pre * C::new(0.0, -2.0 * kappa).exp() * kummer_m(b, two, C::new(0.0, 4.0 * kappa))?;
    let (pa, pb) = conv.phases(kappa, spec.n);
    Ok(BogoliubovPair {
        alpha: alpha0 * pa,
        beta: beta0 * pb,
        omega,
        k,
        provenance: Provenance::ClosedForm,
    })
}

/// Integral-form coefficients, ±(1/πa)√(κ/Ω) ∫₋₁¹ ((1+s)/(1−s))^{iΩ} e^{∓2iκs} ds,
/// by tanh-sinh quadrature. The integral is e^{−πΩ} smaller than its integrand, so
/// about πΩ/ln 10 digits are lost; it serves as an oracle for moderate Ω only.
pub fn diamond_alpha_beta_integral(
    omega: f64,
    k: f64,
    spec: &DiamondSpec,
    conv: ShiftConvention,
) -> Result<BogoliubovPair> {
    check_freqs(omega, k)?;
    check_a(spec.a)?;
    let (om, kappa) = (omega / spec.a, k / spec.a);
    let pre = (kappa / om).sqrt() / (PI * spec.a);
    let opts = DeOptions {
        tol: 1e-13,
        max_level: 12,
        t_max: 5.0,
        abs_tol: 1e-14,
    };
    let int = |sgn: f64| {
        tanh_sinh(
            |s, lo, hi| (I * om * (lo.ln() - hi.ln()) + I * sgn * 2.0 * kappa * s).exp(),
            -1.0,
            1.0,
            opts,
        )
    };
    let alpha0 = pre * int(-1.0)?.value;
    let beta0 = -pre * int(1.0)?.value;
    let (pa, pb) = conv.phases(kappa, spec.n);
    Ok(BogoliubovPair {
        alpha: alpha0 * pa,
        beta: beta0 * pb,
        omega,
        k,
        provenance: Provenance::Quadrature,
    })
}

/// Interior mode ((1 + aṼ/2)/(1 − aṼ/2))^{−iΩ}/√(4πω), Ṽ = V − 4n/a.
pub fn diamond_mode(omega: f64, spec: &DiamondSpec) -> Result<ModeFunction> {
    check_freqs(omega, 1.0)?;
    check_a(spec.a)?;
    let om = omega / spec.a;
    let h = spec.a / 2.0;
    let norm = 1.0 / (4.0 * PI * omega).sqrt();
    let val = move |at: At| norm * (-I * om * ((h * at.from_lo).ln() - (h * at.to_hi).ln())).exp();
    let der = move |at: At| -I * om * (1.0 / at.from_lo + 1.0 / at.to_hi) * val(at);
    Ok(ModeFunction::new(
        format!("g_{omega}^({})", spec.n),
        spec.support(),
        Arc::new(val),
        Arc::new(der),
    ))
}

/// One connected piece of the exterior region |Ṽ| > 2/a.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExteriorPiece {
    Future,
    Past,
}

/// Exterior mode ((aṼ/2 + 1)/(aṼ/2 − 1))^{iΩ}/√(4πω) restricted to one piece.
pub fn exterior_mode(omega: f64, spec: &DiamondSpec, piece: ExteriorPiece) -> Result<ModeFunction> {
    check_freqs(omega, 1.0)?;
    check_a(spec.a)?;
    let om = omega / spec.a;
    let a = spec.a;
    let h = a / 2.0;
    let norm = 1.0 / (4.0 * PI * omega).sqrt();
    let c = spec.center();
    let mode = match piece {
        ExteriorPiece::Future => {
            // aṼ/2 − 1 = h·(V − lo), aṼ/2 + 1 = h·(V − lo) + 2
            let val = move |at: At| {
                let d = h * at.from_lo;
                norm * (I * om * ((d + 2.0).ln() - d.ln())).exp()
            };
            let der = move |at: At| {
                let d = h * at.from_lo;
                -I * om * a / (d * (d + 2.0)) * val(at)
            };
            ModeFunction::new(
                format!("g_{omega}^(ex+)"),
                Support::above(c + 2.0 / spec.a),
                Arc::new(val),
                Arc::new(der),
            )
        }
        ExteriorPiece::Past => {
            // aṼ/2 + 1 = −h·(hi − V), aṼ/2 − 1 = −h·(hi − V) − 2
            let val = move |at: At| {
                let d = h * at.to_hi;
                norm * (I * om * (d.ln() - (d + 2.0).ln())).exp()
            };
            let der = move |at: At| {
                let d = h * at.to_hi;
                -I * om * a / (d * (d + 2.0)) * val(at)
            };
            ModeFunction::new(
                format!("g_{omega}^(ex-)"),
                Support::below(c - 2.0 / spec.a),
                Arc::new(val),
                Arc::new(der),
            )
        }
    };
    Ok(mode)
}

/// How [`cross_term_diamond`] evaluates the overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DiamondCrossForm {
    /// Packet-smeared double-integral oracle, divided by the packet areas.
    #[default]
    Quadrature,
    /// The printed hypergeometric closed form.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondCrossOptions {
    pub form: DiamondCrossForm,
    pub shift: ShiftConvention,
    /// Packet width relative to its centre for the quadrature form.
    pub relative_width: f64,
}

impl Default for DiamondCrossOptions {
    fn default() -> Self {
        DiamondCrossOptions {
            form: DiamondCrossForm::Quadrature,
            shift: ShiftConvention::Printed,
            relative_width: 0.02,
        }
    }
}

/// ∫dk β⁽⁰⁾*_{ωk} β⁽ⁿ⁾_{ω′k} for n ≥ 1, ω ≠ ω′.
///
/// The k-integral is only conditionally convergent, so the canonical value is
/// the packet-smeared oracle divided by ∫P₁ ∫P₂ for narrow packets at ω, ω′.
pub fn cross_term_diamond(omega: f64, omega_prime: f64, a: f64, n: u32, opts: &DiamondCrossOptions) -> Result<C> {
    check_freqs(omega, omega_prime)?;
    check_a(a)?;
    if n == 0 {
        return Err(Error::domain("cross term needs n >= 1; n = 0 is the diagonal occupation"));
    }
    if (omega - omega_prime).abs() < 1e-12 * omega.max(omega_prime) {
        return Err(Error::Degenerate { omega });
    }
    match opts.form {
        DiamondCrossForm::Printed => cross_term_diamond_printed(omega, omega_prime, a, n),
        DiamondCrossForm::Quadrature => {
            let p1 = Wavepacket::new(omega, opts.relative_width * omega)?;
            let p2 = Wavepacket::new(omega_prime, opts.relative_width * omega_prime)?;
            let est = diamond_shifted_double_integral(&p1, &p2, a, n, opts.shift.kernel_sign())?;
            let area = |p: &Wavepacket| p.nodes().iter().map(|x| x.1).sum::<f64>();
            Ok(est.value / (area(&p1) * area(&p2)))
        }
    }
}

/// The printed closed form Λ (α−1)^{iΩ−1} (α+1)^{−1−iΩ′} F(1−iΩ, 1+iΩ′; 2; −(α−1)^{−1}(−α+1)^{−1})
/// with α = −(2i/a)(1+2n), Λ = (4/a³) √(ΩΩ′) α^{−i(Ω−Ω′)} / (sinh πΩ sinh πΩ′), principal branches.
pub fn cross_term_diamond_printed(omega: f64, omega_prime: f64, a: f64, n: u32) -> Result<C> {
    check_freqs(omega, omega_prime)?;
    check_a(a)?;
    let (om, omp) = (omega / a, omega_prime / a);
    let al = C::new(0.0, -2.0 / a * (1.0 + 2.0 * n as f64));
    let one = C::new(1.0, 0.0);
    let sh = |x: f64| 2.0 * (-PI * x).exp() / -(-2.0 * PI * x).exp_m1();
    let lam = 4.0 / a.powi(3) * (om * omp).sqrt() * sh(om) * sh(omp) * (-I * (om - omp) * al.ln()).exp();
    let p1 = ((C::new(-1.0, om)) * (al - one).ln()).exp();
    let p2 = ((C::new(-1.0, -omp)) * (al + one).ln()).exp();
    let z = -one / ((al - one) * (-al + one));
    let f = gauss_2f1(C::new(1.0, -om), C::new(1.0, omp), C::new(2.0, 0.0), z)?;
    Ok(lam * p1 * p2 * f)
}
