//! Brute-force oracles: Klein–Gordon inner products of null-coordinate modes,
//! iε-regularised oscillatory integrals and Gaussian-packet smearing of
//! distributional overlaps.
//!
//! Every closed form elsewhere in the crate is checked against these routines.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use num_complex::Complex64;

use crate::quad::{exp_sinh, gl_adaptive, tanh_sinh, DeOptions, Estimate, GaussLegendre};
use crate::{Error, Result};

type C = Complex64;

const I: C = C::new(0.0, 1.0);
const ZERO: C = C::new(0.0, 0.0);

/// Quasi-monochromatic Gaussian packet P(ω) = exp(−(ω−ω₀)²/(4σ²)), cut at ±Kσ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavepacket {
    pub center: f64,
    pub width: f64,
}

/// Number of Gauss–Legendre nodes used across one packet.
pub const PACKET_NODES: usize = 128;

impl Wavepacket {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(center > 0.0) || !center.is_finite() {
            return Err(Error::domain(format!("packet center must be positive, got {center}")));
        }
        if !(width > 0.0) || width >= center / 5.0 {
            return Err(Error::PacketWidth {
                width,
                limit: center / 5.0,
            });
        }
        Ok(Wavepacket { center, width })
    }

    /// Half-width of the support in units of σ.
    pub fn cutoff(&self) -> f64 {
        (0.99 * self.center / self.width).min(10.0)
    }

    pub fn profile(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        if d.abs() > self.cutoff() * self.width {
            0.0
        } else {
            (-d * d / (4.0 * self.width * self.width)).exp()
        }
    }

    /// Quadrature nodes `(ω_j, w_j·P(ω_j))` across the support.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let gl = packet_rule();
        let half = self.cutoff() * self.width;
        gl.nodes
            .iter()
            .zip(&gl.weights)
            .map(|(x, w)| {
                let om = self.center + half * x;
                (om, w * half * self.profile(om))
            })
            .collect()
    }

    /// ∫|P(ω)|² dω over the truncated support.
    pub fn norm(&self) -> f64 {
        let gl = packet_rule();
        let half = self.cutoff() * self.width;
        gl.nodes
            .iter()
            .zip(&gl.weights)
            .map(|(x, w)| w * half * self.profile(self.center + half * x).powi(2))
            .sum()
    }

    /// Untruncated Gaussian norm σ√(2π).
    pub fn analytic_norm(&self) -> f64 {
        self.width * (2.0 * PI).sqrt()
    }

    /// ∫|P|² f(ω) dω / ∫|P|², the packet average of `f`.
    pub fn average<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let gl = packet_rule();
        let half = self.cutoff() * self.width;
        let mut num = 0.0;
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let om = self.center + half * x;
            num += w * half * self.profile(om).powi(2) * f(om);
        }
        num / self.norm()
    }
}

fn packet_rule() -> &'static GaussLegendre {
    static RULE: std::sync::OnceLock<GaussLegendre> = std::sync::OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PACKET_NODES))
}

/// Regulator settings for unbounded or distributional integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegulatorParams {
    pub epsilon: f64,
    pub k_max: f64,
    pub extrapolation_levels: usize,
    pub tol: f64,
}

impl Default for RegulatorParams {
    fn default() -> Self {
        RegulatorParams {
            epsilon: 1e-3,
            k_max: 1e3,
            extrapolation_levels: 3,
            tol: 1e-10,
        }
    }
}

impl RegulatorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::domain("epsilon must be positive"));
        }
        if !(self.k_max > 0.0) {
            return Err(Error::domain("k_max must be positive"));
        }
        if self.extrapolation_levels < 2 {
            return Err(Error::domain("extrapolation_levels must be at least 2"));
        }
        Ok(())
    }
}

/// Support of a mode in V: the open interval (lo, hi), either end possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn all() -> Self {
        Support {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }
    pub fn above(x: f64) -> Self {
        Support {
            lo: x,
            hi: f64::INFINITY,
        }
    }
    pub fn below(x: f64) -> Self {
        Support {
            lo: f64::NEG_INFINITY,
            hi: x,
        }
    }
    pub fn interval(lo: f64, hi: f64) -> Self {
        Support { lo, hi }
    }
    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }
    pub fn intersect(&self, o: &Support) -> Support {
        Support {
            lo: self.lo.max(o.lo),
            hi: self.hi.min(o.hi),
        }
    }
}

/// Evaluation point handed to a mode: V itself plus the exact offsets V − lo and
/// hi − V from the mode's own support ends (infinite ends give NaN offsets).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct At {
    pub v: C,
    pub from_lo: C,
    pub to_hi: C,
}

impl At {
    pub fn real(v: f64, support: &Support) -> At {
        At {
            v: C::new(v, 0.0),
            from_lo: C::new(v - support.lo, 0.0),
            to_hi: C::new(support.hi - v, 0.0),
        }
    }

    fn conj(self) -> At {
        At {
            v: self.v.conj(),
            from_lo: self.from_lo.conj(),
            to_hi: self.to_hi.conj(),
        }
    }
}

pub type ModeEval = Arc<dyn Fn(At) -> C + Send + Sync>;

/// A left-moving mode f(V) with its V-derivative.
#[derive(Clone)]
pub struct ModeFunction {
    pub label: String,
    pub support: Support,
    /// True when the closures continue analytically off the real axis, which
    /// allows contour rotation on half-lines.
    pub analytic: bool,
    value: ModeEval,
    derivative: ModeEval,
}

impl std::fmt::Debug for ModeFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeFunction")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("analytic", &self.analytic)
            .finish()
    }
}

impl ModeFunction {
    pub fn new(label: impl Into<String>, support: Support, value: ModeEval, derivative: ModeEval) -> Self {
        ModeFunction {
            label: label.into(),
            support,
            analytic: true,
            value,
            derivative,
        }
    }

    /// Mark the closures as valid on the real axis only.
    pub fn non_analytic(mut self) -> Self {
        self.analytic = false;
        self
    }

    pub fn value(&self, at: At) -> C {
        (self.value)(at)
    }

    pub fn derivative(&self, at: At) -> C {
        (self.derivative)(at)
    }

    /// The mode multiplied by a constant.
    pub fn scaled(&self, factor: C) -> ModeFunction {
        let (v, d) = (self.value.clone(), self.derivative.clone());
        ModeFunction {
            label: format!("{} * {}", factor, self.label),
            support: self.support,
            analytic: self.analytic,
            value: Arc::new(move |at| factor * v(at)),
            derivative: Arc::new(move |at| factor * d(at)),
        }
    }

    /// Complex conjugate mode f*(V), continued off the axis by Schwarz reflection.
    pub fn conjugate(&self) -> ModeFunction {
        let (v, d) = (self.value.clone(), self.derivative.clone());
        ModeFunction {
            label: format!("conj({})", self.label),
            support: self.support,
            analytic: self.analytic,
            value: Arc::new(move |at: At| v(at.conj()).conj()),
            derivative: Arc::new(move |at: At| d(at.conj()).conj()),
        }
    }

    /// Minkowski plane wave u_k(V) = e^{−ikV}/√(4πk).
    pub fn plane_wave(k: f64) -> Result<ModeFunction> {
        if !(k > 0.0) {
            return Err(Error::domain(format!("plane-wave frequency must be positive, got {k}")));
        }
        let norm = 1.0 / (4.0 * PI * k).sqrt();
        Ok(ModeFunction::new(
            format!("u_{k}"),
            Support::all(),
            Arc::new(move |at: At| norm * (-I * k * at.v).exp()),
            Arc::new(move |at: At| -I * k * norm * (-I * k * at.v).exp()),
        ))
    }

    /// The mode restricted to a finite box, for normalisation growth checks.
    pub fn restricted(&self, support: Support) -> ModeFunction {
        let mut m = self.clone();
        let own = self.support;
        let (v, d) = (self.value.clone(), self.derivative.clone());
        let remap = move |at: At| At {
            v: at.v,
            from_lo: at.v - own.lo,
            to_hi: C::new(own.hi, 0.0) - at.v,
        };
        m.support = own.intersect(&support);
        m.value = Arc::new(move |at| v(remap(at)));
        m.derivative = Arc::new(move |at| d(remap(at)));
        m.label = format!("{}|[{}, {}]", self.label, support.lo, support.hi);
        m
    }
}

fn at_for(sup: &Support, common: &Support, v: C, from_lo: C, to_hi: C) -> At {
    At {
        v,
        from_lo: if sup.lo == common.lo { from_lo } else { v - sup.lo },
        to_hi: if sup.hi == common.hi { to_hi } else { C::new(sup.hi, 0.0) - v },
    }
}

/// How the inner product was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgMethod {
    Disjoint,
    FiniteInterval,
    RotatedContour,
    DampedRichardson,
}

/// Result of a Klein–Gordon inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KgProduct {
    pub value: C,
    pub error: f64,
    pub method: KgMethod,
}

/// Klein–Gordon product of left movers, ⟨f, g⟩ = 2i ∫ dV f*(V) ∂_V g(V).
pub fn kg_inner_product(f: &ModeFunction, g: &ModeFunction, reg: &RegulatorParams) -> Result<KgProduct> {
    reg.validate()?;
    let common = f.support.intersect(&g.support);
    if common.is_empty() {
        return Ok(KgProduct {
            value: ZERO,
            error: 0.0,
            method: KgMethod::Disjoint,
        });
    }
    let fs = f.support;
    let gs = g.support;
    let h = |v: C, from_lo: C, to_hi: C| -> C {
        let af = at_for(&fs, &common, v, from_lo, to_hi);
        let ag = at_for(&gs, &common, v, from_lo, to_hi);
        2.0 * I * f.value(af.conj()).conj() * g.derivative(ag)
    };
    let (lo, hi) = (common.lo, common.hi);
    if lo.is_finite() && hi.is_finite() {
        let (value, error) = finite_interval(&h, lo, hi, reg.tol)?;
        return Ok(KgProduct {
            value,
            error,
            method: KgMethod::FiniteInterval,
        });
    }
    if f.analytic && g.analytic {
        if let Some(r) = rotated(&h, lo, hi, reg.tol)? {
            return Ok(r);
        }
    }
    damped(&h, lo, hi, reg)
}

/// ∫_lo^hi h dV through V = mid + half·tanh u, with exact end offsets.
fn finite_interval<H>(h: &H, lo: f64, hi: f64, tol: f64) -> Result<(C, f64)>
where
    H: Fn(C, C, C) -> C,
{
    let half = 0.5 * (hi - lo);
    let f = |u: f64| {
        let e = (-2.0 * u.abs()).exp();
        let small = 2.0 * e / (1.0 + e);
        let big = 2.0 - small;
        let (dlo, dhi) = if u >= 0.0 { (half * big, half * small) } else { (half * small, half * big) };
        let v = if u >= 0.0 { hi - dhi } else { lo + dlo };
        // sech²u = 4e^{-2|u|}/(1+e^{-2|u|})²
        let w = half * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if w == 0.0 {
            return ZERO;
        }
        h(C::new(v, 0.0), C::new(dlo, 0.0), C::new(dhi, 0.0)) * w
    };
    let est = gl_adaptive(f, -19.0, 19.0, 64, tol.max(1e-14), 1e-300)?;
    Ok((est.value, est.error))
}

/// Rotate half-line tails onto V = x0 + i·d·t, d = ±1 chosen by where h decays.
fn rotated<H>(h: &H, lo: f64, hi: f64, tol: f64) -> Result<Option<KgProduct>>
where
    H: Fn(C, C, C) -> C,
{
    let probe = |x0: f64, d: f64| {
        let v = C::new(x0, 30.0 * d);
        let off = C::new(0.0, 30.0 * d);
        h(v, off, -off).norm()
    };
    let x0 = if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    };
    let (up, down) = (probe(x0, 1.0), probe(x0, -1.0));
    if !(up.is_finite() || down.is_finite()) || up == down {
        return Ok(None);
    }
    let d = if down < up || !up.is_finite() { -1.0 } else { 1.0 };
    let opts = DeOptions::with_tol(tol.max(1e-14));
    let mut value = ZERO;
    let mut error = 0.0;
    // ∫_{x0}^{∞} h dV = i d ∫_0^∞ h(x0 + i d t) dt
    if hi.is_infinite() {
        let est: Estimate = exp_sinh(
            |t| {
                let off = C::new(0.0, d * t);
                h(C::new(x0, 0.0) + off, off, C::new(f64::INFINITY, 0.0))
            },
            opts,
        )?;
        value += I * d * est.value;
        error += est.error;
    }
    // ∫_{-∞}^{x0} h dV = −i d ∫_0^∞ h(x0 + i d t) dt
    if lo.is_infinite() {
        let est: Estimate = exp_sinh(
            |t| {
                let off = C::new(0.0, d * t);
                h(C::new(x0, 0.0) + off, C::new(f64::INFINITY, 0.0), -off)
            },
            opts,
        )?;
        value -= I * d * est.value;
        error += est.error;
    }
    Ok(Some(KgProduct {
        value,
        error,
        method: KgMethod::RotatedContour,
    }))
}

/// Damp unbounded tails with e^{−ε|V−x0|} and Richardson-extrapolate ε → 0
/// over ε, ε/2, ε/4, ...
fn damped<H>(h: &H, lo: f64, hi: f64, reg: &RegulatorParams) -> Result<KgProduct>
where
    H: Fn(C, C, C) -> C,
{
    let x0 = if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    };
    let one_side = |eps: f64, dir: f64| -> Result<C> {
        let g = |t: f64| {
            let v = x0 + dir * t;
            let off = C::new(dir * t, 0.0);
            let val = if dir > 0.0 {
                h(C::new(v, 0.0), off, C::new(hi - v, 0.0))
            } else {
                h(C::new(v, 0.0), C::new(v - lo, 0.0), -off)
            };
            val * (-eps * t).exp()
        };
        let near = tanh_sinh(|t, _, _| g(t), 0.0, 1.0, DeOptions::with_tol(1e-13))?;
        let far_end = 40.0 / eps;
        let panels = ((far_end / 2.0).ceil() as usize).clamp(16, 1 << 16);
        let far = gl_adaptive(g, 1.0, far_end, panels, reg.tol.max(1e-13), 1e-300)?;
        Ok(near.value + far.value)
    };
    let levels = reg.extrapolation_levels;
    let mut table: Vec<C> = Vec::with_capacity(levels);
    for j in 0..levels {
        let eps = reg.epsilon / 2f64.powi(j as i32);
        let mut v = ZERO;
        if hi.is_infinite() {
            v += one_side(eps, 1.0)?;
        }
        if lo.is_infinite() {
            v += one_side(eps, -1.0)?;
        }
        table.push(v);
    }
    let (value, error) = richardson(&table);
    if error > 1e3 * reg.tol * value.norm().max(1e-300) && error > 1e-8 * value.norm() {
        return Err(Error::no_convergence("damped KG product extrapolation", error / value.norm(), reg.tol));
    }
    Ok(KgProduct {
        value,
        error,
        method: KgMethod::DampedRichardson,
    })
}

/// Richardson extrapolation of samples at step h, h/2, h/4, ... to h → 0,
/// assuming an expansion in integer powers of h. Returns (value, |last correction|).
pub fn richardson(samples: &[C]) -> (C, f64) {
    let mut t: Vec<C> = samples.to_vec();
    let n = t.len();
    let mut last = 0.0;
    for m in 1..n {
        let f = 2f64.powi(m as i32);
        for j in (m..n).rev() {
            let better = (f * t[j] - t[j - 1]) / (f - 1.0);
            if j == n - 1 {
                last = (better - t[j]).norm();
            }
            t[j] = better;
        }
    }
    (t[n - 1], last)
}

/// A Bogoliubov-type coefficient c(ω, k) written as k^{−1/2}·e^{iqk}·r(ω, ln k),
/// with `r` analytic in ln k. Working with ln k keeps power-law factors finite
/// over the hundreds of e-folds that narrow packets need.
pub trait Spectral: Sync {
    /// r(ω, ln k) for complex ln k.
    fn reduced(&self, omega: f64, ln_k: C) -> C;

    /// Plane-wave phase coefficient q.
    fn phase(&self) -> f64 {
        0.0
    }

    /// Separable form r = amp(ω)·exp(rate(ω)·ln k), when available.
    fn separable(&self, _omega: f64) -> Option<(C, C)> {
        None
    }
}

/// Closure-backed [`Spectral`] implementation.
pub struct ReducedFn<F> {
    pub f: F,
    pub q: f64,
}

impl<F: Fn(f64, C) -> C + Sync> Spectral for ReducedFn<F> {
    fn reduced(&self, omega: f64, ln_k: C) -> C {
        (self.f)(omega, ln_k)
    }
    fn phase(&self) -> f64 {
        self.q
    }
}

struct Smeared<'a> {
    kernel: &'a dyn Spectral,
    weights: Vec<C>,
    omegas: Vec<f64>,
    sep: Option<Vec<(C, C)>>,
}

impl<'a> Smeared<'a> {
    fn new(kernel: &'a dyn Spectral, pack: &Wavepacket) -> Self {
        let nodes = pack.nodes();
        let omegas: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let weights = nodes.iter().map(|n| C::new(n.1, 0.0)).collect();
        let sep: Option<Vec<(C, C)>> = omegas.iter().map(|&w| kernel.separable(w)).collect();
        Smeared {
            kernel,
            weights,
            omegas,
            sep,
        }
    }

    /// Σ_j w_j P(ω_j) r(ω_j, ln k).
    fn eval(&self, ln_k: C) -> C {
        let mut s = ZERO;
        match &self.sep {
            Some(sep) => {
                for (w, (amp, rate)) in self.weights.iter().zip(sep) {
                    s += w * amp * (rate * ln_k).exp();
                }
            }
            None => {
                for (w, om) in self.weights.iter().zip(&self.omegas) {
                    s += w * self.kernel.reduced(*om, ln_k);
                }
            }
        }
        s
    }
}

/// Packet-smeared overlap ∬dω dω′ P₁(ω) P₂(ω′) ∫₀^∞ dk c₁*(ω, k) c₂(ω′, k).
///
/// The k-integral runs in u = ln k. When the plane-wave phases differ the ray is
/// rotated to k = e^{u ± iπ/2} so the combined phase e^{i(q₂−q₁)k} decays.
/// `a` sets the centre of the log grid (the acceleration or diamond scale).
pub fn beta_overlap_integral(
    c1: &dyn Spectral,
    c2: &dyn Spectral,
    p1: &Wavepacket,
    p2: &Wavepacket,
    a: f64,
    reg: &RegulatorParams,
) -> Result<Estimate> {
    reg.validate()?;
    if !(a > 0.0) {
        return Err(Error::domain("scale a must be positive"));
    }
    let s1 = Smeared::new(c1, p1);
    let s2 = Smeared::new(c2, p2);
    let dq = c2.phase() - c1.phase();
    let theta = if dq > 0.0 {
        PI / 2.0
    } else if dq < 0.0 {
        -PI / 2.0
    } else {
        0.0
    };
    let sig = p1.width.min(p2.width) / a;
    let span = 6.0 / sig + 12.0;
    let centre = a.ln();
    let lo = centre - span;
    let hi = if dq != 0.0 { (60.0 / dq.abs()).ln().max(lo + 1.0) } else { centre + span };
    let rot = C::new(0.0, theta).exp();
    let integrand = |u: f64| {
        let lk = C::new(u, theta);
        let mut v = s1.eval(lk.conj()).conj() * s2.eval(lk);
        if dq != 0.0 {
            let k = u.exp() * rot;
            v *= (I * dq * k).exp();
        }
        v
    };
    let sep = (p1.center - p2.center).abs() / a;
    let width = (1.0f64).min(1.0 / sep.max(1e-300)).min(0.25 / sig);
    let panels = (((hi - lo) / width).ceil() as usize).max(8);
    let floor = 1e-14 * (p1.norm() * p2.norm()).sqrt();
    gl_adaptive(integrand, lo, hi, panels, reg.tol, floor)
}

/// One row of the iε self-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IepsRow {
    pub z: f64,
    pub numeric: C,
    pub analytic: C,
}

/// Compares ∫₀^∞ dκ κ e^{−iκz} e^{−εκ} by quadrature with −1/(z − iε)².
pub fn iepsilon_integral(z_values: &[f64], reg: &RegulatorParams) -> Result<Vec<IepsRow>> {
    reg.validate()?;
    let eps = reg.epsilon;
    let end = 40.0 / eps;
    let rule = GaussLegendre::order20();
    z_values
        .iter()
        .map(|&z| {
            let panels = ((end * (z.abs() + eps) / PI).ceil() as usize).max(64);
            let f = |k: f64| k * C::new(-eps * k, -k * z).exp();
            let numeric = rule.composite(&f, 0.0, end, panels);
            let d = C::new(z, -eps);
            Ok(IepsRow {
                z,
                numeric,
                analytic: -1.0 / (d * d),
            })
        })
        .collect()
}

/// Packet coefficients c_j Ω_j^{−1/2} with Ω_j = ω_j/a.
fn diamond_weights(p: &Wavepacket, a: f64) -> (Vec<f64>, Vec<f64>) {
    p.nodes().into_iter().map(|(w, c)| (w / a, c / (w / a).sqrt())).unzip()
}

fn gl_nodes(lo: f64, hi: f64, width: f64) -> Vec<(f64, f64)> {
    let panels = (((hi - lo) / width).ceil() as usize).max(1);
    GaussLegendre::order20().composite_nodes(lo, hi, panels)
}

/// Packet-smeared occupation of a single diamond,
/// −(1/4π²a) ∬ ds ds′ (s − s′ − iε)^{−2} ((1+s)/(1−s))^{−iΩ} ((1+s′)/(1−s′))^{iΩ′}
/// integrated against P₁(ω)P₂(ω′).
///
/// With s = tanh t, s′ = tanh t′ the kernel becomes 1/sinh²(t − t′ − iε). In the
/// sum and difference variables p = t + t′, q = t − t′ the q-contour is moved to
/// Im q = −π/2, where sinh² q = −cosh² x, leaving a smooth double integral.
pub fn diamond_double_integral(p1: &Wavepacket, p2: &Wavepacket, a: f64) -> Result<Estimate> {
    if !(a > 0.0) {
        return Err(Error::domain("diamond scale a must be positive"));
    }
    let coarse = diamond_diagonal_grid(p1, p2, a, 1.0)?;
    let fine = diamond_diagonal_grid(p1, p2, a, 0.5)?;
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).norm(),
        evals: 0,
    })
}

fn diamond_diagonal_grid(p1: &Wavepacket, p2: &Wavepacket, a: f64, refine: f64) -> Result<C> {
    let (o1, c1) = diamond_weights(p1, a);
    let (o2, c2) = diamond_weights(p2, a);
    let sig = p1.width.min(p2.width) / a;
    let sep = (p1.center - p2.center).abs() / a;
    let big = o1.iter().chain(&o2).cloned().fold(0.0, f64::max);
    let pr = 6.0 / sig + 10.0;
    // In p only the beat frequencies Ω_j − Ω_l survive the product, in x the sums.
    let band = sep + 2.0 * p1.cutoff().max(p2.cutoff()) * sig;
    let pw = refine * (8.0 / band).min(8.0);
    let xw = refine * (2.0f64).min(4.0 / big);
    let pn = gl_nodes(-pr, pr, pw);
    let xn = gl_nodes(-20.0, 20.0, xw);
    let (np, nx) = (pn.len(), xn.len());
    let build = |om: &[f64], cf: &[f64], sign: f64| {
        // A(p, x) = Σ_j C_j e^{sign·iΩ_j p} e^{−iΩ_j x}, C_j = c_j Ω_j^{−1/2} e^{−πΩ_j/2}
        let ep = DMatrix::from_fn(np, om.len(), |i, j| {
            cf[j] * (-PI * om[j] / 2.0).exp() * C::new(0.0, sign * om[j] * pn[i].0).exp()
        });
        let ex = DMatrix::from_fn(om.len(), nx, |j, m| C::new(0.0, -om[j] * xn[m].0).exp());
        ep * ex
    };
    let m1 = build(&o1, &c1, -1.0);
    let m2 = build(&o2, &c2, 1.0);
    let mut total = ZERO;
    for m in 0..nx {
        let cx = xn[m].0.cosh();
        let wx = xn[m].1 / (cx * cx);
        let mut col = ZERO;
        for i in 0..np {
            col += m1[(i, m)] * m2[(i, m)] * pn[i].1;
        }
        total += col * wx;
    }
    // Jacobian ½ from (t, t′) → (p, q) and the sign from sinh² → −cosh².
    Ok(total / (8.0 * PI * PI * a))
}

/// Packet-smeared cross term between the zeroth diamond and the diamond shifted
/// by 4n/a, with kernel (s − s′ − 2·sign·n)^{−2}. `sign = 1` reproduces the
/// printed phase pair e^{∓4iκn}; `sign = −1` the pair obtained when both
/// coefficients carry e^{−4iκn}.
pub fn diamond_shifted_double_integral(
    p1: &Wavepacket,
    p2: &Wavepacket,
    a: f64,
    n: u32,
    sign: f64,
) -> Result<Estimate> {
    if n == 0 {
        return diamond_double_integral(p1, p2, a);
    }
    if !(a > 0.0) {
        return Err(Error::domain("diamond scale a must be positive"));
    }
    let coarse = diamond_shifted_grid(p1, p2, a, n, sign, 1.0);
    let fine = diamond_shifted_grid(p1, p2, a, n, sign, 0.5);
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).norm(),
        evals: 0,
    })
}

/// ln(1 − tanh t) and ln sech t without overflow.
fn ln_one_minus_tanh(t: f64) -> f64 {
    // 1 − tanh t = 2/(1 + e^{2t})
    std::f64::consts::LN_2 - softplus(2.0 * t)
}

fn ln_sech(t: f64) -> f64 {
    std::f64::consts::LN_2 - t.abs() - (-2.0 * t.abs()).exp().ln_1p()
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn diamond_shifted_grid(p1: &Wavepacket, p2: &Wavepacket, a: f64, n: u32, sign: f64, refine: f64) -> C {
    let (o1, c1) = diamond_weights(p1, a);
    let (o2, c2) = diamond_weights(p2, a);
    let sig = p1.width.min(p2.width) / a;
    let big = o1.iter().chain(&o2).cloned().fold(0.0, f64::max);
    // Only n = 1 has the slowly decaying corner (t → ±∞, t′ → ∓∞).
    let range = if n == 1 { 3.5 / sig + 20.0 } else { 20.0 };
    let width = refine * (2.0f64).min(6.0 / (2.0 * big));
    let tn = gl_nodes(-range, range, width);
    let amp = |t: f64, om: &[f64], cf: &[f64], s: f64| -> C {
        om.iter()
            .zip(cf)
            .map(|(o, c)| *c * C::new(0.0, s * 2.0 * o * t).exp())
            .sum()
    };
    let b1: Vec<C> = tn.iter().map(|&(t, w)| amp(t, &o1, &c1, -1.0) * w).collect();
    let b2: Vec<C> = tn.iter().map(|&(t, w)| amp(t, &o2, &c2, 1.0) * w).collect();
    // Kernel pieces: D = (1 ∓ tanh t) + (1 ± tanh t′) + 2(n−1).
    let lm: Vec<f64> = tn.iter().map(|&(t, _)| ln_one_minus_tanh(sign * t)).collect();
    let lp: Vec<f64> = tn.iter().map(|&(t, _)| ln_one_minus_tanh(-sign * t)).collect();
    let ls: Vec<f64> = tn.iter().map(|&(t, _)| ln_sech(t)).collect();
    let extra = 2.0 * (n as f64 - 1.0);
    let rows: Vec<C> = (0..tn.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = ZERO;
            for j in 0..tn.len() {
                let d = lm[i].exp() + lp[j].exp() + extra;
                let k = if d > 1e-150 {
                    (2.0 * (ls[i] + ls[j])).exp() / (d * d)
                } else {
                    let m = lm[i].max(lp[j]);
                    let ln_d = m + ((lm[i] - m).exp() + (lp[j] - m).exp()).ln();
                    (2.0 * (ls[i] + ls[j] - ln_d)).exp()
                };
                acc += b2[j] * k;
            }
            acc * b1[i]
        })
        .collect();
    let total: C = rows.iter().sum();
    -total / (4.0 * PI * PI * a)
}
