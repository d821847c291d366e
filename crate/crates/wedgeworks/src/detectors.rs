//! Unruh–DeWitt detector responses: Gaussian-switched quadrature, the de Sitter
//! superposed closed form, BTZ image sums and KMS detailed-balance fits.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::quad::gl_adaptive;
use crate::specfun::conical_p_rapidity;
use crate::{Error, Result};

type C = Complex64;

/// Half-width of the switching window in units of σ; e^{−12²/4} ≈ 2e-16.
pub const WINDOW_SIGMAS: f64 = 12.0;

/// Default image-sum truncation.
pub const DEFAULT_IMAGES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Energy gap Ω, either sign.
    pub gap: f64,
    /// Gaussian switching width σ.
    pub switching_width: f64,
    /// When set the response is F of the Gaussian-window integral, which
    /// absorbs λ²σ; otherwise σ·F is returned (probability per λ²).
    pub coupling_absorbed: bool,
}

impl DetectorConfig {
    pub fn new(gap: f64, switching_width: f64) -> Result<Self> {
        if !(switching_width > 0.0) || !switching_width.is_finite() {
            return Err(Error::domain(format!("switching width must be positive, got {switching_width}")));
        }
        if !gap.is_finite() {
            return Err(Error::domain("gap must be finite"));
        }
        Ok(DetectorConfig {
            gap,
            switching_width,
            coupling_absorbed: true,
        })
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = gap;
        self
    }

    fn scale(&self, f: f64) -> f64 {
        if self.coupling_absorbed {
            f
        } else {
            self.switching_width * f
        }
    }
}

/// A Wightman function W(s), continued to a strip below the real axis.
pub trait Wightman: Sync {
    fn eval(&self, s: C) -> C;

    /// Depth of the strip −strip < Im s < 0 free of singularities.
    fn strip(&self) -> f64 {
        f64::INFINITY
    }
}

/// A Wightman function from a closure, with its analytic strip depth.
pub struct WightmanFn<F> {
    pub f: F,
    pub strip: f64,
}

impl<F: Fn(C) -> C + Sync> Wightman for WightmanFn<F> {
    fn eval(&self, s: C) -> C {
        (self.f)(s)
    }

    fn strip(&self) -> f64 {
        self.strip
    }
}

/// Sum of two Wightman functions.
pub struct SumWightman<'a>(pub &'a dyn Wightman, pub &'a dyn Wightman);

impl Wightman for SumWightman<'_> {
    fn eval(&self, s: C) -> C {
        self.0.eval(s) + self.1.eval(s)
    }

    fn strip(&self) -> f64 {
        self.0.strip().min(self.1.strip())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseValue {
    pub value: f64,
    /// Imaginary part left by the quadrature.
    pub imag_residual: f64,
    pub error: f64,
}

/// F = ∫ds e^{−s²/4σ²} e^{−iΩs} W(s − i0).
///
/// The contour runs along Im s = −δ with δ = min(strip/2, σ), which realises the
/// iε prescription without a principal-value split.
pub fn response_from_wightman(w: &dyn Wightman, cfg: &DetectorConfig, tol: f64) -> Result<ResponseValue> {
    let sig = cfg.switching_width;
    let om = cfg.gap;
    let delta = (0.5 * w.strip()).min(sig);
    let half = WINDOW_SIGMAS * sig;
    let integrand = |x: f64| {
        let s = C::new(x, -delta);
        (-s * s / (4.0 * sig * sig) - C::new(0.0, om) * s).exp() * w.eval(s)
    };
    let scale = if delta.is_finite() && delta > 0.0 { delta } else { sig };
    let width = (0.5 * scale).min(sig).min(if om != 0.0 { 1.0 / om.abs() } else { f64::INFINITY });
    let panels = ((2.0 * half / width).ceil() as usize).clamp(8, 1 << 16);
    let est = gl_adaptive(integrand, -half, half, panels, tol, 1e-300)?;
    let mag = est.value.norm().max(est.error);
    let imag = est.value.im.abs();
    if imag > (1e3 * tol).max(1e-9) * mag.max(1e-300) && imag > est.error * 10.0 {
        return Err(Error::domain(format!(
            "response has imaginary part {imag:.3e} (real {:.3e}); the Wightman function is not Hermitian",
            est.value.re
        )));
    }
    Ok(ResponseValue {
        value: cfg.scale(est.value.re),
        imag_residual: cfg.scale(imag),
        error: cfg.scale(est.error),
    })
}

/// asinh(x)/x with its series near 0.
fn asinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + 3.0 * x2 * x2 / 40.0
    } else {
        x.asinh() / x
    }
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

/// Ω/(e^{2πΩ/κ} − 1), continuous through Ω = 0.
fn bose_weight(omega: f64, kappa: f64) -> f64 {
    let x = 2.0 * PI * omega / kappa;
    if x.abs() < 1e-12 {
        kappa / (2.0 * PI)
    } else {
        omega / x.exp_m1()
    }
}

/// Response of a static de Sitter detector superposed over two worldlines a
/// geodesic distance `s` apart:
/// (Ω/4π)(e^{2πΩ/κ} − 1)^{−1}[1 + sin((2Ω/κ) asinh(sκ/2)) / (sΩ √(1 + (sκ/2)²))].
pub fn desitter_superposed_response(omega: f64, kappa: f64, s: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::domain(format!("surface gravity must be positive, got {kappa}")));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("separation must be non-negative, got {s}")));
    }
    Ok(bose_weight(omega, kappa) / (4.0 * PI) * desitter_bracket(omega, kappa, s))
}

/// The bracket of [`desitter_superposed_response`]: 2 at s = 0, → 1 as s → ∞.
pub fn desitter_bracket(omega: f64, kappa: f64, s: f64) -> f64 {
    let x = 0.5 * s * kappa;
    // (2/κ) asinh(x) = s · asinh(x)/x
    let c = s * asinhc(x);
    1.0 + sinc(omega * c) * asinhc(x) / x.hypot(1.0)
}

/// Parameters of a static detector outside a BTZ black hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BTZParams {
    pub mass: f64,
    pub ads_length: f64,
    /// Radial coordinate of the detector.
    pub radius: f64,
    pub n_max: usize,
    /// Angular separation of the superposed branches.
    pub delta_phi: f64,
}

impl BTZParams {
    pub fn new(mass: f64, ads_length: f64, radius: f64) -> Result<Self> {
        let p = BTZParams {
            mass,
            ads_length,
            radius,
            n_max: DEFAULT_IMAGES,
            delta_phi: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_images(mut self, n_max: usize) -> Result<Self> {
        self.n_max = n_max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta_phi(mut self, delta_phi: f64) -> Result<Self> {
        self.delta_phi = delta_phi;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !(self.ads_length > 0.0) {
            return Err(Error::domain("BTZ mass and AdS length must be positive"));
        }
        if !(self.radius > self.horizon()) {
            return Err(Error::domain(format!(
                "detector radius {} must lie outside the horizon {}",
                self.radius,
                self.horizon()
            )));
        }
        if self.n_max == 0 {
            return Err(Error::domain("image truncation n_max must be at least 1"));
        }
        if !(0.0..2.0 * PI).contains(&self.delta_phi) {
            return Err(Error::domain(format!("delta_phi must lie in [0, 2π), got {}", self.delta_phi)));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.mass.sqrt() * self.ads_length
    }

    /// f(R) = R²/l² − M.
    pub fn lapse_sq(&self) -> f64 {
        let l = self.ads_length;
        self.radius * self.radius / (l * l) - self.mass
    }

    /// Local temperature √M / (2π l √f).
    pub fn temperature(&self) -> f64 {
        self.mass.sqrt() / (2.0 * PI * self.ads_length * self.lapse_sq().sqrt())
    }

    /// X = 4π² l² T² = M/f.
    pub fn x(&self) -> f64 {
        self.mass / self.lapse_sq()
    }

    /// Rapidity α with cosh α = (1 + X) cosh(√M θ) − X, evaluated stably.
    fn rapidity(&self, theta: f64) -> f64 {
        let h = (0.5 * self.mass.sqrt() * theta).sinh().abs();
        2.0 * ((1.0 + self.x()).sqrt() * h).asinh()
    }

    /// α_n⁻ of the local image sum.
    pub fn alpha_n(&self, n: i64) -> f64 {
        self.rapidity(2.0 * PI * n as f64)
    }

    /// β_n⁻ of the cross image sum.
    pub fn beta_n(&self, n: i64) -> f64 {
        self.rapidity(self.delta_phi - 2.0 * PI * n as f64)
    }
}

/// P_{−1/2}(cosh α) = sech(α/2) / AGM(1, sech(α/2)), which bounds |P_{−1/2+iλ}|.
fn conical_bound(alpha: f64) -> f64 {
    let s = 1.0 / (0.5 * alpha).cosh();
    if s == 0.0 {
        return 0.0;
    }
    let (mut a, mut b) = (1.0f64, s);
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    s / a
}

fn tail_sum<F: Fn(i64) -> f64>(rap: F, n_max: usize) -> f64 {
    let mut sum = 0.0;
    let mut n = n_max as i64 + 1;
    loop {
        let t = conical_bound(rap(n)) + conical_bound(rap(-n));
        sum += t;
        if t <= 1e-18 * sum || t == 0.0 || n > n_max as i64 + 10_000 {
            break;
        }
        n += 1;
    }
    sum
}

/// Wightman function of a static BTZ detector (transparent boundary
/// conditions), W_A or the angularly separated W_AB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtzWightman {
    pub params: BTZParams,
    pub cross: bool,
}

impl BtzWightman {
    fn image_rap(&self, n: i64) -> f64 {
        if self.cross {
            self.params.beta_n(n)
        } else {
            self.params.alpha_n(n)
        }
    }

    /// Bound on the omitted images in units of the (1/4π l √2)(√M/√f) prefactor:
    /// Σ_{|n|>N} 1/√(cosh α_n − 1) at s = 0.
    pub fn tail_bound(&self) -> f64 {
        let t = self.params.temperature();
        let mut sum = 0.0;
        let mut n = self.params.n_max as i64 + 1;
        loop {
            let mut term = 0.0;
            for m in [n, -n] {
                let a = self.image_rap(m);
                term += 1.0 / (2.0f64.sqrt() * (0.5 * a).sinh());
            }
            sum += term;
            if term <= 1e-18 * sum || n > self.params.n_max as i64 + 10_000 {
                break;
            }
            n += 1;
        }
        t / (2.0 * 2.0f64.sqrt()) * sum
    }
}

impl Wightman for BtzWightman {
    /// W(s) = (T/2√2) Σ_n [cosh α_n − cosh(2πT s)]^{−1/2} on the contour below the
    /// real axis, where the principal root realises the iε prescription.
    fn eval(&self, s: C) -> C {
        let p = &self.params;
        let t = p.temperature();
        let z = 2.0 * PI * t * s;
        if z.re.abs() > 600.0 {
            return C::new(0.0, 0.0);
        }
        let sh = (0.5 * z).sinh();
        let two_sh2 = 2.0 * sh * sh;
        let nm = p.n_max as i64;
        let mut sum = C::new(0.0, 0.0);
        for n in -nm..=nm {
            let a = self.image_rap(n);
            let ha = (0.5 * a).sinh();
            // cosh α − cosh z = 2 sinh²(α/2) − 2 sinh²(z/2)
            let arg = C::new(2.0 * ha * ha, 0.0) - two_sh2;
            sum += arg.sqrt().inv();
        }
        t / (2.0 * 2.0f64.sqrt()) * sum
    }

    fn strip(&self) -> f64 {
        1.0 / self.params.temperature()
    }
}

/// Boundary value W(s − i0) on the real axis with the image-tail bound.
pub fn btz_wightman(s: f64, p: &BTZParams, cross: bool) -> Result<(C, f64)> {
    p.validate()?;
    let w = BtzWightman { params: *p, cross };
    let t = p.temperature();
    let sh = (PI * t * s).sinh();
    let nm = p.n_max as i64;
    let mut sum = C::new(0.0, 0.0);
    for n in -nm..=nm {
        let a = w.image_rap(n);
        let ha = (0.5 * a).sinh();
        let arg = 2.0 * ha * ha - 2.0 * sh * sh;
        let scale = 2.0 * ha * ha + 2.0 * sh * sh;
        if arg.abs() <= 1e-12 * scale.max(1e-300) {
            return Err(Error::domain(format!(
                "s = {s} lies on the light cone of image n = {n}; the Wightman function is singular there"
            )));
        }
        sum += if arg > 0.0 {
            C::new(1.0 / arg.sqrt(), 0.0)
        } else {
            // −i0 below the axis: Im(arg) has the sign of s
            C::new(0.0, s.signum() * (-arg).sqrt()).inv()
        };
    }
    Ok((t / (2.0 * 2.0f64.sqrt()) * sum, w.tail_bound()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtzResponse {
    pub value: f64,
    /// Bound on the omitted images, same units as `value`.
    pub tail_bound: f64,
}

fn fermi(omega: f64, t: f64) -> f64 {
    let x = omega / t;
    if x > 0.0 {
        (-x).exp() / (1.0 + (-x).exp())
    } else {
        1.0 / (x.exp() + 1.0)
    }
}

fn image_sum<F: Fn(i64) -> f64 + Sync + Send>(lambda: f64, n_max: usize, rap: F) -> Result<f64> {
    let nm = n_max as i64;
    let terms: Vec<Result<f64>> = (-nm..=nm)
        .into_par_iter()
        .map(|n| conical_p_rapidity(lambda, rap(n)))
        .collect();
    let mut sum = 0.0;
    for t in terms {
        sum += t?;
    }
    Ok(sum)
}

/// Long-switching response of a static BTZ detector,
/// (√π/2)(e^{Ω/T} + 1)^{−1} Σ_{|n|≤N} P_{−1/2+iΩ/2πT}(cosh α_n⁻).
pub fn btz_local_response(cfg: &DetectorConfig, p: &BTZParams) -> Result<BtzResponse> {
    p.validate()?;
    let t = p.temperature();
    let lambda = cfg.gap / (2.0 * PI * t);
    let pref = 0.5 * PI.sqrt() * fermi(cfg.gap, t);
    let sum = image_sum(lambda, p.n_max, |n| p.alpha_n(n))?;
    let tail = tail_sum(|n| p.alpha_n(n), p.n_max);
    Ok(BtzResponse {
        value: cfg.scale(pref * sum),
        tail_bound: cfg.scale(pref * tail),
    })
}

/// Prefactor of the superposed BTZ response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BtzPrefactor {
    /// (√π/4)(e^{Ω/T} + 1)^{−1}: detailed balance at T and the local limit at δφ = 0.
    #[default]
    Canonical,
    /// (√π/4)(e^{2Ω/T} + 1)^{−1}.
    Printed,
}

/// Response of a BTZ detector superposed over two angular positions δφ apart:
/// prefactor × Σ_n [P(cosh α_n⁻) + P(cosh β_n⁻)].
pub fn btz_superposed_response(cfg: &DetectorConfig, p: &BTZParams, prefactor: BtzPrefactor) -> Result<BtzResponse> {
    p.validate()?;
    let t = p.temperature();
    let lambda = cfg.gap / (2.0 * PI * t);
    let occ = match prefactor {
        BtzPrefactor::Canonical => fermi(cfg.gap, t),
        BtzPrefactor::Printed => fermi(2.0 * cfg.gap, t),
    };
    let pref = 0.25 * PI.sqrt() * occ;
    let local = image_sum(lambda, p.n_max, |n| p.alpha_n(n))?;
    let cross = image_sum(lambda, p.n_max, |n| p.beta_n(n))?;
    let tail = tail_sum(|n| p.alpha_n(n), p.n_max) + tail_sum(|n| p.beta_n(n), p.n_max);
    Ok(BtzResponse {
        value: cfg.scale(pref * (local + cross)),
        tail_bound: cfg.scale(pref * tail),
    })
}

/// Sampled response F(Ω).
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub gaps: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest truncation bound over the samples.
    pub tail_bound: f64,
}

impl ResponseCurve {
    pub fn new(gaps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if gaps.len() != values.len() {
            return Err(Error::domain("gaps and values differ in length"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("response value {v} is not finite")));
        }
        Ok(ResponseCurve {
            gaps,
            values,
            tail_bound: 0.0,
        })
    }

    /// Gaps ±Ω for each Ω in `positive`, sorted ascending.
    pub fn symmetric_gaps(positive: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = positive.iter().flat_map(|&w| [w, -w]).collect();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }

    pub fn desitter(gaps: &[f64], kappa: f64, s: f64) -> Result<Self> {
        let values = gaps
            .iter()
            .map(|&w| desitter_superposed_response(w, kappa, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(gaps.to_vec(), values)
    }

    pub fn btz(gaps: &[f64], cfg: &DetectorConfig, p: &BTZParams, superposed: Option<BtzPrefactor>) -> Result<Self> {
        let rows = gaps
            .par_iter()
            .map(|&w| {
                let c = cfg.with_gap(w);
                match superposed {
                    None => btz_local_response(&c, p),
                    Some(pf) => btz_superposed_response(&c, p, pf),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut curve = Self::new(gaps.to_vec(), rows.iter().map(|r| r.value).collect())?;
        curve.tail_bound = rows.iter().map(|r| r.tail_bound).fold(0.0, f64::max);
        Ok(curve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmsReport {
    pub t_eff: f64,
    /// Worst |F(Ω)/F(−Ω) · e^{Ω/T_eff} − 1|.
    pub max_residual: f64,
    /// Positive gap at which the worst residual occurs.
    pub worst_gap: f64,
    pub pairs: usize,
}

/// Least-squares fit of ln[F(Ω)/F(−Ω)] = −Ω/T_eff over the ±Ω pairs of a curve.
pub fn kms_fit(curve: &ResponseCurve) -> Result<KmsReport> {
    let mut pairs = Vec::new();
    for (i, &w) in curve.gaps.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let j = curve
            .gaps
            .iter()
            .position(|&v| (v + w).abs() <= 1e-12 * w)
            .ok_or_else(|| Error::Fit(format!("gap {w} has no partner at {}", -w)))?;
        let (fp, fm) = (curve.values[i], curve.values[j]);
        if !(fp > 0.0) || !(fm > 0.0) {
            return Err(Error::Fit(format!("response at ±{w} must be positive ({fp}, {fm})")));
        }
        pairs.push((w, (fp / fm).ln()));
    }
    if pairs.is_empty() {
        return Err(Error::Fit("no ±Ω pairs in the curve".into()));
    }
    let (sxy, sxx) = pairs.iter().fold((0.0, 0.0), |(a, b), (w, y)| (a + w * y, b + w * w));
    let beta = -sxy / sxx;
    if !(beta > 0.0) {
        return Err(Error::Fit(format!("fitted inverse temperature {beta} is not positive")));
    }
    let (mut max_residual, mut worst_gap) = (0.0, pairs[0].0);
    for &(w, y) in &pairs {
        let r = (y + beta * w).exp_m1().abs();
        if r > max_residual {
            max_residual = r;
            worst_gap = w;
        }
    }
    Ok(KmsReport {
        t_eff: 1.0 / beta,
        max_residual,
        worst_gap,
        pairs: pairs.len(),
    })
}
