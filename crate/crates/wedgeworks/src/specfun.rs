//! Complex special functions: Γ(z), Kummer M(a, b, z), Gauss ₂F₁(a, b; c; z) and the
//! conical Legendre function P_{-1/2+iλ}(x).

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use num_complex::Complex64;

use crate::dd::{CDD, DD};
use crate::quad::{tanh_sinh, DeOptions};
use crate::{Error, Result, DEFAULT_TOL};

type C = Complex64;

const fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

const ONE: C = c(1.0, 0.0);
const ZERO: C = c(0.0, 0.0);

// Lanczos approximation, g = 607/128 with 15 coefficients (Godfrey's set).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(z: C) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// sin(πx) and cos(πx) with exact argument reduction.
fn sincos_pi(x: f64) -> (f64, f64) {
    let n = x.round();
    let r = x - n;
    let (s, c) = (PI * r).sin_cos();
    if (n as i64) % 2 == 0 {
        (s, c)
    } else {
        (-s, -c)
    }
}

/// ln Γ(z) for Re z ≥ 1/2 by the Lanczos sum.
fn lanczos_ln_gamma(z: C) -> C {
    let z1 = z - 1.0;
    let mut x = c(LANCZOS[0], 0.0);
    for (k, ck) in LANCZOS.iter().enumerate().skip(1) {
        x += *ck / (z1 + k as f64);
    }
    let t = z1 + LANCZOS_G + 0.5;
    (z1 + 0.5) * t.ln() - t + HALF_LN_2PI + x.ln()
}

/// ln sin(πz), stable for large |Im z|. Only exp of the result is meaningful.
fn ln_sin_pi(z: C) -> C {
    let (sx, cx) = sincos_pi(z.re);
    let y = z.im;
    if y.abs() < 20.0 {
        let py = PI * y;
        return c(sx * py.cosh(), cx * py.sinh()).ln();
    }
    // Reduced phase e^{∓iπx} built from the exactly reduced sin/cos.
    if y > 0.0 {
        // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})
        let e2 = c(cx, sx) * c(cx, sx) * (-2.0 * PI * y).exp();
        c(PI * y - LN_2, 0.0) + c(cx, -sx).ln() + c(0.0, PI / 2.0) + (ONE - e2).ln()
    } else {
        // sin(πz) = (-i/2) e^{iπz} (1 - e^{-2iπz})
        let e2 = c(cx, -sx) * c(cx, -sx) * (2.0 * PI * y).exp();
        c(-PI * y - LN_2, 0.0) + c(cx, sx).ln() + c(0.0, -PI / 2.0) + (ONE - e2).ln()
    }
}

/// Logarithm of Γ(z). The imaginary part is some branch of arg Γ(z); exponentiating
/// always recovers Γ(z). Use this form when |Im z| is large enough for Γ to underflow.
pub fn ln_cgamma(z: C) -> Result<C> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            func: "gamma",
            at: format!("{}", z.re),
        });
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("gamma argument must be finite"));
    }
    if z.re >= 0.5 {
        Ok(lanczos_ln_gamma(z))
    } else {
        Ok(c(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos_ln_gamma(ONE - z))
    }
}

/// Γ(z) for complex z. Errors at the poles z = 0, -1, -2, ...
pub fn cgamma(z: C) -> Result<C> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            func: "gamma",
            at: format!("{}", z.re),
        });
    }
    if z.re >= 0.5 {
        return Ok(lanczos_ln_gamma(z).exp());
    }
    if z.im.abs() < 20.0 {
        let (sx, cx) = sincos_pi(z.re);
        let py = PI * z.im;
        let s = c(sx * py.cosh(), cx * py.sinh());
        return Ok(c(PI, 0.0) / (s * lanczos_ln_gamma(ONE - z).exp()));
    }
    Ok(ln_cgamma(z)?.exp())
}

/// 1/Γ(z), entire; zero at the poles of Γ.
pub fn rgamma(z: C) -> C {
    if is_nonpositive_integer(z) {
        return ZERO;
    }
    match ln_cgamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => ZERO,
    }
}

/// Real Γ(1+ix) magnitude squared, |Γ(1+ix)|² = πx / sinh(πx).
pub fn gamma_1pix_sq(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px / px.sinh()
    }
}

/// Switch from the double-double Taylor series to the asymptotic expansion.
pub const KUMMER_SERIES_MAX_ABS_Z: f64 = 40.0;

/// Kummer's confluent hypergeometric function M(a, b, z) = ₁F₁(a; b; z).
pub fn kummer_m(a: C, b: C, z: C) -> Result<C> {
    kummer_m_tol(a, b, z, DEFAULT_TOL)
}

pub fn kummer_m_tol(a: C, b: C, z: C, tol: f64) -> Result<C> {
    if is_nonpositive_integer(b) {
        return Err(Error::Pole {
            func: "kummer_m (parameter b)",
            at: format!("{}", b.re),
        });
    }
    if z == ZERO {
        return Ok(ONE);
    }
    let terminating = is_nonpositive_integer(a);
    if z.norm() <= KUMMER_SERIES_MAX_ABS_Z || terminating {
        return kummer_series(a, b, z, tol);
    }
    kummer_asymptotic(a, b, z, tol)
}

fn kummer_series(a: C, b: C, z: C, tol: f64) -> Result<C> {
    let zz = CDD::from_c64(z);
    let mut term = CDD::ONE;
    let mut sum = CDD::ONE;
    let mut max_term = 1.0f64;
    let max_k = 400 + (4.0 * z.norm()) as usize;
    let mut quiet = 0;
    for k in 0..max_k {
        let kf = DD::new(k as f64);
        let ak = CDD {
            re: DD::new(a.re) + kf,
            im: DD::new(a.im),
        };
        let bk = CDD {
            re: DD::new(b.re) + kf,
            im: DD::new(b.im),
        };
        if ak.re.hi == 0.0 && ak.im.hi == 0.0 {
            return Ok(sum.to_c64());
        }
        term = (term * ak * zz) / (bk.scale(DD::new(k as f64 + 1.0)));
        sum = sum + term;
        let tn = term.norm_f64();
        max_term = max_term.max(tn);
        let sn = sum.norm_f64();
        if tn <= 1e-33 * sn && (k as f64) > z.norm() {
            quiet += 1;
            if quiet >= 2 {
                let loss = max_term * 1e-31 / sn.max(f64::MIN_POSITIVE);
                if loss > tol {
                    return Err(Error::no_convergence("kummer_m series (cancellation)", loss, tol));
                }
                return Ok(sum.to_c64());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::no_convergence(
        "kummer_m series",
        term.norm_f64() / sum.norm_f64().max(f64::MIN_POSITIVE),
        tol,
    ))
}

/// Sum of Σ_s (p)_s (q)_s / s! · w^s truncated at the smallest term.
fn asymptotic_sum(p: C, q: C, w: C) -> (C, f64) {
    let mut term = ONE;
    let mut sum = ONE;
    let mut last = 1.0f64;
    for s in 0..500 {
        let sf = s as f64;
        let next = term * (p + sf) * (q + sf) * w / (sf + 1.0);
        let nn = next.norm();
        if nn >= last && s > 0 {
            return (sum, last);
        }
        term = next;
        sum += term;
        last = nn;
        if nn <= 1e-17 * sum.norm() {
            return (sum, nn);
        }
    }
    (sum, last)
}

fn kummer_asymptotic(a: C, b: C, z: C, tol: f64) -> Result<C> {
    let lnz = z.ln();
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let (s1, e1) = asymptotic_sum(a, a - b + 1.0, -ONE / z);
    let (s2, e2) = asymptotic_sum(b - a, ONE - a, ONE / z);
    let p1 = (c(0.0, sign * PI) * a - a * lnz).exp() * rgamma(b - a);
    let p2 = (z + (a - b) * lnz).exp() * rgamma(a);
    let gb = cgamma(b)?;
    let val = gb * (p1 * s1 + p2 * s2);
    let err = gb.norm() * (p1.norm() * e1 + p2.norm() * e2);
    let scale = val.norm().max(f64::MIN_POSITIVE);
    if err > tol * scale {
        return Err(Error::no_convergence("kummer_m asymptotic expansion", err / scale, tol));
    }
    Ok(val)
}

/// Side of the branch cut [1, ∞) from which ₂F₁ is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Above => 1.0,
            Side::Below => -1.0,
        }
    }
}

/// Radius within which the Gauss series is summed directly.
pub const HYP2F1_SERIES_RADIUS: f64 = 0.7;

fn near_integer(x: C) -> bool {
    x.im.abs() < 1e-9 && (x.re - x.re.round()).abs() < 1e-9
}

fn hyp2f1_series(a: C, b: C, c: C, z: C) -> Result<C> {
    let mut term = ONE;
    let mut sum = ONE;
    let mut quiet = 0;
    for k in 0..5000 {
        let kf = k as f64;
        let num = (a + kf) * (b + kf);
        if num == ZERO {
            return Ok(sum);
        }
        term = term * num * z / ((c + kf) * (kf + 1.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::no_convergence("hyp2f1 series", term.norm() / sum.norm(), DEFAULT_TOL))
}

// ln(-z) and ln(1-z) with the cut side made explicit for real z > 0 (resp. z > 1).
fn ln_neg(z: C, side: f64) -> C {
    if z.im == 0.0 && z.re > 0.0 {
        c(z.re.ln(), -side * PI)
    } else {
        (-z).ln()
    }
}

fn ln_one_minus(z: C, side: f64) -> C {
    if z.im == 0.0 && z.re > 1.0 {
        c((z.re - 1.0).ln(), -side * PI)
    } else {
        (ONE - z).ln()
    }
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z).
pub fn gauss_2f1(a: C, b: C, cc: C, z: C) -> Result<C> {
    gauss_2f1_side(a, b, cc, z, None)
}

/// ₂F₁ with an optional side for real z > 1 on the branch cut.
pub fn gauss_2f1_side(a: C, b: C, cc: C, z: C, side: Option<Side>) -> Result<C> {
    if is_nonpositive_integer(cc) {
        return Err(Error::Pole {
            func: "gauss_2f1 (parameter c)",
            at: format!("{}", cc.re),
        });
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("gauss_2f1 argument must be finite"));
    }
    if z == ZERO {
        return Ok(ONE);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return hyp2f1_series(a, b, cc, z);
    }
    let on_cut = z.im == 0.0 && z.re > 1.0;
    if on_cut && side.is_none() {
        return Err(Error::BranchCut(format!("z = {} in [1, inf)", z.re)));
    }
    let sgn = side.map(Side::sign).unwrap_or(1.0);
    if z.im == 0.0 && z.re == 1.0 {
        let s = cc - a - b;
        if s.re <= 0.0 {
            return Err(Error::domain("gauss_2f1 diverges at z = 1 unless Re(c-a-b) > 0"));
        }
        return Ok(cgamma(cc)? * cgamma(s)? * rgamma(cc - a) * rgamma(cc - b));
    }
    let r = HYP2F1_SERIES_RADIUS;
    if z.norm() <= r {
        return hyp2f1_series(a, b, cc, z);
    }
    if !on_cut {
        let w = z / (z - 1.0);
        if w.norm() <= r {
            let pre = (-a * (ONE - z).ln()).exp();
            return Ok(pre * hyp2f1_series(a, cc - b, cc, w)?);
        }
    }
    let one_m = ONE - z;
    if one_m.norm() <= r && !near_integer(cc - a - b) {
        let s = cc - a - b;
        let g = cgamma(cc)?;
        let t1 = cgamma(s)? * rgamma(cc - a) * rgamma(cc - b) * hyp2f1_series(a, b, ONE - s, one_m)?;
        let t2 = (s * ln_one_minus(z, sgn)).exp()
            * cgamma(-s)?
            * rgamma(a)
            * rgamma(b)
            * hyp2f1_series(cc - a, cc - b, s + 1.0, one_m)?;
        return Ok(g * (t1 + t2));
    }
    if !near_integer(a - b) {
        let g = cgamma(cc)?;
        let inv = ONE / z;
        if inv.norm() <= r {
            let ln_mz = ln_neg(z, sgn);
            let t1 = cgamma(b - a)? * rgamma(b) * rgamma(cc - a)
                * (-a * ln_mz).exp()
                * hyp2f1_series(a, a - cc + 1.0, a - b + 1.0, inv)?;
            let t2 = cgamma(a - b)? * rgamma(a) * rgamma(cc - b)
                * (-b * ln_mz).exp()
                * hyp2f1_series(b, b - cc + 1.0, b - a + 1.0, inv)?;
            return Ok(g * (t1 + t2));
        }
        let inv1 = ONE / one_m;
        if inv1.norm() <= r {
            let ln1 = ln_one_minus(z, sgn);
            let t1 = cgamma(b - a)? * rgamma(b) * rgamma(cc - a)
                * (-a * ln1).exp()
                * hyp2f1_series(a, cc - b, a - b + 1.0, inv1)?;
            let t2 = cgamma(a - b)? * rgamma(a) * rgamma(cc - b)
                * (-b * ln1).exp()
                * hyp2f1_series(b, cc - a, b - a + 1.0, inv1)?;
            return Ok(g * (t1 + t2));
        }
    }
    let sigma = if z.im != 0.0 { z.im.signum() } else { sgn };
    hyp2f1_ode(a, b, cc, z, sigma)
}

/// Analytic continuation by Taylor-stepping the hypergeometric equation
/// z(1-z)w'' + [c - (a+b+1)z]w' - ab w = 0 along a path avoiding 0 and 1.
fn hyp2f1_ode(a: C, b: C, cc: C, z: C, sigma: f64) -> Result<C> {
    let start = if z.re > 0.0 && z.im.abs() < z.re {
        c(0.25, sigma * 0.5 * (PI / 3.0).sin())
    } else {
        z / z.norm() * 0.5
    };
    let mut w = hyp2f1_series(a, b, cc, start)?;
    let mut dw = a * b / cc * hyp2f1_series(a + 1.0, b + 1.0, cc + 1.0, start)?;
    let mut cur = start;
    let apb1 = a + b + 1.0;
    for _ in 0..20_000 {
        let rem = z - cur;
        let dist = rem.norm();
        if dist == 0.0 {
            return Ok(w);
        }
        let radius = cur.norm().min((cur - 1.0).norm());
        let hmax = 0.5 * radius;
        let h = if dist <= hmax { rem } else { rem * (hmax / dist) };
        let denom = cur * (ONE - cur);
        let lin = cc - apb1 * cur;
        let slope = ONE - cur * 2.0;
        let (mut c0, mut c1) = (w, dw);
        let mut val = c0 + c1 * h;
        let mut der = c1;
        let mut hp = h;
        let mut quiet = 0;
        for k in 0..600 {
            let kf = k as f64;
            let c2 = ((a + kf) * (b + kf) * c0 - (slope * kf + lin) * (kf + 1.0) * c1) / (denom * ((kf + 1.0) * (kf + 2.0)));
            let hk1 = hp * h;
            let t = c2 * hk1;
            val += t;
            der += c2 * (kf + 2.0) * hp;
            hp = hk1;
            c0 = c1;
            c1 = c2;
            if t.norm() <= 1e-18 * val.norm() {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        w = val;
        dw = der;
        cur += h;
        if !(w.re.is_finite() && w.im.is_finite()) {
            break;
        }
    }
    Err(Error::no_convergence("hyp2f1 analytic continuation", f64::NAN, DEFAULT_TOL))
}

/// Conical function P_{-1/2+iλ}(x) for real x ≥ 1.
pub fn conical_p(lambda: f64, x: f64) -> Result<f64> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::domain(format!("conical_p needs x >= 1, got {x}")));
    }
    conical_p_rapidity(lambda, x.acosh())
}

/// P_{-1/2+iλ}(cosh α) by the Mehler–Dirichlet integral
/// (√2/π) ∫₀^α cos(λθ) / √(cosh α − cosh θ) dθ.
pub fn conical_p_rapidity(lambda: f64, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain("conical_p needs alpha >= 0 and finite lambda"));
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let lam = lambda.abs();
    let panels = ((lam * alpha / PI).ceil() as usize).clamp(1, 4000);
    let width = alpha / panels as f64;
    // Panels where cos(λθ) nearly cancels only meet an absolute floor, set by
    // the integrand scale 1/(√2 sinh(α/2)) near θ = 0.
    let scale = width / (2.0f64.sqrt() * (0.5 * alpha).sinh());
    let opts = DeOptions {
        abs_tol: 1e-15 * scale,
        ..DeOptions::with_tol(1e-13)
    };
    let mut total = 0.0;
    for p in 0..panels {
        let lo = width * p as f64;
        let hi = if p + 1 == panels { alpha } else { lo + width };
        let tail = alpha - hi;
        let est = tanh_sinh(
            |th, _, to_hi| {
                let gap = tail + to_hi;
                // cosh α − cosh θ = 2 sinh((α+θ)/2) sinh((α−θ)/2)
                let d = 2.0 * (0.5 * (alpha + th)).sinh() * (0.5 * gap).sinh();
                c((lam * th).cos() / d.sqrt(), 0.0)
            },
            lo,
            hi,
            opts,
        )?;
        total += est.value.re;
    }
    Ok(total * 2.0 * FRAC_1_SQRT_2 / PI)
}
