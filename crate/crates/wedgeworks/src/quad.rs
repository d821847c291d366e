//! Quadrature engines: tanh-sinh, exp-sinh and sinh-sinh double-exponential rules
//! plus composite Gauss–Legendre for smooth oscillatory panels.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

/// Value of an integral together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
}

impl Estimate {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

/// Options shared by the double-exponential rules.
#[derive(Debug, Clone, Copy)]
pub struct DeOptions {
    pub tol: f64,
    pub max_level: u32,
    pub t_max: f64,
    /// Absolute error accepted regardless of the size of the result.
    pub abs_tol: f64,
}

impl Default for DeOptions {
    fn default() -> Self {
        DeOptions {
            tol: 1e-12,
            max_level: 10,
            t_max: 4.5,
            abs_tol: 0.0,
        }
    }
}

impl DeOptions {
    pub fn with_tol(tol: f64) -> Self {
        DeOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Generic level-doubling driver. `node(t)` returns `(weight * f, usable)`.
fn de_driver<N>(what: &str, opts: DeOptions, mut node: N) -> Result<Estimate>
where
    N: FnMut(f64) -> Option<Complex64>,
{
    let mut h = 0.5;
    let mut evals = 0usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let n0 = (opts.t_max / h).ceil() as i64;
    for k in -n0..=n0 {
        evals += 1;
        if let Some(v) = node(k as f64 * h) {
            sum += v;
        }
    }
    let mut prev = sum * h;
    let mut last_diff = f64::INFINITY;
    for _level in 1..=opts.max_level {
        h *= 0.5;
        let n = (opts.t_max / h).ceil() as i64;
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            evals += 1;
            if let Some(v) = node(k as f64 * h) {
                sum += v;
            }
            k += 2;
        }
        let cur = sum * h;
        if !cur.re.is_finite() || !cur.im.is_finite() {
            return Err(Error::no_convergence(format!("{what}: non-finite integrand"), f64::NAN, opts.tol));
        }
        let diff = (cur - prev).norm();
        let scale = cur.norm().max(f64::MIN_POSITIVE);
        if diff <= opts.tol * scale || diff <= opts.abs_tol || (diff < 1e-300) {
            // Quadratic convergence: the next correction is roughly diff^2/last_diff.
            let err = if last_diff.is_finite() && last_diff > 0.0 {
                (diff * diff / last_diff).max(diff * 1e-3)
            } else {
                diff
            };
            return Ok(Estimate {
                value: cur,
                error: err,
                evals,
            });
        }
        last_diff = diff;
        prev = cur;
    }
    Err(Error::no_convergence(what, last_diff / prev.norm().max(f64::MIN_POSITIVE), opts.tol))
}

/// Tanh-sinh rule on the finite interval [a, b].
///
/// The integrand receives `(x, x - a, b - x)` with the two endpoint distances computed
/// without cancellation, so singular endpoint factors can be evaluated accurately.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, opts: DeOptions) -> Result<Estimate>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    if !(b > a) {
        if a == b {
            return Ok(Estimate {
                value: Complex64::new(0.0, 0.0),
                error: 0.0,
                evals: 0,
            });
        }
        return Err(Error::domain(format!("tanh_sinh needs a < b, got [{a}, {b}]")));
    }
    let d = 0.5 * (b - a);
    de_driver("tanh-sinh", opts, |t| {
        let y = FRAC_PI_2 * t.sinh();
        // 1 - tanh(y) and 1 + tanh(y) without cancellation
        let e = (-2.0 * y.abs()).exp();
        let small = 2.0 * e / (1.0 + e);
        let (lo, hi) = if y >= 0.0 {
            (d * (2.0 - small), d * small)
        } else {
            (d * small, d * (2.0 - small))
        };
        if lo <= 0.0 || hi <= 0.0 {
            return None;
        }
        let cy = y.cosh();
        let w = d * FRAC_PI_2 * t.cosh() / (cy * cy);
        if w < 1e-300 {
            return None;
        }
        let x = if y >= 0.0 { b - hi } else { a + lo };
        Some(f(x, lo, hi) * w)
    })
}

/// Tanh-sinh rule for a real integrand with plain argument.
pub fn tanh_sinh_real<F>(f: F, a: f64, b: f64, opts: DeOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let e = tanh_sinh(|x, _, _| Complex64::new(f(x), 0.0), a, b, opts)?;
    Ok((e.value.re, e.error))
}

/// Exp-sinh rule on [a, ∞). The integrand receives the offset `x - a`.
pub fn exp_sinh<F>(f: F, opts: DeOptions) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    de_driver("exp-sinh", opts, |t| {
        let x = (FRAC_PI_2 * t.sinh()).exp();
        if x == 0.0 || !x.is_finite() {
            return None;
        }
        let w = x * FRAC_PI_2 * t.cosh();
        let v = f(x);
        if v == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(v * w)
    })
}

/// Sinh-sinh rule on (-∞, ∞).
pub fn sinh_sinh<F>(f: F, opts: DeOptions) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    de_driver("sinh-sinh", opts, |t| {
        let y = FRAC_PI_2 * t.sinh();
        let x = y.sinh();
        if !x.is_finite() {
            return None;
        }
        let w = y.cosh() * FRAC_PI_2 * t.cosh();
        let v = f(x);
        if v == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(v * w)
    })
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 20-point rule.
    pub fn order20() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let c = 0.5 * (a + b);
        let d = 0.5 * (b - a);
        let mut s = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(c + d * x) * *w;
        }
        s * d
    }

    /// Nodes and weights of the composite rule over `panels` equal panels of [a, b].
    pub fn composite_nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let lo = a + h * p as f64;
            let c = lo + 0.5 * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((c + 0.5 * h * x, 0.5 * h * w));
            }
        }
        out
    }

    pub fn composite<F>(&self, f: &F, a: f64, b: f64, panels: usize) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let h = (b - a) / panels as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = a + h * p as f64;
            s += self.integrate(f, lo, lo + h);
        }
        s
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite 20-point Gauss–Legendre on [a, b], doubling the panel count until two
/// successive estimates agree to `tol` (relative, with absolute floor `abs_floor`).
pub fn gl_adaptive<F>(f: F, a: f64, b: f64, panels: usize, tol: f64, abs_floor: f64) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    let rule = GaussLegendre::order20();
    let mut n = panels.max(1);
    let mut prev = rule.composite(&f, a, b, n);
    let mut evals = 20 * n;
    let mut diff = f64::INFINITY;
    for _ in 0..8 {
        n *= 2;
        let cur = rule.composite(&f, a, b, n);
        evals += 20 * n;
        diff = (cur - prev).norm();
        if diff <= tol * cur.norm() || diff <= abs_floor {
            return Ok(Estimate {
                value: cur,
                error: diff,
                evals,
            });
        }
        prev = cur;
    }
    Err(Error::no_convergence(
        "composite Gauss-Legendre",
        diff / prev.norm().max(f64::MIN_POSITIVE),
        tol,
    ))
}
