//! Scenario configuration: CLI flags and a flat JSON config file share one
//! parameter set. Precedence: default < WEDGEWORKS_TOL < config file < flag.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

pub const TOL_ENV: &str = "WEDGEWORKS_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    RindlerSpectrum,
    DiamondSpectrum,
    CrossTerm,
    Antiparallel,
    #[value(name = "transverse-3p1")]
    #[serde(rename = "transverse-3p1")]
    Transverse3p1,
    DesitterResponse,
    BtzResponse,
    KmsCheck,
    Oracle,
    Selftest,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::RindlerSpectrum => "rindler-spectrum",
            Scenario::DiamondSpectrum => "diamond-spectrum",
            Scenario::CrossTerm => "cross-term",
            Scenario::Antiparallel => "antiparallel",
            Scenario::Transverse3p1 => "transverse-3p1",
            Scenario::DesitterResponse => "desitter-response",
            Scenario::BtzResponse => "btz-response",
            Scenario::KmsCheck => "kms-check",
            Scenario::Oracle => "oracle",
            Scenario::Selftest => "selftest",
        }
    }

    pub fn is_spectrum(self) -> bool {
        matches!(
            self,
            Scenario::RindlerSpectrum
                | Scenario::DiamondSpectrum
                | Scenario::CrossTerm
                | Scenario::Antiparallel
                | Scenario::Transverse3p1
        )
    }

    pub fn is_response(self) -> bool {
        matches!(self, Scenario::DesitterResponse | Scenario::BtzResponse)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossForm {
    MainText,
    Appendix,
    Quadrature,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiamondShift {
    Printed,
    CommonPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prefactor {
    Canonical,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InPlane {
    Printed,
    LightCone,
}

/// Every physical and numerical knob, all optional so flags and file merge.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    /// Acceleration (or diamond scale) a.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Null shift s of the second wedge (apex at V = −s/a).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Diamond index n of the second diamond.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    /// Frequency grid: lo:hi:count (geometric) or a comma list.
    #[arg(long)]
    pub omega_grid: Option<String>,
    /// Second frequency for the cross-term scenario.
    #[arg(long)]
    pub omega_prime: Option<f64>,
    /// Gap grid: lo:hi:count (linear) or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub gap_grid: Option<String>,
    /// Packet width relative to its centre, σ/ω₀.
    #[arg(long)]
    pub packet_width: Option<f64>,
    /// Plane-wave momentum for the oracle scenario.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ky: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dz: Option<f64>,
    /// de Sitter surface gravity κ.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Separation of the superposed de Sitter worldlines.
    #[arg(long)]
    pub separation: Option<f64>,
    /// BTZ mass M.
    #[arg(long, visible_alias = "M")]
    #[serde(alias = "M")]
    pub mass: Option<f64>,
    /// AdS length l.
    #[arg(long, visible_alias = "l")]
    #[serde(alias = "l")]
    pub ads_length: Option<f64>,
    /// Detector radius R.
    #[arg(long, visible_alias = "R")]
    #[serde(alias = "R")]
    pub radius: Option<f64>,
    /// Angular separation δφ; selects the superposed BTZ response.
    #[arg(long)]
    pub delta_phi: Option<f64>,
    /// Image-sum truncation.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Gaussian switching width σ.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum)]
    pub cross_form: Option<CrossForm>,
    #[arg(long, value_enum)]
    pub diamond_shift: Option<DiamondShift>,
    #[arg(long, value_enum)]
    pub btz_prefactor: Option<Prefactor>,
    #[arg(long, value_enum)]
    pub in_plane: Option<InPlane>,
    /// Response curve (CSV or JSON) for kms-check.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($hi:expr, $lo:expr; $($f:ident),*) => {
        Params { $($f: $hi.$f.or($lo.$f),)* }
    };
}

impl Params {
    pub fn from_file(path: &Path) -> anyhow::Result<Params> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields of `self` win over those of `lower`.
    pub fn over(self, lower: Params) -> Params {
        merge_fields!(self, lower; scenario, a, s, n, omega_grid, omega_prime, gap_grid, packet_width, k, kx, ky, kz,
            dy, dz, kappa, separation, mass, ads_length, radius, delta_phi, n_max, sigma, tolerance, cross_form,
            diamond_shift, btz_prefactor, in_plane, input)
    }
}

/// Parameters after defaults, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub scenario: Scenario,
    pub p: Params,
    pub a: f64,
    pub s: f64,
    pub n: i64,
    pub packet_width: f64,
    pub tolerance: f64,
    pub omegas: Vec<f64>,
    pub gaps: Vec<f64>,
}

fn parse_grid(spec: &str, geometric: bool, name: &str, v: &mut Vec<String>) -> Vec<f64> {
    let spec = spec.trim();
    if spec.is_empty() {
        v.push(format!("{name}: grid non-empty"));
        return vec![];
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let parsed = (parts.len() == 3)
            .then(|| {
                Some((
                    parts[0].trim().parse::<f64>().ok()?,
                    parts[1].trim().parse::<f64>().ok()?,
                    parts[2].trim().parse::<usize>().ok()?,
                ))
            })
            .flatten();
        let Some((lo, hi, count)) = parsed else {
            v.push(format!("{name}: expected lo:hi:count, got {spec:?}"));
            return vec![];
        };
        if count == 0 {
            v.push(format!("{name}: grid non-empty"));
            return vec![];
        }
        if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            v.push(format!("{name}: need finite lo <= hi"));
            return vec![];
        }
        if geometric {
            if !(lo > 0.0) {
                v.push(format!("{name}: frequencies must be positive"));
                return vec![];
            }
            return wedgeworks::superpose::geometric_grid(lo, hi, count).unwrap_or_default();
        }
        if count == 1 {
            return vec![lo];
        }
        let h = (hi - lo) / (count - 1) as f64;
        return (0..count).map(|i| if i + 1 == count { hi } else { lo + h * i as f64 }).collect();
    }
    let mut out = Vec::new();
    for t in spec.split(',') {
        match t.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => out.push(x),
            _ => {
                v.push(format!("{name}: cannot parse {t:?}"));
                return vec![];
            }
        }
    }
    if geometric && out.iter().any(|x| !(*x > 0.0)) {
        v.push(format!("{name}: frequencies must be positive"));
    }
    out
}

fn positive(v: &mut Vec<String>, name: &str, x: Option<f64>) {
    if let Some(x) = x {
        if !(x > 0.0) || !x.is_finite() {
            v.push(format!("{name} must be positive"));
        }
    }
}

fn required(v: &mut Vec<String>, name: &str, x: Option<f64>) {
    if x.is_none() {
        v.push(format!("{name} is required"));
    }
}

/// Merges flags over the config file over the environment over defaults and
/// collects every violation.
pub fn resolve(flags: Params, file: Option<Params>, default_scenario: Option<Scenario>) -> (Option<Resolved>, Vec<String>) {
    let mut v = Vec::new();
    let env_tol = match std::env::var(TOL_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) => Some(t),
            Err(_) => {
                v.push(format!("{TOL_ENV} must be a number, got {s:?}"));
                None
            }
        },
        Err(_) => None,
    };
    let p = flags.over(file.unwrap_or_default());
    let scenario = p.scenario.or(default_scenario);
    if scenario.is_none() {
        v.push("scenario is required".into());
    }
    let a = p.a.unwrap_or(1.0);
    positive(&mut v, "a", Some(a));
    for (name, x) in [
        ("packet-width", p.packet_width),
        ("kappa", p.kappa),
        ("mass", p.mass),
        ("ads-length", p.ads_length),
        ("radius", p.radius),
        ("sigma", p.sigma),
        ("omega-prime", p.omega_prime),
        ("k", p.k),
    ] {
        positive(&mut v, name, x);
    }
    if let Some(s) = p.separation {
        if !(s >= 0.0) {
            v.push("separation must be non-negative".into());
        }
    }
    let tolerance = p.tolerance.or(env_tol).unwrap_or(wedgeworks::DEFAULT_TOL);
    if !(tolerance > 0.0 && tolerance < 1.0) {
        v.push("tolerance must lie in (0, 1)".into());
    }
    let packet_width = p.packet_width.unwrap_or(0.1);
    if packet_width >= 0.2 {
        v.push("packet width must be < ω₀/5 (packet-width < 0.2)".into());
    }
    if let Some(n) = p.n_max {
        if n == 0 {
            v.push("n-max must be at least 1".into());
        }
    }
    if let Some(d) = p.delta_phi {
        if !(0.0..2.0 * PI).contains(&d) {
            v.push("delta-phi must lie in [0, 2π)".into());
        }
    }
    let default_omega = format!("{}:{}:32", 0.1 * a, 10.0 * a);
    let omegas = parse_grid(p.omega_grid.as_deref().unwrap_or(&default_omega), true, "omega-grid", &mut v);
    let gaps = parse_grid(p.gap_grid.as_deref().unwrap_or("-3:3:61"), false, "gap-grid", &mut v);
    let n = p.n.unwrap_or(1);
    let Some(scenario) = scenario else {
        return (None, v);
    };
    match scenario {
        Scenario::DiamondSpectrum if n < 0 => v.push("n must be non-negative".into()),
        Scenario::CrossTerm => {
            required(&mut v, "omega-prime", p.omega_prime);
            if p.n.is_some() && n < 1 {
                v.push("n must be at least 1 for the diamond cross term".into());
            }
        }
        Scenario::Transverse3p1 => {
            let kperp = p.ky.unwrap_or(0.5).hypot(p.kz.unwrap_or(0.0));
            if !(kperp > 0.0) {
                v.push("ky and kz must not both vanish".into());
            }
        }
        Scenario::BtzResponse => {
            let m = p.mass.unwrap_or(1.0);
            let l = p.ads_length.unwrap_or(1.0);
            let r = p.radius.unwrap_or(1.5 * m.sqrt() * l);
            if m > 0.0 && l > 0.0 && !(r > m.sqrt() * l) {
                v.push("radius must lie outside the horizon sqrt(mass)·ads-length".into());
            }
        }
        Scenario::KmsCheck if p.input.is_none() => v.push("input is required for kms-check".into()),
        _ => {}
    }
    (
        Some(Resolved {
            scenario,
            p,
            a,
            s: 0.0,
            n,
            packet_width,
            tolerance,
            omegas,
            gaps,
        })
        .map(|mut r| {
            r.s = r.p.s.unwrap_or(0.0);
            r
        }),
        v,
    )
}
