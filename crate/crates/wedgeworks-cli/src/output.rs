use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use crate::config::Format;

pub const UNITS: &str = "natural units c = hbar = k_B = 1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub omega: f64,
    pub omega_prime: f64,
    pub branch: String,
    pub value_re: f64,
    pub value_im: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRow {
    pub gap: f64,
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmsRow {
    pub t_eff: f64,
    pub max_residual: f64,
    pub worst_gap: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub family: String,
    pub omega: f64,
    pub k: f64,
    pub coefficient: String,
    pub closed_re: f64,
    pub closed_im: f64,
    pub oracle_re: f64,
    pub oracle_im: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rows", rename_all = "kebab-case")]
pub enum Table {
    Spectrum(Vec<SpectrumRow>),
    Response(Vec<ResponseRow>),
    Kms(Vec<KmsRow>),
    Oracle(Vec<OracleRow>),
    Check(Vec<CheckRow>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Spectrum(r) => r.len(),
            Table::Response(r) => r.len(),
            Table::Kms(r) => r.len(),
            Table::Oracle(r) => r.len(),
            Table::Check(r) => r.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Meta {
    pub scenario: String,
    pub units: String,
    /// Selected variants of forms with more than one printed version.
    pub variants: BTreeMap<String, String>,
    pub parameters: BTreeMap<String, f64>,
    /// Error and truncation bounds, fit residuals.
    pub bounds: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Meta {
    pub fn new(scenario: &str) -> Self {
        Meta {
            scenario: scenario.into(),
            units: UNITS.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    #[serde(flatten)]
    pub table: Table,
}

fn write_csv_rows<T: Serialize>(w: &mut csv::Writer<&mut Vec<u8>>, rows: &[T]) -> anyhow::Result<()> {
    for r in rows {
        w.serialize(r)?;
    }
    Ok(())
}

/// f64 fields print in shortest round-trip form, so CSV and JSON both
/// reproduce the values bit for bit.
pub fn render(report: &Report, format: Format) -> anyhow::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# wedgeworks {}; {}", report.meta.scenario, report.meta.units)?;
            for (k, v) in &report.meta.variants {
                writeln!(out, "# variant {k} = {v}")?;
            }
            for (k, v) in &report.meta.parameters {
                writeln!(out, "# parameter {k} = {v:e}")?;
            }
            for (k, v) in &report.meta.bounds {
                writeln!(out, "# bound {k} = {v:e}")?;
            }
            for n in &report.meta.notes {
                writeln!(out, "# note {n}")?;
            }
            let mut body = Vec::new();
            {
                let mut w = csv::Writer::from_writer(&mut body);
                match &report.table {
                    Table::Spectrum(r) => write_csv_rows(&mut w, r)?,
                    Table::Response(r) => write_csv_rows(&mut w, r)?,
                    Table::Kms(r) => write_csv_rows(&mut w, r)?,
                    Table::Oracle(r) => write_csv_rows(&mut w, r)?,
                    Table::Check(r) => write_csv_rows(&mut w, r)?,
                }
                w.flush()?;
            }
            out.extend(body);
            Ok(out)
        }
    }
}

pub fn format_for(path: Option<&Path>, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    })
}

/// Reads a response curve written by the response scenarios, as CSV
/// (`gap,value[,tail_bound]`, `#` comments allowed) or JSON.
pub fn read_curve(path: &Path) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Vec<(f64, f64)> = if text.trim_start().starts_with('{') {
        let report: Report = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        match report.table {
            Table::Response(r) => r.into_iter().map(|r| (r.gap, r.value)).collect(),
            _ => bail!("{} does not hold a response curve", path.display()),
        }
    } else {
        #[derive(Deserialize)]
        struct Row {
            gap: f64,
            value: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        rdr.deserialize::<Row>()
            .map(|r| r.map(|r| (r.gap, r.value)))
            .collect::<Result<_, _>>()
            .with_context(|| format!("parsing {}", path.display()))?
    };
    Ok(rows.into_iter().unzip())
}
