//! CSV and JSON emission.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{Method, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Shortest rendering of `x` rounded to `digits` significant digits, in
/// fixed notation for moderate exponents and scientific otherwise.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Columns follow the fixed order tm, spt, semiclassical, master; methods
/// not in the spectrum are left out and unevaluated points stay empty.
pub fn to_csv(spectrum: &Spectrum) -> String {
    let cols: Vec<_> = Method::ALL
        .iter()
        .filter_map(|&m| spectrum.series(m))
        .collect();
    let mut out = String::from("delta1_over_kappa_tot");
    for s in &cols {
        out.push(',');
        out.push_str(s.method.column());
    }
    out.push('\n');
    for (i, &x) in spectrum.delta1_over_kappa_tot.iter().enumerate() {
        out.push_str(&format_significant(x, SIGNIFICANT_DIGITS));
        for s in &cols {
            out.push(',');
            if let Some(t) = s.transmission[i] {
                let _ = write!(out, "{}", format_significant(t, SIGNIFICANT_DIGITS));
            }
        }
        out.push('\n');
    }
    out
}

pub fn to_json(spectrum: &Spectrum) -> Result<String> {
    Ok(serde_json::to_string_pretty(spectrum)?)
}

pub fn from_json(text: &str) -> Result<Spectrum> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(spectrum: &Spectrum, format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(to_csv(spectrum)),
        Format::Json => to_json(spectrum),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn emit(spectrum: &Spectrum, format: Format, path: &Path) -> Result<()> {
    write_text(path, &render(spectrum, format)?)
}
