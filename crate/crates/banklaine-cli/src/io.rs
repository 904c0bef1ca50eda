//! Argument parsing and output plumbing shared by every subcommand.
//!
//! Complex numbers travel as `a+bi` with no spaces. All numeric output is
//! rounded to 12 significant digits before rendering, so repeated runs are
//! byte-identical. Files are written atomically (temp file, then rename).

use banklaine::families::FamilyError;
use banklaine::growth::GrowthError;
use banklaine::ode::OdeError;
use banklaine::qc::QcError;
use banklaine::quad::QuadError;
use banklaine::trees::{JsonViolation, TreeError};
use banklaine::{cx, C64};
use serde_json::{json, Value};
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {e}"))
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::EmptyPath => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::InvalidInstance(_) => CliError::Validation(e.to_string()),
            FamilyError::Quad(q) => q.into(),
        }
    }
}

impl From<OdeError> for CliError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::DegenerateInit | OdeError::UnboundedPath => {
                CliError::Validation(e.to_string())
            }
            OdeError::Quad(q) => q.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<GrowthError> for CliError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::InvalidM { .. } | GrowthError::HypothesisViolated { .. } => {
                CliError::Validation(e.to_string())
            }
            GrowthError::Quad(q) => q.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<QcError> for CliError {
    fn from(e: QcError) -> Self {
        match e {
            QcError::PoleAt { .. }
            | QcError::NotDiffeo { .. }
            | QcError::DegenerateJacobian { .. } => CliError::Numerical(e.to_string()),
            QcError::Quad(q) => q.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<JsonViolation> for CliError {
    fn from(e: JsonViolation) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// One command's result in every renderable shape.
pub struct Rendered {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
}

impl Rendered {
    pub fn new(json: Value, text: String) -> Self {
        Rendered {
            json,
            text,
            csv: None,
        }
    }
}

pub fn emit(r: &Rendered, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let body = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&r.json)
                .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        OutputFormat::Text => {
            let mut s = r.text.clone();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
        OutputFormat::Csv => r.csv.clone().ok_or_else(|| {
            CliError::Usage("this command has no tabular output; use json or text".into())
        })?,
    };
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => atomic_write(path, body.as_bytes()),
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("'{}' is not a file path", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = path.with_file_name(format!("{name}.tmp"));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Round to 12 significant digits; the common currency of all output.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

pub fn fmt12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn fmt_c64(z: C64) -> String {
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{}+{}i", fmt12(z.re), fmt12(z.im))
    } else {
        format!("{}-{}i", fmt12(z.re), fmt12(-z.im))
    }
}

pub fn jnum(x: f64) -> Value {
    let r = sig12(x);
    if r.is_finite() {
        json!(r)
    } else {
        json!(r.to_string())
    }
}

pub fn jcx(z: C64) -> Value {
    json!({"re": jnum(z.re), "im": jnum(z.im)})
}

pub fn parse_c64(s: &str) -> Result<C64, String> {
    let t = s.trim();
    let fail = || format!("cannot parse '{s}' as a complex number; write a+bi with no spaces");
    if t.is_empty() || t.contains(' ') {
        return Err(fail());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| cx(re, 0.0)).map_err(|_| fail());
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let imag = |part: &str| -> Result<f64, String> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => part.parse::<f64>().map_err(|_| fail()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| fail())?;
            Ok(cx(re, imag(&body[k..])?))
        }
        None => Ok(cx(0.0, imag(body)?)),
    }
}

pub fn parse_c64_list(s: &str) -> Result<Vec<C64>, String> {
    s.split(',').map(parse_c64).collect()
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse '{p}' as a number"))
        })
        .collect()
}

/// Geometric ladder from `lo` to `hi` with `n` rungs.
pub fn geometric_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo && lo > 0.0);
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    let mut r = lo;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n - 1 {
        out.push(r);
        r *= ratio;
    }
    out.push(hi);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms_parse() {
        assert_eq!(parse_c64("1").unwrap(), cx(1.0, 0.0));
        assert_eq!(parse_c64("-2.5").unwrap(), cx(-2.5, 0.0));
        assert_eq!(parse_c64("i").unwrap(), cx(0.0, 1.0));
        assert_eq!(parse_c64("-i").unwrap(), cx(0.0, -1.0));
        assert_eq!(parse_c64("2i").unwrap(), cx(0.0, 2.0));
        assert_eq!(parse_c64("1+2i").unwrap(), cx(1.0, 2.0));
        assert_eq!(parse_c64("1-2i").unwrap(), cx(1.0, -2.0));
        assert_eq!(parse_c64("-1.5e-3+2e4i").unwrap(), cx(-1.5e-3, 2e4));
        assert_eq!(parse_c64("1e-3i").unwrap(), cx(0.0, 1e-3));
        assert_eq!(parse_c64("3+i").unwrap(), cx(3.0, 1.0));
        assert_eq!(parse_c64("3-i").unwrap(), cx(3.0, -1.0));
        assert!(parse_c64("1 + 2i").is_err());
        assert!(parse_c64("foo").is_err());
        assert!(parse_c64("").is_err());
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(sig12(1.0 / 3.0), 3.33333333333e-1);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(fmt12(2.0), "2.00000000000e0");
    }
}
