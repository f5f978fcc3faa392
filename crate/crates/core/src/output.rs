//! Result files: `ale.json`, `stats.csv`, `regions.csv` and optional SVG
//! plots.
//!
//! JSON keys are written in a fixed order and every float is rendered with
//! 17 significant digits in exponent form, so parsing a file and writing it
//! again reproduces it byte for byte. CSV numbers use the shortest decimal
//! that parses back to the same value.

use std::io;
use std::path::Path;

use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

use crate::ale::AleX;
use crate::bootstrap::BootAleCurve;
use crate::data::ColumnKind;
use crate::error::{Error, Result};
use crate::regions::{RegionRowCategorical, RegionRowNumeric};
use crate::stats::{AleStats, AlerBand};

#[derive(Debug, Clone, PartialEq)]
pub enum Regions {
    Numeric(Vec<RegionRowNumeric>),
    Categorical(Vec<RegionRowCategorical>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableResult {
    pub kind: ColumnKind,
    pub curve: BootAleCurve,
    pub stats: AleStats,
    pub regions: Regions,
    /// Raw x values for the plot rug (numeric variables only).
    pub rug: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootSummary {
    pub mode: &'static str,
    pub n_it: usize,
    pub ci_level: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResults {
    pub outcome: String,
    pub n_rows: usize,
    pub median: f64,
    pub y_range: f64,
    pub model: String,
    pub boot: BootSummary,
    pub rand_it: usize,
    pub band: AlerBand,
    pub variables: Vec<VariableResult>,
}

/// Writes floats as `d.dddddddddddddddde±x` (17 significant digits).
struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

/// Serialises a JSON value with the fixed float rendering and a trailing
/// newline.
pub fn render_json(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    serde::Serialize::serialize(value, &mut ser).expect("writing to a Vec cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn curve_json(kind: ColumnKind, c: &BootAleCurve) -> Value {
    let ale_x = match &c.ale_x {
        AleX::Numeric(v) => nums(v),
        AleX::Categorical(levels) => Value::Array(levels.iter().map(|l| json!(l)).collect()),
    };
    let mut m = Map::new();
    m.insert("kind".into(), json!(kind.as_str()));
    m.insert("ale_x".into(), ale_x);
    m.insert("ale_n".into(), json!(c.ale_n));
    m.insert("ale_y".into(), nums(&c.ale_y));
    m.insert("ale_y_mean".into(), nums(&c.ale_y_mean));
    m.insert("ale_y_median".into(), nums(&c.ale_y_median));
    m.insert("ale_y_lo".into(), nums(&c.ale_y_lo));
    m.insert("ale_y_hi".into(), nums(&c.ale_y_hi));
    m.insert("center".into(), json!(c.center_kind.as_str()));
    m.insert("center_value".into(), num(c.center_value));
    Value::Object(m)
}

pub fn ale_json_value(r: &AnalysisResults) -> Value {
    let mut boot = Map::new();
    boot.insert("mode".into(), json!(r.boot.mode));
    boot.insert("n_it".into(), json!(r.boot.n_it));
    boot.insert("ci_level".into(), num(r.boot.ci_level));
    boot.insert("seed".into(), json!(r.boot.seed));

    let mut band = Map::new();
    band.insert("rand_it".into(), json!(r.rand_it));
    band.insert("level".into(), num(r.band.level));
    band.insert("outer_level".into(), num(r.band.outer_level));
    band.insert("center".into(), num(r.band.center));
    band.insert("lower".into(), num(r.band.lower));
    band.insert("upper".into(), num(r.band.upper));
    band.insert("outer_lower".into(), num(r.band.outer_lower));
    band.insert("outer_upper".into(), num(r.band.outer_upper));

    let mut vars = Map::new();
    for v in &r.variables {
        vars.insert(v.curve.variable.clone(), curve_json(v.kind, &v.curve));
    }

    let mut top = Map::new();
    top.insert("outcome".into(), json!(r.outcome));
    top.insert("n_rows".into(), json!(r.n_rows));
    top.insert("median".into(), num(r.median));
    top.insert("y_range".into(), num(r.y_range));
    top.insert("model".into(), json!(r.model));
    top.insert("boot".into(), Value::Object(boot));
    top.insert("band".into(), Value::Object(band));
    top.insert("variables".into(), Value::Object(vars));
    Value::Object(top)
}

pub fn ale_json(r: &AnalysisResults) -> String {
    render_json(&ale_json_value(r))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidData(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv input is UTF-8"))
}

fn f(v: f64) -> String {
    format!("{v}")
}

pub const STATS_HEADER: [&str; 8] = [
    "variable",
    "statistic",
    "estimate",
    "p.value",
    "conf.low",
    "median",
    "mean",
    "conf.high",
];

pub fn stats_csv(r: &AnalysisResults) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(STATS_HEADER)?;
    for v in &r.variables {
        for (kind, s) in v.stats.iter() {
            w.write_record([
                v.curve.variable.clone(),
                kind.name().to_string(),
                f(s.estimate),
                s.p_value.map(f).unwrap_or_default(),
                f(s.conf_low),
                f(s.median),
                f(s.mean),
                f(s.conf_high),
            ])?;
        }
    }
    finish(w)
}

pub const REGIONS_HEADER: [&str; 13] = [
    "variable",
    "kind",
    "start_x",
    "end_x",
    "x_span",
    "n",
    "n_pct",
    "start_y",
    "end_y",
    "trend",
    "x",
    "y",
    "relative_to_mid",
];

pub fn regions_csv(r: &AnalysisResults) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(REGIONS_HEADER)?;
    for v in &r.variables {
        let name = v.curve.variable.as_str();
        match &v.regions {
            Regions::Numeric(rows) => {
                for row in rows {
                    w.write_record([
                        name,
                        "numeric",
                        &f(row.start_x),
                        &f(row.end_x),
                        &f(row.x_span),
                        &row.n.to_string(),
                        &f(row.n_pct),
                        &f(row.start_y),
                        &f(row.end_y),
                        &f(row.trend),
                        "",
                        "",
                        row.relative_to_mid.as_str(),
                    ])?;
                }
            }
            Regions::Categorical(rows) => {
                for row in rows {
                    w.write_record([
                        name,
                        "categorical",
                        "",
                        "",
                        "",
                        &row.n.to_string(),
                        &f(row.n_pct),
                        "",
                        "",
                        "",
                        &row.x,
                        &f(row.y),
                        row.relative_to_mid.as_str(),
                    ])?;
                }
            }
        }
    }
    finish(w)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Plot file name for a variable; path separators and other unsafe
/// characters become `_`.
pub fn plot_file_name(variable: &str) -> String {
    let safe: String = variable
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{safe}.svg")
}

/// Writes every result file into `dir`, creating it if needed.
pub fn emit_outputs(r: &AnalysisResults, dir: &Path, plots: bool) -> Result<()> {
    let io_err = |source| Error::Io {
        path: dir.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io_err)?;
    // Render everything before touching the files.
    let json = ale_json(r);
    let stats = stats_csv(r)?;
    let regions = regions_csv(r)?;
    write_file(&dir.join("ale.json"), &json)?;
    write_file(&dir.join("stats.csv"), &stats)?;
    write_file(&dir.join("regions.csv"), &regions)?;
    if plots {
        let plot_dir = dir.join("plots");
        std::fs::create_dir_all(&plot_dir).map_err(|source| Error::Io {
            path: plot_dir.clone(),
            source,
        })?;
        for v in &r.variables {
            let rug = (!v.rug.is_empty()).then_some(v.rug.as_slice());
            let svg = crate::plot::plot_svg(&v.curve, &r.band, rug);
            write_file(&plot_dir.join(plot_file_name(&v.curve.variable)), &svg)?;
        }
    }
    Ok(())
}
