//! CSV and JSON result files.
//!
//! Floating-point values are written as `{:.16e}`, i.e. 17 significant
//! digits, which round-trips every `f64`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::experiment::ResultBundle;

pub const CSV_HEADER: [&str; 4] = ["t", "engine", "mean_p", "mean_e"];

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("cannot read {}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `results/fig2.csv`, `results/fig2.json` and `results/fig2` all name the
/// pair `results/fig2.{csv,json}`.
pub fn output_stem(path: &Path) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv" | "json") => path.with_extension(""),
        _ => path.to_owned(),
    }
}

fn with_suffix(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn csv_path(output_path: &str) -> PathBuf {
    with_suffix(&output_stem(Path::new(output_path)), "csv")
}

pub fn json_path(output_path: &str) -> PathBuf {
    with_suffix(&output_stem(Path::new(output_path)), "json")
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>, ExportError> {
    let io_err = |source| ExportError::Io { path: path.to_owned(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err)?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err)
}

/// A CSV writer with LF record terminators.
pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Writes one row per `(engine, t)`, engines in bundle order.
pub fn write_series_csv<W: Write>(bundle: &ResultBundle, w: W) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(CSV_HEADER)?;
    for s in &bundle.series {
        for ((t, p), e) in s.t.iter().zip(&s.mean_p).zip(&s.mean_e) {
            out.write_record([t.to_string(), s.engine.name().to_owned(), format_float(*p), format_float(*e)])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn export_csv(bundle: &ResultBundle, path: &Path) -> Result<(), ExportError> {
    let file = create(path)?;
    write_series_csv(bundle, file).map_err(|source| ExportError::Csv { path: path.to_owned(), source })
}

/// Compact JSON with floats in `{:.16e}` form.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn export_json(bundle: &ResultBundle, path: &Path) -> Result<(), ExportError> {
    let json = to_json(bundle).map_err(|source| ExportError::Json { path: path.to_owned(), source })?;
    let mut file = create(path)?;
    file.write_all(json.as_bytes())
        .and_then(|_| file.write_all(b"\n"))
        .and_then(|_| file.flush())
        .map_err(|source| ExportError::Io { path: path.to_owned(), source })
}

pub fn read_json(path: &Path) -> Result<ResultBundle, ExportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExportError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|source| ExportError::Json { path: path.to_owned(), source })
}

/// Writes `<stem>.csv` and `<stem>.json` for the bundle's `output_path`.
pub fn write_bundle(bundle: &ResultBundle) -> Result<(PathBuf, PathBuf), ExportError> {
    let csv = csv_path(&bundle.config.output_path);
    let json = json_path(&bundle.config.output_path);
    export_csv(bundle, &csv)?;
    export_json(bundle, &json)?;
    Ok((csv, json))
}
