use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::format_sig12;

pub const REPORT_COLUMNS: [&str; 6] = ["sweep", "method", "pc", "stderr", "analytic_pc", "runtime_ms"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub sweep: Option<f64>,
    pub method: String,
    pub pc: f64,
    pub stderr: f64,
    pub analytic_pc: Option<f64>,
    pub runtime_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub version: String,
    pub seed: u64,
    pub trials: usize,
    pub notes: Vec<String>,
    /// The configuration that produced the report, as TOML.
    pub config: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub metadata: ReportMetadata,
}

pub fn artifact_version() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

/// `√(P̂(1-P̂)/trials)`.
pub fn standard_error(pc: f64, trials: usize) -> f64 {
    (pc * (1.0 - pc) / trials as f64).sqrt()
}

fn optional(v: Option<f64>) -> String {
    v.map(format_sig12).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes rows of already formatted fields as LF-terminated CSV.
pub fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(header).map_err(csv_error)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

impl ExperimentReport {
    pub fn to_csv(&self) -> Result<String> {
        write_csv(
            &REPORT_COLUMNS,
            self.rows.iter().map(|r| {
                vec![
                    optional(r.sweep),
                    r.method.clone(),
                    format_sig12(r.pc),
                    format_sig12(r.stderr),
                    optional(r.analytic_pc),
                    optional(r.runtime_ms),
                ]
            }),
        )
    }

    pub fn metadata_toml(&self) -> String {
        toml::to_string(&self.metadata).expect("metadata serializes")
    }

    pub fn rows_for<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.method == method)
    }
}

/// Path of the metadata file written next to a report.
pub fn metadata_path(report_path: &Path) -> PathBuf {
    let mut name = report_path.as_os_str().to_owned();
    name.push(".meta.toml");
    PathBuf::from(name)
}

/// Writes the report CSV and its metadata sidecar.
pub fn emit_report(report: &ExperimentReport, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_csv()?)?;
    std::fs::write(metadata_path(path), report.metadata_toml())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let report = ExperimentReport {
            rows: vec![
                ReportRow { sweep: Some(0.1), method: "honest".into(), pc: 0.9, stderr: standard_error(0.9, 100), analytic_pc: Some(1.0 / 3.0), runtime_ms: None },
                ReportRow { sweep: None, method: "majority_vote".into(), pc: 0.0, stderr: 0.0, analytic_pc: None, runtime_ms: None },
            ],
            metadata: ReportMetadata { version: artifact_version(), seed: 1, trials: 100, notes: vec![], config: String::new() },
        };
        assert_eq!(
            report.to_csv().unwrap(),
            "sweep,method,pc,stderr,analytic_pc,runtime_ms\n0.1,honest,0.9,0.03,0.333333333333,\n,majority_vote,0,0,,\n"
        );
        assert_eq!(metadata_path(Path::new("out/r.csv")), PathBuf::from("out/r.csv.meta.toml"));
    }
}
