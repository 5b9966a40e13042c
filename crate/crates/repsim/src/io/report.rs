//! Report files: versioned JSON envelopes around benchmark, bootstrap, and
//! detection results, plus CSV pair tables.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::{BenchmarkReport, DetectionResult};
use crate::error::{Error, FormatError, Result};
use crate::metrics::MetricId;
use crate::stats::BootstrapReport;

pub const SCHEMA_VERSION: u32 = 1;

/// The payload a report file carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportPayload {
    Benchmark(BenchmarkReport),
    Bootstrap {
        resamples: usize,
        seed: u64,
        metrics: Vec<MetricId>,
        reports: Vec<BootstrapReport>,
    },
    Detection {
        metric: MetricId,
        #[serde(flatten)]
        result: DetectionResult,
    },
}

/// Versioned envelope written to disk. `generated_at` is optional so that
/// seeded runs stay byte-identical by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generated_at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub suite_fingerprint: Option<String>,
    /// Echo of the configuration that produced the payload.
    pub config: serde_json::Value,
    pub payload: ReportPayload,
}

impl ReportFile {
    pub fn new(payload: ReportPayload, config: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_at: None,
            suite_fingerprint: None,
            config,
            payload,
        }
    }

    pub fn with_fingerprint(mut self, fingerprint: impl Into<String>) -> Self {
        self.suite_fingerprint = Some(fingerprint.into());
        self
    }

    pub fn with_timestamp(mut self, stamp: impl Into<String>) -> Self {
        self.generated_at = Some(stamp.into());
        self
    }
}

pub fn write_report(path: &Path, report: &ReportFile) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::InvalidConfig(format!("report serialization failed: {e}")))?;
    json.push('\n');
    super::atomic_write(path, json.as_bytes())
}

pub fn read_report(path: &Path) -> Result<ReportFile> {
    let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report: ReportFile = serde_json::from_str(&json).map_err(|e| {
        Error::from(FormatError::Json {
            pointer: "/".into(),
            message: e.to_string(),
        })
    })?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(FormatError::SchemaVersion {
            found: report.schema_version,
            supported: SCHEMA_VERSION,
        }
        .into());
    }
    Ok(report)
}

/// Write the benchmark pair table as CSV: one row per entry, one distance
/// column per metric.
pub fn write_pair_table(path: &Path, report: &BenchmarkReport) -> Result<()> {
    let metrics: Vec<MetricId> = report
        .pairs
        .first()
        .map(|row| row.distances.keys().copied().collect())
        .unwrap_or_default();
    let mut out = String::new();
    out.push_str("entry_index,model_id,layer_id,delta_f");
    for metric in &metrics {
        out.push(',');
        out.push_str(metric.as_str());
    }
    out.push('\n');
    for row in &report.pairs {
        out.push_str(&format!(
            "{},{},{},{}",
            row.entry_index, row.model_id, row.layer_id, row.delta_f
        ));
        for metric in &metrics {
            out.push(',');
            out.push_str(&row.distances[metric].to_string());
        }
        out.push('\n');
    }
    super::atomic_write(path, out.as_bytes())
}
