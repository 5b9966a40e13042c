//! Suite files: the JSON schema that ties representation files to
//! functionality scores, and the loader that turns one into a
//! [`LoadedSuite`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{LoadedSuite, ReferenceRule, SuiteConfig};
use crate::error::{Error, FormatError, Result};
use crate::io::npy::{read_matrix, Orientation};
use crate::metrics::MetricId;
use crate::repcore::{CenteringAxis, RawRepresentation};

/// One representation file plus its metadata and score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFileEntry {
    /// Path to the NPY file, relative to the suite file's directory unless
    /// absolute.
    pub path: String,
    pub functionality: f64,
    pub model_id: String,
    pub layer_id: u32,
    #[serde(default)]
    pub tags: BTreeMap<String, String>,
    /// Whether rows of the stored array are neurons. Never guessed from the
    /// shape; defaults to the layout this tool writes.
    #[serde(default)]
    pub orientation: Orientation,
}

/// The on-disk suite schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFile {
    pub entries: Vec<SuiteFileEntry>,
    #[serde(default)]
    pub reference_rule: ReferenceRule,
    #[serde(default = "default_true")]
    pub include_reference_pair: bool,
    #[serde(default)]
    pub centering: CenteringAxis,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<MetricId>,
}

fn default_true() -> bool {
    true
}

fn default_metrics() -> Vec<MetricId> {
    MetricId::ALL.to_vec()
}

impl SuiteFile {
    pub fn config(&self) -> SuiteConfig {
        SuiteConfig {
            reference_rule: self.reference_rule,
            include_reference_pair: self.include_reference_pair,
            centering: self.centering,
            metrics: self.metrics.clone(),
        }
    }
}

/// Parse and validate a suite file without touching the representation
/// files. The first problem found is reported with its JSON pointer.
pub fn parse_suite(json: &str) -> Result<SuiteFile> {
    let deserializer = &mut serde_json::Deserializer::from_str(json);
    let suite: SuiteFile = serde_path_to_error::deserialize(deserializer).map_err(|err| {
        Error::from(FormatError::Json {
            pointer: path_to_pointer(&err.path().to_string()),
            message: err.inner().to_string(),
        })
    })?;
    validate_suite(&suite)?;
    Ok(suite)
}

fn validate_suite(suite: &SuiteFile) -> Result<()> {
    let fail = |pointer: &str, message: String| -> Result<()> {
        Err(FormatError::SuiteValidation {
            pointer: pointer.to_string(),
            message,
        }
        .into())
    };
    if suite.entries.len() < 2 {
        return fail(
            "/entries",
            format!("a suite needs at least 2 entries, found {}", suite.entries.len()),
        );
    }
    for (i, entry) in suite.entries.iter().enumerate() {
        if entry.path.is_empty() {
            return fail(&format!("/entries/{i}/path"), "path is empty".into());
        }
        if !entry.functionality.is_finite() {
            return fail(
                &format!("/entries/{i}/functionality"),
                format!("functionality must be finite, found {}", entry.functionality),
            );
        }
        if entry.model_id.is_empty() {
            return fail(&format!("/entries/{i}/model_id"), "model_id is empty".into());
        }
    }
    if suite.metrics.is_empty() {
        return fail("/metrics", "metric list must be non-empty".into());
    }
    if let ReferenceRule::Explicit(idx) = suite.reference_rule {
        if idx >= suite.entries.len() {
            return fail(
                "/reference_rule",
                format!(
                    "explicit index {idx} out of range for {} entries",
                    suite.entries.len()
                ),
            );
        }
    }
    Ok(())
}

/// Read a suite file and load every representation it references.
pub fn load_suite(path: &Path) -> Result<(SuiteFile, LoadedSuite)> {
    let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let suite = parse_suite(&json)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let loaded = load_entries(&suite, base)?;
    Ok((suite, loaded))
}

/// Resolve and load every entry of an already-parsed suite.
pub fn load_entries(suite: &SuiteFile, base_dir: &Path) -> Result<LoadedSuite> {
    let raw_entries = suite
        .entries
        .iter()
        .map(|entry| {
            let full = resolve(base_dir, &entry.path);
            let matrix = read_matrix(&full, entry.orientation)?;
            let mut rep = RawRepresentation::new(matrix, entry.model_id.clone(), entry.layer_id)?;
            rep.tags = entry.tags.clone();
            Ok((rep, entry.functionality))
        })
        .collect::<Result<Vec<_>>>()?;
    LoadedSuite::from_raw(raw_entries, suite.config())
}

/// Serialize a suite file with stable field order and a trailing newline.
pub fn write_suite(path: &Path, suite: &SuiteFile) -> Result<()> {
    let mut json = serde_json::to_string_pretty(suite).map_err(|e| {
        Error::InvalidConfig(format!("suite serialization failed: {e}"))
    })?;
    json.push('\n');
    super::atomic_write(path, json.as_bytes())
}

fn resolve(base: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// serde_path_to_error paths look like `entries[3].functionality`; reports
/// use JSON pointers (`/entries/3/functionality`).
fn path_to_pointer(path: &str) -> String {
    if path.is_empty() || path == "." {
        return "/".to_string();
    }
    let mut pointer = String::new();
    for segment in path.split('.') {
        let mut rest = segment;
        while let Some(open) = rest.find('[') {
            let name = &rest[..open];
            if !name.is_empty() {
                pointer.push('/');
                pointer.push_str(name);
            }
            let close = rest[open..].find(']').map(|c| open + c).unwrap_or(rest.len());
            pointer.push('/');
            pointer.push_str(&rest[open + 1..close]);
            rest = rest.get(close + 1..).unwrap_or("");
        }
        if !rest.is_empty() {
            pointer.push('/');
            pointer.push_str(rest);
        }
    }
    if pointer.is_empty() {
        "/".to_string()
    } else {
        pointer
    }
}
