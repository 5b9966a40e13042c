//! File formats: NPY representations, suite JSON, report JSON, pair-table
//! and scores CSV. All writes go through a temp file plus rename so readers
//! never observe partial output.

pub mod npy;
pub mod report;
pub mod scores;
pub mod suite;

pub use npy::{read_matrix, write_matrix, Orientation};
pub use report::{read_report, write_pair_table, write_report, ReportFile, ReportPayload};
pub use scores::{apply_scores, read_scores_csv, ScoreRow};
pub use suite::{load_suite, parse_suite, write_suite, SuiteFile, SuiteFileEntry};

use std::path::Path;

use crate::error::{Error, Result};

/// Write bytes atomically: temp file in the destination directory, then
/// rename over the target.
pub(crate) fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
