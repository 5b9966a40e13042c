//! Scores ingestion: a `model_id,layer_id,score` CSV joined onto suite
//! entries, for attaching externally measured functionality to
//! representation files.

use std::fs;
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::io::suite::SuiteFile;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub model_id: String,
    pub layer_id: u32,
    pub score: f64,
}

/// Parse a scores CSV with the exact header `model_id,layer_id,score`.
pub fn read_scores_csv(path: &Path) -> Result<Vec<ScoreRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scores(&text)
}

pub fn parse_scores(text: &str) -> Result<Vec<ScoreRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "model_id,layer_id,score" => {}
        Some((_, header)) => {
            return Err(FormatError::ScoresCsv {
                line: 1,
                message: format!("expected header 'model_id,layer_id,score', found {header:?}"),
            }
            .into())
        }
        None => {
            return Err(FormatError::ScoresCsv {
                line: 1,
                message: "file is empty".into(),
            }
            .into())
        }
    }
    let mut rows = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(FormatError::ScoresCsv {
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            }
            .into());
        }
        let layer_id = fields[1].trim().parse::<u32>().map_err(|e| {
            Error::from(FormatError::ScoresCsv {
                line: line_no,
                message: format!("bad layer_id {:?}: {e}", fields[1]),
            })
        })?;
        let score = fields[2].trim().parse::<f64>().map_err(|e| {
            Error::from(FormatError::ScoresCsv {
                line: line_no,
                message: format!("bad score {:?}: {e}", fields[2]),
            })
        })?;
        if !score.is_finite() {
            return Err(FormatError::ScoresCsv {
                line: line_no,
                message: format!("score must be finite, found {score}"),
            }
            .into());
        }
        rows.push(ScoreRow {
            model_id: fields[0].trim().to_string(),
            layer_id,
            score,
        });
    }
    Ok(rows)
}

/// Overwrite entry functionality with matching scores, keyed on
/// `(model_id, layer_id)`. Returns how many entries were updated.
pub fn apply_scores(suite: &mut SuiteFile, scores: &[ScoreRow]) -> usize {
    let mut updated = 0;
    for entry in &mut suite.entries {
        if let Some(row) = scores
            .iter()
            .find(|r| r.model_id == entry.model_id && r.layer_id == entry.layer_id)
        {
            entry.functionality = row.score;
            updated += 1;
        }
    }
    updated
}
