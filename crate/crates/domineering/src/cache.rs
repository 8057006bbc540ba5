//! Append-only JSONL results cache.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::board::Player;
use crate::error::DomineeringError;
use crate::search::MoveOrder;
use crate::tt::ReplacementScheme;

/// Environment variable overriding the cache path.
pub const CACHE_ENV_VAR: &str = "DOMINEERING_CACHE";

/// Engine settings that produced a record; identical settings produce
/// identical fingerprints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigFingerprint {
    pub tt_bits: u8,
    pub tt_scheme: ReplacementScheme,
    pub knowledge: bool,
    pub tt_enabled: bool,
    pub ordering: MoveOrder,
    pub seed: u64,
}

/// One solved-board result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub rows: u16,
    pub cols: u16,
    pub to_move: Player,
    pub winner: Player,
    pub nodes: u64,
    pub elapsed_ms: u64,
    pub config: ConfigFingerprint,
    /// Unix timestamp, seconds.
    pub timestamp: u64,
}

/// Append one record to the JSONL cache file, creating it if needed.
pub fn append_record(path: &Path, record: &ResultRecord) -> Result<(), DomineeringError> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let line = serde_json::to_string(record).expect("record serializes");
    writeln!(file, "{}", line)?;
    Ok(())
}

/// Read all records back.
pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>, DomineeringError> {
    let file = std::fs::File::open(path)?;
    let mut records = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| DomineeringError::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultRecord {
        ResultRecord {
            rows: 7,
            cols: 7,
            to_move: Player::Vertical,
            winner: Player::Vertical,
            nodes: 12345,
            elapsed_ms: 67,
            config: ConfigFingerprint {
                tt_bits: 22,
                tt_scheme: ReplacementScheme::Deep,
                knowledge: true,
                tt_enabled: true,
                ordering: MoveOrder::Heuristic,
                seed: crate::tt::DEFAULT_SEED,
            },
            timestamp: 1_700_000_000,
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let record = sample();
        append_record(&path, &record).unwrap();
        append_record(&path, &record).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back, vec![record.clone(), record]);
    }

    #[test]
    fn record_is_one_json_object_per_line() {
        let record = sample();
        let line = serde_json::to_string(&record).unwrap();
        assert!(!line.contains('\n'));
        let value: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert!(value.get("nodes").is_some());
        assert!(value.get("config").is_some());
    }
}
