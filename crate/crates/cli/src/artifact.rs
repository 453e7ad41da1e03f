//! On-disk artifacts. Every file records the hash of the config that
//! produced it, and that config includes the hashes of its inputs, so a
//! chain of files can be checked end to end.

use std::fs;
use std::io::Write;
use std::path::Path;

use recall_bench::{SuiteSpec, TaskSpec};
use recall_core::Frame;
use recall_homesim::{Schedule, WorldState};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const WORLD_FORMAT: &str = "recall-world";
pub const SUITE_FORMAT: &str = "recall-suite";

/// First 16 hex digits of the SHA-256 of the config's JSON.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_string(config).expect("configs serialize");
    hex::encode(&Sha256::digest(json.as_bytes())[..8])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldConfig {
    pub command: String,
    pub scene: u8,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldFile {
    pub format: String,
    pub config_hash: String,
    pub config: WorldConfig,
    pub world: WorldState,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteFile {
    pub format: String,
    pub config_hash: String,
    pub config: SuiteSpec,
    pub tasks: Vec<TaskSpec>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("artifacts serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Runtime(format!("{} is not a valid {what} file: {e}", path.display())))
}

pub fn read_world(path: &Path) -> Result<WorldFile, CliError> {
    let f: WorldFile = read_json(path, "world")?;
    if f.format != WORLD_FORMAT {
        return Err(CliError::Runtime(format!("{} is not a world file", path.display())));
    }
    Ok(f)
}

pub fn read_suite(path: &Path) -> Result<SuiteFile, CliError> {
    let f: SuiteFile = read_json(path, "suite")?;
    if f.format != SUITE_FORMAT {
        return Err(CliError::Runtime(format!("{} is not a suite file", path.display())));
    }
    Ok(f)
}

/// One observation per line: sequence number, total frame count, ticks per
/// day, producing config hash, a checksum of the frame JSON, and the frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct StreamLine {
    seq: usize,
    of: usize,
    tpd: u64,
    lineage: String,
    crc: String,
    frame: Frame,
}

fn crc(json: &str) -> String {
    hex::encode(&Sha256::digest(json.as_bytes())[..8])
}

pub fn write_stream(path: &Path, frames: &[Frame], tpd: u64, lineage: &str) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    for (seq, frame) in frames.iter().enumerate() {
        let frame_json = serde_json::to_string(frame).expect("frames serialize");
        let line = format!(
            r#"{{"seq":{seq},"of":{},"tpd":{tpd},"lineage":"{lineage}","crc":"{}","frame":{frame_json}}}"#,
            frames.len(),
            crc(&frame_json)
        );
        writeln!(w, "{line}").map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

pub struct Stream {
    pub frames: Vec<Frame>,
    pub ticks_per_day: u64,
    pub lineage: String,
}

/// Reads a stream, checking order, checksums, lineage and length.
pub fn read_stream(path: &Path) -> Result<Stream, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let bad = |line: usize, why: String| CliError::Runtime(format!("stream integrity error at line {line}: {why}"));
    let mut frames = Vec::new();
    let mut head: Option<(usize, u64, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line: StreamLine = serde_json::from_str(raw).map_err(|e| bad(i + 1, e.to_string()))?;
        let frame_json = serde_json::to_string(&line.frame).expect("frames serialize");
        if line.seq != i {
            return Err(bad(i + 1, format!("sequence number {} out of order", line.seq)));
        }
        if crc(&frame_json) != line.crc {
            return Err(bad(i + 1, "checksum mismatch".into()));
        }
        match &head {
            None => head = Some((line.of, line.tpd, line.lineage.clone())),
            Some((of, tpd, lineage)) => {
                if *of != line.of || *tpd != line.tpd || *lineage != line.lineage {
                    return Err(bad(i + 1, "header fields change mid-stream".into()));
                }
            }
        }
        frames.push(line.frame);
    }
    let Some((of, tpd, lineage)) = head else {
        return Err(bad(0, "empty stream".into()));
    };
    if frames.len() != of {
        return Err(bad(frames.len(), format!("expected {of} frames, found {}", frames.len())));
    }
    Ok(Stream {
        frames,
        ticks_per_day: tpd,
        lineage,
    })
}
