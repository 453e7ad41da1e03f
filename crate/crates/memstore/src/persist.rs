//! Line-oriented memory file.
//!
//! ```text
//! {"format":"recall-memory","version":1,"meta":{...}}
//! {"index":0,"crc":"<16 hex>","record":{...}}
//! ...
//! {"checksum":"<sha256 hex of all preceding bytes>","records":N}
//! ```
//!
//! `crc` is the first 8 bytes of the SHA-256 of the record's JSON. A load
//! checks every record line, then the trailing whole-file checksum.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use recall_core::{MemoryRecord, NoiseModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{LongTermMemory, MemError, MemoryMeta};

pub const FORMAT_NAME: &str = "recall-memory";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    meta: MemoryMeta,
    noise: NoiseModel,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    index: usize,
    crc: String,
    record: MemoryRecord,
}

#[derive(Serialize, Deserialize)]
struct Trailer {
    checksum: String,
    records: usize,
}

fn record_crc(record_json: &str) -> String {
    hex::encode(&Sha256::digest(record_json.as_bytes())[..8])
}

pub fn persist(memory: &LongTermMemory, path: &Path) -> Result<(), MemError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_to(memory, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_to<W: Write>(memory: &LongTermMemory, w: &mut W) -> Result<(), MemError> {
    let mut hasher = Sha256::new();
    let mut emit = |line: String, w: &mut W| -> Result<(), MemError> {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    };
    let header = Header {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        meta: memory.meta.clone(),
        noise: memory.noise.clone(),
    };
    emit(to_json(&header), w)?;
    for (index, record) in memory.records.iter().enumerate() {
        let record_json = to_json(record);
        let crc = record_crc(&record_json);
        emit(format!(r#"{{"index":{index},"crc":"{crc}","record":{record_json}}}"#), w)?;
    }
    let trailer = Trailer {
        checksum: hex::encode(hasher.finalize()),
        records: memory.len(),
    };
    w.write_all(to_json(&trailer).as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("memory types serialize")
}

pub fn load(path: &Path) -> Result<LongTermMemory, MemError> {
    read_from(BufReader::new(File::open(path)?))
}

pub fn read_from<R: Read>(reader: R) -> Result<LongTermMemory, MemError> {
    let mut lines = BufReader::new(reader).lines();
    let mut hasher = Sha256::new();

    let header_line = lines.next().ok_or_else(|| MemError::Format("empty file".into()))??;
    let header: Header =
        serde_json::from_str(&header_line).map_err(|e| MemError::Format(format!("unreadable header: {e}")))?;
    if header.format != FORMAT_NAME || header.version != FORMAT_VERSION {
        return Err(MemError::Format(format!(
            "unsupported format {} v{}",
            header.format, header.version
        )));
    }
    hasher.update(header_line.as_bytes());
    hasher.update(b"\n");

    let mut memory = LongTermMemory::empty(header.meta);
    memory.noise = header.noise;
    loop {
        let next = memory.len();
        let line = match lines.next() {
            Some(line) => line?,
            None => {
                return Err(MemError::Integrity {
                    record: next,
                    reason: "file truncated before checksum line".into(),
                })
            }
        };
        if line.starts_with(r#"{"checksum""#) {
            let trailer: Trailer = serde_json::from_str(&line).map_err(|e| MemError::Integrity {
                record: next,
                reason: format!("unreadable checksum line: {e}"),
            })?;
            if trailer.records != next {
                return Err(MemError::Integrity {
                    record: next.min(trailer.records),
                    reason: format!("file declares {} records but holds {next}", trailer.records),
                });
            }
            if hex::encode(hasher.finalize()) != trailer.checksum {
                return Err(MemError::Integrity {
                    record: 0,
                    reason: "file checksum mismatch".into(),
                });
            }
            if lines.next().is_some() {
                return Err(MemError::Format("data after checksum line".into()));
            }
            return Ok(memory);
        }
        let bad = |reason: String| MemError::Integrity { record: next, reason };
        let parsed: RecordLine = serde_json::from_str(&line).map_err(|e| bad(format!("unreadable record: {e}")))?;
        if parsed.index != next {
            return Err(bad(format!("expected index {next}, found {}", parsed.index)));
        }
        if record_crc(&to_json(&parsed.record)) != parsed.crc {
            return Err(bad("record checksum mismatch".into()));
        }
        parsed
            .record
            .validate(memory.meta.dim, memory.meta.ticks_per_day)
            .map_err(|e| bad(e.to_string()))?;
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        memory.push(parsed.record).map_err(|e| bad(e.to_string()))?;
    }
}
