//! JSON persistence of scan results. The layout is described in
//! `docs/results-format.md`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::analysis::ScanResult;
use crate::error::{Error, Result};

pub const RESULTS_FORMAT: &str = "multistab-scan";
pub const RESULTS_VERSION: u64 = 1;

#[derive(Serialize)]
struct Envelope<'a> {
    format: &'static str,
    version: u64,
    #[serde(flatten)]
    scan: &'a ScanResult,
}

pub fn write_results<W: Write>(scan: &ScanResult, mut out: W) -> Result<()> {
    let envelope = Envelope {
        format: RESULTS_FORMAT,
        version: RESULTS_VERSION,
        scan,
    };
    serde_json::to_writer(&mut out, &envelope).map_err(|e| Error::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_results<R: Read>(input: R) -> Result<ScanResult> {
    let mut value: Value =
        serde_json::from_reader(input).map_err(|e| Error::Corrupt(e.to_string()))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| Error::Corrupt("top level is not an object".into()))?;
    match object.remove("format") {
        Some(Value::String(f)) if f == RESULTS_FORMAT => {}
        Some(other) => return Err(Error::Corrupt(format!("unexpected format {other}"))),
        None => return Err(Error::Corrupt("missing `format` field".into())),
    }
    let version = object
        .remove("version")
        .ok_or_else(|| Error::Corrupt("missing `version` field".into()))?;
    let version = version
        .as_u64()
        .ok_or_else(|| Error::Corrupt(format!("version {version} is not an integer")))?;
    if version != RESULTS_VERSION {
        return Err(Error::Version {
            found: version,
            expected: RESULTS_VERSION,
        });
    }
    let scan: ScanResult = serde_json::from_value(value).map_err(|e| Error::Corrupt(e.to_string()))?;
    check(&scan)?;
    Ok(scan)
}

fn check(scan: &ScanResult) -> Result<()> {
    let n = scan.scales.len();
    if scan.cross_nvi.len() != n || scan.cross_nvi.iter().any(|r| r.len() != n) {
        return Err(Error::Corrupt("cross_nvi is not n_scale x n_scale".into()));
    }
    if scan.block_nvi.len() != n {
        return Err(Error::Corrupt("block_nvi length differs from n_scale".into()));
    }
    if scan.selection.selected.iter().any(|&i| i >= n) {
        return Err(Error::Corrupt("selected scale index out of range".into()));
    }
    Ok(())
}

pub fn save_results(scan: &ScanResult, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_results(scan, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_results(path: impl AsRef<Path>) -> Result<ScanResult> {
    read_results(BufReader::new(File::open(path)?))
}
