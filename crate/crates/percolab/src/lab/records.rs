//! JSON-lines experiment records: one self-contained row per statistic,
//! append-only, keyed by a config fingerprint for resumable runs.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::stats::Estimate;
use crate::Error;

/// Schema version written into every record.
pub const SCHEMA_VERSION: u32 = 1;

/// One row of a sweep. Everything needed to interpret the number is inline;
/// `wall_ms` is the only field allowed to differ between identical reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub v: u32,
    pub fingerprint: String,
    pub family: String,
    pub n: u64,
    pub d: u64,
    pub p: f64,
    pub stat: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub idx: Option<u64>,
    pub mean: f64,
    pub std_error: f64,
    pub ci99_lo: f64,
    pub ci99_hi: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wilson_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wilson_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub median: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q05: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q95: Option<f64>,
    pub samples: u64,
    pub seed: u64,
    pub replicas: u64,
    pub wall_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub method: Option<String>,
}

impl ExperimentRecord {
    /// Copies an [`Estimate`] into the flattened CI fields.
    pub fn with_estimate(mut self, est: &Estimate) -> Self {
        self.mean = est.mean;
        self.std_error = est.std_error;
        self.ci99_lo = est.ci99.0;
        self.ci99_hi = est.ci99.1;
        self.samples = est.samples;
        if let Some((lo, hi)) = est.wilson99 {
            self.wilson_lo = Some(lo);
            self.wilson_hi = Some(hi);
        }
        self
    }

    /// Resume key: identifies a cell independent of wall time. `pc` rows key
    /// on the size alone because their `p` is the solved value itself.
    pub fn key(&self) -> RecordKey {
        let p_bits = if self.stat == "pc" || self.stat == "pc_chi" {
            None
        } else {
            Some(self.p.to_bits())
        };
        RecordKey {
            n: self.n,
            stat: self.stat.clone(),
            idx: self.idx,
            p_bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RecordKey {
    pub n: u64,
    pub stat: String,
    pub idx: Option<u64>,
    pub p_bits: Option<u64>,
}

/// Previously written rows of one fingerprint, loaded for resumption.
#[derive(Debug, Default)]
pub struct ExistingRecords {
    pub keys: HashSet<RecordKey>,
    /// Solved critical points per ladder size, reused instead of re-solving.
    pub pc_by_n: HashMap<u64, f64>,
}

/// Loads resume state from a JSON-lines file; missing file is empty state.
pub fn load_existing(path: &Path, fingerprint: &str) -> Result<ExistingRecords, Error> {
    let mut out = ExistingRecords::default();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(e.into()),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ExperimentRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Usage(format!("corrupt record file {}: {e}", path.display())))?;
        if rec.fingerprint != fingerprint {
            continue;
        }
        if rec.stat == "pc" {
            out.pc_by_n.insert(rec.n, rec.mean);
        }
        out.keys.insert(rec.key());
    }
    Ok(out)
}

/// Reads every record in a JSON-lines file.
pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>, Error> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| {
                Error::Usage(format!("corrupt record file {}: {e}", path.display()))
            })?,
        );
    }
    Ok(out)
}

/// Append-only writer; every record is flushed as soon as it is written so
/// interrupted runs lose at most the in-flight row.
pub struct RecordWriter {
    inner: BufWriter<File>,
}

impl RecordWriter {
    pub fn append(path: &Path) -> Result<Self, Error> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { inner: BufWriter::new(file) })
    }

    pub fn write(&mut self, record: &ExperimentRecord) -> Result<(), Error> {
        let line = serde_json::to_string(record)
            .map_err(|e| Error::Usage(format!("record not serializable: {e}")))?;
        self.inner.write_all(line.as_bytes())?;
        self.inner.write_all(b"\n")?;
        self.inner.flush()?;
        Ok(())
    }
}

/// Flattens a JSON-lines record file into CSV for plotting.
pub fn export_csv(records: &Path, out: &Path) -> Result<u64, Error> {
    let rows = read_records(records)?;
    let mut writer = csv::Writer::from_path(out).map_err(csv_err)?;
    writer
        .write_record([
            "v", "fingerprint", "family", "n", "d", "p", "stat", "idx", "mean", "std_error",
            "ci99_lo", "ci99_hi", "wilson_lo", "wilson_hi", "median", "q05", "q95", "samples",
            "seed", "replicas", "wall_ms", "method",
        ])
        .map_err(csv_err)?;
    let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &rows {
        writer
            .write_record([
                r.v.to_string(),
                r.fingerprint.clone(),
                r.family.clone(),
                r.n.to_string(),
                r.d.to_string(),
                r.p.to_string(),
                r.stat.clone(),
                r.idx.map(|i| i.to_string()).unwrap_or_default(),
                r.mean.to_string(),
                r.std_error.to_string(),
                r.ci99_lo.to_string(),
                r.ci99_hi.to_string(),
                fmt_opt(r.wilson_lo),
                fmt_opt(r.wilson_hi),
                fmt_opt(r.median),
                fmt_opt(r.q05),
                fmt_opt(r.q95),
                r.samples.to_string(),
                r.seed.to_string(),
                r.replicas.to_string(),
                r.wall_ms.to_string(),
                r.method.clone().unwrap_or_default(),
            ])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(rows.len() as u64)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
