//! On-disk formats: trace, history and dataset CSVs, and JSON documents.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value reads back bit-for-bit.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use hcloud_core::allocator::ScaleAction;
use hcloud_core::model::{RequestClass, ResourceVector, ServiceRequest};
use hcloud_core::pipeline::ProcessedDataset;
use hcloud_core::sim::TickRecord;
use hcloud_core::workload::{Trace, WorkloadSpec};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const TRACE_HEADER: [&str; 8] = [
    "id",
    "arrival_time",
    "class",
    "cpu",
    "memory",
    "bandwidth",
    "duration",
    "latency_target",
];

pub const HISTORY_HEADER: [&str; 16] = [
    "tick",
    "clock",
    "private_util_cpu",
    "private_util_mem",
    "private_util_bw",
    "public_util_cpu",
    "public_util_mem",
    "public_util_bw",
    "public_units",
    "queue_len",
    "arrivals",
    "completions",
    "rejections",
    "tick_cost",
    "reward",
    "action",
];

pub const TARGET_COLUMNS: [&str; 3] = ["target_cpu", "target_mem", "target_bw"];

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::invalid(format!("{}: {other:?}", path.display())),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Open a CSV and check its header matches `header` exactly.
fn open_checked(path: &Path, header: &[&str]) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let found = r.headers().map_err(|e| csv_err(path, e))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(CliError::invalid(format!(
            "{}: line 1: expected header `{}`, found `{}`",
            path.display(),
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(r)
}

/// Typed access to the fields of one CSV record, with line-numbered errors.
struct Row<'a> {
    path: &'a Path,
    line: u64,
    record: &'a csv::StringRecord,
    header: &'a [&'a str],
}

impl Row<'_> {
    fn fail(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::invalid(format!(
            "{}: line {}: {msg}",
            self.path.display(),
            self.line
        ))
    }

    fn get<T: FromStr>(&self, col: usize) -> Result<T> {
        let raw = self
            .record
            .get(col)
            .ok_or_else(|| self.fail("missing column"))?;
        raw.parse()
            .map_err(|_| self.fail(format_args!("{}: cannot parse `{raw}`", self.header[col])))
    }
}

fn each_row<F>(path: &Path, header: &[&str], mut f: F) -> Result<()>
where
    F: FnMut(&Row) -> Result<()>,
{
    let mut r = open_checked(path, header)?;
    let mut record = csv::StringRecord::new();
    loop {
        match r.read_record(&mut record) {
            Ok(false) => return Ok(()),
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(match e.into_kind() {
                    csv::ErrorKind::Io(io) => CliError::io(path, io),
                    other => {
                        CliError::invalid(format!("{}: line {line}: {other:?}", path.display()))
                    }
                });
            }
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(CliError::invalid(format!(
                "{}: line {line}: expected {} fields, found {}",
                path.display(),
                header.len(),
                record.len()
            )));
        }
        f(&Row {
            path,
            line,
            record: &record,
            header,
        })?;
    }
}

pub fn save_trace(trace: &Trace, path: &Path) -> Result<()> {
    let rows = trace.requests().iter().map(|r| {
        vec![
            r.id.to_string(),
            r.arrival_time.to_string(),
            r.class.as_str().to_string(),
            r.demand.cpu.to_string(),
            r.demand.memory.to_string(),
            r.demand.bandwidth.to_string(),
            r.service_duration.to_string(),
            r.latency_target.to_string(),
        ]
    });
    write_rows(path, &TRACE_HEADER, rows)
}

/// Load a trace CSV. `spec` is attached as provenance (and fixes the horizon).
pub fn load_trace(path: &Path, spec: Option<WorkloadSpec>) -> Result<Trace> {
    let mut requests: Vec<ServiceRequest> = Vec::new();
    each_row(path, &TRACE_HEADER, |row| {
        let class_raw: String = row.get(2)?;
        let class = RequestClass::parse(&class_raw).ok_or_else(|| {
            row.fail(format_args!(
                "class: expected sensitive or scalable, got `{class_raw}`"
            ))
        })?;
        let r = ServiceRequest {
            id: row.get(0)?,
            arrival_time: row.get(1)?,
            class,
            demand: ResourceVector::new(row.get(3)?, row.get(4)?, row.get(5)?),
            service_duration: row.get(6)?,
            latency_target: row.get(7)?,
        };
        r.validate().map_err(|e| row.fail(e))?;
        if let Some(prev) = requests.last() {
            if r.id <= prev.id {
                return Err(row.fail("id: ids must be strictly increasing"));
            }
            if r.arrival_time < prev.arrival_time {
                return Err(row.fail("arrival_time: arrivals must be sorted"));
            }
        }
        requests.push(r);
        Ok(())
    })?;
    Ok(Trace::new(spec, requests)?)
}

pub fn save_history(ticks: &[TickRecord], path: &Path) -> Result<()> {
    let rows = ticks.iter().map(|t| {
        vec![
            t.tick.to_string(),
            t.clock.to_string(),
            t.private_util.cpu.to_string(),
            t.private_util.memory.to_string(),
            t.private_util.bandwidth.to_string(),
            t.public_util.cpu.to_string(),
            t.public_util.memory.to_string(),
            t.public_util.bandwidth.to_string(),
            t.public_units.to_string(),
            t.queue_len.to_string(),
            t.arrivals.to_string(),
            t.completions.to_string(),
            t.rejections.to_string(),
            t.tick_cost.to_string(),
            t.reward.to_string(),
            t.action.as_str().to_string(),
        ]
    });
    write_rows(path, &HISTORY_HEADER, rows)
}

pub fn load_history(path: &Path) -> Result<Vec<TickRecord>> {
    let mut out = Vec::new();
    each_row(path, &HISTORY_HEADER, |row| {
        let action_raw: String = row.get(15)?;
        let action = ScaleAction::parse(&action_raw)
            .ok_or_else(|| row.fail(format_args!("action: unknown `{action_raw}`")))?;
        out.push(TickRecord {
            tick: row.get(0)?,
            clock: row.get(1)?,
            private_util: ResourceVector::new(row.get(2)?, row.get(3)?, row.get(4)?),
            public_util: ResourceVector::new(row.get(5)?, row.get(6)?, row.get(7)?),
            public_units: row.get(8)?,
            queue_len: row.get(9)?,
            arrivals: row.get(10)?,
            completions: row.get(11)?,
            rejections: row.get(12)?,
            tick_cost: row.get(13)?,
            reward: row.get(14)?,
            action,
        });
        Ok(())
    })?;
    Ok(out)
}

/// Normalized feature columns followed by normalized targets.
pub fn save_dataset(ds: &ProcessedDataset, path: &Path) -> Result<()> {
    let header: Vec<&str> = ds.feature_names().chain(TARGET_COLUMNS).collect();
    let rows = ds
        .features
        .iter()
        .zip(&ds.targets)
        .map(|(f, t)| f.iter().chain(t).map(|v| v.to_string()).collect::<Vec<_>>());
    write_rows(path, &header, rows)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(id: u64, t: f64) -> ServiceRequest {
        ServiceRequest {
            id,
            arrival_time: t,
            class: RequestClass::Scalable,
            demand: ResourceVector::new(0.1, 1.0 / 3.0, 2.5e-7),
            service_duration: 1.75,
            latency_target: 3.75,
        }
    }

    #[test]
    fn empty_trace_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        save_trace(&Trace::new(None, vec![]).unwrap(), &p).unwrap();
        assert_eq!(
            fs::read_to_string(&p).unwrap(),
            format!("{}\n", TRACE_HEADER.join(","))
        );
        assert!(load_trace(&p, None).unwrap().is_empty());
    }

    #[test]
    fn one_request_is_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let t = Trace::new(None, vec![request(0, 0.5)]).unwrap();
        save_trace(&t, &p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 2);
        assert_eq!(load_trace(&p, None).unwrap(), t);
    }

    #[test]
    fn bad_rows_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let h = TRACE_HEADER.join(",");
        fs::write(
            &p,
            format!("{h}\n0,0.0,scalable,1,1,1,2,3\n1,1.0,scalable,1,1,1,-2,3\n"),
        )
        .unwrap();
        let e = load_trace(&p, None).unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("duration"), "{e}");

        fs::write(
            &p,
            format!("{h}\n0,1.0,scalable,1,1,1,2,3\n1,0.5,scalable,1,1,1,2,3\n"),
        )
        .unwrap();
        let e = load_trace(&p, None).unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("sorted"), "{e}");

        fs::write(&p, format!("{h}\n0,x,scalable,1,1,1,2,3\n")).unwrap();
        let e = load_trace(&p, None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("line 2"), "{e}");

        fs::write(&p, "id,arrival\n").unwrap();
        assert!(load_trace(&p, None)
            .unwrap_err()
            .to_string()
            .contains("header"));
    }

    #[test]
    fn missing_file_is_io() {
        let e = load_trace(Path::new("/nonexistent/trace.csv"), None).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }
}
