//! CSV trace files: `n,z,b_h1,d_h1,c_h1,...` with one row per data unit.

use std::io::Read;
use std::path::Path;

use super::sample::{Measurement, TraceSample};
use crate::error::{Error, Result};

fn expected_header(n_configs: usize) -> Vec<String> {
    let mut h = vec!["n".to_string(), "z".to_string()];
    for k in 1..=n_configs {
        h.push(format!("b_h{k}"));
        h.push(format!("d_h{k}"));
        h.push(format!("c_h{k}"));
    }
    h
}

pub fn load_csv(path: impl AsRef<Path>, type_labels: &[String]) -> Result<Vec<TraceSample>> {
    let file = std::fs::File::open(path)?;
    read_csv(file, type_labels)
}

/// Parses a trace; the number of configurations is taken from the header.
pub fn read_csv<R: Read>(reader: R, type_labels: &[String]) -> Result<Vec<TraceSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(1, e))?,
        None => {
            return Err(Error::Trace {
                line: 1,
                message: "missing header row".into(),
            })
        }
    };
    let fields: Vec<String> = header.iter().map(str::to_string).collect();
    if fields.len() < 5
        || !(fields.len() - 2).is_multiple_of(3)
        || fields != expected_header((fields.len() - 2) / 3)
    {
        return Err(Error::Trace {
            line: 1,
            message: format!("unexpected header {fields:?}"),
        });
    }
    let n_configs = (fields.len() - 2) / 3;

    let mut samples = Vec::new();
    for rec in records {
        let line = rdr_line(&rec);
        let rec = rec.map_err(|e| csv_error(line, e))?;
        let bad = |message: String| Error::Trace { line, message };
        if rec.len() != fields.len() {
            return Err(bad(format!(
                "expected {} fields, found {}",
                fields.len(),
                rec.len()
            )));
        }
        let index: u64 = rec[0]
            .parse()
            .map_err(|_| bad(format!("bad index {:?}", &rec[0])))?;
        let z = type_labels
            .iter()
            .position(|l| l == &rec[1])
            .ok_or_else(|| bad(format!("unknown type label {:?}", &rec[1])))?;
        let mut configs = Vec::with_capacity(n_configs);
        for k in 0..n_configs {
            let num = |col: usize| -> Result<f64> {
                rec[col]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        bad(format!(
                            "bad number {:?} in column {}",
                            &rec[col], fields[col]
                        ))
                    })
            };
            let bits = num(2 + 3 * k)?;
            let distortion = num(3 + 3 * k)?;
            let cycles: u64 = rec[4 + 3 * k].parse().map_err(|_| {
                bad(format!(
                    "cycles {:?} is not a non-negative integer",
                    &rec[4 + 3 * k]
                ))
            })?;
            if bits < 0.0 || distortion < 0.0 {
                return Err(bad(format!("negative rate or distortion for h{}", k + 1)));
            }
            if cycles == 0 {
                return Err(bad(format!("zero cycles for h{}", k + 1)));
            }
            configs.push(Measurement {
                bits,
                distortion,
                cycles: cycles as f64,
            });
        }
        samples.push(TraceSample { index, z, configs });
    }
    Ok(samples)
}

fn rdr_line(rec: &std::result::Result<csv::StringRecord, csv::Error>) -> usize {
    match rec {
        Ok(r) => r.position().map_or(0, |p| p.line() as usize),
        Err(e) => e.position().map_or(0, |p| p.line() as usize),
    }
}

fn csv_error(line: usize, e: csv::Error) -> Error {
    Error::Trace {
        line,
        message: e.to_string(),
    }
}

pub fn write_csv<W: std::io::Write>(
    writer: W,
    samples: &[TraceSample],
    type_labels: &[String],
) -> Result<()> {
    let n_configs = samples.first().map_or(0, |s| s.configs.len());
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(expected_header(n_configs)).map_err(io)?;
    for s in samples {
        let mut row = vec![s.index.to_string(), type_labels[s.z].clone()];
        for m in &s.configs {
            row.push(m.bits.to_string());
            row.push(m.distortion.to_string());
            row.push(format!("{}", m.cycles.round() as u64));
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// A finite trace replayed in file order, wrapping around at the end.
#[derive(Clone, Debug)]
pub struct ReplayTrace {
    samples: Vec<TraceSample>,
}

impl ReplayTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Config("empty trace".into()));
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The `n`th sample of the endless replay (0-based).
    pub fn get(&self, n: usize) -> &TraceSample {
        &self.samples[n % self.samples.len()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &TraceSample> {
        self.samples.iter().cycle()
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }
}
