//! Failure-history data model for a fleet of repairable systems.
//!
//! Every system is observed on the same window `(0, T]`. A record is one
//! failure `(system, cause, time)`; systems that never fail carry no records
//! and enter only through the fleet size `m`.
//!
//! # File format
//!
//! ```text
//! # T=20
//! # m=3
//! # K=2
//! system_id,cause,time
//! 1,1,5
//! 1,2,7.5
//! 2,1,3.2
//! ```
//!
//! The `# key=value` lines are optional when the design is supplied some
//! other way (see [`DesignOverrides`]).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation horizon and fleet dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationDesign {
    /// Common truncation time `T`.
    pub horizon: f64,
    /// Number of systems `m`.
    pub systems: usize,
    /// Number of failure causes `K`.
    pub causes: usize,
}

impl ObservationDesign {
    pub fn new(horizon: f64, systems: usize, causes: usize) -> Result<Self> {
        let design = Self {
            horizon,
            systems,
            causes,
        };
        design.validate()?;
        Ok(design)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::domain(format!(
                "truncation time must be positive, got {}",
                self.horizon
            )));
        }
        if self.systems == 0 {
            return Err(Error::domain("need at least one system"));
        }
        if self.causes == 0 {
            return Err(Error::domain("need at least one failure cause"));
        }
        Ok(())
    }
}

/// Partial design, e.g. from CLI flags, layered over file metadata.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DesignOverrides {
    pub horizon: Option<f64>,
    pub systems: Option<usize>,
    pub causes: Option<usize>,
}

impl DesignOverrides {
    /// Values in `self` win over those in `base`.
    pub fn or(self, base: DesignOverrides) -> DesignOverrides {
        DesignOverrides {
            horizon: self.horizon.or(base.horizon),
            systems: self.systems.or(base.systems),
            causes: self.causes.or(base.causes),
        }
    }

    pub fn resolve(self) -> Result<ObservationDesign> {
        let missing = |what: &str| Error::Config(format!("observation design is missing {what}"));
        ObservationDesign::new(
            self.horizon.ok_or_else(|| missing("T"))?,
            self.systems.ok_or_else(|| missing("m"))?,
            self.causes.ok_or_else(|| missing("K"))?,
        )
    }
}

impl From<ObservationDesign> for DesignOverrides {
    fn from(d: ObservationDesign) -> Self {
        Self {
            horizon: Some(d.horizon),
            systems: Some(d.systems),
            causes: Some(d.causes),
        }
    }
}

/// One observed failure. `system` and `cause` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub system: usize,
    pub cause: usize,
    pub time: f64,
}

/// Validated failure histories, stored sorted by `(system, time)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureDataset {
    design: ObservationDesign,
    records: Vec<FailureRecord>,
}

impl FailureDataset {
    /// Validates and sorts `records`.
    ///
    /// Rejects times outside `(0, T)`, unknown systems or causes, and tied
    /// failure times within a system.
    pub fn new(design: ObservationDesign, mut records: Vec<FailureRecord>) -> Result<Self> {
        design.validate()?;
        for r in &records {
            check_record(&design, r)?;
        }
        records.sort_by(|a, b| a.system.cmp(&b.system).then(a.time.total_cmp(&b.time)));
        for pair in records.windows(2) {
            if pair[0].system == pair[1].system && pair[0].time == pair[1].time {
                return Err(Error::domain(format!(
                    "system {} has two failures at time {}",
                    pair[0].system, pair[0].time
                )));
            }
        }
        Ok(Self { design, records })
    }

    pub fn empty(design: ObservationDesign) -> Result<Self> {
        Self::new(design, Vec::new())
    }

    pub fn design(&self) -> &ObservationDesign {
        &self.design
    }

    pub fn records(&self) -> &[FailureRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records of one system (1-based), in time order.
    pub fn system_records(&self, system: usize) -> &[FailureRecord] {
        let start = self.records.partition_point(|r| r.system < system);
        let end = self.records.partition_point(|r| r.system <= system);
        &self.records[start..end]
    }

    /// Reads the CSV format, taking `T`, `m` and `K` from `design`.
    /// Metadata lines in the file are ignored.
    pub fn ingest(path: impl AsRef<Path>, design: ObservationDesign) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let (_, records) = parse_csv(&text, path)?;
        Self::new(design, records)
    }

    /// Reads the CSV format, resolving the design from the file's metadata
    /// lines with `overrides` taking precedence.
    pub fn read(path: impl AsRef<Path>, overrides: DesignOverrides) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let (meta, records) = parse_csv(&text, path)?;
        Self::new(overrides.or(meta).resolve()?, records)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let d = &self.design;
        let _ = writeln!(out, "# T={}", d.horizon);
        let _ = writeln!(out, "# m={}", d.systems);
        let _ = writeln!(out, "# K={}", d.causes);
        out.push_str("system_id,cause,time\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{}", r.system, r.cause, r.time);
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn summarize(&self) -> CountSummary {
        CountSummary::from_dataset(self)
    }
}

fn check_record(design: &ObservationDesign, r: &FailureRecord) -> Result<()> {
    if r.system == 0 || r.system > design.systems {
        return Err(Error::domain(format!(
            "system_id {} outside 1..={}",
            r.system, design.systems
        )));
    }
    if r.cause == 0 || r.cause > design.causes {
        return Err(Error::domain(format!(
            "cause {} outside 1..={}",
            r.cause, design.causes
        )));
    }
    if !(r.time > 0.0 && r.time < design.horizon) {
        return Err(Error::domain(format!(
            "failure time {} outside (0, {})",
            r.time, design.horizon
        )));
    }
    Ok(())
}

fn parse_csv(text: &str, path: &Path) -> Result<(DesignOverrides, Vec<FailureRecord>)> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut meta = DesignOverrides::default();
    let mut columns: Option<[usize; 3]> = None;
    let mut records = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "T" => {
                        meta.horizon = Some(
                            value
                                .parse()
                                .map_err(|e| err(lineno, format!("bad T: {e}")))?,
                        )
                    }
                    "m" => {
                        meta.systems = Some(
                            value
                                .parse()
                                .map_err(|e| err(lineno, format!("bad m: {e}")))?,
                        )
                    }
                    "K" => {
                        meta.causes = Some(
                            value
                                .parse()
                                .map_err(|e| err(lineno, format!("bad K: {e}")))?,
                        )
                    }
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Some(cols) = columns else {
            let find = |name: &str| {
                fields
                    .iter()
                    .position(|f| *f == name)
                    .ok_or_else(|| err(lineno, format!("header is missing column `{name}`")))
            };
            columns = Some([find("system_id")?, find("cause")?, find("time")?]);
            continue;
        };
        let get = |i: usize| {
            fields
                .get(i)
                .copied()
                .ok_or_else(|| err(lineno, format!("expected at least {} fields", i + 1)))
        };
        let system = get(cols[0])?
            .parse::<usize>()
            .map_err(|e| err(lineno, format!("bad system_id: {e}")))?;
        let cause = get(cols[1])?
            .parse::<usize>()
            .map_err(|e| err(lineno, format!("bad cause: {e}")))?;
        let time = get(cols[2])?
            .parse::<f64>()
            .map_err(|e| err(lineno, format!("bad time: {e}")))?;
        records.push(FailureRecord {
            system,
            cause,
            time,
        });
    }
    if columns.is_none() {
        return Err(err(1, "missing header row `system_id,cause,time`".into()));
    }
    Ok((meta, records))
}

/// Failure counts by system and cause, and the per-cause sufficient
/// statistic for the shape parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSummary {
    /// `by_system_cause[j][q]` = n_jq (0-based indices).
    pub by_system_cause: Vec<Vec<u64>>,
    pub per_system: Vec<u64>,
    pub per_cause: Vec<u64>,
    /// Σ log(T / t) over all records of each cause.
    pub log_ratio_sums: Vec<f64>,
    pub systems: usize,
}

impl CountSummary {
    pub fn from_dataset(data: &FailureDataset) -> Self {
        let d = data.design();
        let mut by_system_cause = vec![vec![0u64; d.causes]; d.systems];
        let mut log_ratio_sums = vec![0.0; d.causes];
        for r in data.records() {
            by_system_cause[r.system - 1][r.cause - 1] += 1;
            log_ratio_sums[r.cause - 1] += (d.horizon / r.time).ln();
        }
        let per_system = by_system_cause.iter().map(|row| row.iter().sum()).collect();
        let per_cause = (0..d.causes)
            .map(|q| by_system_cause.iter().map(|row| row[q]).sum())
            .collect();
        Self {
            by_system_cause,
            per_system,
            per_cause,
            log_ratio_sums,
            systems: d.systems,
        }
    }

    pub fn total(&self) -> u64 {
        self.per_cause.iter().sum()
    }

    pub fn causes(&self) -> usize {
        self.per_cause.len()
    }

    /// Summary built directly from per-cause totals, for closed-form
    /// estimates when only counts are known. Shape statistics are set to
    /// NaN and per-system counts are left empty.
    pub fn from_cause_totals(systems: usize, per_cause: &[u64]) -> Self {
        Self {
            by_system_cause: Vec::new(),
            per_system: Vec::new(),
            per_cause: per_cause.to_vec(),
            log_ratio_sums: vec![f64::NAN; per_cause.len()],
            systems,
        }
    }
}
