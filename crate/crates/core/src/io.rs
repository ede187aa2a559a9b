//! CSV and JSON export of sets, staircase samples and trajectories.
//!
//! CSV files start with `# key: value` metadata lines, then one header row,
//! then numeric rows. Floats use the shortest representation that round-trips.

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::calculus::Trajectory;
use crate::cantor::{FractalSet, Interval, Staircase};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("schema violation at data row {row}: {message}")]
    Schema { row: usize, message: String },
}

/// A parsed and validated CSV document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            ..Self::default()
        }
    }

    pub fn meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), IoError> {
        for (k, v) in &self.metadata {
            // metadata values stay on one line
            writeln!(w, "# {k}: {}", v.replace('\n', " "))?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

/// Parses a CSV document and checks the schema: a non-empty header with
/// unique names, every row as wide as the header, every field a finite float.
pub fn validate_csv(text: &str) -> Result<Table, IoError> {
    let metadata = text
        .lines()
        .map_while(|l| l.strip_prefix('#'))
        .map(|l| {
            let (k, v) = l.split_once(':').unwrap_or((l, ""));
            (k.trim().to_string(), v.trim().to_string())
        })
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().any(String::is_empty) {
        return Err(IoError::Schema {
            row: 0,
            message: "empty header name".into(),
        });
    }
    for (i, h) in header.iter().enumerate() {
        if header[..i].contains(h) {
            return Err(IoError::Schema {
                row: 0,
                message: format!("duplicate column {h}"),
            });
        }
    }
    let mut rows = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        let values = rec
            .iter()
            .map(|f| match f.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(IoError::Schema {
                    row: row + 1,
                    message: format!("`{f}` is not a finite number"),
                }),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(values);
    }
    Ok(Table {
        metadata,
        header,
        rows,
    })
}

fn set_metadata(table: Table, set: &FractalSet) -> Table {
    let b = set.bounds();
    table
        .meta("copies", set.copies())
        .meta("ratio", set.ratio())
        .meta("depth", set.depth())
        .meta("bounds", format!("[{}, {}]", b.lo, b.hi))
}

/// Intervals as `lo, hi` rows.
pub fn set_table(set: &FractalSet) -> Table {
    let mut t = set_metadata(Table::new(vec!["lo".into(), "hi".into()]), set);
    t.rows = set.intervals().iter().map(|i| vec![i.lo, i.hi]).collect();
    t
}

fn staircase_metadata(table: Table, s: &Staircase) -> Table {
    set_metadata(table, s.source())
        .meta("gamma", s.gamma())
        .meta("origin", s.origin())
        .meta("normalization", s.normalization())
}

/// `x, S(x)` rows.
pub fn staircase_table(s: &Staircase, xs: &[f64]) -> Table {
    let mut t = staircase_metadata(Table::new(vec!["x".into(), "S(x)".into()]), s);
    t.rows = xs.iter().map(|&x| vec![x, s.value(x)]).collect();
    t
}

/// `x, S(x), y, y^(α), …` rows with the trajectory's own metadata.
pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(traj.column_names());
    t.metadata = traj.metadata.clone();
    t.rows = (0..traj.len())
        .map(|i| {
            let mut row = vec![traj.xs[i], traj.staircase[i]];
            row.extend(traj.columns.iter().map(|c| c[i]));
            row
        })
        .collect();
    t
}

#[derive(Serialize)]
struct SetJson<'a> {
    copies: u32,
    ratio: f64,
    depth: u32,
    bounds: Interval,
    intervals: &'a [Interval],
}

#[derive(Serialize)]
struct StaircaseJson<'a> {
    #[serde(flatten)]
    set: SetJson<'a>,
    gamma: f64,
    origin: f64,
    normalization: f64,
    total_mass: f64,
    samples: Vec<[f64; 2]>,
}

fn set_json(set: &FractalSet) -> SetJson<'_> {
    SetJson {
        copies: set.copies(),
        ratio: set.ratio(),
        depth: set.depth(),
        bounds: set.bounds(),
        intervals: set.intervals(),
    }
}

pub fn set_json_string(set: &FractalSet) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(&set_json(set))?)
}

pub fn staircase_json_string(s: &Staircase, xs: &[f64]) -> Result<String, IoError> {
    let doc = StaircaseJson {
        set: set_json(s.source()),
        gamma: s.gamma(),
        origin: s.origin(),
        normalization: s.normalization(),
        total_mass: s.total_mass(),
        samples: xs.iter().map(|&x| [x, s.value(x)]).collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}
