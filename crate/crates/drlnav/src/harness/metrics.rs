//! Per-episode training metrics and their CSV schema.
//!
//! The file layout is fixed: header `episode,steps,cumulative_reward,outcome,wall_ms`,
//! one row per episode, plain decimal numbers, newline-terminated rows. The
//! whole file is a pure function of (config, seed): `wall_ms` is the
//! *simulated* episode duration in integer milliseconds (steps · dt · 1000),
//! which keeps repeat runs byte-identical.

use std::io::Write;
use std::path::Path;

use crate::env::Outcome;
use crate::error::{Error, Result};

pub const METRICS_HEADER: &str = "episode,steps,cumulative_reward,outcome,wall_ms";

/// Summary of one finished training episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    /// 1-based episode index.
    pub episode: usize,
    pub steps: usize,
    pub cumulative_reward: f64,
    /// Terminal outcome (never `running`).
    pub outcome: Outcome,
    /// Simulated duration in milliseconds.
    pub wall_ms: u64,
}

impl EpisodeRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.episode,
            self.steps,
            self.cumulative_reward,
            self.outcome.as_str(),
            self.wall_ms
        )
    }
}

/// Incremental metrics writer: header on creation, one row per episode.
pub struct MetricsWriter {
    file: std::io::BufWriter<std::fs::File>,
}

impl MetricsWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::create(path)?;
        let mut file = std::io::BufWriter::new(file);
        writeln!(file, "{METRICS_HEADER}")?;
        Ok(MetricsWriter { file })
    }

    pub fn append(&mut self, record: &EpisodeRecord) -> Result<()> {
        writeln!(self.file, "{}", record.to_csv_row())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.file.flush()?;
        Ok(())
    }
}

/// Parse a metrics CSV, reporting the 1-based line number of any malformed
/// content. A header-only file is an error ("no data rows").
pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<Vec<EpisodeRecord>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == METRICS_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: Some(1),
                message: format!("bad header `{header}`, expected `{METRICS_HEADER}`"),
            })
        }
        None => {
            return Err(Error::Parse { line: Some(1), message: "empty metrics file".into() })
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: Some(lineno),
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let parse_err = |what: &str| Error::Parse {
            line: Some(lineno),
            message: format!("invalid {what} field"),
        };
        records.push(EpisodeRecord {
            episode: fields[0].parse().map_err(|_| parse_err("episode"))?,
            steps: fields[1].parse().map_err(|_| parse_err("steps"))?,
            cumulative_reward: fields[2].parse().map_err(|_| parse_err("cumulative_reward"))?,
            outcome: fields[3].parse()?,
            wall_ms: fields[4].parse().map_err(|_| parse_err("wall_ms"))?,
        });
    }
    if records.is_empty() {
        return Err(Error::Parse { line: Some(1), message: "no data rows".into() });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(episode: usize) -> EpisodeRecord {
        EpisodeRecord {
            episode,
            steps: 42,
            cumulative_reward: -3.25,
            outcome: Outcome::Collided,
            wall_ms: 4200,
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        let mut w = MetricsWriter::create(&path).unwrap();
        let records: Vec<EpisodeRecord> = (1..=5).map(record).collect();
        for r in &records {
            w.append(r).unwrap();
        }
        w.finish().unwrap();
        assert_eq!(read_metrics_csv(&path).unwrap(), records);
    }

    #[test]
    fn header_only_is_no_data_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        std::fs::write(&path, format!("{METRICS_HEADER}\n")).unwrap();
        let err = read_metrics_csv(&path).unwrap_err();
        assert!(err.to_string().contains("no data rows"), "{err}");
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        std::fs::write(
            &path,
            format!("{METRICS_HEADER}\n1,10,0.5,reached_goal,1000\n2,oops,0.5,collided,1000\n"),
        )
        .unwrap();
        match read_metrics_csv(&path).unwrap_err() {
            Error::Parse { line: Some(3), .. } => {}
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn float_formatting_round_trips_exactly() {
        let r = EpisodeRecord {
            episode: 1,
            steps: 3,
            cumulative_reward: 0.1 + 0.2, // 0.30000000000000004
            outcome: Outcome::TimedOut,
            wall_ms: 300,
        };
        let row = r.to_csv_row();
        let parsed: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(parsed.to_bits(), r.cumulative_reward.to_bits());
    }
}
