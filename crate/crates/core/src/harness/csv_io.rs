//! CSV files: `trials.csv`, `windows.csv`, `sweep.csv` and per-trial tick logs.
//!
//! Reals are written in shortest round-trip form, so reading a file back
//! reproduces every value exactly.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::grid_world::{Action, AgentPose, Heading, Position};
use crate::harness::sweep::SweepRow;
use crate::harness::trial::{TickRecord, TrialLog, TrialSummary};
use crate::harness::windows::WindowStats;

pub const TRIALS_HEADER: &str = "agent,alpha,d,delta,seed,gain,neg_valence_total,ticks";
pub const WINDOWS_HEADER: &str = "window_index,mean_std_across_trials";
pub const SWEEP_HEADER: &str = "agent,alpha,param_name,param_value,mean_gain,std_gain,n_seeds";
pub const LOG_HEADER: &str = "tick,x,y,heading,action,succeeded,value,ate_food,enacted";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub window_index: usize,
    pub mean_std_across_trials: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LogRow {
    tick: u64,
    x: usize,
    y: usize,
    heading: Heading,
    action: Action,
    succeeded: bool,
    value: f64,
    ate_food: bool,
    enacted: Option<u32>,
}

fn write_rows<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(header.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
}

pub fn write_trials(path: &Path, rows: &[TrialSummary]) -> Result<(), HarnessError> {
    write_rows(path, TRIALS_HEADER, rows)
}

pub fn read_trials(path: &Path) -> Result<Vec<TrialSummary>, HarnessError> {
    read_rows(path)
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<(), HarnessError> {
    write_rows(path, SWEEP_HEADER, rows)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>, HarnessError> {
    read_rows(path)
}

/// One row per window, 1-based index, carrying the cross-trial std.
pub fn window_rows(stats: &WindowStats) -> Vec<WindowRow> {
    stats
        .stds
        .iter()
        .enumerate()
        .map(|(i, s)| WindowRow { window_index: i + 1, mean_std_across_trials: *s })
        .collect()
}

pub fn write_windows(path: &Path, stats: &WindowStats) -> Result<(), HarnessError> {
    write_rows(path, WINDOWS_HEADER, &window_rows(stats))
}

pub fn read_windows(path: &Path) -> Result<Vec<WindowRow>, HarnessError> {
    read_rows(path)
}

pub fn write_log(path: &Path, log: &TrialLog) -> Result<(), HarnessError> {
    let rows: Vec<LogRow> = log
        .records
        .iter()
        .map(|r| LogRow {
            tick: r.tick,
            x: r.pose.position.x,
            y: r.pose.position.y,
            heading: r.pose.heading,
            action: r.action,
            succeeded: r.succeeded,
            value: r.value,
            ate_food: r.ate_food,
            enacted: r.enacted,
        })
        .collect();
    write_rows(path, LOG_HEADER, &rows)
}

pub fn read_log(path: &Path, trial_length: u64) -> Result<TrialLog, HarnessError> {
    let rows: Vec<LogRow> = read_rows(path)?;
    let records = rows
        .into_iter()
        .map(|r| TickRecord {
            tick: r.tick,
            pose: AgentPose { position: Position::new(r.x, r.y), heading: r.heading },
            action: r.action,
            succeeded: r.succeeded,
            value: r.value,
            ate_food: r.ate_food,
            enacted: r.enacted,
        })
        .collect();
    Ok(TrialLog { trial_length, records })
}

/// File name of the tick log for one trial inside an output directory.
pub fn log_file_name(t: &TrialSummary) -> String {
    let param = match (t.d, t.delta) {
        (Some(d), _) => format!("d{d}"),
        (None, Some(delta)) => format!("delta{delta}"),
        (None, None) => "p".into(),
    };
    format!("log_{}_a{}_{}_s{}.csv", t.agent, t.alpha, param, t.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::trial::AgentKind;

    #[test]
    fn empty_sweep_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sweep.csv");
        write_sweep(&p, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), format!("{SWEEP_HEADER}\n"));
        assert!(read_sweep(&p).unwrap().is_empty());
    }

    #[test]
    fn one_row_sweep_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sweep.csv");
        let row = SweepRow {
            agent: AgentKind::Rl,
            alpha: 0.5,
            param_name: "delta".into(),
            param_value: 2048.0,
            mean_gain: 1.0 / 3.0,
            std_gain: 0.1 + 0.2,
            n_seeds: 15,
        };
        write_sweep(&p, std::slice::from_ref(&row)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(read_sweep(&p).unwrap(), vec![row]);
    }

    #[test]
    fn trials_with_absent_parameters() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("trials.csv");
        let t = TrialSummary {
            agent: AgentKind::Enactive,
            alpha: 0.0,
            d: Some(10),
            delta: None,
            seed: 3,
            gain: 12,
            neg_valence_total: 40,
            ticks: 1000,
        };
        write_trials(&p, std::slice::from_ref(&t)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, format!("{TRIALS_HEADER}\nenactive,0.0,10,,3,12,40,1000\n"));
        assert_eq!(read_trials(&p).unwrap(), vec![t]);
    }
}
