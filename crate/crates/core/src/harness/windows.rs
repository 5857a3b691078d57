//! Windowed negative-valence statistics across a set of trials.

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::harness::stats::{mean, population_std};
use crate::harness::trial::TrialLog;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub window_length: u64,
    /// `counts[trial][window]`: log entries with negative value.
    pub counts: Vec<Vec<u64>>,
    /// Population standard deviation across trials, per window.
    pub stds: Vec<f64>,
    /// Mean count across trials, per window.
    pub means: Vec<f64>,
}

impl WindowStats {
    pub fn windows(&self) -> usize {
        self.stds.len()
    }

    /// Mean of the per-window stds over the 1-based inclusive window range.
    pub fn mean_std(&self, first: usize, last: usize) -> f64 {
        mean(&self.stds[first - 1..last])
    }
}

/// Counts negative-valence entries per window for every trial, then takes
/// the cross-trial population std of each window.
pub fn negative_valence_windows(logs: &[TrialLog], window: u64) -> Result<WindowStats, HarnessError> {
    let trial_length = logs.first().map(|l| l.trial_length).unwrap_or(0);
    if window == 0 || !trial_length.is_multiple_of(window) {
        return Err(HarnessError::WindowMismatch { window, trial_length });
    }
    if let Some(bad) = logs.iter().find(|l| l.trial_length != trial_length) {
        return Err(HarnessError::InvalidConfig(format!(
            "trial lengths differ: {} vs {}",
            trial_length, bad.trial_length
        )));
    }
    let n_windows = (trial_length / window) as usize;
    let counts: Vec<Vec<u64>> = logs
        .iter()
        .map(|log| {
            let mut c = vec![0u64; n_windows];
            for r in log.records.iter().filter(|r| r.value < 0.0) {
                c[(r.tick / window) as usize] += 1;
            }
            c
        })
        .collect();
    let column = |w: usize| counts.iter().map(|c| c[w] as f64).collect::<Vec<_>>();
    let (stds, means) = if counts.is_empty() {
        (vec![0.0; n_windows], vec![0.0; n_windows])
    } else {
        ((0..n_windows).map(|w| population_std(&column(w))).collect(), (0..n_windows).map(|w| mean(&column(w))).collect())
    };
    Ok(WindowStats { window_length: window, counts, stds, means })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_world::{Action, AgentPose, Heading, Position};
    use crate::harness::trial::TickRecord;

    fn log(values: &[(u64, f64)], trial_length: u64) -> TrialLog {
        let pose = AgentPose { position: Position::new(0, 0), heading: Heading::North };
        TrialLog {
            trial_length,
            records: values
                .iter()
                .map(|(tick, value)| TickRecord {
                    tick: *tick,
                    pose,
                    action: Action::Step,
                    succeeded: true,
                    value: *value,
                    ate_food: false,
                    enacted: None,
                })
                .collect(),
        }
    }

    #[test]
    fn all_non_negative_gives_zero() {
        let logs: Vec<TrialLog> = (0..3).map(|_| log(&(0..100).map(|t| (t, 0.0)).collect::<Vec<_>>(), 100)).collect();
        let w = negative_valence_windows(&logs, 10).unwrap();
        assert_eq!(w.windows(), 10);
        assert!(w.stds.iter().all(|s| *s == 0.0));
        assert!(w.counts.iter().flatten().all(|c| *c == 0));
    }

    #[test]
    fn two_trials_population_std() {
        let a = log(&[(0, -1.0), (1, -1.0)], 10);
        let b = log(&[(0, -1.0), (1, -1.0), (2, -0.3), (3, -0.3)], 10);
        let w = negative_valence_windows(&[a, b], 10).unwrap();
        assert_eq!(w.counts, vec![vec![2], vec![4]]);
        assert_eq!(w.stds, vec![1.0]);
        assert_eq!(w.means, vec![3.0]);
    }

    #[test]
    fn every_entry_lands_in_one_window() {
        let entries: Vec<(u64, f64)> = (0..1000).map(|t| (t, -1.0)).collect();
        let w = negative_valence_windows(&[log(&entries, 1000)], 100).unwrap();
        assert_eq!(w.counts[0].iter().sum::<u64>(), 1000);
        assert_eq!(w.windows(), 10);
    }

    #[test]
    fn window_must_divide_trial() {
        let err = negative_valence_windows(&[log(&[], 1000)], 300).unwrap_err();
        assert!(matches!(err, HarnessError::WindowMismatch { window: 300, trial_length: 1000 }));
    }
}
