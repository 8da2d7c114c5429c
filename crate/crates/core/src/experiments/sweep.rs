//! Batches of seeded trials and their per-step summaries.

use super::seed::trial_seed;
use super::stats::{ci95_half_width, mean, median};
use super::trial::{run_trial, Arena, TrialConfig, TrialRecord};
use crate::error::{param, Error, Result};
use rayon::prelude::*;

/// Per-step mean and 95% half-width of the goal proportion across the
/// trials of one group, plus the trials themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    /// Grouping key, e.g. robot count or sensing radius.
    pub group: u64,
    pub steps: Vec<u64>,
    pub mean: Vec<f64>,
    pub ci_half: Vec<f64>,
    pub records: Vec<TrialRecord>,
}

impl SweepSummary {
    /// Aggregate trials that share a sampling schedule.
    pub fn from_records(group: u64, records: Vec<TrialRecord>) -> Result<Self> {
        if records.len() < 2 {
            return Err(param("trials", "a summary needs at least 2 trials"));
        }
        let steps: Vec<u64> = records[0].series.iter().map(|s| s.0).collect();
        if records.iter().any(|r| r.series.len() != steps.len()) {
            return Err(Error::Config("trials in one group must share a sampling schedule".into()));
        }
        let mut means = Vec::with_capacity(steps.len());
        let mut halves = Vec::with_capacity(steps.len());
        let mut column = Vec::with_capacity(records.len());
        for k in 0..steps.len() {
            column.clear();
            column.extend(records.iter().map(|r| r.series[k].1));
            means.push(mean(&column));
            halves.push(ci95_half_width(&column));
        }
        Ok(SweepSummary {
            group,
            steps,
            mean: means,
            ci_half: halves,
            records,
        })
    }

    pub fn mean_final(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    /// Median over trials of the first sampled step reaching `threshold`;
    /// trials that never reach it count as infinitely slow.
    pub fn median_time_to(&self, threshold: f64) -> f64 {
        let times: Vec<f64> = self
            .records
            .iter()
            .map(|r| r.time_to(threshold).map_or(f64::INFINITY, |t| t as f64))
            .collect();
        median(&times)
    }

    /// Mean of the per-step mean over sampled steps in `[from, to)`.
    pub fn plateau(&self, from: u64, to: u64) -> f64 {
        let xs: Vec<f64> = self
            .steps
            .iter()
            .zip(&self.mean)
            .filter(|(s, _)| (from..to).contains(*s))
            .map(|(_, m)| *m)
            .collect();
        mean(&xs)
    }

    /// Mean of the per-step mean at the sample taken at `step`.
    pub fn at(&self, step: u64) -> Option<f64> {
        self.steps.iter().position(|s| *s == step).map(|k| self.mean[k])
    }
}

/// Run one trial per seed in parallel; results come back in seed order.
pub fn run_trials(config: &TrialConfig, arena: &Arena, seeds: &[u64]) -> Result<Vec<TrialRecord>> {
    seeds.par_iter().map(|&s| run_trial(config, arena, s)).collect()
}

/// Seeds of `trials` trials in one group of an experiment.
pub fn group_seeds(master: u64, experiment: &str, group: u64, trials: usize) -> Vec<u64> {
    (0..trials as u64).map(|t| trial_seed(master, experiment, group, t)).collect()
}

/// The robot-count study: `trials` trials per count, one summary per count.
pub fn sweep_robot_count(
    base: &TrialConfig,
    arena: &Arena,
    counts: &[usize],
    trials: usize,
    master: u64,
) -> Result<Vec<SweepSummary>> {
    if trials < 2 {
        return Err(param("sweep.trials", "must be >= 2"));
    }
    counts
        .iter()
        .map(|&n| {
            let config = TrialConfig {
                robots: n,
                ..base.clone()
            };
            let seeds = group_seeds(master, "sweep", n as u64, trials);
            SweepSummary::from_records(n as u64, run_trials(&config, arena, &seeds)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(seed: u64, series: &[(u64, f64)]) -> TrialRecord {
        TrialRecord {
            seed,
            robots: 1,
            series: series.to_vec(),
            final_proportion: series.last().unwrap().1,
            final_coverage: 0.0,
            wall_time_secs: 0.0,
        }
    }

    #[test]
    fn identical_trials_have_zero_width() {
        let s = [(0, 0.1), (10, 0.5)];
        let summary = SweepSummary::from_records(1, vec![record(0, &s), record(0, &s)]).unwrap();
        assert_eq!(summary.ci_half, vec![0.0, 0.0]);
        assert_eq!(summary.mean, vec![0.1, 0.5]);
    }

    #[test]
    fn single_trial_rejected() {
        let s = [(0, 0.1)];
        assert!(SweepSummary::from_records(1, vec![record(0, &s)]).is_err());
    }

    #[test]
    fn median_time_treats_unreached_as_slowest() {
        let a = record(0, &[(0, 0.0), (10, 0.9)]);
        let b = record(1, &[(0, 0.0), (10, 0.1)]);
        let c = record(2, &[(0, 0.9), (10, 0.9)]);
        let summary = SweepSummary::from_records(1, vec![a.clone(), b.clone(), c]).unwrap();
        assert_eq!(summary.median_time_to(0.8), 10.0);
        let slow = SweepSummary::from_records(1, vec![a, b.clone(), b]).unwrap();
        assert_eq!(slow.median_time_to(0.8), f64::INFINITY);
    }

    #[test]
    fn zero_robot_trials_are_flat() {
        let config = TrialConfig {
            robots: 0,
            max_steps: 200,
            ..TrialConfig::default()
        };
        let arena = Arena::from_config(&config).unwrap();
        let sweep = sweep_robot_count(&config, &arena, &[0], 2, 3).unwrap();
        for r in &sweep[0].records {
            assert!(r.series.iter().all(|s| s.1 == r.series[0].1));
        }
    }

    #[test]
    fn trials_are_deterministic_and_ordered() {
        let config = TrialConfig {
            robots: 2,
            max_steps: 300,
            ..TrialConfig::default()
        };
        let arena = Arena::from_config(&config).unwrap();
        let seeds = group_seeds(9, "sweep", 2, 3);
        let a = run_trials(&config, &arena, &seeds).unwrap();
        let b: Vec<TrialRecord> = seeds.iter().rev().map(|&s| run_trial(&config, &arena, s).unwrap()).collect();
        for (x, y) in a.iter().zip(b.iter().rev()) {
            assert_eq!(x.series, y.series);
            assert_eq!(x.seed, y.seed);
        }
    }

    #[test]
    fn ci_shrinks_with_more_trials() {
        let config = TrialConfig {
            robots: 2,
            max_steps: 400,
            ..TrialConfig::default()
        };
        let arena = Arena::from_config(&config).unwrap();
        let few = sweep_robot_count(&config, &arena, &[2], 5, 11).unwrap();
        let many = sweep_robot_count(&config, &arena, &[2], 30, 11).unwrap();
        let avg = |s: &SweepSummary| mean(&s.ci_half[1..]);
        assert!(avg(&many[0]) < avg(&few[0]), "{} vs {}", avg(&many[0]), avg(&few[0]));
    }
}
