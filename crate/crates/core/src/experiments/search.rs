//! Exhaustive search over both 6-bit controller masks.

use super::stats::mean;
use super::sweep::group_seeds;
use super::trial::{run_trial, Arena, TrialConfig};
use crate::error::{param, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Number of distinct masks per variant.
pub const MASKS: u8 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantScore {
    pub puck_variant: u8,
    pub align_variant: u8,
    pub mean_final: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSettings {
    pub trials_per_combo: usize,
    /// Step budget of the exhaustive pass.
    pub reduced_steps: u64,
    /// How many of the best combos are re-run at the full budget.
    pub top_k: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            trials_per_combo: 5,
            reduced_steps: 2000,
            top_k: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// All 4096 combos at the reduced budget, best first.
    pub reduced: Vec<VariantScore>,
    /// The `top_k` best re-evaluated at the full budget, best first.
    pub full: Vec<VariantScore>,
}

/// Best first; equal scores are ordered by (puck, align) so the result does
/// not depend on evaluation order.
pub fn rank(scores: &mut [VariantScore]) {
    scores.sort_by(|a, b| {
        b.mean_final
            .partial_cmp(&a.mean_final)
            .unwrap_or(Ordering::Equal)
            .then(a.puck_variant.cmp(&b.puck_variant))
            .then(a.align_variant.cmp(&b.align_variant))
    });
}

/// One plus the number of combos scoring strictly higher (ties share a rank).
pub fn competition_rank(scores: &[VariantScore], puck_variant: u8, align_variant: u8) -> Option<usize> {
    let me = scores
        .iter()
        .find(|s| s.puck_variant == puck_variant && s.align_variant == align_variant)?;
    Some(1 + scores.iter().filter(|s| s.mean_final > me.mean_final).count())
}

/// Mean final proportion of one combo. Every combo sees the same seeds.
pub fn score_combo(
    base: &TrialConfig,
    arena: &Arena,
    puck_variant: u8,
    align_variant: u8,
    seeds: &[u64],
) -> Result<VariantScore> {
    let mut config = base.clone();
    config.controller.puck_variant = puck_variant;
    config.controller.align_variant = align_variant;
    let finals = seeds
        .iter()
        .map(|&s| run_trial(&config, arena, s).map(|r| r.final_proportion))
        .collect::<Result<Vec<_>>>()?;
    Ok(VariantScore {
        puck_variant,
        align_variant,
        mean_final: mean(&finals),
        trials: seeds.len(),
    })
}

/// Score every combo in `combos` in parallel, returned in input order.
pub fn score_combos(base: &TrialConfig, arena: &Arena, combos: &[(u8, u8)], seeds: &[u64]) -> Result<Vec<VariantScore>> {
    combos
        .par_iter()
        .map(|&(p, a)| score_combo(base, arena, p, a, seeds))
        .collect()
}

pub fn all_combos() -> Vec<(u8, u8)> {
    (0..MASKS).flat_map(|p| (0..MASKS).map(move |a| (p, a))).collect()
}

pub fn variant_search(base: &TrialConfig, arena: &Arena, settings: &SearchSettings, master: u64) -> Result<SearchResult> {
    if settings.trials_per_combo == 0 {
        return Err(param("search.trials_per_combo", "must be >= 1"));
    }
    if settings.reduced_steps == 0 {
        return Err(param("search.reduced_steps", "must be > 0"));
    }
    let seeds = group_seeds(master, "search", 0, settings.trials_per_combo);
    let reduced_config = TrialConfig {
        max_steps: settings.reduced_steps,
        scatter_step: None,
        ..base.clone()
    };
    let mut reduced = score_combos(&reduced_config, arena, &all_combos(), &seeds)?;
    rank(&mut reduced);
    let top: Vec<(u8, u8)> = reduced
        .iter()
        .take(settings.top_k)
        .map(|s| (s.puck_variant, s.align_variant))
        .collect();
    let full_config = TrialConfig {
        scatter_step: None,
        ..base.clone()
    };
    let mut full = score_combos(&full_config, arena, &top, &seeds)?;
    rank(&mut full);
    Ok(SearchResult { reduced, full })
}
