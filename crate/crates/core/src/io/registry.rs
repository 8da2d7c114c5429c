//! One [`Experiment`] per study, looked up by name. Each writes its CSVs
//! and images into its own directory next to a [`RunManifest`].

use super::config::ExperimentConfig;
use super::csv::{CsvWriter, SEARCH_HEADER, SWEEP_HEADER, TRIALS_HEADER};
use super::manifest::RunManifest;
use crate::controller::compute_order;
use crate::controller::Decision;
use crate::error::{Error, Result};
use crate::experiments::ablation::{ablation_final_world, radius_ablation};
use crate::experiments::flow::{circulation, flow_field, goal_centroid};
use crate::experiments::perturb::perturbation_study;
use crate::experiments::search::{competition_rank, variant_search, VariantScore};
use crate::experiments::seed::trial_seed;
use crate::experiments::sweep::{sweep_robot_count, SweepSummary};
use crate::experiments::trial::{run_trial_with_world, Arena, TrialConfig, TrialObserver};
use crate::render::{render_flow, render_frame};
use crate::sensors::SensorSnapshot;
use crate::world::World;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Threshold used for the reported time-to-threshold statistics.
pub const TIME_TO_THRESHOLD: f64 = 0.8;

/// Where an experiment writes and what it records.
pub struct RunContext {
    pub config: ExperimentConfig,
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

impl RunContext {
    /// Claim an output file and return its full path.
    pub fn output(&mut self, relative: impl Into<PathBuf>) -> Result<PathBuf> {
        let rel = self.manifest.claim(relative)?;
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        Ok(path)
    }

    fn csv(&mut self, relative: &str, header: &[&str]) -> Result<CsvWriter> {
        let path = self.output(relative)?;
        CsvWriter::create(&path, header)
    }
}

pub trait Experiment: Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn run(&self, ctx: &mut RunContext) -> Result<()>;
}

pub static EXPERIMENTS: &[&dyn Experiment] = &[&Run, &Sweep, &Perturb, &Ablate, &Search, &Flow];

pub fn find_experiment(name: &str) -> Result<&'static dyn Experiment> {
    EXPERIMENTS
        .iter()
        .copied()
        .find(|e| e.name() == name)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "experiment",
            name: name.to_string(),
            expected: EXPERIMENTS.iter().map(|e| e.name()).collect::<Vec<_>>().join(", "),
        })
}

/// Run experiment `name` into `out_root/<name>/`. The manifest is written
/// before anything else and rewritten with the outcome at the end.
pub fn execute(name: &str, config: &ExperimentConfig, out_root: &Path) -> Result<RunManifest> {
    let experiment = find_experiment(name)?;
    config.validate()?;
    let dir = out_root.join(name);
    std::fs::create_dir_all(&dir)?;
    let mut ctx = RunContext {
        config: config.clone(),
        manifest: RunManifest::new(name, config, rayon::current_num_threads()),
        dir,
    };
    ctx.manifest.write(&ctx.dir)?;
    let outcome = experiment.run(&mut ctx);
    ctx.manifest.finish(&outcome);
    ctx.manifest.write(&ctx.dir)?;
    outcome.map(|()| ctx.manifest)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Writes a frame every `every` steps and, optionally, one CSV row per
/// robot decision.
struct RunObserver<'a> {
    ctx: &'a mut RunContext,
    field: Arc<crate::field::ScalarField>,
    every: u64,
    scale: f64,
    trace: Option<CsvWriter>,
    error: Option<Error>,
}

pub const TRACE_HEADER: &[&str] = &[
    "step",
    "robot",
    "l",
    "c",
    "r",
    "left_puck",
    "left_robot",
    "right_robot",
    "order",
    "branch",
    "v",
    "omega",
];

impl TrialObserver for RunObserver<'_> {
    fn on_decision(&mut self, step: u64, robot: u32, s: &SensorSnapshot, d: &Decision) {
        if let (Some(w), None) = (self.trace.as_mut(), self.error.as_ref()) {
            let order = compute_order(s.l, s.c, s.r).bits();
            let row = w.row(&[
                &step,
                &robot,
                &s.l,
                &s.c,
                &s.r,
                &(s.left_puck as u8),
                &(s.left_robot as u8),
                &(s.right_robot as u8),
                &order,
                &d.branch,
                &d.action.v,
                &d.action.omega,
            ]);
            if let Err(e) = row {
                self.error = Some(e);
            }
        }
    }

    fn on_step(&mut self, world: &World) -> Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        if self.every > 0 && world.step_count % self.every == 0 {
            let path = self.ctx.output(format!("frames/frame_{:07}.ppm", world.step_count))?;
            render_frame(world, &self.field, self.scale).write(&path)?;
        }
        Ok(())
    }
}

/// A single trial with optional frame dumps and decision trace.
pub struct Run;

impl Experiment for Run {
    fn name(&self) -> &'static str {
        "run"
    }
    fn summary(&self) -> &'static str {
        "single seeded trial; proportion series, final frame, optional frame dumps"
    }
    fn run(&self, ctx: &mut RunContext) -> Result<()> {
        let trial = ctx.config.trial.clone();
        let settings = ctx.config.run.clone();
        let arena = Arena::from_config(&trial)?;
        let seed = trial_seed(ctx.config.seed, "run", 0, 0);
        let trace = if settings.trace {
            Some(ctx.csv("trace.csv", TRACE_HEADER)?)
        } else {
            None
        };
        let mut observer = RunObserver {
            ctx,
            field: arena.field.clone(),
            every: settings.frames_every,
            scale: settings.frame_scale,
            trace,
            error: None,
        };
        let (record, world) = run_trial_with_world(&trial, &arena, seed, &mut observer)?;
        if let Some(e) = observer.error.take() {
            return Err(e);
        }
        if let Some(w) = observer.trace.take() {
            w.finish()?;
        }
        let mut csv = ctx.csv("trial.csv", TRIALS_HEADER)?;
        for (step, p) in &record.series {
            csv.row(&[step, p])?;
        }
        csv.finish()?;
        let path = ctx.output("final.ppm")?;
        render_frame(&world, &arena.field, settings.frame_scale).write(&path)?;
        ctx.manifest.note("seed", seed);
        ctx.manifest.note("final_proportion", record.final_proportion);
        ctx.manifest.note("final_coverage", record.final_coverage);
        ctx.manifest.note("time_to_0.8", record.time_to(TIME_TO_THRESHOLD));
        Ok(())
    }
}

fn write_summaries(csv: &mut CsvWriter, summaries: &[SweepSummary]) -> Result<()> {
    for s in summaries {
        for k in 0..s.steps.len() {
            csv.row(&[&s.group, &s.steps[k], &s.mean[k], &s.ci_half[k]])?;
        }
    }
    Ok(())
}

pub const SWEEP_TRIALS_HEADER: &[&str] = &["group", "trial", "seed", "final_proportion", "time_to_0.8"];

fn write_trial_finals(csv: &mut CsvWriter, summaries: &[SweepSummary]) -> Result<()> {
    for s in summaries {
        for (t, r) in s.records.iter().enumerate() {
            let time = r.time_to(TIME_TO_THRESHOLD).map_or(String::new(), |t| t.to_string());
            csv.row(&[&s.group, &t, &r.seed, &r.final_proportion, &time])?;
        }
    }
    Ok(())
}

/// Robot-count study.
pub struct Sweep;

impl Experiment for Sweep {
    fn name(&self) -> &'static str {
        "sweep"
    }
    fn summary(&self) -> &'static str {
        "robot-count sweep; per-step mean and 95% CI per count"
    }
    fn run(&self, ctx: &mut RunContext) -> Result<()> {
        let trial = ctx.config.trial.clone();
        let s = ctx.config.sweep.clone();
        let arena = Arena::from_config(&trial)?;
        let summaries = sweep_robot_count(&trial, &arena, &s.counts, s.trials, ctx.config.seed)?;
        let mut csv = ctx.csv("sweep.csv", SWEEP_HEADER)?;
        write_summaries(&mut csv, &summaries)?;
        csv.finish()?;
        let mut csv = ctx.csv("sweep_trials.csv", SWEEP_TRIALS_HEADER)?;
        write_trial_finals(&mut csv, &summaries)?;
        csv.finish()?;
        for g in &summaries {
            ctx.manifest.note(&format!("robots_{}.mean_final", g.group), g.mean_final());
            ctx.manifest.note(
                &format!("robots_{}.median_time_to_0.8", g.group),
                finite(g.median_time_to(TIME_TO_THRESHOLD)),
            );
        }
        Ok(())
    }
}

/// Scatter every puck mid-trial and watch the recovery.
pub struct Perturb;

impl Experiment for Perturb {
    fn name(&self) -> &'static str {
        "perturb"
    }
    fn summary(&self) -> &'static str {
        "perturbation study; pucks scattered mid-trial, pre/post plateaus"
    }
    fn run(&self, ctx: &mut RunContext) -> Result<()> {
        let p = ctx.config.perturb.clone();
        let trial = TrialConfig {
            robots: p.robots,
            ..ctx.config.trial.clone()
        };
        let arena = Arena::from_config(&trial)?;
        let study = perturbation_study(&trial, &arena, p.scatter_step, p.trials, p.window, ctx.config.seed)?;
        let summaries = [study.summary.clone()];
        let mut csv = ctx.csv("perturb.csv", SWEEP_HEADER)?;
        write_summaries(&mut csv, &summaries)?;
        csv.finish()?;
        let mut csv = ctx.csv("perturb_trials.csv", SWEEP_TRIALS_HEADER)?;
        write_trial_finals(&mut csv, &summaries)?;
        csv.finish()?;
        ctx.manifest.note("pre_plateau", study.pre_plateau);
        ctx.manifest.note("post_plateau", study.post_plateau);
        ctx.manifest.note("before_scatter", study.before);
        ctx.manifest.note("after_scatter", study.after);
        ctx.manifest.note("plateau_gap", (study.post_plateau - study.pre_plateau).abs());
        Ok(())
    }
}

pub const ABLATE_HEADER: &[&str] = &["radius", "trial", "seed", "proportion", "coverage"];
pub const ABLATE_SUMMARY_HEADER: &[&str] = &["radius", "mean_proportion", "mean_coverage"];

/// Puck-sensing radius study.
pub struct Ablate;

impl Experiment for Ablate {
    fn name(&self) -> &'static str {
        "ablate"
    }
    fn summary(&self) -> &'static str {
        "puck-sensing radius ablation; proportion in goal and goal coverage per radius"
    }
    fn run(&self, ctx: &mut RunContext) -> Result<()> {
        let a = ctx.config.ablate.clone();
        let trial = TrialConfig {
            field: a.field.clone(),
            robots: a.robots,
            ..ctx.config.trial.clone()
        };
        let arena = Arena::from_config(&trial)?;
        let rows = radius_ablation(&trial, &arena, &a.radii, a.trials, ctx.config.seed)?;
        let mut csv = ctx.csv("ablate.csv", ABLATE_HEADER)?;
        for row in &rows {
            for (t, r) in row.records.iter().enumerate() {
                csv.row(&[&row.radius, &t, &r.seed, &r.final_proportion, &r.final_coverage])?;
            }
        }
        csv.finish()?;
        let mut csv = ctx.csv("ablate_summary.csv", ABLATE_SUMMARY_HEADER)?;
        for row in &rows {
            csv.row(&[&row.radius, &row.mean_proportion, &row.mean_coverage])?;
            ctx.manifest.note(&format!("radius_{}.mean_proportion", row.radius), row.mean_proportion);
            ctx.manifest.note(&format!("radius_{}.mean_coverage", row.radius), row.mean_coverage);
        }
        csv.finish()?;
        if a.frames {
            for &radius in &a.radii {
                let world = ablation_final_world(&trial, &arena, radius, ctx.config.seed)?;
                let path = ctx.output(format!("final_r{radius}.ppm"))?;
                render_frame(&world, &arena.field, ctx.config.run.frame_scale).write(&path)?;
            }
        }
        Ok(())
    }
}

fn write_scores(csv: &mut CsvWriter, scores: &[VariantScore]) -> Result<()> {
    for s in scores {
        csv.row(&[&s.puck_variant, &s.align_variant, &s.mean_final, &s.trials])?;
    }
    Ok(())
}

/// Exhaustive search over both controller masks.
pub struct Search;

impl Experiment for Search {
    fn name(&self) -> &'static str {
        "search"
    }
    fn summary(&self) -> &'static str {
        "exhaustive 64x64 variant search at reduced budget, top combos re-run at full budget"
    }
    fn run(&self, ctx: &mut RunContext) -> Result<()> {
        let trial = ctx.config.trial.clone();
        let arena = Arena::from_config(&trial)?;
        let result = variant_search(&trial, &arena, &ctx.config.search, ctx.config.seed)?;
        let mut csv = ctx.csv("search.csv", SEARCH_HEADER)?;
        write_scores(&mut csv, &result.reduced)?;
        csv.finish()?;
        let mut csv = ctx.csv("search_full.csv", SEARCH_HEADER)?;
        write_scores(&mut csv, &result.full)?;
        csv.finish()?;
        let (p, a) = (trial.controller.puck_variant, trial.controller.align_variant);
        let rank = competition_rank(&result.reduced, p, a);
        ctx.manifest.note("reference_masks", [p, a]);
        ctx.manifest.note("reference_rank", rank);
        ctx.manifest.note("reference_percentile", rank.map(|r| r as f64 / result.reduced.len() as f64));
        ctx.manifest.note("reference_rank_full_budget", competition_rank(&result.full, p, a));
        ctx.manifest.note("combos", result.reduced.len());
        Ok(())
    }
}

pub const FLOW_HEADER: &[&str] = &["x", "y", "dx", "dy"];

/// Flow of a lone robot around the shape.
pub struct Flow;

impl Experiment for Flow {
    fn name(&self) -> &'static str {
        "flow"
    }
    fn summary(&self) -> &'static str {
        "flow field of a lone robot; vectors, arrow image and signed circulation"
    }
    fn run(&self, ctx: &mut RunContext) -> Result<()> {
        let trial = ctx.config.trial.clone();
        let arena = Arena::from_config(&trial)?;
        let vectors = flow_field(&trial, &arena, &ctx.config.flow, ctx.config.seed)?;
        let mut csv = ctx.csv("flow.csv", FLOW_HEADER)?;
        for v in &vectors {
            csv.row(&[&v.point.x, &v.point.y, &v.displacement.x, &v.displacement.y])?;
        }
        csv.finish()?;
        let pairs: Vec<_> = vectors.iter().map(|v| (v.point, v.displacement)).collect();
        let path = ctx.output("flow.ppm")?;
        render_flow(&pairs, &arena.field, ctx.config.run.frame_scale, 1.0).write(&path)?;
        if let Some(c) = goal_centroid(&arena.field) {
            ctx.manifest.note("goal_centroid", [c.x, c.y]);
            ctx.manifest.note("circulation", circulation(&vectors, c));
        }
        Ok(())
    }
}
