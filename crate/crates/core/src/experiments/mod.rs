//! Trial orchestration, metrics and the simulation studies.

pub mod ablation;
pub mod flow;
pub mod metrics;
pub mod perturb;
pub mod search;
pub mod seed;
pub mod stats;
pub mod sweep;
pub mod trial;

pub use ablation::{radius_ablation, AblationRow};
pub use flow::{circulation, flow_field, FlowSettings, FlowVector};
pub use metrics::{goal_coverage, proportion_in_goal};
pub use perturb::{perturbation_study, perturbation_trial, PerturbationStudy};
pub use search::{competition_rank, variant_search, SearchResult, SearchSettings, VariantScore};
pub use sweep::{sweep_robot_count, SweepSummary};
pub use trial::{
    run_trial, run_trial_observed, run_trial_with_world, Arena, Simulation, TrialConfig, TrialObserver, TrialRecord,
};
