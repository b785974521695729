//! Scenario files, experiment runs with CSV output and run manifests, plot
//! scripts, and robustness/resiliency scoring of performance traces.

mod plot;
mod run;
mod scenario;
mod score;

pub use plot::{emit_plot_script, PlotKind};
pub use run::{run_scenario, run_scenario_file, RunOptions, RunReport, CASCADE_SUMMARY_HEADER, GLOBAL_CASCADE_FRACTION};
pub use scenario::{
    BufferingScenario, ExperimentKind, ExperimentSpec, InterdependentScenario, MotterLaiScenario, PercolationScenario,
    Scenario, ScenarioError, SyntheticClaims, TruthScenario, WattsScenario, WeightedBetaScenario,
};
pub use score::{score_trace, ResilienceTrace, TraceScores};
