//! Pipelines and reports behind the `crossing-forge` binary.

pub mod pipeline;
pub mod selfcheck;

pub use pipeline::{cmd_end_to_end, EndToEndOptions, Headline, PipelineReport, Stage, StageStatus, Verdict};
pub use selfcheck::{cmd_selfcheck, reference_budget, SelfcheckOptions, SelfcheckReport};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CROSSING_FORGE_OUT";
