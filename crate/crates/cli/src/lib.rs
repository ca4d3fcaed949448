//! Study runner for the `cylspec-core` eigenvalue kernels: TOML study
//! configurations, parallel orchestration, CSV/JSON records, SVG plots and
//! plain-text mesh/matrix dumps.

pub mod config;
pub mod dump;
pub mod plot;
pub mod record;
pub mod study;

pub use config::{ConfigError, StudyConfig, StudyKind};
pub use record::{fmt_g17, StudyRecord};
pub use study::{run_study, RunOptions, StudyOutcome};
