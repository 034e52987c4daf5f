//! Localization diagnostics, configuration files and result output.

pub mod config;
mod localization;
pub mod output;

pub use localization::{disentangled_localization, localization_factor, LocalizationReport, CLUSTER_TOLERANCE};
