//! SDP-based hypothesis tests, the plug-in sequential estimator of the
//! number of communities, and the sufficient conditions for test power.

mod conditions;
mod means;
mod sequential;

pub use conditions::{check_theorem2, check_theorem4, check_theorem7};
pub use means::{estimate_means, w_plus_plugin, MeanEstimate, PluginEstimate};
pub use sequential::{
    plugin_test, sequential_estimate_k, KHat, LabelSource, SequentialOptions, SequentialTrace, Stage, WPlusMode,
    DEFAULT_K_MAX,
};
pub use test::{test_statistic, threshold, TestOutcome};
