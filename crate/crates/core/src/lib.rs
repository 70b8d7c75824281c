//! Visual-robustness tooling for VQA models.
//!
//! The crate has two halves. [`corruptions`] (built on [`imgcore`]) turns a
//! clean image into seeded, severity-graded degraded copies. [`metrics`]
//! (fed by [`dataset`]) turns per-question predictions on those copies into
//! accuracy, error sub-metrics and the weighted Visual Robustness Error.

pub mod batch;
pub mod corruptions;
pub mod dataset;
pub mod imgcore;
pub mod metrics;

pub use corruptions::{apply, CorruptionId, CorruptionSpec, SeverityTable};
pub use imgcore::{Exec, FloatImage, PixelBuffer, SeededRng, StreamKey};
pub use metrics::{EvaluationGrid, MetricReport, SubMetric, WeightVector};
