//! Ambient metrics and their curvature.

mod curvature;
mod metric;

pub use curvature::{adapted_frame, ambient_jet, curvature_pack, fg_coefficients, AdaptedFrame, CurvaturePack, Tensor};
pub use metric::{fd_expansion, AmbientChart, LocalMetric, MetricFn, MetricMode, Omega};
