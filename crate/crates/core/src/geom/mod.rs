//! Numerical curvature on coordinate charts.
//!
//! Metric components are evaluated on [`Jet2`] coordinates, so a single pass
//! yields `g_ij` with exact first and second partials. Curvature follows from
//! those by the usual formulas. [`fd_oracle`] repeats the computation from
//! finite differences of the metric values alone.

mod chart;
mod charts;
mod curvature;
mod fd;
mod jet;

use thiserror::Error;

pub use chart::{ChartMetric, MetricJets};
pub use charts::{base_connection_defect, euclidean, invert_base, invert_point, page_pope_chart, rescaled_chart, round_sphere};
pub use curvature::{
    christoffel, curvature, einstein_residual, ricci, riemann, scalar, sectional, Christoffel, CurvatureReport,
    MetricDerivatives, PointSummary, Riemann, SYMMETRY_TOLERANCE,
};
pub use fd::{fd_oracle, FD_MARGIN_STEPS, FD_STEP};
pub use jet::Jet2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("point {0:?} is outside the chart domain")]
    OutOfDomain(Vec<f64>),
    #[error("metric is not symmetric at {0:?}")]
    NotSymmetric(Vec<f64>),
    #[error("metric is not positive definite at {0:?}")]
    NotPositiveDefinite(Vec<f64>),
    #[error("metric is singular at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("tangent vectors span a degenerate plane")]
    DegeneratePlane,
    #[error("finite-difference stencil leaves the domain at {0:?}")]
    StepTooLarge(Vec<f64>),
    #[error("charts exist only for n = 1, got n = {0}")]
    UnsupportedDimension(u32),
    #[error("Riemann symmetries violated: symmetry {symmetry:e}, Bianchi {bianchi:e}")]
    SymmetryViolation { symmetry: f64, bianchi: f64 },
    #[error("invalid chart data: {0}")]
    InvalidChart(String),
}
