//! Ruled-surface geometry: skew-line distances, extremal ruling pairs, and
//! the power-series pipeline that classifies a singular point of a ruled
//! chart as regular, planar, conical, or cuspidal.

pub mod chart;
pub mod lines;

pub use chart::{
    canonical_form, classify_singularity, descend_evenness, orthogonalize_chart, puiseux_graph,
    singular_shift, CanonicalChart, ParameterChange, PuiseuxGraph, PuiseuxTerm, RuledChart,
    SigmaSeries, SingularityVerdict, DEFAULT_TRUNCATION_ORDER,
};
pub use lines::{
    antipodal_check, closest_points, extremal_lines, line_distance, ExtremalScan, FnFamily, Line,
    LineFamily, LinePairGeometry,
};
