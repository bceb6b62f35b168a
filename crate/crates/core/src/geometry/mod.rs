//! Planar domain geometry: generalized strips, polygonal regions, rectangle
//! clipping into boundary components, path traces with their interval order,
//! and vertical-plane profile projection.

mod decompose;
mod domain;
mod primitives;
mod profile;
mod trace;

pub use decompose::{
    clip_decompose, good_components, partition_lambda, BoundaryComponent, ComponentKind,
    GoodComponent, Label, LambdaDecomposition, RectEdge,
};
pub use domain::{build_generalized_strip, PlanarDomain, Rectangle, Region, RegionLocation};
pub use primitives::{
    point, point_in_polygon, point_polyline_distance, point_segment_distance, polygon_signed_area,
    polyline_length, segment_crossing, segment_segment_distance, segment_vertical_crossing,
    PiecewiseLinearFn, PlfError, Point, SegmentCrossing, TIGHT_EPS,
};
pub use profile::{
    closest_points, profile_project, set_distance, set_distance_multi, ProfileCurve,
};
pub use trace::{lemma1_witness, trace_path, PathTrace, TraceInterval};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("boundary curves cross or touch near x = {x}")]
    CurvesCross { x: f64 },
    #[error("pinched strip requires b-(x_lo) = b+(x_lo); open strip requires b-(x_lo) < b+(x_lo)")]
    BadPinch,
    #[error("invalid boundary loop: {0}")]
    BadLoop(String),
    #[error("hypothesis {0} violated for the rectangle")]
    HypothesisViolated(u8),
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("no component of the clipped domain satisfies the hypotheses")]
    NoGoodComponent,
    #[error("path must run from the bottom edge to the top edge through the open rectangle")]
    PathOutside,
    #[error("no witness interval exists for interval {j}")]
    WitnessNotFound { j: usize },
    #[error("reduction failed: {0}")]
    ReductionFailed(String),
    #[error("unsupported boundary topology: {0}")]
    Topology(String),
    #[error(transparent)]
    Plf(#[from] PlfError),
}
