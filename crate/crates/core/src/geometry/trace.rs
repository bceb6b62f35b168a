//! Tracing a bottom-to-top path through a clipped domain: the parameter
//! intervals the path spends inside the domain closure, which boundary
//! component it enters and exits through, and the witness search that links
//! an interval's entry component to an earlier interval's exit component.

use super::decompose::LambdaDecomposition;
use super::domain::RegionLocation;
use super::primitives::{Point, SegmentCrossing, TIGHT_EPS};
use super::GeometryError;

/// Maximal parameter interval `[enter, exit]` the path spends inside the
/// domain closure. A grazing touch from outside is kept as a degenerate
/// interval with `enter == exit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceInterval {
    pub enter: f64,
    pub exit: f64,
    /// Index into the decomposition's components for the boundary piece
    /// crossed at `enter`.
    pub component_at_entry: usize,
    /// Same for `exit`.
    pub component_at_exit: usize,
}

/// Result of tracing a path: the polyline, its normalized arc-length
/// parameterization, and the ordered pairwise-disjoint inside intervals.
#[derive(Debug, Clone)]
pub struct PathTrace {
    pub path: Vec<Point>,
    pub intervals: Vec<TraceInterval>,
}

impl PathTrace {
    /// Index of the earliest interval, if any.
    pub fn j_min(&self) -> Option<usize> {
        if self.intervals.is_empty() {
            None
        } else {
            Some(0)
        }
    }

    /// Index of the latest interval, if any.
    pub fn j_max(&self) -> Option<usize> {
        self.intervals.len().checked_sub(1)
    }

    /// Strict precedence: interval `j` ends before interval `k` begins.
    pub fn precedes(&self, j: usize, k: usize) -> bool {
        self.intervals[j].exit < self.intervals[k].enter
    }
}

/// Trace a polyline path through the clipped domain of a decomposition.
///
/// The path must start on the rectangle's bottom edge, end on its top edge,
/// and stay strictly inside the open rectangle in between. The returned
/// intervals partition the preimage of the domain closure along the path,
/// sorted by entry parameter.
pub fn trace_path(
    path: &[Point],
    decomp: &LambdaDecomposition,
) -> Result<PathTrace, GeometryError> {
    let rect = decomp.rect;
    let region = decomp.region();
    let eps = region.eps();
    if path.len() < 2 {
        return Err(GeometryError::PathOutside);
    }
    let first = path[0];
    let last = *path.last().unwrap();
    let on_bottom = (first.y - rect.bottom()).abs() <= eps
        && first.x >= rect.left() - eps
        && first.x <= rect.right() + eps;
    let on_top = (last.y - rect.top()).abs() <= eps
        && last.x >= rect.left() - eps
        && last.x <= rect.right() + eps;
    if !on_bottom || !on_top {
        return Err(GeometryError::PathOutside);
    }
    for p in &path[1..path.len() - 1] {
        if !rect.contains_open(*p, eps) {
            return Err(GeometryError::PathOutside);
        }
    }

    // Normalized arc-length parameters of the path vertices.
    let mut vertex_t = Vec::with_capacity(path.len());
    let mut acc = 0.0;
    vertex_t.push(0.0);
    for w in path.windows(2) {
        acc += w[0].dist(w[1]);
        vertex_t.push(acc);
    }
    let total = acc;
    if total <= TIGHT_EPS {
        return Err(GeometryError::PathOutside);
    }
    for t in &mut vertex_t {
        *t /= total;
    }
    *vertex_t.last_mut().unwrap() = 1.0;
    let point_at = |t: f64| -> Point {
        let k = match vertex_t.binary_search_by(|v| v.partial_cmp(&t).expect("finite param")) {
            Ok(k) => return path[k],
            Err(k) => k.clamp(1, path.len() - 1),
        };
        let (t0, t1) = (vertex_t[k - 1], vertex_t[k]);
        if t1 - t0 <= TIGHT_EPS {
            return path[k];
        }
        path[k - 1].lerp(path[k], (t - t0) / (t1 - t0))
    };

    // Boundary crossing parameters.
    let mut cuts: Vec<f64> = Vec::new();
    for (i, w) in path.windows(2).enumerate() {
        let (ta, tb) = (vertex_t[i], vertex_t[i + 1]);
        for lp in region.loops() {
            let n = lp.len();
            for k in 0..n {
                match super::primitives::segment_crossing(w[0], w[1], lp[k], lp[(k + 1) % n]) {
                    SegmentCrossing::None => {}
                    SegmentCrossing::At { t, .. } => {
                        cuts.push(ta + t * (tb - ta));
                    }
                    SegmentCrossing::Overlap { t0, t1 } => {
                        cuts.push(ta + t0 * (tb - ta));
                        cuts.push(ta + t1 * (tb - ta));
                    }
                }
            }
        }
    }
    cuts.sort_by(|p, q| p.partial_cmp(q).expect("finite crossing param"));
    let tol = (eps / total).max(10.0 * TIGHT_EPS);
    cuts.dedup_by(|b, a| (*b - *a).abs() <= tol);

    // Closure membership of each gap between consecutive cut parameters.
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(0.0);
    bounds.extend(cuts.iter().copied().filter(|t| *t > tol && *t < 1.0 - tol));
    bounds.push(1.0);
    let inside: Vec<bool> = bounds
        .windows(2)
        .map(|w| region.locate(point_at(0.5 * (w[0] + w[1]))) != RegionLocation::Outside)
        .collect();

    let mut spans: Vec<(f64, f64)> = Vec::new();
    let mut run_start: Option<f64> = None;
    for (k, &is_in) in inside.iter().enumerate() {
        if is_in {
            run_start.get_or_insert(bounds[k]);
            continue;
        }
        if let Some(s) = run_start.take() {
            spans.push((s, bounds[k]));
        }
        // Degenerate touch: outside on both sides of an actual boundary
        // contact at the cut ending this gap.
        if k + 1 < inside.len() && !inside[k + 1] {
            let t = bounds[k + 1];
            if region.locate(point_at(t)) == RegionLocation::OnBoundary {
                spans.push((t, t));
            }
        }
    }
    if let Some(s) = run_start.take() {
        spans.push((s, 1.0));
    }

    let mut intervals = Vec::with_capacity(spans.len());
    for (e, o) in spans {
        let resolve = |t: f64| -> Result<usize, GeometryError> {
            let p = point_at(t);
            decomp.component_containing(p).ok_or_else(|| {
                GeometryError::Topology(format!(
                    "path boundary contact at ({:.9}, {:.9}) lies on no component",
                    p.x, p.y
                ))
            })
        };
        intervals.push(TraceInterval {
            enter: e,
            exit: o,
            component_at_entry: resolve(e)?,
            component_at_exit: resolve(o)?,
        });
    }
    debug_assert!(intervals.windows(2).all(|w| w[0].exit < w[1].enter));
    Ok(PathTrace {
        path: path.to_vec(),
        intervals,
    })
}

/// Find the latest interval `w` with `j_prev <= w < j` whose exit component
/// equals interval `j`'s entry component. For traces of valid
/// decompositions such a witness always exists when `j_prev` strictly
/// precedes `j`; absence signals inconsistent inputs.
pub fn lemma1_witness(
    trace: &PathTrace,
    j: usize,
    j_prev: usize,
) -> Result<usize, GeometryError> {
    let n = trace.intervals.len();
    if j >= n || j_prev >= n {
        return Err(GeometryError::Topology(format!(
            "interval index out of range: j = {j}, j_prev = {j_prev}, count = {n}"
        )));
    }
    if !trace.precedes(j_prev, j) {
        return Err(GeometryError::Topology(format!(
            "interval {j_prev} does not strictly precede interval {j}"
        )));
    }
    let target = trace.intervals[j].component_at_entry;
    for w in (j_prev..j).rev() {
        if trace.intervals[w].component_at_exit == target {
            return Ok(w);
        }
    }
    Err(GeometryError::WitnessNotFound { j })
}
