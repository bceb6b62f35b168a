//! Domain types: generalized strips between two graphs, axis-aligned
//! rectangles, and even-odd polygonal regions.

use super::primitives::{
    point, point_in_polygon, point_polyline_distance, polygon_signed_area, segment_crossing,
    PiecewiseLinearFn, Point, SegmentCrossing, TIGHT_EPS,
};
use super::GeometryError;

/// Generalized strip `{ (x, y) : x in x_range, b-(x) < y < b+(x) }`,
/// optionally pinched to a point at the left end.
#[derive(Debug, Clone)]
pub struct PlanarDomain {
    b_minus: PiecewiseLinearFn,
    b_plus: PiecewiseLinearFn,
    x_range: (f64, f64),
    pinched_left: bool,
}

/// Validating constructor for [`PlanarDomain`].
///
/// Requires `b-(x) < b+(x)` strictly inside the range. With `pinched_left`
/// the curves must meet at the left end; otherwise they must stay apart
/// there too. Positivity of the gap is checked exactly on the merged
/// breakpoint set (the gap is piecewise linear, so interior positivity
/// follows from breakpoint positivity).
pub fn build_generalized_strip(
    b_minus: PiecewiseLinearFn,
    b_plus: PiecewiseLinearFn,
    x_range: (f64, f64),
    pinched_left: bool,
) -> Result<PlanarDomain, GeometryError> {
    let (lo, hi) = x_range;
    if !(lo < hi) {
        return Err(GeometryError::BadLoop(format!(
            "empty x range [{lo}, {hi}]"
        )));
    }
    for f in [&b_minus, &b_plus] {
        let (flo, fhi) = f.domain();
        if flo > lo + TIGHT_EPS || fhi < hi - TIGHT_EPS {
            return Err(GeometryError::BadLoop(format!(
                "boundary curve domain [{flo}, {fhi}] does not cover [{lo}, {hi}]"
            )));
        }
    }
    let scale = (hi - lo).max(1.0);
    let mut xs: Vec<f64> = vec![lo, hi];
    for &(x, _) in b_minus.breakpoints().iter().chain(b_plus.breakpoints()) {
        if x > lo && x < hi {
            xs.push(x);
        }
    }
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite breakpoints"));
    for &x in &xs {
        let gap = b_plus.eval_checked(x)? - b_minus.eval_checked(x)?;
        if x <= lo + TIGHT_EPS * scale {
            match (pinched_left, gap.abs() <= TIGHT_EPS * scale, gap > 0.0) {
                (true, true, _) => continue,
                (true, false, _) => return Err(GeometryError::BadPinch),
                (false, _, true) => continue,
                (false, _, false) => return Err(GeometryError::BadPinch),
            }
        }
        if gap <= 0.0 {
            return Err(GeometryError::CurvesCross { x });
        }
    }
    Ok(PlanarDomain {
        b_minus,
        b_plus,
        x_range,
        pinched_left,
    })
}

impl PlanarDomain {
    pub fn b_minus(&self) -> &PiecewiseLinearFn {
        &self.b_minus
    }

    pub fn b_plus(&self) -> &PiecewiseLinearFn {
        &self.b_plus
    }

    pub fn x_range(&self) -> (f64, f64) {
        self.x_range
    }

    pub fn pinched_left(&self) -> bool {
        self.pinched_left
    }

    /// Strip width `b+(x) - b-(x)`.
    pub fn width_at(&self, x: f64) -> Result<f64, GeometryError> {
        Ok(self.b_plus.eval_checked(x)? - self.b_minus.eval_checked(x)?)
    }

    /// Exact area between the curves (trapezoid rule is exact for
    /// piecewise-linear boundaries once breakpoints are included).
    pub fn area(&self) -> f64 {
        let (lo, hi) = self.x_range;
        let mut xs: Vec<f64> = vec![lo, hi];
        for &(x, _) in self
            .b_minus
            .breakpoints()
            .iter()
            .chain(self.b_plus.breakpoints())
        {
            if x > lo && x < hi {
                xs.push(x);
            }
        }
        xs.sort_by(|p, q| p.partial_cmp(q).expect("finite breakpoints"));
        xs.dedup_by(|p, q| (*p - *q).abs() <= TIGHT_EPS);
        let mut area = 0.0;
        for w in xs.windows(2) {
            let g0 = self.b_plus.eval(w[0]) - self.b_minus.eval(w[0]);
            let g1 = self.b_plus.eval(w[1]) - self.b_minus.eval(w[1]);
            area += 0.5 * (g0 + g1) * (w[1] - w[0]);
        }
        area
    }

    /// Closed boundary polygon, counterclockwise: lower curve left to right,
    /// right cap, upper curve right to left, left cap (absent when pinched).
    pub fn boundary_polygon(&self) -> Vec<Point> {
        let (lo, hi) = self.x_range;
        let mut pts: Vec<Point> = Vec::new();
        for (x, y) in self.b_minus.clip_to(lo, hi).unwrap() {
            pts.push(point(x, y));
        }
        let mut upper = self.b_plus.clip_to(lo, hi).unwrap();
        upper.reverse();
        for (x, y) in upper {
            pts.push(point(x, y));
        }
        if self.pinched_left {
            // Lower start and upper end coincide at the pinch; drop the repeat.
            pts.pop();
        }
        pts
    }

    pub fn to_region(&self) -> Region {
        Region::from_loops(vec![self.boundary_polygon()])
            .expect("validated strip produces a simple boundary polygon")
    }
}

/// Axis-aligned rectangle `[cx - a, cx + a] x [cy - b, cy + b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub center: Point,
    pub a: f64,
    pub b: f64,
}

impl Rectangle {
    pub fn new(center: Point, a: f64, b: f64) -> Self {
        assert!(a > 0.0 && b > 0.0, "rectangle half-widths must be positive");
        Rectangle { center, a, b }
    }

    pub fn left(&self) -> f64 {
        self.center.x - self.a
    }

    pub fn right(&self) -> f64 {
        self.center.x + self.a
    }

    pub fn bottom(&self) -> f64 {
        self.center.y - self.b
    }

    pub fn top(&self) -> f64 {
        self.center.y + self.b
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.a.hypot(self.b)
    }

    /// Midpoint of the bottom edge; seeds the lower complement component.
    pub fn bottom_seed(&self) -> Point {
        point(self.center.x, self.bottom())
    }

    /// Midpoint of the top edge; seeds the upper complement component.
    pub fn top_seed(&self) -> Point {
        point(self.center.x, self.top())
    }

    /// Strict interior membership with a tolerance margin (positive margin
    /// shrinks the rectangle).
    pub fn contains_open(&self, p: Point, margin: f64) -> bool {
        p.x > self.left() + margin
            && p.x < self.right() - margin
            && p.y > self.bottom() + margin
            && p.y < self.top() - margin
    }

    /// Same center and height, different half-width.
    pub fn with_half_width(&self, a: f64) -> Rectangle {
        Rectangle::new(self.center, a, self.b)
    }
}

/// Point classification against a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionLocation {
    Inside,
    OnBoundary,
    Outside,
}

/// Polygonal region under the even-odd rule: a point is inside when it lies
/// within an odd number of boundary loops. Loops are normalized so the region
/// lies to the left of every directed boundary edge (outer loops
/// counterclockwise, holes clockwise).
#[derive(Debug, Clone)]
pub struct Region {
    loops: Vec<Vec<Point>>,
    eps: f64,
}

impl Region {
    pub fn from_loops(loops: Vec<Vec<Point>>) -> Result<Self, GeometryError> {
        if loops.is_empty() {
            return Err(GeometryError::BadLoop("no loops".into()));
        }
        let mut bb_min = point(f64::INFINITY, f64::INFINITY);
        let mut bb_max = point(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (li, lp) in loops.iter().enumerate() {
            if lp.len() < 3 {
                return Err(GeometryError::BadLoop(format!(
                    "loop {li} has {} points",
                    lp.len()
                )));
            }
            if polygon_signed_area(lp).abs() <= TIGHT_EPS {
                return Err(GeometryError::BadLoop(format!("loop {li} is degenerate")));
            }
            for p in lp {
                bb_min = point(bb_min.x.min(p.x), bb_min.y.min(p.y));
                bb_max = point(bb_max.x.max(p.x), bb_max.y.max(p.y));
            }
        }
        let diameter = (bb_max - bb_min).norm().max(TIGHT_EPS);
        let eps = 1e-9 * diameter;
        Self::check_simple(&loops, eps)?;

        // Orient by nesting depth: even depth counterclockwise, odd clockwise.
        let mut normalized = loops;
        let snapshots: Vec<Vec<Point>> = normalized.clone();
        for (li, lp) in normalized.iter_mut().enumerate() {
            let probe = lp[0];
            let depth = snapshots
                .iter()
                .enumerate()
                .filter(|(lj, other)| *lj != li && point_in_polygon(probe, other))
                .count();
            let ccw = polygon_signed_area(lp) > 0.0;
            let want_ccw = depth % 2 == 0;
            if ccw != want_ccw {
                lp.reverse();
            }
        }
        Ok(Region {
            loops: normalized,
            eps,
        })
    }

    fn check_simple(loops: &[Vec<Point>], eps: f64) -> Result<(), GeometryError> {
        // Pairwise segment checks; O(n^2) is fine at the scale this crate
        // works with (boundary loops of tens to hundreds of vertices).
        let segs: Vec<(usize, usize, Point, Point)> = loops
            .iter()
            .enumerate()
            .flat_map(|(li, lp)| {
                let n = lp.len();
                (0..n).map(move |i| (li, i, lp[i], lp[(i + 1) % n]))
            })
            .collect();
        for i in 0..segs.len() {
            for j in (i + 1)..segs.len() {
                let (li, si, a, b) = segs[i];
                let (lj, sj, c, d) = segs[j];
                let adjacent = li == lj && {
                    let n = loops[li].len();
                    si == (sj + 1) % n || sj == (si + 1) % n
                };
                if adjacent {
                    continue;
                }
                match segment_crossing(a, b, c, d) {
                    SegmentCrossing::None => {}
                    SegmentCrossing::At { t, s } => {
                        // Endpoint grazing within tolerance is allowed only
                        // for segments of the same loop meeting at a shared
                        // vertex, which the adjacency filter already covers.
                        let p = a.lerp(b, t);
                        let q = c.lerp(d, s);
                        if p.dist(q) <= eps {
                            return Err(GeometryError::BadLoop(format!(
                                "loops {li} and {lj} intersect near ({:.6}, {:.6})",
                                p.x, p.y
                            )));
                        }
                    }
                    SegmentCrossing::Overlap { .. } => {
                        return Err(GeometryError::BadLoop(format!(
                            "collinear overlap between loops {li} and {lj}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn loops(&self) -> &[Vec<Point>] {
        &self.loops
    }

    /// Geometric tolerance: 1e-9 times the boundary bounding-box diameter.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn locate(&self, p: Point) -> RegionLocation {
        for lp in &self.loops {
            let mut closed = lp.clone();
            closed.push(lp[0]);
            if point_polyline_distance(p, &closed) <= self.eps {
                return RegionLocation::OnBoundary;
            }
        }
        let mut parity = false;
        for lp in &self.loops {
            if point_in_polygon(p, lp) {
                parity = !parity;
            }
        }
        if parity {
            RegionLocation::Inside
        } else {
            RegionLocation::Outside
        }
    }

    /// Closure membership: inside or on the boundary.
    pub fn contains_closure(&self, p: Point) -> bool {
        self.locate(p) != RegionLocation::Outside
    }
}
