//! Low-level planar primitives: points, segments, polygons and piecewise
//! linear functions. Everything downstream (clipping, traces, profiles)
//! reduces to the handful of predicates in this file, so they are kept
//! small and exhaustively unit-tested.

use thiserror::Error;

/// Absolute tolerance for degenerate-input predicates (zero-length segments,
/// repeated breakpoints). Scale-dependent tolerances are derived per object.
pub const TIGHT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub fn point(x: f64, y: f64) -> Point {
    Point { x, y }
}

impl Point {
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// 2D cross product (signed parallelogram area).
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        point(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        point(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        point(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        point(self.x * s, self.y * s)
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= TIGHT_EPS * TIGHT_EPS {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

/// Distance between the closed segments `[a, b]` and `[c, d]`; zero when they
/// intersect.
pub fn segment_segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if let SegmentCrossing::At { .. } | SegmentCrossing::Overlap { .. } =
        segment_crossing(a, b, c, d)
    {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// How two closed segments meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentCrossing {
    None,
    /// Single intersection point at parameter `t` along `[a, b]` and `s`
    /// along `[c, d]`, both in `[0, 1]`.
    At { t: f64, s: f64 },
    /// Collinear overlap covering `[t0, t1]` along `[a, b]`.
    Overlap { t0: f64, t1: f64 },
}

/// Exact-as-practical segment intersection with collinear handling.
pub fn segment_crossing(a: Point, b: Point, c: Point, d: Point) -> SegmentCrossing {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    let qp = c - a;
    let scale = r.norm().max(s.norm()).max(1.0);
    if denom.abs() > TIGHT_EPS * scale * scale {
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        if (-TIGHT_EPS..=1.0 + TIGHT_EPS).contains(&t) && (-TIGHT_EPS..=1.0 + TIGHT_EPS).contains(&u)
        {
            return SegmentCrossing::At {
                t: t.clamp(0.0, 1.0),
                s: u.clamp(0.0, 1.0),
            };
        }
        return SegmentCrossing::None;
    }
    // Parallel. Collinear only if c-a is also parallel to r.
    if qp.cross(r).abs() > TIGHT_EPS * scale * scale {
        return SegmentCrossing::None;
    }
    let len2 = r.dot(r);
    if len2 <= TIGHT_EPS * TIGHT_EPS {
        // Degenerate [a,b]; report containment of the point in [c,d].
        if point_segment_distance(a, c, d) <= TIGHT_EPS * scale {
            return SegmentCrossing::Overlap { t0: 0.0, t1: 1.0 };
        }
        return SegmentCrossing::None;
    }
    let t0 = (c - a).dot(r) / len2;
    let t1 = (d - a).dot(r) / len2;
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    if lo <= hi + TIGHT_EPS {
        SegmentCrossing::Overlap {
            t0: lo.min(hi),
            t1: hi,
        }
    } else {
        SegmentCrossing::None
    }
}

/// Parameter `t` where `[a, b]` crosses the vertical line `x = xline`,
/// if the segment spans it.
pub fn segment_vertical_crossing(a: Point, b: Point, xline: f64) -> Option<f64> {
    let dx = b.x - a.x;
    if dx.abs() <= TIGHT_EPS {
        return None;
    }
    let t = (xline - a.x) / dx;
    if (0.0..=1.0).contains(&t) {
        Some(t)
    } else {
        None
    }
}

/// Signed area of a closed polygon (positive when counterclockwise).
pub fn polygon_signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        acc += p.cross(q);
    }
    0.5 * acc
}

/// Even-odd point-in-polygon test (half-open rule; boundary points are
/// classified arbitrarily and should be filtered with a distance check first).
pub fn point_in_polygon(p: Point, pts: &[Point]) -> bool {
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_int = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_int {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance from a point to a polyline (open chain).
pub fn point_polyline_distance(p: Point, pts: &[Point]) -> f64 {
    if pts.len() == 1 {
        return p.dist(pts[0]);
    }
    pts.windows(2)
        .map(|w| point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

pub fn polyline_length(pts: &[Point]) -> f64 {
    pts.windows(2).map(|w| w[0].dist(w[1])).sum()
}

#[derive(Debug, Error, PartialEq)]
pub enum PlfError {
    #[error("need at least two breakpoints, got {0}")]
    TooFewBreakpoints(usize),
    #[error("breakpoint x values must be strictly increasing (violated at index {0})")]
    NonIncreasing(usize),
    #[error("evaluation point {x} outside domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
}

/// Piecewise-linear function of one variable given by breakpoints with
/// strictly increasing abscissae. Used for boundary curves and boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFn {
    pts: Vec<(f64, f64)>,
}

impl PiecewiseLinearFn {
    pub fn new(pts: Vec<(f64, f64)>) -> Result<Self, PlfError> {
        if pts.len() < 2 {
            return Err(PlfError::TooFewBreakpoints(pts.len()));
        }
        for i in 1..pts.len() {
            if pts[i].0 <= pts[i - 1].0 {
                return Err(PlfError::NonIncreasing(i));
            }
        }
        Ok(Self { pts })
    }

    pub fn constant(lo: f64, hi: f64, v: f64) -> Self {
        Self {
            pts: vec![(lo, v), (hi, v)],
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pts[0].0, self.pts[self.pts.len() - 1].0)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.pts
    }

    /// Evaluation for callers that have already validated the domain;
    /// panics outside it. See [`PiecewiseLinearFn::eval_checked`].
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_checked(x).expect("evaluation point in domain")
    }

    /// Evaluation with a small tolerance at the domain ends.
    pub fn eval_checked(&self, x: f64) -> Result<f64, PlfError> {
        let (lo, hi) = self.domain();
        let span = hi - lo;
        let eps = TIGHT_EPS * span.max(1.0);
        if x < lo - eps || x > hi + eps {
            return Err(PlfError::OutOfDomain { x, lo, hi });
        }
        let x = x.clamp(lo, hi);
        let idx = match self
            .pts
            .binary_search_by(|p| p.0.partial_cmp(&x).expect("finite breakpoints"))
        {
            Ok(i) => return Ok(self.pts[i].1),
            Err(i) => i,
        };
        let (x0, y0) = self.pts[idx - 1];
        let (x1, y1) = self.pts[idx];
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Exact minimum and maximum over the window `[lo, hi]` via breakpoint
    /// scan; the extrema of a piecewise-linear function on an interval are
    /// attained at interior breakpoints or the window ends.
    pub fn min_max_on(&self, lo: f64, hi: f64) -> Result<(f64, f64), PlfError> {
        let v_lo = self.eval_checked(lo)?;
        let v_hi = self.eval_checked(hi)?;
        let mut min = v_lo.min(v_hi);
        let mut max = v_lo.max(v_hi);
        for &(x, y) in &self.pts {
            if x > lo && x < hi {
                min = min.min(y);
                max = max.max(y);
            }
        }
        Ok((min, max))
    }

    /// Restrict to `[lo, hi]`, returning the breakpoint polyline of the
    /// restriction (window ends included as explicit points).
    pub fn clip_to(&self, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>, PlfError> {
        let mut out = vec![(lo, self.eval_checked(lo)?)];
        for &(x, y) in &self.pts {
            if x > lo + TIGHT_EPS && x < hi - TIGHT_EPS {
                out.push((x, y));
            }
        }
        out.push((hi, self.eval_checked(hi)?));
        Ok(out)
    }

    /// Exact minimum and maximum over the whole domain.
    pub fn min_max_on_domain(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &(_, y) in &self.pts {
            min = min.min(y);
            max = max.max(y);
        }
        (min, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_basic() {
        let d = point_segment_distance(point(0.0, 1.0), point(-1.0, 0.0), point(1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-14);
        // Projection falls past the end: distance to the endpoint.
        let d = point_segment_distance(point(3.0, 4.0), point(-1.0, 0.0), point(0.0, 0.0));
        assert!((d - 5.0).abs() < 1e-14);
    }

    #[test]
    fn segment_crossing_transversal() {
        match segment_crossing(
            point(0.0, 0.0),
            point(2.0, 2.0),
            point(0.0, 2.0),
            point(2.0, 0.0),
        ) {
            SegmentCrossing::At { t, s } => {
                assert!((t - 0.5).abs() < 1e-14);
                assert!((s - 0.5).abs() < 1e-14);
            }
            other => panic!("expected crossing, got {other:?}"),
        }
    }

    #[test]
    fn segment_crossing_disjoint_and_parallel() {
        assert_eq!(
            segment_crossing(
                point(0.0, 0.0),
                point(1.0, 0.0),
                point(0.0, 1.0),
                point(1.0, 1.0)
            ),
            SegmentCrossing::None
        );
        assert_eq!(
            segment_crossing(
                point(0.0, 0.0),
                point(1.0, 0.0),
                point(3.0, 0.0),
                point(4.0, 0.0)
            ),
            SegmentCrossing::None
        );
    }

    #[test]
    fn segment_crossing_collinear_overlap() {
        match segment_crossing(
            point(0.0, 0.0),
            point(4.0, 0.0),
            point(1.0, 0.0),
            point(2.0, 0.0),
        ) {
            SegmentCrossing::Overlap { t0, t1 } => {
                assert!((t0 - 0.25).abs() < 1e-14);
                assert!((t1 - 0.5).abs() < 1e-14);
            }
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn segment_segment_distance_matches_hand_values() {
        let d = segment_segment_distance(
            point(0.0, 0.0),
            point(1.0, 0.0),
            point(0.0, 1.0),
            point(1.0, 1.0),
        );
        assert!((d - 1.0).abs() < 1e-14);
        let d = segment_segment_distance(
            point(0.0, 0.0),
            point(1.0, 1.0),
            point(1.0, 0.0),
            point(0.0, 1.0),
        );
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn polygon_area_and_membership() {
        let square = vec![
            point(0.0, 0.0),
            point(2.0, 0.0),
            point(2.0, 2.0),
            point(0.0, 2.0),
        ];
        assert!((polygon_signed_area(&square) - 4.0).abs() < 1e-14);
        assert!(point_in_polygon(point(1.0, 1.0), &square));
        assert!(!point_in_polygon(point(3.0, 1.0), &square));
    }

    #[test]
    fn plf_eval_and_window_extrema() {
        let f = PiecewiseLinearFn::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, -1.0), (3.0, 0.5)])
            .unwrap();
        assert!((f.eval(0.5) - 1.0).abs() < 1e-14);
        assert!((f.eval(1.5) - 0.5).abs() < 1e-14);
        let (min, max) = f.min_max_on(0.5, 2.5).unwrap();
        assert!((min - (-1.0)).abs() < 1e-14);
        assert!((max - 2.0).abs() < 1e-14);
        assert!(f.eval_checked(3.5).is_err());
        assert_eq!(f.min_max_on_domain(), (-1.0, 2.0));
    }

    #[test]
    fn plf_rejects_bad_breakpoints() {
        assert_eq!(
            PiecewiseLinearFn::new(vec![(0.0, 0.0)]),
            Err(PlfError::TooFewBreakpoints(1))
        );
        assert_eq!(
            PiecewiseLinearFn::new(vec![(0.0, 0.0), (0.0, 1.0)]),
            Err(PlfError::NonIncreasing(1))
        );
    }

    #[test]
    fn plf_clip_keeps_interior_breakpoints() {
        let f = PiecewiseLinearFn::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, -1.0)]).unwrap();
        let clipped = f.clip_to(0.5, 1.5).unwrap();
        assert_eq!(clipped.len(), 3);
        assert!((clipped[0].0 - 0.5).abs() < 1e-14);
        assert!((clipped[1].0 - 1.0).abs() < 1e-14);
        assert!((clipped[2].0 - 1.5).abs() < 1e-14);
    }
}
