//! Rectangle clipping of a region boundary into components, hypothesis
//! validation, the two distinguished crossing arcs, label partitions, and
//! extraction of good components for the reduction argument.
//!
//! Terminology used throughout: for a rectangle R and region O, the
//! decomposition collects the closures of connected components of
//! `boundary(O) ∩ int R`. Components are open polyline arcs ending on the
//! rectangle's vertical edges, or closed loops fully inside R. Exactly two
//! arcs join the left edge to the right edge; `gamma1` is the one adjacent
//! to the lower complement region (seeded at the bottom-edge midpoint) and
//! `gamma2` the one adjacent to the upper complement region.

use super::domain::{Rectangle, Region, RegionLocation};
use super::primitives::{point, point_in_polygon, point_polyline_distance, Point, TIGHT_EPS};
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RectEdge {
    Left,
    Right,
    Bottom,
    Top,
}

/// Partition label for a boundary component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Lambda1,
    Lambda2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    /// Open arc whose endpoints lie on rectangle edges.
    Arc {
        start_edge: RectEdge,
        end_edge: RectEdge,
    },
    /// Closed loop fully inside the rectangle.
    Loop,
}

#[derive(Debug, Clone)]
pub struct BoundaryComponent {
    pub points: Vec<Point>,
    pub kind: ComponentKind,
    pub label: Label,
}

impl BoundaryComponent {
    pub fn is_crossing_arc(&self) -> bool {
        matches!(
            self.kind,
            ComponentKind::Arc {
                start_edge: RectEdge::Left,
                end_edge: RectEdge::Right,
            } | ComponentKind::Arc {
                start_edge: RectEdge::Right,
                end_edge: RectEdge::Left,
            }
        )
    }

    /// Endpoint on the given vertical edge, if any.
    pub fn endpoint_on(&self, edge: RectEdge) -> Option<Point> {
        let ComponentKind::Arc {
            start_edge,
            end_edge,
        } = self.kind
        else {
            return None;
        };
        if start_edge == edge {
            return self.points.first().copied();
        }
        if end_edge == edge {
            return self.points.last().copied();
        }
        None
    }

    /// Point half way along the polyline (by arc length); lies strictly
    /// inside the rectangle for arcs produced by clipping.
    pub fn midpoint(&self) -> Point {
        let total: f64 = self
            .points
            .windows(2)
            .map(|w| w[0].dist(w[1]))
            .sum::<f64>();
        if total <= TIGHT_EPS {
            return self.points[0];
        }
        let mut remaining = 0.5 * total;
        for w in self.points.windows(2) {
            let len = w[0].dist(w[1]);
            if remaining <= len {
                return w[0].lerp(w[1], remaining / len);
            }
            remaining -= len;
        }
        *self.points.last().unwrap()
    }
}

/// Decomposition of `boundary(O) ∩ int R` into labeled components.
#[derive(Debug, Clone)]
pub struct LambdaDecomposition {
    pub rect: Rectangle,
    pub components: Vec<BoundaryComponent>,
    /// Index of the lower crossing arc.
    pub gamma1: usize,
    /// Index of the upper crossing arc.
    pub gamma2: usize,
    region: Region,
}

impl LambdaDecomposition {
    pub fn gamma1(&self) -> &BoundaryComponent {
        &self.components[self.gamma1]
    }

    pub fn gamma2(&self) -> &BoundaryComponent {
        &self.components[self.gamma2]
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Components carrying the given label.
    pub fn labeled(&self, label: Label) -> impl Iterator<Item = &BoundaryComponent> {
        self.components.iter().filter(move |c| c.label == label)
    }

    /// Index of the component whose polyline passes within tolerance of `p`.
    pub fn component_containing(&self, p: Point) -> Option<usize> {
        let eps = 10.0 * self.region.eps();
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.components.iter().enumerate() {
            let d = match c.kind {
                ComponentKind::Loop => {
                    let mut closed = c.points.clone();
                    closed.push(c.points[0]);
                    point_polyline_distance(p, &closed)
                }
                _ => point_polyline_distance(p, &c.points),
            };
            if d < best_d {
                best_d = d;
                best = Some(i);
            }
        }
        best.filter(|_| best_d <= eps)
    }
}

/// Clip a region boundary against a rectangle and identify the two crossing
/// arcs. Validates the three rectangle hypotheses: the clipped domain is
/// connected and nonempty (1), the boundary meets both vertical edges (2),
/// and the closure of the region avoids both horizontal edges (3).
///
/// Every component is labeled on return: `gamma1` gets `Lambda1`, `gamma2`
/// gets `Lambda2`, everything else defaults to `Lambda1`. Use
/// [`partition_lambda`] to choose a different split.
pub fn clip_decompose(
    region: &Region,
    rect: Rectangle,
) -> Result<LambdaDecomposition, GeometryError> {
    validate_hypotheses(region, rect)?;
    let clip = clip_components(region, rect)?;
    if clip.components.len() != 1 {
        return Err(GeometryError::HypothesisViolated(1));
    }
    let comp = &clip.components[0];
    let mut components: Vec<BoundaryComponent> = Vec::new();
    for &aid in &comp.arc_ids {
        components.push(clip.arcs[aid].to_component());
    }
    for &hid in &comp.hole_loops {
        components.push(BoundaryComponent {
            points: clip.full_loops[hid].clone(),
            kind: ComponentKind::Loop,
            label: Label::Lambda1,
        });
    }
    let (gamma1, gamma2) = identify_crossing_pair(&components, rect)?;
    components[gamma1].label = Label::Lambda1;
    components[gamma2].label = Label::Lambda2;
    Ok(LambdaDecomposition {
        rect,
        components,
        gamma1,
        gamma2,
        region: region.clone(),
    })
}

/// Re-label the components of a decomposition. The assignment must cover
/// every component, keep `gamma1` in `Lambda1` and `gamma2` in `Lambda2`.
pub fn partition_lambda(
    decomp: &LambdaDecomposition,
    labels: &[Label],
) -> Result<LambdaDecomposition, GeometryError> {
    if labels.len() != decomp.components.len() {
        return Err(GeometryError::BadPartition(format!(
            "expected {} labels, got {}",
            decomp.components.len(),
            labels.len()
        )));
    }
    if labels[decomp.gamma1] != Label::Lambda1 {
        return Err(GeometryError::BadPartition(
            "gamma1 must be labeled Lambda1".into(),
        ));
    }
    if labels[decomp.gamma2] != Label::Lambda2 {
        return Err(GeometryError::BadPartition(
            "gamma2 must be labeled Lambda2".into(),
        ));
    }
    let mut out = decomp.clone();
    for (c, &l) in out.components.iter_mut().zip(labels) {
        c.label = l;
    }
    Ok(out)
}

/// One component of the clipped domain that satisfies the rectangle
/// hypotheses for the narrowed rectangle, packaged as its own decomposition.
#[derive(Debug, Clone)]
pub struct GoodComponent {
    /// Decomposition over the narrowed rectangle: `gamma1` is this
    /// component's lower crossing arc, `gamma2` its upper one, and labels
    /// are induced from the parent partition.
    pub decomposition: LambdaDecomposition,
    /// For each component of `decomposition`, the index of the parent
    /// component it is part of.
    pub parent_of: Vec<usize>,
    /// Ordering key: y-coordinate of the lower crossing arc's endpoint on
    /// the left edge.
    pub key_y: f64,
}

/// Split the clipped domain over the narrowed rectangle (same center and
/// height, half-width `a_prime`) into connected components and keep those
/// that satisfy the hypotheses, sorted bottom to top. Labels are induced
/// from the parent decomposition's partition.
///
/// The sort order is verified to be identical under all four endpoint keys
/// (lower/upper arc, left/right edge); a mismatch means the input violates
/// the stacked-channel structure and is reported as a topology error.
pub fn good_components(
    parent: &LambdaDecomposition,
    a_prime: f64,
) -> Result<Vec<GoodComponent>, GeometryError> {
    if !(a_prime > 0.0 && a_prime < parent.rect.a) {
        return Err(GeometryError::Topology(format!(
            "a_prime = {a_prime} must lie in (0, {})",
            parent.rect.a
        )));
    }
    let rect = parent.rect.with_half_width(a_prime);
    let clip = clip_components(parent.region(), rect)?;
    let mut out: Vec<GoodComponent> = Vec::new();
    for comp in &clip.components {
        if !(comp.touches_left && comp.touches_right) {
            // Bad component: fails hypothesis 2 for the narrowed rectangle.
            continue;
        }
        let mut components: Vec<BoundaryComponent> = Vec::new();
        for &aid in &comp.arc_ids {
            components.push(clip.arcs[aid].to_component());
        }
        for &hid in &comp.hole_loops {
            components.push(BoundaryComponent {
                points: clip.full_loops[hid].clone(),
                kind: ComponentKind::Loop,
                label: Label::Lambda1,
            });
        }
        let (gamma1, gamma2) = identify_crossing_pair(&components, rect)?;
        let mut parent_of = Vec::with_capacity(components.len());
        for c in &mut components {
            let probe = c.midpoint();
            let pid = parent
                .component_containing(probe)
                .ok_or_else(|| {
                    GeometryError::Topology(format!(
                        "clipped component near ({:.6}, {:.6}) lies on no parent component",
                        probe.x, probe.y
                    ))
                })?;
            c.label = parent.components[pid].label;
            parent_of.push(pid);
        }
        let key_y = components[gamma1]
            .endpoint_on(RectEdge::Left)
            .expect("crossing arc touches the left edge")
            .y;
        out.push(GoodComponent {
            decomposition: LambdaDecomposition {
                rect,
                components,
                gamma1,
                gamma2,
                region: parent.region().clone(),
            },
            parent_of,
            key_y,
        });
    }
    if out.is_empty() {
        return Err(GeometryError::NoGoodComponent);
    }
    out.sort_by(|p, q| p.key_y.partial_cmp(&q.key_y).expect("finite keys"));
    verify_order_keys(&out)?;
    Ok(out)
}

/// The sorted order must agree for all four endpoint keys.
fn verify_order_keys(sorted: &[GoodComponent]) -> Result<(), GeometryError> {
    let keys = [
        (true, RectEdge::Left),
        (true, RectEdge::Right),
        (false, RectEdge::Left),
        (false, RectEdge::Right),
    ];
    for (lower, edge) in keys {
        let ys: Vec<f64> = sorted
            .iter()
            .map(|g| {
                let idx = if lower {
                    g.decomposition.gamma1
                } else {
                    g.decomposition.gamma2
                };
                g.decomposition.components[idx]
                    .endpoint_on(edge)
                    .expect("crossing arc endpoint")
                    .y
            })
            .collect();
        if ys.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GeometryError::Topology(
                "component order differs between endpoint keys".into(),
            ));
        }
    }
    Ok(())
}

/// Hypothesis checks before clipping. Numbering: 1 connected, 2 boundary
/// meets both vertical edges, 3 closure avoids both horizontal edges.
/// Connectivity itself is checked after clipping; this routine covers the
/// edge conditions.
fn validate_hypotheses(region: &Region, rect: Rectangle) -> Result<(), GeometryError> {
    let eps = region.eps();
    let bl = point(rect.left(), rect.bottom());
    let br = point(rect.right(), rect.bottom());
    let tl = point(rect.left(), rect.top());
    let tr = point(rect.right(), rect.top());
    // Hypothesis 2: boundary meets both closed vertical edges.
    for (e0, e1) in [(bl, tl), (br, tr)] {
        if !boundary_meets_segment(region, e0, e1, eps) {
            return Err(GeometryError::HypothesisViolated(2));
        }
    }
    // Hypothesis 3: closed horizontal edges stay clear of the closure.
    for (e0, e1) in [(bl, br), (tl, tr)] {
        if boundary_meets_segment(region, e0, e1, eps)
            || region.contains_closure(e0.lerp(e1, 0.5))
        {
            return Err(GeometryError::HypothesisViolated(3));
        }
    }
    Ok(())
}

fn boundary_meets_segment(region: &Region, a: Point, b: Point, eps: f64) -> bool {
    region.loops().iter().any(|lp| {
        let n = lp.len();
        (0..n).any(|i| {
            super::primitives::segment_segment_distance(a, b, lp[i], lp[(i + 1) % n]) <= eps
        })
    })
}

// ---------------------------------------------------------------------------
// Clipping internals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct ClipArc {
    points: Vec<Point>,
    start_edge: RectEdge,
    end_edge: RectEdge,
}

impl ClipArc {
    fn to_component(&self) -> BoundaryComponent {
        BoundaryComponent {
            points: self.points.clone(),
            kind: ComponentKind::Arc {
                start_edge: self.start_edge,
                end_edge: self.end_edge,
            },
            label: Label::Lambda1,
        }
    }
}

#[derive(Debug)]
struct ClippedComponentRaw {
    arc_ids: Vec<usize>,
    polygon: Vec<Point>,
    hole_loops: Vec<usize>,
    touches_left: bool,
    touches_right: bool,
}

#[derive(Debug)]
struct ClipResult {
    arcs: Vec<ClipArc>,
    full_loops: Vec<Vec<Point>>,
    components: Vec<ClippedComponentRaw>,
}

/// Clip every boundary loop to the open rectangle and walk the resulting
/// arcs and vertical-edge gates into connected components of the clipped
/// domain. Requires that no arc endpoint lies on a horizontal edge (the
/// hypothesis-3 precheck guarantees this for valid inputs).
fn clip_components(region: &Region, rect: Rectangle) -> Result<ClipResult, GeometryError> {
    let eps = region.eps();
    let mut arcs: Vec<ClipArc> = Vec::new();
    let mut full_loops: Vec<Vec<Point>> = Vec::new();
    for lp in region.loops() {
        clip_loop(lp, rect, eps, &mut arcs, &mut full_loops)?;
    }
    for arc in &arcs {
        for edge in [arc.start_edge, arc.end_edge] {
            if matches!(edge, RectEdge::Bottom | RectEdge::Top) {
                return Err(GeometryError::Topology(
                    "boundary crosses a horizontal rectangle edge".into(),
                ));
            }
        }
    }

    // Edge events for the gate walk.
    #[derive(Clone, Copy)]
    struct Event {
        y: f64,
        arc: usize,
        is_start: bool,
    }
    let mut left_events: Vec<Event> = Vec::new();
    let mut right_events: Vec<Event> = Vec::new();
    for (i, arc) in arcs.iter().enumerate() {
        for (is_start, edge, p) in [
            (true, arc.start_edge, arc.points[0]),
            (false, arc.end_edge, *arc.points.last().unwrap()),
        ] {
            let ev = Event {
                y: p.y,
                arc: i,
                is_start,
            };
            match edge {
                RectEdge::Left => left_events.push(ev),
                RectEdge::Right => right_events.push(ev),
                _ => unreachable!("horizontal endpoints rejected above"),
            }
        }
    }
    left_events.sort_by(|p, q| p.y.partial_cmp(&q.y).expect("finite event"));
    right_events.sort_by(|p, q| p.y.partial_cmp(&q.y).expect("finite event"));
    for evs in [&left_events, &right_events] {
        if evs.windows(2).any(|w| (w[1].y - w[0].y).abs() <= eps) {
            return Err(GeometryError::Topology(
                "coincident arc endpoints on a vertical edge".into(),
            ));
        }
    }

    // Walk cycles: after an arc arrives at a vertical edge, the component
    // boundary continues along the edge with the domain kept on the left:
    // downward on the left edge, upward on the right edge.
    let mut components: Vec<ClippedComponentRaw> = Vec::new();
    let mut visited = vec![false; arcs.len()];
    for start in 0..arcs.len() {
        if visited[start] {
            continue;
        }
        let mut arc_ids = Vec::new();
        let mut polygon: Vec<Point> = Vec::new();
        let mut touches_left = false;
        let mut touches_right = false;
        let mut cur = start;
        loop {
            if visited[cur] {
                return Err(GeometryError::Topology(
                    "arc revisited before closing a component cycle".into(),
                ));
            }
            visited[cur] = true;
            arc_ids.push(cur);
            polygon.extend(arcs[cur].points.iter().copied());
            let endpoint = *arcs[cur].points.last().unwrap();
            let edge = arcs[cur].end_edge;
            let (events, downward) = match edge {
                RectEdge::Left => {
                    touches_left = true;
                    (&left_events, true)
                }
                RectEdge::Right => {
                    touches_right = true;
                    (&right_events, false)
                }
                _ => unreachable!(),
            };
            let next = if downward {
                events
                    .iter()
                    .rev()
                    .find(|ev| ev.y < endpoint.y - eps)
            } else {
                events.iter().find(|ev| ev.y > endpoint.y + eps)
            };
            let Some(next) = next else {
                return Err(GeometryError::Topology(
                    "edge gate runs into a rectangle corner".into(),
                ));
            };
            if !next.is_start {
                return Err(GeometryError::Topology(
                    "edge gate meets an arc tail instead of an arc head".into(),
                ));
            }
            // The gate between the two endpoints must belong to the domain.
            let gate_mid = point(
                if edge == RectEdge::Left {
                    rect.left()
                } else {
                    rect.right()
                },
                0.5 * (endpoint.y + next.y),
            );
            if region.locate(gate_mid) == RegionLocation::Outside {
                return Err(GeometryError::Topology(
                    "edge gate midpoint falls outside the domain".into(),
                ));
            }
            if next.arc == start {
                break;
            }
            cur = next.arc;
        }
        let start_pt = arcs[start].points[0];
        match arcs[start].start_edge {
            RectEdge::Left => touches_left = true,
            RectEdge::Right => touches_right = true,
            _ => unreachable!(),
        }
        let _ = start_pt;
        components.push(ClippedComponentRaw {
            arc_ids,
            polygon,
            hole_loops: Vec::new(),
            touches_left,
            touches_right,
        });
    }

    // Loops fully inside the rectangle: counterclockwise loops bound their
    // own (edge-free) components; clockwise loops are holes of whichever
    // component contains them.
    let mut blob_ids: Vec<usize> = Vec::new();
    for (li, lp) in full_loops.iter().enumerate() {
        if super::primitives::polygon_signed_area(lp) > 0.0 {
            blob_ids.push(li);
        }
    }
    for &li in &blob_ids {
        components.push(ClippedComponentRaw {
            arc_ids: Vec::new(),
            polygon: full_loops[li].clone(),
            hole_loops: vec![li],
            touches_left: false,
            touches_right: false,
        });
    }
    for (li, lp) in full_loops.iter().enumerate() {
        if super::primitives::polygon_signed_area(lp) >= 0.0 {
            continue;
        }
        let probe = lp[0];
        let mut best: Option<(usize, f64)> = None;
        for (ci, comp) in components.iter().enumerate() {
            if comp.polygon.is_empty() || !point_in_polygon(probe, &comp.polygon) {
                continue;
            }
            let area = super::primitives::polygon_signed_area(&comp.polygon).abs();
            if best.map_or(true, |(_, a)| area < a) {
                best = Some((ci, area));
            }
        }
        let Some((ci, _)) = best else {
            return Err(GeometryError::Topology(
                "interior hole loop not contained in any component".into(),
            ));
        };
        components[ci].hole_loops.push(li);
    }

    Ok(ClipResult {
        arcs,
        full_loops,
        components,
    })
}

/// Clip one closed loop to the open rectangle, appending inside runs as arcs
/// (or the whole loop when it never leaves the rectangle interior).
fn clip_loop(
    lp: &[Point],
    rect: Rectangle,
    eps: f64,
    arcs: &mut Vec<ClipArc>,
    full_loops: &mut Vec<Vec<Point>>,
) -> Result<(), GeometryError> {
    let n = lp.len();
    // Inside spans per directed loop edge, via Liang-Barsky.
    let mut spans: Vec<Option<(f64, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        spans.push(inside_span(lp[i], lp[(i + 1) % n], rect));
    }
    if spans.iter().all(|s| matches!(s, Some((t0, t1)) if *t0 <= 0.0 && *t1 >= 1.0)) {
        full_loops.push(lp.to_vec());
        return Ok(());
    }
    if spans.iter().all(|s| s.is_none()) {
        return Ok(());
    }

    // Runs of inside portions, stitched across consecutive edges.
    #[derive(Debug)]
    struct Run {
        points: Vec<Point>,
        open_start: bool,
        open_end: bool,
    }
    let mut runs: Vec<Run> = Vec::new();
    let mut current: Option<Run> = None;
    for i in 0..n {
        let a = lp[i];
        let b = lp[(i + 1) % n];
        match spans[i] {
            None => {
                if let Some(run) = current.take() {
                    runs.push(run);
                }
            }
            Some((t0, t1)) => {
                let p0 = a.lerp(b, t0);
                let p1 = a.lerp(b, t1);
                if t0 > 0.0 {
                    if let Some(run) = current.take() {
                        runs.push(run);
                    }
                    current = Some(Run {
                        points: vec![p0],
                        open_start: false,
                        open_end: false,
                    });
                } else if current.is_none() {
                    // Run begins mid-loop at a vertex already inside.
                    current = Some(Run {
                        points: vec![p0],
                        open_start: true,
                        open_end: false,
                    });
                }
                let run = current.as_mut().unwrap();
                push_dedup(&mut run.points, p1, eps);
                if t1 < 1.0 {
                    let mut run = current.take().unwrap();
                    run.open_end = false;
                    runs.push(run);
                } else {
                    run.open_end = true;
                }
            }
        }
    }
    if let Some(run) = current.take() {
        runs.push(run);
    }
    // Wrap-around: a run ending at the loop seam joins the one starting there.
    if runs.len() >= 2 {
        let first_open = runs.first().map_or(false, |r| r.open_start);
        let last_open = runs.last().map_or(false, |r| r.open_end);
        if first_open && last_open {
            let first = runs.remove(0);
            let last = runs.last_mut().unwrap();
            for p in first.points {
                push_dedup(&mut last.points, p, eps);
            }
            last.open_end = first.open_end;
        }
    }

    for run in runs {
        if run.points.len() < 2 {
            // Grazing contact with the rectangle boundary; no interior arc.
            continue;
        }
        let start = run.points[0];
        let end = *run.points.last().unwrap();
        let start_edge = nearest_edge(start, rect, eps)?;
        let end_edge = nearest_edge(end, rect, eps)?;
        arcs.push(ClipArc {
            points: run.points,
            start_edge,
            end_edge,
        });
    }
    Ok(())
}

/// Liang-Barsky: the open parameter interval where segment `a->b` lies
/// inside the rectangle, or None when it misses.
fn inside_span(a: Point, b: Point, rect: Rectangle) -> Option<(f64, f64)> {
    let d = b - a;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (num, den) in [
        (a.x - rect.left(), -d.x),
        (rect.right() - a.x, d.x),
        (a.y - rect.bottom(), -d.y),
        (rect.top() - a.y, d.y),
    ] {
        if den.abs() <= TIGHT_EPS {
            if num < 0.0 {
                return None;
            }
            continue;
        }
        let t = num / den;
        if den < 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
    }
    if t0 < t1 - TIGHT_EPS {
        Some((t0.max(0.0), t1.min(1.0)))
    } else {
        None
    }
}

fn push_dedup(points: &mut Vec<Point>, p: Point, eps: f64) {
    if points.last().map_or(true, |q| q.dist(p) > eps) {
        points.push(p);
    }
}

fn nearest_edge(p: Point, rect: Rectangle, eps: f64) -> Result<RectEdge, GeometryError> {
    let cands = [
        (RectEdge::Left, (p.x - rect.left()).abs()),
        (RectEdge::Right, (p.x - rect.right()).abs()),
        (RectEdge::Bottom, (p.y - rect.bottom()).abs()),
        (RectEdge::Top, (p.y - rect.top()).abs()),
    ];
    let (edge, d) = cands
        .into_iter()
        .min_by(|p, q| p.1.partial_cmp(&q.1).expect("finite distances"))
        .unwrap();
    if d > 100.0 * eps {
        return Err(GeometryError::Topology(format!(
            "clipped arc endpoint ({:.9}, {:.9}) is not on the rectangle boundary",
            p.x, p.y
        )));
    }
    Ok(edge)
}

/// Pick the two left-right crossing arcs and order them bottom/top. For two
/// disjoint crossing arcs, the order of their left-edge endpoints decides
/// which bounds the lower complement region.
fn identify_crossing_pair(
    components: &[BoundaryComponent],
    rect: Rectangle,
) -> Result<(usize, usize), GeometryError> {
    let crossing: Vec<usize> = components
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_crossing_arc())
        .map(|(i, _)| i)
        .collect();
    if crossing.len() != 2 {
        return Err(GeometryError::Topology(format!(
            "expected exactly two crossing arcs, found {}",
            crossing.len()
        )));
    }
    let y0 = components[crossing[0]]
        .endpoint_on(RectEdge::Left)
        .unwrap()
        .y;
    let y1 = components[crossing[1]]
        .endpoint_on(RectEdge::Left)
        .unwrap()
        .y;
    let (lo, hi) = if y0 < y1 {
        (crossing[0], crossing[1])
    } else {
        (crossing[1], crossing[0])
    };
    // Consistency: the lower arc must also be the one whose under-polygon
    // contains the other's midpoint complementarily. Cheap sanity check on
    // the braid-free structure.
    let lower = &components[lo];
    let upper = &components[hi];
    let mut under: Vec<Point> = if lower.points[0].x <= lower.points.last().unwrap().x {
        lower.points.clone()
    } else {
        lower.points.iter().rev().copied().collect()
    };
    under.push(point(rect.right(), rect.bottom()));
    under.push(point(rect.left(), rect.bottom()));
    if point_in_polygon(upper.midpoint(), &under) {
        return Err(GeometryError::Topology(
            "crossing arcs are interleaved; no stacked order exists".into(),
        ));
    }
    Ok((lo, hi))
}
