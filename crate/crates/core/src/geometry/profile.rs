//! Projection of a solution's graph over a boundary component into the
//! vertical plane: the profile curve x -> (x, height), and distances
//! between profile curves as plane sets.

use super::decompose::{BoundaryComponent, ComponentKind};
use super::primitives::{point, Point, SegmentCrossing, TIGHT_EPS};
use crate::solver::{Solution, SolverError};

/// Polyline in the vertical plane; `x` is the horizontal coordinate and `y`
/// stores the graph height.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    pub points: Vec<Point>,
}

impl ProfileCurve {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Project the solution graph over one boundary component into the vertical
/// plane. Samples every polyline vertex plus every crossing of the
/// component with a mesh edge, so the curve refines with the mesh.
pub fn profile_project(
    solution: &Solution,
    component: &BoundaryComponent,
) -> Result<ProfileCurve, SolverError> {
    let mut chain: Vec<Point> = component.points.clone();
    if component.kind == ComponentKind::Loop {
        chain.push(chain[0]);
    }
    let mesh = solution.mesh();
    let edges = mesh.edges();
    let verts = mesh.vertices();

    let mut points: Vec<Point> = Vec::new();
    let push = |p: Point, u: f64, out: &mut Vec<Point>| {
        let q = point(p.x, u);
        if out.last().map_or(true, |r| r.dist(q) > TIGHT_EPS) {
            out.push(q);
        }
    };
    for (i, w) in chain.windows(2).enumerate() {
        let _ = i;
        let u0 = solution.interpolate(w[0])?;
        push(w[0], u0, &mut points);
        // Crossings with mesh edges, ordered along the segment.
        let mut ts: Vec<f64> = Vec::new();
        for &(a, b) in &edges {
            if let SegmentCrossing::At { t, .. } =
                super::primitives::segment_crossing(w[0], w[1], verts[a], verts[b])
            {
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(|p, q| p.partial_cmp(q).expect("finite crossing"));
        ts.dedup_by(|b, a| (*b - *a).abs() <= TIGHT_EPS);
        for t in ts {
            let p = w[0].lerp(w[1], t);
            let u = solution.interpolate(p)?;
            push(p, u, &mut points);
        }
    }
    let last = *chain.last().unwrap();
    let u_last = solution.interpolate(last)?;
    push(last, u_last, &mut points);
    Ok(ProfileCurve { points })
}

/// Closest pair of points between two profile curves, with the distance.
/// Curves are treated as plane sets (unions of segments).
pub fn closest_points(a: &ProfileCurve, b: &ProfileCurve) -> (f64, Point, Point) {
    let mut best = (f64::INFINITY, point(f64::NAN, f64::NAN), point(f64::NAN, f64::NAN));
    let seg_or_point = |c: &ProfileCurve| -> Vec<(Point, Point)> {
        if c.points.len() == 1 {
            vec![(c.points[0], c.points[0])]
        } else {
            c.points.windows(2).map(|w| (w[0], w[1])).collect()
        }
    };
    for (p1, q1) in seg_or_point(a) {
        for (p2, q2) in seg_or_point(b) {
            let (ca, cb) = closest_points_on_segments(p1, q1, p2, q2);
            let d = ca.dist(cb);
            if d < best.0 {
                best = (d, ca, cb);
            }
        }
    }
    best
}

/// Distance between two profile curves as plane sets: zero when they meet.
pub fn set_distance(a: &ProfileCurve, b: &ProfileCurve) -> f64 {
    closest_points(a, b).0
}

/// Distance between two unions of profile curves, with the closest pair.
pub fn set_distance_multi(
    curves_a: &[ProfileCurve],
    curves_b: &[ProfileCurve],
) -> (f64, Point, Point) {
    let mut best = (f64::INFINITY, point(f64::NAN, f64::NAN), point(f64::NAN, f64::NAN));
    for a in curves_a {
        for b in curves_b {
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let cand = closest_points(a, b);
            if cand.0 < best.0 {
                best = cand;
            }
        }
    }
    best
}

/// Closest points between segments `p1q1` and `p2q2` (clamped projections;
/// exact for all degeneracies including parallel and zero-length segments).
fn closest_points_on_segments(p1: Point, q1: Point, p2: Point, q2: Point) -> (Point, Point) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let tiny = TIGHT_EPS * TIGHT_EPS;
    if a <= tiny && e <= tiny {
        return (p1, p2);
    }
    let (s, t);
    if a <= tiny {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= tiny {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let s0 = if denom.abs() > tiny {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            } else {
                s = s0;
                t = t0;
            }
        }
    }
    (p1 + d1 * s, p2 + d2 * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(pts: &[(f64, f64)]) -> ProfileCurve {
        ProfileCurve {
            points: pts.iter().map(|&(x, y)| point(x, y)).collect(),
        }
    }

    /// Dense-sampling oracle: sample one curve finely (vertices included)
    /// and take exact point-to-segment distances to the other, both ways.
    fn sampled_distance(a: &ProfileCurve, b: &ProfileCurve) -> f64 {
        let one_way = |from: &ProfileCurve, to: &ProfileCurve| -> f64 {
            let mut best = f64::INFINITY;
            for w in from.points.windows(2) {
                let len = w[0].dist(w[1]);
                let steps = ((len * 1.0e5).ceil() as usize).clamp(2, 200_000);
                for k in 0..=steps {
                    let p = w[0].lerp(w[1], k as f64 / steps as f64);
                    for v in to.points.windows(2) {
                        best = best.min(super::super::primitives::point_segment_distance(
                            p, v[0], v[1],
                        ));
                    }
                }
            }
            best
        };
        one_way(a, b).min(one_way(b, a))
    }

    #[test]
    fn parallel_segments_distance() {
        let a = curve(&[(0.0, 0.0), (2.0, 0.0)]);
        let b = curve(&[(0.0, 0.3), (2.0, 0.3)]);
        assert!((set_distance(&a, &b) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn crossing_curves_have_zero_distance() {
        let a = curve(&[(0.0, -1.0), (2.0, 1.0)]);
        let b = curve(&[(0.0, 1.0), (2.0, -1.0)]);
        assert!(set_distance(&a, &b) < 1e-15);
    }

    #[test]
    fn matches_dense_sampling_oracle() {
        // Oblique polylines with the minimum at a segment interior.
        let a = curve(&[(0.0, 0.0), (1.0, 0.8), (2.0, 0.1), (3.0, 0.9)]);
        let b = curve(&[(0.2, 1.6), (1.4, 1.1), (2.6, 1.7)]);
        let fast = set_distance(&a, &b);
        let slow = sampled_distance(&a, &b);
        assert!(
            (fast - slow).abs() < 1e-9,
            "closed form {fast} vs sampled {slow}"
        );
        assert!(fast <= slow + 1e-12, "closed form must not exceed sampled");
    }

    #[test]
    fn multi_set_distance_takes_global_minimum() {
        let a1 = curve(&[(0.0, 0.0), (1.0, 0.0)]);
        let a2 = curve(&[(0.0, 5.0), (1.0, 5.0)]);
        let b1 = curve(&[(0.0, 2.0), (1.0, 2.0)]);
        let b2 = curve(&[(0.0, 4.5), (1.0, 4.5)]);
        let (d, pa, pb) = set_distance_multi(&[a1, a2], &[b1, b2]);
        assert!((d - 0.5).abs() < 1e-15);
        assert!((pa.y - 5.0).abs() < 1e-15);
        assert!((pb.y - 4.5).abs() < 1e-15);
    }

    #[test]
    fn closest_pair_reports_witnesses() {
        let a = curve(&[(0.0, 0.0), (4.0, 0.0)]);
        let b = curve(&[(2.0, 1.0), (2.0, 3.0)]);
        let (d, pa, pb) = closest_points(&a, &b);
        assert!((d - 1.0).abs() < 1e-15);
        assert!(pa.dist(point(2.0, 0.0)) < 1e-12);
        assert!(pb.dist(point(2.0, 1.0)) < 1e-12);
    }
}
