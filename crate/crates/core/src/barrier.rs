//! Sliding comparison surfaces: spheres translated horizontally or lowered
//! vertically and cylinders lowered vertically, with first-contact search
//! against a solution graph and classification of which side of the graph
//! a point lies on.

use crate::geometry::Point;
use crate::mesh::BoundaryTag;
use crate::solver::{Solution, SolverError, StripSide};

/// Point in graph space (domain coordinates plus height).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn point3(x: f64, y: f64, z: f64) -> Point3 {
    Point3 { x, y, z }
}

/// A comparison surface with one translation degree of freedom. The
/// parameter sweeps linearly over the range handed to [`first_contact`].
#[derive(Debug, Clone, Copy)]
pub enum Barrier {
    /// Sphere whose center travels along y: center (x_center, v, z_center)
    /// at parameter v.
    SphereAlongY {
        radius: f64,
        x_center: f64,
        z_center: f64,
    },
    /// Sphere whose center travels vertically: center (x_center, y_center, v).
    SphereDescending {
        radius: f64,
        x_center: f64,
        y_center: f64,
    },
    /// Cylinder with axis {x = x_axis, z = v} running along y.
    Cylinder { radius: f64, x_axis: f64 },
}

impl Barrier {
    /// Signed distance from a graph point to the barrier surface at the
    /// given parameter; positive outside, negative inside.
    pub fn signed_distance(&self, p: Point3, parameter: f64) -> f64 {
        match *self {
            Barrier::SphereAlongY {
                radius,
                x_center,
                z_center,
            } => {
                let dx = p.x - x_center;
                let dy = p.y - parameter;
                let dz = p.z - z_center;
                (dx * dx + dy * dy + dz * dz).sqrt() - radius
            }
            Barrier::SphereDescending {
                radius,
                x_center,
                y_center,
            } => {
                let dx = p.x - x_center;
                let dy = p.y - y_center;
                let dz = p.z - parameter;
                (dx * dx + dy * dy + dz * dz).sqrt() - radius
            }
            Barrier::Cylinder { radius, x_axis } => {
                let dx = p.x - x_axis;
                let dz = p.z - parameter;
                (dx * dx + dz * dz).sqrt() - radius
            }
        }
    }

    /// Height of the barrier's center or axis at the given parameter.
    fn center_height(&self, parameter: f64) -> f64 {
        match *self {
            Barrier::SphereAlongY { z_center, .. } => z_center,
            Barrier::SphereDescending { .. } => parameter,
            Barrier::Cylinder { .. } => parameter,
        }
    }
}

/// Side of the graph: above it, below it, or on it within tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideOfGraph {
    Above,
    Below,
    On,
}

/// First contact between a moving barrier and the solution graph.
#[derive(Debug, Clone, Copy)]
pub struct ContactReport {
    /// Parameter value of first contact.
    pub parameter: f64,
    /// Graph sample point realizing the contact.
    pub point: Point3,
    /// Side of the graph the barrier center sits on at contact.
    pub side: SideOfGraph,
    /// Whether the contact sample is a boundary vertex of the mesh.
    pub touched_boundary: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum BarrierError {
    #[error("barrier never meets the graph over the parameter range")]
    NoContact,
    #[error("barrier already touches the graph at the range start")]
    StartsInContact,
    #[error("descent hypothesis fails: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Graph sample: either a mesh vertex or a triangle centroid (the
/// centroid's height is the nodal mean, exact for piecewise-linear fields).
struct GraphSamples {
    points: Vec<Point3>,
    on_boundary: Vec<bool>,
}

fn graph_samples(solution: &Solution) -> GraphSamples {
    let mesh = solution.mesh();
    let u = solution.values();
    let mut points = Vec::with_capacity(mesh.num_vertices() + mesh.num_triangles());
    let mut on_boundary = Vec::with_capacity(points.capacity());
    for (v, p) in mesh.vertices().iter().enumerate() {
        points.push(point3(p.x, p.y, u[v]));
        on_boundary.push(mesh.tags()[v] != BoundaryTag::Interior);
    }
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangles()[t];
        let centroid: Point = (mesh.vertices()[a] + mesh.vertices()[b] + mesh.vertices()[c])
            * (1.0 / 3.0);
        points.push(point3(centroid.x, centroid.y, (u[a] + u[b] + u[c]) / 3.0));
        on_boundary.push(false);
    }
    GraphSamples { points, on_boundary }
}

fn min_signed_distance(samples: &GraphSamples, barrier: &Barrier, parameter: f64) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (k, &p) in samples.points.iter().enumerate() {
        let d = barrier.signed_distance(p, parameter);
        if d < best {
            best = d;
            arg = k;
        }
    }
    (best, arg)
}

const MARCH_STEPS: usize = 2048;

/// March the barrier parameter from `range.0` to `range.1` and bisect the
/// first parameter where the minimum signed barrier-graph distance reaches
/// zero. The barrier must start clear of the graph; a sweep that never
/// touches reports `NoContact`.
pub fn first_contact(
    solution: &Solution,
    barrier: &Barrier,
    range: (f64, f64),
) -> Result<ContactReport, BarrierError> {
    let samples = graph_samples(solution);
    let scale = range.0.abs().max(range.1.abs()).max(1.0);
    let touch_tol = 1.0e-12 * scale;
    let at = |s: f64| min_signed_distance(&samples, barrier, s);

    let (d0, _) = at(range.0);
    if d0 <= touch_tol {
        return Err(BarrierError::StartsInContact);
    }
    let mut prev = range.0;
    let mut hit = None;
    for k in 1..=MARCH_STEPS {
        let s = range.0 + (range.1 - range.0) * (k as f64 / MARCH_STEPS as f64);
        let (d, _) = at(s);
        if d <= touch_tol {
            hit = Some(s);
            break;
        }
        prev = s;
    }
    let Some(mut hi) = hit else {
        return Err(BarrierError::NoContact);
    };
    let mut lo = prev;
    // Bisect [lo, hi]: clear at lo, touching at hi.
    let param_tol = 1.0e-10 * scale;
    while (hi - lo).abs() > param_tol {
        let mid = 0.5 * (lo + hi);
        let (d, _) = at(mid);
        if d <= touch_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (_, arg) = at(hi);
    let point = samples.points[arg];
    let side = if barrier.center_height(hi) > point.z {
        SideOfGraph::Above
    } else {
        SideOfGraph::Below
    };
    Ok(ContactReport {
        parameter: hi,
        point,
        side,
        touched_boundary: samples.on_boundary[arg],
    })
}

/// Classify a graph-space point against the solution surface.
pub fn classify_side(solution: &Solution, p: Point3) -> Result<SideOfGraph, SolverError> {
    let u = solution.interpolate(crate::geometry::point(p.x, p.y))?;
    let scale = 1.0 + u.abs().max(p.z.abs());
    let tol = 1.0e-10 * scale;
    Ok(if (p.z - u).abs() <= tol {
        SideOfGraph::On
    } else if p.z > u {
        SideOfGraph::Above
    } else {
        SideOfGraph::Below
    })
}

/// Outcome of lowering the standard cylinder over a transversal site.
#[derive(Debug, Clone, Copy)]
pub struct DescentReport {
    /// First contact, if the cylinder met the graph at all.
    pub contact: Option<ContactReport>,
    /// Axis height the contact must not exceed.
    pub bound: f64,
    /// Mesh-resolution allowance added to the bound.
    pub tolerance: f64,
    pub pass: bool,
}

/// Lower the cylinder of radius 1/(2H) with axis above `x0` and verify the
/// first contact happens at axis height at most `m + 1/(2H)` (plus a mesh
/// tolerance). Requires the boundary data over the window
/// [x0 - 1/(2H), x0 + 1/(2H)] to stay at or below `m`.
pub fn cylinder_descent_bound(
    solution: &Solution,
    x0: f64,
    m: f64,
) -> Result<DescentReport, BarrierError> {
    let h = solution.mean_curvature();
    let radius = 1.0 / (2.0 * h);
    for side in [StripSide::Lower, StripSide::Upper] {
        let trace = solution.boundary_trace(side)?;
        let (lo, hi) = trace.domain();
        if x0 - radius < lo - 1.0e-12 || x0 + radius > hi + 1.0e-12 {
            return Err(BarrierError::HypothesisViolated(format!(
                "window [{:.6}, {:.6}] leaves the meshed range [{lo:.6}, {hi:.6}]",
                x0 - radius,
                x0 + radius
            )));
        }
        let (_, max) = trace
            .min_max_on(x0 - radius, x0 + radius)
            .map_err(|e| BarrierError::HypothesisViolated(e.to_string()))?;
        if max > m + 1.0e-9 * (1.0 + m.abs()) {
            return Err(BarrierError::HypothesisViolated(format!(
                "boundary data reaches {max:.6} above the ceiling {m:.6} on the window"
            )));
        }
    }

    let barrier = Barrier::Cylinder {
        radius,
        x_axis: x0,
    };
    let start = solution.max_value() + radius + 1.0 / h;
    let stop = solution.min_value() - radius;
    let bound = m + radius;
    let tolerance = 2.0 * solution.mesh().h_max().powi(2);
    match first_contact(solution, &barrier, (start, stop)) {
        Ok(contact) => Ok(DescentReport {
            contact: Some(contact),
            bound,
            tolerance,
            pass: contact.parameter <= bound + tolerance,
        }),
        Err(BarrierError::NoContact) => Ok(DescentReport {
            contact: None,
            bound,
            tolerance,
            pass: true,
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_generalized_strip, PiecewiseLinearFn};
    use crate::mesh::{generate_disk_mesh, generate_strip_mesh};
    use crate::solver::exact_cap;
    use std::sync::Arc;

    fn flat_strip_solution() -> Solution {
        let dom = build_generalized_strip(
            PiecewiseLinearFn::constant(0.0, 4.0, -0.5),
            PiecewiseLinearFn::constant(0.0, 4.0, 0.5),
            (0.0, 4.0),
            false,
        )
        .unwrap();
        let mesh = Arc::new(generate_strip_mesh(&dom, 16, 8).unwrap());
        let n = mesh.num_vertices();
        Solution::from_values(mesh, vec![0.0; n], 1.0)
    }

    fn cap_solution(rings: usize) -> Solution {
        let cap = exact_cap(1.0, 0.5).unwrap();
        let mesh = Arc::new(generate_disk_mesh(0.5, rings));
        let u: Vec<f64> = mesh.vertices().iter().map(|p| cap.eval(*p)).collect();
        Solution::from_values(mesh, u, 1.0)
    }

    #[test]
    fn flat_plane_meets_descending_cylinder_at_radius() {
        let sol = flat_strip_solution();
        let barrier = Barrier::Cylinder {
            radius: 0.5,
            x_axis: 2.0,
        };
        let contact = first_contact(&sol, &barrier, (3.0, -2.0)).unwrap();
        assert!(
            (contact.parameter - 0.5).abs() < 1e-8,
            "contact at {}",
            contact.parameter
        );
        assert!(contact.point.z.abs() < 1e-12);
        assert!((contact.point.x - 2.0).abs() < 1e-9);
        assert_eq!(contact.side, SideOfGraph::Above);
    }

    #[test]
    fn whole_cap_touches_concentric_sphere_at_zero_offset() {
        // The graph is a piece of the sphere of radius 1 centered at
        // (0, 0, sqrt(0.75)); lowering a unit sphere from above along z
        // first touches when the centers coincide (offset parameter 0,
        // tangency across the whole cap). Triangle centroids sit inside
        // the sphere by about h^2/2, so the detected contact can only come
        // early, by at most that sag.
        let sol = cap_solution(12);
        let sag = sol.mesh().h_max().powi(2);
        let z0 = 0.75f64.sqrt();
        let barrier = Barrier::SphereDescending {
            radius: 1.0,
            x_center: 0.0,
            y_center: 0.0,
        };
        let contact = first_contact(&sol, &barrier, (z0 + 2.0, z0 - 0.5)).unwrap();
        assert!(
            contact.parameter >= z0 - 1e-9,
            "contact must not be late: offset {}",
            contact.parameter - z0
        );
        assert!(
            contact.parameter <= z0 + 2.0 * sag,
            "offset {} exceeds the sag allowance {}",
            contact.parameter - z0,
            2.0 * sag
        );
    }

    #[test]
    fn sphere_sliding_along_y_first_touches_the_rim() {
        // Hand derivation: samples sit on the unit sphere centered at
        // (0, 0, z0); at center offset v the squared distance is
        // 1 + v^2 - 2 v y, minimized at the lowest sampled y = -1/2, so the
        // first zero along v in (-inf, 0) is v = -1, at the rim point
        // (0, -1/2, 0).
        let sol = cap_solution(12);
        let z0 = 0.75f64.sqrt();
        let barrier = Barrier::SphereAlongY {
            radius: 1.0,
            x_center: 0.0,
            z_center: z0,
        };
        let contact = first_contact(&sol, &barrier, (-3.0, 0.0)).unwrap();
        assert!(
            (contact.parameter - (-1.0)).abs() < 1e-8,
            "contact at {}",
            contact.parameter
        );
        assert!(contact.point.x.abs() < 1e-9);
        assert!((contact.point.y - (-0.5)).abs() < 1e-9);
        assert!(contact.touched_boundary);
    }

    #[test]
    fn sphere_clear_of_the_slab_reports_no_contact() {
        let sol = flat_strip_solution();
        let barrier = Barrier::SphereAlongY {
            radius: 0.3,
            x_center: 2.0,
            z_center: 5.0,
        };
        assert!(matches!(
            first_contact(&sol, &barrier, (-3.0, 3.0)),
            Err(BarrierError::NoContact)
        ));
    }

    #[test]
    fn starting_in_contact_is_rejected() {
        let sol = flat_strip_solution();
        let barrier = Barrier::Cylinder {
            radius: 0.5,
            x_axis: 2.0,
        };
        assert!(matches!(
            first_contact(&sol, &barrier, (0.2, -2.0)),
            Err(BarrierError::StartsInContact)
        ));
    }

    #[test]
    fn widening_the_range_never_delays_first_contact() {
        let sol = flat_strip_solution();
        let barrier = Barrier::Cylinder {
            radius: 0.5,
            x_axis: 2.0,
        };
        let short = first_contact(&sol, &barrier, (2.0, 0.4)).unwrap();
        let long = first_contact(&sol, &barrier, (2.0, -3.0)).unwrap();
        assert!((short.parameter - long.parameter).abs() < 1e-8);
    }

    #[test]
    fn classify_side_matches_interpolated_height() {
        let sol = flat_strip_solution();
        assert_eq!(
            classify_side(&sol, point3(1.0, 0.0, 0.5)).unwrap(),
            SideOfGraph::Above
        );
        assert_eq!(
            classify_side(&sol, point3(1.0, 0.0, 0.0)).unwrap(),
            SideOfGraph::On
        );
        assert_eq!(
            classify_side(&sol, point3(1.0, 0.0, -0.5)).unwrap(),
            SideOfGraph::Below
        );
        assert!(classify_side(&sol, point3(9.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn cap_point_below_dip_classifies_below() {
        let sol = cap_solution(12);
        let dip = exact_cap(1.0, 0.5).unwrap().center_value();
        assert_eq!(
            classify_side(&sol, point3(0.0, 0.0, dip - 1.0)).unwrap(),
            SideOfGraph::Below
        );
    }

    #[test]
    fn flat_descent_bound_is_met_exactly() {
        let sol = flat_strip_solution();
        let report = cylinder_descent_bound(&sol, 2.0, 0.0).unwrap();
        let contact = report.contact.expect("cylinder must land on the plane");
        assert!((contact.parameter - 0.5).abs() < 1e-8);
        assert!(report.pass);
        assert!((report.bound - 0.5).abs() < 1e-15);
    }

    #[test]
    fn descent_rejects_understated_ceiling() {
        let sol = flat_strip_solution();
        assert!(matches!(
            cylinder_descent_bound(&sol, 2.0, -0.1),
            Err(BarrierError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn descent_window_must_fit_the_mesh() {
        let sol = flat_strip_solution();
        assert!(matches!(
            cylinder_descent_bound(&sol, 0.2, 0.0),
            Err(BarrierError::HypothesisViolated(_))
        ));
    }
}
