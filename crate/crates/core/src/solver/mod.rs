//! Dirichlet solver for the constant-mean-curvature graph equation
//! div(grad u / sqrt(1 + |grad u|^2)) = 2H on triangulated domains.
//!
//! The discrete problem minimizes the convex energy
//! E[u] = sum_T |T| (sqrt(1 + |grad u|_T^2) + 2H mean_T(u))
//! over piecewise-linear fields with fixed boundary values, by damped
//! Newton iteration with Armijo backtracking. Non-existence (domains too
//! wide for the prescribed curvature) surfaces as a typed error, never as
//! an unconverged result. Closed-form spherical-cap and cylinder solutions
//! are provided as oracles.

mod linalg;

pub use linalg::{solve_spd, CgReport, CsrMatrix};

use std::sync::Arc;

use crate::geometry::{point, PiecewiseLinearFn, Point};
use crate::mesh::{BoundaryTag, MeshGeometry, TriangleMesh};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("no convergence after {0} Newton iterations")]
    NoConvergence(usize),
    #[error("triangle slope {max_slope:.3e} exceeded the blow-up threshold; the problem likely has no solution")]
    GradientBlowup { max_slope: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolveFailed(String),
    #[error("point ({x}, {y}) lies outside the meshed domain")]
    PointOutside { x: f64, y: f64 },
    #[error("cap radius {radius} must be positive and below 1/H = {limit}")]
    BadRadius { radius: f64, limit: f64 },
    #[error("half-width {half_width} must be positive and below 1/(2H) = {limit}")]
    BadWidth { half_width: f64, limit: f64 },
    #[error("boundary data: {0}")]
    BadBoundaryData(String),
}

/// Dirichlet values on a cap (left or right end of a strip).
#[derive(Debug, Clone)]
pub enum CapSpec {
    /// Interpolate linearly in y between the lower and upper curve values
    /// at the cap abscissa.
    Linear,
    /// Explicit piecewise-linear function of y along the cap.
    Values(PiecewiseLinearFn),
}

/// Dirichlet data addressed by boundary tag: functions of x on the lower
/// and upper curves, cap rules at the ends, or a function of angle on a
/// disk rim.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    f_minus: Option<PiecewiseLinearFn>,
    f_plus: Option<PiecewiseLinearFn>,
    left_cap: CapSpec,
    right_cap: CapSpec,
    rim: Option<PiecewiseLinearFn>,
}

impl BoundaryData {
    pub fn strip(
        f_minus: PiecewiseLinearFn,
        f_plus: PiecewiseLinearFn,
        left_cap: CapSpec,
        right_cap: CapSpec,
    ) -> BoundaryData {
        BoundaryData {
            f_minus: Some(f_minus),
            f_plus: Some(f_plus),
            left_cap,
            right_cap,
            rim: None,
        }
    }

    /// Rim values as a piecewise-linear function of the polar angle; the
    /// function must cover [-pi, pi].
    pub fn disk(rim: PiecewiseLinearFn) -> BoundaryData {
        BoundaryData {
            f_minus: None,
            f_plus: None,
            left_cap: CapSpec::Linear,
            right_cap: CapSpec::Linear,
            rim: Some(rim),
        }
    }

    pub fn disk_constant(value: f64) -> BoundaryData {
        BoundaryData::disk(PiecewiseLinearFn::constant(-4.0, 4.0, value))
    }

    pub fn f_minus(&self) -> Option<&PiecewiseLinearFn> {
        self.f_minus.as_ref()
    }

    pub fn f_plus(&self) -> Option<&PiecewiseLinearFn> {
        self.f_plus.as_ref()
    }
}

/// Stopping and damping parameters for the Newton solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Interior gradient norm stop, relative to max(1, initial norm).
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo_c: f64,
    /// Step shrink factor for backtracking.
    pub armijo_shrink: f64,
    /// Triangle slope threshold treated as blow-up (non-existence signal).
    pub grad_cap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grad_tol: 1.0e-10,
            max_iters: 200,
            armijo_c: 1.0e-4,
            armijo_shrink: 0.5,
            grad_cap: 1.0e6,
        }
    }
}

/// A Dirichlet problem: mesh, boundary data, and mean curvature H > 0.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    mesh: Arc<TriangleMesh>,
    boundary_values: Vec<Option<f64>>,
    h: f64,
}

impl DirichletProblem {
    pub fn new(
        mesh: Arc<TriangleMesh>,
        data: &BoundaryData,
        h: f64,
    ) -> Result<DirichletProblem, SolverError> {
        if !(h > 0.0) {
            return Err(SolverError::BadBoundaryData(format!(
                "mean curvature H = {h} must be positive"
            )));
        }
        let boundary_values = resolve_boundary_values(&mesh, data)?;
        Ok(DirichletProblem {
            mesh,
            boundary_values,
            h,
        })
    }

    pub fn mesh(&self) -> &Arc<TriangleMesh> {
        &self.mesh
    }

    pub fn mean_curvature(&self) -> f64 {
        self.h
    }

    pub fn boundary_values(&self) -> &[Option<f64>] {
        &self.boundary_values
    }
}

fn resolve_boundary_values(
    mesh: &TriangleMesh,
    data: &BoundaryData,
) -> Result<Vec<Option<f64>>, SolverError> {
    let bad = |msg: String| SolverError::BadBoundaryData(msg);
    let strip_dom = match mesh.geometry() {
        MeshGeometry::Strip(dom) => Some(dom.clone()),
        _ => None,
    };
    let eval = |plf: &PiecewiseLinearFn, x: f64, what: &str| -> Result<f64, SolverError> {
        plf.eval_checked(x)
            .map_err(|_| bad(format!("{what} does not cover coordinate {x}")))
    };

    // Continuity at strip corners and at a pinch.
    if let (Some(dom), Some(fm), Some(fp)) = (&strip_dom, &data.f_minus, &data.f_plus) {
        let (xlo, xhi) = dom.x_range();
        if dom.pinched_left() {
            let a = eval(fm, xlo, "lower data")?;
            let b = eval(fp, xlo, "upper data")?;
            if (a - b).abs() > 1.0e-9 * (1.0 + a.abs().max(b.abs())) {
                return Err(bad(format!(
                    "pinched domain needs matching data at the pinch: {a} vs {b}"
                )));
            }
        }
        for (cap, x) in [(&data.left_cap, xlo), (&data.right_cap, xhi)] {
            if let CapSpec::Values(plf) = cap {
                let lo_y = dom.b_minus().eval(x);
                let hi_y = dom.b_plus().eval(x);
                let scale = 1.0 + plf.min_max_on_domain().1.abs();
                let c_lo = eval(plf, lo_y, "cap data")?;
                let c_hi = eval(plf, hi_y, "cap data")?;
                let f_lo = eval(fm, x, "lower data")?;
                let f_hi = eval(fp, x, "upper data")?;
                if (c_lo - f_lo).abs() > 1.0e-9 * scale || (c_hi - f_hi).abs() > 1.0e-9 * scale {
                    return Err(bad(
                        "cap data does not meet the lower/upper data at the corners".into(),
                    ));
                }
            }
        }
    }

    let mut values = vec![None; mesh.num_vertices()];
    for (v, &tag) in mesh.tags().iter().enumerate() {
        let p = mesh.vertices()[v];
        let val = match tag {
            BoundaryTag::Interior => None,
            BoundaryTag::LowerCurve => Some(eval(
                data.f_minus
                    .as_ref()
                    .ok_or_else(|| bad("mesh has a lower curve but no lower data".into()))?,
                p.x,
                "lower data",
            )?),
            BoundaryTag::UpperCurve => Some(eval(
                data.f_plus
                    .as_ref()
                    .ok_or_else(|| bad("mesh has an upper curve but no upper data".into()))?,
                p.x,
                "upper data",
            )?),
            BoundaryTag::LeftCap | BoundaryTag::RightCap => {
                let cap = if tag == BoundaryTag::LeftCap {
                    &data.left_cap
                } else {
                    &data.right_cap
                };
                match cap {
                    CapSpec::Values(plf) => Some(eval(plf, p.y, "cap data")?),
                    CapSpec::Linear => {
                        let dom = strip_dom.as_ref().ok_or_else(|| {
                            bad("linear cap interpolation needs a strip mesh".into())
                        })?;
                        let fm = data
                            .f_minus
                            .as_ref()
                            .ok_or_else(|| bad("linear cap needs lower data".into()))?;
                        let fp = data
                            .f_plus
                            .as_ref()
                            .ok_or_else(|| bad("linear cap needs upper data".into()))?;
                        let lo_y = dom.b_minus().eval(p.x);
                        let hi_y = dom.b_plus().eval(p.x);
                        let f_lo = eval(fm, p.x, "lower data")?;
                        let f_hi = eval(fp, p.x, "upper data")?;
                        if hi_y - lo_y <= 1.0e-12 {
                            Some(f_lo)
                        } else {
                            let t = ((p.y - lo_y) / (hi_y - lo_y)).clamp(0.0, 1.0);
                            Some(f_lo + t * (f_hi - f_lo))
                        }
                    }
                }
            }
            BoundaryTag::DiskRim => {
                let rim = data
                    .rim
                    .as_ref()
                    .ok_or_else(|| bad("mesh has a disk rim but no rim data".into()))?;
                Some(eval(rim, p.y.atan2(p.x), "rim data")?)
            }
        };
        values[v] = val;
    }
    Ok(values)
}

/// Converged solution of a Dirichlet problem: immutable nodal heights plus
/// solver diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    mesh: Arc<TriangleMesh>,
    u: Vec<f64>,
    h: f64,
    iterations: usize,
    final_gradient_norm: f64,
}

impl Solution {
    /// Wrap explicit nodal values (used by oracles and tests); diagnostics
    /// are zeroed.
    pub fn from_values(mesh: Arc<TriangleMesh>, u: Vec<f64>, h: f64) -> Solution {
        assert_eq!(u.len(), mesh.num_vertices());
        Solution {
            mesh,
            u,
            h,
            iterations: 0,
            final_gradient_norm: 0.0,
        }
    }

    pub fn mesh(&self) -> &Arc<TriangleMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn mean_curvature(&self) -> f64 {
        self.h
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Euclidean norm of the interior energy gradient at the final iterate.
    pub fn final_gradient_norm(&self) -> f64 {
        self.final_gradient_norm
    }

    /// Piecewise-linear interpolation at a point of the meshed domain.
    pub fn interpolate(&self, p: Point) -> Result<f64, SolverError> {
        let (t, bary) = self
            .mesh
            .locate(p)
            .ok_or(SolverError::PointOutside { x: p.x, y: p.y })?;
        let [a, b, c] = self.mesh.triangles()[t];
        Ok(bary[0] * self.u[a] + bary[1] * self.u[b] + bary[2] * self.u[c])
    }

    pub fn min_value(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Min and max over boundary vertices only.
    pub fn boundary_min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (v, &tag) in self.mesh.tags().iter().enumerate() {
            if tag != BoundaryTag::Interior {
                lo = lo.min(self.u[v]);
                hi = hi.max(self.u[v]);
            }
        }
        (lo, hi)
    }

    /// The solution restricted to the lower or upper boundary curve of a
    /// strip mesh, as a piecewise-linear function of x.
    pub fn boundary_trace(&self, side: StripSide) -> Result<PiecewiseLinearFn, SolverError> {
        let MeshGeometry::Strip(dom) = self.mesh.geometry() else {
            return Err(SolverError::BadBoundaryData(
                "boundary trace requires a strip mesh".into(),
            ));
        };
        let tol = 1.0e-9 * self.mesh.h_max().max(1.0);
        let curve = match side {
            StripSide::Lower => dom.b_minus(),
            StripSide::Upper => dom.b_plus(),
        };
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for (v, p) in self.mesh.vertices().iter().enumerate() {
            if (p.y - curve.eval(p.x)).abs() <= tol {
                pts.push((p.x, self.u[v]));
            }
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite x"));
        pts.dedup_by(|b, a| (b.0 - a.0).abs() <= tol);
        PiecewiseLinearFn::new(pts).map_err(|e| {
            SolverError::BadBoundaryData(format!("boundary trace is not a function of x: {e}"))
        })
    }

    /// Mesh export plus one `u <value>` line per vertex.
    pub fn export_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = self.mesh.export_text();
        for v in &self.u {
            writeln!(out, "u {v:.16e}").unwrap();
        }
        out
    }
}

/// Side selector for strip boundary traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripSide {
    Lower,
    Upper,
}

struct TriangleGeometry {
    area: f64,
    grad_phi: [Point; 3],
}

fn triangle_geometry(mesh: &TriangleMesh, t: usize) -> TriangleGeometry {
    let [a, b, c] = mesh.triangle_points(t);
    let area = 0.5 * (b - a).cross(c - a);
    let perp = |v: Point| point(-v.y, v.x);
    let s = 1.0 / (2.0 * area);
    TriangleGeometry {
        area,
        grad_phi: [perp(c - b) * s, perp(a - c) * s, perp(b - a) * s],
    }
}

fn triangle_grad(mesh: &TriangleMesh, geo: &TriangleGeometry, t: usize, u: &[f64]) -> Point {
    let [a, b, c] = mesh.triangles()[t];
    geo.grad_phi[0] * u[a] + geo.grad_phi[1] * u[b] + geo.grad_phi[2] * u[c]
}

/// Discrete energy: sum over triangles of |T| (sqrt(1+|grad u|^2) + 2H mean u).
pub fn energy(mesh: &TriangleMesh, u: &[f64], h: f64) -> f64 {
    assert_eq!(u.len(), mesh.num_vertices());
    let mut e = 0.0;
    for t in 0..mesh.num_triangles() {
        let geo = triangle_geometry(mesh, t);
        let g = triangle_grad(mesh, &geo, t, u);
        let [a, b, c] = mesh.triangles()[t];
        let mean = (u[a] + u[b] + u[c]) / 3.0;
        e += geo.area * ((1.0 + g.dot(g)).sqrt() + 2.0 * h * mean);
    }
    e
}

/// Nodal gradient of the discrete energy.
pub fn energy_gradient(mesh: &TriangleMesh, u: &[f64], h: f64) -> Vec<f64> {
    assert_eq!(u.len(), mesh.num_vertices());
    let mut g = vec![0.0; u.len()];
    for t in 0..mesh.num_triangles() {
        let geo = triangle_geometry(mesh, t);
        let gu = triangle_grad(mesh, &geo, t, u);
        let w = (1.0 + gu.dot(gu)).sqrt();
        let tri = mesh.triangles()[t];
        for k in 0..3 {
            g[tri[k]] += geo.area * (gu.dot(geo.grad_phi[k]) / w + 2.0 * h / 3.0);
        }
    }
    g
}

/// Sparse Hessian of the discrete energy; exactly symmetric and positive
/// semi-definite (the energy is convex).
pub fn energy_hessian(mesh: &TriangleMesh, u: &[f64], _h: f64) -> CsrMatrix {
    assert_eq!(u.len(), mesh.num_vertices());
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let geo = triangle_geometry(mesh, t);
        let gu = triangle_grad(mesh, &geo, t, u);
        let w2 = 1.0 + gu.dot(gu);
        let w = w2.sqrt();
        let w3 = w2 * w;
        let tri = mesh.triangles()[t];
        for m in 0..3 {
            for n in 0..3 {
                let val = geo.area
                    * (geo.grad_phi[m].dot(geo.grad_phi[n]) / w
                        - gu.dot(geo.grad_phi[m]) * gu.dot(geo.grad_phi[n]) / w3);
                triplets.push((tri[m], tri[n], val));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_vertices(), &triplets)
}

fn max_triangle_slope(mesh: &TriangleMesh, u: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for t in 0..mesh.num_triangles() {
        let geo = triangle_geometry(mesh, t);
        worst = worst.max(triangle_grad(mesh, &geo, t, u).norm());
    }
    worst
}

/// Solve the Dirichlet problem by damped Newton descent on the energy.
///
/// The initial iterate extends the boundary data by one linear solve of the
/// zero-state quadratic model. Iteration stops when the interior gradient
/// norm falls below `grad_tol` relative to max(1, initial norm); slope
/// blow-up and stalled line searches raise typed errors.
pub fn solve_dirichlet(
    problem: &DirichletProblem,
    opts: &SolverOptions,
) -> Result<Solution, SolverError> {
    let mesh = problem.mesh();
    let n = mesh.num_vertices();
    let interior: Vec<usize> = (0..n)
        .filter(|&v| problem.boundary_values[v].is_none())
        .collect();
    let mut u = vec![0.0; n];
    for v in 0..n {
        if let Some(val) = problem.boundary_values[v] {
            u[v] = val;
        }
    }
    let cg_iters = 200 + 10 * interior.len();

    if !interior.is_empty() {
        // Initial iterate: minimize the quadratic model at the zero state.
        let zero = vec![0.0; n];
        let k0 = energy_hessian(mesh, &zero, problem.h);
        let g0 = energy_gradient(mesh, &zero, problem.h);
        let mut coupling = vec![0.0; n];
        k0.matvec(&u, &mut coupling);
        let rhs: Vec<f64> = interior
            .iter()
            .map(|&v| -(g0[v] + coupling[v]))
            .collect();
        let k0_ii = k0.submatrix(&interior);
        let (u0_i, _) = solve_spd(&k0_ii, &rhs, 1.0e-12, cg_iters).map_err(|rep| {
            SolverError::LinearSolveFailed(format!(
                "initial extension stalled at relative residual {:.3e}",
                rep.relative_residual
            ))
        })?;
        for (k, &v) in interior.iter().enumerate() {
            u[v] = u0_i[k];
        }
    }

    let gather = |g: &[f64]| -> Vec<f64> { interior.iter().map(|&v| g[v]).collect() };

    let mut e_curr = energy(mesh, &u, problem.h);
    let mut g_i = gather(&energy_gradient(mesh, &u, problem.h));
    let mut gnorm = linalg::norm(&g_i);
    let gnorm_ref = gnorm.max(1.0);
    let mut iterations = 0usize;

    loop {
        if gnorm <= opts.grad_tol * gnorm_ref || interior.is_empty() {
            return Ok(Solution {
                mesh: Arc::clone(mesh),
                u,
                h: problem.h,
                iterations,
                final_gradient_norm: gnorm,
            });
        }
        if iterations >= opts.max_iters {
            return Err(SolverError::NoConvergence(iterations));
        }

        let hess = energy_hessian(mesh, &u, problem.h).submatrix(&interior);
        let neg_g: Vec<f64> = g_i.iter().map(|x| -x).collect();
        let (dir, _) = solve_spd(&hess, &neg_g, 1.0e-12, cg_iters).map_err(|rep| {
            SolverError::LinearSolveFailed(format!(
                "Newton system stalled at relative residual {:.3e} after {} iterations",
                rep.relative_residual, rep.iterations
            ))
        })?;
        let slope = linalg::dot(&g_i, &dir);

        let mut step = 1.0;
        let mut trial = u.clone();
        // The energy is a long sum of triangle contributions, so its
        // evaluation carries several ulps of accumulated roundoff. Without
        // this allowance the backtracking rejects full steps on noise in
        // the last Newton iterations and the gradient norm floors just
        // above the tolerance instead of contracting quadratically.
        let noise = 64.0 * f64::EPSILON * (1.0 + e_curr.abs());
        loop {
            for (k, &v) in interior.iter().enumerate() {
                trial[v] = u[v] + step * dir[k];
            }
            let e_trial = energy(mesh, &trial, problem.h);
            if e_trial <= e_curr + opts.armijo_c * step * slope + noise {
                u.copy_from_slice(&trial);
                e_curr = e_trial;
                break;
            }
            step *= opts.armijo_shrink;
            if step < 1.0e-14 {
                return Err(SolverError::NoConvergence(iterations));
            }
        }
        iterations += 1;

        let max_slope = max_triangle_slope(mesh, &u);
        if max_slope > opts.grad_cap {
            return Err(SolverError::GradientBlowup { max_slope });
        }
        g_i = gather(&energy_gradient(mesh, &u, problem.h));
        gnorm = linalg::norm(&g_i);
    }
}

/// Closed-form spherical-cap solution: the lower cap of the sphere of
/// radius 1/H over the disk of radius R, vanishing on the rim.
#[derive(Debug, Clone, Copy)]
pub struct ExactCap {
    h: f64,
    radius: f64,
}

/// u(r) = sqrt(1/H^2 - R^2) - sqrt(1/H^2 - r^2) on the disk of radius R.
pub fn exact_cap(h: f64, radius: f64) -> Result<ExactCap, SolverError> {
    let limit = 1.0 / h;
    if !(h > 0.0) || !(radius > 0.0) || radius >= limit {
        return Err(SolverError::BadRadius { radius, limit });
    }
    Ok(ExactCap { h, radius })
}

impl ExactCap {
    pub fn eval_radial(&self, r: f64) -> f64 {
        let inv_h2 = 1.0 / (self.h * self.h);
        (inv_h2 - self.radius * self.radius).sqrt() - (inv_h2 - r * r).sqrt()
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.eval_radial(p.norm())
    }

    /// Depth of the dip at the center (a negative value).
    pub fn center_value(&self) -> f64 {
        self.eval_radial(0.0)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Closed-form cylinder solution on the strip |y| <= w: one-dimensional
/// reduction of the graph equation, vanishing at y = +-w.
#[derive(Debug, Clone, Copy)]
pub struct ExactCylinder {
    h: f64,
    half_width: f64,
}

/// u(y) = (sqrt(1 - 4 H^2 w^2) - sqrt(1 - 4 H^2 y^2)) / (2H) for |y| <= w.
pub fn exact_cylinder(h: f64, half_width: f64) -> Result<ExactCylinder, SolverError> {
    let limit = 1.0 / (2.0 * h);
    if !(h > 0.0) || !(half_width > 0.0) || half_width >= limit {
        return Err(SolverError::BadWidth { half_width, limit });
    }
    Ok(ExactCylinder { h, half_width })
}

impl ExactCylinder {
    pub fn eval(&self, y: f64) -> f64 {
        let s = 2.0 * self.h;
        ((1.0 - (s * self.half_width).powi(2)).sqrt() - (1.0 - (s * y).powi(2)).sqrt()) / s
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Depth of the dip on the midline (a negative value).
    pub fn midline_value(&self) -> f64 {
        self.eval(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_generalized_strip;
    use crate::mesh::{generate_disk_mesh, generate_strip_mesh};
    use rand::Rng;
    use rand::SeedableRng;

    fn unit_square_mesh(nx: usize, ny: usize) -> Arc<TriangleMesh> {
        let dom = build_generalized_strip(
            PiecewiseLinearFn::constant(0.0, 1.0, 0.0),
            PiecewiseLinearFn::constant(0.0, 1.0, 1.0),
            (0.0, 1.0),
            false,
        )
        .unwrap();
        Arc::new(generate_strip_mesh(&dom, nx, ny).unwrap())
    }

    #[test]
    fn energy_of_constant_fields() {
        let mesh = unit_square_mesh(4, 4);
        let n = mesh.num_vertices();
        assert!((energy(&mesh, &vec![0.0; n], 1.0) - 1.0).abs() < 1e-14);
        assert!((energy(&mesh, &vec![1.0; n], 1.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn energy_of_linear_field() {
        let mesh = unit_square_mesh(5, 3);
        let u: Vec<f64> = mesh.vertices().iter().map(|p| p.x).collect();
        let expected = std::f64::consts::SQRT_2 + 1.0;
        assert!((energy(&mesh, &u, 1.0) - expected).abs() < 1e-13);
    }

    #[test]
    fn gradient_at_constant_is_lumped_area_times_2h() {
        let mesh = unit_square_mesh(4, 4);
        let n = mesh.num_vertices();
        let h = 0.7;
        let g = energy_gradient(&mesh, &vec![0.25; n], h);
        let mut lumped = vec![0.0; n];
        for t in 0..mesh.num_triangles() {
            let a = mesh.triangle_area(t);
            for &v in &mesh.triangles()[t] {
                lumped[v] += a / 3.0;
            }
        }
        for v in 0..n {
            assert!((g[v] - 2.0 * h * lumped[v]).abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mesh = unit_square_mesh(3, 3);
        let n = mesh.num_vertices();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let g = energy_gradient(&mesh, &u, 1.3);
            let mut worst = 0.0f64;
            for i in 0..n {
                let step = 1e-6;
                let mut up = u.clone();
                let mut dn = u.clone();
                up[i] += step;
                dn[i] -= step;
                let fd = (energy(&mesh, &up, 1.3) - energy(&mesh, &dn, 1.3)) / (2.0 * step);
                let rel = (g[i] - fd).abs() / g[i].abs().max(1.0);
                worst = worst.max(rel);
            }
            assert!(worst <= 1e-6, "worst relative mismatch {worst}");
        }
    }

    #[test]
    fn hessian_is_exactly_symmetric_and_psd() {
        let mesh = unit_square_mesh(4, 3);
        let n = mesh.num_vertices();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let hess = energy_hessian(&mesh, &u, 1.0);
        assert_eq!(hess.max_asymmetry(), 0.0);
        for _ in 0..10 {
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut hd = vec![0.0; n];
            hess.matvec(&d, &mut hd);
            assert!(linalg::dot(&d, &hd) >= -1e-12);
        }
    }

    #[test]
    fn solves_cap_problem_on_disk() {
        let cap = exact_cap(1.0, 0.5).unwrap();
        let mesh = Arc::new(generate_disk_mesh(0.5, 16));
        let problem = DirichletProblem::new(mesh.clone(), &BoundaryData::disk_constant(0.0), 1.0)
            .unwrap();
        let sol = solve_dirichlet(&problem, &SolverOptions::default()).unwrap();
        let mut linf = 0.0f64;
        for (v, p) in mesh.vertices().iter().enumerate() {
            linf = linf.max((sol.values()[v] - cap.eval(*p)).abs());
        }
        assert!(linf < 5e-3, "L-infinity error {linf}");
        let center = sol.interpolate(point(0.0, 0.0)).unwrap();
        assert!((center - (-0.133_974_6)).abs() < 5e-3, "center {center}");
        // Boundary values are imposed exactly.
        for (v, &tag) in mesh.tags().iter().enumerate() {
            if tag != BoundaryTag::Interior {
                assert_eq!(sol.values()[v], 0.0);
            }
        }
    }

    #[test]
    fn solves_cylinder_problem_on_strip() {
        let h = 1.0;
        let w = 0.4;
        let cyl = exact_cylinder(h, w).unwrap();
        let dom = build_generalized_strip(
            PiecewiseLinearFn::constant(0.0, 4.0, -w),
            PiecewiseLinearFn::constant(0.0, 4.0, w),
            (0.0, 4.0),
            false,
        )
        .unwrap();
        let ny = 16;
        let mesh = Arc::new(generate_strip_mesh(&dom, 40, ny).unwrap());
        // Cap data equals the exact profile, sampled at the cap vertices.
        let cap_pts: Vec<(f64, f64)> = (0..=ny)
            .map(|j| {
                let y = -w + 2.0 * w * (j as f64 / ny as f64);
                (y, cyl.eval(y))
            })
            .collect();
        let cap = CapSpec::Values(PiecewiseLinearFn::new(cap_pts).unwrap());
        let data = BoundaryData::strip(
            PiecewiseLinearFn::constant(0.0, 4.0, 0.0),
            PiecewiseLinearFn::constant(0.0, 4.0, 0.0),
            cap.clone(),
            cap,
        );
        let problem = DirichletProblem::new(mesh.clone(), &data, h).unwrap();
        let sol = solve_dirichlet(&problem, &SolverOptions::default()).unwrap();
        let mut linf = 0.0f64;
        for (v, p) in mesh.vertices().iter().enumerate() {
            linf = linf.max((sol.values()[v] - cyl.eval(p.y)).abs());
        }
        assert!(linf < 1e-2, "L-infinity error {linf}");
        let mid = sol.interpolate(point(2.0, 0.0)).unwrap();
        assert!((mid - (-0.2)).abs() < 5e-3, "midline value {mid}");
    }

    #[test]
    fn wide_strip_fails_with_typed_error() {
        // Width 2.4 with H = 1 exceeds the existence threshold.
        let dom = build_generalized_strip(
            PiecewiseLinearFn::constant(0.0, 4.0, -1.2),
            PiecewiseLinearFn::constant(0.0, 4.0, 1.2),
            (0.0, 4.0),
            false,
        )
        .unwrap();
        let mesh = Arc::new(generate_strip_mesh(&dom, 20, 12).unwrap());
        let data = BoundaryData::strip(
            PiecewiseLinearFn::constant(0.0, 4.0, 0.0),
            PiecewiseLinearFn::constant(0.0, 4.0, 0.0),
            CapSpec::Linear,
            CapSpec::Linear,
        );
        let problem = DirichletProblem::new(mesh, &data, 1.0).unwrap();
        match solve_dirichlet(&problem, &SolverOptions::default()) {
            Err(SolverError::GradientBlowup { .. }) | Err(SolverError::NoConvergence(_)) => {}
            other => panic!("expected blow-up or non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn interpolation_rules() {
        let mesh = unit_square_mesh(2, 2);
        let u: Vec<f64> = mesh.vertices().iter().map(|p| 2.0 * p.x - p.y).collect();
        let sol = Solution::from_values(mesh.clone(), u.clone(), 1.0);
        assert_eq!(sol.interpolate(mesh.vertices()[3]).unwrap(), u[3]);
        let [a, b, c] = mesh.triangles()[0];
        let centroid = (mesh.vertices()[a] + mesh.vertices()[b] + mesh.vertices()[c]) * (1.0 / 3.0);
        let mean = (u[a] + u[b] + u[c]) / 3.0;
        assert!((sol.interpolate(centroid).unwrap() - mean).abs() < 1e-14);
        assert!(matches!(
            sol.interpolate(point(5.0, 5.0)),
            Err(SolverError::PointOutside { .. })
        ));
    }

    #[test]
    fn exact_cap_properties() {
        assert!(matches!(
            exact_cap(1.0, 1.0),
            Err(SolverError::BadRadius { .. })
        ));
        let cap = exact_cap(1.0, 0.5).unwrap();
        assert_eq!(cap.eval_radial(0.5), 0.0);
        assert!(cap.center_value() < 0.0 && cap.center_value().abs() < 1.0);
        // The scaled gradient field of the cap is exactly H * (x, y): check
        // numerically via central differences.
        let h = 1.0;
        for (x, y) in [(0.1, 0.2), (-0.3, 0.05), (0.25, -0.35)] {
            let step = 1e-7;
            let ux = (cap.eval(point(x + step, y)) - cap.eval(point(x - step, y))) / (2.0 * step);
            let uy = (cap.eval(point(x, y + step)) - cap.eval(point(x, y - step))) / (2.0 * step);
            let w = (1.0 + ux * ux + uy * uy).sqrt();
            assert!((ux / w - h * x).abs() < 1e-6);
            assert!((uy / w - h * y).abs() < 1e-6);
        }
    }

    #[test]
    fn exact_cylinder_properties() {
        assert!(matches!(
            exact_cylinder(1.0, 0.5),
            Err(SolverError::BadWidth { .. })
        ));
        let cyl = exact_cylinder(1.0, 0.4).unwrap();
        assert_eq!(cyl.eval(0.4), 0.0);
        assert_eq!(cyl.eval(-0.4), 0.0);
        assert!((cyl.midline_value() - (-0.2)).abs() < 1e-15);
        assert_eq!(cyl.eval(0.17), cyl.eval(-0.17));
    }

    #[test]
    fn boundary_trace_recovers_data() {
        let dom = build_generalized_strip(
            PiecewiseLinearFn::constant(0.0, 2.0, -0.3),
            PiecewiseLinearFn::constant(0.0, 2.0, 0.3),
            (0.0, 2.0),
            false,
        )
        .unwrap();
        let mesh = Arc::new(generate_strip_mesh(&dom, 8, 4).unwrap());
        let fm = PiecewiseLinearFn::new(vec![(0.0, 0.1), (2.0, 0.5)]).unwrap();
        let fp = PiecewiseLinearFn::constant(0.0, 2.0, 0.2);
        let data = BoundaryData::strip(fm.clone(), fp, CapSpec::Linear, CapSpec::Linear);
        let problem = DirichletProblem::new(mesh, &data, 0.5).unwrap();
        let sol = solve_dirichlet(&problem, &SolverOptions::default()).unwrap();
        let trace = sol.boundary_trace(StripSide::Lower).unwrap();
        for x in [0.0, 0.25, 1.0, 2.0] {
            assert!((trace.eval(x) - fm.eval(x)).abs() < 1e-12);
        }
    }
}
