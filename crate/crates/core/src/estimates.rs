//! Inequality checks on computed solutions: vertical transversal sampling,
//! boundary-data variation, profile-set distances between labeled boundary
//! classes, and classical height bounds. Every check produces a report with
//! the measured value, the bound it must respect, and a mesh-dependent
//! slack allowance.

use crate::geometry::{
    good_components, point, profile_project, set_distance_multi, segment_vertical_crossing,
    GeometryError, GoodComponent, Label, LambdaDecomposition, PiecewiseLinearFn, Point,
    ProfileCurve,
};
use crate::mesh::MeshGeometry;
use crate::solver::{BoundaryData, Solution, SolverError, StripSide};

#[derive(Debug, thiserror::Error)]
pub enum EstimateError {
    #[error("window of radius {radius} around x0 = {x0} leaves the meshed range")]
    WindowOutside { x0: f64, radius: f64 },
    #[error("hypothesis fails: {0}")]
    HypothesisViolated(String),
    #[error("rectangle half-width {a} must exceed {limit}")]
    BadRectangle { a: f64, limit: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Samples of the solution along the vertical segment {x0} x [b-(x0), b+(x0)]:
/// every crossing of the segment with a mesh edge plus 64 uniform points.
#[derive(Debug, Clone)]
pub struct Transversal {
    x0: f64,
    segment: (Point, Point),
    /// (y, u) pairs sorted by y.
    samples: Vec<(f64, f64)>,
}

impl Transversal {
    pub fn new(solution: &Solution, x0: f64) -> Result<Transversal, EstimateError> {
        let mesh = solution.mesh();
        let MeshGeometry::Strip(domain) = mesh.geometry() else {
            return Err(EstimateError::HypothesisViolated(
                "transversal sampling requires a strip mesh".into(),
            ));
        };
        let (xl, xr) = domain.x_range();
        let tol = 1.0e-12 * (1.0 + xr.abs().max(xl.abs()));
        if x0 < xl + tol || x0 > xr - tol {
            return Err(EstimateError::WindowOutside { x0, radius: 0.0 });
        }
        let y_lo = domain.b_minus().eval(x0);
        let y_hi = domain.b_plus().eval(x0);
        let segment = (point(x0, y_lo), point(x0, y_hi));

        let verts = mesh.vertices();
        let u = solution.values();
        let mut samples: Vec<(f64, f64)> = Vec::new();
        for (i, j) in mesh.edges() {
            let a = verts[i];
            let b = verts[j];
            if (a.x - x0).abs() <= tol && (b.x - x0).abs() <= tol {
                samples.push((a.y, u[i]));
                samples.push((b.y, u[j]));
            } else if let Some(t) = segment_vertical_crossing(a, b, x0) {
                samples.push((a.y + t * (b.y - a.y), u[i] + t * (u[j] - u[i])));
            }
        }
        for k in 0..64 {
            let t = (k as f64 + 0.5) / 64.0;
            let y = y_lo + t * (y_hi - y_lo);
            let value = solution.interpolate(point(x0, y))?;
            samples.push((y, value));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        samples.dedup_by(|a, b| (a.0 - b.0).abs() <= 1.0e-14 && (a.1 - b.1).abs() <= 1.0e-12);
        Ok(Transversal {
            x0,
            segment,
            samples,
        })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn segment(&self) -> (Point, Point) {
        self.segment
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn min_sample(&self) -> (f64, f64) {
        self.samples
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("transversal has samples")
    }

    pub fn max_sample(&self) -> (f64, f64) {
        self.samples
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("transversal has samples")
    }

    pub fn min_value(&self) -> f64 {
        self.min_sample().1
    }

    pub fn max_value(&self) -> f64 {
        self.max_sample().1
    }

    pub fn oscillation(&self) -> f64 {
        self.max_value() - self.min_value()
    }
}

/// Oscillation of the two boundary-data functions over a centered window.
#[derive(Debug, Clone, Copy)]
pub struct VariationStats {
    pub x0: f64,
    /// Window radius.
    pub t: f64,
    /// sup - inf of the lower-curve data over [x0 - t, x0 + t].
    pub v_minus: f64,
    /// Same for the upper-curve data.
    pub v_plus: f64,
    /// max(v_minus, v_plus).
    pub v_pair: f64,
}

fn window_range(
    f: &PiecewiseLinearFn,
    x0: f64,
    t: f64,
) -> Result<(f64, f64), EstimateError> {
    let (lo, hi) = f.domain();
    let tol = 1.0e-12 * (1.0 + hi.abs().max(lo.abs()));
    if x0 - t < lo - tol || x0 + t > hi + tol {
        return Err(EstimateError::WindowOutside { x0, radius: t });
    }
    f.min_max_on((x0 - t).max(lo), (x0 + t).min(hi))
        .map_err(|e| EstimateError::HypothesisViolated(e.to_string()))
}

fn variation_from(
    f_minus: &PiecewiseLinearFn,
    f_plus: &PiecewiseLinearFn,
    x0: f64,
    t: f64,
) -> Result<VariationStats, EstimateError> {
    let (lo_m, hi_m) = window_range(f_minus, x0, t)?;
    let (lo_p, hi_p) = window_range(f_plus, x0, t)?;
    let v_minus = hi_m - lo_m;
    let v_plus = hi_p - lo_p;
    Ok(VariationStats {
        x0,
        t,
        v_minus,
        v_plus,
        v_pair: v_minus.max(v_plus),
    })
}

/// Exact oscillation of piecewise-linear boundary data over the window
/// [x0 - t, x0 + t] (breakpoint scan, no sampling).
pub fn variation(data: &BoundaryData, x0: f64, t: f64) -> Result<VariationStats, EstimateError> {
    let f_minus = data.f_minus().ok_or_else(|| {
        EstimateError::HypothesisViolated("variation requires two-sided strip data".into())
    })?;
    let f_plus = data.f_plus().ok_or_else(|| {
        EstimateError::HypothesisViolated("variation requires two-sided strip data".into())
    })?;
    variation_from(f_minus, f_plus, x0, t)
}

/// One checked inequality: pass exactly when
/// `measured <= bound + slack_allowance`.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub name: String,
    /// Transversal site, when the check is site-specific.
    pub x0: Option<f64>,
    pub measured: f64,
    pub bound: f64,
    pub slack_allowance: f64,
    pub pass: bool,
    /// Points achieving the measured value; the plane depends on the check
    /// (profile plane for distance checks, domain plane otherwise).
    pub witnesses: Vec<Point>,
}

impl EstimateReport {
    fn build(
        name: &str,
        x0: Option<f64>,
        measured: f64,
        bound: f64,
        slack_allowance: f64,
        witnesses: Vec<Point>,
    ) -> EstimateReport {
        EstimateReport {
            name: name.to_string(),
            x0,
            measured,
            bound,
            slack_allowance,
            pass: measured <= bound + slack_allowance,
            witnesses,
        }
    }

    /// The pass flag agrees with the stored numbers.
    pub fn is_consistent(&self) -> bool {
        self.pass == (self.measured <= self.bound + self.slack_allowance)
    }
}

/// Discretization allowance used by every check on this solution.
pub fn slack_allowance(solution: &Solution) -> f64 {
    10.0 * solution.mesh().h_max() + 10.0 * solution.final_gradient_norm()
}

fn lambda_profiles(
    solution: &Solution,
    decomp: &LambdaDecomposition,
) -> Result<(Vec<ProfileCurve>, Vec<ProfileCurve>), EstimateError> {
    let mut one = Vec::new();
    let mut two = Vec::new();
    for c in &decomp.components {
        let curve = profile_project(solution, c)?;
        if curve.is_empty() {
            continue;
        }
        match c.label {
            Label::Lambda1 => one.push(curve),
            Label::Lambda2 => two.push(curve),
        }
    }
    if one.is_empty() || two.is_empty() {
        return Err(EstimateError::HypothesisViolated(
            "a label class projects to an empty profile set".into(),
        ));
    }
    Ok((one, two))
}

/// Distance between the profile projections of the two label classes must
/// not exceed twice the rectangle half-width.
pub fn check_theorem2prime(
    solution: &Solution,
    decomp: &LambdaDecomposition,
) -> Result<EstimateReport, EstimateError> {
    let (one, two) = lambda_profiles(solution, decomp)?;
    let (d, wa, wb) = set_distance_multi(&one, &two);
    Ok(EstimateReport::build(
        "theorem2prime",
        None,
        d,
        2.0 * decomp.rect.a,
        slack_allowance(solution),
        vec![wa, wb],
    ))
}

/// Same measurement with the curvature-only bound 2/H; requires the
/// rectangle half-width to exceed 1/H.
pub fn check_theorem1(
    solution: &Solution,
    decomp: &LambdaDecomposition,
) -> Result<EstimateReport, EstimateError> {
    let h = solution.mean_curvature();
    let limit = 1.0 / h;
    if decomp.rect.a <= limit {
        return Err(EstimateError::BadRectangle {
            a: decomp.rect.a,
            limit,
        });
    }
    let (one, two) = lambda_profiles(solution, decomp)?;
    let (d, wa, wb) = set_distance_multi(&one, &two);
    Ok(EstimateReport::build(
        "theorem1",
        None,
        d,
        2.0 / h,
        slack_allowance(solution),
        vec![wa, wb],
    ))
}

/// Outcome of the good-component reduction over a narrowed rectangle.
#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    /// 1-based index of the selected component in bottom-to-top order.
    pub i0: usize,
    /// Number of good components examined.
    pub total: usize,
    /// The selected component, packaged for the profile-distance checks.
    pub component: GoodComponent,
}

/// Order the good components of the narrowed rectangle bottom to top, pick
/// the first whose upper crossing arc carries the second label, and verify
/// its lower crossing arc carries the first label. The verification failing
/// would contradict the underlying argument, so it is reported as an error
/// rather than a failed check.
pub fn replay_theorem1_reduction(
    parent: &LambdaDecomposition,
    a_prime: f64,
    h: f64,
) -> Result<ReductionOutcome, EstimateError> {
    let limit = 1.0 / h;
    if a_prime <= limit {
        return Err(EstimateError::BadRectangle { a: a_prime, limit });
    }
    let comps = good_components(parent, a_prime)?;
    let total = comps.len();
    for (idx, gc) in comps.iter().enumerate() {
        let sub = &gc.decomposition;
        if sub.components[sub.gamma2].label != Label::Lambda2 {
            continue;
        }
        let i0 = idx + 1;
        if sub.components[sub.gamma1].label != Label::Lambda1 {
            return Err(EstimateError::Geometry(GeometryError::ReductionFailed(
                format!("component {i0}: lower crossing arc carries the upper label"),
            )));
        }
        return Ok(ReductionOutcome {
            i0,
            total,
            component: gc.clone(),
        });
    }
    Err(EstimateError::Geometry(GeometryError::ReductionFailed(
        "no good component has an upper crossing arc with the second label".into(),
    )))
}

/// Min and max of the discrete boundary data over [x0 - t, x0 + t], taken
/// across both boundary curves.
fn boundary_window_range(
    solution: &Solution,
    x0: f64,
    t: f64,
) -> Result<(f64, f64), EstimateError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for side in [StripSide::Lower, StripSide::Upper] {
        let trace = solution.boundary_trace(side)?;
        let (mn, mx) = window_range(&trace, x0, t)?;
        lo = lo.min(mn);
        hi = hi.max(mx);
    }
    Ok((lo, hi))
}

/// If the boundary data stays at or above `m` on the window of radius 2/H,
/// the solution on the transversal at x0 stays above m - 3/H. The report is
/// sign-normalized: measured = -min, bound = -(m - 3/H).
pub fn check_prop_min(
    solution: &Solution,
    x0: f64,
    m: f64,
) -> Result<EstimateReport, EstimateError> {
    let h = solution.mean_curvature();
    let t = 2.0 / h;
    let (data_min, _) = boundary_window_range(solution, x0, t)?;
    if data_min < m - 1.0e-9 * (1.0 + m.abs()) {
        return Err(EstimateError::HypothesisViolated(format!(
            "boundary data falls to {data_min:.6}, below the floor {m:.6}, on the window"
        )));
    }
    let tr = Transversal::new(solution, x0)?;
    let (y_min, _) = tr.min_sample();
    Ok(EstimateReport::build(
        "prop_min",
        Some(x0),
        -tr.min_value(),
        -(m - 3.0 / h),
        slack_allowance(solution),
        vec![point(x0, y_min)],
    ))
}

/// If the boundary data stays at or below `m` on the window of radius
/// 1/(2H), the solution on the transversal at x0 stays at or below m.
pub fn check_prop_max(
    solution: &Solution,
    x0: f64,
    m: f64,
) -> Result<EstimateReport, EstimateError> {
    let h = solution.mean_curvature();
    let t = 1.0 / (2.0 * h);
    let (_, data_max) = boundary_window_range(solution, x0, t)?;
    if data_max > m + 1.0e-9 * (1.0 + m.abs()) {
        return Err(EstimateError::HypothesisViolated(format!(
            "boundary data reaches {data_max:.6}, above the ceiling {m:.6}, on the window"
        )));
    }
    let tr = Transversal::new(solution, x0)?;
    let (y_max, _) = tr.max_sample();
    Ok(EstimateReport::build(
        "prop_max",
        Some(x0),
        tr.max_value(),
        m,
        slack_allowance(solution),
        vec![point(x0, y_max)],
    ))
}

/// Oscillation check at a site together with its boundary-gap companion.
#[derive(Debug, Clone)]
pub struct OscillationReport {
    /// Oscillation over the transversal against 4M + 5/H, where M is the
    /// pair variation of the boundary data at window radius 2/H.
    pub oscillation: EstimateReport,
    /// |f-(x0) - f+(x0)| against 2(M + 1/H).
    pub boundary_gap: EstimateReport,
    /// The variation statistics that produced M.
    pub variation: VariationStats,
}

/// Bound the solution's oscillation on the transversal at x0 by
/// 4M + 5/H with M the pair variation at window radius 2/H, and the gap
/// between the two boundary values at x0 by 2(M + 1/H).
pub fn check_theorem3(solution: &Solution, x0: f64) -> Result<OscillationReport, EstimateError> {
    let h = solution.mean_curvature();
    let t = 2.0 / h;
    let f_minus = solution.boundary_trace(StripSide::Lower)?;
    let f_plus = solution.boundary_trace(StripSide::Upper)?;
    let stats = variation_from(&f_minus, &f_plus, x0, t)?;
    let m = stats.v_pair;
    let slack = slack_allowance(solution);

    let tr = Transversal::new(solution, x0)?;
    let (y_min, _) = tr.min_sample();
    let (y_max, _) = tr.max_sample();
    let oscillation = EstimateReport::build(
        "theorem3",
        Some(x0),
        tr.oscillation(),
        4.0 * m + 5.0 / h,
        slack,
        vec![point(x0, y_min), point(x0, y_max)],
    );

    let gap = (f_minus.eval(x0) - f_plus.eval(x0)).abs();
    let boundary_gap = EstimateReport::build(
        "theorem3_gap",
        Some(x0),
        gap,
        2.0 * (m + 1.0 / h),
        slack,
        vec![point(x0, f_minus.eval(x0)), point(x0, f_plus.eval(x0))],
    );
    Ok(OscillationReport {
        oscillation,
        boundary_gap,
        variation: stats,
    })
}

/// On the transversal at x0, the solution deviates from either boundary
/// value at x0 by at most 4M + 5/H.
pub fn check_corollary(solution: &Solution, x0: f64) -> Result<EstimateReport, EstimateError> {
    let h = solution.mean_curvature();
    let t = 2.0 / h;
    let f_minus = solution.boundary_trace(StripSide::Lower)?;
    let f_plus = solution.boundary_trace(StripSide::Upper)?;
    let stats = variation_from(&f_minus, &f_plus, x0, t)?;
    let m = stats.v_pair;

    let tr = Transversal::new(solution, x0)?;
    let mut measured = f64::NEG_INFINITY;
    let mut witness = tr.segment().0;
    for &(y, u) in tr.samples() {
        for anchor in [f_minus.eval(x0), f_plus.eval(x0)] {
            let dev = (u - anchor).abs();
            if dev > measured {
                measured = dev;
                witness = point(x0, y);
            }
        }
    }
    Ok(EstimateReport::build(
        "corollary",
        Some(x0),
        measured,
        4.0 * m + 5.0 / h,
        slack_allowance(solution),
        vec![witness],
    ))
}

/// Global bounds: the solution never exceeds its boundary maximum, and
/// never drops more than 1/H below its boundary minimum. Returns the
/// (upper, lower) reports, the lower one sign-normalized.
pub fn check_classical_bounds(solution: &Solution) -> (EstimateReport, EstimateReport) {
    let h = solution.mean_curvature();
    let (boundary_min, boundary_max) = solution.boundary_min_max();
    let slack = slack_allowance(solution);
    let verts = solution.mesh().vertices();
    let u = solution.values();
    let mut arg_max = 0;
    let mut arg_min = 0;
    for k in 1..u.len() {
        if u[k] > u[arg_max] {
            arg_max = k;
        }
        if u[k] < u[arg_min] {
            arg_min = k;
        }
    }
    let upper = EstimateReport::build(
        "classical_max",
        None,
        solution.max_value(),
        boundary_max,
        slack,
        vec![verts[arg_max]],
    );
    let lower = EstimateReport::build(
        "classical_min",
        None,
        -solution.min_value(),
        -(boundary_min - 1.0 / h),
        slack,
        vec![verts[arg_min]],
    );
    (upper, lower)
}
