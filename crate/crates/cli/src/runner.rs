//! Scenario runners: build the problem from a config, solve, run the
//! checks, and emit the artifact files.

use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use cmc_core::barrier::cylinder_descent_bound;
use cmc_core::estimates::{
    check_classical_bounds, check_corollary, check_prop_max, check_prop_min, check_theorem1,
    check_theorem2prime, check_theorem3, replay_theorem1_reduction, slack_allowance, Transversal,
};
use cmc_core::geometry::{
    build_generalized_strip, clip_decompose, point, profile_project, Label, PiecewiseLinearFn,
    PlanarDomain, Rectangle,
};
use cmc_core::mesh::{generate_disk_mesh, generate_strip_mesh, TriangleMesh};
use cmc_core::solver::{
    exact_cap, exact_cylinder, solve_dirichlet, BoundaryData, CapSpec, DirichletProblem, Solution,
    SolverError, StripSide,
};
use cmc_core::synthetic::{random_strip, StripConfig};

use crate::config::{
    CapSection, ConvergenceConfig, PlTable, UniquenessConfig, VerifyConfig,
};
use crate::output::{convergence_plot, divergence_plot, emit_outputs, LinePlot};
use crate::record::{CheckRow, DivergenceRow, LevelRow, RunRecord, SolveInfo};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Verify,
    Uniqueness,
    Convergence,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Verify => "verify",
            Scenario::Uniqueness => "uniqueness",
            Scenario::Convergence => "convergence",
        }
    }
}

/// Load the config for `scenario`, run it, and write the artifacts.
pub fn execute(
    scenario: Scenario,
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<RunRecord, CliError> {
    let bytes = std::fs::read(config_path).map_err(|source| CliError::Io {
        path: config_path.display().to_string(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Config(format!("config is not UTF-8: {e}")))?;
    match scenario {
        Scenario::Verify => {
            let cfg = VerifyConfig::parse(text)?;
            let seed = seed_override.unwrap_or(cfg.seed);
            run_verify(&cfg, out_dir, seed, config_hash(&bytes, seed))
        }
        Scenario::Uniqueness => {
            let cfg = UniquenessConfig::parse(text)?;
            let seed = seed_override.unwrap_or(cfg.seed);
            run_uniqueness(&cfg, out_dir, seed, config_hash(&bytes, seed))
        }
        Scenario::Convergence => {
            let cfg = ConvergenceConfig::parse(text)?;
            let seed = seed_override.unwrap_or(cfg.seed);
            run_convergence(&cfg, out_dir, seed, config_hash(&bytes, seed))
        }
    }
}

fn config_hash(bytes: &[u8], seed: u64) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.update(seed.to_le_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn to_pl(table: &PlTable, what: &str) -> Result<PiecewiseLinearFn, CliError> {
    PiecewiseLinearFn::new(table.iter().map(|p| (p[0], p[1])).collect())
        .map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn config_err(what: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{what}: {e}"))
}

/// Abort a run on a solver error: record it, emit the minimal report, and
/// hand back the error for the exit code.
fn solver_abort(mut record: RunRecord, out_dir: &Path, e: SolverError) -> CliError {
    record.error = Some(e.to_string());
    record.manifest = vec!["report.json".to_string()];
    if let Err(io) = emit_outputs(out_dir, &record, None) {
        return io;
    }
    CliError::Solver(e)
}

/// Dirichlet cap values: the named rules or an explicit table.
fn resolve_cap(
    section: &CapSection,
    domain: &PlanarDomain,
    data_minus: &PiecewiseLinearFn,
    data_plus: &PiecewiseLinearFn,
    h: f64,
    ny: usize,
    end_x: f64,
    what: &str,
) -> Result<CapSpec, CliError> {
    match section {
        CapSection::Named(name) if name == "linear" => Ok(CapSpec::Linear),
        CapSection::Named(name) if name == "profile" => {
            let lo = domain.b_minus().eval(end_x);
            let hi = domain.b_plus().eval(end_x);
            let w = 0.5 * (hi - lo);
            if (hi + lo).abs() > 1.0e-9 {
                return Err(CliError::Config(format!(
                    "{what}: the profile rule needs a strip symmetric about y = 0 at x = {end_x}"
                )));
            }
            if data_minus.eval(end_x).abs() > 1.0e-9 || data_plus.eval(end_x).abs() > 1.0e-9 {
                return Err(CliError::Config(format!(
                    "{what}: the profile rule needs zero wall data at x = {end_x}"
                )));
            }
            let profile = exact_cylinder(h, w).map_err(|e| config_err(what, e))?;
            let pts: Vec<(f64, f64)> = (0..=ny)
                .map(|j| {
                    let y = -w + 2.0 * w * (j as f64 / ny as f64);
                    (y, profile.eval(y))
                })
                .collect();
            Ok(CapSpec::Values(
                PiecewiseLinearFn::new(pts).map_err(|e| config_err(what, e))?,
            ))
        }
        CapSection::Named(name) => Err(CliError::Config(format!(
            "{what}: unknown cap rule \"{name}\"; expected \"linear\", \"profile\", or a table"
        ))),
        CapSection::Table(table) => Ok(CapSpec::Values(to_pl(table, what)?)),
    }
}

/// Boundary-data extrema over the window [x0 - r, x0 + r], both curves.
fn window_extrema(solution: &Solution, x0: f64, r: f64) -> Result<(f64, f64), CliError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for side in [StripSide::Lower, StripSide::Upper] {
        let trace = solution
            .boundary_trace(side)
            .map_err(|e| config_err("boundary trace", e))?;
        let (mn, mx) = trace
            .min_max_on(x0 - r, x0 + r)
            .map_err(|e| config_err("window", e))?;
        lo = lo.min(mn);
        hi = hi.max(mx);
    }
    Ok((lo, hi))
}

/// The per-site check battery shared by the main and randomized solves.
fn site_checks(
    solution: &Solution,
    x0: f64,
    suffix: &str,
    rows: &mut Vec<CheckRow>,
) -> Result<(), CliError> {
    let h = solution.mean_curvature();
    // The floor check reads the data over radius 2/H, the ceiling check
    // over 1/(2H); feed each the extremum of its own window.
    let (m_lo, _) = window_extrema(solution, x0, 2.0 / h)?;
    let (_, m_hi) = window_extrema(solution, x0, 0.5 / h)?;
    let prop_min =
        check_prop_min(solution, x0, m_lo).map_err(|e| config_err("window floor", e))?;
    rows.push(CheckRow::from_report(&prop_min, suffix));
    let prop_max =
        check_prop_max(solution, x0, m_hi).map_err(|e| config_err("window ceiling", e))?;
    rows.push(CheckRow::from_report(&prop_max, suffix));
    let osc = check_theorem3(solution, x0).map_err(|e| config_err("oscillation", e))?;
    rows.push(CheckRow::from_report(&osc.oscillation, suffix));
    rows.push(CheckRow::from_report(&osc.boundary_gap, suffix));
    let cor = check_corollary(solution, x0).map_err(|e| config_err("deviation", e))?;
    rows.push(CheckRow::from_report(&cor, suffix));
    Ok(())
}

pub fn run_verify(
    cfg: &VerifyConfig,
    out_dir: &Path,
    seed: u64,
    hash: String,
) -> Result<RunRecord, CliError> {
    let mut record = RunRecord::new("verify", hash, seed);
    let opts = cfg.solver.to_options();
    let (xl, xr) = (cfg.domain.x_range[0], cfg.domain.x_range[1]);

    let domain = build_generalized_strip(
        to_pl(&cfg.domain.lower, "domain.lower")?,
        to_pl(&cfg.domain.upper, "domain.upper")?,
        (xl, xr),
        false,
    )
    .map_err(|e| config_err("domain", e))?;
    let mesh = generate_strip_mesh(&domain, cfg.mesh.nx, cfg.mesh.ny)
        .map_err(|e| config_err("mesh", e))?;

    let f_minus = to_pl(&cfg.data.lower, "data.lower")?;
    let f_plus = to_pl(&cfg.data.upper, "data.upper")?;
    let left = resolve_cap(
        &cfg.data.left_cap, &domain, &f_minus, &f_plus, cfg.h, cfg.mesh.ny, xl, "data.left_cap",
    )?;
    let right = resolve_cap(
        &cfg.data.right_cap, &domain, &f_minus, &f_plus, cfg.h, cfg.mesh.ny, xr, "data.right_cap",
    )?;
    let data = BoundaryData::strip(f_minus.clone(), f_plus.clone(), left, right);
    let problem = DirichletProblem::new(Arc::new(mesh), &data, cfg.h)
        .map_err(|e| config_err("problem", e))?;

    let solution = match solve_dirichlet(&problem, &opts) {
        Ok(s) => s,
        Err(e) => return Err(solver_abort(record, out_dir, e)),
    };
    record.solves.push(SolveInfo::new("main", &solution));

    let (upper, lower) = check_classical_bounds(&solution);
    record.checks.push(CheckRow::from_report(&upper, ""));
    record.checks.push(CheckRow::from_report(&lower, ""));

    if let Some(oracle) = &cfg.oracle {
        let w_lo = domain.b_minus().min_max_on_domain();
        let w_hi = domain.b_plus().min_max_on_domain();
        if (w_lo.1 - w_lo.0).abs() > 1.0e-12
            || (w_hi.1 - w_hi.0).abs() > 1.0e-12
            || (w_lo.0 + w_hi.0).abs() > 1.0e-12
        {
            return Err(CliError::Config(
                "the cylinder reference needs a flat strip symmetric about y = 0".into(),
            ));
        }
        let exact = exact_cylinder(cfg.h, w_hi.0).map_err(|e| config_err("reference", e))?;
        let mut linf: f64 = 0.0;
        let mut witness = (0.0, 0.0);
        for (v, &u) in solution.mesh().vertices().iter().zip(solution.values()) {
            let err = (u - exact.eval(v.y)).abs();
            if err > linf {
                linf = err;
                witness = (v.x, v.y);
            }
        }
        record.checks.push(CheckRow {
            name: "oracle_linf".into(),
            x0: None,
            measured: linf,
            bound: oracle.tolerance,
            slack: 0.0,
            pass: linf <= oracle.tolerance,
            witnesses: vec![witness],
        });
        let mid_x = 0.5 * (xl + xr);
        let mid = solution
            .interpolate(point(mid_x, 0.0))
            .map_err(|e| config_err("midline", e))?;
        let mid_err = (mid - exact.midline_value()).abs();
        record.checks.push(CheckRow {
            name: "oracle_midline".into(),
            x0: Some(mid_x),
            measured: mid_err,
            bound: oracle.tolerance,
            slack: 0.0,
            pass: mid_err <= oracle.tolerance,
            witnesses: vec![(mid_x, 0.0)],
        });
    }

    let mut profile_plot: Option<LinePlot> = None;
    if let Some(rect_cfg) = &cfg.rect {
        let rect = Rectangle::new(
            point(rect_cfg.center[0], rect_cfg.center[1]),
            rect_cfg.a,
            rect_cfg.b,
        );
        let decomp = clip_decompose(&domain.to_region(), rect)
            .map_err(|e| config_err("rect decomposition", e))?;
        if rect_cfg.a > 1.0 / cfg.h {
            let t1 = check_theorem1(&solution, &decomp)
                .map_err(|e| config_err("profile distance", e))?;
            record.checks.push(CheckRow::from_report(&t1, ""));
        } else {
            record.notes.push(format!(
                "rect half-width {} does not exceed 1/H = {}; curvature-only distance check skipped",
                rect_cfg.a,
                1.0 / cfg.h
            ));
        }
        let t2 = check_theorem2prime(&solution, &decomp)
            .map_err(|e| config_err("profile distance", e))?;
        record.checks.push(CheckRow::from_report(&t2, ""));

        if let Some(a_prime) = rect_cfg.a_prime {
            let outcome = replay_theorem1_reduction(&decomp, a_prime, cfg.h)
                .map_err(|e| config_err("reduction replay", e))?;
            record.notes.push(format!(
                "reduction replay over half-width {a_prime}: selected channel {} of {}",
                outcome.i0, outcome.total
            ));
        }

        let mut plot = LinePlot::new(
            "Boundary pieces in the profile plane",
            "transversal coordinate",
            "height",
        );
        for (k, comp) in decomp.components.iter().enumerate() {
            let curve = profile_project(&solution, comp)
                .map_err(|e| config_err("profile projection", e))?;
            if curve.points.is_empty() {
                continue;
            }
            let class = match comp.label {
                Label::Lambda1 => "class 1",
                Label::Lambda2 => "class 2",
            };
            plot.add_curve(
                &format!("piece {k} ({class})"),
                curve.points.iter().map(|p| (p.x, p.y)).collect(),
                comp.label == Label::Lambda2,
            );
        }
        profile_plot = Some(plot);
    }

    for &x0 in &cfg.sites {
        site_checks(&solution, x0, "", &mut record.checks)?;
    }
    for &x0 in &cfg.descent_sites {
        let (_, m_hi) = window_extrema(&solution, x0, 0.5 / cfg.h)?;
        let descent = cylinder_descent_bound(&solution, x0, m_hi)
            .map_err(|e| config_err("descent", e))?;
        let measured = descent
            .contact
            .as_ref()
            .map(|c| c.parameter)
            .unwrap_or(descent.bound);
        let witnesses = descent
            .contact
            .as_ref()
            .map(|c| vec![(c.point.x, c.point.y)])
            .unwrap_or_default();
        record.checks.push(CheckRow {
            name: "descent".into(),
            x0: Some(x0),
            measured,
            bound: descent.bound,
            slack: descent.tolerance,
            pass: descent.pass,
            witnesses,
        });
    }

    if let Some(rand_cfg) = &cfg.randomized {
        let strip_cfg = StripConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..rand_cfg.count {
            let suffix = format!("/r{k:02}");
            let strip = random_strip(&strip_cfg, &mut rng);
            let mesh = generate_strip_mesh(&strip.domain, strip_cfg.nx, rand_cfg.ny)
                .map_err(|e| config_err("random mesh", e))?;
            let problem = DirichletProblem::new(Arc::new(mesh), &strip.data, cfg.h)
                .map_err(|e| config_err("random problem", e))?;
            let solution = match solve_dirichlet(&problem, &opts) {
                Ok(s) => s,
                Err(e) => return Err(solver_abort(record, out_dir, e)),
            };
            record
                .solves
                .push(SolveInfo::new(&format!("r{k:02}"), &solution));

            let (upper, lower) = check_classical_bounds(&solution);
            record.checks.push(CheckRow::from_report(&upper, &suffix));
            record.checks.push(CheckRow::from_report(&lower, &suffix));

            let (sxl, sxr) = strip.domain.x_range();
            let rect = Rectangle::new(point(0.5 * (sxl + sxr), 0.0), 1.5 / cfg.h, 1.0);
            let decomp = clip_decompose(&strip.domain.to_region(), rect)
                .map_err(|e| config_err("random decomposition", e))?;
            let t1 = check_theorem1(&solution, &decomp)
                .map_err(|e| config_err("profile distance", e))?;
            record.checks.push(CheckRow::from_report(&t1, &suffix));
            let t2 = check_theorem2prime(&solution, &decomp)
                .map_err(|e| config_err("profile distance", e))?;
            record.checks.push(CheckRow::from_report(&t2, &suffix));

            for &x0 in &rand_cfg.sites {
                site_checks(&solution, x0, &suffix, &mut record.checks)?;
            }
        }
    }

    let svg = match profile_plot {
        Some(plot) => plot.render(),
        None => {
            let mut plot = LinePlot::new(
                "Boundary data and solution midline",
                "x",
                "height",
            );
            plot.add_curve(
                "lower data",
                f_minus.breakpoints().to_vec(),
                false,
            );
            plot.add_curve("upper data", f_plus.breakpoints().to_vec(), true);
            let mut midline = Vec::with_capacity(cfg.mesh.nx + 1);
            for i in 0..=cfg.mesh.nx {
                let x = xl + (xr - xl) * (i as f64 / cfg.mesh.nx as f64);
                let y = 0.5 * (domain.b_minus().eval(x) + domain.b_plus().eval(x));
                let u = solution
                    .interpolate(point(x, y))
                    .map_err(|e| config_err("midline", e))?;
                midline.push((x, u));
            }
            plot.add_curve("solution midline", midline, false);
            plot.render()
        }
    };

    record.manifest = vec![
        "checks.csv".to_string(),
        "plots.svg".to_string(),
        "report.json".to_string(),
    ];
    emit_outputs(out_dir, &record, Some(svg))?;
    Ok(record)
}

pub fn run_uniqueness(
    cfg: &UniquenessConfig,
    out_dir: &Path,
    seed: u64,
    hash: String,
) -> Result<RunRecord, CliError> {
    let mut record = RunRecord::new("uniqueness", hash, seed);
    let opts = cfg.solver.to_options();
    let w = cfg.half_width;

    // d_at[len_idx][site_idx] and the paired solve slacks per length.
    let mut d_at: Vec<Vec<f64>> = Vec::new();
    let mut slack_of: Vec<f64> = Vec::new();

    for &len in &cfg.lengths {
        let domain = build_generalized_strip(
            PiecewiseLinearFn::constant(0.0, len, -w),
            PiecewiseLinearFn::constant(0.0, len, w),
            (0.0, len),
            false,
        )
        .map_err(|e| config_err("domain", e))?;
        let nx = ((len * cfg.nx_per_unit as f64).round() as usize).max(4);
        let mesh = Arc::new(
            generate_strip_mesh(&domain, nx, cfg.ny).map_err(|e| config_err("mesh", e))?,
        );
        let zero = PiecewiseLinearFn::constant(0.0, len, 0.0);
        let base_data = BoundaryData::strip(
            zero.clone(),
            zero.clone(),
            CapSpec::Linear,
            CapSpec::Linear,
        );
        // Tent profile on the far cap: zero at the corners (continuity with
        // the wall data), delta at the midline.
        let tent = PiecewiseLinearFn::new(vec![(-w, 0.0), (0.0, cfg.delta), (w, 0.0)])
            .map_err(|e| config_err("perturbation", e))?;
        let perturbed_data = BoundaryData::strip(
            zero.clone(),
            zero.clone(),
            CapSpec::Linear,
            CapSpec::Values(tent),
        );
        let solve = |data: &BoundaryData| -> Result<Solution, CliError> {
            let problem = DirichletProblem::new(Arc::clone(&mesh), data, cfg.h)
                .map_err(|e| config_err("problem", e))?;
            solve_dirichlet(&problem, &opts).map_err(CliError::Solver)
        };
        let (u1, u2) = match solve(&base_data).and_then(|u1| Ok((u1, solve(&perturbed_data)?))) {
            Ok(pair) => pair,
            Err(CliError::Solver(e)) => return Err(solver_abort(record, out_dir, e)),
            Err(other) => return Err(other),
        };
        record
            .solves
            .push(SolveInfo::new(&format!("L{len}/base"), &u1));
        record
            .solves
            .push(SolveInfo::new(&format!("L{len}/perturbed"), &u2));
        let slack = slack_allowance(&u1) + slack_allowance(&u2);
        slack_of.push(slack);

        let mut d_row = Vec::with_capacity(cfg.sites.len());
        for &x in &cfg.sites {
            let mut d: f64 = 0.0;
            for (sol_a, sol_b) in [(&u1, &u2), (&u2, &u1)] {
                let tr = Transversal::new(sol_a, x).map_err(|e| config_err("transversal", e))?;
                for &(y, va) in tr.samples() {
                    let vb = sol_b
                        .interpolate(point(x, y))
                        .map_err(|e| config_err("difference", e))?;
                    d = d.max((va - vb).abs());
                }
            }
            d_row.push(d);
            record.divergence.push(DivergenceRow {
                length: len,
                x,
                difference: d,
                ratio: d / (2.0 + x).ln(),
            });
        }
        d_at.push(d_row);
    }

    for (li, &len) in cfg.lengths.iter().enumerate() {
        for si in 1..cfg.sites.len() {
            let (d_lo, d_hi) = (d_at[li][si - 1], d_at[li][si]);
            record.checks.push(CheckRow {
                name: format!("monotone_L{len}"),
                x0: Some(cfg.sites[si]),
                measured: d_lo - d_hi,
                bound: 0.0,
                slack: slack_of[li],
                pass: d_lo - d_hi <= slack_of[li],
                witnesses: vec![(cfg.sites[si - 1], d_lo), (cfg.sites[si], d_hi)],
            });
        }
    }

    let ref_idx = cfg
        .sites
        .iter()
        .position(|&s| s == cfg.reference_site)
        .expect("validated");
    for li in 1..cfg.lengths.len() {
        let (d_prev, d_next) = (d_at[li - 1][ref_idx], d_at[li][ref_idx]);
        record.checks.push(CheckRow {
            name: "shrinks_with_length".into(),
            x0: Some(cfg.reference_site),
            measured: d_next - d_prev,
            bound: 0.0,
            slack: 0.0,
            pass: d_next - d_prev <= 0.0,
            witnesses: vec![(cfg.lengths[li - 1], d_prev), (cfg.lengths[li], d_next)],
        });
    }

    if cfg.delta == 0.0 {
        for (li, &len) in cfg.lengths.iter().enumerate() {
            let worst = d_at[li].iter().cloned().fold(0.0, f64::max);
            record.checks.push(CheckRow {
                name: format!("identical_data_L{len}"),
                x0: None,
                measured: worst,
                bound: 2.0 * opts.grad_tol,
                slack: 0.0,
                pass: worst <= 2.0 * opts.grad_tol,
                witnesses: vec![],
            });
        }
    }

    record.notes.push(
        "finite truncations indicate trends only; the growth conditions behind the \
         uniqueness statements are not decidable from finite runs"
            .to_string(),
    );

    let svg = divergence_plot(&record.divergence, &cfg.lengths);
    record.manifest = vec![
        "checks.csv".to_string(),
        "divergence.csv".to_string(),
        "plots.svg".to_string(),
        "report.json".to_string(),
    ];
    emit_outputs(out_dir, &record, Some(svg))?;
    Ok(record)
}

pub fn run_convergence(
    cfg: &ConvergenceConfig,
    out_dir: &Path,
    seed: u64,
    hash: String,
) -> Result<RunRecord, CliError> {
    let mut record = RunRecord::new("convergence", hash, seed);
    let opts = cfg.solver.to_options();

    // (resolution label, mesh, data, error evaluator) per level.
    let mut errors: Vec<f64> = Vec::new();
    let mut value_check: Option<CheckRow> = None;

    for level in 0..cfg.levels {
        let (mesh, data, resolution): (TriangleMesh, BoundaryData, String) =
            match cfg.oracle.as_str() {
                "cap" => {
                    let rings = cfg.base_rings.expect("validated") << level;
                    let mesh = generate_disk_mesh(cfg.radius.expect("validated"), rings);
                    (mesh, BoundaryData::disk_constant(0.0), format!("rings {rings}"))
                }
                _ => {
                    let nx = cfg.base_nx.expect("validated") << level;
                    let ny = cfg.base_ny.expect("validated") << level;
                    let [xl, xr] = cfg.x_range.expect("validated");
                    let w = cfg.half_width.expect("validated");
                    let domain = build_generalized_strip(
                        PiecewiseLinearFn::constant(xl, xr, -w),
                        PiecewiseLinearFn::constant(xl, xr, w),
                        (xl, xr),
                        false,
                    )
                    .map_err(|e| config_err("domain", e))?;
                    let mesh = generate_strip_mesh(&domain, nx, ny)
                        .map_err(|e| config_err("mesh", e))?;
                    let profile = exact_cylinder(cfg.h, w).map_err(|e| config_err("reference", e))?;
                    let pts: Vec<(f64, f64)> = (0..=ny)
                        .map(|j| {
                            let y = -w + 2.0 * w * (j as f64 / ny as f64);
                            (y, profile.eval(y))
                        })
                        .collect();
                    let cap = CapSpec::Values(
                        PiecewiseLinearFn::new(pts).map_err(|e| config_err("reference", e))?,
                    );
                    let zero = PiecewiseLinearFn::constant(xl, xr, 0.0);
                    (
                        mesh,
                        BoundaryData::strip(zero.clone(), zero, cap.clone(), cap),
                        format!("nx {nx} ny {ny}"),
                    )
                }
            };
        let h_max = mesh.h_max();
        let problem = DirichletProblem::new(Arc::new(mesh), &data, cfg.h)
            .map_err(|e| config_err("problem", e))?;
        let solution = match solve_dirichlet(&problem, &opts) {
            Ok(s) => s,
            Err(e) => return Err(solver_abort(record, out_dir, e)),
        };
        record
            .solves
            .push(SolveInfo::new(&format!("level{level}"), &solution));

        let error = match cfg.oracle.as_str() {
            "cap" => {
                let exact = exact_cap(cfg.h, cfg.radius.expect("validated"))
                    .map_err(|e| config_err("reference", e))?;
                let mut linf: f64 = 0.0;
                for (v, &u) in solution.mesh().vertices().iter().zip(solution.values()) {
                    linf = linf.max((u - exact.eval(*v)).abs());
                }
                if level + 1 == cfg.levels {
                    let center = solution
                        .interpolate(point(0.0, 0.0))
                        .map_err(|e| config_err("center", e))?;
                    let err = (center - exact.center_value()).abs();
                    value_check = Some(CheckRow {
                        name: "center_error".into(),
                        x0: None,
                        measured: err,
                        bound: cfg.max_error,
                        slack: 0.0,
                        pass: err <= cfg.max_error,
                        witnesses: vec![(0.0, 0.0)],
                    });
                }
                linf
            }
            _ => {
                let w = cfg.half_width.expect("validated");
                let exact = exact_cylinder(cfg.h, w).map_err(|e| config_err("reference", e))?;
                let mut linf: f64 = 0.0;
                for (v, &u) in solution.mesh().vertices().iter().zip(solution.values()) {
                    linf = linf.max((u - exact.eval(v.y)).abs());
                }
                if level + 1 == cfg.levels {
                    let [xl, xr] = cfg.x_range.expect("validated");
                    let mid_x = 0.5 * (xl + xr);
                    let mid = solution
                        .interpolate(point(mid_x, 0.0))
                        .map_err(|e| config_err("midline", e))?;
                    let err = (mid - exact.midline_value()).abs();
                    value_check = Some(CheckRow {
                        name: "midline_error".into(),
                        x0: Some(mid_x),
                        measured: err,
                        bound: cfg.max_error,
                        slack: 0.0,
                        pass: err <= cfg.max_error,
                        witnesses: vec![(mid_x, 0.0)],
                    });
                }
                linf
            }
        };
        let order = if level > 0 {
            Some((errors[level - 1] / error).log2())
        } else {
            None
        };
        record.levels.push(LevelRow {
            level,
            resolution,
            h_max,
            error,
            order,
        });
        errors.push(error);
    }

    for level in 1..cfg.levels {
        record.checks.push(CheckRow {
            name: format!("error_decreases_level{level}"),
            x0: None,
            measured: errors[level],
            bound: errors[level - 1],
            slack: 0.0,
            pass: errors[level] <= errors[level - 1],
            witnesses: vec![],
        });
    }
    let final_error = *errors.last().expect("levels >= 3");
    record.checks.push(CheckRow {
        name: "final_error".into(),
        x0: None,
        measured: final_error,
        bound: cfg.max_error,
        slack: 0.0,
        pass: final_error <= cfg.max_error,
        witnesses: vec![],
    });
    // Sign-normalized so that pass means observed order >= min_order.
    let observed = record.levels.last().and_then(|l| l.order).expect("levels >= 3");
    record.checks.push(CheckRow {
        name: "convergence_order".into(),
        x0: None,
        measured: -observed,
        bound: -cfg.min_order,
        slack: 0.0,
        pass: -observed <= -cfg.min_order,
        witnesses: vec![],
    });
    if let Some(row) = value_check {
        record.checks.push(row);
    }

    let svg = convergence_plot(&record.levels);
    record.manifest = vec![
        "checks.csv".to_string(),
        "plots.svg".to_string(),
        "report.json".to_string(),
    ];
    emit_outputs(out_dir, &record, Some(svg))?;
    Ok(record)
}
