//! End-to-end runs: solve a Dirichlet problem on a real mesh, then push the
//! solution through every estimate and barrier check. Against the analytic
//! references the measured values are known, so these tests pin the whole
//! pipeline rather than single modules.

use std::sync::Arc;

use cmc_core::barrier::{cylinder_descent_bound, first_contact, Barrier};
use cmc_core::estimates::{
    check_classical_bounds, check_corollary, check_prop_max, check_prop_min, check_theorem1,
    check_theorem2prime, check_theorem3, replay_theorem1_reduction, slack_allowance, Transversal,
};
use cmc_core::geometry::{
    build_generalized_strip, clip_decompose, point, PiecewiseLinearFn, Rectangle,
};
use cmc_core::mesh::{generate_disk_mesh, generate_strip_mesh};
use cmc_core::solver::{
    exact_cap, exact_cylinder, solve_dirichlet, BoundaryData, CapSpec, DirichletProblem,
    Solution, SolverOptions,
};
use cmc_core::synthetic::{random_strip, StripConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Zero data on both walls, the translation-invariant profile on the caps,
/// so the discrete solution approximates the y-only reference everywhere.
fn solve_flat_strip(
    half_width: f64,
    x_len: f64,
    nx: usize,
    ny: usize,
    h: f64,
) -> Solution {
    let domain = build_generalized_strip(
        PiecewiseLinearFn::constant(0.0, x_len, -half_width),
        PiecewiseLinearFn::constant(0.0, x_len, half_width),
        (0.0, x_len),
        false,
    )
    .unwrap();
    let mesh = generate_strip_mesh(&domain, nx, ny).unwrap();
    let exact = exact_cylinder(h, half_width).unwrap();
    let cap_pts: Vec<(f64, f64)> = (0..=ny)
        .map(|j| {
            let y = -half_width + 2.0 * half_width * (j as f64 / ny as f64);
            (y, exact.eval(y))
        })
        .collect();
    let cap = CapSpec::Values(PiecewiseLinearFn::new(cap_pts).unwrap());
    let zero = PiecewiseLinearFn::constant(0.0, x_len, 0.0);
    let data = BoundaryData::strip(zero.clone(), zero, cap.clone(), cap);
    let problem = DirichletProblem::new(Arc::new(mesh), &data, h).unwrap();
    solve_dirichlet(&problem, &SolverOptions::default()).unwrap()
}

/// Full battery on the flat-strip reference: transversal values, window
/// floor/ceiling, oscillation, deviation, classical bounds, and the
/// rolling-cylinder sweep, all at once.
#[test]
fn cylinder_reference_passes_every_check() {
    let h = 1.0;
    let w = 0.4;
    let solution = solve_flat_strip(w, 4.0, 80, 32, h);
    let exact = exact_cylinder(h, w).unwrap();

    let mut linf: f64 = 0.0;
    for (v, &u) in solution.mesh().vertices().iter().zip(solution.values()) {
        linf = linf.max((u - exact.eval(v.y)).abs());
    }
    assert!(linf <= 5.0e-3, "L-infinity error {linf}");

    let x0 = 2.0;
    let tr = Transversal::new(&solution, x0).unwrap();
    assert!((tr.min_value() - exact.midline_value()).abs() <= 5.0e-3);
    assert!(tr.max_value().abs() <= 1.0e-12, "endpoints carry the data");

    for report in [
        check_prop_min(&solution, x0, 0.0).unwrap(),
        check_prop_max(&solution, x0, 0.0).unwrap(),
        check_corollary(&solution, x0).unwrap(),
    ] {
        assert!(report.pass, "{} failed", report.name);
        assert!(report.is_consistent());
    }
    let osc = check_theorem3(&solution, x0).unwrap();
    assert!(osc.oscillation.pass && osc.boundary_gap.pass);
    assert!((osc.oscillation.measured - 0.2).abs() <= 5.0e-3);
    assert!(osc.variation.v_pair.abs() <= 1.0e-12);

    let (upper, lower) = check_classical_bounds(&solution);
    assert!(upper.pass && lower.pass);

    let descent = cylinder_descent_bound(&solution, x0, 0.0).unwrap();
    assert!(descent.pass, "descent bound violated");
    let contact = descent.contact.expect("cylinder must reach the graph");
    // The graph dips to -0.2, so the rolling cylinder of radius 0.5 stops
    // with its axis below the 0.5 line but above the bound - tolerance.
    assert!(contact.parameter <= descent.bound + descent.tolerance);
    assert!(contact.parameter > 0.0);
}

/// The spherical-cap reference: nodal error, center value, classical
/// bounds, and tangency with the concentric sphere from above.
#[test]
fn cap_reference_passes_every_check() {
    let h = 1.0;
    let radius = 0.5;
    let mesh = generate_disk_mesh(radius, 20);
    let h_max = mesh.h_max();
    let data = BoundaryData::disk_constant(0.0);
    let problem = DirichletProblem::new(Arc::new(mesh), &data, h).unwrap();
    let solution = solve_dirichlet(&problem, &SolverOptions::default()).unwrap();
    let exact = exact_cap(h, radius).unwrap();

    let mut linf: f64 = 0.0;
    for (v, &u) in solution.mesh().vertices().iter().zip(solution.values()) {
        linf = linf.max((u - exact.eval(*v)).abs());
    }
    assert!(linf <= 5.0e-3, "L-infinity error {linf}");
    let center = solution.interpolate(point(0.0, 0.0)).unwrap();
    assert!((center - exact.center_value()).abs() <= 5.0e-3);

    let (upper, lower) = check_classical_bounds(&solution);
    assert!(upper.pass && lower.pass);
    // The graph is a unit-sphere cap below z = sqrt(1 - R^2); a concentric
    // unit sphere descending from above must first touch near tangency.
    let z_tangent = (1.0 - radius * radius).sqrt();
    let barrier = Barrier::SphereDescending {
        radius: 1.0 / h,
        x_center: 0.0,
        y_center: 0.0,
    };
    let contact = first_contact(&solution, &barrier, (4.0, 0.0)).unwrap();
    assert!(contact.parameter >= z_tangent - 1.0e-9);
    assert!(contact.parameter <= z_tangent + 2.0 * h_max * h_max);
}

/// Randomized strips: every applicable check must pass on every converged
/// solution; the profile distance stays within both the curvature bound
/// and the rectangle bound; the narrowed reduction replays cleanly.
#[test]
fn random_strips_pass_the_whole_estimate_suite() {
    let h = 1.0;
    let cfg = StripConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0_0D1E);
    for trial in 0..8 {
        let strip = random_strip(&cfg, &mut rng);
        let mesh = generate_strip_mesh(&strip.domain, cfg.nx, 12).unwrap();
        let problem = DirichletProblem::new(Arc::new(mesh), &strip.data, h).unwrap();
        let solution = solve_dirichlet(&problem, &SolverOptions::default())
            .unwrap_or_else(|e| panic!("trial {trial}: solve failed: {e}"));
        assert!(solution.final_gradient_norm() <= 1.0e-9, "must be converged");
        assert!(slack_allowance(&solution) < 2.0, "slack must stay small");

        let (upper, lower) = check_classical_bounds(&solution);
        assert!(upper.pass, "trial {trial}: interior max above boundary max");
        assert!(lower.pass, "trial {trial}: interior min below the drop bound");

        let region = strip.domain.to_region();
        let rect = Rectangle::new(point(4.0, 0.0), 1.5 / h, 1.0);
        let decomp = clip_decompose(&region, rect)
            .unwrap_or_else(|e| panic!("trial {trial}: decomposition failed: {e}"));
        let t1 = check_theorem1(&solution, &decomp).unwrap();
        assert!(t1.pass, "trial {trial}: profile distance {}", t1.measured);
        let t2 = check_theorem2prime(&solution, &decomp).unwrap();
        assert!(t2.pass, "trial {trial}");
        assert!(t1.measured <= 2.0 / h + 1.0e-12, "distance exceeds 2/H");

        let outcome = replay_theorem1_reduction(&decomp, 1.2 / h, h).unwrap();
        assert_eq!(outcome.i0, 1, "a strip has a single channel");
        assert_eq!(outcome.total, 1);

        for x0 in [2.5, 4.0, 5.5] {
            let osc = check_theorem3(&solution, x0).unwrap();
            assert!(osc.oscillation.pass, "trial {trial}, x0 = {x0}");
            assert!(osc.boundary_gap.pass, "trial {trial}, x0 = {x0}");
            let cor = check_corollary(&solution, x0).unwrap();
            assert!(cor.pass, "trial {trial}, x0 = {x0}");
        }
    }
}
