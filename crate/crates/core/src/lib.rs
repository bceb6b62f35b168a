//! Numerical workbench for constant-mean-curvature (CMC) graphs over planar
//! strip-like domains.
//!
//! The crate solves the Dirichlet problem for the CMC equation
//! `div(grad u / sqrt(1 + |grad u|^2)) = 2H` with `H > 0` by minimizing the
//! associated convex energy over a piecewise-linear finite element space, and
//! then measures geometric height/oscillation bounds on the discrete solution:
//! profile-projection distances between the two sides of the boundary,
//! transversal oscillation bounds, and classical barrier comparisons with
//! spheres and cylinders.
//!
//! Modules:
//! - [`geometry`]: planar domains, rectangle clipping, boundary decomposition,
//!   path traces and the interval-order machinery, profile projection.
//! - [`mesh`]: structured strip and concentric disk triangulations.
//! - [`solver`]: energy assembly, damped Newton solve, analytic oracles.
//! - [`barrier`]: sphere/cylinder sweeps against solution graphs.
//! - [`estimates`]: the distance/height/oscillation checks with slack policy.
//! - [`synthetic`]: randomized domain and data builders used by the
//!   verification suites.

pub mod barrier;
pub mod estimates;
pub mod geometry;
pub mod mesh;
pub mod solver;
pub mod synthetic;
