//! Scenario configuration: TOML schemas for the three subcommands, with
//! unknown keys rejected and numeric sanity checks applied after parsing.

use serde::Deserialize;

use cmc_core::solver::SolverOptions;

use crate::CliError;

/// Piecewise-linear table: a list of [x, value] pairs with increasing x.
pub type PlTable = Vec<[f64; 2]>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Must be "verify".
    pub kind: String,
    /// Mean curvature, positive.
    pub h: f64,
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainSection,
    pub data: DataSection,
    pub mesh: MeshSection,
    /// Transversal sites for the local oscillation and window checks.
    #[serde(default)]
    pub sites: Vec<f64>,
    /// Sites at which the rolling-cylinder sweep runs.
    #[serde(default)]
    pub descent_sites: Vec<f64>,
    pub rect: Option<RectSection>,
    pub randomized: Option<RandomizedSection>,
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub solver: SolverSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub x_range: [f64; 2],
    /// Lower boundary curve as a piecewise-linear table over x.
    pub lower: PlTable,
    /// Upper boundary curve.
    pub upper: PlTable,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    /// Dirichlet values on the lower curve.
    pub lower: PlTable,
    /// Dirichlet values on the upper curve.
    pub upper: PlTable,
    pub left_cap: CapSection,
    pub right_cap: CapSection,
}

/// Cap data: "linear" interpolates the two wall values, "profile" samples
/// the translation-invariant analytic profile (flat symmetric strips with
/// zero wall data only), a table gives explicit values over y.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CapSection {
    Named(String),
    Table(PlTable),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectSection {
    pub center: [f64; 2],
    /// Half-width; the curvature-only distance check needs a > 1/H.
    pub a: f64,
    /// Half-height; the closed horizontal edges must clear the domain.
    pub b: f64,
    /// Optional narrowed half-width for the channel-reduction replay.
    pub a_prime: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomizedSection {
    /// Number of random strips to draw, solve, and check.
    pub count: usize,
    #[serde(default = "default_random_sites")]
    pub sites: Vec<f64>,
    #[serde(default = "default_random_ny")]
    pub ny: usize,
}

fn default_random_sites() -> Vec<f64> {
    vec![2.5, 4.0, 5.5]
}

fn default_random_ny() -> usize {
    12
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// "cylinder" is the only analytic reference for strip runs.
    pub kind: String,
    pub tolerance: f64,
}

/// Optional solver overrides; unset fields keep the defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub grad_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub armijo_c: Option<f64>,
    pub armijo_shrink: Option<f64>,
    pub grad_cap: Option<f64>,
}

impl SolverSection {
    pub fn to_options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(v) = self.grad_tol {
            opts.grad_tol = v;
        }
        if let Some(v) = self.max_iters {
            opts.max_iters = v;
        }
        if let Some(v) = self.armijo_c {
            opts.armijo_c = v;
        }
        if let Some(v) = self.armijo_shrink {
            opts.armijo_shrink = v;
        }
        if let Some(v) = self.grad_cap {
            opts.grad_cap = v;
        }
        opts
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniquenessConfig {
    /// Must be "uniqueness".
    pub kind: String,
    pub h: f64,
    #[serde(default)]
    pub seed: u64,
    /// Strip half-width; the full width must stay below 1/H to be solvable.
    pub half_width: f64,
    /// Increasing truncation lengths; one pair of solves per length.
    pub lengths: Vec<f64>,
    /// Far-cap perturbation between the two solves of each pair.
    pub delta: f64,
    /// Sites where the pointwise difference profile is tabulated.
    pub sites: Vec<f64>,
    /// Site used for the across-lengths comparison.
    #[serde(default = "default_reference_site")]
    pub reference_site: f64,
    #[serde(default = "default_nx_per_unit")]
    pub nx_per_unit: usize,
    #[serde(default = "default_uniqueness_ny")]
    pub ny: usize,
    #[serde(default)]
    pub solver: SolverSection,
}

fn default_reference_site() -> f64 {
    1.0
}

fn default_nx_per_unit() -> usize {
    16
}

fn default_uniqueness_ny() -> usize {
    24
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// Must be "convergence".
    pub kind: String,
    pub h: f64,
    #[serde(default)]
    pub seed: u64,
    /// Analytic reference: "cap" or "cylinder".
    pub oracle: String,
    /// Number of dyadic refinements, at least 3.
    pub levels: usize,
    /// Error bound the finest level must meet.
    pub max_error: f64,
    /// Lower bound for the observed order on the last refinement pair.
    pub min_order: f64,
    // Cap parameters.
    pub radius: Option<f64>,
    pub base_rings: Option<usize>,
    // Cylinder parameters.
    pub half_width: Option<f64>,
    pub x_range: Option<[f64; 2]>,
    pub base_nx: Option<usize>,
    pub base_ny: Option<usize>,
    #[serde(default)]
    pub solver: SolverSection,
}

fn expect_kind(found: &str, expected: &str) -> Result<(), CliError> {
    if found == expected {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "config kind \"{found}\" does not match the \"{expected}\" subcommand"
        )))
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl VerifyConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: VerifyConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        expect_kind(&self.kind, "verify")?;
        check_positive("h", self.h)?;
        if !(self.domain.x_range[0] < self.domain.x_range[1]) {
            return Err(CliError::Config("domain.x_range must be increasing".into()));
        }
        if self.mesh.nx == 0 || self.mesh.ny == 0 {
            return Err(CliError::Config("mesh resolution must be at least 1x1".into()));
        }
        if let Some(rect) = &self.rect {
            check_positive("rect.a", rect.a)?;
            check_positive("rect.b", rect.b)?;
            if let Some(ap) = rect.a_prime {
                if !(ap > 0.0 && ap < rect.a) {
                    return Err(CliError::Config(format!(
                        "rect.a_prime must lie in (0, a), got {ap}"
                    )));
                }
            }
        }
        if let Some(oracle) = &self.oracle {
            if oracle.kind != "cylinder" {
                return Err(CliError::Config(format!(
                    "verify supports only the \"cylinder\" reference, got \"{}\"; \
                     the disk reference runs under the convergence subcommand",
                    oracle.kind
                )));
            }
            check_positive("oracle.tolerance", oracle.tolerance)?;
        }
        Ok(())
    }
}

impl UniquenessConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: UniquenessConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        expect_kind(&self.kind, "uniqueness")?;
        check_positive("h", self.h)?;
        check_positive("half_width", self.half_width)?;
        if self.delta < 0.0 {
            return Err(CliError::Config("delta must be nonnegative".into()));
        }
        if self.lengths.is_empty() || self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(
                "lengths must be a nonempty increasing list".into(),
            ));
        }
        if self.sites.is_empty() || self.sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(
                "sites must be a nonempty increasing list".into(),
            ));
        }
        let max_site = *self.sites.last().unwrap();
        let min_len = self.lengths[0];
        if self.sites[0] <= 0.0 || max_site >= min_len {
            return Err(CliError::Config(format!(
                "sites must lie strictly inside (0, {min_len}) for every length"
            )));
        }
        if !self.sites.contains(&self.reference_site) {
            return Err(CliError::Config(
                "reference_site must be one of the sites".into(),
            ));
        }
        if self.nx_per_unit == 0 || self.ny == 0 {
            return Err(CliError::Config("mesh resolution must be positive".into()));
        }
        Ok(())
    }
}

impl ConvergenceConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ConvergenceConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        expect_kind(&self.kind, "convergence")?;
        check_positive("h", self.h)?;
        if self.levels < 3 {
            return Err(CliError::Config(format!(
                "levels must be at least 3, got {}",
                self.levels
            )));
        }
        check_positive("max_error", self.max_error)?;
        match self.oracle.as_str() {
            "cap" => {
                let r = self
                    .radius
                    .ok_or_else(|| CliError::Config("cap reference needs radius".into()))?;
                check_positive("radius", r)?;
                if self.base_rings.unwrap_or(0) == 0 {
                    return Err(CliError::Config("cap reference needs base_rings >= 1".into()));
                }
            }
            "cylinder" => {
                let w = self.half_width.ok_or_else(|| {
                    CliError::Config("cylinder reference needs half_width".into())
                })?;
                check_positive("half_width", w)?;
                let xr = self
                    .x_range
                    .ok_or_else(|| CliError::Config("cylinder reference needs x_range".into()))?;
                if !(xr[0] < xr[1]) {
                    return Err(CliError::Config("x_range must be increasing".into()));
                }
                if self.base_nx.unwrap_or(0) == 0 || self.base_ny.unwrap_or(0) == 0 {
                    return Err(CliError::Config(
                        "cylinder reference needs base_nx and base_ny >= 1".into(),
                    ));
                }
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown reference \"{other}\"; expected \"cap\" or \"cylinder\""
                )));
            }
        }
        Ok(())
    }
}
