//! Problem configuration files (TOML) and their lowering into core problem
//! specs. Unknown keys are rejected so typos fail loudly.

use anyhow::{anyhow, bail, Context, Result};
use nivp_core::expr::{parse_functional, parse_scalar, Params};
use nivp_core::hypotheses::{find_theta, CaratheodoryGrowthSpec, GrowthSpec, LipschitzSpec};
use nivp_core::operator::ProblemSpec;
use nivp_core::space::ThetaWeight;
use serde::Deserialize;
use std::path::Path;

pub const DEFAULT_GRID: usize = 1024;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_THETA: f64 = 2.0;
pub const DEFAULT_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Perov,
    Picard,
}

impl std::fmt::Display for SolverMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverMode::Perov => write!(f, "perov"),
            SolverMode::Picard => write!(f, "picard"),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub solver: SolverMode,
    pub grid: Option<usize>,
    pub theta: Option<f64>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub expressions: ExpressionsConfig,
    #[serde(default)]
    pub params: std::collections::BTreeMap<String, f64>,
    pub lipschitz: Option<LipschitzConfig>,
    pub growth: Option<GrowthConfig>,
    pub caratheodory: Option<CaratheodoryConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpressionsConfig {
    pub f1: String,
    pub f2: String,
    pub alpha: String,
    pub beta: String,
}

/// Lipschitz constants in the order they appear in the inequalities:
/// lowercase for the right-hand sides, uppercase for the functionals.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzConfig {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    #[serde(rename = "A1")]
    pub cap_a1: f64,
    #[serde(rename = "B1")]
    pub cap_b1: f64,
    #[serde(rename = "A2")]
    pub cap_a2: f64,
    #[serde(rename = "B2")]
    pub cap_b2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    #[serde(rename = "A1")]
    pub cap_a1: f64,
    #[serde(rename = "B1")]
    pub cap_b1: f64,
    #[serde(rename = "C1")]
    pub cap_c1: f64,
    #[serde(rename = "A2")]
    pub cap_a2: f64,
    #[serde(rename = "B2")]
    pub cap_b2: f64,
    #[serde(rename = "C2")]
    pub cap_c2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaratheodoryConfig {
    pub omega1: String,
    pub omega2: String,
    pub omega3: String,
    pub omega4: String,
}

/// Command-line overrides shared by every problem-consuming command.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Grid intervals (positive multiple of 4).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Solver tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for the sampling-based checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Norm weight coupling the scalar part.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Iteration budget for the solvers.
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Parameter binding `name=value`; repeatable.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
}

/// Where the operating weight came from; reports carry it so runs are
/// reproducible from the report alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaSource {
    Flag,
    Config,
    Search,
    Default,
}

impl std::fmt::Display for ThetaSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThetaSource::Flag => write!(f, "flag"),
            ThetaSource::Config => write!(f, "config"),
            ThetaSource::Search => write!(f, "search"),
            ThetaSource::Default => write!(f, "default"),
        }
    }
}

/// A fully lowered, validated problem ready for the commands.
pub struct LoadedProblem {
    pub spec: ProblemSpec,
    pub caratheodory: Option<CaratheodoryGrowthSpec>,
    pub mode: SolverMode,
    pub seed: u64,
    pub max_iter: usize,
    pub theta_source: ThetaSource,
}

pub fn load_problem(path: &Path, overrides: &Overrides) -> Result<LoadedProblem> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let config: ProblemConfig = toml::from_str(&text)
        .with_context(|| format!("cannot parse config {}", path.display()))?;
    lower_config(config, overrides)
}

pub fn lower_config(config: ProblemConfig, overrides: &Overrides) -> Result<LoadedProblem> {
    let mut params: Params = config.params.into_iter().collect();
    for binding in &overrides.params {
        let (name, value) = parse_param_binding(binding)?;
        params.insert(name, value);
    }

    let f1 = parse_scalar(&config.expressions.f1).context("in expression f1")?;
    let f2 = parse_scalar(&config.expressions.f2).context("in expression f2")?;
    let alpha = parse_functional(&config.expressions.alpha).context("in expression alpha")?;
    let beta = parse_functional(&config.expressions.beta).context("in expression beta")?;

    let declared_lipschitz = config
        .lipschitz
        .map(|l| {
            LipschitzSpec {
                f1_x: l.a1,
                f1_y: l.b1,
                f2_x: l.a2,
                f2_y: l.b2,
                alpha_x: l.cap_a1,
                alpha_y: l.cap_b1,
                beta_x: l.cap_a2,
                beta_y: l.cap_b2,
            }
            .validated()
        })
        .transpose()
        .context("in [lipschitz]")?;
    let declared_growth = config
        .growth
        .map(|g| {
            GrowthSpec {
                f1_x: g.a1,
                f1_y: g.b1,
                f1_const: g.c1,
                f2_x: g.a2,
                f2_y: g.b2,
                f2_const: g.c2,
                alpha_x: g.cap_a1,
                alpha_y: g.cap_b1,
                alpha_const: g.cap_c1,
                beta_x: g.cap_a2,
                beta_y: g.cap_b2,
                beta_const: g.cap_c2,
            }
            .validated()
        })
        .transpose()
        .context("in [growth]")?;
    let caratheodory = config
        .caratheodory
        .map(|c| -> Result<CaratheodoryGrowthSpec> {
            Ok(CaratheodoryGrowthSpec {
                omega1: parse_scalar(&c.omega1).context("in expression omega1")?,
                omega2: parse_scalar(&c.omega2).context("in expression omega2")?,
                omega3: parse_scalar(&c.omega3).context("in expression omega3")?,
                omega4: parse_scalar(&c.omega4).context("in expression omega4")?,
            })
        })
        .transpose()?;

    // Weight resolution: explicit flag, then config, then the search over
    // declared constants, then the default.
    let (theta_value, theta_source) = if let Some(t) = overrides.theta {
        (t, ThetaSource::Flag)
    } else if let Some(t) = config.theta {
        (t, ThetaSource::Config)
    } else if let Some(l) = &declared_lipschitz {
        let search = find_theta(l);
        if search.convergent {
            (search.theta, ThetaSource::Search)
        } else {
            (DEFAULT_THETA, ThetaSource::Default)
        }
    } else if let Some(g) = &declared_growth {
        let search = find_theta(g);
        if search.convergent {
            (search.theta, ThetaSource::Search)
        } else {
            (DEFAULT_THETA, ThetaSource::Default)
        }
    } else {
        (DEFAULT_THETA, ThetaSource::Default)
    };
    let theta = ThetaWeight::new(theta_value)
        .map_err(|e| anyhow!("invalid theta: {e}"))?;

    let n_intervals = overrides.grid.or(config.grid).unwrap_or(DEFAULT_GRID);
    let tolerance = overrides
        .tol
        .or(config.tolerance)
        .unwrap_or(DEFAULT_TOLERANCE);
    let spec = ProblemSpec {
        f1,
        f2,
        alpha,
        beta,
        params,
        n_intervals,
        theta,
        tolerance,
        declared_lipschitz,
        declared_growth,
    };
    spec.validate()?;
    warn_on_off_node_abscissae(&spec);
    Ok(LoadedProblem {
        spec,
        caratheodory,
        mode: config.solver,
        seed: overrides.seed.or(config.seed).unwrap_or(0),
        max_iter: overrides.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        theta_source,
    })
}

/// Point evaluations between nodes fall back to linear interpolation; warn
/// so nobody mistakes an interpolated value for an exact one.
fn warn_on_off_node_abscissae(spec: &ProblemSpec) {
    let mut abscissae = Vec::new();
    spec.alpha.point_abscissae(&mut abscissae);
    spec.beta.point_abscissae(&mut abscissae);
    let n = spec.n_intervals as f64;
    for c in abscissae {
        let scaled = c * n;
        if (scaled - scaled.round()).abs() > 1e-12 {
            eprintln!(
                "warning: abscissa {c} does not land on a node of the {}-interval grid; \
                 the point evaluation will be linearly interpolated",
                spec.n_intervals
            );
        }
    }
}

fn parse_param_binding(binding: &str) -> Result<(String, f64)> {
    let (name, value) = binding
        .split_once('=')
        .ok_or_else(|| anyhow!("malformed --param `{binding}`, expected name=value"))?;
    if name.is_empty() {
        bail!("malformed --param `{binding}`: empty name");
    }
    let value: f64 = value
        .parse()
        .with_context(|| format!("malformed --param `{binding}`: bad number"))?;
    Ok((name.to_string(), value))
}
