//! Study configuration: domain, exact solution, resolutions, tolerances.
//!
//! Configs are flat TOML with nested `[domain]` / `[solution]` tables, e.g.
//!
//! ```toml
//! resolutions = [32, 64, 128]
//! delta = 0.1
//! seed = 7
//!
//! [domain]
//! half_width = 1.0
//!
//! [domain.level_set]
//! family = "circle"
//! radius = 0.7
//!
//! [solution]
//! kind = "re_pow"
//! m = 3
//! z0 = [0.0, 0.0]
//! ```

use serde::{Deserialize, Serialize};

use crate::driver::{Method, SolveConfig};
use crate::error::{ConfigError, Result};
use crate::geometry::{HarmonicSolution, ImplicitDomain, LevelSet};
use crate::solvers::DEFAULT_CG_TOL;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub domain: ImplicitDomain,
    /// Exact harmonic reference; optional for pure property suites.
    #[serde(default)]
    pub solution: Option<HarmonicSolution>,
    /// Strictly increasing resolutions.
    pub resolutions: Vec<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_fp_tol")]
    pub fp_tol: f64,
    #[serde(default = "default_cg_tol")]
    pub cg_tol: f64,
}

fn default_delta() -> f64 {
    0.1
}

fn default_method() -> String {
    "fixed_point".into()
}

fn default_fp_tol() -> f64 {
    1e-10
}

fn default_cg_tol() -> f64 {
    DEFAULT_CG_TOL
}

impl StudyConfig {
    /// A circle study with the defaults used across the test suites.
    pub fn circle(resolutions: Vec<usize>) -> Self {
        Self {
            domain: ImplicitDomain::new(LevelSet::Circle { radius: 0.7 }, 1.0),
            solution: None,
            resolutions,
            delta: default_delta(),
            seed: 0,
            method: default_method(),
            fp_tol: default_fp_tol(),
            cg_tol: default_cg_tol(),
        }
    }

    /// The non-convex stress geometry used alongside the circle.
    pub fn star(resolutions: Vec<usize>) -> Self {
        Self {
            domain: ImplicitDomain::new(
                LevelSet::Star {
                    a: 0.7,
                    b: 0.15,
                    k: 5,
                },
                1.0,
            ),
            ..Self::circle(resolutions)
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: StudyConfig = toml::from_str(text)
            .map_err(|e| ConfigError::Invalid(format!("config parse error: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| crate::Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() {
            return Err(ConfigError::Invalid("resolution list is empty".into()).into());
        }
        if !self.resolutions.windows(2).all(|w| w[0] < w[1]) {
            return Err(
                ConfigError::Invalid("resolutions must be strictly increasing".into()).into(),
            );
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(ConfigError::Invalid(format!(
                "delta = {} outside (0, 1/2]",
                self.delta
            ))
            .into());
        }
        self.method.parse::<Method>().map_err(ConfigError::Invalid)?;
        if let Some(solution) = &self.solution {
            let sdim = match solution {
                HarmonicSolution::InvDist { .. } => 3,
                HarmonicSolution::QuadXY
                | HarmonicSolution::SinCosh
                | HarmonicSolution::Linear { .. } => self.domain.dim(),
                _ => 2,
            };
            if sdim != self.domain.dim() {
                return Err(ConfigError::Invalid(format!(
                    "solution dimension {sdim} does not match domain dimension {}",
                    self.domain.dim()
                ))
                .into());
            }
            if let Some(p) = solution.singularity() {
                if self.domain.eval(&p) <= 0.0 {
                    return Err(ConfigError::Invalid(format!(
                        "singular point {:?} is not strictly outside the domain",
                        &p[..self.domain.dim()]
                    ))
                    .into());
                }
            }
        }
        self.solve_config().validate()
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            method: self.method.parse().unwrap_or(Method::FixedPoint),
            fp_tol: self.fp_tol,
            cg_tol: self.cg_tol,
            delta: self.delta,
            n: *self.resolutions.last().unwrap_or(&0),
            ..SolveConfig::default()
        }
    }
}
