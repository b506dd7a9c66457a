//! JSON run configuration.

use std::path::Path;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use vrvw::bounds::{BoundsParams, DEFAULT_SLACK};
use vrvw::solver::SolveOptions;
use vrvw::{PerturbationParams, TorusGrid};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub params: ParamsConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub t: f64,
    /// Row-major 3×3 matrix.
    pub tau: [[f64; 3]; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Amplitude of the smooth random initial (or manufactured) fields.
    #[serde(default = "default_amplitude")]
    pub init_amplitude: f64,
    #[serde(default)]
    pub problem: Problem,
}

/// Which equations `solve` addresses.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Problem {
    /// The homogeneous equations, from a smooth random start.
    #[default]
    Homogeneous,
    /// Target = residual of a smooth random `(A*, B*)`; the start is `(A*, B*)`
    /// plus uniform noise of relative size `perturbation`, and the Coulomb
    /// slice passes through `(A*, B*)`.
    Manufactured {
        #[serde(default = "default_perturbation")]
        perturbation: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default)]
    pub lambda_x: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig { lambda_x: 0.0, slack: DEFAULT_SLACK }
    }
}

fn default_amplitude() -> f64 {
    0.1
}

fn default_perturbation() -> f64 {
    0.01
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Re-checks every numeric constraint of the core types.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.grid()?;
        self.params()?;
        if !(self.solver.tol >= 0.0) {
            return bad(format!("solver.tol must be nonnegative, got {}", self.solver.tol));
        }
        if !(self.solver.init_amplitude >= 0.0 && self.solver.init_amplitude.is_finite()) {
            return bad(format!("solver.init_amplitude must be finite and nonnegative, got {}", self.solver.init_amplitude));
        }
        if let Problem::Manufactured { perturbation } = self.solver.problem {
            if !(perturbation >= 0.0 && perturbation.is_finite()) {
                return bad(format!("solver.problem.perturbation must be nonnegative, got {perturbation}"));
            }
        }
        if !(self.bounds.slack >= 0.0 && self.bounds.slack.is_finite()) {
            return bad(format!("bounds.slack must be nonnegative, got {}", self.bounds.slack));
        }
        let p = self.params()?;
        BoundsParams::from_params(&p, self.bounds.lambda_x, self.grid()?.volume(), 0.0)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<TorusGrid, CliError> {
        TorusGrid::new(self.grid.n, self.grid.h).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn tau(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.params.tau[i][j])
    }

    pub fn params(&self) -> Result<PerturbationParams, CliError> {
        self.params_at(self.params.t)
    }

    /// The perturbation parameters with `t` replaced.
    pub fn params_at(&self, t: f64) -> Result<PerturbationParams, CliError> {
        PerturbationParams::new(t, self.tau()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            max_iters: self.solver.max_iters,
            tol: self.solver.tol,
            seed: self.solver.seed,
            ..SolveOptions::default()
        }
    }
}
