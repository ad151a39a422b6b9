//! JSON run configuration.
//!
//! ```json
//! {
//!   "model": "euclidean",
//!   "lattice": { "L": 1, "d": 0, "t": 1.0 },
//!   "disorder": [[1.0, 1.0], [1.0, 8.0]],
//!   "beta": 1.0, "mu": 20.0, "h": 0.0,
//!   "solver": { "k_budget": 8, "tol": 1e-10, "tol_f": 1e-8 },
//!   "scan": { "beta_grid": { "log": [0.8, 8.0, 64] }, "mu_grid": [1.0, 2.0] },
//!   "sim": { "N": 48, "M": 4096, "steps": 20000, "replicas": 2, "seed": 1 },
//!   "output": { "directory": "out", "formats": ["json", "csv", "svg"] }
//! }
//! ```
//!
//! Spherical models give `"mixing": [β_0², β_1², ...]` instead of `disorder`.
//! Unknown keys are rejected, and each command rejects sections it does not use.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::correlation::{ExpMixture, PolyMixing};
use crate::error::{ensure, Error, Result};
use crate::functional::{EuclideanParams, SphericalParams};
use crate::lattice::{Lattice, LatticeSpec};
use crate::numeric::log_space;
use crate::saddle::SolverOptions;
use crate::simulate::ChainOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Euclidean,
    Spherical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// A grid given explicitly or as `{"log": [lo, hi, n]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Log { log: (f64, f64, usize) },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Log { log: (lo, hi, n) } => {
                ensure!(*lo > 0.0 && hi > lo, Config, "log grid needs 0 < lo < hi");
                log_space(*lo, *hi, *n)
            }
        };
        ensure!(!pts.is_empty(), Config, "grid is empty");
        ensure!(pts.iter().all(|x| x.is_finite() && *x > 0.0), Config, "grid values must be positive");
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default)]
    pub beta_grid: Option<GridSpec>,
    pub mu_grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default)]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub lattice: LatticeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<ExpMixture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<ChainOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// The commands that read a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FreeEnergy,
    Classify,
    Larkin,
    AtLine,
    PhaseDiagram,
    Simulate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FreeEnergy => "free-energy",
            Command::Classify => "classify",
            Command::Larkin => "larkin",
            Command::AtLine => "at-line",
            Command::PhaseDiagram => "phase-diagram",
            Command::Simulate => "simulate",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Need {
    Required,
    Optional,
    Forbidden,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Checks that exactly the sections used by `cmd` are present.
    pub fn validate_for(&self, cmd: Command) -> Result<()> {
        use Need::*;
        let spherical = self.model == ModelKind::Spherical;
        let (beta, mu, h, solver, scan, sim) = match cmd {
            Command::FreeEnergy => (Required, if spherical { Forbidden } else { Required }, Optional, Optional, Forbidden, Forbidden),
            Command::Classify => (Required, if spherical { Forbidden } else { Required }, Optional, Forbidden, Forbidden, Forbidden),
            Command::Larkin => (Optional, Forbidden, Forbidden, Forbidden, Forbidden, Forbidden),
            Command::AtLine => (Required, Forbidden, Forbidden, Forbidden, Required, Forbidden),
            Command::PhaseDiagram => (Forbidden, Forbidden, Forbidden, Forbidden, Required, Forbidden),
            Command::Simulate => (Required, Required, Optional, Forbidden, Forbidden, Required),
        };
        let allows_spherical = matches!(cmd, Command::FreeEnergy | Command::Classify);
        ensure!(
            !spherical || allows_spherical,
            Config,
            "command {} needs a euclidean model",
            cmd.name()
        );
        let check = |field: &str, present: bool, need: Need| -> Result<()> {
            match need {
                Required => ensure!(present, Config, "command {} needs field `{field}`", cmd.name()),
                Forbidden => ensure!(!present, Config, "command {} does not use field `{field}`", cmd.name()),
                Optional => {}
            }
            Ok(())
        };
        check("beta", self.beta.is_some(), beta)?;
        check("mu", self.mu.is_some(), mu)?;
        check("h", self.h.is_some(), h)?;
        check("solver", self.solver.is_some(), solver)?;
        check("scan", self.scan.is_some(), scan)?;
        check("sim", self.sim.is_some(), sim)?;
        if spherical {
            check("mixing", self.mixing.is_some(), Required)?;
            check("disorder", self.disorder.is_some(), Forbidden)?;
        } else {
            check("disorder", self.disorder.is_some(), Required)?;
            check("mixing", self.mixing.is_some(), Forbidden)?;
        }
        if let Some(scan) = &self.scan {
            check("scan.beta_grid", scan.beta_grid.is_some(), if cmd == Command::PhaseDiagram { Required } else { Forbidden })?;
        }
        if let Some(s) = &self.solver {
            s.validate()?;
        }
        self.lattice.validate()?;
        Ok(())
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.lattice)
    }

    pub fn disorder(&self) -> Result<ExpMixture> {
        self.disorder.clone().ok_or_else(|| Error::Config("missing field `disorder`".into()))
    }

    fn required(&self, value: Option<f64>, name: &str) -> Result<f64> {
        value.ok_or_else(|| Error::Config(format!("missing field `{name}`")))
    }

    pub fn euclidean(&self) -> Result<EuclideanParams> {
        EuclideanParams::new(
            self.required(self.beta, "beta")?,
            self.required(self.mu, "mu")?,
            self.h.unwrap_or(0.0),
            self.lattice()?,
            self.disorder()?,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn spherical(&self) -> Result<SphericalParams> {
        let coeffs = self.mixing.clone().ok_or_else(|| Error::Config("missing field `mixing`".into()))?;
        SphericalParams::new(
            self.required(self.beta, "beta")?,
            self.h.unwrap_or(0.0),
            self.lattice()?,
            PolyMixing::unit(coeffs)?,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn solver(&self) -> SolverOptions {
        self.solver.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: &str = r#"{"model": "euclidean", "lattice": {"L": 1, "d": 0, "t": 1.0},
        "disorder": [[1.0, 1.0], [1.0, 8.0]], "beta": 1.0, "mu": 20.0}"#;

    #[test]
    fn parses_and_validates() {
        let c = RunConfig::from_json(FREE).unwrap();
        c.validate_for(Command::FreeEnergy).unwrap();
        assert!(c.validate_for(Command::PhaseDiagram).is_err());
        assert!((c.euclidean().unwrap().r1() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = FREE.replace("\"mu\"", "\"mass\"");
        let err = RunConfig::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("mass"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn log_grid() {
        let g: GridSpec = serde_json::from_str(r#"{"log": [1.0, 100.0, 3]}"#).unwrap();
        let pts = g.points().unwrap();
        assert!((pts[1] - 10.0).abs() < 1e-12);
    }
}
