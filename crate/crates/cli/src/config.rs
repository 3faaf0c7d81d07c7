//! Scenario configuration files.
//!
//! A config is a TOML document:
//!
//! ```toml
//! scenario = "spectrum"
//! tol = 1e-10          # optional, scenario default otherwise
//! cutoff = 30          # optional, only read by truncating scenarios
//! out_dir = "out"      # optional
//!
//! [parameters]
//! kind = "dbs"
//! delta1 = 1.0
//! delta2 = 1.0
//! g = 0.5
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Spectrum,
    SymmetryAudit,
    HoleOccupation,
    SteadyState,
    PumpResidual,
    DimerEntanglement,
    DualityCheck,
    BellSteady,
    TrimerFlow,
    FluxDual,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::Spectrum,
        Scenario::SymmetryAudit,
        Scenario::HoleOccupation,
        Scenario::SteadyState,
        Scenario::PumpResidual,
        Scenario::DimerEntanglement,
        Scenario::DualityCheck,
        Scenario::BellSteady,
        Scenario::TrimerFlow,
        Scenario::FluxDual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::SymmetryAudit => "symmetry-audit",
            Scenario::HoleOccupation => "hole-occupation",
            Scenario::SteadyState => "steady-state",
            Scenario::PumpResidual => "pump-residual",
            Scenario::DimerEntanglement => "dimer-entanglement",
            Scenario::DualityCheck => "duality-check",
            Scenario::BellSteady => "bell-steady",
            Scenario::TrimerFlow => "trimer-flow",
            Scenario::FluxDual => "flux-dual",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::Spectrum => "BdG eigenvalues, regime and symmetry residuals of a dimer",
            Scenario::SymmetryAudit => "symmetry residuals over random Hermitian quadratic forms",
            Scenario::HoleOccupation => "particle number of a hole Fock state by exact algebra",
            Scenario::SteadyState => "driven lossy cavity steady state against the coherent state",
            Scenario::PumpResidual => "Lindblad residual of the hole-vacuum candidate over a cutoff sweep",
            Scenario::DimerEntanglement => "log-negativity of TMSV, resonant pairing flow or APT ground state",
            Scenario::DualityCheck => "coefficient, spectral and Heisenberg checks of a dimer and its dual",
            Scenario::BellSteady => "renormalized dissipative-beamsplitter flow towards a Bell state",
            Scenario::TrimerFlow => "single-excitation populations on a three-mode ring",
            Scenario::FluxDual => "loop flux before and after mapping a ring to holes",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Scenario::Spectrum | Scenario::DualityCheck => 1e-10,
            Scenario::SymmetryAudit | Scenario::HoleOccupation | Scenario::FluxDual => 1e-12,
            Scenario::SteadyState | Scenario::PumpResidual | Scenario::DimerEntanglement | Scenario::BellSteady => 1e-8,
            Scenario::TrimerFlow => 1e-9,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub parameters: toml::Table,
    pub cutoff: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
            ConfigError(format!("{}\nknown scenarios: {}", e.message(), names.join(", ")))
        })?;
        if let Some(tol) = cfg.tol {
            check_tol(tol)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Typed view of `[parameters]`; unknown keys are rejected by the target type.
    pub fn parameters<T: DeserializeOwned>(&self) -> Result<T, ConfigError> {
        toml::Value::Table(self.parameters.clone())
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError(format!("[parameters] for {}: {}", self.scenario, e.message())))
    }
}

pub fn check_tol(tol: f64) -> Result<(), ConfigError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(ConfigError(format!("tol must be positive and finite, got {tol}")))
    }
}
