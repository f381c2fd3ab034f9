//! Strict TOML configuration for the CLI. Unknown keys are rejected and
//! numeric parameters are validated before any run starts.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use edurace::equilibrium::UpdateScheme;
use edurace::model::T_HARD_CAP_DEFAULT;
use edurace::policy::PolicyScenario;
use edurace::population::{PopulationSpec, SimConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Global RNG seed; `--seed` on the command line wins over this, and
    /// both win over the population block's own seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure1: Option<Figure1Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure2: Option<Figure2Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub p1: f64,
    pub p2: f64,
    pub t_obey: f64,
    #[serde(default = "default_cap")]
    pub t_hard_cap: f64,
    #[serde(default = "default_dynamics_rounds")]
    pub dynamics_rounds: usize,
    #[serde(default = "default_scheme")]
    pub scheme: UpdateScheme,
    /// Starting profile for the dynamics trace; defaults to (t_obey, t_obey).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure1Config {
    pub gamma: f64,
    pub p: f64,
    pub s_cut_values: Vec<f64>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure2Config {
    pub gamma: f64,
    pub p: f64,
    pub mean_score: f64,
    pub k: f64,
    pub sigma_values: Vec<f64>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub population: PopulationSpec,
    pub sim: SimConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub population: PopulationSpec,
    pub sim: SimConfig,
    pub scenarios: Vec<PolicyScenario>,
}

fn default_cap() -> f64 {
    T_HARD_CAP_DEFAULT
}

fn default_dynamics_rounds() -> usize {
    20
}

fn default_scheme() -> UpdateScheme {
    UpdateScheme::Simultaneous
}

fn default_t_max() -> f64 {
    8.0
}

fn default_step() -> f64 {
    0.01
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.game {
            g.validate()?;
        }
        if let Some(f) = &self.figure1 {
            f.validate()?;
        }
        if let Some(f) = &self.figure2 {
            f.validate()?;
        }
        if let Some(s) = &self.simulate {
            s.sim.validate().map_err(anyhow::Error::from)?;
        }
        if let Some(p) = &self.policy {
            p.sim.validate().map_err(anyhow::Error::from)?;
            if p.scenarios.is_empty() {
                bail!("policy.scenarios: at least one scenario required");
            }
            for (i, s) in p.scenarios.iter().enumerate() {
                validate_scenario(i, s)?;
            }
        }
        Ok(())
    }
}

impl GameConfig {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("game.gamma1", self.gamma1),
            ("game.gamma2", self.gamma2),
            ("game.p1", self.p1),
            ("game.p2", self.p2),
            ("game.t_obey", self.t_obey),
            ("game.t_hard_cap", self.t_hard_cap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name}: must be finite and > 0, got {v}");
            }
        }
        if self.dynamics_rounds == 0 {
            bail!("game.dynamics_rounds: must be >= 1");
        }
        Ok(())
    }
}

impl Figure1Config {
    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.p > 0.0) {
            bail!("figure1: gamma and p must be > 0");
        }
        if self.s_cut_values.is_empty() {
            bail!("figure1.s_cut_values: must be non-empty");
        }
        if !(self.t_max > 0.0 && self.step > 0.0 && self.step < self.t_max) {
            bail!("figure1: need 0 < step < t_max");
        }
        Ok(())
    }
}

impl Figure2Config {
    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.p > 0.0) {
            bail!("figure2: gamma and p must be > 0");
        }
        if self.sigma_values.is_empty() {
            bail!("figure2.sigma_values: must be non-empty");
        }
        if self.sigma_values.iter().any(|s| *s < 0.0) {
            bail!("figure2.sigma_values: must be >= 0");
        }
        if !(self.t_max > 0.0 && self.step > 0.0 && self.step < self.t_max) {
            bail!("figure2: need 0 < step < t_max");
        }
        Ok(())
    }
}

fn validate_scenario(i: usize, s: &PolicyScenario) -> Result<()> {
    match s {
        PolicyScenario::CeeBaseline => Ok(()),
        PolicyScenario::Diversion { keep_fraction, .. } => {
            if !(*keep_fraction > 0.0 && *keep_fraction <= 1.0) {
                bail!("policy.scenarios[{i}].keep_fraction: must be in (0, 1], got {keep_fraction}");
            }
            Ok(())
        }
        PolicyScenario::BetaReduction {
            beta_before,
            beta_after,
            s_cut,
            wage_p,
            w_high,
            w_low,
        } => {
            if !(*beta_before > 0.0 && *beta_after > 0.0) {
                bail!("policy.scenarios[{i}]: beta values must be > 0");
            }
            if !(*s_cut >= 0.0 && *wage_p > 0.0) {
                bail!("policy.scenarios[{i}]: need s_cut >= 0 and wage_p > 0");
            }
            if !(*w_high > *w_low && *w_low > 0.0) {
                bail!("policy.scenarios[{i}]: need w_high > w_low > 0");
            }
            Ok(())
        }
        PolicyScenario::ExamRedesign { aptitude_weight } => {
            if aptitude_weight.is_nan() || *aptitude_weight < 1.0 {
                bail!("policy.scenarios[{i}].aptitude_weight: must be >= 1, got {aptitude_weight}");
            }
            Ok(())
        }
    }
}

/// Short stable label for a scenario, used in file rows and comparisons.
pub fn scenario_label(idx: usize, s: &PolicyScenario) -> String {
    let kind = match s {
        PolicyScenario::CeeBaseline => "cee_baseline",
        PolicyScenario::Diversion { .. } => "diversion",
        PolicyScenario::BetaReduction { .. } => "beta_reduction",
        PolicyScenario::ExamRedesign { .. } => "exam_redesign",
    };
    format!("{idx:02}_{kind}")
}
