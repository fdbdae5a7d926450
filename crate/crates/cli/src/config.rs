use std::path::PathBuf;

use serde::Deserialize;

use fracid_core::fotf::logspace;
use fracid_core::sim::{Memory, SimConfig};
use fracid_core::{Error, RationalOrder, Result};

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub grid: GridConfig,
    pub sim: SimSettings,
    pub tune: TuneSettings,
    pub identify: IdentifySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: PathBuf::from("out"),
            grid: GridConfig::default(),
            sim: SimSettings::default(),
            tune: TuneSettings::default(),
            identify: IdentifySettings::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    /// Upper frequency; the Nyquist frequency of the fixtures when absent.
    pub max: Option<f64>,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            min: 1e-3,
            max: None,
            count: 100,
            spacing: Spacing::Log,
        }
    }
}

impl GridConfig {
    pub fn points(&self, nyquist: f64) -> Vec<f64> {
        let max = self.max.unwrap_or(nyquist);
        match self.spacing {
            Spacing::Log => logspace(self.min, max, self.count),
            Spacing::Linear if self.count == 1 => vec![self.min],
            Spacing::Linear => (0..self.count)
                .map(|i| self.min + (max - self.min) * i as f64 / (self.count - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub h: f64,
    pub horizon: f64,
    /// GL memory window in samples; full memory when absent.
    pub window: Option<usize>,
    pub amplitude: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            h: 0.05,
            horizon: 2000.0,
            window: None,
            amplitude: 1.0,
        }
    }
}

impl SimSettings {
    pub fn sim_config(&self) -> Result<SimConfig> {
        let memory = self.window.map_or(Memory::Full, Memory::Window);
        let cfg = SimConfig::new(self.h, self.horizon)?.with_memory(memory);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuneSettings {
    pub restarts: usize,
    pub max_iterations: usize,
    pub target_angle_deg: Option<f64>,
}

impl Default for TuneSettings {
    fn default() -> Self {
        TuneSettings {
            restarts: 20,
            max_iterations: 5000,
            target_angle_deg: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentifySettings {
    /// Commensurate orders for the Levy sweep.
    pub q: Vec<String>,
    /// Top order `m q = n q` of the fitted models.
    pub top_order: String,
    /// Output noise for regenerated records.
    pub noise_std: f64,
}

impl Default for IdentifySettings {
    fn default() -> Self {
        IdentifySettings {
            q: ["1", "1/2", "1/4", "1/10", "1/20", "1/50", "1/100"]
                .map(String::from)
                .to_vec(),
            top_order: "5/2".into(),
            noise_std: 0.0,
        }
    }
}

impl IdentifySettings {
    pub fn orders(&self) -> Result<Vec<RationalOrder>> {
        self.q.iter().map(|s| s.parse()).collect()
    }

    pub fn top(&self) -> Result<RationalOrder> {
        self.top_order.parse()
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !(g.min > 0.0) || g.count == 0 || g.max.is_some_and(|m| !(m > g.min)) {
            return Err(Error::invalid("grid needs 0 < min < max and count >= 1"));
        }
        self.sim.sim_config()?;
        if !self.sim.amplitude.is_finite() {
            return Err(Error::invalid("simulation amplitude must be finite"));
        }
        if self.tune.restarts == 0 || self.tune.max_iterations == 0 {
            return Err(Error::invalid(
                "tune.restarts and tune.max_iterations must be positive",
            ));
        }
        if self.identify.q.is_empty() {
            return Err(Error::invalid("identify.q must list at least one order"));
        }
        self.identify.orders()?;
        self.identify.top()?;
        if !(self.identify.noise_std >= 0.0) {
            return Err(Error::invalid("identify.noise_std must be non-negative"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_file() {
        let cfg = RunConfig::from_toml("seed = 7\n[sim]\nh = 0.1\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.sim.h, 0.1);
        assert_eq!(cfg.sim.horizon, 2000.0);
        assert_eq!(cfg.grid.count, 100);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml("[sim]\nh = -1.0\n").is_err());
        assert!(RunConfig::from_toml("[grid]\nmin = 0.0\n").is_err());
        assert!(RunConfig::from_toml("bogus = 1\n").is_err());
        assert!(RunConfig::from_toml("[identify]\nq = [\"1/0\"]\n").is_err());
    }
}
