//! Run configuration: the system block plus sweep, engine and solver knobs.

use std::path::Path;

use fasaris::channel::{SystemConfig, SystemConfigFile};
use fasaris::mcsim::SimMode;
use fasaris::outage::QuadratureSpec;
use fasaris::ratemax::RateSearchOptions;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVar {
    P,
    N,
    R,
    M,
    W,
    Nb,
}

impl SweepVar {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVar::P => "P",
            SweepVar::N => "N",
            SweepVar::R => "R",
            SweepVar::M => "M",
            SweepVar::W => "W",
            SweepVar::Nb => "Nb",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: SweepVar,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Mc,
    Bdma,
    Iae,
    Ratemax,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Mc => "mc",
            Engine::Bdma => "bdma",
            Engine::Iae => "iae",
            Engine::Ratemax => "ratemax",
        }
    }
}

/// The JSON document read by both subcommands. System fields sit at the
/// top level in file units (dBm, dB).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub system: SystemConfigFile,
    #[serde(default = "default_rate")]
    pub rate: f64,
    #[serde(default = "default_n_bs")]
    pub n_bs: u32,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default = "all_engines")]
    pub engines: Vec<Engine>,
    #[serde(default = "all_modes")]
    pub modes: Vec<SimMode>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub ratemax: RateSearchOptions,
    /// Sweeping P also moves the surface budget.
    #[serde(default)]
    pub budget_follows_power: bool,
}

fn default_rate() -> f64 {
    2.0
}
fn default_n_bs() -> u32 {
    1
}
fn all_engines() -> Vec<Engine> {
    vec![Engine::Mc, Engine::Bdma, Engine::Iae]
}
fn all_modes() -> Vec<SimMode> {
    SimMode::ALL.to_vec()
}
fn default_trials() -> usize {
    100_000
}
fn default_seed() -> u64 {
    1
}

/// One fully resolved sweep point.
#[derive(Debug, Clone)]
pub struct Point {
    pub value: f64,
    pub system: SystemConfig,
    pub rate: f64,
    pub n_bs: u32,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), String> {
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return Err(format!("rate must be >= 0, got {}", self.rate));
        }
        if self.n_bs == 0 {
            return Err("n_bs must be >= 1".into());
        }
        if self.engines.is_empty() {
            return Err("engines list is empty".into());
        }
        if self.modes.is_empty() {
            return Err("modes list is empty".into());
        }
        if self.trials == 0 {
            return Err("trials must be >= 1".into());
        }
        self.quadrature.validate().map_err(|e| e.to_string())?;
        self.ratemax.validate().map_err(|e| e.to_string())?;
        Ok(())
    }

    /// The configuration without any sweep applied.
    pub fn base(&self) -> Result<Point, String> {
        let system = SystemConfig::try_from(self.system.clone()).map_err(|e| e.to_string())?;
        Ok(Point {
            value: f64::NAN,
            system,
            rate: self.rate,
            n_bs: self.n_bs,
        })
    }

    /// Every sweep point, validated before anything runs.
    pub fn points(&self) -> Result<(SweepVar, Vec<Point>), String> {
        let sweep = self.sweep.as_ref().ok_or("missing sweep block")?;
        if sweep.values.is_empty() {
            return Err("sweep values list is empty".into());
        }
        let pts = sweep
            .values
            .iter()
            .map(|&v| self.point(sweep.variable, v))
            .collect::<Result<_, _>>()?;
        Ok((sweep.variable, pts))
    }

    fn point(&self, var: SweepVar, v: f64) -> Result<Point, String> {
        let whole = |what: &str| -> Result<u64, String> {
            if v >= 0.0 && v.fract() == 0.0 && v < 1e9 {
                Ok(v as u64)
            } else {
                Err(format!("{what} must be a non-negative integer, got {v}"))
            }
        };
        let mut f = self.system.clone();
        let mut rate = self.rate;
        let mut n_bs = self.n_bs;
        match var {
            SweepVar::P => {
                f.tx_power = v;
                if self.budget_follows_power {
                    f.aris_budget = v;
                }
            }
            SweepVar::N => f.n_ports = whole("N")? as usize,
            SweepVar::R => {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(format!("R must be >= 0, got {v}"));
                }
                rate = v
            }
            SweepVar::M => f.m_elements = whole("M")? as usize,
            SweepVar::W => f.aperture = v,
            SweepVar::Nb => {
                n_bs = u32::try_from(whole("Nb")?).map_err(|e| e.to_string())?;
                if n_bs == 0 {
                    return Err("Nb must be >= 1".into());
                }
            }
        }
        let system = SystemConfig::try_from(f).map_err(|e| format!("{}={v}: {e}", var.as_str()))?;
        Ok(Point {
            value: v,
            system,
            rate,
            n_bs,
        })
    }
}
