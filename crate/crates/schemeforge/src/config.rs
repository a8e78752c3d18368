//! Run configuration: defaults, optional TOML file, environment, flags.

use std::path::Path;

use serde::Deserialize;

use schemeforge_core::chartab::{COMPARE_TOL, EIGEN_TOL};
use schemeforge_core::loopcore::DEFAULT_SEED;
use schemeforge_core::permgroup::{DEFAULT_ORDER_CAP, DEFAULT_RELATION_CAP};
use schemeforge_core::zorn::DEFAULT_ELEMENT_CAP;

use crate::error::CliError;

pub const CAP_ELEMENTS_ENV: &str = "SCHEMEFORGE_CAP_ELEMENTS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Latex,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Paige loop order.
    pub elements: usize,
    /// `n²` for explicit relation matrices.
    pub relations: usize,
    /// Permutation group order.
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eigen: f64,
    pub compare: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub caps: Caps,
    pub tolerances: Tolerances,
    pub format: OutputFormat,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            caps: Caps { elements: DEFAULT_ELEMENT_CAP, relations: DEFAULT_RELATION_CAP, order: DEFAULT_ORDER_CAP },
            tolerances: Tolerances { eigen: EIGEN_TOL, compare: COMPARE_TOL },
            format: OutputFormat::Json,
            threads: 1,
        }
    }
}

/// Shape of the `--config` TOML file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub caps: CapsFile,
    #[serde(default)]
    pub tolerances: TolerancesFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsFile {
    pub elements: Option<usize>,
    pub relations: Option<usize>,
    pub order: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesFile {
    pub eigen: Option<f64>,
    pub compare: Option<f64>,
}

/// Command-line overrides, applied last.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub threads: Option<usize>,
    pub cap_elements: Option<usize>,
    pub cap_relations: Option<usize>,
    pub cap_order: Option<usize>,
    pub eigen_tol: Option<f64>,
    pub compare_tol: Option<f64>,
}

impl RunConfig {
    /// Defaults < config file < `SCHEMEFORGE_CAP_ELEMENTS` < flags.
    pub fn resolve(file: Option<&Path>, env_cap: Option<&str>, o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            cfg.apply_file(toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?);
        }
        if let Some(v) = env_cap {
            cfg.caps.elements = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{CAP_ELEMENTS_ENV}={v:?} is not a positive integer")))?;
        }
        cfg.seed = o.seed.unwrap_or(cfg.seed);
        cfg.format = o.format.unwrap_or(cfg.format);
        cfg.threads = o.threads.unwrap_or(cfg.threads);
        cfg.caps.elements = o.cap_elements.unwrap_or(cfg.caps.elements);
        cfg.caps.relations = o.cap_relations.unwrap_or(cfg.caps.relations);
        cfg.caps.order = o.cap_order.unwrap_or(cfg.caps.order);
        cfg.tolerances.eigen = o.eigen_tol.unwrap_or(cfg.tolerances.eigen);
        cfg.tolerances.compare = o.compare_tol.unwrap_or(cfg.tolerances.compare);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, f: ConfigFile) {
        self.seed = f.seed.unwrap_or(self.seed);
        self.format = f.format.unwrap_or(self.format);
        self.threads = f.threads.unwrap_or(self.threads);
        self.caps.elements = f.caps.elements.unwrap_or(self.caps.elements);
        self.caps.relations = f.caps.relations.unwrap_or(self.caps.relations);
        self.caps.order = f.caps.order.unwrap_or(self.caps.order);
        self.tolerances.eigen = f.tolerances.eigen.unwrap_or(self.tolerances.eigen);
        self.tolerances.compare = f.tolerances.compare.unwrap_or(self.tolerances.compare);
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let caps = [("elements", self.caps.elements), ("relations", self.caps.relations), ("order", self.caps.order)];
        if let Some((name, _)) = caps.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Config(format!("cap {name} must be positive")));
        }
        for (name, t) in [("eigen", self.tolerances.eigen), ("compare", self.tolerances.compare)] {
            if !(t > 0.0 && t < 1e-2) {
                return Err(CliError::Config(format!("tolerance {name} = {t} is outside (0, 1e-2)")));
            }
        }
        if self.threads == 0 {
            return Err(CliError::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// One-line summary echoed to stderr on every run.
    pub fn echo(&self) -> String {
        format!(
            "seed=0x{:X} eigen_tol={:e} compare_tol={:e} cap_elements={} threads={}",
            self.seed, self.tolerances.eigen, self.tolerances.compare, self.caps.elements, self.threads
        )
    }
}
