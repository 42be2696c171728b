//! Run configuration: built-in defaults, overlaid by a JSON file, overlaid
//! by command-line flags.

use std::collections::BTreeMap;

use maxlenqm_core::quadrature::{build_grid, DEFAULT_ORDER, DEFAULT_PANELS};
use maxlenqm_core::transforms::{DEFAULT_ETA_MAX_MULT, DEFAULT_ETA_STEP_DIV};
use maxlenqm_core::{DeformationParams, EtaGrid, QuadratureGrid, ThetaChart};
use serde::{Deserialize, Serialize};

use crate::checks::default_tolerances;
use crate::error::{CliError, CliResult};
use crate::output::Format;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tau: f64,
    pub hbar: f64,
    pub mass: f64,
    pub panels: usize,
    pub order: usize,
    /// `eta_max` in units of `τħ`.
    pub eta_max_mult: f64,
    /// `eta_step = τħ√3 / eta_step_div`.
    pub eta_step_div: f64,
    /// Overrides of named check tolerances.
    pub tol: BTreeMap<String, f64>,
    pub output_path: Option<String>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tau: 0.1,
            hbar: 1.0,
            mass: 1.0,
            panels: DEFAULT_PANELS,
            order: DEFAULT_ORDER,
            eta_max_mult: DEFAULT_ETA_MAX_MULT,
            eta_step_div: DEFAULT_ETA_STEP_DIV,
            tol: BTreeMap::new(),
            output_path: None,
            format: Format::Csv,
        }
    }
}

/// A config file: any subset of the [`RunConfig`] fields.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub tau: Option<f64>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub panels: Option<usize>,
    pub order: Option<usize>,
    pub eta_max_mult: Option<f64>,
    pub eta_step_div: Option<f64>,
    pub tol: Option<BTreeMap<String, f64>>,
    pub output_path: Option<String>,
    pub format: Option<Format>,
}

impl PartialConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("bad config file: {e}")))
    }

    pub fn read(path: &str) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Fields set in `self` win over `base`.
    pub fn overlay(self, mut base: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { base.$f = v; })*};
        }
        take!(tau, hbar, mass, panels, order, eta_max_mult, eta_step_div, format);
        if let Some(p) = self.output_path {
            base.output_path = Some(p);
        }
        if let Some(t) = self.tol {
            base.tol.extend(t);
        }
        base
    }
}

/// Parse `name=value` tolerance overrides.
pub fn parse_tol(spec: &str) -> CliResult<(String, f64)> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("--tol expects name=value, got `{spec}`")))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("tolerance `{name}` has non-numeric value `{value}`")))?;
    Ok((name.trim().to_string(), v))
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        for (name, v) in [
            ("tau", self.tau),
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("eta_max_mult", self.eta_max_mult),
            ("eta_step_div", self.eta_step_div),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.panels < 1 {
            return Err(CliError::config("panels must be at least 1"));
        }
        if self.order < 2 {
            return Err(CliError::config("order must be at least 2"));
        }
        let known = default_tolerances();
        for (name, &v) in &self.tol {
            if !known.contains_key(name.as_str()) {
                let names: Vec<&str> = known.keys().copied().collect();
                return Err(CliError::config(format!("unknown tolerance `{name}`; known: {}", names.join(", "))));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::config(format!("tolerance `{name}` must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> CliResult<DeformationParams> {
        Ok(DeformationParams::new(self.tau, self.hbar, self.mass)?)
    }

    pub fn chart(&self) -> CliResult<ThetaChart> {
        Ok(ThetaChart::new(self.params()?))
    }

    pub fn grid(&self) -> CliResult<QuadratureGrid> {
        Ok(build_grid(&self.chart()?, self.panels, self.order)?)
    }

    pub fn eta_grid(&self) -> CliResult<EtaGrid> {
        Ok(EtaGrid::scaled(self.eta_max_mult, self.eta_step_div, &self.params()?)?)
    }

    /// Effective tolerance for a named check.
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tol
            .get(name)
            .copied()
            .or_else(|| default_tolerances().get(name).copied())
            .unwrap_or_else(|| panic!("no tolerance named {name}"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
