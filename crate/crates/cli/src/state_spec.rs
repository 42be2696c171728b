//! Built-in test states named on the command line.
//!
//! * `hermite:k=<int>,sigma=<fraction of chart length>,center=<x>,edge=<int>`
//! * `gauss:center=<x>,width=<x>,kick=<1/x>`
//! * `plane:eta=<momentum>`
//!
//! Unset keys take family defaults: the θ-Hermite state sits on the chart
//! midpoint with `σ = L/10` and a cubic edge window; the x-Gaussian sits at
//! the origin with width `1/(2τ)`.

use std::collections::BTreeMap;

use maxlenqm_core::{eigenstate, theta_hermite, x_gaussian, ThetaChart, ThetaHermite, WaveFunction, XGaussian, C64};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Hermite {
        k: usize,
        sigma: Option<f64>,
        center: Option<f64>,
        edge: Option<u32>,
    },
    Gauss {
        center: f64,
        width: Option<f64>,
        kick: f64,
    },
    Plane {
        eta: f64,
    },
}

fn parse_args<'a>(spec: &str, body: &'a str, allowed: &[&str]) -> CliResult<BTreeMap<&'a str, &'a str>> {
    let mut out = BTreeMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::UnknownState(spec.to_string()))?;
        let k = k.trim();
        if !allowed.contains(&k) || out.insert(k, v.trim()).is_some() {
            return Err(CliError::UnknownState(spec.to_string()));
        }
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(spec: &str, args: &BTreeMap<&str, &str>, key: &str) -> CliResult<Option<T>> {
    args.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::UnknownState(spec.to_string())))
        .transpose()
}

impl StateSpec {
    pub fn parse(spec: &str) -> CliResult<Self> {
        let (family, body) = spec.split_once(':').unwrap_or((spec, ""));
        match family.trim() {
            "hermite" => {
                let a = parse_args(spec, body, &["k", "sigma", "center", "edge"])?;
                Ok(StateSpec::Hermite {
                    k: num(spec, &a, "k")?.unwrap_or(0),
                    sigma: num(spec, &a, "sigma")?,
                    center: num(spec, &a, "center")?,
                    edge: num(spec, &a, "edge")?,
                })
            }
            "gauss" => {
                let a = parse_args(spec, body, &["center", "width", "kick"])?;
                Ok(StateSpec::Gauss {
                    center: num(spec, &a, "center")?.unwrap_or(0.0),
                    width: num(spec, &a, "width")?,
                    kick: num(spec, &a, "kick")?.unwrap_or(0.0),
                })
            }
            "plane" => {
                let a = parse_args(spec, body, &["eta"])?;
                Ok(StateSpec::Plane {
                    eta: num(spec, &a, "eta")?.unwrap_or(0.0),
                })
            }
            _ => Err(CliError::UnknownState(spec.to_string())),
        }
    }

    /// The (unnormalized) state on `chart`.
    pub fn build(&self, chart: &ThetaChart) -> CliResult<WaveFunction> {
        let tau = chart.params().tau();
        match *self {
            StateSpec::Hermite { k, sigma, center, edge } => {
                let mut s = ThetaHermite::new(k, chart);
                if let Some(sig) = sigma {
                    if !(sig > 0.0 && sig.is_finite()) {
                        return Err(CliError::config(format!("sigma must be positive, got {sig}")));
                    }
                    s.sigma = sig * chart.length();
                }
                if let Some(x) = center {
                    s.center = chart.theta_of_x(x);
                }
                if let Some(m) = edge {
                    s.edge_order = m;
                }
                Ok(theta_hermite(&s))
            }
            StateSpec::Gauss { center, width, kick } => {
                let width = width.unwrap_or(0.5 / tau);
                if !(width > 0.0 && width.is_finite()) {
                    return Err(CliError::config(format!("width must be positive, got {width}")));
                }
                Ok(x_gaussian(&XGaussian {
                    center,
                    width,
                    kick,
                    poly: vec![C64::new(1.0, 0.0)],
                }))
            }
            StateSpec::Plane { eta } => Ok(eigenstate(eta, chart.params()).base),
        }
    }
}
