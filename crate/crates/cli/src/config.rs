//! Layered run configuration.
//!
//! Values resolve in precedence order: command-line flag, then the TOML
//! configuration file, then the built-in default. The file is a single
//! tree with one optional section per parameter block; it is
//! schema-validated up front and unknown keys are rejected, so typos
//! surface as errors instead of silently falling back to defaults.

use std::fs;
use std::path::PathBuf;

use serde::Deserialize;

use fraczero_core::eigenpair::EigenpairSpec;
use fraczero_core::potential::PotentialModel;
use fraczero_core::{PathConfig, ProcessSpec, QuadConfig};

use crate::commands::{PathArgs, PotentialArgs, ProcessArgs, QuadArgs, SpecArgs};
use crate::output::{self, OutputFormat};
use crate::{CliError, GlobalArgs};

/// On-disk configuration tree. Every key is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct RunConfig {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub log_level: Option<String>,
    /// Default evaluation grid, same syntax as `--grid`.
    pub grid: Option<String>,
    pub eigenpair: EigenpairBlock,
    pub process: ProcessBlock,
    pub potential: PotentialBlock,
    pub quad: Option<QuadConfig>,
    pub paths: Option<PathConfig>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct EigenpairBlock {
    pub d: Option<usize>,
    pub alpha: Option<f64>,
    pub l: Option<usize>,
    pub axis: Option<usize>,
    pub kappa: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct ProcessBlock {
    /// `stable` or `layered`.
    pub family: Option<String>,
    pub d: Option<usize>,
    pub alpha: Option<f64>,
    /// Large-jump exponent of the layered family.
    pub gamma: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct PotentialBlock {
    /// `power`, `power-log`, `hypergeometric`, or `none`.
    pub family: Option<String>,
    pub beta: Option<f64>,
    /// Power exponent of the power-log family.
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub r0: Option<f64>,
    pub negate: Option<bool>,
}

/// What a command learned about the potential: nothing was said, it was
/// explicitly switched off, or a concrete model was requested.
pub(crate) enum PotentialChoice {
    Unspecified,
    Off,
    Model(PotentialModel),
}

/// Fully loaded configuration context: the parsed file plus the resolved
/// global flags.
pub(crate) struct Context {
    pub file: RunConfig,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Global seed override (flag or file), if any.
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

fn missing(flag: &str, section: &str) -> CliError {
    CliError::Config(format!(
        "missing {flag}; pass it on the command line or set it in the [{section}] config section"
    ))
}

impl Context {
    pub fn load(g: &GlobalArgs) -> Result<Self, CliError> {
        let file: RunConfig = match &g.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        let level = g
            .log_level
            .as_deref()
            .or(file.log_level.as_deref())
            .unwrap_or("warn");
        output::init_logger(level)?;
        Ok(Context {
            out: g.out.clone().or_else(|| file.out.clone()),
            format: g.format.or(file.format).unwrap_or(OutputFormat::Json),
            seed: g.seed.or(file.seed),
            workers: g.workers.or(file.workers),
            file,
        })
    }

    /// Eigenpair selection: flags over the `[eigenpair]` section.
    pub fn resolve_spec(&self, s: &SpecArgs) -> Result<EigenpairSpec, CliError> {
        let b = &self.file.eigenpair;
        let d = s.d.or(b.d).ok_or_else(|| missing("--d", "eigenpair"))?;
        let alpha = s
            .alpha
            .or(b.alpha)
            .ok_or_else(|| missing("--alpha", "eigenpair"))?;
        let l = s.l.or(b.l).unwrap_or(0);
        let axis = s.axis.or(b.axis).unwrap_or(1);
        let kappa = s
            .kappa
            .or(b.kappa)
            .ok_or_else(|| missing("--kappa", "eigenpair"))?;
        Ok(EigenpairSpec::new(d, alpha, l, axis, kappa)?)
    }

    /// Process selection: flags over the `[process]` section; the family
    /// defaults to the isotropic stable one.
    pub fn resolve_process(&self, p: &ProcessArgs) -> Result<ProcessSpec, CliError> {
        let b = &self.file.process;
        let d = p.d.or(b.d).ok_or_else(|| missing("--d", "process"))?;
        let alpha = p
            .alpha
            .or(b.alpha)
            .ok_or_else(|| missing("--alpha", "process"))?;
        let family = p
            .family
            .as_deref()
            .or(b.family.as_deref())
            .unwrap_or("stable");
        match family {
            "stable" => Ok(ProcessSpec::isotropic_stable(d, alpha)?),
            "layered" => {
                let gamma = p
                    .gamma
                    .or(b.gamma)
                    .ok_or_else(|| missing("--gamma", "process"))?;
                Ok(ProcessSpec::layered_stable(d, alpha, gamma)?)
            }
            other => Err(CliError::Config(format!(
                "unknown process family '{other}'; use stable or layered"
            ))),
        }
    }

    /// Potential selection: flags over the `[potential]` section. The
    /// hypergeometric family derives its model from the eigenpair spec.
    pub fn resolve_potential(
        &self,
        a: &PotentialArgs,
        spec_args: Option<&SpecArgs>,
    ) -> Result<PotentialChoice, CliError> {
        let b = &self.file.potential;
        let family = match a.potential.as_deref().or(b.family.as_deref()) {
            None => return Ok(PotentialChoice::Unspecified),
            Some("none") => return Ok(PotentialChoice::Off),
            Some(f) => f,
        };
        let negate = a.negate || b.negate.unwrap_or(false);
        let model = match family {
            "power" => {
                let beta = a
                    .beta
                    .or(b.beta)
                    .ok_or_else(|| missing("--beta", "potential"))?;
                let r0 = a.pot_r0.or(b.r0).unwrap_or(1.0);
                PotentialModel::power(beta, r0)?
            }
            "power-log" | "power_log" => {
                let alpha = a
                    .pot_alpha
                    .or(b.alpha)
                    .ok_or_else(|| missing("--pot-alpha", "potential"))?;
                let delta = a.delta.or(b.delta).unwrap_or(0.0);
                let r0 = a.pot_r0.or(b.r0).unwrap_or(2.0);
                PotentialModel::power_log(alpha, delta, r0)?
            }
            "hypergeometric" => {
                let spec = match spec_args {
                    Some(s) => self.resolve_spec(s)?,
                    None => {
                        return Err(CliError::Config(
                            "the hypergeometric potential needs an eigenpair spec \
                             (--d/--alpha/--kappa)"
                                .into(),
                        ))
                    }
                };
                PotentialModel::hypergeometric(spec)?
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown potential family '{other}'; use power, power-log, \
                     hypergeometric, or none"
                )))
            }
        };
        Ok(PotentialChoice::Model(if negate {
            model.negated()
        } else {
            model
        }))
    }

    /// Quadrature knobs: flags over the `[quad]` section over defaults.
    pub fn resolve_quad(&self, q: &QuadArgs) -> QuadConfig {
        let mut cfg = self.file.quad.unwrap_or_default();
        if let Some(n) = q.nodes_per_decade {
            cfg.nodes_per_decade = n;
        }
        if let Some(n) = q.angular_nodes {
            cfg.angular_nodes = n;
        }
        if let Some(r) = q.inner_radius {
            cfg.inner_radius = r;
        }
        if let Some(r) = q.outer_radius {
            cfg.outer_radius = r;
        }
        cfg
    }

    /// Path-simulation knobs: flags over the `[paths]` section over
    /// defaults; the global seed/workers flags take precedence over both.
    pub fn resolve_paths(&self, p: &PathArgs) -> PathConfig {
        let mut cfg = self.file.paths.unwrap_or_default();
        if let Some(n) = p.paths {
            cfg.n_paths = n;
        }
        if let Some(dt) = p.dt {
            cfg.dt = dt;
        }
        if let Some(h) = p.horizon {
            cfg.horizon = h;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg
    }

    /// Default grid string from the file, if one was given.
    pub fn grid_default(&self) -> Option<&str> {
        self.file.grid.as_deref()
    }
}
