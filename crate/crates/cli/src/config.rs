//! Sectioned key-value run configuration (TOML), its validation, and the
//! mapping onto the library types.
//!
//! `delta`/`lambda_u` and `gamma`/`c` are mutually exclusive pairs: the
//! rate-based keys are converted through the two-fluid bridge using the
//! initial mean densities.

use bgkmix::grid::{GridConfig, PhaseGrid};
use bgkmix::macroscopic;
use bgkmix::mixture::{AapCoupling, AapVelocitySign, MixtureParameters, ModelVariant};
use bgkmix::solver::{build_species, MaxwellComponent, SimulationSpec, SolverState};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub parameters: ParameterSection,
    pub initial: Option<InitialSection>,
    pub time: Option<TimeSection>,
    pub suite: Option<SuiteSection>,
    pub compare: Option<CompareSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub variant: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub velocity_dim: usize,
    pub v_max: f64,
    pub nodes_per_axis: usize,
    #[serde(default = "default_cells")]
    pub n_cells: usize,
    #[serde(default = "default_length")]
    pub domain_length: f64,
}

fn default_cells() -> usize {
    1
}

fn default_length() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSection {
    pub m1: f64,
    pub m2: f64,
    /// `[nu11~, nu12~, nu21~, nu22~]`.
    pub nu_tilde: [f64; 4],
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: Option<f64>,
    /// Momentum relaxation rate; converted to `delta` via the bridge.
    pub lambda_u: Option<f64>,
    pub gamma: Option<f64>,
    /// Interface constant; converted to `gamma` via the bridge.
    pub c: Option<f64>,
    pub chi12: Option<f64>,
    pub chi21: Option<f64>,
    /// `"as-printed"` or `"physical"`.
    pub aap_velocity_sign: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub species1: SpeciesSection,
    pub species2: SpeciesSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSection {
    pub components: Vec<ComponentSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSection {
    pub density: f64,
    pub velocity: Vec<f64>,
    pub temperature: f64,
    #[serde(default)]
    pub modulation_amplitude: f64,
    #[serde(default = "default_mode")]
    pub modulation_mode: u32,
}

fn default_mode() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_cadence")]
    pub cadence: usize,
    #[serde(default = "default_true")]
    pub conservative: bool,
    #[serde(default = "default_nq")]
    pub nq_exponent: f64,
}

fn default_cadence() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_nq() -> f64 {
    6.0
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    pub master_seed: u64,
    pub samples: usize,
    pub q_tail: Option<f64>,
    pub q_ratio: Option<f64>,
    pub lemma_qs: Option<Vec<f64>>,
    #[serde(default = "default_true")]
    pub starred: bool,
    pub nodes_per_axis: Option<usize>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Step of the reference relaxation-system integrator.
    pub dt_macro: f64,
}

/// Fully validated run configuration.
#[derive(Debug)]
pub struct RunConfig {
    pub grid: PhaseGrid,
    pub params: MixtureParameters,
    pub initial: Option<(Vec<MaxwellComponent>, Vec<MaxwellComponent>)>,
    pub sim: Option<SimulationSpec>,
    pub suite: Option<SuiteSection>,
    pub compare: Option<CompareSection>,
}

fn components(section: &SpeciesSection, d: usize) -> Result<Vec<MaxwellComponent>, CliError> {
    section
        .components
        .iter()
        .map(|c| {
            if c.velocity.len() != d {
                return Err(CliError::Config(format!(
                    "key `initial.*.components.velocity`: needs {d} components, got {}",
                    c.velocity.len()
                )));
            }
            Ok(MaxwellComponent {
                density: c.density,
                velocity: bgkmix::vecn::embed(&c.velocity),
                temperature: c.temperature,
                modulation_amplitude: c.modulation_amplitude,
                modulation_mode: c.modulation_mode,
            })
        })
        .collect()
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;

    let variant = match raw.model.variant.as_str() {
        "two-term" => ModelVariant::TwoTerm,
        "single-term" => ModelVariant::SingleTerm,
        other => {
            return Err(CliError::Config(format!(
                "key `model.variant`: expected \"two-term\" or \"single-term\", got \"{other}\""
            )))
        }
    };

    let grid = PhaseGrid::new(&GridConfig {
        domain_length: raw.grid.domain_length,
        n_cells: raw.grid.n_cells,
        velocity_dim: raw.grid.velocity_dim,
        v_max: raw.grid.v_max,
        nodes_per_axis: raw.grid.nodes_per_axis,
    })
    .map_err(|e| CliError::Config(e.to_string()))?;
    let d = grid.velocity_dim();

    let ps = &raw.parameters;
    let aap = match variant {
        ModelVariant::SingleTerm => {
            let chi12 = ps.chi12.ok_or_else(|| {
                CliError::Config("key `parameters.chi12`: required for the single-term variant".into())
            })?;
            let chi21 = ps.chi21.ok_or_else(|| {
                CliError::Config("key `parameters.chi21`: required for the single-term variant".into())
            })?;
            let sign = match ps.aap_velocity_sign.as_deref() {
                None | Some("as-printed") => AapVelocitySign::AsPrinted,
                Some("physical") => AapVelocitySign::Physical,
                Some(other) => {
                    return Err(CliError::Config(format!(
                        "key `parameters.aap_velocity_sign`: expected \"as-printed\" or \
                         \"physical\", got \"{other}\""
                    )))
                }
            };
            Some(AapCoupling { chi12, chi21, sign })
        }
        ModelVariant::TwoTerm => None,
    };

    // Mean densities of the initial condition (modulations average out),
    // needed to convert rate-based keys.
    let initial = raw
        .initial
        .as_ref()
        .map(|init| -> Result<_, CliError> {
            Ok((
                components(&init.species1, d)?,
                components(&init.species2, d)?,
            ))
        })
        .transpose()?;
    let mean_densities = initial.as_ref().map(|(s1, s2)| {
        (
            s1.iter().map(|c| c.density).sum::<f64>(),
            s2.iter().map(|c| c.density).sum::<f64>(),
        )
    });

    let mut params = MixtureParameters {
        m1: ps.m1,
        m2: ps.m2,
        nu_tilde: ps.nu_tilde,
        alpha: ps.alpha,
        delta: 0.0,
        gamma: 0.0,
        epsilon: ps.epsilon,
        variant,
        aap,
    };

    params.delta = match (ps.delta, ps.lambda_u) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "keys `parameters.delta` and `parameters.lambda_u` are mutually exclusive".into(),
            ))
        }
        (Some(delta), None) => delta,
        (None, Some(lambda_u)) => {
            let (n1, n2) = mean_densities.ok_or_else(|| {
                CliError::Config(
                    "key `parameters.lambda_u`: needs an [initial] block to fix the densities"
                        .into(),
                )
            })?;
            macroscopic::bridge_parameters(&params, lambda_u, n1, n2)
                .map_err(|e| CliError::Config(format!("key `parameters.lambda_u`: {e}")))?
                .delta
        }
        (None, None) => {
            return Err(CliError::Config(
                "key `parameters.delta` (or `parameters.lambda_u`) is required".into(),
            ))
        }
    };

    params.gamma = match (ps.gamma, ps.c) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "keys `parameters.gamma` and `parameters.c` are mutually exclusive".into(),
            ))
        }
        (Some(gamma), None) => gamma,
        (None, Some(c)) => {
            let (clo, chi) = macroscopic::c_range(&params);
            if c < clo || c > chi {
                return Err(CliError::Config(format!(
                    "key `parameters.c`: violates -delta/2 <= c <= 1/2 - (m1/m2) eps (1-delta)/2 \
                     = [{clo:.6}, {chi:.6}], got {c}"
                )));
            }
            macroscopic::gamma_from_c(params.m1, params.delta, c)
        }
        (None, None) => 0.0,
    };

    let report = params.validate(d);
    if !report.pass() {
        let msg = report.first_failure_message().unwrap_or_default();
        return Err(CliError::Config(format!(
            "key `parameters`: admissibility violated: {msg}"
        )));
    }

    let sim = raw
        .time
        .as_ref()
        .map(|t| -> Result<_, CliError> {
            if !(t.dt > 0.0) {
                return Err(CliError::Config(format!(
                    "key `time.dt`: must be positive, got {}",
                    t.dt
                )));
            }
            if t.t_end < 0.0 {
                return Err(CliError::Config(format!(
                    "key `time.t_end`: must be nonnegative, got {}",
                    t.t_end
                )));
            }
            Ok(SimulationSpec {
                dt: t.dt,
                n_steps: (t.t_end / t.dt).round() as usize,
                cadence: t.cadence.max(1),
                conservative: t.conservative,
                nq_exponent: t.nq_exponent,
            })
        })
        .transpose()?;

    Ok(RunConfig {
        grid,
        params,
        initial,
        sim,
        suite: raw.suite,
        compare: raw.compare,
    })
}

impl RunConfig {
    /// Builds the initial solver state; errors when the config has no
    /// `[initial]` block.
    pub fn initial_state(&self) -> Result<SolverState, CliError> {
        let (s1, s2) = self
            .initial
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [initial] block".into()))?;
        let f1 = build_species(&self.grid, self.params.m1, s1)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let f2 = build_species(&self.grid, self.params.m2, s2)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(SolverState::new(f1, f2))
    }
}
