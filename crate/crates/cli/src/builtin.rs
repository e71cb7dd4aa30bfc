//! The built-in two-channel example: an inverse-square channel coupled to an
//! oscillator channel, Q = diag(-1/x, 0),
//! P = [[μx/2 - 1/(2x), -φ/√x], [-φ/√x, μx]] with μ > 0, realized by the
//! rational family with model constant -μ. The constant Hamiltonian shift is
//! μ and the domain is the Dirichlet truncation [1e-3, 12/√μ].

use shapeinv::Model;

use crate::config::{model_spec, DomainSpec, ScenarioConfig, Task, Tolerances, SCENARIO_SCHEMA};
use crate::error::{CliError, Result};

pub const DEFAULT_NPOINTS: usize = 1500;
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Scenario for the built-in example; `mu_ex` must be positive and `k`
/// positive (non-integer values keep the ground family two-dimensional).
pub fn builtin_example(mu_ex: f64, phi_ex: f64, k: f64) -> Result<ScenarioConfig> {
    if !(mu_ex.is_finite() && mu_ex > 0.0) {
        return Err(CliError::Config(format!(
            "mu must be positive, got {mu_ex}"
        )));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(CliError::Config(format!("k must be positive, got {k}")));
    }
    let model = Model::coupled_radial_oscillator(mu_ex, phi_ex)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(ScenarioConfig {
        schema: SCENARIO_SCHEMA.to_string(),
        model: model_spec(&model),
        k,
        shift: mu_ex,
        domain: DomainSpec {
            a: DEFAULT_EPSILON,
            b: 12.0 / mu_ex.sqrt(),
            npoints: DEFAULT_NPOINTS,
        },
        tasks: vec![Task::Verify, Task::Spectrum, Task::Groundstate, Task::Ladder],
        levels: 4,
        tolerances: Tolerances::default(),
    })
}
