//! Scenario description: JSON with an explicit schema tag, complex numbers as
//! `[re, im]` pairs, and Φ given by its upper triangle (hermiticity is
//! re-validated on load rather than trusted).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use shapeinv::{GridDomain, Model, NuClass, QEntry};

use crate::error::{CliError, Result};

pub const SCENARIO_SCHEMA: &str = "shapeinv-scenario/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Verify,
    Spectrum,
    Groundstate,
    Ladder,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Verify => "verify",
            Task::Spectrum => "spectrum",
            Task::Groundstate => "groundstate",
            Task::Ladder => "ladder",
        }
    }

    pub fn parse(s: &str) -> Result<Task> {
        match s {
            "verify" => Ok(Task::Verify),
            "spectrum" => Ok(Task::Spectrum),
            "groundstate" => Ok(Task::Groundstate),
            "ladder" => Ok(Task::Ladder),
            other => Err(CliError::Config(format!("unknown task '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NuSpec {
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntrySpec {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub nu: NuSpec,
    pub entries: Vec<EntrySpec>,
    pub mu: f64,
    /// Row-major upper triangle of Φ including the diagonal, complex entries
    /// as [re, im].
    pub phi_upper: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DomainSpec {
    pub a: f64,
    pub b: f64,
    pub npoints: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identity-proportionality / constancy threshold for the verify task.
    #[serde(default = "default_verify_tol")]
    pub verify: f64,
    /// Relative zero-mode residual bound for the groundstate task.
    #[serde(default = "default_groundstate_tol")]
    pub groundstate_residual: f64,
    /// Relative gap between raised-state Rayleigh quotients and ladder
    /// predictions for the ladder task.
    #[serde(default = "default_ladder_tol")]
    pub ladder_gap: f64,
}

fn default_verify_tol() -> f64 {
    1e-9
}

fn default_groundstate_tol() -> f64 {
    1e-6
}

fn default_ladder_tol() -> f64 {
    2e-2
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            verify: default_verify_tol(),
            groundstate_residual: default_groundstate_tol(),
            ladder_gap: default_ladder_tol(),
        }
    }
}

fn default_levels() -> usize {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema: String,
    pub model: ModelSpec,
    pub k: f64,
    pub shift: f64,
    pub domain: DomainSpec,
    pub tasks: Vec<Task>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCENARIO_SCHEMA {
            return Err(CliError::Config(format!(
                "unsupported schema '{}', expected '{SCENARIO_SCHEMA}'",
                self.schema
            )));
        }
        if self.tasks.is_empty() {
            return Err(CliError::Config("tasks must be nonempty".into()));
        }
        if self.levels == 0 {
            return Err(CliError::Config("levels must be at least 1".into()));
        }
        self.to_model()?;
        self.grid()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<GridDomain> {
        GridDomain::new(self.domain.a, self.domain.b, self.domain.npoints)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Rebuilds the model, re-checking every invariant.
    pub fn to_model(&self) -> Result<Model> {
        let nu = match (self.model.nu.class.as_str(), self.model.nu.lambda) {
            ("positive", Some(l)) => NuClass::positive(l),
            ("negative", Some(l)) => NuClass::negative(l),
            ("zero", None) => Ok(NuClass::zero()),
            ("zero", Some(_)) => {
                return Err(CliError::Config("nu class 'zero' takes no lambda".into()))
            }
            (c @ ("positive" | "negative"), None) => {
                return Err(CliError::Config(format!("nu class '{c}' needs lambda")))
            }
            (other, _) => {
                return Err(CliError::Config(format!(
                    "unknown nu class '{other}' (expected positive|negative|zero)"
                )))
            }
        }
        .map_err(|e| CliError::Config(e.to_string()))?;

        let mut entries = Vec::with_capacity(self.model.entries.len());
        for (i, e) in self.model.entries.iter().enumerate() {
            let needs_gamma = |g: Option<f64>| {
                g.ok_or_else(|| CliError::Config(format!("entry {i} ('{}') needs gamma", e.variant)))
            };
            let entry = match e.variant.as_str() {
                "tan_pole" => QEntry::TanPole {
                    gamma: needs_gamma(e.gamma)?,
                },
                "tanh" => QEntry::Tanh {
                    gamma: needs_gamma(e.gamma)?,
                },
                "coth" => QEntry::Coth {
                    gamma: needs_gamma(e.gamma)?,
                },
                "const_plus" => QEntry::ConstPlus,
                "const_minus" => QEntry::ConstMinus,
                "inv_pole" => QEntry::InvPole {
                    gamma: needs_gamma(e.gamma)?,
                },
                "zero" => QEntry::ZeroEntry,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown entry variant '{other}'"
                    )))
                }
            };
            entries.push(entry);
        }

        let n = entries.len();
        let expected = n * (n + 1) / 2;
        if self.model.phi_upper.len() != expected {
            return Err(CliError::Config(format!(
                "phi_upper must list the {expected} upper-triangle entries of a {n}x{n} matrix, got {}",
                self.model.phi_upper.len()
            )));
        }
        let mut phi = DMatrix::<Complex64>::zeros(n, n);
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                let z = Complex64::new(self.model.phi_upper[idx][0], self.model.phi_upper[idx][1]);
                phi[(i, j)] = z;
                phi[(j, i)] = z.conj();
                idx += 1;
            }
        }
        for i in 0..n {
            if phi[(i, i)].im != 0.0 {
                return Err(CliError::Config(format!(
                    "diagonal phi entry {i} must be real"
                )));
            }
        }

        Model::new(nu, entries, self.model.mu, phi).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Serializes a model back into its wire form (canonical channel order).
pub fn model_spec(model: &Model) -> ModelSpec {
    let nu = match model.nu_class() {
        NuClass::PositiveLambda { lambda } => NuSpec {
            class: "positive".into(),
            lambda: Some(*lambda),
        },
        NuClass::NegativeLambda { lambda } => NuSpec {
            class: "negative".into(),
            lambda: Some(*lambda),
        },
        NuClass::Zero => NuSpec {
            class: "zero".into(),
            lambda: None,
        },
    };
    let entries = model
        .entries()
        .iter()
        .map(|e| match e {
            QEntry::TanPole { gamma } => EntrySpec {
                variant: "tan_pole".into(),
                gamma: Some(*gamma),
            },
            QEntry::Tanh { gamma } => EntrySpec {
                variant: "tanh".into(),
                gamma: Some(*gamma),
            },
            QEntry::Coth { gamma } => EntrySpec {
                variant: "coth".into(),
                gamma: Some(*gamma),
            },
            QEntry::ConstPlus => EntrySpec {
                variant: "const_plus".into(),
                gamma: None,
            },
            QEntry::ConstMinus => EntrySpec {
                variant: "const_minus".into(),
                gamma: None,
            },
            QEntry::InvPole { gamma } => EntrySpec {
                variant: "inv_pole".into(),
                gamma: Some(*gamma),
            },
            QEntry::ZeroEntry => EntrySpec {
                variant: "zero".into(),
                gamma: None,
            },
        })
        .collect();
    let n = model.dimension();
    let mut phi_upper = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let z = model.phi()[(i, j)];
            phi_upper.push([z.re, z.im]);
        }
    }
    ModelSpec {
        nu,
        entries,
        mu: model.mu(),
        phi_upper,
    }
}
