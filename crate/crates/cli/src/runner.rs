//! Executes the tasks requested by a scenario in the fixed order
//! verify → spectrum → groundstate → ladder, recording partial failures and
//! continuing.

use shapeinv::{
    discretize, energy_ladder, excited_state, extract_ck_with, low_spectrum,
    lowest_eigenvalue_convergence, partner_identity, predicted_ck, residual_determining,
    zero_mode_basis, zero_mode_residual, GridDomain, Model,
};

use crate::config::{ScenarioConfig, Task};
use crate::error::Result;
use crate::report::{
    GroundstateSection, LadderLevel, LadderSection, RunReport, SpectrumSection, TaskReport,
    TaskStatus, VerifySection,
};

/// Grid used for the verify task: the scenario domain shrunk by a safety
/// margin (finite differences need one stencil width inside the validity
/// window, and the residual report is only meaningful on resolved scales),
/// capped at a moderate node count.
fn verify_grid(config: &ScenarioConfig) -> Result<GridDomain> {
    let width = config.domain.b - config.domain.a;
    let margin = 0.05 * width;
    let npoints = config.domain.npoints.clamp(64, 501);
    GridDomain::new(
        config.domain.a + margin,
        config.domain.b - margin,
        npoints,
    )
    .map_err(crate::error::CliError::Numerical)
}

fn run_verify(config: &ScenarioConfig, model: &Model) -> Result<TaskReport> {
    let grid = verify_grid(config)?;
    let tol = config.tolerances.verify;
    let (rq, rp) = residual_determining(model, &grid)?;
    let extracted = extract_ck_with(model, config.k, &grid, tol)?;
    let predicted = predicted_ck(model, config.k);
    let ck_gap = (extracted - predicted).abs();
    let partner_defect = partner_identity(model, config.k, &grid)?;
    let ok = ck_gap <= tol && partner_defect <= tol;
    Ok(TaskReport {
        status: if ok {
            TaskStatus::Ok
        } else {
            TaskStatus::ToleranceFailed
        },
        verify: Some(VerifySection {
            q_residual: rq.max_abs,
            p_residual: rp.max_abs,
            residual_grid_spacing: rq.grid_spacing,
            extracted_ck: extracted,
            predicted_ck: predicted,
            ck_gap,
            partner_defect,
        }),
        spectrum: None,
        groundstate: None,
        ladder: None,
        error: None,
    })
}

fn run_spectrum(config: &ScenarioConfig, model: &Model) -> Result<TaskReport> {
    let grid = config.grid()?;
    let h = discretize(model, config.k, config.shift, &grid)?;
    let count = (2 * config.levels).min(h.size());
    let eigenvalues = low_spectrum(&h, count)?;
    let e0 = eigenvalues[0];
    let ladder_predictions: Vec<f64> = eigenvalues
        .iter()
        .map(|&e| {
            (0..=config.levels + 2)
                .map(|n| energy_ladder(model, config.k, e0, n))
                .min_by(|a, b| {
                    (a - e).abs().partial_cmp(&(b - e).abs()).expect("finite")
                })
                .expect("nonempty")
        })
        .collect();
    let (_, _, _, convergence_ratio) =
        lowest_eigenvalue_convergence(model, config.k, config.shift, &grid)?;
    // Worst zero-mode residual as a consistency diagnostic for the same grid.
    let residual_zero_mode = zero_mode_basis(model, config.k, &grid)
        .ok()
        .map(|modes| {
            modes
                .iter()
                .filter_map(|m| zero_mode_residual(model, config.k, m).ok())
                .fold(0.0_f64, f64::max)
        })
        .unwrap_or(f64::NAN);
    let report = shapeinv::SpectralReport {
        eigenvalues,
        ladder_predictions,
        residual_zero_mode,
        convergence_ratio,
    };
    Ok(TaskReport {
        status: TaskStatus::Ok,
        verify: None,
        spectrum: Some(SpectrumSection {
            shift: config.shift,
            eigenvalues: report.eigenvalues,
            ladder_predictions: report.ladder_predictions,
            convergence_ratio: report.convergence_ratio,
            residual_zero_mode: if report.residual_zero_mode.is_nan() {
                None
            } else {
                Some(report.residual_zero_mode)
            },
        }),
        groundstate: None,
        ladder: None,
        error: None,
    })
}

fn run_groundstate(config: &ScenarioConfig, model: &Model) -> Result<TaskReport> {
    let grid = config.grid()?;
    let modes = zero_mode_basis(model, config.k, &grid)?;
    let h = discretize(model, config.k, config.shift, &grid)?;
    let mut residuals = Vec::new();
    let mut rqs = Vec::new();
    let mut samples = Vec::new();
    for m in &modes {
        residuals.push(zero_mode_residual(model, config.k, m)?);
        rqs.push(h.rayleigh_quotient(m)?);
        let rows: Vec<Vec<f64>> = (0..grid.npoints())
            .map(|i| {
                let mut row = Vec::with_capacity(1 + 2 * m.channels());
                row.push(grid.node(i));
                for c in 0..m.channels() {
                    row.push(m.values()[(i, c)].re);
                    row.push(m.values()[(i, c)].im);
                }
                row
            })
            .collect();
        samples.push(rows);
    }
    let tol = config.tolerances.groundstate_residual;
    let ok = !modes.is_empty() && residuals.iter().all(|&r| r <= tol);
    Ok(TaskReport {
        status: if ok {
            TaskStatus::Ok
        } else {
            TaskStatus::ToleranceFailed
        },
        verify: None,
        spectrum: None,
        groundstate: Some(GroundstateSection {
            dimension: modes.len(),
            residuals,
            rayleigh_quotients: rqs,
            samples,
        }),
        ladder: None,
        error: None,
    })
}

fn run_ladder(config: &ScenarioConfig, model: &Model) -> Result<TaskReport> {
    let grid = config.grid()?;
    let h = discretize(model, config.k, config.shift, &grid)?;
    let e0 = low_spectrum(&h, 1)?[0];
    let zero_modes = zero_mode_basis(model, config.k, &grid)?;
    let mut levels = Vec::new();
    let mut all_ok = true;
    for n in 1..=config.levels {
        let prediction = energy_ladder(model, config.k, e0, n);
        let states = excited_state(model, config.k, n, &grid)?;
        if states.is_empty() {
            all_ok = false;
            levels.push(LadderLevel {
                level: n,
                prediction,
                rayleigh_quotients: Vec::new(),
                max_gap: f64::NAN,
                max_groundstate_overlap: f64::NAN,
            });
            continue;
        }
        let mut rqs = Vec::new();
        let mut max_gap = 0.0_f64;
        let mut max_overlap = 0.0_f64;
        for s in &states {
            let rq = h.rayleigh_quotient(s)?;
            max_gap = max_gap.max((rq - prediction).abs() / prediction.abs().max(1.0));
            rqs.push(rq);
            for z in &zero_modes {
                max_overlap = max_overlap.max(z.inner(s).norm());
            }
        }
        if max_gap > config.tolerances.ladder_gap {
            all_ok = false;
        }
        levels.push(LadderLevel {
            level: n,
            prediction,
            rayleigh_quotients: rqs,
            max_gap,
            max_groundstate_overlap: max_overlap,
        });
    }
    Ok(TaskReport {
        status: if all_ok {
            TaskStatus::Ok
        } else {
            TaskStatus::ToleranceFailed
        },
        verify: None,
        spectrum: None,
        groundstate: None,
        ladder: Some(LadderSection {
            base_energy: e0,
            levels,
        }),
        error: None,
    })
}

/// Runs the requested tasks in order; per-task failures are recorded and the
/// run continues.
pub fn run(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let model = config.to_model()?;
    let mut report = RunReport::new();
    let order = [Task::Verify, Task::Spectrum, Task::Groundstate, Task::Ladder];
    for task in order {
        if !config.tasks.contains(&task) {
            continue;
        }
        let result = match task {
            Task::Verify => run_verify(config, &model),
            Task::Spectrum => run_spectrum(config, &model),
            Task::Groundstate => run_groundstate(config, &model),
            Task::Ladder => run_ladder(config, &model),
        };
        let entry = match result {
            Ok(r) => r,
            Err(e) => TaskReport::error(e.to_string()),
        };
        report.tasks.insert(task.name().to_string(), entry);
    }
    Ok(report)
}
