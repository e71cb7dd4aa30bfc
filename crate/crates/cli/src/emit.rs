//! Report emission: a JSON summary and plot-ready CSV tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
    Both,
}

/// Writes the report artifacts into `dir`, returning the created paths.
/// JSON goes to `summary.json`; the spectrum table to `spectrum.csv`; the
/// ladder table to `ladder.csv`; zero-mode samples to `groundstate.csv`
/// (additional modes get a numeric suffix).
pub fn emit(report: &RunReport, format: EmitFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    if matches!(format, EmitFormat::Json | EmitFormat::Both) {
        let path = dir.join("summary.json");
        std::fs::write(&path, report.to_json())?;
        written.push(path);
    }

    if matches!(format, EmitFormat::Csv | EmitFormat::Both) {
        if let Some(task) = report.tasks.get("spectrum") {
            if let Some(s) = &task.spectrum {
                let mut text = String::from("n,eigenvalue,ladder_prediction,abs_gap\n");
                for (i, (e, p)) in s
                    .eigenvalues
                    .iter()
                    .zip(s.ladder_predictions.iter())
                    .enumerate()
                {
                    writeln!(text, "{i},{e},{p},{}", (e - p).abs()).expect("string write");
                }
                let path = dir.join("spectrum.csv");
                std::fs::write(&path, text)?;
                written.push(path);
            }
        }

        if let Some(task) = report.tasks.get("groundstate") {
            if let Some(g) = &task.groundstate {
                for (mode, rows) in g.samples.iter().enumerate() {
                    let channels = rows.first().map_or(0, |r| (r.len() - 1) / 2);
                    let mut text = String::from("x");
                    for c in 1..=channels {
                        write!(text, ",re_psi_{c},im_psi_{c}").expect("string write");
                    }
                    text.push('\n');
                    for row in rows {
                        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                        writeln!(text, "{}", cells.join(",")).expect("string write");
                    }
                    let name = if mode == 0 {
                        "groundstate.csv".to_string()
                    } else {
                        format!("groundstate{}.csv", mode + 1)
                    };
                    let path = dir.join(name);
                    std::fs::write(&path, text)?;
                    written.push(path);
                }
            }
        }

        if let Some(task) = report.tasks.get("ladder") {
            if let Some(l) = &task.ladder {
                let mut text = String::from("n,rayleigh_quotient,ladder_prediction,abs_gap\n");
                for level in &l.levels {
                    for rq in &level.rayleigh_quotients {
                        writeln!(
                            text,
                            "{},{rq},{},{}",
                            level.level,
                            level.prediction,
                            (rq - level.prediction).abs()
                        )
                        .expect("string write");
                    }
                }
                let path = dir.join("ladder.csv");
                std::fs::write(&path, text)?;
                written.push(path);
            }
        }
    }

    Ok(written)
}
