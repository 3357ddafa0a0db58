//! Epsilon-sweep orchestration, summary statistics, and CSV emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::geometry::MovingDomain;
use crate::model::ModelParams;
use crate::presets::{Comparison, ExperimentPreset};
use crate::sharp::{
    integrate_caps, integrate_interval, sharp_energy, CapTrajectory, EventKind,
    IntervalTrajectory, SharpCapState, SharpIntervalState, SphereModelParams,
};
use crate::solver::{
    default_n_cells, initialize, run, RunResult, SolverConfig,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("solver failure (epsilon = {epsilon}, mbar = {mbar}): {message}")]
    Solver {
        epsilon: f64,
        mbar: f64,
        message: String,
    },
    #[error("sharp solver failure: {0}")]
    Sharp(String),
    #[error("sweep report needs at least 2 epsilon values, got {0}")]
    NeedsSweep(usize),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// One phase-field run of the sweep.
#[derive(Debug)]
pub struct SingleRun {
    pub epsilon: f64,
    pub mbar: f64,
    pub result: RunResult,
}

#[derive(Debug)]
pub enum SharpResult {
    None,
    Interval(IntervalTrajectory),
    Caps(CapTrajectory),
}

#[derive(Debug)]
pub struct PresetOutcome {
    pub runs: Vec<SingleRun>,
    pub sharp: SharpResult,
}

fn sharp_companion(p: &ExperimentPreset) -> Result<SharpResult, LabError> {
    match p.comparison {
        Comparison::None => Ok(SharpResult::None),
        Comparison::SharpInterval {
            lambda0,
            orientation,
        } => {
            let initial = SharpIntervalState {
                lambda: lambda0,
                t: 0.0,
                orientation,
            };
            let dt = p.dt.unwrap_or(1e-3);
            integrate_interval(initial, &p.domain, &p.params, p.t_end, dt)
                .map(SharpResult::Interval)
                .map_err(|e| LabError::Sharp(e.to_string()))
        }
        Comparison::SharpCaps { theta1, theta2 } => {
            let vbar = match p.domain {
                MovingDomain::UnitSphereTangential { vbar } => vbar,
                _ => 0.0,
            };
            let sp = SphereModelParams::quartic_pm1(vbar, p.params.mbar);
            let initial = SharpCapState {
                theta1,
                theta2,
                t: 0.0,
            };
            let dt = p.dt.unwrap_or(1e-4);
            integrate_caps(initial, &sp, p.t_end, dt)
                .map(SharpResult::Caps)
                .map_err(|e| LabError::Sharp(e.to_string()))
        }
    }
}

/// Execute all runs of a preset (phase-field sweep plus sharp companion).
pub fn execute_preset(p: &ExperimentPreset) -> Result<PresetOutcome, LabError> {
    let mbars = if p.mbar_list.is_empty() {
        vec![p.params.mbar]
    } else {
        p.mbar_list.clone()
    };
    let mut runs = Vec::new();
    for &eps in &p.epsilon_list {
        for &mbar in &mbars {
            let params = ModelParams {
                epsilon: eps,
                mbar,
                ..p.params
            };
            let fail = |message: String| LabError::Solver {
                epsilon: eps,
                mbar,
                message,
            };
            let n_cells = p
                .n_cells
                .unwrap_or_else(|| default_n_cells(&p.domain, eps, p.t_end));
            let mut config = SolverConfig::defaults(&params, p.t_end);
            if let Some(dt) = p.dt {
                config.dt = dt;
            } else if p.dt_layer_scaled {
                config.dt = eps * eps / 4.0;
            }
            config.output_times = p.output_times.clone();
            let state = initialize(&p.domain, &params, &p.initial.profile(eps), n_cells)
                .map_err(|e| fail(e.to_string()))?;
            let result =
                run(&p.domain, &params, &config, state).map_err(|e| fail(e.to_string()))?;
            runs.push(SingleRun {
                epsilon: eps,
                mbar,
                result,
            });
        }
    }
    let sharp = sharp_companion(p)?;
    Ok(PresetOutcome { runs, sharp })
}

/// Linear interpolation of the sharp interval trajectory.
pub fn interval_lambda_at(traj: &IntervalTrajectory, t: f64) -> Option<f64> {
    sample(&traj.rows, t, |r| r.t, |r| r.lambda)
}

/// Linear interpolation of the sharp-cap energy.
pub fn cap_energy_at(traj: &CapTrajectory, t: f64) -> Option<f64> {
    sample(&traj.rows, t, |r| r.t, sharp_energy)
}

fn sample<T>(rows: &[T], t: f64, time: impl Fn(&T) -> f64, val: impl Fn(&T) -> f64) -> Option<f64> {
    let first = rows.first()?;
    if t < time(first) - 1e-9 || t > time(rows.last()?) + 1e-9 {
        return None;
    }
    let i = rows.partition_point(|r| time(r) < t);
    if i == 0 {
        return Some(val(first));
    }
    if i == rows.len() {
        return Some(val(&rows[rows.len() - 1]));
    }
    let (a, b) = (&rows[i - 1], &rows[i]);
    let (ta, tb) = (time(a), time(b));
    if tb - ta < 1e-14 {
        return Some(val(b));
    }
    let s = (t - ta) / (tb - ta);
    Some(val(a) * (1.0 - s) + val(b) * s)
}

#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub epsilon: f64,
    pub mbar: f64,
    pub final_interfaces: Vec<f64>,
    /// Distance from the crossing nearest the sharp prediction (interval
    /// comparisons only).
    pub interface_error: Option<f64>,
    /// Max over time of |E_eps(t) - E_0(t)| (sharp comparisons only).
    pub max_energy_gap: Option<f64>,
    /// |E_eps - E_0| at the final recorded time.
    pub final_energy_gap: Option<f64>,
    pub mass_drift: f64,
}

#[derive(Debug)]
pub struct SweepReport {
    pub rows: Vec<SummaryRow>,
    /// Whether the leading error (interface error, else final energy gap)
    /// strictly decreases as epsilon decreases.
    pub errors_monotone: bool,
}

fn summarize_run(run: &SingleRun, sharp: &SharpResult) -> SummaryRow {
    let trace = &run.result.trace;
    let first = trace.first().expect("trace never empty");
    let last = trace.last().expect("trace never empty");
    let mass_scale = first.mass.abs().max(1.0);
    let mass_drift = trace
        .iter()
        .map(|r| (r.mass - first.mass).abs())
        .fold(0.0, f64::max)
        / mass_scale;

    let mut interface_error = None;
    let mut max_energy_gap = None;
    let mut final_energy_gap = None;
    match sharp {
        SharpResult::None => {}
        SharpResult::Interval(traj) => {
            if let Some(lam) = interval_lambda_at(traj, last.t) {
                interface_error = last
                    .interfaces
                    .iter()
                    .map(|&x| (x - lam).abs())
                    .fold(None, |acc: Option<f64>, d| {
                        Some(acc.map_or(d, |a| a.min(d)))
                    });
            }
        }
        SharpResult::Caps(traj) => {
            let mut max_gap: Option<f64> = None;
            for r in trace {
                if let Some(e0) = cap_energy_at(traj, r.t) {
                    let gap = (r.energy - e0).abs();
                    max_gap = Some(max_gap.map_or(gap, |m: f64| m.max(gap)));
                    final_energy_gap = Some(gap);
                }
            }
            max_energy_gap = max_gap;
        }
    }
    SummaryRow {
        epsilon: run.epsilon,
        mbar: run.mbar,
        final_interfaces: last.interfaces.clone(),
        interface_error,
        max_energy_gap,
        final_energy_gap,
        mass_drift,
    }
}

/// Per-run summary rows plus the epsilon-monotonicity flag. Requires a
/// genuine sweep (at least two epsilon values).
pub fn sweep_report(outcome: &PresetOutcome) -> Result<SweepReport, LabError> {
    let mut eps: Vec<f64> = outcome.runs.iter().map(|r| r.epsilon).collect();
    eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eps.dedup();
    if eps.len() < 2 {
        return Err(LabError::NeedsSweep(eps.len()));
    }
    let rows: Vec<SummaryRow> = outcome
        .runs
        .iter()
        .map(|r| summarize_run(r, &outcome.sharp))
        .collect();
    // Errors ordered by decreasing epsilon must strictly decrease.
    let err_of = |e: f64| -> Option<f64> {
        rows.iter()
            .find(|r| r.epsilon == e)
            .and_then(|r| r.interface_error.or(r.final_energy_gap))
    };
    let errs: Vec<Option<f64>> = eps.iter().map(|&e| err_of(e)).collect();
    let errors_monotone = errs.iter().all(|e| e.is_some())
        && errs.windows(2).all(|w| w[1].unwrap() < w[0].unwrap());
    Ok(SweepReport {
        rows,
        errors_monotone,
    })
}

/// All summary rows regardless of sweep size (used for single-run presets).
pub fn summary_rows(outcome: &PresetOutcome) -> Vec<SummaryRow> {
    outcome
        .runs
        .iter()
        .map(|r| summarize_run(r, &outcome.sharp))
        .collect()
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn write_file(path: &Path, text: &str) -> Result<(), LabError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| LabError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run_dir(base: &Path, run: &SingleRun, multi_mbar: bool) -> PathBuf {
    if multi_mbar {
        base.join(format!("eps{}-mbar{}", run.epsilon, run.mbar))
    } else {
        base.join(format!("eps{}", run.epsilon))
    }
}

fn snapshot_csv(run: &SingleRun) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for (t, state) in &run.result.snapshots {
        let mut s = String::from("coord,u,w\n");
        for i in 0..state.u.len() {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt(state.mesh.nodes[i]),
                fmt(state.u[i]),
                fmt(state.w[i])
            );
        }
        files.push((format!("t{t:.4}.csv"), s));
    }
    files
}

fn trace_csv(run: &SingleRun) -> String {
    let mut s = String::from("t,energy,mass,iface1,iface2\n");
    for r in &run.result.trace {
        let col = |i: usize| r.interfaces.get(i).map(|&x| fmt(x)).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{}", fmt(r.t), fmt(r.energy), fmt(r.mass), col(0), col(1));
    }
    s
}

fn event_label(kind: EventKind) -> &'static str {
    match kind {
        EventKind::NorthPole => "north-pole",
        EventKind::SouthPole => "south-pole",
        EventKind::Collision => "collision",
        EventKind::LeftEnd => "left-end",
        EventKind::RightEnd => "right-end",
    }
}

fn sharp_csv(sharp: &SharpResult) -> Option<String> {
    match sharp {
        SharpResult::None => None,
        SharpResult::Interval(traj) => {
            let mut s = String::from("t,lambda\n");
            for r in &traj.rows {
                let _ = writeln!(s, "{},{}", fmt(r.t), fmt(r.lambda));
            }
            if let Some(ev) = &traj.event {
                let _ = writeln!(s, "event,{},{}", fmt(ev.time), event_label(ev.kind));
            }
            Some(s)
        }
        SharpResult::Caps(traj) => {
            let mut s = String::from("t,theta1,theta2,energy\n");
            for r in &traj.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    fmt(r.t),
                    fmt(r.theta1),
                    fmt(r.theta2),
                    fmt(sharp_energy(r))
                );
            }
            if let Some(ev) = &traj.event {
                let _ = writeln!(s, "event,{},{}", fmt(ev.time), event_label(ev.kind));
            }
            Some(s)
        }
    }
}

fn summary_csv(rows: &[SummaryRow], monotone: Option<bool>) -> String {
    let mut s = String::from(
        "epsilon,mbar,iface1,iface2,interface_error,max_energy_gap,final_energy_gap,mass_drift,errors_monotone\n",
    );
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    let flag = monotone.map(|m| m.to_string()).unwrap_or_default();
    for r in rows {
        let iface = |i: usize| r.final_interfaces.get(i).map(|&x| fmt(x)).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.epsilon,
            r.mbar,
            iface(0),
            iface(1),
            opt(r.interface_error),
            opt(r.max_energy_gap),
            opt(r.final_energy_gap),
            fmt(r.mass_drift),
            flag,
        );
    }
    s
}

fn gnuplot_script(p: &ExperimentPreset, outcome: &PresetOutcome, multi_mbar: bool) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    for run in &outcome.runs {
        let dir = run_dir(Path::new("."), run, multi_mbar);
        let dir = dir.display();
        for (t, _) in &run.result.snapshots {
            let _ = writeln!(
                s,
                "plot '{dir}/t{t:.4}.csv' using 1:2 with lines title 'u, eps={}, t={t}'\npause -1",
                run.epsilon
            );
        }
        let _ = writeln!(
            s,
            "plot '{dir}/trace.csv' using 1:2 with lines title 'energy, eps={}'\npause -1",
            run.epsilon
        );
    }
    if !matches!(outcome.sharp, SharpResult::None) {
        let col = match outcome.sharp {
            SharpResult::Caps(_) => 4,
            _ => 2,
        };
        let _ = writeln!(
            s,
            "plot './sharp.csv' using 1:{col} with lines title 'sharp ({})'\npause -1",
            p.name
        );
    }
    s
}

/// Outcome of `run_preset`, carrying the process exit code.
#[derive(Debug)]
pub struct RunReport {
    pub outcome: PresetOutcome,
    pub exit_code: i32,
    pub messages: Vec<String>,
}

/// Execute a preset and write its artifact files under `p.out_dir`.
/// Exit codes: 0 success, 2 solver failure, 3 sharp singular event before
/// t_end (phase-field runs still complete).
pub fn run_preset(p: &ExperimentPreset, gnuplot: bool) -> Result<RunReport, LabError> {
    let outcome = execute_preset(p)?;
    let base = PathBuf::from(&p.out_dir);
    let multi_mbar = !p.mbar_list.is_empty();
    let mut messages = Vec::new();

    for run in &outcome.runs {
        let dir = run_dir(&base, run, multi_mbar);
        for (name, text) in snapshot_csv(run) {
            write_file(&dir.join(format!("{}_{name}", p.name)), &text)?;
        }
        write_file(&dir.join("trace.csv"), &trace_csv(run))?;
    }
    if let Some(text) = sharp_csv(&outcome.sharp) {
        write_file(&base.join("sharp.csv"), &text)?;
    }
    let report = if outcome.runs.len() >= 2 {
        sweep_report(&outcome).ok()
    } else {
        None
    };
    let rows = report
        .as_ref()
        .map(|r| r.rows.clone())
        .unwrap_or_else(|| summary_rows(&outcome));
    write_file(
        &base.join("summary.csv"),
        &summary_csv(&rows, report.as_ref().map(|r| r.errors_monotone)),
    )?;
    if gnuplot {
        write_file(&base.join("plot.gp"), &gnuplot_script(p, &outcome, multi_mbar))?;
    }

    let event = match &outcome.sharp {
        SharpResult::Interval(traj) => traj.event.as_ref(),
        SharpResult::Caps(traj) => traj.event.as_ref(),
        SharpResult::None => None,
    };
    let exit_code = if let Some(ev) = event {
        messages.push(format!(
            "sharp solver hit a {} singular event at t = {:.6}",
            event_label(ev.kind),
            ev.time
        ));
        3
    } else {
        0
    };
    Ok(RunReport {
        outcome,
        exit_code,
        messages,
    })
}
