//! Commands behind the `msflow` binary: load a config, run it, write artifacts.
//!
//! Files are written to `<name>.tmp` and renamed into place, so a directory
//! never holds a half-written artifact.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, Equation, ExperimentConfig, Kind};
use crate::dynamics::{
    curve_svg, evolve_ms, evolve_quasilinear, linearization_text, linearize_at, ljapunov_trace, omega_limit_report,
    termination_text, trajectory_csv, DynamicsError, EventKind, Termination, Trajectory, Verdict,
};
use crate::models::{make_second_order, MsState};
use crate::stepper::{QuasilinearProblem, Space};
use crate::verify::{self, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BREAKDOWN: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("unknown verification suite {0:?} (expected geometry, elliptic, stepper, dynamics or all)")]
    UnknownSuite(String),
}

/// What a finished run left behind.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub termination: Termination,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        match self.termination {
            Termination::Breakdown { .. } => EXIT_BREAKDOWN,
            _ => EXIT_OK,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Write `contents` to `dir/name` through a temporary file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    std::fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, &path).map_err(io_err(&path))?;
    Ok(path)
}

/// Indices of `count` snapshots spread evenly over `len` states, ends included.
fn snapshot_indices(len: usize, count: usize) -> Vec<usize> {
    match (len, count) {
        (0, _) | (_, 0) => Vec::new(),
        (_, 1) => vec![len - 1],
        _ => {
            let mut idx: Vec<usize> = (0..count).map(|i| (i * (len - 1) + (count - 1) / 2) / (count - 1)).collect();
            idx.dedup();
            idx
        }
    }
}

fn ms_report(cfg: &ExperimentConfig, traj: &Trajectory<MsState>) -> Result<String, CliError> {
    let mut out = String::new();
    writeln!(out, "kind ms").unwrap();
    writeln!(out, "termination {}", termination_text(&traj.termination)).unwrap();
    writeln!(out, "recorded {}", traj.len()).unwrap();
    writeln!(out, "end_time {:.10e}", traj.times.last().copied().unwrap_or(0.0)).unwrap();
    writeln!(out, "p {} mu {}", cfg.params.p, cfg.params.mu).unwrap();
    let lj = ljapunov_trace(traj);
    writeln!(out, "perimeter_monotone {}", lj.monotone()).unwrap();
    writeln!(out, "perimeter_max_increase {:.6e}", lj.max_increase).unwrap();
    writeln!(out, "dissipation_consistency {:.6e}", lj.max_consistency()).unwrap();
    let area = &traj.channels.area;
    if let (Some(a0), Some(a1)) = (area.first(), area.last()) {
        writeln!(out, "area_drift {:.6e}", (a1 - a0).abs() / a0).unwrap();
    }
    let rep = omega_limit_report(traj)?;
    let verdict = match &rep.verdict {
        Verdict::Converged => "converged".to_string(),
        Verdict::InProgress => "in-progress".to_string(),
        Verdict::NonConvergent(why) => format!("non-convergent ({why})"),
    };
    writeln!(out, "verdict {verdict}").unwrap();
    writeln!(out, "limit_center {:.10e} {:.10e}", rep.limit.center.x, rep.limit.center.y).unwrap();
    writeln!(out, "limit_radius {:.10e}", rep.limit.radius).unwrap();
    match rep.rate {
        Some(r) => writeln!(out, "rate {:.6e} quality {:.6}", r.omega, r.quality).unwrap(),
        None => writeln!(out, "rate none").unwrap(),
    }
    writeln!(out, "events {}", traj.events.len()).unwrap();
    for ev in &traj.events {
        let EventKind::Reparameterized { center, radius, mismatch } = ev.kind;
        writeln!(
            out,
            "recentered t {:.10e} center {:.10e} {:.10e} radius {:.10e} mismatch {:.3e}",
            ev.time, center.0, center.1, radius, mismatch
        )
        .unwrap();
    }
    Ok(out)
}

fn run_ms(cfg: &ExperimentConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let state = cfg.ms_state()?;
    let traj = evolve_ms(state, &cfg.evolve_options())?;
    let mut files = vec![write_atomic(dir, "trajectory.csv", &trajectory_csv(&traj))?];
    for (i, idx) in snapshot_indices(traj.len(), cfg.run.snapshots).into_iter().enumerate() {
        let s = &traj.states[idx];
        let svg = curve_svg(&s.interface().map_err(DynamicsError::from)?, s.container());
        files.push(write_atomic(dir, &format!("snapshot_{i:03}.svg"), &svg)?);
    }
    files.push(write_atomic(dir, "report.txt", &ms_report(cfg, &traj)?)?);
    Ok(RunSummary { dir: dir.to_path_buf(), termination: traj.termination, files })
}

type Coefficient = fn(f64, f64) -> f64;

fn one(_: f64, _: f64) -> f64 {
    1.0
}
fn zero(_: f64, _: f64) -> f64 {
    0.0
}
fn square(u: f64, _: f64) -> f64 {
    u * u
}
fn one_plus_square(u: f64, _: f64) -> f64 {
    1.0 + u * u
}

fn coefficients(eq: Equation) -> (Coefficient, Coefficient) {
    match eq {
        Equation::Heat => (one, zero),
        Equation::Reaction => (one, square),
        Equation::NonlinearDiffusion => (one_plus_square, zero),
    }
}

fn run_quasilinear(cfg: &ExperimentConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let q = cfg.quasilinear1d.as_ref().ok_or_else(|| ConfigError::Invalid {
        key: "quasilinear1d".into(),
        message: "section missing".into(),
    })?;
    let (a, f) = coefficients(q.equation);
    let problem = make_second_order(a, f, q.nodes, cfg.params.p, cfg.params.mu);
    let u0 = cfg.quasilinear_initial()?;
    let traj = evolve_quasilinear(&problem, &u0, cfg.run.horizon, &cfg.continuation_policy())?;

    let mut files = vec![write_atomic(dir, "trajectory.csv", &trajectory_csv(&traj))?];
    let last = traj.states.last().map(Vec::as_slice).unwrap_or(&u0);
    let h = 1.0 / (q.nodes + 1) as f64;
    let mut state = String::from("x,u\n");
    for (i, u) in last.iter().enumerate() {
        writeln!(state, "{:?},{:?}", (i + 1) as f64 * h, u).unwrap();
    }
    files.push(write_atomic(dir, "final_state.csv", &state)?);

    let norm = |u: &[f64]| problem.norms().norm(Space::Trace, u);
    let mut report = String::new();
    writeln!(report, "kind quasilinear1d").unwrap();
    writeln!(report, "equation {:?}", q.equation).unwrap();
    writeln!(report, "termination {}", termination_text(&traj.termination)).unwrap();
    writeln!(report, "recorded {}", traj.len()).unwrap();
    writeln!(report, "end_time {:.10e}", traj.times.last().copied().unwrap_or(0.0)).unwrap();
    writeln!(report, "initial_norm {:.10e}", norm(&u0)).unwrap();
    writeln!(report, "final_norm {:.10e}", norm(last)).unwrap();
    files.push(write_atomic(dir, "report.txt", &report)?);
    Ok(RunSummary { dir: dir.to_path_buf(), termination: traj.termination, files })
}

/// Run an experiment and write its artifacts under `cfg.output_dir()`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    let dir = cfg.output_dir();
    match cfg.kind {
        Kind::Ms => run_ms(cfg, &dir),
        Kind::Quasilinear1d => run_quasilinear(cfg, &dir),
    }
}

pub fn run_file(path: &Path) -> Result<RunSummary, CliError> {
    run(&ExperimentConfig::load(path)?)
}

/// Linearize at the configured initial state, which must be an equilibrium.
pub fn linearize(cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
    if cfg.kind != Kind::Ms {
        return Err(ConfigError::Invalid { key: "kind".into(), message: "linearization needs kind = \"ms\"".into() }.into());
    }
    let state = cfg.ms_state()?;
    let h = cfg.ms.as_ref().map(|m| m.fd_step).unwrap_or(1e-5);
    let rep = linearize_at(&state, h)?;
    write_atomic(&cfg.output_dir(), "linearization.txt", &linearization_text(&rep))
}

pub fn linearize_file(path: &Path) -> Result<PathBuf, CliError> {
    linearize(&ExperimentConfig::load(path)?)
}

/// Run a verification suite; returns the report and whether every check passed.
pub fn verify(suite: &str, seed: u64) -> Result<(String, bool), CliError> {
    let suite = Suite::parse(suite).ok_or_else(|| CliError::UnknownSuite(suite.to_string()))?;
    let checks = verify::run(suite, seed);
    Ok((verify::report(&checks), verify::all_passed(&checks)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshots_cover_both_ends() {
        assert_eq!(snapshot_indices(11, 3), vec![0, 5, 10]);
        assert_eq!(snapshot_indices(3, 5), vec![0, 1, 2]);
        assert_eq!(snapshot_indices(7, 1), vec![6]);
        assert!(snapshot_indices(0, 4).is_empty());
    }

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_atomic(dir.path(), "a.txt", "x").unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), "x");
        assert!(!dir.path().join("a.txt.tmp").exists());
    }
}
