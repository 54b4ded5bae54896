//! Experiment configuration files.
//!
//! Configs are TOML: `[section]` headers, `key = value` pairs and `#`
//! comments. A Mullins-Sekerka run:
//!
//! ```toml
//! kind = "ms"
//! seed = 0
//!
//! [params]
//! p = 6.0
//! mu = 0.7
//!
//! [run]
//! mode = "semi-implicit"   # or "picard"
//! horizon = 0.25
//! dt = 1e-4
//! stop_residual = 1e-7
//!
//! [monitors]
//! norm_bound = 1e3
//! ball_radius = 0.05
//! eta_fraction = 0.05
//!
//! [ms]
//! nodes = 64
//! radius = 0.5
//! initial = { type = "modes", modes = [[2, 0.02, 0.0]] }
//!
//! [output]
//! dir = "mode2"
//! ```

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::dynamics::{EvolveOptions, Mode, Monitors};
use crate::geometry::{Circle, Container, CurveSpec, Point, ReferenceCurve};
use crate::hanzawa::{reparameterize, HeightField};
use crate::models::MsState;
use crate::stepper::{compute_mu0, ContinuationPolicy, Mu0Kind, PicardOptions};

/// Environment variable that overrides the directory outputs are written under.
pub const OUTPUT_ROOT_VAR: &str = "MSFLOW_OUTPUT_ROOT";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

impl ConfigError {
    fn invalid(key: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid { key: key.to_string(), message: message.into() }
    }

    /// Offending key, when the error is about one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { key, .. } => Some(key),
            ConfigError::Io { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ms,
    Quasilinear1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub p: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    SemiImplicit,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    #[serde(default = "default_mode")]
    pub mode: RunMode,
    pub horizon: f64,
    /// Step of the semi-implicit mode.
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub stop_residual: Option<f64>,
    /// Picard window length `T` and steps per window.
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_window_steps")]
    pub window_steps: usize,
    /// Grading exponent of the first window; defaults to `max(1, 2/(μ − 1/p))`.
    pub grading: Option<f64>,
    /// Number of SVG snapshots spread over the run.
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
}

fn default_mode() -> RunMode {
    RunMode::SemiImplicit
}
fn default_dt() -> f64 {
    1e-4
}
fn default_window() -> f64 {
    0.01
}
fn default_window_steps() -> usize {
    20
}
fn default_snapshots() -> usize {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorConfig {
    #[serde(default = "default_norm_bound")]
    pub norm_bound: f64,
    #[serde(default = "default_ball")]
    pub ball_radius: f64,
    #[serde(default = "default_eta")]
    pub eta_fraction: f64,
}

fn default_norm_bound() -> f64 {
    1e3
}
fn default_ball() -> f64 {
    0.05
}
fn default_eta() -> f64 {
    0.05
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self { norm_bound: default_norm_bound(), ball_radius: default_ball(), eta_fraction: default_eta() }
    }
}

/// Initial interface, as heights over the base circle.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Initial {
    Circle,
    /// `ρ = Σ c cos kθ + s sin kθ` from rows `[k, c, s]`.
    Modes { modes: Vec<[f64; 3]> },
    /// `ρ = amplitude Σ_{k=2}^{N/2} k^{−exponent} cos kθ`.
    PowerLaw { amplitude: f64, exponent: f64 },
    /// An ellipse with the base center, re-expressed as heights.
    Ellipse { semi_axes: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MsConfig {
    #[serde(default = "default_ms_nodes")]
    pub nodes: usize,
    #[serde(default = "default_container")]
    pub container_radius: f64,
    #[serde(default)]
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default = "default_initial")]
    pub initial: Initial,
    /// Amplitude of seeded random modes `2 ≤ k ≤ N/8` added to the heights.
    #[serde(default)]
    pub noise: f64,
    /// Finite-difference step of `linearize`.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

fn default_ms_nodes() -> usize {
    64
}
fn default_container() -> f64 {
    1.0
}
fn default_initial() -> Initial {
    Initial::Circle
}
fn default_fd_step() -> f64 {
    1e-5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    /// `u_t = u_xx`.
    Heat,
    /// `u_t = u_xx + u²`.
    Reaction,
    /// `u_t = (1 + u²) u_xx`.
    NonlinearDiffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `amplitude · sin πx`.
    Sine,
    /// `amplitude` at every interior node.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasilinearConfig {
    pub equation: Equation,
    #[serde(default = "default_q_nodes")]
    pub nodes: usize,
    #[serde(default = "default_profile")]
    pub profile: Profile,
    pub amplitude: f64,
    /// Breakdown threshold on the `X_γ` norm.
    #[serde(default = "default_blowup")]
    pub blowup_norm: f64,
}

fn default_q_nodes() -> usize {
    31
}
fn default_profile() -> Profile {
    Profile::Sine
}
fn default_blowup() -> f64 {
    1e6
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    pub params: Params,
    pub run: Run,
    #[serde(default)]
    pub monitors: MonitorConfig,
    pub ms: Option<MsConfig>,
    pub quasilinear1d: Option<QuasilinearConfig>,
    pub output: Output,
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, format!("must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            // `unknown field `x``, `missing field `x``: name the key itself.
            let key = msg.split('`').nth(1).map(str::to_string).unwrap_or_else(|| "<document>".into());
            ConfigError::Invalid { key, message: msg }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let Params { p, mu } = self.params;
        let (n, kind) = match self.kind {
            Kind::Ms => (2, Mu0Kind::MullinsSekerka),
            Kind::Quasilinear1d => (1, Mu0Kind::SecondOrder),
        };
        let mu0 = compute_mu0(n, p, kind).map_err(|e| ConfigError::invalid("params.p", e.to_string()))?;
        if !(mu > mu0 && mu <= 1.0) {
            return Err(ConfigError::invalid("params.mu", format!("must lie in ({mu0:.6}, 1], got {mu}")));
        }
        positive("run.horizon", self.run.horizon)?;
        positive("run.dt", self.run.dt)?;
        positive("run.window", self.run.window)?;
        if self.run.window_steps == 0 {
            return Err(ConfigError::invalid("run.window_steps", "must be at least 1"));
        }
        if let Some(r) = self.run.stop_residual {
            positive("run.stop_residual", r)?;
        }
        if let Some(q) = self.run.grading {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(ConfigError::invalid("run.grading", format!("must be >= 1, got {q}")));
            }
        }
        positive("monitors.norm_bound", self.monitors.norm_bound)?;
        positive("monitors.ball_radius", self.monitors.ball_radius)?;
        positive("monitors.eta_fraction", self.monitors.eta_fraction)?;
        if self.output.dir.as_os_str().is_empty() {
            return Err(ConfigError::invalid("output.dir", "must not be empty"));
        }
        match self.kind {
            Kind::Ms => {
                let ms = self.ms.as_ref().ok_or_else(|| ConfigError::invalid("ms", "section required for kind = \"ms\""))?;
                if ms.nodes < 16 || !ms.nodes.is_power_of_two() {
                    return Err(ConfigError::invalid("ms.nodes", format!("must be a power of two >= 16, got {}", ms.nodes)));
                }
                positive("ms.container_radius", ms.container_radius)?;
                positive("ms.radius", ms.radius)?;
                positive("ms.fd_step", ms.fd_step)?;
                if !(ms.noise >= 0.0 && ms.noise.is_finite()) {
                    return Err(ConfigError::invalid("ms.noise", "must be non-negative"));
                }
                match &ms.initial {
                    Initial::Modes { modes } => {
                        for row in modes {
                            if !(row[0] >= 0.0 && row[0].fract() == 0.0 && (row[0] as usize) < ms.nodes / 2) {
                                return Err(ConfigError::invalid(
                                    "ms.initial.modes",
                                    format!("wavenumber {} must be an integer in [0, {})", row[0], ms.nodes / 2),
                                ));
                            }
                        }
                    }
                    Initial::PowerLaw { exponent, .. } => positive("ms.initial.exponent", *exponent)?,
                    Initial::Ellipse { semi_axes } => {
                        positive("ms.initial.semi_axes", semi_axes[0])?;
                        positive("ms.initial.semi_axes", semi_axes[1])?;
                    }
                    Initial::Circle => {}
                }
            }
            Kind::Quasilinear1d => {
                let q = self
                    .quasilinear1d
                    .as_ref()
                    .ok_or_else(|| ConfigError::invalid("quasilinear1d", "section required for kind = \"quasilinear1d\""))?;
                if q.nodes < 2 {
                    return Err(ConfigError::invalid("quasilinear1d.nodes", "need at least 2 interior nodes"));
                }
                positive("quasilinear1d.blowup_norm", q.blowup_norm)?;
                if !q.amplitude.is_finite() {
                    return Err(ConfigError::invalid("quasilinear1d.amplitude", "must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Output directory, placed under `$MSFLOW_OUTPUT_ROOT` when that is set.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_VAR) {
            Some(root) if !root.is_empty() => {
                let dir = &self.output.dir;
                let rel = if dir.is_absolute() { dir.file_name().map(PathBuf::from).unwrap_or_default() } else { dir.clone() };
                PathBuf::from(root).join(rel)
            }
            _ => self.output.dir.clone(),
        }
    }

    pub fn monitors(&self) -> Monitors {
        Monitors {
            norm_bound: self.monitors.norm_bound,
            ball_radius: self.monitors.ball_radius,
            eta_fraction: self.monitors.eta_fraction,
        }
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        let mode = match self.run.mode {
            RunMode::SemiImplicit => Mode::SemiImplicit { dt: self.run.dt },
            RunMode::Picard => Mode::Picard { window: self.run.window, steps: self.run.window_steps },
        };
        EvolveOptions {
            mode,
            horizon: self.run.horizon,
            monitors: self.monitors(),
            p: self.params.p,
            mu: self.params.mu,
            stop_residual: self.run.stop_residual,
        }
    }

    pub fn continuation_policy(&self) -> ContinuationPolicy {
        ContinuationPolicy {
            window: self.run.window,
            steps_per_window: self.run.window_steps,
            p: self.params.p,
            mu: self.params.mu,
            grading: self.run.grading,
            blowup_norm: self.quasilinear1d.as_ref().map(|q| q.blowup_norm).unwrap_or_else(default_blowup),
            picard: PicardOptions::default(),
        }
    }

    /// Initial Mullins-Sekerka state described by the `[ms]` section.
    pub fn ms_state(&self) -> Result<MsState, ConfigError> {
        let ms = self.ms.as_ref().ok_or_else(|| ConfigError::invalid("ms", "section missing"))?;
        let container = Container::disk(ms.container_radius).map_err(|e| ConfigError::invalid("ms.container_radius", e.to_string()))?;
        let center = Point::new(ms.center[0], ms.center[1]);
        let base = ReferenceCurve::build(&CurveSpec::Circle(Circle::new(center, ms.radius)), ms.nodes, &container)
            .map_err(|e| ConfigError::invalid("ms.radius", e.to_string()))?;
        let n = ms.nodes;
        let theta: Vec<f64> = (0..n).map(|j| base.theta(j)).collect();
        let mut values = match &ms.initial {
            Initial::Circle => vec![0.0; n],
            Initial::Modes { modes } => theta
                .iter()
                .map(|t| modes.iter().map(|[k, c, s]| c * (k * t).cos() + s * (k * t).sin()).sum())
                .collect(),
            Initial::PowerLaw { amplitude, exponent } => theta
                .iter()
                .map(|t| (2..=n / 2).map(|k| amplitude * (k as f64).powf(-exponent) * (k as f64 * t).cos()).sum())
                .collect(),
            Initial::Ellipse { semi_axes } => {
                let spec = CurveSpec::Ellipse { center, semi_axes: (semi_axes[0], semi_axes[1]) };
                let gamma = ReferenceCurve::build(&spec, n, &container)
                    .map_err(|e| ConfigError::invalid("ms.initial.semi_axes", e.to_string()))?;
                reparameterize(&gamma, &base, &container)
                    .map_err(|e| ConfigError::invalid("ms.initial.semi_axes", e.to_string()))?
                    .values()
                    .to_vec()
            }
        };
        if ms.noise > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for k in 2..=(n / 8).max(2) {
                let (c, s): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                for (v, t) in values.iter_mut().zip(&theta) {
                    *v += ms.noise * (c * (k as f64 * t).cos() + s * (k as f64 * t).sin());
                }
            }
        }
        let height = HeightField::new(base, &container, values).map_err(|e| ConfigError::invalid("ms.initial", e.to_string()))?;
        MsState::new(height, &container).map_err(|e| ConfigError::invalid("ms.initial", e.to_string()))
    }

    /// Interior mesh values of the 1D initial datum.
    pub fn quasilinear_initial(&self) -> Result<Vec<f64>, ConfigError> {
        let q = self.quasilinear1d.as_ref().ok_or_else(|| ConfigError::invalid("quasilinear1d", "section missing"))?;
        let h = 1.0 / (q.nodes + 1) as f64;
        Ok((1..=q.nodes)
            .map(|i| match q.profile {
                Profile::Sine => q.amplitude * (std::f64::consts::PI * i as f64 * h).sin(),
                Profile::Constant => q.amplitude,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MS: &str = r#"
kind = "ms"
[params]
p = 6.0
mu = 0.7
[run]
horizon = 0.01
[ms]
nodes = 32
radius = 0.5
initial = { type = "modes", modes = [[2, 0.02, 0.0]] }
[output]
dir = "out"
"#;

    #[test]
    fn parses_ms_config() {
        let cfg = ExperimentConfig::parse(MS).unwrap();
        assert_eq!(cfg.kind, Kind::Ms);
        assert_eq!(cfg.monitors, MonitorConfig::default());
        let s = cfg.ms_state().unwrap();
        assert!((s.height().sup_norm() - 0.02).abs() < 1e-12);
    }

    #[test]
    fn mu_below_threshold_names_the_key() {
        let err = ExperimentConfig::parse(&MS.replace("mu = 0.7", "mu = 0.5")).unwrap_err();
        assert_eq!(err.key(), Some("params.mu"));
    }

    #[test]
    fn non_positive_threshold_names_the_key() {
        let text = format!("{MS}\n[monitors]\nball_radius = -1.0\n");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert_eq!(err.key(), Some("monitors.ball_radius"));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse(&MS.replace("horizon = 0.01", "horizon = 0.01\nhorizn = 2")).unwrap_err();
        assert_eq!(err.key(), Some("horizn"));
    }

    #[test]
    fn ellipse_initial_is_reexpressed() {
        let text = MS.replace(r#"{ type = "modes", modes = [[2, 0.02, 0.0]] }"#, r#"{ type = "ellipse", semi_axes = [0.52, 0.48] }"#);
        let s = ExperimentConfig::parse(&text).unwrap().ms_state().unwrap();
        let g = s.interface().unwrap();
        assert!((g.points()[0].x - 0.52).abs() < 1e-10);
    }
}
