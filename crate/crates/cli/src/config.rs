//! Experiment configuration: a TOML file (dotted keys allowed) merged with
//! command-line overrides. Flags win over the file.
//!
//! ```toml
//! state = "rho2.json"                       # or: state = { c = [0.5, -0.06, 0.24], mode = "deviation" }
//! seed = 7
//! shots = 10000
//! include_local_bloch = true
//! output = "rho2.csv"
//! format = "csv"
//! relaxation.t2_b = 0.19
//! grid.dt = 0.0011622501162250116
//! grid.n_points = 251
//! ```

use std::path::{Path, PathBuf};

use qcorr::state_file::{LoadedState, StateFile};
use qcorr::{BellDiagonalState, BellMode, RelaxationParams, TimeGrid};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    state: Option<toml::Value>,
    relaxation: Option<RelaxationParams>,
    grid: Option<GridFile>,
    shots: Option<u64>,
    seed: Option<u64>,
    include_local_bloch: Option<bool>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    t_max: Option<f64>,
    dt: Option<f64>,
    n_points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineBell {
    c: [f64; 3],
    #[serde(default = "full_mode")]
    mode: BellMode,
}

fn full_mode() -> BellMode {
    BellMode::Full
}

/// Values given on the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub state: Option<PathBuf>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub points: Option<usize>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub include_local_bloch: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    File(PathBuf),
    Inline(BellDiagonalState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub state: Option<StateSource>,
    pub relaxation: RelaxationParams,
    pub grid: TimeGrid,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub include_local_bloch: bool,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> CliResult<Self> {
        let (file, base) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", p.display())))?;
                (parse_file(&text)?, p.parent().map(Path::to_path_buf))
            }
            None => (ConfigFile::default(), None),
        };
        Self::merge(file, base.as_deref(), overrides)
    }

    pub fn from_str(text: &str, overrides: &Overrides) -> CliResult<Self> {
        Self::merge(parse_file(text)?, None, overrides)
    }

    fn merge(file: ConfigFile, base: Option<&Path>, o: &Overrides) -> CliResult<Self> {
        let state = match (&o.state, file.state) {
            (Some(p), _) => Some(StateSource::File(p.clone())),
            (None, Some(v)) => Some(state_from_value(v, base)?),
            (None, None) => None,
        };

        let mut relaxation = file.relaxation.unwrap_or_default();
        if let Some(eps) = o.epsilon {
            relaxation.epsilon = eps;
        }
        relaxation.validate()?;

        let g = file.grid.unwrap_or_default();
        // a grid flag replaces the file's grid form entirely
        let (t_max, dt) = if o.t_max.is_some() || o.dt.is_some() { (o.t_max, o.dt) } else { (g.t_max, g.dt) };
        let n_points = o.points.or(g.n_points).unwrap_or(qcorr::trajectory::DEFAULT_POINTS);
        let grid = match (t_max, dt) {
            (Some(_), Some(_)) => {
                return Err(CliError::Input("grid: give exactly one of `t_max` and `dt`".into()));
            }
            (Some(t_max), None) => TimeGrid::Span { t_max, n_points },
            (None, Some(dt)) => TimeGrid::Step { dt, n_points },
            (None, None) => match TimeGrid::default_for(&relaxation) {
                TimeGrid::Step { dt, .. } => TimeGrid::Step { dt, n_points },
                span => span,
            },
        };
        grid.times()?;

        let shots = o.shots.or(file.shots);
        let seed = o.seed.or(file.seed);
        if shots.is_some() && seed.is_none() {
            return Err(CliError::Input("`seed` is required when `shots` is set".into()));
        }
        if shots == Some(0) {
            return Err(CliError::Input("`shots` must be positive".into()));
        }
        let output = o.output.clone().or_else(|| file.output.map(|p| resolve(base, p)));
        Ok(Self {
            state,
            relaxation,
            grid,
            shots,
            seed,
            include_local_bloch: o.include_local_bloch.or(file.include_local_bloch).unwrap_or(true),
            output,
            format: o.format.or(file.format),
        })
    }

    pub fn load_state(&self) -> CliResult<LoadedState> {
        match &self.state {
            None => Err(CliError::Input("no state given (use --state or `state` in the config)".into())),
            Some(StateSource::Inline(s)) => Ok(LoadedState::Bell(*s)),
            Some(StateSource::File(p)) => read_state_file(p),
        }
    }
}

fn parse_file(text: &str) -> CliResult<ConfigFile> {
    toml::from_str(text).map_err(|e| CliError::Input(format!("config: {}", e.to_string().trim_end())))
}

fn resolve(base: Option<&Path>, p: PathBuf) -> PathBuf {
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    }
}

fn state_from_value(v: toml::Value, base: Option<&Path>) -> CliResult<StateSource> {
    match v {
        toml::Value::String(s) => Ok(StateSource::File(resolve(base, PathBuf::from(s)))),
        toml::Value::Table(t) => {
            let inline: InlineBell = toml::Value::Table(t)
                .try_into()
                .map_err(|e: toml::de::Error| CliError::Input(format!("config: state.{}", e.message().trim())))?;
            Ok(StateSource::Inline(BellDiagonalState::new(inline.c, inline.mode)?))
        }
        other => Err(CliError::Input(format!(
            "config: `state` must be a file path or a table with `c` and `mode`, got {}",
            other.type_str()
        ))),
    }
}

pub fn read_state_file(path: &Path) -> CliResult<LoadedState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read state file {}: {e}", path.display())))?;
    let file = StateFile::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(file.into_state()?)
}
