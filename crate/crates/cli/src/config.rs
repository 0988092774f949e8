//! Command-line flags, the optional TOML config file and their resolution
//! into a validated [`RunConfig`].
//!
//! Precedence is flag > config-file entry > per-command default. Everything
//! is validated here, before any computation starts, so a bad value never
//! leaves a partial output file behind.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use logkg_core::analysis::{DiscretizationMode, ReferenceResolution, MIN_STUDY_EPSILON};
use logkg_core::grid::steps_to;
use logkg_core::problems::{ProblemKind, DEFAULT_DOMAIN};
use logkg_core::schemes::Scheme;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Integrate one problem and write solution snapshots.
    Evolve,
    /// Regularized solution against the ε → 0 limit.
    StudyEpsilon,
    /// Scheme against a fine-grid solution at the same ε.
    StudyDiscretization,
    /// Scheme against the closed-form Gausson, one table per ε.
    StudyTotal,
    /// Report the stability bound for the configured step size.
    StabilityCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyMode {
    /// Refine `h` and `τ = 0.01 h` together.
    TemporalSpatial,
    /// Refine `h` at the reference `τ`.
    SpatialOnly,
}

impl From<StudyMode> for DiscretizationMode {
    fn from(m: StudyMode) -> Self {
        match m {
            StudyMode::TemporalSpatial => DiscretizationMode::TemporalSpatial,
            StudyMode::SpatialOnly => DiscretizationMode::SpatialOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitReference {
    /// Closed-form Gausson (example1 with λ = 1 only).
    Analytic,
    /// EFD run at ε = 1e-7 on the reference mesh.
    FineGrid,
}

fn parse_problem(s: &str) -> std::result::Result<ProblemKind, String> {
    s.parse().map_err(|e: logkg_core::Error| e.to_string())
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: logkg_core::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "logkg",
    version,
    about = "Finite difference solvers for the regularized logarithmic Klein-Gordon equation"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// TOML file with defaults for any of the options below.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// example1 (Gausson) or example2.
    #[arg(long, value_parser = parse_problem)]
    pub problem: Option<ProblemKind>,

    /// sifd or efd.
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,

    #[arg(long)]
    pub epsilon: Option<f64>,

    #[arg(long)]
    pub lambda: Option<f64>,

    /// Periodic interval as `a,b`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub domain: Option<Vec<f64>>,

    /// Grid points (evolve, stability-check; the coarsest level for study-total).
    #[arg(long = "n-points")]
    pub n_points: Option<usize>,

    /// Time step (evolve, stability-check; the coarsest level for study-total).
    #[arg(long)]
    pub tau: Option<f64>,

    /// Final time.
    #[arg(long = "T")]
    pub final_time: Option<f64>,

    /// Refinement levels (study-discretization, study-total) or ε count (study-epsilon).
    #[arg(long)]
    pub levels: Option<u32>,

    /// Output file; for evolve CSV, the prefix of the per-snapshot files.
    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Run even when the stability bound is violated.
    #[arg(long)]
    pub force: bool,

    /// Snapshot times for evolve, comma separated.
    #[arg(long = "snapshot-times", value_delimiter = ',')]
    pub snapshot_times: Option<Vec<f64>>,

    #[arg(long, value_enum)]
    pub mode: Option<StudyMode>,

    /// Explicit, strictly decreasing ε list for the ε and total studies.
    #[arg(long = "eps-list", value_delimiter = ',')]
    pub eps_list: Option<Vec<f64>>,

    /// Limit solution for study-epsilon.
    #[arg(long, value_enum)]
    pub reference: Option<LimitReference>,

    /// Use the h = 2^-10, τ = 0.01·2^-9 reference mesh instead of h = 2^-8, τ = 0.01·2^-7.
    #[arg(long = "paper-exact")]
    pub paper_exact: bool,

    /// Record wall time in JSON output (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// Config-file schema; keys mirror the long flags with `_` for `-`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub problem: Option<ProblemKind>,
    pub scheme: Option<Scheme>,
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub domain: Option<Vec<f64>>,
    pub n_points: Option<usize>,
    pub tau: Option<f64>,
    #[serde(rename = "T", alias = "final_time")]
    pub final_time: Option<f64>,
    pub levels: Option<u32>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub force: Option<bool>,
    pub snapshot_times: Option<Vec<f64>>,
    pub mode: Option<StudyMode>,
    pub eps_list: Option<Vec<f64>>,
    pub reference: Option<LimitReference>,
    pub paper_exact: Option<bool>,
    pub timing: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("invalid --config: cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::config(format!("invalid --config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Fully resolved run parameters; serialized verbatim into JSON outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub problem: ProblemKind,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub lambda: f64,
    pub domain: (f64, f64),
    pub n_points: usize,
    pub tau: f64,
    #[serde(rename = "T")]
    pub final_time: f64,
    pub levels: u32,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub force: bool,
    pub snapshot_times: Vec<f64>,
    pub mode: Option<StudyMode>,
    pub eps_list: Vec<f64>,
    pub reference: Option<LimitReference>,
    pub paper_exact: bool,
    pub timing: bool,
}

/// `h = 2⁻⁷` on the default domain, the evolution mesh of the solution plots.
pub const EVOLVE_N_POINTS: usize = 4096;
/// `τ = 0.01 · 2⁻⁷`.
pub const EVOLVE_TAU: f64 = 0.01 / 128.0;
/// Number of ε values in the default total-study list `ε / 4^i`.
pub const TOTAL_EPS_COUNT: i32 = 5;

struct Defaults {
    epsilon: f64,
    n_points: usize,
    tau: f64,
    final_time: f64,
    levels: u32,
}

fn defaults(command: Command) -> Defaults {
    let evolve = Defaults { epsilon: 1e-3, n_points: EVOLVE_N_POINTS, tau: EVOLVE_TAU, final_time: 1.0, levels: 1 };
    match command {
        Command::Evolve | Command::StabilityCheck => evolve,
        Command::StudyTotal => Defaults { epsilon: 1e-3, n_points: 320, tau: 0.1, final_time: 1.0, levels: 6 },
        Command::StudyEpsilon => Defaults { epsilon: 1e-2, final_time: 0.5, levels: 4, ..evolve },
        Command::StudyDiscretization => Defaults { epsilon: 1e-7, levels: 5, ..evolve },
    }
}

impl RunConfig {
    /// Merges flags over the config file (if any) over per-command defaults,
    /// then validates.
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(cli, &file)
    }

    pub fn merge(cli: &Cli, file: &FileConfig) -> Result<Self> {
        let command = cli.command;
        let d = defaults(command);
        let is_study_grid = matches!(command, Command::StudyEpsilon | Command::StudyDiscretization);
        let reference_mesh = |paper_exact: bool| {
            if paper_exact {
                ReferenceResolution::paper_exact()
            } else {
                ReferenceResolution::default()
            }
        };

        let n_points_given = cli.n_points.or(file.n_points);
        let tau_given = cli.tau.or(file.tau);
        if is_study_grid {
            if n_points_given.is_some() {
                return Err(CliError::config(format!(
                    "invalid --n-points: {command:?} runs on fixed grids (use --paper-exact for the finer reference)"
                )));
            }
            if tau_given.is_some() {
                return Err(CliError::config(format!(
                    "invalid --tau: {command:?} fixes its time steps (use --paper-exact for the finer reference)"
                )));
            }
        }

        let problem = cli.problem.or(file.problem).unwrap_or(ProblemKind::Example1);
        let scheme = cli.scheme.or(file.scheme).unwrap_or(Scheme::Efd);
        let epsilon = cli.epsilon.or(file.epsilon).unwrap_or(d.epsilon);
        let lambda = cli.lambda.or(file.lambda).unwrap_or(1.0);
        let domain = match cli.domain.clone().or_else(|| file.domain.clone()) {
            Some(v) if v.len() == 2 => (v[0], v[1]),
            Some(v) => return Err(CliError::config(format!("invalid --domain: expected two values a,b, got {v:?}"))),
            None => DEFAULT_DOMAIN,
        };
        let paper_exact = cli.paper_exact || file.paper_exact.unwrap_or(false);
        let (n_points, tau) = if is_study_grid {
            let res = reference_mesh(paper_exact);
            (((domain.1 - domain.0) / res.h).round() as usize, res.tau)
        } else {
            (n_points_given.unwrap_or(d.n_points), tau_given.unwrap_or(d.tau))
        };
        let final_time = cli.final_time.or(file.final_time).unwrap_or(d.final_time);

        let eps_given = cli.eps_list.clone().or_else(|| file.eps_list.clone());
        let levels_given = cli.levels.or(file.levels);
        let levels = levels_given.unwrap_or(d.levels);
        let eps_list = match command {
            Command::StudyEpsilon => eps_given.unwrap_or_else(|| geometric(epsilon, levels as i32)),
            Command::StudyTotal => eps_given.unwrap_or_else(|| geometric(epsilon, TOTAL_EPS_COUNT)),
            _ => {
                if eps_given.is_some() {
                    return Err(CliError::config(
                        "invalid --eps-list: only study-epsilon and study-total take an ε list",
                    ));
                }
                Vec::new()
            }
        };
        if matches!(command, Command::Evolve | Command::StabilityCheck) && levels_given.is_some() {
            return Err(CliError::config("invalid --levels: only the study commands take levels"));
        }

        let snapshot_times = cli.snapshot_times.clone().or_else(|| file.snapshot_times.clone());
        if snapshot_times.is_some() && command != Command::Evolve {
            return Err(CliError::config("invalid --snapshot-times: only evolve writes snapshots"));
        }
        let mode = cli.mode.or(file.mode);
        if mode.is_some() && command != Command::StudyDiscretization {
            return Err(CliError::config("invalid --mode: only study-discretization takes a mode"));
        }
        let reference = cli.reference.or(file.reference);
        if reference.is_some() && command != Command::StudyEpsilon {
            return Err(CliError::config("invalid --reference: only study-epsilon takes a limit reference"));
        }

        let config = RunConfig {
            command,
            problem,
            scheme,
            epsilon,
            lambda,
            domain,
            n_points,
            tau,
            final_time,
            levels: if command == Command::StudyEpsilon { eps_list.len() as u32 } else { levels },
            output: cli.output.clone().or_else(|| file.output.clone()),
            format: cli.format.or(file.format).unwrap_or_default(),
            force: cli.force || file.force.unwrap_or(false),
            snapshot_times: match command {
                Command::Evolve => snapshot_times.unwrap_or_else(|| vec![final_time]),
                _ => Vec::new(),
            },
            mode: match command {
                Command::StudyDiscretization => Some(mode.unwrap_or(StudyMode::TemporalSpatial)),
                _ => None,
            },
            eps_list,
            reference: match command {
                Command::StudyEpsilon => Some(reference.unwrap_or(LimitReference::FineGrid)),
                _ => None,
            },
            paper_exact,
            timing: cli.timing || file.timing.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }

    /// Reference mesh used by the ε and discretization studies.
    pub fn reference_resolution(&self) -> ReferenceResolution {
        if self.paper_exact {
            ReferenceResolution::paper_exact()
        } else {
            ReferenceResolution::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |flag: &str, name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::config(format!("invalid --{flag}: {name} must be positive, got {v}")))
            }
        };
        positive("epsilon", "epsilon", self.epsilon)?;
        positive("tau", "tau", self.tau)?;
        positive("T", "T", self.final_time)?;
        if !self.lambda.is_finite() {
            return Err(CliError::config(format!("invalid --lambda: lambda must be finite, got {}", self.lambda)));
        }
        let (a, b) = self.domain;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(CliError::config(format!("invalid --domain: need finite a < b, got {a},{b}")));
        }
        if self.n_points < 4 {
            return Err(CliError::config(format!("invalid --n-points: need at least 4 points, got {}", self.n_points)));
        }
        if self.levels == 0 {
            return Err(CliError::config("invalid --levels: need at least one level"));
        }

        match self.command {
            Command::Evolve => {
                steps_to(self.tau, self.final_time).map_err(|_| {
                    CliError::config(format!(
                        "invalid --T: T = {} is not a whole number of steps tau = {}",
                        self.final_time, self.tau
                    ))
                })?;
                if self.snapshot_times.is_empty() {
                    return Err(CliError::config("invalid --snapshot-times: need at least one time"));
                }
                for &t in &self.snapshot_times {
                    if !(0.0..=self.final_time).contains(&t) {
                        return Err(CliError::config(format!(
                            "invalid --snapshot-times: {t} lies outside [0, T = {}]",
                            self.final_time
                        )));
                    }
                    steps_to(self.tau, t).map_err(|_| {
                        CliError::config(format!(
                            "invalid --snapshot-times: {t} is not a multiple of tau = {}",
                            self.tau
                        ))
                    })?;
                }
                if self.snapshot_times.len() > 1 && self.format == OutputFormat::Csv && self.output.is_none() {
                    return Err(CliError::config(
                        "invalid --output: CSV output of several snapshots needs a file prefix",
                    ));
                }
            }
            Command::StudyTotal => {
                if self.problem != ProblemKind::Example1 {
                    return Err(CliError::config(
                        "invalid --problem: study-total compares against the analytic solution, which only example1 has",
                    ));
                }
                self.validate_eps_list(0.0)?;
            }
            Command::StudyEpsilon => {
                if self.reference == Some(LimitReference::Analytic)
                    && (self.problem != ProblemKind::Example1 || self.lambda != 1.0)
                {
                    return Err(CliError::config(
                        "invalid --reference: the analytic limit exists only for example1 with lambda = 1",
                    ));
                }
                self.validate_eps_list(MIN_STUDY_EPSILON)?;
            }
            Command::StudyDiscretization | Command::StabilityCheck => {}
        }
        Ok(())
    }

    fn validate_eps_list(&self, min: f64) -> Result<()> {
        if self.eps_list.is_empty() {
            return Err(CliError::config("invalid --eps-list: the list is empty"));
        }
        if let Some(e) = self.eps_list.iter().find(|&&e| !(e > 0.0 && e >= min && e.is_finite())) {
            return Err(CliError::config(format!("invalid --eps-list: {e} must be positive and at least {min}")));
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::config("invalid --eps-list: values must be strictly decreasing"));
        }
        Ok(())
    }
}

/// `ε / 4^i` for `i = 0..count`.
fn geometric(epsilon: f64, count: i32) -> Vec<f64> {
    (0..count).map(|i| epsilon / 4f64.powi(i)).collect()
}
