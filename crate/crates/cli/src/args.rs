//! Command-line and config-file parsing into a validated [`RunConfig`].

use std::ffi::OsString;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use berry_core::{Grid, InitialData};
use clap::{Parser, ValueEnum};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Parameter trajectory.
    Params,
    /// ψₙ on a grid at one time.
    Wavefunction,
    /// Property suite with a pass/fail table.
    Verify,
    /// Berry phase by all three routes.
    Phase,
    /// The Figure 1 phase curves for n = 0 and n = 1.
    Figure1,
    /// Crank–Nicolson evolution against the analytic state.
    Propagate,
}

#[derive(Debug, Parser)]
#[command(name = "berry", version, about = "Dynamic harmonic oscillator states and their Berry phase")]
#[command(allow_negative_numbers = true)]
struct Cli {
    command: Command,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    kappa0: Option<f64>,
    /// Defaults to 1/beta0, which makes every state unit-normalized.
    #[arg(long)]
    mu0: Option<f64>,
    /// Hermite order; repeat for several.
    #[arg(long = "n")]
    n: Vec<u32>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    t_step: Option<f64>,
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    x_points: Option<usize>,
    /// Evaluation time for `wavefunction`.
    #[arg(long)]
    t: Option<f64>,
    /// Time step for `propagate`.
    #[arg(long)]
    dt: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Test hook: `verify` perturbs delta0 for the second half of the run.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// Every setting that may come from either source.
#[derive(Debug, Default, Clone)]
struct Settings {
    alpha0: Option<f64>,
    beta0: Option<f64>,
    gamma0: Option<f64>,
    delta0: Option<f64>,
    eps0: Option<f64>,
    kappa0: Option<f64>,
    mu0: Option<f64>,
    n: Vec<u32>,
    t_end: Option<f64>,
    t_step: Option<f64>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    x_points: Option<usize>,
    t: Option<f64>,
    dt: Option<f64>,
    out: Option<PathBuf>,
}

impl Settings {
    fn or(self, fallback: Settings) -> Settings {
        Settings {
            alpha0: self.alpha0.or(fallback.alpha0),
            beta0: self.beta0.or(fallback.beta0),
            gamma0: self.gamma0.or(fallback.gamma0),
            delta0: self.delta0.or(fallback.delta0),
            eps0: self.eps0.or(fallback.eps0),
            kappa0: self.kappa0.or(fallback.kappa0),
            mu0: self.mu0.or(fallback.mu0),
            n: if self.n.is_empty() { fallback.n } else { self.n },
            t_end: self.t_end.or(fallback.t_end),
            t_step: self.t_step.or(fallback.t_step),
            x_min: self.x_min.or(fallback.x_min),
            x_max: self.x_max.or(fallback.x_max),
            x_points: self.x_points.or(fallback.x_points),
            t: self.t.or(fallback.t),
            dt: self.dt.or(fallback.dt),
            out: self.out.or(fallback.out),
        }
    }
}

/// Grid choice: a user box, or one fitted per state by each command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Auto,
    Fixed(Grid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub data: InitialData,
    pub n_list: Vec<u32>,
    pub t_end: f64,
    pub t_step: f64,
    pub grid: GridSpec,
    pub t: f64,
    pub dt: f64,
    pub output_path: Option<PathBuf>,
    pub inject_fault: bool,
}

impl RunConfig {
    /// 0, step, 2·step, … up to `t_end`.
    pub fn times(&self) -> Vec<f64> {
        let last = (self.t_end / self.t_step + 1e-9).floor() as usize;
        (0..=last).map(|i| i as f64 * self.t_step).collect()
    }
}

pub const DEFAULT_T_STEP: f64 = PI / 200.0;
pub const DEFAULT_DT: f64 = 5e-4;
pub const DEFAULT_BOX: (f64, f64, usize) = (-10.0, 10.0, 2001);

pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let from_cli = Settings {
        alpha0: cli.alpha0,
        beta0: cli.beta0,
        gamma0: cli.gamma0,
        delta0: cli.delta0,
        eps0: cli.eps0,
        kappa0: cli.kappa0,
        mu0: cli.mu0,
        n: cli.n,
        t_end: cli.t_end,
        t_step: cli.t_step,
        x_min: cli.x_min,
        x_max: cli.x_max,
        x_points: cli.x_points,
        t: cli.t,
        dt: cli.dt,
        out: cli.out,
    };
    let settings = match &cli.config {
        Some(path) => from_cli.or(read_config(path)?),
        None => from_cli,
    };
    build(cli.command, settings, cli.inject_fault)
}

fn build(command: Command, s: Settings, inject_fault: bool) -> Result<RunConfig, CliError> {
    let base = match command {
        Command::Figure1 => InitialData::figure1(),
        _ => InitialData::textbook(),
    };
    let beta0 = s.beta0.unwrap_or(base.beta0);
    if beta0 == 0.0 || !beta0.is_finite() {
        return Err(CliError::Usage(format!("beta0 must be finite and nonzero, got {beta0}")));
    }
    let mu0 = s.mu0.unwrap_or(1.0 / beta0);
    if !(mu0 > 0.0 && mu0.is_finite()) {
        return Err(CliError::Usage(format!("mu0 must be finite and positive, got {mu0}")));
    }
    let data = InitialData::new(
        mu0,
        s.alpha0.unwrap_or(base.alpha0),
        beta0,
        s.gamma0.unwrap_or(base.gamma0),
        s.delta0.unwrap_or(base.delta0),
        s.eps0.unwrap_or(base.eps0),
        s.kappa0.unwrap_or(base.kappa0),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let t_end = s.t_end.unwrap_or(2.0 * PI);
    let t_step = s.t_step.unwrap_or(DEFAULT_T_STEP);
    let dt = s.dt.unwrap_or(DEFAULT_DT);
    for (name, v) in [("t-end", t_end), ("t-step", t_step), ("dt", dt)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Usage(format!("{name} must be finite and positive, got {v}")));
        }
    }
    let t = s.t.unwrap_or(0.0);
    if !t.is_finite() {
        return Err(CliError::Usage(format!("t must be finite, got {t}")));
    }

    let grid = if s.x_min.is_none() && s.x_max.is_none() && s.x_points.is_none() {
        GridSpec::Auto
    } else {
        let (lo, hi, count) = DEFAULT_BOX;
        let grid = Grid::new(
            s.x_min.unwrap_or(lo),
            s.x_max.unwrap_or(hi),
            s.x_points.unwrap_or(count),
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        GridSpec::Fixed(grid)
    };

    let mut n_list = s.n;
    if n_list.is_empty() {
        n_list.push(0);
    }

    Ok(RunConfig {
        command,
        data,
        n_list,
        t_end,
        t_step,
        grid,
        t,
        dt,
        output_path: s.out,
        inject_fault,
    })
}

fn read_config(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse_config(text: &str) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "n" => {
                for item in v.split(',') {
                    s.n.push(parse_value("n", item.trim())?);
                }
            }
            "alpha0" => s.alpha0 = Some(parse_value(&key, v)?),
            "beta0" => s.beta0 = Some(parse_value(&key, v)?),
            "gamma0" => s.gamma0 = Some(parse_value(&key, v)?),
            "delta0" => s.delta0 = Some(parse_value(&key, v)?),
            "eps0" => s.eps0 = Some(parse_value(&key, v)?),
            "kappa0" => s.kappa0 = Some(parse_value(&key, v)?),
            "mu0" => s.mu0 = Some(parse_value(&key, v)?),
            "t-end" => s.t_end = Some(parse_value(&key, v)?),
            "t-step" => s.t_step = Some(parse_value(&key, v)?),
            "x-min" => s.x_min = Some(parse_value(&key, v)?),
            "x-max" => s.x_max = Some(parse_value(&key, v)?),
            "x-points" => s.x_points = Some(parse_value(&key, v)?),
            "t" => s.t = Some(parse_value(&key, v)?),
            "dt" => s.dt = Some(parse_value(&key, v)?),
            "out" => s.out = Some(PathBuf::from(v)),
            other => return Err(CliError::Usage(format!("unknown config key '{other}'"))),
        }
    }
    Ok(s)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config key '{key}': cannot parse '{value}'")))
}
