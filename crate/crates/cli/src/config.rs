//! Flag parsing and translation into library types.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use evans_core::{GridSpec, MethodKind, ReactionModel};
use num_complex::Complex64;

use crate::profile;
use crate::CliError;

#[derive(Parser)]
#[command(
    name = "evans",
    version,
    about = "Evans function computation for travelling-wave stability of scalar reaction-diffusion equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate D(lambda); one CSV row per lambda.
    Evaluate(ComputeArgs),
    /// Step-size sweep of |E_D| at one lambda, with a fitted order.
    Converge(ComputeArgs),
    /// Geometric lambda sweep of |E_D| and the asymptotic-series residual.
    SweepLambda(ComputeArgs),
    /// Measured vs predicted Evans-function error per lambda.
    Predict(ComputeArgs),
    /// Emit a gnuplot script for a CSV produced by this tool.
    Plotscript(PlotArgs),
}

#[derive(Args)]
pub struct ComputeArgs {
    /// Model kind: constant, nagumo, bump, or profile.
    #[arg(long)]
    pub model: String,

    /// Nagumo parameter in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,

    /// Background value of f'(u_hat) for constant and bump models.
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,

    /// Wave speed for constant, bump and profile models.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,

    /// Gaussian potential amplitude (bump model).
    #[arg(long, allow_negative_numbers = true)]
    pub amplitude: Option<f64>,

    /// Gaussian potential width (bump model).
    #[arg(long)]
    pub width: Option<f64>,

    /// Tabulated profile file: one "xi value" pair per line.
    #[arg(long)]
    pub profile: Option<PathBuf>,

    /// Integration method: midpoint, magnus4, or gl4.
    #[arg(long)]
    pub method: String,

    /// Truncation half-length.
    #[arg(long = "L")]
    pub half_length: f64,

    /// Step size; a comma-separated list for converge. Exactly one of
    /// --h / --N.
    #[arg(long = "h", value_delimiter = ',')]
    pub step: Option<Vec<f64>>,

    /// Cells per side. Exactly one of --h / --N.
    #[arg(long = "N")]
    pub steps: Option<usize>,

    /// Spectral parameters, comma separated; complex values as "re+imi".
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<String>>,

    /// Geometric lambda sweep: first value.
    #[arg(long)]
    pub lambda_start: Option<f64>,

    /// Geometric lambda sweep: ratio between consecutive values.
    #[arg(long)]
    pub lambda_factor: Option<f64>,

    /// Geometric lambda sweep: number of values.
    #[arg(long)]
    pub lambda_count: Option<usize>,

    /// Output CSV path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Worker threads for sweep points (default: number of processors).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args)]
pub struct PlotArgs {
    /// CSV file produced by evaluate, converge, sweep-lambda or predict.
    pub csv: PathBuf,

    /// Script path; defaults to the CSV path with a .gp extension.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ComputeArgs {
    pub fn build_model(&self) -> Result<ReactionModel, CliError> {
        let speed = self.c.unwrap_or(0.0);
        match self.model.as_str() {
            "constant" => Ok(ReactionModel::constant(self.q.unwrap_or(0.0), speed)),
            "nagumo" => {
                let a = self
                    .a
                    .ok_or_else(|| config_err("the nagumo model needs --a"))?;
                ReactionModel::nagumo(a).map_err(|e| config_err(e.to_string()))
            }
            "bump" => {
                let amplitude = self
                    .amplitude
                    .ok_or_else(|| config_err("the bump model needs --amplitude"))?;
                let width = self
                    .width
                    .ok_or_else(|| config_err("the bump model needs --width"))?;
                ReactionModel::bump(self.q.unwrap_or(0.0), speed, amplitude, width)
                    .map_err(|e| config_err(e.to_string()))
            }
            "profile" => {
                let path = self
                    .profile
                    .as_ref()
                    .ok_or_else(|| config_err("the profile model needs --profile <file>"))?;
                let tab = profile::load_profile(path)?;
                Ok(ReactionModel::from_profile(tab, speed))
            }
            other => Err(config_err(format!(
                "unknown model '{other}' (expected constant, nagumo, bump, or profile)"
            ))),
        }
    }

    pub fn method(&self) -> Result<MethodKind, CliError> {
        match self.method.as_str() {
            "midpoint" => Ok(MethodKind::Midpoint),
            "magnus4" => Ok(MethodKind::Magnus4),
            "gl4" => Ok(MethodKind::GaussLegendre4),
            other => Err(config_err(format!(
                "unknown method '{other}' (expected midpoint, magnus4, or gl4)"
            ))),
        }
    }

    /// The step sizes requested via --h, or the single grid from --N.
    /// Enforces that exactly one of the two was given.
    pub fn step_list(&self) -> Result<StepSpec, CliError> {
        match (&self.step, self.steps) {
            (Some(hs), None) => {
                if hs.is_empty() {
                    return Err(config_err("--h needs at least one value"));
                }
                Ok(StepSpec::Steps(hs.clone()))
            }
            (None, Some(n)) => Ok(StepSpec::Cells(n)),
            (Some(_), Some(_)) => Err(config_err("give exactly one of --h and --N, not both")),
            (None, None) => Err(config_err("give exactly one of --h and --N")),
        }
    }

    /// Grid for a single requested step size; rounds the cell count up with
    /// a warning when L/h is not integral (the effective h then differs).
    pub fn grid_for_step(&self, h: f64) -> Result<GridSpec, CliError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(config_err(format!("step size {h} must be positive")));
        }
        let ratio = self.half_length / h;
        let rounded = ratio.round();
        let n = if (ratio - rounded).abs() < 1e-9 * ratio.max(1.0) {
            rounded as usize
        } else {
            let up = ratio.ceil() as usize;
            eprintln!(
                "warning: L/h = {ratio} is not integral; using N = {up} (h = {:e})",
                self.half_length / up as f64
            );
            up
        };
        GridSpec::new(self.half_length, n.max(1)).map_err(|e| config_err(e.to_string()))
    }

    pub fn single_grid(&self) -> Result<GridSpec, CliError> {
        match self.step_list()? {
            StepSpec::Cells(n) => {
                GridSpec::new(self.half_length, n).map_err(|e| config_err(e.to_string()))
            }
            StepSpec::Steps(hs) => {
                if hs.len() != 1 {
                    return Err(config_err("this command takes a single --h value"));
                }
                self.grid_for_step(hs[0])
            }
        }
    }

    /// Lambda values from either the explicit list or the geometric sweep.
    pub fn lambda_values(&self) -> Result<Vec<Complex64>, CliError> {
        let sweep = (self.lambda_start, self.lambda_factor, self.lambda_count);
        match (&self.lambda, sweep) {
            (Some(list), (None, None, None)) => {
                list.iter().map(|s| parse_complex(s)).collect()
            }
            (None, (Some(start), Some(factor), Some(count))) => {
                if count == 0 {
                    return Err(config_err("--lambda-count must be at least 1"));
                }
                let mut values = Vec::with_capacity(count);
                let mut v = start;
                for _ in 0..count {
                    values.push(Complex64::new(v, 0.0));
                    v *= factor;
                }
                Ok(values)
            }
            (None, (None, None, None)) => Err(config_err(
                "give --lambda or the sweep trio --lambda-start/--lambda-factor/--lambda-count",
            )),
            (Some(_), _) => Err(config_err(
                "give either --lambda or the sweep trio, not both",
            )),
            _ => Err(config_err(
                "the sweep needs all three of --lambda-start, --lambda-factor, --lambda-count",
            )),
        }
    }

    pub fn geometric_sweep(&self) -> Result<Vec<Complex64>, CliError> {
        if self.lambda.is_some() {
            return Err(config_err(
                "sweep-lambda takes the geometric trio --lambda-start/--lambda-factor/--lambda-count",
            ));
        }
        let values = self.lambda_values()?;
        if values.len() < 3 {
            return Err(config_err("the lambda sweep needs at least 3 values"));
        }
        Ok(values)
    }

    pub fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
    }
}

pub enum StepSpec {
    Steps(Vec<f64>),
    Cells(usize),
}

/// Parse "1.5", "-2", "2+1i", "1e2-0.5i", "3i".
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t = s.trim();
    let bad = || config_err(format!("cannot parse '{s}' as a (complex) number"));
    if let Some(body) = t.strip_suffix('i') {
        let bytes = body.as_bytes();
        if bytes.is_empty() {
            return Err(bad());
        }
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i].parse().map_err(|_| bad())?;
                let im_part = &body[i..];
                let im: f64 = match im_part {
                    "+" => 1.0,
                    "-" => -1.0,
                    _ => im_part.parse().map_err(|_| bad())?,
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = body.parse().map_err(|_| bad())?;
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}
