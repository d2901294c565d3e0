//! Front end for the `erlang-stein` binary: argument model, table runners,
//! verification suites and report writers.

pub mod report;
pub mod tables;
pub mod verify;

use std::path::PathBuf;

use erlang_stein::metrics::{distances, erlang_c_standard_grid, universality_sweep, DistanceReport, Staffing, SweepSpec};
use erlang_stein::ModelParams;
use thiserror::Error;

use report::{Document, Record, SuiteSummary};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] erlang_stein::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Table1,
    Table2,
    Table3,
    Distance,
    Verify,
    Sweep,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Table1 => "table1",
            Command::Table2 => "table2",
            Command::Table3 => "table3",
            Command::Distance => "distance",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn label(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Raw numeric flags before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamFlags {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub n: Option<u64>,
    pub alpha: Option<f64>,
    pub regime: Option<Staffing>,
    pub beta: Option<f64>,
    pub sizes: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub flags: ParamFlags,
    pub tail_tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// A finished run; `violation` is set when a verify row failed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Document,
    pub violation: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            flags: ParamFlags::default(),
            tail_tol: DEFAULT_TAIL_TOL,
            format: Format::Csv,
            out: None,
        }
    }

    /// Explicit parameters, or `None` when no point was given.
    fn point(&self) -> Result<Option<ModelParams>, CliError> {
        let f = &self.flags;
        match (f.lambda, f.n) {
            (None, None) => {
                if f.mu.is_some() || f.alpha.is_some() {
                    return Err(CliError::Usage("--lambda and --n are required with --mu or --alpha".into()));
                }
                Ok(None)
            }
            (Some(lambda), Some(n)) => {
                Ok(Some(ModelParams::new(lambda, f.mu.unwrap_or(1.0), n, f.alpha.unwrap_or(0.0))?))
            }
            _ => Err(CliError::Usage("--lambda and --n must be given together".into())),
        }
    }

    fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let f = &self.flags;
        let rule = f.regime.ok_or_else(|| CliError::Usage("sweep needs --regime".into()))?;
        let beta = f.beta.ok_or_else(|| CliError::Usage("sweep needs --beta".into()))?;
        let sizes = f.sizes.clone().ok_or_else(|| CliError::Usage("sweep needs --sizes".into()))?;
        if sizes.is_empty() {
            return Err(CliError::Usage("--sizes must list at least one offered load".into()));
        }
        let mu = f.mu.unwrap_or(1.0);
        let alpha = f.alpha.unwrap_or(0.0);
        if !(mu.is_finite() && mu > 0.0) {
            return Err(erlang_stein::Error::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "must be finite and strictly positive",
            }
            .into());
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(erlang_stein::Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "abandonment rate must be finite and nonnegative",
            }
            .into());
        }
        Ok(SweepSpec::Staffed {
            rule,
            beta,
            sizes,
            mu,
            alpha_over_mu: alpha / mu,
        })
    }

    fn config_record(&self) -> Record {
        let f = &self.flags;
        let sizes = f.sizes.as_ref().map(|s| {
            s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        });
        Record::new()
            .with("command", self.command.label())
            .with("lambda", f.lambda)
            .with("mu", f.mu)
            .with("n", f.n)
            .with("alpha", f.alpha)
            .with("regime", f.regime.map(Staffing::label))
            .with("beta", f.beta)
            .with("sizes", sizes)
            .with("tail_tol", self.tail_tol)
            .with("format", self.format.label())
    }

    /// Computes everything; nothing is written here.
    pub fn execute(&self) -> Result<Outcome, CliError> {
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(erlang_stein::Error::InvalidParameter {
                name: "tail_tol",
                value: self.tail_tol,
                reason: "must lie in (0, 1)",
            }
            .into());
        }
        let tol = self.tail_tol;
        let mut suites = Vec::new();
        let mut violation = false;
        let rows = match self.command {
            Command::Table1 => tables::run_table1(tol)?.iter().map(|r| r.record()).collect(),
            Command::Table2 => tables::run_table2(tol)?.iter().map(|r| r.record()).collect(),
            Command::Table3 => tables::run_table3(tol)?.iter().map(|r| r.record()).collect(),
            Command::Distance => {
                let reports = match self.point()? {
                    Some(p) => vec![distances(p, tol)?],
                    None => universality_sweep(&SweepSpec::Grid(erlang_c_standard_grid()), tol)?,
                };
                suites.push(bound_summary(&reports));
                reports.iter().map(distance_record).collect()
            }
            Command::Sweep => {
                let reports = universality_sweep(&self.sweep_spec()?, tol)?;
                suites.push(bound_summary(&reports));
                reports.iter().map(distance_record).collect()
            }
            Command::Verify => {
                let params = match self.point()? {
                    Some(p) => vec![p],
                    None => erlang_c_standard_grid(),
                };
                let rows = verify::run_verify(&params, tol)?;
                violation = rows.iter().any(|r| r.satisfied == Some(false));
                suites = verify::summarize(&rows);
                rows.iter().map(|r| r.record()).collect()
            }
        };
        Ok(Outcome {
            document: Document {
                command: self.command.label(),
                config: self.config_record(),
                rows,
                suites,
                tolerances: tolerances(tol),
            },
            violation,
        })
    }
}

fn tolerances(tail_tol: f64) -> Record {
    Record::new()
        .with("tail_tol", tail_tol)
        .with("bound_rel_slack", 1e-9)
        .with("bound_abs_slack", 1e-12)
        .with("stein_residual", verify::STEIN_RESIDUAL_TOL)
        .with("decomposition_slack", verify::DECOMPOSITION_SLACK)
}

fn bound_summary(reports: &[DistanceReport]) -> SuiteSummary {
    let mut s = SuiteSummary {
        name: "erlang_c_universal_bounds".into(),
        passed: 0,
        failed: 0,
        reported: 0,
    };
    for r in reports {
        match r.within_bounds() {
            Some(true) => s.passed += 1,
            Some(false) => s.failed += 1,
            None => s.reported += 1,
        }
    }
    s
}

pub fn distance_record(r: &DistanceReport) -> Record {
    Record::new()
        .with("lambda", r.params.lambda)
        .with("mu", r.params.mu)
        .with("n", r.params.n)
        .with("alpha", r.params.alpha)
        .with("regime", r.regime.label())
        .with("R", r.r)
        .with("delta", r.delta)
        .with("zeta", r.zeta)
        .with("d_w", r.d_w)
        .with("d_k", r.d_k)
        .with("ratio_w", r.ratio_w)
        .with("ratio_k", r.ratio_k)
        .with("bound_w", r.bound_w)
        .with("bound_k", r.bound_k)
        .with("density_sup", r.density_sup)
        .with("dk_dw_consistent", r.dk_dw_consistent)
        .with("within_bounds", r.within_bounds())
}
