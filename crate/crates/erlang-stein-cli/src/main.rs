use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use erlang_stein::metrics::Staffing;
use erlang_stein_cli::{CliError, Command, Format, ParamFlags, RunConfig, DEFAULT_TAIL_TOL};

/// Steady-state numerics and Stein-method checks for Erlang-A/C queues.
#[derive(Parser)]
#[command(name = "erlang-stein", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mean queue length and its diffusion error.
    Table1(Common),
    /// Second and tenth scaled moments.
    Table2(Common),
    /// Second-moment error near heavy traffic.
    Table3(Common),
    /// Wasserstein and Kolmogorov distances (standard grid without --lambda/--n).
    Distance(Common),
    /// All bound suites (standard grid without --lambda/--n).
    Verify(Common),
    /// Distances along a staffing rule.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    #[arg(long)]
    beta: Option<f64>,
    /// Comma-separated offered loads.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Qd,
    Qed,
    Nds,
}

fn config(cli: Cli) -> RunConfig {
    let (command, c) = match cli.command {
        Cmd::Table1(c) => (Command::Table1, c),
        Cmd::Table2(c) => (Command::Table2, c),
        Cmd::Table3(c) => (Command::Table3, c),
        Cmd::Distance(c) => (Command::Distance, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
    };
    RunConfig {
        command,
        flags: ParamFlags {
            lambda: c.lambda,
            mu: c.mu,
            n: c.n,
            alpha: c.alpha,
            regime: c.regime.map(|r| match r {
                RegimeArg::Qd => Staffing::Qd,
                RegimeArg::Qed => Staffing::Qed,
                RegimeArg::Nds => Staffing::Nds,
            }),
            beta: c.beta,
            sizes: c.sizes,
        },
        tail_tol: c.tail_tol,
        format: match c.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        },
        out: c.out,
    }
}

fn write(cfg: &RunConfig, doc: &erlang_stein_cli::report::Document) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match cfg.format {
        Format::Csv => doc.write_csv(&mut sink)?,
        Format::Json => doc.write_json(&mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = config(cli);
    let outcome = match cfg.execute() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write(&cfg, &outcome.document) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if outcome.violation {
        eprintln!("error: at least one bound check failed");
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
