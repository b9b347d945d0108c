//! `nilp-arctic`: exact partition and one-point functions, arctic curves, convergence tables
//! and sampling from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;

use config::{field, CliError, Command, RunConfig};

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

#[derive(Parser, Debug)]
#[command(
    name = "nilp-arctic",
    version,
    about = "Non-intersecting lattice paths: exact counts, one-point functions, arctic curves and sampling"
)]
struct Cli {
    /// partition, onepoint, arctic, converge, sample or selftest.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Read a run configuration (TOML); flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the canonical configuration of this run and exit.
    #[arg(long)]
    print_config: bool,
    /// Same as the `selftest` command.
    #[arg(long)]
    selftest: bool,
    /// Boundary shape file.
    #[arg(long)]
    shape: Option<PathBuf>,
    /// Explicit starting points, e.g. 0,2,3,6.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    seq: Option<Vec<i64>>,
    /// System sizes for realizing --shape.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Curve samples per portion.
    #[arg(long)]
    grid: Option<usize>,
    /// Endpoint refinement tolerance for curve portions.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG figure (needs --out).
    #[arg(long)]
    svg: bool,
    /// Use the triangular-lattice frame.
    #[arg(long)]
    triangular: bool,
    /// One-point function: H, Htilde, Hhat or Hcheck.
    #[arg(long)]
    kind: Option<String>,
    /// Convergence family: I, II or hat.
    #[arg(long)]
    family: Option<String>,
    /// Restrict the convergence table to LO,HI.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(f64, f64)>,
    /// Tangent lines to draw in the arctic figure, by parameter t.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tangents: Option<Vec<f64>>,
    /// Cross-check the partition function by exhaustive enumeration (small sizes only).
    #[arg(long)]
    enumerate: bool,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    thin: Option<u64>,
    #[arg(long)]
    chains: Option<usize>,
    /// Chain start: minimal or maximal.
    #[arg(long)]
    start: Option<String>,
}

fn build(cli: Cli) -> Result<RunConfig, CliError> {
    let command = if cli.selftest { Some(Command::Selftest) } else { cli.command };
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| field("config", format!("{}: {e}", p.display())))?;
            RunConfig::from_text(&text)?
        }
        None => RunConfig::new(command.ok_or_else(|| field("command", "missing subcommand"))?),
    };
    if let Some(c) = command {
        cfg.command = c;
    }
    if cli.shape.is_some() {
        cfg.shape = cli.shape;
    }
    if cli.seq.is_some() {
        cfg.seq = cli.seq;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(v) = cli.grid {
        cfg.grid = v;
    }
    if let Some(v) = cli.tol {
        cfg.tol = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    cfg.svg |= cli.svg;
    cfg.triangular |= cli.triangular;
    cfg.enumerate |= cli.enumerate;
    if let Some(v) = cli.kind {
        cfg.kind = v;
    }
    if let Some(v) = cli.family {
        cfg.family = v;
    }
    if cli.window.is_some() {
        cfg.window = cli.window;
    }
    if let Some(v) = cli.tangents {
        cfg.tangents = v;
    }
    if let Some(v) = cli.samples {
        cfg.samples = v;
    }
    if cli.burn_in.is_some() {
        cfg.burn_in = cli.burn_in;
    }
    if cli.thin.is_some() {
        cfg.thin = cli.thin;
    }
    if let Some(v) = cli.chains {
        cfg.chains = v;
    }
    if let Some(v) = cli.start {
        cfg.start = v;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let print = cli.print_config;
    let result = build(cli).and_then(|cfg| {
        if print {
            print!("{}", cfg.to_text());
            return Ok(());
        }
        commands::run(&cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nilp-arctic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
