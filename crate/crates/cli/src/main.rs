use clap::Parser;
use selfsim_cli::{
    config::Command, CliError, Format, RunConfig, EXIT_ASSERTION, EXIT_OK, EXIT_PARSE,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact computations in the groups of intermediate growth `𝒢_ω`.
///
/// Flags override values from `--config`, which override the defaults and
/// the SELFSIM_MAX_ELEMENTS / SELFSIM_MAX_SECONDS / SELFSIM_MAX_VERTICES /
/// SELFSIM_PATH_CAP environment variables.
#[derive(Parser, Debug)]
#[command(name = "selfsim", version)]
struct Args {
    /// Analysis to run. Optional when the config file names one.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    dump_config: bool,
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    point: Option<String>,
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    path_cap: Option<usize>,
    #[arg(long)]
    length_cap: Option<usize>,
    #[arg(long)]
    vertex: Option<u8>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long)]
    anti_level: Option<usize>,
    #[arg(long)]
    anti_ratio: Option<f64>,
    #[arg(long)]
    compare: Option<String>,
    #[arg(long)]
    shared_prefix: Option<usize>,
    #[arg(long)]
    include_elements: bool,
    #[arg(long)]
    max_elements: Option<usize>,
    #[arg(long)]
    max_seconds: Option<f64>,
    #[arg(long)]
    max_vertices: Option<usize>,
    #[arg(long)]
    expansion_cap: Option<usize>,
    #[arg(long)]
    max_inverted_steps: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, short = 'j')]
    threads: Option<usize>,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Also write columnar plot data to this file.
    #[arg(long)]
    plot: Option<PathBuf>,
}

macro_rules! overlay {
    ($cfg:ident, $args:ident, $($field:ident),*) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = v.into(); })*
    };
}

fn resolve(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::from_env()?;
    if let Some(path) = &args.config {
        cfg = RunConfig::from_toml_over(&cfg, &std::fs::read_to_string(path)?)?;
    }
    overlay!(
        cfg,
        args,
        command,
        oracle,
        format,
        radius,
        level,
        steps,
        point,
        seed,
        samples,
        path_cap,
        vertex,
        lambda,
        tol,
        constant,
        anti_level,
        anti_ratio,
        max_elements,
        max_vertices,
        expansion_cap,
        max_inverted_steps
    );
    overlay!(
        cfg,
        args,
        measure,
        length_cap,
        compare,
        shared_prefix,
        max_seconds,
        threads,
        output,
        plot
    );
    cfg.include_elements |= args.include_elements;
    Ok(cfg)
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let cfg = resolve(args)?;
    if args.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(EXIT_OK);
    }
    if args.command.is_none() && args.config.is_none() {
        return Err(CliError::Config("no command given".into()));
    }
    let outcome = selfsim_cli::run_in_pool(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, &outcome.output)?,
        None => print!("{}", outcome.output),
    }
    if let (Some(path), Some(body)) = (&cfg.plot, &outcome.plot) {
        std::fs::write(path, body)?;
    }
    Ok(match outcome.failure {
        Some(msg) => {
            eprintln!("selfsim: check failed: {msg}");
            EXIT_ASSERTION
        }
        None => EXIT_OK,
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    let code = execute(&args).unwrap_or_else(|e| {
        eprintln!("selfsim: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
