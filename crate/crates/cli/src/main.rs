use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use maxlenqm::checks;
use maxlenqm::commands;
use maxlenqm::config::{parse_tol, PartialConfig};
use maxlenqm::output::{emit, Format};
use maxlenqm::{CliError, CliResult, RunConfig};

/// Position-deformed quantum mechanics with maximal length and minimal momentum.
#[derive(Debug, Parser)]
#[command(name = "maxlenqm", version, allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Deformation parameter τ (inverse length).
    #[arg(long, global = true)]
    tau: Option<f64>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    mass: Option<f64>,
    /// Gauss-Legendre panels over the θ chart.
    #[arg(long, global = true)]
    panels: Option<usize>,
    /// Nodes per panel.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Transform cutoff in units of τħ.
    #[arg(long, global = true)]
    eta_max_mult: Option<f64>,
    /// Transform step is τħ√3 divided by this.
    #[arg(long, global = true)]
    eta_step_div: Option<f64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON config file with any subset of the run settings.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long, global = true)]
    tol: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Overlap of momentum eigenstates against η - η′.
    Overlap {
        /// Half-width of the Δ range (default 3τħ√3).
        #[arg(long)]
        delta_max: Option<f64>,
        #[arg(long, default_value_t = 241)]
        samples: usize,
    },
    /// Lattice momenta and kinetic energies.
    Spectrum {
        #[arg(long, default_value_t = 10)]
        n_max: i64,
    },
    /// Moments and the uncertainty bound for a built-in state (JSON).
    Uncertainty {
        #[arg(long, default_value = "hermite:k=0")]
        state: String,
    },
    /// Transform round-trip error and Parseval factor along an η cutoff ladder.
    Roundtrip {
        #[arg(long, default_value = "hermite:k=1")]
        state: String,
    },
    /// Run the invariant suite; exit 1 on any failure.
    Checks,
    /// Print the effective configuration as JSON.
    Config,
}

fn resolve(g: &GlobalArgs) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &g.config {
        cfg = PartialConfig::read(path)?.overlay(cfg);
    }
    let mut tol = std::collections::BTreeMap::new();
    for t in &g.tol {
        let (k, v) = parse_tol(t)?;
        tol.insert(k, v);
    }
    let flags = PartialConfig {
        tau: g.tau,
        hbar: g.hbar,
        mass: g.mass,
        panels: g.panels,
        order: g.order,
        eta_max_mult: g.eta_max_mult,
        eta_step_div: g.eta_step_div,
        tol: (!tol.is_empty()).then_some(tol),
        output_path: g.out.clone(),
        format: g.format,
    };
    let cfg = flags.overlay(cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("MAXLENQM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("MAXLENQM_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let cfg = resolve(&cli.global)?;
    let out = cfg.output_path.as_deref();
    match cli.command {
        Command::Overlap { delta_max, samples } => emit(&commands::overlap(&cfg, delta_max, samples)?.render(cfg.format), out),
        Command::Spectrum { n_max } => emit(&commands::spectrum(&cfg, n_max)?.render(cfg.format), out),
        Command::Uncertainty { state } => emit(&commands::uncertainty(&cfg, &state)?, out),
        Command::Roundtrip { state } => emit(&commands::roundtrip(&cfg, &state)?.render(cfg.format), out),
        Command::Checks => {
            let outcomes = checks::run(&cfg)?;
            let text = match cfg.format {
                Format::Csv => checks::table(&outcomes).render(Format::Csv),
                Format::Json => {
                    let doc = serde_json::json!({
                        "checks": outcomes,
                        "failed": checks::failures(&outcomes),
                    });
                    let mut s = serde_json::to_string_pretty(&doc).expect("outcomes serialize");
                    s.push('\n');
                    s
                }
            };
            emit(&text, out)?;
            match checks::failures(&outcomes) {
                0 => Ok(()),
                failed => Err(CliError::ChecksFailed { failed }),
            }
        }
        Command::Config => emit(&cfg.to_json(), out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("maxlenqm: {e}");
            if e.exit_code() == 3 {
                println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("error serializes"));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
