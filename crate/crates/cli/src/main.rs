use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use meic_cli::commands;
use meic_cli::config::RunConfig;
use meic_cli::CliError;

/// Co-simulator for a capacitively driven global interconnect with a
/// magnetoelectric MTJ receiver.
#[derive(Parser, Debug)]
#[command(name = "meic", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML config file; keys it omits keep their shipped defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed for all random streams.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output file (stdout when omitted). Written atomically.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for Monte Carlo runs (0 = one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Override any config key, e.g. `--set wire.r_per_mm_ohm=40`. Repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// Device temperature in kelvin.
    #[arg(long, global = true, value_name = "K")]
    temperature: Option<f64>,
    /// Wire length in mm.
    #[arg(long, global = true, value_name = "MM")]
    length_mm: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Magnetization trajectory under a constant ME voltage (CSV).
    Trajectory {
        /// ME capacitor voltage in volts.
        #[arg(long, allow_negative_numbers = true)]
        v_me: Option<f64>,
        /// Simulated time in ns.
        #[arg(long)]
        duration_ns: Option<f64>,
    },
    /// Switching probability versus ME voltage (CSV).
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        v_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        v_max: Option<f64>,
        /// Voltage step in volts.
        #[arg(long)]
        step: Option<f64>,
        /// Trials per voltage (at least 100).
        #[arg(long)]
        trials: Option<usize>,
        /// Detection window per trial in ns.
        #[arg(long)]
        window_ns: Option<f64>,
    },
    /// Clocked link waveforms (CSV) plus an energy/delay summary (JSON).
    Link {
        /// Input bits, e.g. 10110.
        #[arg(long)]
        pattern: Option<String>,
        /// Repeat or truncate the pattern to this many cycles.
        #[arg(long)]
        cycles: Option<usize>,
        /// Summary JSON path (defaults to the CSV path with a .json extension).
        #[arg(long, value_name = "PATH")]
        summary: Option<PathBuf>,
    },
    /// Energy and delay of full-swing, low-swing capacitive and ME links.
    Compare {
        /// Comma-separated wire lengths in mm.
        #[arg(long)]
        lengths: Option<String>,
        /// Bits simulated per ME link.
        #[arg(long)]
        bits: Option<usize>,
        /// Emit CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Monte Carlo parameter variation of the receiving-end voltage (CSV).
    Variation {
        /// Relative half-width of the uniform variation, in [0, 0.5].
        #[arg(long)]
        spread: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Integrator step-size convergence at zero temperature (CSV).
    Convergence {
        #[arg(long, allow_negative_numbers = true)]
        v_me: Option<f64>,
        /// Comma-separated step sizes in ps.
        #[arg(long, value_delimiter = ',')]
        dt_ps: Option<Vec<f64>>,
        #[arg(long)]
        duration_ns: Option<f64>,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for s in &c.set {
        cfg.set(s)?;
    }
    if let Some(v) = c.seed {
        cfg.sim.seed = v;
    }
    if let Some(v) = c.threads {
        cfg.sim.threads = v;
    }
    if let Some(v) = c.temperature {
        cfg.device.temperature_k = v;
    }
    if let Some(v) = c.length_mm {
        cfg.wire.length_mm = v;
    }
    let r = &mut cfg.run;
    match &cli.command {
        Command::Trajectory { v_me, duration_ns } => {
            set(&mut r.trajectory_v_me, *v_me);
            set(&mut r.trajectory_duration_ns, *duration_ns);
        }
        Command::Sweep { v_min, v_max, step, trials, window_ns } => {
            set(&mut r.sweep_v_min, *v_min);
            set(&mut r.sweep_v_max, *v_max);
            set(&mut r.sweep_step, *step);
            set(&mut r.sweep_trials, *trials);
            set(&mut cfg.sim.window_ns, *window_ns);
        }
        Command::Link { pattern, cycles, .. } => {
            set(&mut r.link_pattern, pattern.clone());
            if cycles.is_some() {
                r.link_cycles = *cycles;
            }
        }
        Command::Compare { lengths, bits, .. } => {
            if let Some(text) = lengths {
                r.compare_lengths_mm = commands::parse_lengths(text)?;
            }
            set(&mut r.compare_bits, *bits);
        }
        Command::Variation { spread, trials } => {
            set(&mut r.variation_spread, *spread);
            set(&mut r.variation_trials, *trials);
        }
        Command::Convergence { v_me, dt_ps, duration_ns } => {
            set(&mut r.convergence_v_me, *v_me);
            set(&mut r.convergence_dt_ps, dt_ps.clone());
            set(&mut r.convergence_duration_ns, *duration_ns);
        }
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = build_config(cli)?;
    let out = cli.common.out.as_deref();
    match &cli.command {
        Command::Trajectory { .. } => commands::trajectory(&cfg, out),
        Command::Sweep { .. } => commands::sweep(&cfg, out),
        Command::Link { summary, .. } => commands::link(&cfg, out, summary.as_deref()),
        Command::Compare { csv, .. } => commands::compare(&cfg, out, *csv),
        Command::Variation { .. } => commands::variation(&cfg, out),
        Command::Convergence { .. } => commands::convergence(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
