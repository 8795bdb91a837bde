use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use magmech_core::analytic_strip::{MapContent, Region};
use magmech_core::commands::{self, FieldmapSpec, Format, SweepSpec};
use magmech_core::scenario::{bundled, Scenario, BUNDLED};
use magmech_core::units::{parse_quantity, Dimension};
use magmech_core::{Error, Result};

/// Magnetomechanical coupling calculator for a superconducting strip read
/// out by a flux-tunable circuit.
#[derive(Parser, Debug)]
#[command(name = "magmech", version)]
struct Cli {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long, global = true, default_value = "paper-flagship")]
    scenario: String,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format of `report`; the other commands always write CSV.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    StripResponse,
    Applied,
    Total,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coupling, decoherence and noise report with warnings and flags.
    Report,
    /// Recompute the report over a range of one parameter.
    Sweep {
        /// Parameter path, e.g. `coil.height`, `zc_over_w`, `lambda_over_w`.
        #[arg(long)]
        param: String,
        /// Start value; unit suffixes are accepted.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        /// End value, inclusive.
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        /// Number of points.
        #[arg(long)]
        steps: usize,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
    },
    /// Vector potential and field on a (y, z) grid.
    Fieldmap {
        #[arg(long, value_enum, default_value_t = Which::Total)]
        which: Which,
        #[arg(long, default_value = "-3 um", allow_hyphen_values = true)]
        y_min: String,
        #[arg(long, default_value = "3 um", allow_hyphen_values = true)]
        y_max: String,
        #[arg(long, default_value = "-2 um", allow_hyphen_values = true)]
        z_min: String,
        #[arg(long, default_value = "3 um", allow_hyphen_values = true)]
        z_max: String,
        #[arg(long, default_value_t = 121)]
        ny: usize,
        #[arg(long, default_value_t = 101)]
        nz: usize,
        /// Strip displacement z_m.
        #[arg(long, default_value = "0.1 um", allow_hyphen_values = true)]
        offset: String,
        /// Add the optimal pick-up coil edge y = w_c⋆/2 for each row's height.
        #[arg(long)]
        locus: bool,
    },
    /// Finite-length convergence of η by magnetic energy minimization.
    Mem {
        /// Comma-separated L/w values (default: from the scenario).
        #[arg(long, value_delimiter = ',')]
        aspects: Option<Vec<f64>>,
        /// Comma-separated approximate cell counts (default: from the scenario).
        #[arg(long, value_delimiter = ',')]
        cells: Option<Vec<usize>>,
    },
}

fn load(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.exists() {
        return Scenario::from_file(path);
    }
    if BUNDLED.iter().any(|(n, _)| *n == arg) {
        return bundled(arg);
    }
    Err(Error::config(format!("scenario '{arg}' is neither a file nor a bundled scenario")))
}

fn length(text: &str) -> Result<f64> {
    parse_quantity(text, Dimension::Length)
}

fn run(cli: &Cli) -> Result<(String, Vec<String>)> {
    let scenario = load(&cli.scenario)?;
    match &cli.command {
        Command::Report => {
            let format = match cli.format {
                OutFormat::Text => Format::Text,
                OutFormat::Csv => Format::Csv,
            };
            Ok((commands::report(&scenario, format)?, Vec::new()))
        }
        Command::Sweep { param, from, to, steps, log } => {
            let dim = Scenario::path_dimension(param)?;
            let spec = SweepSpec {
                path: param.clone(),
                from: parse_quantity(from, dim)?,
                to: parse_quantity(to, dim)?,
                steps: *steps,
                log: *log,
            };
            Ok((commands::sweep(&scenario, &spec)?, Vec::new()))
        }
        Command::Fieldmap { which, y_min, y_max, z_min, z_max, ny, nz, offset, locus } => {
            let region = Region {
                y_min: length(y_min)?,
                y_max: length(y_max)?,
                z_min: length(z_min)?,
                z_max: length(z_max)?,
                ny: *ny,
                nz: *nz,
            };
            let content = match which {
                Which::StripResponse => MapContent::StripResponse,
                Which::Applied => MapContent::Applied,
                Which::Total => MapContent::Total,
            };
            let spec = FieldmapSpec { region, content, offset: length(offset)?, locus: *locus };
            Ok((commands::fieldmap_csv(&scenario, &spec)?, Vec::new()))
        }
        Command::Mem { aspects, cells } => {
            let aspects = aspects.clone().unwrap_or_else(|| scenario.options.mem_aspects.clone());
            let cells = cells.clone().unwrap_or_else(|| scenario.options.mem_cells.clone());
            let out = commands::mem(&scenario, &aspects, &cells)?;
            Ok((out.csv, out.warnings))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((text, warnings)) => {
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => std::io::stdout().lock().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
