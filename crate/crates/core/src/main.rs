use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use normsip::bounds::{BoundName, Fault};
use normsip::cli::{
    parse_anchor, parse_bounds, parse_eps_list, parse_list, parse_norm, render_report_text,
    render_witness_text, run_report, run_witness, to_json, InputError, Overrides, ReportOptions,
    WitnessOptions, EXIT_INPUT,
};
use normsip::space::{NormSpec, Vector};
use normsip::witness::{WitnessKind, DEFAULT_WITNESS_COUNT};

/// Semi-inner products and triangle-ratio certificates on finite-dimensional normed spaces.
#[derive(Parser)]
#[command(name = "normsip", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound on a dataset (JSON, or CSV by extension).
    Report(ReportArgs),
    /// Tabulate a sharpness witness over a decreasing list of epsilons.
    Witness(WitnessArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    MinAsMax,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ReportArgs {
    input: PathBuf,
    /// `lp:<p>`, `lp:inf` or `wlp:<p>:<w1>,<w2>,...`.
    #[arg(long)]
    norm: Option<String>,
    /// `mean`, `index:<k>` or `coords:<c1>,<c2>,...`.
    #[arg(long)]
    anchor: Option<String>,
    /// Numeric stopping tolerance, relative to `||x|| ||y||` [default: 1e-9].
    #[arg(long)]
    tol: Option<f64>,
    /// `all` or a comma-separated list of bound names.
    #[arg(long, default_value = "all")]
    bounds: String,
    /// Comma-separated weights; normalized to sum 1.
    #[arg(long)]
    weights: Option<String>,
    /// Gap parameter in (0, 1); enables the `rho` bound.
    #[arg(long)]
    rho: Option<f64>,
    /// Attach a witness table (lemma21, thm21, thm22, lemma22, thm23) measured
    /// at the first anchor. Repeatable.
    #[arg(long)]
    witness: Vec<WitnessKind>,
    #[arg(long, default_value = "0.5,0.1,0.01,0.001")]
    eps: String,
    #[arg(long, value_enum, hide = true)]
    fault: Option<FaultArg>,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args)]
struct WitnessArgs {
    /// lemma21, thm21, thm22, lemma22 or thm23.
    #[arg(long)]
    kind: WitnessKind,
    #[arg(long, default_value = "0.5,0.1,0.01,0.001")]
    eps: String,
    #[arg(long, default_value = "lp:2")]
    norm: String,
    /// Witness direction `a`, as `coords:<c1>,<c2>,...` or a bare list.
    #[arg(long, default_value = "coords:1,0")]
    anchor: String,
    #[arg(long, default_value_t = DEFAULT_WITNESS_COUNT)]
    count: usize,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

fn run(cli: Cli) -> Result<i32, InputError> {
    match cli.command {
        Command::Report(args) => {
            let overrides = Overrides {
                norm: args.norm.as_deref().map(parse_norm).transpose()?,
                weights: args
                    .weights
                    .as_deref()
                    .map(|w| parse_list(w).map_err(InputError::Descriptor))
                    .transpose()?,
                anchor: args.anchor.as_deref().map(parse_anchor).transpose()?,
                tol: args.tol,
            };
            let options = ReportOptions {
                overrides,
                bounds: parse_bounds(&args.bounds)?,
                rho: args.rho,
                witness: args.witness,
                eps: parse_eps_list(&args.eps)?,
                fault: args.fault.map(|FaultArg::MinAsMax| Fault::MinAsMax),
            };
            if options.rho.is_some() && !options.bounds.contains(&BoundName::Rho) {
                return Err(InputError::Descriptor(
                    "--rho given but `rho` is not among --bounds".into(),
                ));
            }
            let report = run_report(&args.input, &options)?;
            for v in &report.violations {
                eprintln!("certificate violation: {v}");
            }
            let text = match args.common.format {
                Format::Json => to_json(&report),
                Format::Text => render_report_text(&report),
            };
            emit(&args.common, &text)?;
            Ok(report.exit_code())
        }
        Command::Witness(args) => {
            let anchor = match args.anchor.strip_prefix("coords:") {
                Some(list) => list,
                None => args.anchor.as_str(),
            };
            let anchor = Vector::new(parse_list(anchor).map_err(InputError::Descriptor)?)?;
            let norm: NormSpec = parse_norm(&args.norm)?;
            let options = WitnessOptions {
                norm,
                anchor,
                count: args.count,
            };
            let report = run_witness(args.kind, &parse_eps_list(&args.eps)?, &options)?;
            for v in &report.violations {
                eprintln!("certificate violation: {v}");
            }
            let text = match args.common.format {
                Format::Json => to_json(&report),
                Format::Text => render_witness_text(&report),
            };
            emit(&args.common, &text)?;
            Ok(report.exit_code())
        }
    }
}

fn emit(common: &Common, text: &str) -> Result<(), InputError> {
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|source| InputError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
