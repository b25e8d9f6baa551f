//! `gdei` command-line interface.
//!
//! Exit codes: 0 on success, 2 for usage or validation errors, 3 when a
//! training run diverges. Output files are written to a temporary file in the
//! destination directory and renamed into place, so a failed command leaves no
//! partial output.

mod spec;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand};

pub use spec::{parse_optimizer_spec, OptimizerSpec};

use crate::data::{generate_data, load_csv, split, GeneratorConfig};
use crate::efficiency::{StoppingRule, DEFAULT_STOP_PATIENCE, DEFAULT_STOP_THRESHOLD};
use crate::loss::{add_bias, mse, predict};
use crate::report::{
    comparison_to_json, parse_trace_csv, plot_efficiency_curve, plot_efficiency_overlay,
    plot_loss_curve, trace_to_csv, RunStatus, YScale,
};
use crate::runner::{compare, train, IterationRecord};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gdei",
    version,
    about = "Train linear regression with instrumented gradient descent and score every iteration",
    after_help = "Exit codes: 0 success, 2 usage or validation error, 3 numerical divergence."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset y = intercept + slope·x1 + N(0, noise²) as CSV
    Generate(GenerateArgs),
    /// Train one model and write its per-iteration trace
    Train(TrainArgs),
    /// Train several optimizers on the same data and write a JSON comparison
    Compare(CompareArgs),
    /// Render loss and efficiency charts from a trace CSV
    Plot(PlotArgs),
}

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    /// Number of samples
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Number of features
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
    #[arg(long, env = "GDEI_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 4.0)]
    pub intercept: f64,
    #[arg(long, default_value_t = 3.0)]
    pub slope: f64,
    /// Standard deviation of the Gaussian noise
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(short, long, default_value = "data.csv")]
    pub output: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct StopArgs {
    /// Stop once the last `--stop-patience` efficiency scores are all <= this
    #[arg(long)]
    pub stop_threshold: Option<f64>,
    /// Window length for the stopping rule (default 10 when a threshold is set)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub stop_patience: Option<u64>,
}

impl StopArgs {
    fn rule(&self) -> Option<StoppingRule> {
        if self.stop_threshold.is_none() && self.stop_patience.is_none() {
            return None;
        }
        Some(StoppingRule {
            threshold: self.stop_threshold.unwrap_or(DEFAULT_STOP_THRESHOLD),
            patience: self
                .stop_patience
                .map_or(DEFAULT_STOP_PATIENCE, |p| p as usize),
        })
    }
}

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    /// Dataset CSV (header row, numeric columns)
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the target column
    #[arg(long, default_value = "y")]
    pub target: String,
    /// Optimizer name or spec, e.g. `adam:beta2=0.99`
    /// (gd, momentum, nag, adagrad, rmsprop, adam, adamax, amsgrad, nadam, sgdr)
    #[arg(long, default_value = "gd")]
    pub optimizer: String,
    /// Initial learning rate (overrides `alpha=` in the spec; default 0.05)
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Multiplicative learning-rate decay per iteration
    #[arg(long)]
    pub decay: Option<f64>,
    /// Seed for parameter initialisation and the validation split
    #[arg(long, env = "GDEI_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Hold out this fraction of rows and report the validation loss
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    #[command(flatten)]
    pub stop: StopArgs,
    /// Trace CSV destination
    #[arg(short, long, default_value = "trace.csv")]
    pub output: PathBuf,
    /// Also write `<output>_loss.svg` and `<output>_efficiency.svg`
    #[arg(long)]
    pub plot: bool,
    /// Iteration limit for a loss-curve panel (repeatable; default: whole run)
    #[arg(long = "limit")]
    pub limits: Vec<usize>,
    /// Logarithmic y axis for loss curves
    #[arg(long)]
    pub log_y: bool,
}

#[derive(Debug, clap::Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "y")]
    pub target: String,
    /// Optimizer spec `name:key=val,...` (repeat at least twice). Keys: alpha,
    /// beta, beta1, beta2, epsilon, t0, tmult, eta_min, decay, label. The label
    /// defaults to the spec text.
    #[arg(long = "optimizer", required = true)]
    pub optimizers: Vec<String>,
    /// Learning rate for specs without `alpha=`
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Decay for specs without `decay=`
    #[arg(long, default_value_t = 1.0)]
    pub decay: f64,
    #[arg(long, env = "GDEI_SEED", default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub stop: StopArgs,
    /// JSON report destination
    #[arg(short, long, default_value = "comparison.json")]
    pub output: PathBuf,
    /// Also write `<output>_efficiency.svg` overlaying every completed run
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, clap::Args)]
pub struct PlotArgs {
    /// Trace CSV written by `gdei train`
    pub trace: PathBuf,
    /// Iteration limit for a loss-curve panel (repeatable; default: whole run)
    #[arg(long = "limit")]
    pub limits: Vec<usize>,
    #[arg(long)]
    pub log_y: bool,
    /// Directory for the SVGs (default: next to the trace)
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command, returning
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Train(args) => cmd_train(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(err @ Error::Diverged { .. }) => {
            eprintln!("error: {err}");
            EXIT_DIVERGED
        }
        Err(err) => {
            eprintln!("error: {err}\n\n{}", Cli::command().render_usage());
            EXIT_USAGE
        }
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Writes every file or, if any write fails, removes the ones already placed.
fn write_all_atomic(files: &[(PathBuf, String)]) -> Result<()> {
    for (i, (path, contents)) in files.iter().enumerate() {
        if let Err(e) = write_atomic(path, contents) {
            for (done, _) in &files[..i] {
                let _ = fs::remove_file(done);
            }
            return Err(e);
        }
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn y_scale(log_y: bool) -> YScale {
    if log_y {
        YScale::Log
    } else {
        YScale::Linear
    }
}

fn loss_limits(limits: &[usize], records: &[IterationRecord]) -> Vec<usize> {
    if limits.is_empty() {
        vec![records.len()]
    } else {
        limits.to_vec()
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let config = GeneratorConfig {
        n: args.n as usize,
        m: args.m as usize,
        seed: args.seed,
        intercept: args.intercept,
        slope: args.slope,
        noise_sigma: args.noise,
        ..GeneratorConfig::default()
    };
    let dataset = generate_data(&config)?;
    write_atomic(&args.output, &dataset.to_csv())?;
    println!(
        "wrote {} rows x {} feature columns to {}",
        dataset.n(),
        dataset.m(),
        args.output.display()
    );
    Ok(())
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let spec = parse_optimizer_spec(&args.optimizer)?;
    let alpha = args.alpha.or(spec.alpha).unwrap_or(0.05);
    let decay = args.decay.or(spec.decay).unwrap_or(1.0);
    let config = spec.run_config(alpha, args.iters, args.seed, decay, args.stop.rule());
    config.validate()?;

    let dataset = load_csv(&args.data, &args.target)?;
    let (train_set, validation) = match args.validation_fraction {
        Some(f) => {
            let (t, v) = split(&dataset, f, args.seed)?;
            (t, Some(v))
        }
        None => (dataset, None),
    };
    let trace = train(&train_set, &config)?;

    let mut files = vec![(args.output.clone(), trace_to_csv(&trace))];
    if args.plot {
        let limits = loss_limits(&args.limits, &trace.records);
        files.push((
            sibling(&args.output, "_loss.svg"),
            plot_loss_curve(&trace.records, &limits, y_scale(args.log_y))?,
        ));
        files.push((
            sibling(&args.output, "_efficiency.svg"),
            plot_efficiency_curve(&trace.records)?,
        ));
    }
    write_all_atomic(&files)?;

    println!("optimizer: {}", spec.label);
    println!("iterations: {}", trace.records.len());
    println!("initial loss: {}", trace.loss_initial);
    println!("final loss: {}", trace.final_loss());
    match trace.final_efficiency() {
        Some(e) => println!("final efficiency: {e}"),
        None => println!("final efficiency: n/a"),
    }
    match trace.stopped_at {
        Some(k) => println!("stopped at: {k}"),
        None => println!("stopped at: none"),
    }
    println!("theta: {:?}", trace.final_model.theta);
    if let Some(v) = validation {
        let xb = add_bias(v.features())?;
        let loss = mse(&predict(&trace.final_model, &xb)?, v.targets())?;
        println!("validation loss: {loss}");
    }
    for (path, _) in &files {
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs) -> Result<()> {
    if args.optimizers.len() < 2 {
        return Err(Error::config("compare needs at least two --optimizer specs"));
    }
    let specs = args
        .optimizers
        .iter()
        .map(|s| parse_optimizer_spec(s))
        .collect::<Result<Vec<_>>>()?;
    let stopping = args.stop.rule();
    let configs: Vec<_> = specs
        .iter()
        .map(|s| s.run_config(args.alpha, args.iters, args.seed, args.decay, stopping))
        .collect();
    let labels: Vec<String> = specs.iter().map(|s| s.label.clone()).collect();
    let dataset = load_csv(&args.data, &args.target)?;
    let report = compare(&dataset, &configs, &labels)?;

    let mut files = vec![(args.output.clone(), comparison_to_json(&report))];
    if args.plot {
        let series: Vec<(&str, &[IterationRecord])> = report
            .completed()
            .map(|(label, trace)| (label, trace.records.as_slice()))
            .collect();
        if !series.is_empty() {
            files.push((
                sibling(&args.output, "_efficiency.svg"),
                plot_efficiency_overlay(&series)?,
            ));
        }
    }
    write_all_atomic(&files)?;

    for (label, entry) in report.entries() {
        let s = &entry.summary;
        match s.status {
            RunStatus::Completed => println!(
                "{label}: final loss {}, final efficiency {}, stopped at {}",
                s.final_loss.unwrap_or(f64::NAN),
                s.final_efficiency.map_or("n/a".to_owned(), |e| e.to_string()),
                s.stopped_at.map_or("none".to_owned(), |k| k.to_string()),
            ),
            _ => println!(
                "{label}: {:?}: {}",
                s.status,
                s.error.as_deref().unwrap_or("unknown error")
            ),
        }
    }
    for (path, _) in &files {
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn cmd_plot(args: &PlotArgs) -> Result<()> {
    let text = fs::read_to_string(&args.trace).map_err(|e| Error::io(&args.trace, e))?;
    let records = parse_trace_csv(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", args.trace.display()),
        },
        other => other,
    })?;
    let base = match &args.out_dir {
        Some(dir) => dir.join(args.trace.file_name().unwrap_or_else(|| "trace".as_ref())),
        None => args.trace.clone(),
    };
    let limits = loss_limits(&args.limits, &records);
    let files = vec![
        (
            sibling(&base, "_loss.svg"),
            plot_loss_curve(&records, &limits, y_scale(args.log_y))?,
        ),
        (
            sibling(&base, "_efficiency.svg"),
            plot_efficiency_curve(&records)?,
        ),
    ];
    write_all_atomic(&files)?;
    for (path, _) in &files {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(
            sibling(Path::new("out/trace.csv"), "_loss.svg"),
            PathBuf::from("out/trace_loss.svg")
        );
        assert_eq!(sibling(Path::new("t"), "_e.svg"), PathBuf::from("t_e.svg"));
    }

    #[test]
    fn stop_args_defaults() {
        let none = StopArgs {
            stop_threshold: None,
            stop_patience: None,
        };
        assert_eq!(none.rule(), None);
        let some = StopArgs {
            stop_threshold: Some(3.0),
            stop_patience: None,
        };
        assert_eq!(
            some.rule(),
            Some(StoppingRule {
                threshold: 3.0,
                patience: 10
            })
        );
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["gdei", "generate", "--n", "0"]), EXIT_USAGE);
        assert_eq!(run(["gdei", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["gdei", "--version"]), EXIT_OK);
    }
}
