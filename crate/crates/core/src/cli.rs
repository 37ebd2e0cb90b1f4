//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::de::{DeConfig, DeMode, GenerationRecord};
use crate::harness::{self, ExperimentConfig, HarnessError, Metric, OutputFormat};
use crate::objective::{ObjectiveKind, RosenbrockForm};
use crate::rng::{RngKind, SourceConfig, DEFAULT_BITS_PER_SAMPLE, DEFAULT_QUBITS_PER_SHOT};
use crate::selftest;

#[derive(Debug, Parser)]
#[command(name = "qdebench", version, about = "Differential evolution with classical and simulated-quantum entropy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run DE once and print progress every 10 generations.
    Run(RunArgs),
    /// Time uniform generation for several sample sizes.
    Bench(BenchArgs),
    /// Run two groups and compare them with the Mann-Whitney U test.
    Compare(CompareArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

fn parse_form(s: &str) -> Result<RosenbrockForm, String> {
    match s.to_ascii_lowercase().as_str() {
        "canonical" => Ok(RosenbrockForm::Canonical),
        "literal" => Ok(RosenbrockForm::Literal),
        other => Err(format!("unknown rosenbrock form `{other}` (expected canonical or literal)")),
    }
}

#[derive(Debug, Clone, Args)]
struct SourceArgs {
    /// Entropy backend: classical or qsim.
    #[arg(long, default_value = "classical")]
    rng: RngKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bits per quantum-simulated sample.
    #[arg(long, default_value_t = DEFAULT_BITS_PER_SAMPLE)]
    bits: u32,
    /// Qubits prepared per simulated measurement shot.
    #[arg(long, default_value_t = DEFAULT_QUBITS_PER_SHOT)]
    qubits_per_shot: usize,
}

impl SourceArgs {
    fn config(&self, kind: RngKind, seed: u64) -> SourceConfig {
        SourceConfig::with_kind(kind, seed)
            .bits(self.bits)
            .shot_width(self.qubits_per_shot)
    }
}

#[derive(Debug, Clone, Args)]
struct DeArgs {
    #[arg(long, default_value = "rastrigin")]
    function: ObjectiveKind,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 50)]
    pop_size: usize,
    /// Mutation factor F.
    #[arg(long, default_value_t = 0.5)]
    weight_f: f64,
    #[arg(long, default_value_t = 0.7)]
    cr: f64,
    #[arg(long, default_value_t = 200)]
    max_gen: usize,
    /// Update scheme: classic (DE/rand/1/bin) or paper.
    #[arg(long, default_value = "classic")]
    mode: DeMode,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Rosenbrock variant: canonical or literal.
    #[arg(long, default_value = "canonical", value_parser = parse_form)]
    rosenbrock_form: RosenbrockForm,
}

impl DeArgs {
    fn de_config(&self) -> DeConfig {
        DeConfig {
            dim: self.dim,
            pop_size: self.pop_size,
            weight_f: self.weight_f,
            cr: self.cr,
            max_gen: self.max_gen,
            mode: self.mode,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Output directory; nothing is written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,plotdata.
    #[arg(long, default_value = "csv,json,plotdata", value_delimiter = ',')]
    format: Vec<OutputFormat>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    de: DeArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Dimension of each sampled individual.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value = "10,50,100", value_delimiter = ',')]
    sample_sizes: Vec<usize>,
    #[arg(long, default_value_t = harness::DEFAULT_TIMING_REPEATS)]
    repeats: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    de: DeArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// Objective of group 2; defaults to --function.
    #[arg(long)]
    function2: Option<ObjectiveKind>,
    /// Backend of group 2; defaults to the other backend.
    #[arg(long)]
    rng2: Option<RngKind>,
    /// Base seed of group 2; defaults to --seed.
    #[arg(long)]
    seed2: Option<u64>,
    #[arg(long, default_value_t = harness::DEFAULT_RUNS_PER_GROUP)]
    runs: usize,
    /// generations_to_epsilon or final_best_error.
    #[arg(long, default_value = "generations_to_epsilon")]
    metric: Metric,
    #[command(flatten)]
    output: OutputArgs,
}

/// numpy-style vector: `[-1.099923 -0.140093  1.043105]`.
pub fn format_solution(x: &[f64]) -> String {
    let cells: Vec<String> = x.iter().map(|v| format!("{v:9.6}")).collect();
    format!("[{}]", cells.join(" "))
}

pub fn progress_line(r: &GenerationRecord) -> String {
    format!(
        "Generation = {} | best error = {:.4} | best_soln = {}",
        r.generation,
        r.best_error,
        format_solution(&r.best_solution)
    )
}

pub fn final_line(r: &GenerationRecord) -> String {
    format!(
        "Final best error = {:.4} best_soln = {}",
        r.best_error,
        format_solution(&r.best_solution)
    )
}

fn experiment(de: &DeArgs, source: SourceConfig, base_seed: u64, runs: usize, output: &OutputArgs) -> ExperimentConfig {
    ExperimentConfig {
        objective: de.function,
        rosenbrock_form: de.rosenbrock_form,
        source,
        de: de.de_config(),
        runs_per_group: runs,
        base_seed,
        output_dir: output.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        formats: output.format.clone(),
        ..Default::default()
    }
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<(), HarnessError> {
    let source = args.source.config(args.source.rng, args.source.seed);
    let cfg = experiment(&args.de, source, args.source.seed, 2, &args.output);
    cfg.validate()?;
    let trace = harness::run_single(&cfg, args.source.seed)?;
    let io = |e| HarnessError::Io { path: PathBuf::from("<stdout>"), source: e };
    for r in trace.records.iter().filter(|r| r.generation % 10 == 0) {
        writeln!(out, "{}", progress_line(r)).map_err(io)?;
    }
    writeln!(out, "{}", final_line(&trace.final_best)).map_err(io)?;
    match trace.convergence_point {
        Some(p) => writeln!(out, "Convergence point : ({},{})", p.generation, p.index),
        None => writeln!(out, "Convergence point : none (epsilon {} not reached)", trace.epsilon),
    }
    .map_err(io)?;
    if let Some(dir) = &args.output.out {
        let label = cfg.default_label();
        harness::emit_traces(dir, &label, std::slice::from_ref(&trace), &args.output.format)?;
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), HarnessError> {
    let cfg = ExperimentConfig {
        source: args.source.config(args.source.rng, args.source.seed),
        base_seed: args.source.seed,
        de: DeConfig { dim: args.dim, ..Default::default() },
        sample_sizes: args.sample_sizes.clone(),
        timing_repeats: args.repeats,
        ..Default::default()
    };
    let table = harness::bench(&cfg)?;
    write!(out, "{}", table.render()).map_err(|e| HarnessError::Io { path: PathBuf::from("<stdout>"), source: e })?;
    if let Some(dir) = &args.output.out {
        if args.output.format.contains(&OutputFormat::Csv) {
            harness::write_timings(dir, &table.records)?;
        }
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> Result<(), HarnessError> {
    let seed1 = args.source.seed;
    let seed2 = args.seed2.unwrap_or(seed1);
    let rng2 = args.rng2.unwrap_or(match args.source.rng {
        RngKind::Classical => RngKind::QuantumSim,
        RngKind::QuantumSim => RngKind::Classical,
    });
    let cfg1 = experiment(&args.de, args.source.config(args.source.rng, seed1), seed1, args.runs, &args.output);
    let mut de2 = args.de.clone();
    de2.function = args.function2.unwrap_or(args.de.function);
    let cfg2 = experiment(&de2, args.source.config(rng2, seed2), seed2, args.runs, &args.output);

    let (label1, mut label2) = (cfg1.default_label(), cfg2.default_label());
    if label1 == label2 {
        label2.push_str("_b");
    }
    let traces1 = harness::run_group(&cfg1)?;
    let traces2 = harness::run_group(&cfg2)?;
    if traces1 == traces2 {
        return Err(HarnessError::InvalidConfig(
            "both groups produced identical traces (same objective, backend and seeds); \
             the U test is degenerate for a group compared with itself"
                .into(),
        ));
    }
    let report = harness::compare_groups(&label1, &traces1, &label2, &traces2, args.metric)?;
    write!(out, "{}", report.render()).map_err(|e| HarnessError::Io { path: PathBuf::from("<stdout>"), source: e })?;
    if let Some(dir) = &args.output.out {
        harness::emit_comparison(dir, &report, &traces1, &traces2, &args.output.format)?;
    }
    Ok(())
}

fn cmd_selftest(out: &mut dyn Write) -> bool {
    let checks = selftest::run_all();
    for c in &checks {
        let _ = if c.passed {
            writeln!(out, "PASS {}", c.name)
        } else {
            writeln!(out, "FAIL {}: {}", c.name, c.detail)
        };
    }
    checks.iter().all(|c| c.passed)
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Selftest => {
            return if cmd_selftest(out) { 0 } else { 1 };
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
