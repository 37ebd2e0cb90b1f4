//! Experiment orchestration: timing tables, repeated runs, group
//! comparisons and the files they are written to.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::de::{self, ConvergenceTrace, DeConfig, DeError};
use crate::objective::{ObjectiveError, ObjectiveFunction, ObjectiveKind, RosenbrockForm};
use crate::rng::{RandomSource, RngError, RngKind, SourceConfig, UniformSource};
use crate::stats::{self, StatsError, UTestResult, ACCEPTANCE_REGION};

pub const DEFAULT_RUNS_PER_GROUP: usize = 7;
pub const DEFAULT_SAMPLE_SIZES: [usize; 3] = [10, 50, 100];
pub const DEFAULT_TIMING_REPEATS: usize = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    De(#[from] DeError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Rng(#[from] RngError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl HarnessError {
    fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn csv(path: &Path, source: csv::Error) -> Self {
        Self::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[serde(rename = "plotdata")]
    PlotData,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "plotdata" | "plot" => Ok(OutputFormat::PlotData),
            other => Err(format!("unknown format `{other}` (expected csv, json or plotdata)")),
        }
    }
}

pub const ALL_FORMATS: [OutputFormat; 3] = [OutputFormat::Csv, OutputFormat::Json, OutputFormat::PlotData];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective: ObjectiveKind,
    pub rosenbrock_form: RosenbrockForm,
    /// Backend template; the seed is replaced per run.
    pub source: SourceConfig,
    pub de: DeConfig,
    pub runs_per_group: usize,
    pub base_seed: u64,
    pub sample_sizes: Vec<usize>,
    pub timing_repeats: usize,
    pub output_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            objective: ObjectiveKind::Rastrigin,
            rosenbrock_form: RosenbrockForm::Canonical,
            source: SourceConfig::classical(0),
            de: DeConfig::default(),
            runs_per_group: DEFAULT_RUNS_PER_GROUP,
            base_seed: 0,
            sample_sizes: DEFAULT_SAMPLE_SIZES.to_vec(),
            timing_repeats: DEFAULT_TIMING_REPEATS,
            output_dir: PathBuf::from("results"),
            formats: ALL_FORMATS.to_vec(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.runs_per_group < 2 {
            return Err(HarnessError::InvalidConfig(format!(
                "runs_per_group must be at least 2, got {}",
                self.runs_per_group
            )));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
            return Err(HarnessError::InvalidConfig(
                "sample sizes must be a non-empty list of positive integers".into(),
            ));
        }
        if self.timing_repeats == 0 {
            return Err(HarnessError::InvalidConfig("timing_repeats must be positive".into()));
        }
        self.de.validate()?;
        self.objective_function()?;
        self.source.build()?;
        Ok(())
    }

    pub fn objective_function(&self) -> Result<ObjectiveFunction, ObjectiveError> {
        Ok(ObjectiveFunction::new(self.objective, self.de.dim)?.with_rosenbrock_form(self.rosenbrock_form))
    }

    /// Seed of run `run_index` within this group.
    pub fn run_seed(&self, run_index: usize) -> u64 {
        self.base_seed.wrapping_add(run_index as u64)
    }

    /// `<backend>_<objective>`, e.g. `qsim_rastrigin`.
    pub fn default_label(&self) -> String {
        format!("{}_{}", self.source.kind, self.objective)
    }
}

// ---------------------------------------------------------------------------
// Timing

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub backend: RngKind,
    pub sample_size: usize,
    pub trial: usize,
    pub seconds: f64,
}

/// Times drawing `sample_size * dim` uniforms, `repeats` times on one
/// source. Trial 0 is the cold run. Durations below the clock resolution
/// are reported as one nanosecond.
pub fn time_population_generation(
    source: SourceConfig,
    dim: usize,
    sample_size: usize,
    repeats: usize,
) -> Result<Vec<TimingRecord>, HarnessError> {
    if sample_size == 0 || dim == 0 {
        return Err(HarnessError::InvalidConfig(
            "sample size and dimension must be positive".into(),
        ));
    }
    let mut rng = source.build()?;
    let draws = sample_size * dim;
    Ok((0..repeats)
        .map(|trial| {
            let start = Instant::now();
            let mut acc = 0.0;
            for _ in 0..draws {
                acc += rng.next_uniform();
            }
            std::hint::black_box(acc);
            let seconds = start.elapsed().as_secs_f64().max(1e-9);
            TimingRecord {
                backend: source.kind,
                sample_size,
                trial,
                seconds,
            }
        })
        .collect())
}

/// Timing table for one backend: trials down, sample sizes across.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingTable {
    pub backend: RngKind,
    pub sample_sizes: Vec<usize>,
    pub repeats: usize,
    pub records: Vec<TimingRecord>,
}

impl TimingTable {
    pub fn seconds(&self, trial: usize, sample_size: usize) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.trial == trial && r.sample_size == sample_size)
            .map(|r| r.seconds)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.repeats)
            .map(|t| {
                self.sample_sizes
                    .iter()
                    .map(|&s| self.seconds(t, s).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Timing of {} uniform generation (seconds)", self.backend);
        let header: Vec<String> = self
            .sample_sizes
            .iter()
            .map(|s| format!("{:<22}", format!("Sample size {s}")))
            .collect();
        let _ = writeln!(out, "{}", header.join("").trim_end());
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{:<22.9}", v)).collect();
            let _ = writeln!(out, "{}", cells.join("").trim_end());
        }
        out
    }
}

pub fn bench(cfg: &ExperimentConfig) -> Result<TimingTable, HarnessError> {
    cfg.validate()?;
    let source = cfg.source.with_seed(cfg.base_seed);
    let mut records = Vec::new();
    for &size in &cfg.sample_sizes {
        records.extend(time_population_generation(source, cfg.de.dim, size, cfg.timing_repeats)?);
    }
    Ok(TimingTable {
        backend: source.kind,
        sample_sizes: cfg.sample_sizes.clone(),
        repeats: cfg.timing_repeats,
        records,
    })
}

// ---------------------------------------------------------------------------
// Runs and comparisons

/// One DE run with an explicit seed.
pub fn run_single(cfg: &ExperimentConfig, seed: u64) -> Result<ConvergenceTrace, HarnessError> {
    let f = cfg.objective_function()?;
    let mut source = RandomSource::new(cfg.source.with_seed(seed))?;
    Ok(de::run(&cfg.de, &f, &mut source)?)
}

/// Runs `runs_per_group` independent DE runs with seeds `base_seed + i`.
/// Runs execute in parallel; results come back in run order.
pub fn run_group(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceTrace>, HarnessError> {
    cfg.validate()?;
    (0..cfg.runs_per_group)
        .into_par_iter()
        .map(|i| run_single(cfg, cfg.run_seed(i)))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// First generation within epsilon; non-converged runs count as `max_gen`.
    #[default]
    GenerationsToEpsilon,
    FinalBestError,
}

impl Metric {
    pub fn extract(self, trace: &ConvergenceTrace) -> f64 {
        match self {
            Metric::GenerationsToEpsilon => trace.generations_to_epsilon() as f64,
            Metric::FinalBestError => trace.final_best.best_error,
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "generations_to_epsilon" | "generations" => Ok(Metric::GenerationsToEpsilon),
            "final_best_error" | "final" => Ok(Metric::FinalBestError),
            other => Err(format!(
                "unknown metric `{other}` (expected generations_to_epsilon or final_best_error)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePointRow {
    pub label: String,
    pub run: usize,
    pub generation: Option<usize>,
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub group1: String,
    pub group2: String,
    pub metric: Metric,
    pub values1: Vec<f64>,
    pub values2: Vec<f64>,
    pub result: UTestResult,
    /// Value assigned to runs that never reached epsilon, when the metric
    /// censors them.
    pub censor_value: Option<f64>,
    pub points: Vec<ConvergencePointRow>,
}

fn points_of(label: &str, traces: &[ConvergenceTrace]) -> Vec<ConvergencePointRow> {
    traces
        .iter()
        .enumerate()
        .map(|(run, t)| ConvergencePointRow {
            label: label.to_string(),
            run,
            generation: t.convergence_point.map(|p| p.generation),
            index: t.convergence_point.map(|p| p.index),
        })
        .collect()
}

pub fn compare_groups(
    label1: &str,
    traces1: &[ConvergenceTrace],
    label2: &str,
    traces2: &[ConvergenceTrace],
    metric: Metric,
) -> Result<ComparisonReport, HarnessError> {
    if traces1.len() != traces2.len() || traces1.len() < 2 {
        return Err(HarnessError::InvalidConfig(format!(
            "groups must have equal sizes of at least 2, got {} and {}",
            traces1.len(),
            traces2.len()
        )));
    }
    let values1: Vec<f64> = traces1.iter().map(|t| metric.extract(t)).collect();
    let values2: Vec<f64> = traces2.iter().map(|t| metric.extract(t)).collect();
    let result = stats::run_utest(&values1, &values2)?;
    let censor_value = match metric {
        Metric::GenerationsToEpsilon => Some(traces1[0].max_gen as f64),
        Metric::FinalBestError => None,
    };
    let mut points = points_of(label1, traces1);
    points.extend(points_of(label2, traces2));
    Ok(ComparisonReport {
        group1: label1.to_string(),
        group2: label2.to_string(),
        metric,
        values1,
        values2,
        result,
        censor_value,
        points,
    })
}

/// On-disk layout of `comparison.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonJson {
    pub group1: String,
    pub group2: String,
    pub metric: Metric,
    pub n1: usize,
    pub n2: usize,
    #[serde(rename = "U1")]
    pub u1: f64,
    #[serde(rename = "U2")]
    pub u2: f64,
    pub mu: f64,
    pub sigma: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub p_two_tailed: f64,
    pub r_effect: f64,
    pub cl_effect: f64,
    pub acceptance_region: [f64; 2],
    pub censor_value: Option<f64>,
    pub values1: Vec<f64>,
    pub values2: Vec<f64>,
}

impl From<&ComparisonReport> for ComparisonJson {
    fn from(r: &ComparisonReport) -> Self {
        let u = &r.result;
        Self {
            group1: r.group1.clone(),
            group2: r.group2.clone(),
            metric: r.metric,
            n1: u.n1,
            n2: u.n2,
            u1: u.u1,
            u2: u.u2,
            mu: u.mu,
            sigma: u.sigma,
            z: u.z,
            p_two_tailed: u.p_two_tailed,
            r_effect: u.r_effect,
            cl_effect: u.cl_effect,
            acceptance_region: ACCEPTANCE_REGION,
            censor_value: r.censor_value,
            values1: r.values1.clone(),
            values2: r.values2.clone(),
        }
    }
}

impl ComparisonJson {
    /// Pretty-printed with a trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("comparison serializes");
        s.push('\n');
        s
    }
}

impl ComparisonReport {
    pub fn render(&self) -> String {
        let u = &self.result;
        let [ulo, uhi] = u.u_acceptance_region();
        let decision = if u.accepts_null() {
            "H0 cannot be rejected at alpha = 0.05"
        } else {
            "H0 rejected at alpha = 0.05"
        };
        let mut out = String::new();
        let _ = writeln!(out, "Group 1: {}  Group 2: {}  metric: {:?}", self.group1, self.group2, self.metric);
        let _ = writeln!(out, "values1 = {:?}", self.values1);
        let _ = writeln!(out, "values2 = {:?}", self.values2);
        let _ = writeln!(out, "U statistic distribution: N({:.1}, {:.3}^2)", u.mu, u.sigma);
        let _ = writeln!(out, "U1 = {}, U2 = {}; 95% region for U: [{:.4} : {:.4}]", u.u1, u.u2, ulo, uhi);
        let _ = writeln!(out, "Z = {:.4}; 95% region: [-1.96 : 1.96]", u.z);
        let _ = writeln!(out, "p-value (two-tailed) = {:.5}; p(x <= Z) = {:.5}", u.p_two_tailed, stats::normal_cdf(u.z));
        let _ = writeln!(out, "standardized effect |Z|/sqrt(n1+n2) = {:.2}", u.r_effect);
        let _ = writeln!(out, "common-language effect U1/(n1 n2) = {:.3}", u.cl_effect);
        let _ = writeln!(out, "{decision}");
        out
    }
}

// ---------------------------------------------------------------------------
// Emission

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub best_error: f64,
    pub best_index: usize,
}

pub fn trace_rows(trace: &ConvergenceTrace) -> Vec<TraceRow> {
    trace
        .records
        .iter()
        .map(|r| TraceRow {
            generation: r.generation,
            best_error: r.best_error,
            best_index: r.best_index,
        })
        .collect()
}

/// Filesystem-safe form of a group label.
pub fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| HarnessError::csv(path, e))
}

/// Header-only CSVs are not emitted by `csv::Writer` for empty inputs, so
/// headers are written explicitly.
fn write_csv_with_header<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), HarnessError> {
    if rows.is_empty() {
        let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
        w.write_record(header).map_err(|e| HarnessError::csv(path, e))?;
        return w.flush().map_err(|e| HarnessError::io(path, e));
    }
    write_csv(path, rows)
}

/// Writes `timings.csv`. All records must come from one backend.
pub fn write_timings(dir: &Path, records: &[TimingRecord]) -> Result<PathBuf, HarnessError> {
    if let Some(first) = records.first() {
        if records.iter().any(|r| r.backend != first.backend) {
            return Err(HarnessError::InvalidConfig(
                "a timing table may only hold one backend".into(),
            ));
        }
    }
    ensure_dir(dir)?;
    let path = dir.join("timings.csv");
    write_csv_with_header(&path, &["backend", "sample_size", "trial", "seconds"], records)?;
    Ok(path)
}

pub fn read_timings(path: &Path) -> Result<Vec<TimingRecord>, HarnessError> {
    read_csv(path)
}

pub fn write_trace(dir: &Path, label: &str, run: usize, trace: &ConvergenceTrace) -> Result<PathBuf, HarnessError> {
    ensure_dir(dir)?;
    let path = dir.join(format!("trace_{}_{run}.csv", sanitize_label(label)));
    write_csv_with_header(
        &path,
        &["generation", "best_error", "best_index"],
        &trace_rows(trace),
    )?;
    Ok(path)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>, HarnessError> {
    read_csv(path)
}

/// Two whitespace-separated columns, `generation best_error`, no header.
pub fn write_plotdata(dir: &Path, label: &str, run: usize, trace: &ConvergenceTrace) -> Result<PathBuf, HarnessError> {
    ensure_dir(dir)?;
    let path = dir.join(format!("plot_{}_{run}.dat", sanitize_label(label)));
    let mut body = String::new();
    for r in &trace.records {
        let _ = writeln!(body, "{} {:?}", r.generation, r.best_error);
    }
    fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

pub fn write_convergence_points(dir: &Path, rows: &[ConvergencePointRow]) -> Result<PathBuf, HarnessError> {
    ensure_dir(dir)?;
    let path = dir.join("convergence_points.csv");
    write_csv_with_header(&path, &["label", "run", "generation", "index"], rows)?;
    Ok(path)
}

pub fn read_convergence_points(path: &Path) -> Result<Vec<ConvergencePointRow>, HarnessError> {
    read_csv(path)
}

pub fn write_comparison(dir: &Path, report: &ComparisonReport) -> Result<PathBuf, HarnessError> {
    ensure_dir(dir)?;
    let path = dir.join("comparison.json");
    fs::write(&path, ComparisonJson::from(report).to_canonical_string())
        .map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

pub fn read_comparison(path: &Path) -> Result<ComparisonJson, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Per-run files for one group of traces.
pub fn emit_traces(
    dir: &Path,
    label: &str,
    traces: &[ConvergenceTrace],
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();
    for (run, trace) in traces.iter().enumerate() {
        if formats.contains(&OutputFormat::Csv) {
            written.push(write_trace(dir, label, run, trace)?);
        }
        if formats.contains(&OutputFormat::PlotData) {
            written.push(write_plotdata(dir, label, run, trace)?);
        }
    }
    Ok(written)
}

/// Everything a comparison produces: traces of both groups, convergence
/// points and `comparison.json`, filtered by `formats`.
pub fn emit_comparison(
    dir: &Path,
    report: &ComparisonReport,
    traces1: &[ConvergenceTrace],
    traces2: &[ConvergenceTrace],
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = emit_traces(dir, &report.group1, traces1, formats)?;
    written.extend(emit_traces(dir, &report.group2, traces2, formats)?);
    if formats.contains(&OutputFormat::Csv) || formats.contains(&OutputFormat::PlotData) {
        written.push(write_convergence_points(dir, &report.points)?);
    }
    if formats.contains(&OutputFormat::Json) {
        written.push(write_comparison(dir, report)?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::de::{ConvergencePoint, GenerationRecord};

    fn fake_trace(converged_at: Option<usize>, max_gen: usize) -> ConvergenceTrace {
        let records: Vec<_> = (0..max_gen)
            .map(|g| GenerationRecord {
                generation: g,
                best_error: if converged_at.is_some_and(|c| g >= c) { 0.0 } else { 1.0 },
                best_solution: vec![0.0; 3],
                best_index: g % 4,
            })
            .collect();
        ConvergenceTrace {
            final_best: records.last().unwrap().clone(),
            convergence_point: converged_at.map(|g| ConvergencePoint { generation: g, index: g % 4 }),
            records,
            epsilon: 1e-4,
            max_gen,
        }
    }

    #[test]
    fn complete_separation() {
        // Distinct values within each group so no ties at all.
        let t1: Vec<_> = (0..7).map(|i| fake_trace(Some(5 + i), 200)).collect();
        let t2: Vec<_> = (0..7).map(|i| fake_trace(Some(50 + i), 200)).collect();
        let r = compare_groups("a", &t1, "b", &t2, Metric::GenerationsToEpsilon).unwrap();
        assert_eq!(r.result.u1, 0.0);
        assert_eq!(r.values1.len(), 7);
        // Exact pair count: group1 never exceeds group2, so U1 = 0, the
        // most extreme outcome; approximate p is the smallest reachable.
        let z = (0.0 - 24.5 + 0.5) / 61.25f64.sqrt();
        assert!((r.result.p_two_tailed - stats::two_tailed_p(z)).abs() < 1e-12);
        assert!(r.result.p_two_tailed < 0.01);
    }

    #[test]
    fn non_converged_runs_are_censored() {
        let t = fake_trace(None, 123);
        assert_eq!(Metric::GenerationsToEpsilon.extract(&t), 123.0);
        assert_eq!(Metric::FinalBestError.extract(&t), 1.0);
    }

    #[test]
    fn identical_degenerate_groups() {
        let t: Vec<_> = (0..7).map(|_| fake_trace(Some(9), 50)).collect();
        let err = compare_groups("a", &t, "b", &t, Metric::GenerationsToEpsilon).unwrap_err();
        assert!(matches!(err, HarnessError::Stats(StatsError::ZeroVariance)));
    }

    #[test]
    fn group_size_guard() {
        let t: Vec<_> = (0..3).map(|i| fake_trace(Some(i), 10)).collect();
        assert!(compare_groups("a", &t, "b", &t[..2], Metric::FinalBestError).is_err());
        assert!(compare_groups("a", &t[..1], "b", &t[..1], Metric::FinalBestError).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let c = ExperimentConfig { runs_per_group: 1, ..Default::default() };
        assert!(c.validate().is_err());
        let c = ExperimentConfig { sample_sizes: vec![10, 0], ..Default::default() };
        assert!(c.validate().is_err());
        let c = ExperimentConfig { timing_repeats: 0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!("plotdata".parse::<OutputFormat>().unwrap(), OutputFormat::PlotData);
        assert_eq!("final-best-error".parse::<Metric>().unwrap(), Metric::FinalBestError);
        assert!("median".parse::<Metric>().is_err());
        assert_eq!(sanitize_label("qsim rastrigin/1"), "qsim_rastrigin_1");
    }

    #[test]
    fn mixed_backends_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![
            TimingRecord { backend: RngKind::Classical, sample_size: 10, trial: 0, seconds: 1.0 },
            TimingRecord { backend: RngKind::QuantumSim, sample_size: 10, trial: 0, seconds: 1.0 },
        ];
        assert!(write_timings(dir.path(), &recs).is_err());
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = write_timings(&blocker.join("sub"), &[]).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
