//! Differential evolution over an [`ObjectiveFunction`].
//!
//! Two update schemes are provided:
//!
//! * [`DeMode::Classic`]: DE/rand/1/bin. Every individual in turn is the
//!   target; three distinct donors build a mutant, binomial crossover mixes
//!   it with the target, and the clamped trial replaces the target when its
//!   error is no worse. Replacement is in place, so later targets in the same
//!   generation may draw already-updated donors.
//! * [`DeMode::PaperLiteral`]: one mutant per generation from three distinct
//!   donors `a, b, c`; a single uniform draw is thresholded against `cr`, and
//!   on success the mutant replaces `a` when it is no worse.
//!
//! Both schemes only ever accept non-worsening replacements, so the best
//! error of the population never increases.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::objective::{ObjectiveError, ObjectiveFunction};
use crate::rng::{RngError, UniformSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("donor indices must be pairwise distinct, got ({a}, {b}, {c})")]
    NonDistinctDonors { a: usize, b: usize, c: usize },
    #[error("index {index} out of range for population of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error(transparent)]
    Rng(#[from] RngError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeMode {
    #[default]
    Classic,
    #[serde(rename = "paper")]
    PaperLiteral,
}

impl std::str::FromStr for DeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classic" => Ok(DeMode::Classic),
            "paper" | "paperliteral" | "literal" => Ok(DeMode::PaperLiteral),
            other => Err(format!("unknown mode `{other}` (expected classic or paper)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub dim: usize,
    pub pop_size: usize,
    /// Mutation factor `F`.
    pub weight_f: f64,
    /// Crossover threshold in `[0, 1]`.
    pub cr: f64,
    pub max_gen: usize,
    pub mode: DeMode,
    /// Convergence tolerance on the best error.
    pub epsilon: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            pop_size: 50,
            weight_f: 0.5,
            cr: 0.7,
            max_gen: 200,
            mode: DeMode::Classic,
            epsilon: 1e-4,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<(), DeError> {
        let fail = |msg: String| Err(DeError::InvalidConfig(msg));
        if self.dim == 0 {
            return fail("dim must be at least 1".into());
        }
        if self.pop_size < 4 {
            return fail(format!(
                "pop_size must be at least 4 (three donors plus a target), got {}",
                self.pop_size
            ));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return fail(format!("cr must lie in [0, 1], got {}", self.cr));
        }
        if !self.weight_f.is_finite() {
            return fail(format!("F must be finite, got {}", self.weight_f));
        }
        if self.max_gen == 0 {
            return fail("max_gen must be at least 1".into());
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub individuals: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
}

impl Population {
    /// Builds a population from explicit individuals, evaluating each.
    pub fn from_individuals(
        individuals: Vec<Vec<f64>>,
        f: &ObjectiveFunction,
    ) -> Result<Self, DeError> {
        let errors = individuals
            .iter()
            .map(|x| f.error(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            individuals,
            errors,
        })
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Position and value of the minimum error; the lowest index wins ties.
    pub fn best(&self) -> (usize, f64) {
        self.errors
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, e)| if e < best.1 { (i, e) } else { best })
    }

    fn record(&self, generation: usize) -> GenerationRecord {
        let (best_index, best_error) = self.best();
        GenerationRecord {
            generation,
            best_error,
            best_solution: self.individuals[best_index].clone(),
            best_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_error: f64,
    pub best_solution: Vec<f64>,
    pub best_index: usize,
}

/// `(generation, best_index)` of the first record within tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub generation: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<GenerationRecord>,
    pub final_best: GenerationRecord,
    pub convergence_point: Option<ConvergencePoint>,
    pub epsilon: f64,
    pub max_gen: usize,
}

impl ConvergenceTrace {
    /// Generation of the convergence point, or `max_gen` when the run never
    /// reached tolerance.
    pub fn generations_to_epsilon(&self) -> usize {
        self.convergence_point
            .map_or(self.max_gen, |p| p.generation)
    }
}

pub fn init_population<S: UniformSource + ?Sized>(
    cfg: &DeConfig,
    f: &ObjectiveFunction,
    source: &mut S,
) -> Result<Population, DeError> {
    cfg.validate()?;
    if f.dim != cfg.dim {
        return Err(DeError::InvalidConfig(format!(
            "objective has {} dimensions but config asks for {}",
            f.dim, cfg.dim
        )));
    }
    let mut individuals = Vec::with_capacity(cfg.pop_size);
    for _ in 0..cfg.pop_size {
        let x = (0..cfg.dim)
            .map(|_| source.next_uniform_in(f.lower_bound, f.upper_bound))
            .collect::<Result<Vec<_>, _>>()?;
        individuals.push(x);
    }
    Population::from_individuals(individuals, f)
}

/// `pop[a] + F * (pop[b] - pop[c])`, componentwise.
pub fn mutate(
    pop: &Population,
    a: usize,
    b: usize,
    c: usize,
    weight_f: f64,
) -> Result<Vec<f64>, DeError> {
    if a == b || b == c || a == c {
        return Err(DeError::NonDistinctDonors { a, b, c });
    }
    let len = pop.len();
    if let Some(&index) = [a, b, c].iter().find(|&&i| i >= len) {
        return Err(DeError::IndexOutOfRange { index, len });
    }
    let (xa, xb, xc) = (&pop.individuals[a], &pop.individuals[b], &pop.individuals[c]);
    Ok(xa
        .iter()
        .zip(xb.iter().zip(xc))
        .map(|(&base, (&pb, &pc))| base + weight_f * (pb - pc))
        .collect())
}

/// Binomial crossover. Draws the forced dimension first, then one uniform
/// per dimension, so it always consumes `1 + dim` samples.
pub fn crossover_binomial<S: UniformSource + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    source: &mut S,
) -> Result<Vec<f64>, DeError> {
    if target.len() != mutant.len() {
        return Err(DeError::LengthMismatch {
            left: target.len(),
            right: mutant.len(),
        });
    }
    let forced = source.next_index(target.len())?;
    Ok(target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(k, (&t, &m))| {
            let u = source.next_uniform();
            if u < cr || k == forced {
                m
            } else {
                t
            }
        })
        .collect())
}

/// Advances the population one generation and returns its best record.
pub fn step_generation<S: UniformSource + ?Sized>(
    pop: &mut Population,
    generation: usize,
    cfg: &DeConfig,
    f: &ObjectiveFunction,
    source: &mut S,
) -> Result<GenerationRecord, DeError> {
    let n = pop.len();
    match cfg.mode {
        DeMode::Classic => {
            for i in 0..n {
                let d = source.distinct_indices(n, 3, Some(i))?;
                let mutant = mutate(pop, d[0], d[1], d[2], cfg.weight_f)?;
                let mut trial = crossover_binomial(&pop.individuals[i], &mutant, cfg.cr, source)?;
                f.clamp_to_bounds(&mut trial);
                let err = f.error(&trial)?;
                if err <= pop.errors[i] {
                    pop.individuals[i] = trial;
                    pop.errors[i] = err;
                }
            }
        }
        DeMode::PaperLiteral => {
            let d = source.distinct_indices(n, 3, None)?;
            let (a, b, c) = (d[0], d[1], d[2]);
            let mut mutant = mutate(pop, a, b, c, cfg.weight_f)?;
            f.clamp_to_bounds(&mut mutant);
            let u = source.next_uniform();
            if u < cfg.cr {
                let err = f.error(&mutant)?;
                if err <= pop.errors[a] {
                    pop.individuals[a] = mutant;
                    pop.errors[a] = err;
                }
            }
        }
    }
    Ok(pop.record(generation))
}

/// First record whose best error is within `epsilon`.
pub fn convergence_point(records: &[GenerationRecord], epsilon: f64) -> Option<ConvergencePoint> {
    records
        .iter()
        .find(|r| r.best_error <= epsilon)
        .map(|r| ConvergencePoint {
            generation: r.generation,
            index: r.best_index,
        })
}

/// Initializes a population and runs `max_gen` generations. Record `g` holds
/// the population best after the `g`-th generation (0-based).
pub fn run<S: UniformSource + ?Sized>(
    cfg: &DeConfig,
    f: &ObjectiveFunction,
    source: &mut S,
) -> Result<ConvergenceTrace, DeError> {
    let mut pop = init_population(cfg, f, source)?;
    let records = (0..cfg.max_gen)
        .map(|g| step_generation(&mut pop, g, cfg, f, source))
        .collect::<Result<Vec<_>, _>>()?;
    let final_best = records
        .iter()
        .fold(None::<&GenerationRecord>, |best, r| match best {
            Some(b) if b.best_error <= r.best_error => Some(b),
            _ => Some(r),
        })
        .cloned()
        .expect("max_gen >= 1 yields at least one record");
    Ok(ConvergenceTrace {
        convergence_point: convergence_point(&records, cfg.epsilon),
        records,
        final_best,
        epsilon: cfg.epsilon,
        max_gen: cfg.max_gen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RandomSource, ScriptedSource};

    fn record(generation: usize, best_error: f64) -> GenerationRecord {
        GenerationRecord {
            generation,
            best_error,
            best_solution: vec![0.0],
            best_index: generation + 10,
        }
    }

    fn pop_of(rows: Vec<Vec<f64>>) -> Population {
        Population {
            errors: vec![0.0; rows.len()],
            individuals: rows,
        }
    }

    #[test]
    fn config_guards() {
        assert!(DeConfig::default().validate().is_ok());
        let bad = [
            DeConfig { pop_size: 3, ..Default::default() },
            DeConfig { cr: 1.5, ..Default::default() },
            DeConfig { cr: -0.1, ..Default::default() },
            DeConfig { weight_f: f64::NAN, ..Default::default() },
            DeConfig { max_gen: 0, ..Default::default() },
            DeConfig { epsilon: 0.0, ..Default::default() },
            DeConfig { dim: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(DeError::InvalidConfig(_))), "{cfg:?}");
        }
    }

    #[test]
    fn init_shape_and_bounds() {
        let cfg = DeConfig::default();
        let f = ObjectiveFunction::rastrigin(3).unwrap();
        let pop = init_population(&cfg, &f, &mut RandomSource::classical(4)).unwrap();
        assert_eq!(pop.len(), 50);
        assert!(pop.individuals.iter().all(|x| x.len() == 3 && f.contains(x)));
        for (x, e) in pop.individuals.iter().zip(&pop.errors) {
            assert_eq!(*e, f.error(x).unwrap());
        }
        let again = init_population(&cfg, &f, &mut RandomSource::classical(4)).unwrap();
        assert_eq!(pop, again);

        let small = DeConfig { pop_size: 3, ..Default::default() };
        assert!(init_population(&small, &f, &mut RandomSource::classical(4)).is_err());
        let f2 = ObjectiveFunction::rastrigin(2).unwrap();
        assert!(init_population(&cfg, &f2, &mut RandomSource::classical(4)).is_err());
    }

    #[test]
    fn mutation_arithmetic() {
        let pop = pop_of(vec![vec![1.0, 2.0, 3.0], vec![2.0, 2.0, 2.0], vec![1.0, 1.0, 1.0]]);
        assert_eq!(mutate(&pop, 0, 1, 2, 0.5).unwrap(), vec![1.5, 2.5, 3.5]);
        assert_eq!(mutate(&pop, 0, 1, 2, 0.0).unwrap(), pop.individuals[0]);
        let same = pop_of(vec![vec![1.0, 2.0], vec![4.0, 4.0], vec![4.0, 4.0]]);
        assert_eq!(mutate(&same, 0, 1, 2, 7.0).unwrap(), vec![1.0, 2.0]);
        assert!(matches!(mutate(&pop, 0, 0, 2, 0.5), Err(DeError::NonDistinctDonors { .. })));
        assert!(matches!(mutate(&pop, 0, 1, 3, 0.5), Err(DeError::IndexOutOfRange { .. })));
        assert_eq!(pop.individuals[0], vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn crossover_rules() {
        let target = [0.0, 0.0, 0.0, 0.0];
        let mutant = [1.0, 2.0, 3.0, 4.0];
        let mut src = RandomSource::classical(8);
        assert_eq!(crossover_binomial(&target, &mutant, 1.0, &mut src).unwrap(), mutant);
        for _ in 0..100 {
            let trial = crossover_binomial(&target, &mutant, 0.0, &mut src).unwrap();
            assert_eq!(trial.iter().zip(&target).filter(|(a, b)| a != b).count(), 1);
        }
        assert_eq!(crossover_binomial(&mutant, &mutant, 0.3, &mut src).unwrap(), mutant);
        assert!(matches!(
            crossover_binomial(&target, &mutant[..3], 0.5, &mut src),
            Err(DeError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn crossover_draw_order() {
        // forced = floor(0.6 * 3) = 1; draws 0.1 < 0.5 take, 0.9 forced, 0.8 keep
        let mut s = ScriptedSource::new(vec![0.6, 0.1, 0.9, 0.8]).unwrap();
        let trial = crossover_binomial(&[0.0; 3], &[1.0, 2.0, 3.0], 0.5, &mut s).unwrap();
        assert_eq!(trial, vec![1.0, 2.0, 0.0]);
        assert_eq!(s.remaining(), 0);
    }

    #[test]
    fn convergence_point_cases() {
        let recs: Vec<_> = [5.0, 3.0, 0.5, 0.5]
            .iter()
            .enumerate()
            .map(|(g, &e)| record(g, e))
            .collect();
        assert_eq!(
            convergence_point(&recs, 1.0),
            Some(ConvergencePoint { generation: 2, index: 12 })
        );
        assert_eq!(
            convergence_point(&recs, 1e300),
            Some(ConvergencePoint { generation: 0, index: 10 })
        );
        assert_eq!(convergence_point(&recs, 0.1), None);
    }

    #[test]
    fn best_prefers_lowest_index() {
        let pop = Population {
            individuals: vec![vec![0.0]; 4],
            errors: vec![3.0, 1.0, 1.0, 2.0],
        };
        assert_eq!(pop.best(), (1, 1.0));
    }

    #[test]
    fn single_generation_run() {
        let cfg = DeConfig { max_gen: 1, ..Default::default() };
        let f = ObjectiveFunction::rastrigin(3).unwrap();
        let trace = run(&cfg, &f, &mut RandomSource::classical(0)).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.final_best, trace.records[0]);
    }

    #[test]
    fn single_mutant_mode_with_zero_cr_is_frozen() {
        let cfg = DeConfig {
            mode: DeMode::PaperLiteral,
            cr: 0.0,
            max_gen: 50,
            ..Default::default()
        };
        let f = ObjectiveFunction::rosenbrock(3).unwrap();
        let mut src = RandomSource::classical(12);
        let mut pop = init_population(&cfg, &f, &mut src).unwrap();
        let start = pop.clone();
        for g in 0..cfg.max_gen {
            step_generation(&mut pop, g, &cfg, &f, &mut src).unwrap();
        }
        assert_eq!(pop, start);
    }

    #[test]
    fn generations_to_epsilon_censors() {
        let mut trace = run(
            &DeConfig { max_gen: 3, ..Default::default() },
            &ObjectiveFunction::rastrigin(3).unwrap(),
            &mut RandomSource::classical(1),
        )
        .unwrap();
        trace.convergence_point = None;
        assert_eq!(trace.generations_to_epsilon(), 3);
        trace.convergence_point = Some(ConvergencePoint { generation: 1, index: 0 });
        assert_eq!(trace.generations_to_epsilon(), 1);
    }
}
