//! Benchmark objectives and the error metric used for selection.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const RASTRIGIN_BOUND: f64 = 5.12;
pub const ROSENBROCK_BOUND: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("input vector is empty")]
    Empty,
    #[error("component {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("component {index} = {value} is outside [{lo}, {hi}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{name} needs at least {min} dimensions, got {got}")]
    TooFewDimensions {
        name: &'static str,
        min: usize,
        got: usize,
    },
    #[error("expected a {expected}-dimensional point, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error("unknown objective `{0}` (expected rastrigin or rosenbrock)")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Rastrigin,
    Rosenbrock,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Rastrigin => "rastrigin",
            ObjectiveKind::Rosenbrock => "rosenbrock",
        }
    }

    pub fn min_dim(self) -> usize {
        match self {
            ObjectiveKind::Rastrigin => 1,
            ObjectiveKind::Rosenbrock => 2,
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveKind {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rastrigin" => Ok(ObjectiveKind::Rastrigin),
            "rosenbrock" | "rosen" => Ok(ObjectiveKind::Rosenbrock),
            other => Err(ObjectiveError::Unknown(other.to_string())),
        }
    }
}

/// Which Rosenbrock term to evaluate.
///
/// `Canonical` is `100 (x[i+1] - x[i]^2)^2 + (x[i] - 1)^2`. `Literal` is the
/// transcription `(100 (x[i+1] - x[i])^2)^2 + (x[i] - 1)^2`, kept for
/// comparison runs. Both vanish at the all-ones point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RosenbrockForm {
    #[default]
    Canonical,
    Literal,
}

fn check_finite(x: &[f64]) -> Result<(), ObjectiveError> {
    if x.is_empty() {
        return Err(ObjectiveError::Empty);
    }
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(ObjectiveError::NonFinite {
            index,
            value: x[index],
        }),
        None => Ok(()),
    }
}

/// `sum_j [x_j^2 - 10 cos(2 pi x_j)] + 10 n`.
pub fn rastrigin(x: &[f64]) -> Result<f64, ObjectiveError> {
    check_finite(x)?;
    let n = x.len() as f64;
    Ok(x.iter()
        .map(|&xj| xj * xj - 10.0 * (2.0 * PI * xj).cos())
        .sum::<f64>()
        + 10.0 * n)
}

/// Canonical Rosenbrock on the box `[-30, 30]^n`.
pub fn rosenbrock(x: &[f64]) -> Result<f64, ObjectiveError> {
    rosenbrock_with(x, RosenbrockForm::Canonical)
}

pub fn rosenbrock_with(x: &[f64], form: RosenbrockForm) -> Result<f64, ObjectiveError> {
    check_finite(x)?;
    if x.len() < 2 {
        return Err(ObjectiveError::TooFewDimensions {
            name: "rosenbrock",
            min: 2,
            got: x.len(),
        });
    }
    if let Some(index) = x.iter().position(|v| v.abs() > ROSENBROCK_BOUND) {
        return Err(ObjectiveError::OutOfBounds {
            index,
            value: x[index],
            lo: -ROSENBROCK_BOUND,
            hi: ROSENBROCK_BOUND,
        });
    }
    Ok(x.windows(2)
        .map(|w| {
            let (xi, next) = (w[0], w[1]);
            let valley = match form {
                RosenbrockForm::Canonical => 100.0 * (next - xi * xi).powi(2),
                RosenbrockForm::Literal => (100.0 * (next - xi).powi(2)).powi(2),
            };
            valley + (xi - 1.0).powi(2)
        })
        .sum())
}

/// A benchmark objective bound to a dimension and a search box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveFunction {
    pub kind: ObjectiveKind,
    pub dim: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub rosenbrock_form: RosenbrockForm,
}

impl ObjectiveFunction {
    /// Uses the conventional box for `kind`.
    pub fn new(kind: ObjectiveKind, dim: usize) -> Result<Self, ObjectiveError> {
        let bound = match kind {
            ObjectiveKind::Rastrigin => RASTRIGIN_BOUND,
            ObjectiveKind::Rosenbrock => ROSENBROCK_BOUND,
        };
        Self::with_bounds(kind, dim, -bound, bound)
    }

    pub fn rastrigin(dim: usize) -> Result<Self, ObjectiveError> {
        Self::new(ObjectiveKind::Rastrigin, dim)
    }

    pub fn rosenbrock(dim: usize) -> Result<Self, ObjectiveError> {
        Self::new(ObjectiveKind::Rosenbrock, dim)
    }

    /// Rosenbrock's box may only narrow the `[-30, 30]` domain, and it must
    /// contain the minimizer of the objective.
    pub fn with_bounds(
        kind: ObjectiveKind,
        dim: usize,
        lower_bound: f64,
        upper_bound: f64,
    ) -> Result<Self, ObjectiveError> {
        if dim < kind.min_dim() {
            return Err(ObjectiveError::TooFewDimensions {
                name: kind.as_str(),
                min: kind.min_dim(),
                got: dim,
            });
        }
        let minimizer = match kind {
            ObjectiveKind::Rastrigin => 0.0,
            ObjectiveKind::Rosenbrock => 1.0,
        };
        let bad = !(lower_bound.is_finite() && upper_bound.is_finite())
            || lower_bound >= upper_bound
            || !(lower_bound..=upper_bound).contains(&minimizer)
            || (kind == ObjectiveKind::Rosenbrock
                && (lower_bound < -ROSENBROCK_BOUND || upper_bound > ROSENBROCK_BOUND));
        if bad {
            return Err(ObjectiveError::InvalidBounds {
                lo: lower_bound,
                hi: upper_bound,
            });
        }
        Ok(Self {
            kind,
            dim,
            lower_bound,
            upper_bound,
            rosenbrock_form: RosenbrockForm::Canonical,
        })
    }

    pub fn with_rosenbrock_form(mut self, form: RosenbrockForm) -> Self {
        self.rosenbrock_form = form;
        self
    }

    pub fn global_minimum_value(&self) -> f64 {
        0.0
    }

    pub fn global_minimizer(&self) -> Vec<f64> {
        let v = match self.kind {
            ObjectiveKind::Rastrigin => 0.0,
            ObjectiveKind::Rosenbrock => 1.0,
        };
        vec![v; self.dim]
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        if x.len() != self.dim {
            return Err(ObjectiveError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        // Reject out-of-box points for both objectives, not just Rosenbrock.
        check_finite(x)?;
        if let Some(index) = x
            .iter()
            .position(|v| *v < self.lower_bound || *v > self.upper_bound)
        {
            return Err(ObjectiveError::OutOfBounds {
                index,
                value: x[index],
                lo: self.lower_bound,
                hi: self.upper_bound,
            });
        }
        match self.kind {
            ObjectiveKind::Rastrigin => rastrigin(x),
            ObjectiveKind::Rosenbrock => rosenbrock_with(x, self.rosenbrock_form),
        }
    }

    /// Objective value minus the known global minimum.
    pub fn error(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(self.evaluate(x)? - self.global_minimum_value())
    }

    pub fn clamp_to_bounds(&self, x: &mut [f64]) {
        for v in x.iter_mut() {
            *v = v.clamp(self.lower_bound, self.upper_bound);
        }
    }

    pub fn clamped(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.clamp_to_bounds(&mut out);
        out
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x
                .iter()
                .all(|v| (self.lower_bound..=self.upper_bound).contains(v))
    }
}
