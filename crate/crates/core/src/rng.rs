//! Uniform entropy sources.
//!
//! Every stochastic operation in the crate draws through [`UniformSource`],
//! which only has to supply `next_uniform`; index and range draws are derived
//! from it so that each one consumes exactly one uniform sample.
//!
//! Two concrete backends sit behind [`RandomSource`]:
//!
//! * `Classical`: xoshiro256** seeded through SplitMix64, the construction
//!   recommended by the generator's authors.
//! * `QuantumSim`: each sample is assembled from qubits prepared in `|0>`,
//!   put into superposition with Hadamard gates and measured on the
//!   statevector simulator in [`crate::qsim`]. The simulator resolves
//!   measurement outcomes with its own seeded xoshiro256** stream, so this
//!   backend is fully deterministic given its seed. It models the sampling
//!   procedure of a QRNG; it is not a source of physical randomness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim;

/// Default resolution of a quantum-simulated sample.
pub const DEFAULT_BITS_PER_SAMPLE: u32 = 32;
/// Default register width prepared per measurement shot.
pub const DEFAULT_QUBITS_PER_SHOT: usize = 8;
/// Samples are formed as `k / 2^bits`; beyond 53 bits that division is no
/// longer exact in `f64` and could round up to 1.0.
pub const MAX_BITS_PER_SAMPLE: u32 = 53;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RngError {
    #[error("invalid range [{lo}, {hi}): bounds must be finite with lo < hi")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("cannot draw an index from an empty range")]
    EmptyRange,
    #[error("cannot draw {k} distinct indices from 0..{n} excluding {exclude:?}")]
    Infeasible {
        n: usize,
        k: usize,
        exclude: Option<usize>,
    },
    #[error("bits per sample must be in 1..={MAX_BITS_PER_SAMPLE}, got {0}")]
    InvalidBits(u32),
    #[error("qubits per shot must be in 1..={}, got {0}", qsim::MAX_QUBITS)]
    InvalidShotWidth(usize),
    #[error("scripted value {0} is outside [0, 1)")]
    ScriptOutOfRange(f64),
}

/// A stream of uniform samples in `[0, 1)`.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;

    /// `lo + u * (hi - lo)`; consumes one sample.
    fn next_uniform_in(&mut self, lo: f64, hi: f64) -> Result<f64, RngError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(RngError::InvalidRange { lo, hi });
        }
        let u = self.next_uniform();
        let x = lo + u * (hi - lo);
        // Rounding can land exactly on `hi` for u close to 1.
        Ok(if x >= hi { hi.next_down() } else { x })
    }

    /// `floor(u * n)`; consumes one sample.
    fn next_index(&mut self, n: usize) -> Result<usize, RngError> {
        if n == 0 {
            return Err(RngError::EmptyRange);
        }
        let u = self.next_uniform();
        Ok(((u * n as f64) as usize).min(n - 1))
    }

    /// `k` pairwise-distinct indices in `0..n`, none equal to `exclude`,
    /// found by rejection sampling on [`UniformSource::next_index`].
    fn distinct_indices(
        &mut self,
        n: usize,
        k: usize,
        exclude: Option<usize>,
    ) -> Result<Vec<usize>, RngError> {
        let excluded = usize::from(exclude.is_some());
        let valid_exclude = exclude.is_none_or(|e| e < n);
        if k == 0 || !valid_exclude || k + excluded > n {
            return Err(RngError::Infeasible { n, k, exclude });
        }
        let mut picked = Vec::with_capacity(k);
        while picked.len() < k {
            let idx = self.next_index(n)?;
            if Some(idx) != exclude && !picked.contains(&idx) {
                picked.push(idx);
            }
        }
        Ok(picked)
    }
}

impl<S: UniformSource + ?Sized> UniformSource for &mut S {
    fn next_uniform(&mut self) -> f64 {
        (**self).next_uniform()
    }
}

/// xoshiro256** 1.0 (Blackman & Vigna).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    /// Uses the raw state as given. The all-zero state is a fixed point of
    /// the generator and is mapped to the SplitMix64 expansion of 0 instead.
    pub fn from_state(s: [u64; 4]) -> Self {
        if s == [0; 4] {
            return Self::seed_from_u64(0);
        }
        Self { s }
    }

    /// Expands a 64-bit seed into the 256-bit state with SplitMix64.
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = SplitMix64(seed);
        Self {
            s: [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()],
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Top 53 bits scaled by 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl UniformSource for Xoshiro256StarStar {
    fn next_uniform(&mut self) -> f64 {
        self.next_f64()
    }
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RngKind {
    Classical,
    #[serde(rename = "qsim")]
    QuantumSim,
}

impl RngKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RngKind::Classical => "classical",
            RngKind::QuantumSim => "qsim",
        }
    }
}

impl fmt::Display for RngKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RngKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(RngKind::Classical),
            "qsim" | "quantum" | "quantumsim" => Ok(RngKind::QuantumSim),
            other => Err(format!("unknown rng kind `{other}` (expected classical or qsim)")),
        }
    }
}

/// Full configuration of a [`RandomSource`]. Equal configurations yield
/// bitwise-equal sample streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub kind: RngKind,
    pub seed: u64,
    /// Quantum backend only.
    pub bits_per_sample: u32,
    /// Quantum backend only: width of each simulated register.
    pub qubits_per_shot: usize,
}

impl SourceConfig {
    pub fn classical(seed: u64) -> Self {
        Self {
            kind: RngKind::Classical,
            seed,
            bits_per_sample: DEFAULT_BITS_PER_SAMPLE,
            qubits_per_shot: DEFAULT_QUBITS_PER_SHOT,
        }
    }

    pub fn quantum(seed: u64) -> Self {
        Self {
            kind: RngKind::QuantumSim,
            ..Self::classical(seed)
        }
    }

    pub fn with_kind(kind: RngKind, seed: u64) -> Self {
        match kind {
            RngKind::Classical => Self::classical(seed),
            RngKind::QuantumSim => Self::quantum(seed),
        }
    }

    pub fn bits(mut self, bits_per_sample: u32) -> Self {
        self.bits_per_sample = bits_per_sample;
        self
    }

    pub fn shot_width(mut self, qubits_per_shot: usize) -> Self {
        self.qubits_per_shot = qubits_per_shot;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn build(self) -> Result<RandomSource, RngError> {
        RandomSource::new(self)
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Classical(Xoshiro256StarStar),
    Quantum(Xoshiro256StarStar),
}

/// A seeded entropy source with draw accounting.
///
/// Single-owner mutable state: `Send` but meant to be owned by one run.
#[derive(Debug, Clone)]
pub struct RandomSource {
    config: SourceConfig,
    backend: Backend,
    draws: u64,
}

impl RandomSource {
    pub fn new(config: SourceConfig) -> Result<Self, RngError> {
        let backend = match config.kind {
            RngKind::Classical => Backend::Classical(Xoshiro256StarStar::seed_from_u64(config.seed)),
            RngKind::QuantumSim => {
                if !(1..=MAX_BITS_PER_SAMPLE).contains(&config.bits_per_sample) {
                    return Err(RngError::InvalidBits(config.bits_per_sample));
                }
                if !(1..=qsim::MAX_QUBITS).contains(&config.qubits_per_shot) {
                    return Err(RngError::InvalidShotWidth(config.qubits_per_shot));
                }
                Backend::Quantum(Xoshiro256StarStar::seed_from_u64(config.seed))
            }
        };
        Ok(Self {
            config,
            backend,
            draws: 0,
        })
    }

    pub fn classical(seed: u64) -> Self {
        Self::new(SourceConfig::classical(seed)).expect("classical config is always valid")
    }

    pub fn quantum(seed: u64) -> Self {
        Self::new(SourceConfig::quantum(seed)).expect("default quantum config is valid")
    }

    pub fn config(&self) -> SourceConfig {
        self.config
    }

    pub fn kind(&self) -> RngKind {
        self.config.kind
    }

    /// Number of uniform samples emitted so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

impl UniformSource for RandomSource {
    fn next_uniform(&mut self) -> f64 {
        self.draws += 1;
        match &mut self.backend {
            Backend::Classical(rng) => rng.next_f64(),
            Backend::Quantum(measurement_entropy) => {
                let bits = self.config.bits_per_sample;
                let measured = qsim::sample_bits(
                    bits as usize,
                    self.config.qubits_per_shot,
                    measurement_entropy,
                )
                .expect("shot width validated at construction");
                assemble_fraction(&measured)
            }
        }
    }
}

/// Interprets `bits` (least significant first) as `k` and returns `k / 2^len`.
pub fn assemble_fraction(bits: &[bool]) -> f64 {
    debug_assert!(bits.len() as u32 <= MAX_BITS_PER_SAMPLE);
    let k = bits
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
    k as f64 / (1u64 << bits.len()) as f64
}

/// Replays a fixed list of uniforms. Panics when the script runs out, which
/// makes it suitable for hand-traced tests that must account for every draw.
#[derive(Debug, Clone)]
pub struct ScriptedSource {
    values: Vec<f64>,
    pos: usize,
}

impl ScriptedSource {
    pub fn new(values: impl Into<Vec<f64>>) -> Result<Self, RngError> {
        let values = values.into();
        if let Some(&bad) = values.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(RngError::ScriptOutOfRange(bad));
        }
        Ok(Self { values, pos: 0 })
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.values.len() - self.pos
    }
}

impl UniformSource for ScriptedSource {
    fn next_uniform(&mut self) -> f64 {
        let v = *self
            .values
            .get(self.pos)
            .unwrap_or_else(|| panic!("scripted source exhausted after {} draws", self.pos));
        self.pos += 1;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xoshiro_reference_state_1234() {
        // Output of the reference C implementation started from s = {1, 2, 3, 4}.
        let mut rng = Xoshiro256StarStar::from_state([1, 2, 3, 4]);
        assert_eq!(rng.next_u64(), 11520);
        assert_eq!(rng.next_u64(), 0);
        assert_eq!(rng.next_u64(), 1509978240);
        assert_eq!(rng.next_u64(), 1215971899390074240);
    }

    #[test]
    fn splitmix_reference() {
        // SplitMix64 seeded with 0: first output from the reference generator.
        let mut sm = SplitMix64(0);
        assert_eq!(sm.next_u64(), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn zero_state_is_remapped() {
        let mut a = Xoshiro256StarStar::from_state([0; 4]);
        assert_ne!(a.next_u64(), 0);
    }

    #[test]
    fn one_bit_quantum_samples() {
        let mut src = SourceConfig::quantum(3).bits(1).build().unwrap();
        let mut seen = [false; 2];
        for _ in 0..200 {
            let u = src.next_uniform();
            assert!(u == 0.0 || u == 0.5, "{u}");
            seen[(u * 2.0) as usize] = true;
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn one_bit_index_is_measured_bit() {
        let mut a = SourceConfig::quantum(11).bits(1).build().unwrap();
        let mut b = a.clone();
        for _ in 0..100 {
            let bit = (b.next_uniform() * 2.0) as usize;
            assert_eq!(a.next_index(2).unwrap(), bit);
        }
    }

    #[test]
    fn scaled_draws() {
        let mut s = ScriptedSource::new(vec![0.5, 0.25]).unwrap();
        assert_eq!(s.next_uniform_in(-30.0, 30.0).unwrap(), 0.0);
        assert_eq!(s.next_uniform_in(0.0, 1.0).unwrap(), 0.25);
        assert_eq!(s.remaining(), 0);
    }

    #[test]
    fn unit_range_matches_next_uniform() {
        let mut a = RandomSource::classical(9);
        let mut b = RandomSource::classical(9);
        for _ in 0..1000 {
            assert_eq!(a.next_uniform_in(0.0, 1.0).unwrap(), b.next_uniform());
        }
    }

    #[test]
    fn upper_bound_is_exclusive_under_rounding() {
        let mut s = ScriptedSource::new(vec![1.0 - f64::EPSILON / 2.0]).unwrap();
        let x = s.next_uniform_in(-5.12, 5.12).unwrap();
        assert!(x < 5.12);
    }

    #[test]
    fn range_validation() {
        let mut s = RandomSource::classical(0);
        assert!(s.next_uniform_in(1.0, 1.0).is_err());
        assert!(s.next_uniform_in(2.0, 1.0).is_err());
        assert!(s.next_uniform_in(f64::NEG_INFINITY, 1.0).is_err());
        assert!(s.next_uniform_in(0.0, f64::NAN).is_err());
        assert_eq!(s.draws(), 0);
        assert_eq!(s.next_index(0), Err(RngError::EmptyRange));
    }

    #[test]
    fn index_of_one() {
        let mut s = RandomSource::quantum(5);
        for _ in 0..100 {
            assert_eq!(s.next_index(1).unwrap(), 0);
        }
    }

    #[test]
    fn distinct_indices_cases() {
        let mut s = RandomSource::classical(1);
        let mut p = s.distinct_indices(3, 3, None).unwrap();
        p.sort_unstable();
        assert_eq!(p, vec![0, 1, 2]);

        for _ in 0..1000 {
            let d = s.distinct_indices(50, 3, Some(7)).unwrap();
            assert!(!d.contains(&7));
            assert!(d[0] != d[1] && d[1] != d[2] && d[0] != d[2]);
        }

        assert!(matches!(
            s.distinct_indices(4, 4, Some(0)),
            Err(RngError::Infeasible { .. })
        ));
        assert!(s.distinct_indices(4, 0, None).is_err());
        assert!(s.distinct_indices(4, 1, Some(4)).is_err());
    }

    #[test]
    fn distinct_indices_draw_accounting() {
        // 0.1 -> 0, 0.1 -> 0 (dup), 0.3 -> 1 (excluded), 0.6 -> 2, 0.9 -> 3
        let mut s = ScriptedSource::new(vec![0.1, 0.1, 0.3, 0.6, 0.9]).unwrap();
        assert_eq!(s.distinct_indices(4, 3, Some(1)).unwrap(), vec![0, 2, 3]);
        assert_eq!(s.consumed(), 5);
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            SourceConfig::quantum(0).bits(0).build().unwrap_err(),
            RngError::InvalidBits(0)
        );
        assert!(SourceConfig::quantum(0).bits(54).build().is_err());
        assert!(SourceConfig::quantum(0).shot_width(0).build().is_err());
        assert!(SourceConfig::quantum(0).shot_width(25).build().is_err());
        assert!(SourceConfig::quantum(0).bits(53).build().is_ok());
    }

    #[test]
    fn scripted_rejects_out_of_range() {
        assert!(ScriptedSource::new(vec![1.0]).is_err());
        assert!(ScriptedSource::new(vec![-0.1]).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("qsim".parse::<RngKind>().unwrap(), RngKind::QuantumSim);
        assert_eq!("Classical".parse::<RngKind>().unwrap(), RngKind::Classical);
        assert!("numpy".parse::<RngKind>().is_err());
    }

    #[test]
    fn assemble_is_lsb_first() {
        assert_eq!(assemble_fraction(&[true, false]), 0.25);
        assert_eq!(assemble_fraction(&[false, true]), 0.5);
        assert_eq!(assemble_fraction(&[true, true, true]), 7.0 / 8.0);
    }
}
