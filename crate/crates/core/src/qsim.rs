//! Dense statevector simulator restricted to what a Hadamard-based QRNG
//! needs: preparation in `|0...0>`, the H gate, and full measurement.
//!
//! Basis index `i` encodes qubit `q` in bit `q` of `i` (qubit 0 is the least
//! significant bit).

use num_complex::Complex64;
use thiserror::Error;

use crate::rng::UniformSource;

/// Register width cap. 2^24 amplitudes is 256 MiB of `Complex64`.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QsimError {
    #[error("register width must be in 1..={MAX_QUBITS}, got {0}")]
    InvalidWidth(usize),
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("requested zero bits")]
    ZeroBits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRegister {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumRegister {
    /// Prepares `|0...0>`.
    pub fn new(n_qubits: usize) -> Result<Self, QsimError> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(QsimError::InvalidWidth(n_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<(), QsimError> {
        if qubit >= self.n_qubits {
            return Err(QsimError::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        let stride = 1usize << qubit;
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * scale;
                *b = (x - y) * scale;
            }
        }
        Ok(())
    }

    pub fn apply_hadamard_all(&mut self) {
        for q in 0..self.n_qubits {
            self.apply_hadamard(q).expect("qubit index in range");
        }
    }

    /// Samples a basis state with one uniform draw (inverse CDF over the
    /// basis in index order), collapses onto it and returns its bits,
    /// qubit 0 first.
    pub fn measure_all<S: UniformSource + ?Sized>(&mut self, entropy: &mut S) -> Vec<bool> {
        let index = self.sample_index(entropy.next_uniform());
        let kept = self.amplitudes[index];
        self.amplitudes.fill(Complex64::new(0.0, 0.0));
        self.amplitudes[index] = kept / kept.norm();
        (0..self.n_qubits).map(|q| (index >> q) & 1 == 1).collect()
    }

    fn sample_index(&self, u: f64) -> usize {
        let mut cumulative = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
                cumulative += p;
                if u < cumulative {
                    return i;
                }
            }
        }
        // Rounding left the total slightly below u.
        last_nonzero
    }
}

/// Prepares registers of up to `qubits_per_shot` qubits, applies H to every
/// qubit, measures, and concatenates the outcomes until `n_bits` bits exist.
pub fn sample_bits<S: UniformSource + ?Sized>(
    n_bits: usize,
    qubits_per_shot: usize,
    entropy: &mut S,
) -> Result<Vec<bool>, QsimError> {
    if n_bits == 0 {
        return Err(QsimError::ZeroBits);
    }
    if !(1..=MAX_QUBITS).contains(&qubits_per_shot) {
        return Err(QsimError::InvalidWidth(qubits_per_shot));
    }
    let mut bits = Vec::with_capacity(n_bits);
    while bits.len() < n_bits {
        let width = qubits_per_shot.min(n_bits - bits.len());
        let mut reg = QuantumRegister::new(width)?;
        reg.apply_hadamard_all();
        bits.extend(reg.measure_all(entropy));
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{ScriptedSource, Xoshiro256StarStar};

    const TOL: f64 = 1e-12;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_amps(reg: &QuantumRegister, expected: &[f64]) {
        assert_eq!(reg.amplitudes().len(), expected.len());
        for (a, &e) in reg.amplitudes().iter().zip(expected) {
            assert!((a - c(e)).norm() < TOL, "{a} vs {e}");
        }
    }

    #[test]
    fn init_states() {
        assert_amps(&QuantumRegister::new(1).unwrap(), &[1.0, 0.0]);
        assert_amps(&QuantumRegister::new(2).unwrap(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(QuantumRegister::new(25), Err(QsimError::InvalidWidth(25)));
        assert_eq!(QuantumRegister::new(0), Err(QsimError::InvalidWidth(0)));
    }

    #[test]
    fn hadamard_basics() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut r = QuantumRegister::new(1).unwrap();
        r.apply_hadamard(0).unwrap();
        assert_amps(&r, &[h, h]);
        r.apply_hadamard(0).unwrap();
        assert_amps(&r, &[1.0, 0.0]);

        let mut r = QuantumRegister::new(2).unwrap();
        r.apply_hadamard(0).unwrap();
        r.apply_hadamard(1).unwrap();
        assert_amps(&r, &[0.5; 4]);

        assert_eq!(
            r.apply_hadamard(2),
            Err(QsimError::QubitOutOfRange {
                qubit: 2,
                n_qubits: 2
            })
        );
    }

    #[test]
    fn hadamard_on_one_produces_minus() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut r = QuantumRegister::new(1).unwrap();
        r.apply_hadamard(0).unwrap();
        r.measure_all(&mut ScriptedSource::new(vec![0.9]).unwrap());
        assert_amps(&r, &[0.0, 1.0]);
        r.apply_hadamard(0).unwrap();
        assert_amps(&r, &[h, -h]);
    }

    #[test]
    fn measure_basis_state_is_stable() {
        let mut r = QuantumRegister::new(3).unwrap();
        let before = r.clone();
        let mut rng = Xoshiro256StarStar::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(r.measure_all(&mut rng), vec![false; 3]);
        }
        assert_eq!(r, before);
    }

    #[test]
    fn measurement_collapses() {
        let mut r = QuantumRegister::new(3).unwrap();
        r.apply_hadamard_all();
        // Uniform over 8 states: u = 0.4 falls in bucket 3 (0b011).
        let bits = r.measure_all(&mut ScriptedSource::new(vec![0.4]).unwrap());
        assert_eq!(bits, vec![true, true, false]);
        let ones: Vec<_> = r
            .amplitudes()
            .iter()
            .filter(|a| (a.norm() - 1.0).abs() < TOL)
            .collect();
        assert_eq!(ones.len(), 1);
        assert!((r.norm_sqr() - 1.0).abs() < TOL);
        assert!((r.amplitudes()[3].norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn superposition_frequency() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(2024);
        let shots = 100_000;
        let ones = (0..shots)
            .filter(|_| {
                let mut r = QuantumRegister::new(1).unwrap();
                r.apply_hadamard(0).unwrap();
                r.measure_all(&mut rng)[0]
            })
            .count();
        let freq = ones as f64 / shots as f64;
        assert!((0.49..=0.51).contains(&freq), "{freq}");
    }

    #[test]
    fn sample_bits_lengths() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(7);
        assert_eq!(sample_bits(1, 8, &mut rng).unwrap().len(), 1);
        assert_eq!(sample_bits(32, 8, &mut rng).unwrap().len(), 32);
        assert_eq!(sample_bits(32, 5, &mut rng).unwrap().len(), 32);
        assert_eq!(sample_bits(0, 8, &mut rng), Err(QsimError::ZeroBits));
        assert_eq!(sample_bits(8, 0, &mut rng), Err(QsimError::InvalidWidth(0)));
    }

    #[test]
    fn sample_bits_consumes_one_draw_per_shot() {
        let mut s = ScriptedSource::new(vec![0.0; 4]).unwrap();
        sample_bits(32, 8, &mut s).unwrap();
        assert_eq!(s.consumed(), 4);
        let mut s = ScriptedSource::new(vec![0.0; 7]).unwrap();
        sample_bits(32, 5, &mut s).unwrap();
        assert_eq!(s.consumed(), 7);
    }
}
