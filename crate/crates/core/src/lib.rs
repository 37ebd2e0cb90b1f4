//! Differential evolution on the Rastrigin and Rosenbrock benchmarks with
//! interchangeable entropy sources: a seeded xoshiro256** generator, or a
//! statevector simulation of Hadamard-gate qubit measurement. Runs are
//! compared with a tie-corrected Mann-Whitney U test.
//!
//! Module map:
//!
//! * [`rng`]: the [`rng::UniformSource`] contract and both backends.
//! * [`qsim`]: the statevector simulator behind the quantum backend.
//! * [`objective`]: benchmark functions, bounds and the error metric.
//! * [`de`]: the optimizer and its convergence trace.
//! * [`stats`]: Mann-Whitney U with normal approximation and exact oracle.
//! * [`harness`]: timing, run groups, comparisons and file output.
//! * [`cli`]: the `qdebench` command line.

pub mod cli;
pub mod de;
pub mod harness;
pub mod objective;
pub mod qsim;
pub mod rng;
pub mod selftest;
pub mod stats;
