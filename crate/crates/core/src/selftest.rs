//! Quick invariant checks runnable from the command line.

use crate::de::{self, DeConfig, DeMode};
use crate::objective::{rastrigin, rosenbrock, ObjectiveFunction};
use crate::qsim::QuantumRegister;
use crate::rng::{RandomSource, SourceConfig, UniformSource};
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, result: Result<(), String>) -> Check {
    match result {
        Ok(()) => Check { name, passed: true, detail: String::new() },
        Err(detail) => Check { name, passed: false, detail },
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, want {want} +/- {tol}"))
    }
}

fn utest_fixture(u1: f64, sigma: f64, z: f64, p: f64, r: f64) -> Result<(), String> {
    let res = stats::summarize(u1, 7, 7, sigma).map_err(|e| e.to_string())?;
    close("Z", res.z, z, 5e-4)?;
    close("p", res.p_two_tailed, p, 1e-4)?;
    close("r", res.r_effect, r, 0.005)?;
    close("cl", res.cl_effect, u1 / 49.0, 0.005)?;
    close("mu", res.mu, 24.5, 0.0)
}

fn objective_fixtures() -> Result<(), String> {
    let e = |r: Result<f64, _>| r.map_err(|e: crate::objective::ObjectiveError| e.to_string());
    close("rastrigin(0,0,0)", e(rastrigin(&[0.0; 3]))?, 0.0, 1e-12)?;
    close("rastrigin(1,1,1)", e(rastrigin(&[1.0; 3]))?, 3.0, 1e-12)?;
    close("rosenbrock(1,1,1)", e(rosenbrock(&[1.0; 3]))?, 0.0, 1e-12)?;
    close("rosenbrock(0,0)", e(rosenbrock(&[0.0; 2]))?, 1.0, 1e-12)
}

fn qsim_checks() -> Result<(), String> {
    for n in 1..=10 {
        let mut reg = QuantumRegister::new(n).map_err(|e| e.to_string())?;
        reg.apply_hadamard_all();
        let want = 2f64.powf(-(n as f64) / 2.0);
        for a in reg.amplitudes() {
            close("uniform amplitude", a.re, want, 1e-12)?;
            close("imaginary part", a.im, 0.0, 1e-12)?;
        }
        let before = reg.clone();
        for q in 0..n {
            reg.apply_hadamard(q).map_err(|e| e.to_string())?;
            reg.apply_hadamard(q).map_err(|e| e.to_string())?;
        }
        for (a, b) in reg.amplitudes().iter().zip(before.amplitudes()) {
            close("involution", (a - b).norm(), 0.0, 1e-12)?;
        }
    }
    Ok(())
}

fn rng_checks() -> Result<(), String> {
    for cfg in [SourceConfig::classical(42), SourceConfig::quantum(42)] {
        let mut a = cfg.build().map_err(|e| e.to_string())?;
        let mut b = cfg.build().map_err(|e| e.to_string())?;
        for _ in 0..10_000 {
            let (x, y) = (a.next_uniform(), b.next_uniform());
            if x.to_bits() != y.to_bits() {
                return Err(format!("{} stream diverged", cfg.kind));
            }
            if !(0.0..1.0).contains(&x) {
                return Err(format!("{} emitted {x}", cfg.kind));
            }
        }
    }
    Ok(())
}

fn elitism_checks() -> Result<(), String> {
    let objectives = [
        ObjectiveFunction::rastrigin(3).map_err(|e| e.to_string())?,
        ObjectiveFunction::rosenbrock(3).map_err(|e| e.to_string())?,
    ];
    for mode in [DeMode::Classic, DeMode::PaperLiteral] {
        for f in &objectives {
            let cfg = DeConfig { mode, max_gen: 30, ..Default::default() };
            let trace = de::run(&cfg, f, &mut RandomSource::classical(3)).map_err(|e| e.to_string())?;
            if trace.records.windows(2).any(|w| w[1].best_error > w[0].best_error) {
                return Err(format!("best error increased ({mode:?}, {})", f.kind));
            }
        }
    }
    Ok(())
}

fn exact_oracle_checks() -> Result<(), String> {
    for n in 3..=5 {
        let dist = stats::exact_u_distribution(n, n).map_err(|e| e.to_string())?;
        let sigma = stats::ties_corrected_sigma(n, n, &[]).map_err(|e| e.to_string())?;
        for &u in dist.keys() {
            let exact = stats::exact_two_tailed_p(n, n, u as f64).map_err(|e| e.to_string())?;
            let approx = stats::summarize(u as f64, n, n, sigma).map_err(|e| e.to_string())?.p_two_tailed;
            close("approximate p", approx, exact, 0.05)?;
        }
    }
    Ok(())
}

pub fn run_all() -> Vec<Check> {
    vec![
        check("mann-whitney fixture U=10 sigma=7.766", utest_fixture(10.0, 7.766, -1.8028, 0.07142, 0.48)),
        check("mann-whitney fixture U=12 sigma=7.783", utest_fixture(12.0, 7.783, -1.5418, 0.1231, 0.41)),
        check("objective fixtures", objective_fixtures()),
        check("hadamard involution and superposition", qsim_checks()),
        check("rng determinism and range", rng_checks()),
        check("elitism", elitism_checks()),
        check("normal approximation vs exact", exact_oracle_checks()),
    ]
}
