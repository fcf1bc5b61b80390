//! Self-check suites behind the `verify` command. Failures are collected
//! into the report, never raised.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::channel::{kraus_special, ChannelParams, KrausSet};
use crate::dynamics::integrate_master;
use crate::error::Result;
use crate::linalg::{kron, vectorize, ComplexMatrix, Spectrum};
use crate::measures::{
    blp_measure, circulant_difference_spectrum, circulant_difference_spectrum_numeric,
    hcla_measure, lemma1_check,
};
use crate::mubs::{mub_family, verify_mub};
use crate::reps::{
    choi_from_kraus, intermediate_choi, intermediate_choi_via_superop, intermediate_eigs,
    superop_from_kraus, IntermediateSpec,
};
use crate::sampling::{random_kraus, random_matrix, random_state, rng};
use crate::weyl::{weyl_basis, RootsOfUnity};

/// Soft budget for the whole run; exceeding it only adds a warning.
pub const TIME_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub worst_deviation: f64,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl SuiteResult {
    fn from_deviation(name: &'static str, worst: Result<f64>, tolerance: f64) -> Self {
        match worst {
            Ok(w) => Self {
                name,
                passed: w <= tolerance,
                worst_deviation: w,
                tolerance,
                note: None,
            },
            Err(e) => Self {
                name,
                passed: false,
                worst_deviation: f64::INFINITY,
                tolerance,
                note: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{} {:<24} worst={:.3e} tol={:.0e}",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.worst_deviation,
                s.tolerance
            ));
            if let Some(n) = &s.note {
                out.push_str(&format!(" ({n})"));
            }
            out.push('\n');
        }
        out.push_str(&format!("elapsed {:.2}s\n", self.elapsed.as_secs_f64()));
        if self.elapsed > TIME_BUDGET {
            out.push_str("warning: verification exceeded the 60 s budget\n");
        }
        out
    }
}

pub type ReshuffleFn = fn(&ComplexMatrix) -> Result<ComplexMatrix>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub max_d: usize,
    pub seed: u64,
    pub reshuffle: ReshuffleFn,
}

impl VerifyOptions {
    pub fn new(max_d: usize, seed: u64) -> Self {
        Self {
            max_d,
            seed,
            reshuffle: crate::linalg::reshuffle,
        }
    }
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let start = Instant::now();
    let max_d = opts.max_d.max(2);
    let suites = vec![
        SuiteResult::from_deviation("weyl-algebra", weyl_algebra(max_d), 1e-10),
        SuiteResult::from_deviation(
            "representations",
            representations(max_d.min(5), opts.seed, opts.reshuffle),
            1e-10,
        ),
        SuiteResult::from_deviation("intermediate-spectrum", spectra(max_d, opts.seed), 1e-9),
        SuiteResult::from_deviation("lemma1-circulant", lemma1_suite(), 1e-9),
        SuiteResult::from_deviation("mubs", mub_suite(max_d), 1e-10),
        SuiteResult::from_deviation("measures", measures_suite(max_d), 1e-6),
        SuiteResult::from_deviation("ode-convergence", ode_suite(opts.seed), 1e-8),
    ];
    VerifyReport {
        suites,
        elapsed: start.elapsed(),
    }
}

fn weyl_algebra(max_d: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for d in 2..=max_d {
        let w = RootsOfUnity::new(d);
        let basis = weyl_basis(d)?;
        let at = |k: usize, l: usize| &basis[d * (k % d) + (l % d)];
        for k in 0..d {
            for l in 0..d {
                let u = at(k, l);
                let adj = at(d - k, d - l).scale(w.pow((k * l) as i64));
                worst = worst.max(u.adjoint().max_abs_diff(&adj));
                for r in 0..d {
                    for s in 0..d {
                        let lhs = u.matmul(at(r, s))?;
                        let rhs = at(k + r, l + s).scale(w.pow((l * r) as i64));
                        worst = worst.max(lhs.max_abs_diff(&rhs));
                    }
                }
            }
        }
        for a in 0..d * d {
            for b in 0..d * d {
                let t = basis[a].adjoint().matmul(&basis[b])?.trace();
                let expect = if a == b { d as f64 } else { 0.0 };
                worst = worst.max((t.re - expect).abs().max(t.im.abs()));
            }
        }
    }
    Ok(worst)
}

/// Choi from Kraus vs reshuffled superoperator, reshuffle involution, and
/// `|X Z Y>> = (X (x) Y^T) |Z>>`.
pub fn representations(max_d: usize, seed: u64, reshuffle: ReshuffleFn) -> Result<f64> {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for d in 2..=max_d {
        for trial in 0..5 {
            let ks = if trial == 0 {
                kraus_special(&ChannelParams::new(d, 0.5)?, 0.6)?
            } else {
                KrausSet::new(d, random_kraus(&mut r, d, 3))?
            };
            let choi = choi_from_kraus(&ks)?;
            let sup = superop_from_kraus(&ks);
            worst = worst.max(reshuffle(&sup)?.max_abs_diff(choi.matrix()));
            let m = random_matrix(&mut r, d * d);
            worst = worst.max(reshuffle(&reshuffle(&m)?)?.max_abs_diff(&m));
            let (x, z, y) = (
                random_matrix(&mut r, d),
                random_matrix(&mut r, d),
                random_matrix(&mut r, d),
            );
            let lhs = vectorize(&x.matmul(&z)?.matmul(&y)?)?;
            let rhs = kron(&x, &y.transpose()).matmul(&vectorize(&z)?)?;
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    Ok(worst)
}

fn spectra(max_d: usize, seed: u64) -> Result<f64> {
    let mut r = rng(seed.wrapping_add(1));
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 100 {
        let d = r.gen_range(2..=max_d.min(6));
        let pr = ChannelParams::new(d, r.gen_range(0.05..=1.0))?;
        let x: f64 = r.gen_range(0.0..=1.0);
        let y: f64 = r.gen_range(0.0..=1.0);
        let spec = IntermediateSpec::new(pr, x.min(y), x.max(y))?;
        if pr.g(spec.p_base()).abs() <= 1e-3 {
            continue;
        }
        done += 1;
        let analytic = intermediate_eigs(&spec)?;
        let choi = intermediate_choi(&spec)?;
        worst = worst.max(analytic.max_deviation(&choi.spectrum()?));
        worst = worst.max((choi.matrix().trace().re - d as f64).abs());
        let via = intermediate_choi_via_superop(&spec)?;
        worst = worst.max(via.matrix().max_abs_diff(choi.matrix()));
    }
    Ok(worst)
}

fn lemma1_suite() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for d in 2..=12 {
        worst = worst.max(lemma1_check(d).max_deviation);
        for kappa in [0.0, 0.4, 1.0] {
            let mut expect = vec![(1.0 - kappa) * (1.0 - kappa); 2];
            expect.extend(std::iter::repeat_n(0.0, d - 2));
            let expect = Spectrum::new(expect);
            worst = worst.max(circulant_difference_spectrum(d, kappa).max_deviation(&expect));
            worst = worst.max(circulant_difference_spectrum_numeric(d, kappa)?.max_deviation(&expect));
        }
    }
    Ok(worst)
}

fn mub_suite(max_d: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for d in 2..=max_d.max(7) {
        let check = verify_mub(&mub_family(d)?);
        if !check.valid {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(check.worst_deviation);
    }
    Ok(worst)
}

fn measures_suite(max_d: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for d in 2..=max_d.min(5) {
        for k in 1..=10 {
            let pr = ChannelParams::new(d, k as f64 / 10.0)?;
            let h = hcla_measure(&pr);
            worst = worst.max((h.closed_form - h.numeric).abs());
        }
    }
    for d in [2, 3, 5] {
        let fam = mub_family(d)?;
        for a in [0.3, 1.0] {
            let b = blp_measure(&ChannelParams::new(d, a)?, &fam)?;
            worst = worst.max((b.numeric - b.closed_form).abs());
        }
    }
    Ok(worst)
}

/// Endpoint error through the pole at step 1e-4, plus a check that
/// halving coarse steps cuts the error by at least 12x.
fn ode_suite(seed: u64) -> Result<f64> {
    let mut r = rng(seed.wrapping_add(2));
    let pr = ChannelParams::new(3, 0.5)?;
    let rho = random_state(&mut r, 3);
    let exact = crate::channel::evolve(&pr, 1.0, &rho)?;
    let t = integrate_master(&pr, &rho, 0.0, 1.0, 1e-4)?;
    let mut worst = t.endpoint().1.matrix().max_abs_diff(exact.matrix());
    let exact = crate::channel::evolve(&pr, 0.7, &rho)?;
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&h| {
            integrate_master(&pr, &rho, 0.0, 0.7, h)
                .map(|t| t.endpoint().1.matrix().max_abs_diff(exact.matrix()))
        })
        .collect::<Result<_>>()?;
    if errs.windows(2).any(|w| w[0] / w[1] < 12.0) {
        worst = f64::INFINITY;
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reads the column double index as `(l, k)` instead of `(k, l)`.
    fn flipped(m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = m.dim()?;
        let d = crate::linalg::exact_sqrt(n).expect("square dimension");
        Ok(ComplexMatrix::from_fn(n, n, |row, col| {
            let (i, j) = (row / d, row % d);
            let (k, l) = (col / d, col % d);
            m[(i * d + l, j * d + k)]
        }))
    }

    #[test]
    fn default_suites_pass() {
        let rep = run_verify(&VerifyOptions::new(5, 0));
        assert!(rep.passed(), "{}", rep.render());
        assert_eq!(rep.suites.len(), 7);
    }

    #[test]
    fn reshuffle_mutation_is_caught() {
        assert!(representations(3, 0, crate::linalg::reshuffle).unwrap() < 1e-10);
        assert!(representations(3, 0, flipped).unwrap() > 1e-3);
    }
}
