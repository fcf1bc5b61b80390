//! Decoherence rates and the HCLA, BLP and circulant-spectrum machinery.
//!
//! All `d - 1` canonical rates of the master equation coincide:
//! `gamma(p) = -(1/d) G'(p) / G(p)`. Its normalized form
//! `gamma' = -gamma / (1 - gamma) = G' / h` with `h = d G + G'` stays finite
//! at `alpha_minus`, which is what the HCLA integral uses.

use rayon::prelude::*;

use crate::channel::{evolve, ChannelParams, SINGULAR_G_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigs, trace_distance, ComplexMatrix, Spectrum, C64};
use crate::mubs::{pair_iterator, MubFamily, MubPair, PairId};
use crate::quadrature::{adaptive_simpson, Integral, DEFAULT_ABS_TOL};
use crate::weyl::RootsOfUnity;

/// `gamma < -RATE_TOL` counts as a negative rate.
pub const RATE_TOL: f64 = 1e-12;

pub fn decoherence_rate(params: &ChannelParams, p: f64) -> Result<f64> {
    let g = params.g(p);
    if g.abs() <= SINGULAR_G_TOL {
        return Err(Error::SingularBase(p));
    }
    Ok(-params.g_prime(p) / (params.dim() as f64 * g))
}

/// `h(alpha, p) = (d-1) alpha p^2 - [(d - 2(d-1)/d) alpha + d] p + d - 1 - alpha`.
pub fn h_func(params: &ChannelParams, p: f64) -> f64 {
    let (d, a) = (params.dim() as f64, params.alpha());
    ((d - 1.0) * a * p - h_linear_coeff(d, a)) * p + d - 1.0 - a
}

fn h_linear_coeff(d: f64, a: f64) -> f64 {
    (d - 2.0 * (d - 1.0) / d) * a + d
}

pub fn gamma_normalized(params: &ChannelParams, p: f64) -> Result<f64> {
    let h = h_func(params, p);
    if h.abs() <= SINGULAR_G_TOL {
        return Err(Error::NormalizerRoot(p));
    }
    Ok(params.g_prime(p) / h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub p: f64,
    /// `None` at a root of `G`.
    pub gamma: Option<f64>,
    /// `None` at a root of `h`.
    pub gamma_normalized: Option<f64>,
}

impl RateSample {
    pub fn is_singular(&self) -> bool {
        self.gamma.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateProfile {
    pub params: ChannelParams,
    pub samples: Vec<RateSample>,
}

pub fn rate_profile(params: &ChannelParams, grid: &[f64]) -> RateProfile {
    let samples = grid
        .par_iter()
        .map(|&p| RateSample {
            p,
            gamma: decoherence_rate(params, p).ok(),
            gamma_normalized: gamma_normalized(params, p).ok(),
        })
        .collect();
    RateProfile {
        params: *params,
        samples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovVerdict {
    pub markovian: bool,
    pub first_violation: Option<f64>,
}

/// Rate criterion on a grid: non-Markovian iff `gamma < -1e-12` at some
/// grid point. Exact roots of `G` are skipped.
pub fn is_markovian_rate(params: &ChannelParams, p_grid: &[f64]) -> MarkovVerdict {
    let first = p_grid
        .iter()
        .copied()
        .find(|&p| matches!(decoherence_rate(params, p), Ok(g) if g < -RATE_TOL));
    MarkovVerdict {
        markovian: first.is_none(),
        first_violation: first,
    }
}

/// Offset of the probe bases placed on both sides of `alpha_minus` when
/// testing CP-divisibility on a grid.
pub const DIVISIBILITY_PROBE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub cells: usize,
    /// Cells `(p_base, p_star)` where the two criteria disagree.
    pub disagreements: Vec<(f64, f64)>,
    /// Cells skipped because `p_base` is a root of `G`.
    pub skipped: usize,
}

/// Compares the two non-Markovianity criteria on every cell `p_i < p_j` of
/// a sorted grid. CP side: every intermediate map `E(y, x)` with
/// `p_i <= x < y <= p_j` is CP, where `x, y` range over the grid points in
/// the cell plus probes `alpha_minus -/+ 1e-7` (the base map is not
/// invertible at `alpha_minus`, so the grid is refined there). Rate side:
/// no grid point of the cell has `gamma < 0`.
pub fn criterion_agreement(params: &ChannelParams, grid: &[f64]) -> Result<AgreementReport> {
    use crate::reps::{is_cp_default, IntermediateSpec};
    let am = params.alpha_minus();
    let probes = [am - DIVISIBILITY_PROBE, am + DIVISIBILITY_PROBE];
    let mut report = AgreementReport {
        cells: 0,
        disagreements: Vec::new(),
        skipped: 0,
    };
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let (lo, hi) = (grid[i], grid[j]);
            if params.is_singular_at(lo) {
                report.skipped += 1;
                continue;
            }
            report.cells += 1;
            let mut nodes: Vec<f64> = grid[i..=j].to_vec();
            nodes.extend(probes.iter().copied().filter(|&q| q > lo && q < hi));
            nodes.sort_by(f64::total_cmp);
            let mut divisible = true;
            'outer: for (a, &x) in nodes.iter().enumerate() {
                if params.is_singular_at(x) {
                    continue;
                }
                for &y in &nodes[a + 1..] {
                    let spec = IntermediateSpec::new(*params, x, y)?;
                    if !is_cp_default(&spec)?.cp {
                        divisible = false;
                        break 'outer;
                    }
                }
            }
            let markovian = is_markovian_rate(params, &grid[i..=j]).markovian;
            if divisible != markovian {
                report.disagreements.push((lo, hi));
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HclaResult {
    pub closed_form: f64,
    pub numeric: f64,
    /// Roots `(p_minus, p_plus)` of `h`; `None` for `alpha = 0`.
    pub h_roots: Option<(f64, f64)>,
    pub discriminant: f64,
    /// False if `h` vanishes inside `[alpha_minus, 1]` or quadrature hit its cap.
    pub converged: bool,
}

/// Integral of `gamma'` over the negative-rate region `[alpha_minus, 1]`,
/// in closed form and by adaptive Simpson. Zero at `alpha = 0`.
pub fn hcla_measure(params: &ChannelParams) -> HclaResult {
    let (d, a) = (params.dim() as f64, params.alpha());
    let b = h_linear_coeff(d, a);
    let disc = b * b - 4.0 * (d - 1.0) * a * (d - 1.0 - a);
    if a == 0.0 {
        return HclaResult {
            closed_form: 0.0,
            numeric: 0.0,
            h_roots: None,
            discriminant: disc,
            converged: true,
        };
    }
    let am = params.alpha_minus();
    let sq = disc.sqrt();
    let pm = (b - sq) / (2.0 * (d - 1.0) * a);
    let pp = (b + sq) / (2.0 * (d - 1.0) * a);
    let log_h = (h_func(params, 1.0) / h_func(params, am)).abs().ln() / d;
    let log_poles = ((1.0 - pm) * (am - pp) / ((1.0 - pp) * (am - pm))).abs().ln();
    let closed_form = log_h + 2.0 * (d - 1.0) * a / (d * d * sq) * log_poles;

    let root_inside = (am..=1.0).contains(&pm) || (am..=1.0).contains(&pp);
    let quad = hcla_quadrature(params, DEFAULT_ABS_TOL);
    HclaResult {
        closed_form,
        numeric: quad.value,
        h_roots: Some((pm, pp)),
        discriminant: disc,
        converged: quad.converged && !root_inside,
    }
}

/// Adaptive Simpson of `gamma'` over `[alpha_minus, 1]`.
pub fn hcla_quadrature(params: &ChannelParams, tol: f64) -> Integral {
    let am = params.alpha_minus();
    adaptive_simpson(
        |p| gamma_normalized(params, p).unwrap_or(f64::NAN),
        am,
        1.0,
        tol,
    )
}

/// Closed-form trace distance of the evolved pair: 1 for computational
/// pairs, `|G(p)|` otherwise.
pub fn blp_trace_distance(params: &ChannelParams, p: f64, pair: &MubPair<'_>) -> f64 {
    if pair.computational {
        1.0
    } else {
        params.g(p).abs()
    }
}

/// The same distance from evolved states and a numerical trace norm.
pub fn blp_trace_distance_oracle(params: &ChannelParams, p: f64, pair: &MubPair<'_>) -> Result<f64> {
    let (r1, r2) = pair.states()?;
    trace_distance(&evolve(params, p, &r1)?, &evolve(params, p, &r2)?)
}

/// `dD/dp` of the closed form; zero on computational pairs and at roots of `G`.
pub fn sigma_rate(params: &ChannelParams, p: f64, pair: &MubPair<'_>) -> f64 {
    let g = params.g(p);
    if pair.computational || g.abs() <= SINGULAR_G_TOL {
        0.0
    } else {
        g.signum() * params.g_prime(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlpResult {
    /// `alpha / d`.
    pub closed_form: f64,
    /// Largest numeric backflow over the family's pairs.
    pub numeric: f64,
    /// Pair attaining `numeric`; ties (within `BLP_TIE_TOL`) go to the lowest
    /// basis, then the lowest pair.
    pub basis_pair: Option<PairId>,
    pub per_pair: Vec<(PairId, f64)>,
    /// The maximum is taken over MUB pairs only.
    pub mub_restricted: bool,
    pub partial_family: bool,
}

/// Backflows closer than this are ties.
pub const BLP_TIE_TOL: f64 = 1e-12;

/// Number of uniform intervals on `[0, 1]` for the backflow sum.
pub const BLP_GRID_INTERVALS: usize = 40;

fn backflow_nodes(params: &ChannelParams) -> Vec<f64> {
    let mut nodes: Vec<f64> = (0..=BLP_GRID_INTERVALS)
        .map(|i| i as f64 / BLP_GRID_INTERVALS as f64)
        .collect();
    let am = params.alpha_minus();
    if am < 1.0 {
        nodes.push(am);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
    }
    nodes
}

/// Sum of the positive increments of the oracle trace distance over a grid
/// on `[0, 1]` that includes `alpha_minus` as a node. On each monotone
/// piece the sum telescopes, so this is the integral of `sigma` over
/// `sigma > 0` without differentiating anything.
pub fn blp_backflow(params: &ChannelParams, pair: &MubPair<'_>) -> Result<f64> {
    let d: Vec<f64> = backflow_nodes(params)
        .into_iter()
        .map(|p| blp_trace_distance_oracle(params, p, pair))
        .collect::<Result<_>>()?;
    Ok(d.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum())
}

/// MUB-restricted BLP measure over every pair of `fam`.
pub fn blp_measure(params: &ChannelParams, fam: &MubFamily) -> Result<BlpResult> {
    if fam.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: fam.dim(),
        });
    }
    let pairs: Vec<MubPair<'_>> = pair_iterator(fam, false).collect();
    let per_pair: Vec<(PairId, f64)> = pairs
        .par_iter()
        .map(|pair| blp_backflow(params, pair).map(|v| (pair.id, v)))
        .collect::<Result<_>>()?;
    let mut best: Option<(PairId, f64)> = None;
    for &(id, v) in &per_pair {
        if best.is_none_or(|(_, b)| v > b + BLP_TIE_TOL) {
            best = Some((id, v));
        }
    }
    Ok(BlpResult {
        closed_form: params.alpha() / params.dim() as f64,
        numeric: best.map_or(0.0, |b| b.1),
        basis_pair: best.map(|b| b.0),
        per_pair,
        mub_restricted: true,
        partial_family: fam.is_partial(),
    })
}

/// `A = ((1 - kappa)/d) sum_i (1 - w^(d-i)) J^i` with `J^i(r, c) = [c = r + i mod d]`.
pub fn circulant_difference_matrix(d: usize, kappa: f64) -> ComplexMatrix {
    let w = RootsOfUnity::new(d);
    let scale = (1.0 - kappa) / d as f64;
    ComplexMatrix::from_fn(d, d, |r, c| {
        let i = (c + d - r) % d;
        (C64::new(1.0, 0.0) - w.pow(d as i64 - i as i64)) * scale
    })
}

/// Eigenvalues of `A^2` from the circulant symbol `f(w^s) = sum_i c_i w^(i s)`.
pub fn circulant_difference_spectrum(d: usize, kappa: f64) -> Spectrum {
    let w = RootsOfUnity::new(d);
    let scale = (1.0 - kappa) / d as f64;
    let ev = (0..d)
        .map(|s| {
            let f: C64 = (0..d)
                .map(|i| (C64::new(1.0, 0.0) - w.pow(d as i64 - i as i64)) * w.pow((i * s) as i64))
                .sum::<C64>()
                * scale;
            (f * f).re
        })
        .collect();
    Spectrum::new(ev)
}

/// Numerical spectrum of the explicitly built `A^2`.
pub fn circulant_difference_spectrum_numeric(d: usize, kappa: f64) -> Result<Spectrum> {
    let a = circulant_difference_matrix(d, kappa);
    let a2 = &a * &a;
    // A is Hermitian in exact arithmetic; symmetrize away round-off
    hermitian_eigs(&(&a2 + &a2.adjoint()).scale_real(0.5))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Report {
    pub holds: bool,
    /// Polynomial values at `w^s`, `s = 0..d`.
    pub values: Vec<C64>,
    pub max_deviation: f64,
}

/// Squares `sum_i (1 - w^(d-i)) x^i` modulo `x^d - 1` by brute-force
/// coefficient sums and evaluates it at every `d`-th root of unity.
/// Expected: `d^2` at `s = 0, 1`, zero elsewhere.
pub fn lemma1_check(d: usize) -> Lemma1Report {
    let w = RootsOfUnity::new(d);
    let c: Vec<C64> = (0..d)
        .map(|i| C64::new(1.0, 0.0) - w.pow(d as i64 - i as i64))
        .collect();
    let mut coeff = vec![C64::new(0.0, 0.0); d];
    for i in 0..d {
        for j in 0..d {
            coeff[(i + j) % d] += c[i] * c[j];
        }
    }
    let d2 = (d * d) as f64;
    let values: Vec<C64> = (0..d)
        .map(|s| {
            coeff
                .iter()
                .enumerate()
                .map(|(k, b)| b * w.pow((k * s) as i64))
                .sum()
        })
        .collect();
    let max_deviation = values
        .iter()
        .enumerate()
        .map(|(s, v)| {
            let expect = if s <= 1 { d2 } else { 0.0 };
            (v - C64::new(expect, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    Lemma1Report {
        holds: max_deviation <= 1e-9,
        values,
        max_deviation,
    }
}
