//! Fixed-step RK4 for the canonical master equation
//! `d rho / dp = gamma(p) sum_{i=1}^{d-1} (U_{i0} rho U_{i0}^dagger - rho)`.
//!
//! `gamma` has a pole at `alpha_minus` (at `p = 1` when `alpha = 0`), but
//! each coherence obeys `rho_ab' = (G'/G) rho_ab`, solved exactly by
//! `rho_ab(p) = rho_ab(a) G(p) / G(a)`. A window around the pole is crossed
//! with that exact solution instead of stepping through it.

use crate::channel::{check_unit, scale_coherences, ChannelParams, SINGULAR_G_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigs, ComplexMatrix, DensityMatrix, StateTolerance};
use crate::measures::decoherence_rate;
use crate::reps::{apply_intermediate_kraus_form, IntermediateSpec};
use crate::weyl::weyl_diagonal_family;

/// Default half-width of the analytically bridged window around the pole.
pub const DEFAULT_BRIDGE_HALF_WIDTH: f64 = 1e-3;

/// Off-diagonal magnitude below which a state counts as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-9;

/// Tolerances applied to every trajectory sample.
pub const TRAJECTORY_TOL: StateTolerance = StateTolerance {
    hermiticity: 1e-9,
    trace: 1e-9,
    min_eigenvalue: -1e-8,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterOptions {
    pub step: f64,
    pub bridge_half_width: f64,
}

impl MasterOptions {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            bridge_half_width: DEFAULT_BRIDGE_HALF_WIDTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: ChannelParams,
    pub start: f64,
    /// Strictly increasing in `p`; the first sample is the initial state.
    pub samples: Vec<(f64, DensityMatrix)>,
}

impl Trajectory {
    pub fn endpoint(&self) -> &(f64, DensityMatrix) {
        self.samples.last().expect("trajectory holds the initial state")
    }

    /// Largest trace and Hermiticity deviations and the smallest eigenvalue
    /// over all samples.
    pub fn conservation(&self) -> Result<Conservation> {
        let mut c = Conservation {
            max_trace_error: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
        };
        for (_, s) in &self.samples {
            let m = s.matrix();
            c.max_trace_error = c.max_trace_error.max((m.trace().re - 1.0).abs());
            c.max_hermiticity_error = c.max_hermiticity_error.max(m.hermiticity_deviation());
            c.min_eigenvalue = c.min_eigenvalue.min(hermitian_eigs(m)?.min());
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conservation {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

/// Right-hand side built literally from the diagonal Weyl operators.
struct MasterRhs {
    params: ChannelParams,
    clocks: Vec<ComplexMatrix>,
}

impl MasterRhs {
    fn new(params: ChannelParams) -> Result<Self> {
        let clocks = weyl_diagonal_family(params.dim())?.split_off(1);
        Ok(Self { params, clocks })
    }

    fn eval(&self, p: f64, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let gamma = decoherence_rate(&self.params, p)?;
        let mut acc = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for u in &self.clocks {
            acc = &acc + &(&rho.conjugate_by(u)? - rho);
        }
        Ok(acc.scale_real(gamma))
    }

    fn rk4_step(&self, p: f64, h: f64, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let k1 = self.eval(p, y)?;
        let k2 = self.eval(p + 0.5 * h, &(y + &k1.scale_real(0.5 * h)))?;
        let k3 = self.eval(p + 0.5 * h, &(y + &k2.scale_real(0.5 * h)))?;
        let k4 = self.eval(p + h, &(y + &k3.scale_real(h)))?;
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        Ok(y + &incr.scale_real(h / 6.0))
    }
}

fn sample(p: f64, m: &ComplexMatrix) -> Result<(f64, DensityMatrix)> {
    let state = DensityMatrix::with_tolerance(m.clone(), TRAJECTORY_TOL)
        .map_err(|e| Error::InvalidState(format!("at p = {p}: {e}")))?;
    Ok((p, state))
}

/// [`integrate_master_with`] using the default bridge window.
pub fn integrate_master(
    params: &ChannelParams,
    rho0: &DensityMatrix,
    p_start: f64,
    p_end: f64,
    step: f64,
) -> Result<Trajectory> {
    integrate_master_with(params, rho0, p_start, p_end, MasterOptions::with_step(step))
}

/// Integrates from `p_start` to `p_end`, recording a sample after every
/// step, at the pole, and at both edges of the bridged window.
pub fn integrate_master_with(
    params: &ChannelParams,
    rho0: &DensityMatrix,
    p_start: f64,
    p_end: f64,
    opts: MasterOptions,
) -> Result<Trajectory> {
    if opts.step.is_nan() || opts.step <= 0.0 {
        return Err(Error::OutOfRange {
            name: "step",
            value: opts.step,
            range: "(0, inf)",
        });
    }
    check_unit("p_start", p_start)?;
    check_unit("p_end", p_end)?;
    if p_end < p_start {
        return Err(Error::OutOfRange {
            name: "p_end",
            value: p_end,
            range: "[p_start, 1]",
        });
    }
    if rho0.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: rho0.dim(),
        });
    }
    let rhs = MasterRhs::new(*params)?;
    let pole = params.alpha_minus();
    let w = opts.bridge_half_width;
    let mut y = rho0.matrix().clone();
    let mut samples = vec![sample(p_start, &y)?];
    let mut p = p_start;

    let window = (pole + w > p_start && pole - w < p_end)
        .then(|| ((pole - w).max(p_start), (pole + w).min(p_end)));

    if let Some((lo, hi)) = window {
        rk4_segment(&rhs, &mut y, &mut p, lo, opts.step, &mut samples)?;
        bridge(params, &mut y, &mut p, hi, pole, &mut samples)?;
    }
    rk4_segment(&rhs, &mut y, &mut p, p_end, opts.step, &mut samples)?;

    Ok(Trajectory {
        params: *params,
        start: p_start,
        samples,
    })
}

fn rk4_segment(
    rhs: &MasterRhs,
    y: &mut ComplexMatrix,
    p: &mut f64,
    end: f64,
    step: f64,
    samples: &mut Vec<(f64, DensityMatrix)>,
) -> Result<()> {
    let a = *p;
    let len = end - a;
    if len <= 0.0 {
        return Ok(());
    }
    let n = ((len / step) - 1e-9).ceil().max(1.0) as usize;
    let h = len / n as f64;
    for i in 0..n {
        let at = a + i as f64 * h;
        *y = rhs.rk4_step(at, h, y)?;
        let next = if i + 1 == n { end } else { a + (i + 1) as f64 * h };
        samples.push(sample(next, y)?);
    }
    *p = end;
    Ok(())
}

fn bridge(
    params: &ChannelParams,
    y: &mut ComplexMatrix,
    p: &mut f64,
    end: f64,
    pole: f64,
    samples: &mut Vec<(f64, DensityMatrix)>,
) -> Result<()> {
    let a = *p;
    if end <= a {
        return Ok(());
    }
    let ga = params.g(a);
    let stops: Vec<f64> = [pole, end]
        .into_iter()
        .filter(|&q| q > a && q <= end)
        .collect();
    if ga.abs() <= SINGULAR_G_TOL {
        // starting on the pole: only coherence-free states have a defined future
        if y.max_off_diagonal() > DIAGONAL_TOL {
            return Err(Error::SingularBase(a));
        }
        for &q in &stops {
            samples.push(sample(q, y)?);
        }
    } else {
        let start = y.clone();
        for &q in &stops {
            *y = scale_coherences(&start, params.g(q) / ga);
            samples.push(sample(q, y)?);
        }
    }
    samples.dedup_by(|b, a| b.0 == a.0);
    *p = end;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    pub alpha_minus: f64,
    pub state_at_singularity: DensityMatrix,
    /// Largest off-diagonal magnitude of the state at `alpha_minus`.
    pub off_diagonal: f64,
    pub is_diagonal: bool,
    /// Worst `||E(1, p_b)[rho(alpha_minus)] - rho(alpha_minus)||` over bases
    /// `p_b = alpha_minus + 10^-k`, `k = 2, 3, 4`.
    pub fixed_point_residual: f64,
    /// `G(1) / G(0) = -alpha / d`: coherences come back with flipped sign.
    pub revival_factor: f64,
}

/// Integrates from 0 to `alpha_minus` and checks that the state there is a
/// fixed point of the intermediate maps leaving the pole.
pub fn singularity_report(
    params: &ChannelParams,
    rho0: &DensityMatrix,
    step: f64,
) -> Result<SingularityReport> {
    let am = params.alpha_minus();
    if am >= 1.0 {
        return Err(Error::NoInteriorSingularity(am));
    }
    let traj = integrate_master(params, rho0, 0.0, am, step)?;
    let (_, state) = traj.endpoint().clone();
    let off = state.matrix().max_off_diagonal();
    let mut residual: f64 = 0.0;
    for k in 2..=4 {
        let spec = IntermediateSpec::new(*params, am + 10f64.powi(-k), 1.0)?;
        let out = apply_intermediate_kraus_form(&spec, state.matrix())?;
        residual = residual.max(out.max_abs_diff(state.matrix()));
    }
    Ok(SingularityReport {
        alpha_minus: am,
        state_at_singularity: state,
        off_diagonal: off,
        is_diagonal: off <= DIAGONAL_TOL,
        fixed_point_residual: residual,
        revival_factor: params.g(1.0) / params.g(0.0),
    })
}
