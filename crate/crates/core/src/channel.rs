//! The perturbed generalized Weyl channel family.
//!
//! With `kappa(p) = p [1 + alpha (1 - (d-1) p / d)]` the channel keeps only
//! the identity and the diagonal Weyl operators:
//!
//! ```text
//! K_0    = sqrt(1 - (d-1) kappa / d) * 1
//! K_{di} = sqrt(kappa / d) * U_{i0},      i = 1..d-1
//! ```
//!
//! Its action leaves populations alone and multiplies every coherence by
//! `G(p) = 1 - kappa(p)`, a quadratic with roots `alpha_minus in (0, 1]`
//! and `alpha_plus > 1` once `alpha > 0`.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, StateTolerance, C64};
use crate::weyl::{weyl_basis, weyl_diagonal_family};

/// Tolerance for `sum K^dagger K = 1`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// `|G| <= SINGULAR_G_TOL` is treated as an exact zero of `G`.
pub const SINGULAR_G_TOL: f64 = 1e-12;

/// Dimension and perturbation strength of the channel family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    d: usize,
    alpha: f64,
}

/// Roots of `G`, ordered `minus < plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GRoots {
    pub minus: f64,
    pub plus: f64,
}

impl ChannelParams {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange {
                name: "d",
                value: d as f64,
                range: "[2, inf)",
            });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "[0, 1]",
            });
        }
        Ok(Self { d, alpha })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn df(&self) -> f64 {
        self.d as f64
    }

    /// `kappa(p)` for `p in [0, 1]`.
    pub fn kappa(&self, p: f64) -> Result<f64> {
        check_unit("p", p)?;
        Ok(self.kappa_at(p))
    }

    pub(crate) fn kappa_at(&self, p: f64) -> f64 {
        let d = self.df();
        p * (1.0 + self.alpha * (1.0 - (d - 1.0) * p / d))
    }

    /// `G(p) = ((d-1)/d) alpha p^2 - (1 + alpha) p + 1`, defined for every real `p`.
    pub fn g(&self, p: f64) -> f64 {
        let d = self.df();
        ((d - 1.0) / d * self.alpha * p - (1.0 + self.alpha)) * p + 1.0
    }

    /// `dG/dp`.
    pub fn g_prime(&self, p: f64) -> f64 {
        let d = self.df();
        2.0 * (d - 1.0) / d * self.alpha * p - (1.0 + self.alpha)
    }

    /// Both roots of `G`. Fails for `alpha = 0`, where `G = 1 - p` is linear.
    pub fn g_roots(&self) -> Result<GRoots> {
        if self.alpha == 0.0 {
            return Err(Error::NoFiniteRoots);
        }
        let d = self.df();
        let a = self.alpha;
        let disc = (1.0 + a).powi(2) - 4.0 * a * (d - 1.0) / d;
        let plus = d / (d - 1.0) * (1.0 + a + disc.sqrt()) / (2.0 * a);
        // product of the roots is d / ((d-1) alpha); avoids cancellation in the minus branch
        let minus = d / ((d - 1.0) * a) / plus;
        Ok(GRoots { minus, plus })
    }

    /// `alpha_minus`, with its `alpha -> 0+` limit of 1 at `alpha = 0`.
    pub fn alpha_minus(&self) -> f64 {
        self.g_roots().map_or(1.0, |r| r.minus)
    }

    /// True when `G(p)` is numerically zero.
    pub fn is_singular_at(&self, p: f64) -> bool {
        self.g(p).abs() <= SINGULAR_G_TOL
    }
}

pub(crate) fn check_unit(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value: p,
            range: "[0, 1]",
        })
    }
}

/// Kraus operators together with their completeness status.
#[derive(Debug, Clone)]
pub struct KrausSet {
    d: usize,
    operators: Vec<ComplexMatrix>,
    complete: bool,
    completeness_deviation: f64,
}

impl KrausSet {
    /// Wraps operators and records whether `sum K^dagger K = 1` within [`COMPLETENESS_TOL`].
    pub fn new(d: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &operators {
            if k.rows() != d || k.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: k.rows(),
                });
            }
            sum = &sum + &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
        Ok(Self {
            d,
            operators,
            complete: dev <= COMPLETENESS_TOL,
            completeness_deviation: dev,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn completeness_deviation(&self) -> f64 {
        self.completeness_deviation
    }

    /// `sum_a K_a X K_a^dagger`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for k in &self.operators {
            out = out.try_add(&x.conjugate_by(k)?)?;
        }
        Ok(out)
    }
}

fn weight_sqrt(w: f64) -> Result<f64> {
    // allow round-off below zero, reject genuinely negative weights
    if w < -1e-14 {
        Err(Error::NegativeRadicand(w))
    } else {
        Ok(w.max(0.0).sqrt())
    }
}

/// The `d`-operator Kraus set of the special channel at `p`.
pub fn kraus_special(params: &ChannelParams, p: f64) -> Result<KrausSet> {
    let kappa = params.kappa(p)?;
    let d = params.df();
    let k0 = weight_sqrt(1.0 - (d - 1.0) * kappa / d)?;
    let ki = weight_sqrt(kappa / d)?;
    let family = weyl_diagonal_family(params.d)?;
    let ops = family
        .iter()
        .enumerate()
        .map(|(i, u)| u.scale_real(if i == 0 { k0 } else { ki }))
        .collect();
    KrausSet::new(params.d, ops)
}

/// The `d`-operator family with free perturbations `lambdas[i]`, `i = 0..d`:
/// `K_0 = sqrt((1+L_0)(1 - (d-1)p/d)) 1`, `K_{di} = sqrt((1+L_i) p/d) U_{i0}`.
///
/// Completeness is computed and reported, not enforced.
pub fn kraus_diagonal_perturbed(d: usize, p: f64, lambdas: &[f64]) -> Result<KrausSet> {
    check_unit("p", p)?;
    if lambdas.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: lambdas.len(),
        });
    }
    let df = d as f64;
    let family = weyl_diagonal_family(d)?;
    let ops = family
        .iter()
        .zip(lambdas)
        .enumerate()
        .map(|(i, (u, &l))| {
            let base = if i == 0 { 1.0 - (df - 1.0) * p / df } else { p / df };
            weight_sqrt((1.0 + l) * base).map(|s| u.scale_real(s))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(d, ops)
}

/// The perturbation choice that turns [`kraus_diagonal_perturbed`] into the special channel:
/// `L_0 = -(d-1) alpha p / d`, `L_i = alpha (1 - (d-1) p / d)`.
pub fn special_perturbations(params: &ChannelParams, p: f64) -> Vec<f64> {
    let d = params.df();
    let a = params.alpha;
    let mut out = vec![a * (1.0 - (d - 1.0) * p / d); params.d];
    out[0] = -(d - 1.0) * a * p / d;
    out
}

/// The full `d^2`-operator family with free perturbations `lambdas[a]`:
/// `K_0 = sqrt((1+L_0)(1 - (d^2-1)p/d^2)) 1`, `K_a = sqrt((1+L_a) p/d^2) U_a`.
///
/// Completeness is computed and reported, not enforced.
pub fn kraus_full(d: usize, p: f64, lambdas: &[f64]) -> Result<KrausSet> {
    check_unit("p", p)?;
    if lambdas.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: lambdas.len(),
        });
    }
    let d2 = (d * d) as f64;
    let basis = weyl_basis(d)?;
    let ops = basis
        .iter()
        .zip(lambdas)
        .enumerate()
        .map(|(a, (u, &l))| {
            let base = if a == 0 { 1.0 - (d2 - 1.0) * p / d2 } else { p / d2 };
            weight_sqrt((1.0 + l) * base).map(|s| u.scale_real(s))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(d, ops)
}

/// Unperturbed `d^2`-operator channel with mixing parameter `kappa`:
/// weights `1 - (d^2-1) kappa / d^2` on the identity and `kappa / d^2` elsewhere.
pub fn kraus_uniform_weyl(d: usize, kappa: f64) -> Result<KrausSet> {
    let d2 = (d * d) as f64;
    let basis = weyl_basis(d)?;
    let ops = basis
        .iter()
        .enumerate()
        .map(|(a, u)| {
            let w = if a == 0 { 1.0 - (d2 - 1.0) * kappa / d2 } else { kappa / d2 };
            weight_sqrt(w).map(|s| u.scale_real(s))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(d, ops)
}

/// Multiplies every off-diagonal entry by `factor`.
pub(crate) fn scale_coherences(x: &ComplexMatrix, factor: f64) -> ComplexMatrix {
    let f = C64::new(factor, 0.0);
    ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| {
        if i == j {
            x[(i, j)]
        } else {
            x[(i, j)] * f
        }
    })
}

/// The special channel acting linearly on any `d x d` matrix.
pub fn apply_channel(params: &ChannelParams, p: f64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_unit("p", p)?;
    if x.dim()? != params.d {
        return Err(Error::DimensionMismatch {
            expected: params.d,
            found: x.rows(),
        });
    }
    Ok(scale_coherences(x, params.g(p)))
}

/// `rho(p) = E(p)[rho0]`: populations fixed, coherences times `G(p)`.
pub fn evolve(params: &ChannelParams, p: f64, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let out = apply_channel(params, p, rho0.matrix())?;
    DensityMatrix::with_tolerance(
        out,
        StateTolerance {
            hermiticity: 1e-12,
            trace: 1e-12,
            min_eigenvalue: -1e-10,
        },
    )
}

/// One of the `d - 1` dephasing channels whose uniform average is the special channel:
/// `E_i(rho) = (1 - (d-1) kappa / d) rho + ((d-1)/d) kappa U_{i0} rho U_{i0}^dagger`.
pub fn dephasing_component(
    params: &ChannelParams,
    p: f64,
    i: usize,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if i == 0 || i >= params.d {
        return Err(Error::OutOfRange {
            name: "dephasing index",
            value: i as f64,
            range: "[1, d)",
        });
    }
    let kappa = params.kappa(p)?;
    let d = params.df();
    let u = &weyl_diagonal_family(params.d)?[i];
    let keep = x.scale_real(1.0 - (d - 1.0) * kappa / d);
    let flip = x.conjugate_by(u)?.scale_real((d - 1.0) / d * kappa);
    keep.try_add(&flip)
}
