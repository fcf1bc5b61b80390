//! Choi and superoperator representations, the intermediate map
//! `E(p*, p_base) = E(p*) E(p_base)^-1`, and complete-positivity tests.
//!
//! The intermediate Choi matrix is built two ways: from its block formula
//! (ones on the `|ii><ii|` diagonal, `R = G(p*)/G(p_base)` between distinct
//! `|ii>` and `|jj>`) and by reshuffling `E^(p*) E^(p_base)^-1`. Each route
//! is the other's oracle.

use crate::channel::{check_unit, kraus_special, ChannelParams, KrausSet, SINGULAR_G_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigs, kron, reshuffle, trace_norm, unvectorize, vectorize, ComplexMatrix,
    DensityMatrix, Spectrum, C64, NEGATIVITY_TOL,
};
use crate::quadrature::{adaptive_simpson, DEFAULT_ABS_TOL};
use crate::weyl::weyl_diagonal_family;

/// Below this `|G(p_base)|` the intermediate map is flagged as ill-conditioned.
pub const CONDITIONING_WARN_G: f64 = 1e-6;

/// A `d^2 x d^2` Choi matrix. Hermitian within `1e-10`, trace `d` within `1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    d: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(d: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.dim()?;
        if n != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: n,
            });
        }
        let herm = matrix.hermiticity_deviation();
        if herm > 1e-10 * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr - C64::new(d as f64, 0.0)).norm() > 1e-9 * matrix.max_abs().max(1.0) {
            return Err(Error::IncompleteKraus((tr.re - d as f64).abs()));
        }
        Ok(Self { d, matrix })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Numerical spectrum (Jacobi).
    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_eigs(&self.matrix)
    }

    /// `||C / d||_1`, equal to 1 exactly when the map is CP.
    pub fn normalized_trace_norm(&self) -> Result<f64> {
        Ok(trace_norm(&self.matrix)? / self.d as f64)
    }
}

/// `C = sum_a |K_a>> <<K_a|`.
pub fn choi_from_kraus(ks: &KrausSet) -> Result<ChoiMatrix> {
    if !ks.is_complete() {
        return Err(Error::IncompleteKraus(ks.completeness_deviation()));
    }
    let d = ks.dim();
    let mut c = ComplexMatrix::zeros(d * d, d * d);
    for k in ks.operators() {
        let v = vectorize(k)?;
        c = &c + &(&v * &v.adjoint());
    }
    ChoiMatrix::new(d, c)
}

/// `C = sum_ij E(|i><j|) (x) |i><j|` for an arbitrary linear map `E`.
pub fn choi_from_action(
    d: usize,
    map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
) -> Result<ComplexMatrix> {
    let mut c = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut eij = ComplexMatrix::zeros(d, d);
            eij[(i, j)] = C64::new(1.0, 0.0);
            c = &c + &kron(&map(&eij)?, &eij);
        }
    }
    Ok(c)
}

/// `E^ = sum_a K_a (x) conj(K_a)`, so that `E^ |X>> = |E(X)>>`.
pub fn superop_from_kraus(ks: &KrausSet) -> ComplexMatrix {
    let d = ks.dim();
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for k in ks.operators() {
        s = &s + &kron(k, &k.conj());
    }
    s
}

/// Applies a superoperator to a `d x d` matrix through vectorization.
pub fn apply_superop(superop: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    unvectorize(&superop.matmul(&vectorize(x)?)?)
}

/// Inverse of a superoperator: entrywise reciprocal when diagonal, general
/// elimination otherwise.
pub fn invert_superop(superop: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = superop.dim()?;
    if superop.is_diagonal(0.0) {
        let diag: Vec<C64> = superop.diagonal();
        if diag.iter().any(|z| z.norm() <= SINGULAR_G_TOL) {
            return Err(Error::SingularMatrix);
        }
        return Ok(ComplexMatrix::from_diag(
            &diag.iter().map(|z| z.inv()).collect::<Vec<_>>(),
        ));
    }
    debug_assert_eq!(superop.rows(), n);
    superop.inverse()
}

/// Pair `p_base <= p_star` in `[0, 1]` defining an intermediate map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateSpec {
    params: ChannelParams,
    p_base: f64,
    p_star: f64,
}

impl IntermediateSpec {
    pub fn new(params: ChannelParams, p_base: f64, p_star: f64) -> Result<Self> {
        check_unit("p_base", p_base)?;
        check_unit("p_star", p_star)?;
        if p_base > p_star {
            return Err(Error::OutOfRange {
                name: "p_base",
                value: p_base,
                range: "[0, p_star]",
            });
        }
        Ok(Self {
            params,
            p_base,
            p_star,
        })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn p_base(&self) -> f64 {
        self.p_base
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// `R = G(p_star) / G(p_base)`; fails when the base point is singular.
    pub fn ratio(&self) -> Result<f64> {
        coherence_ratio(&self.params, self.p_base, self.p_star)
    }

    /// True when `|G(p_base)|` is small enough that results lose accuracy.
    pub fn is_ill_conditioned(&self) -> bool {
        self.params.g(self.p_base).abs() < CONDITIONING_WARN_G
    }
}

fn coherence_ratio(params: &ChannelParams, p_base: f64, p_star: f64) -> Result<f64> {
    let g0 = params.g(p_base);
    if g0.abs() <= SINGULAR_G_TOL {
        return Err(Error::SingularBase(p_base));
    }
    Ok(params.g(p_star) / g0)
}

/// Block-formula Choi matrix of the intermediate map.
pub fn intermediate_choi(spec: &IntermediateSpec) -> Result<ChoiMatrix> {
    let r = spec.ratio()?;
    let d = spec.params.dim();
    let mut c = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let v = if i == j { 1.0 } else { r };
            c[(i * d + i, j * d + j)] = C64::new(v, 0.0);
        }
    }
    ChoiMatrix::new(d, c)
}

/// `reshuffle(E^(p_star) E^(p_base)^-1)` built from the Kraus operators.
pub fn intermediate_choi_via_superop(spec: &IntermediateSpec) -> Result<ChoiMatrix> {
    let d = spec.params.dim();
    let base = superop_from_kraus(&kraus_special(&spec.params, spec.p_base)?);
    let star = superop_from_kraus(&kraus_special(&spec.params, spec.p_star)?);
    let inv = invert_superop(&base).map_err(|_| Error::SingularBase(spec.p_base))?;
    ChoiMatrix::new(d, reshuffle(&star.matmul(&inv)?)?)
}

/// `lambda_0 = 1 + (d-1) R`, `lambda_i = 1 - R` (`d - 1` times), zero `d (d-1)` times.
pub fn intermediate_eigs(spec: &IntermediateSpec) -> Result<Spectrum> {
    Ok(eigs_from_ratio(spec.params.dim(), spec.ratio()?))
}

fn eigs_from_ratio(d: usize, r: f64) -> Spectrum {
    let mut ev = Vec::with_capacity(d * d);
    ev.push(1.0 + (d as f64 - 1.0) * r);
    ev.extend(std::iter::repeat_n(1.0 - r, d - 1));
    ev.extend(std::iter::repeat_n(0.0, d * (d - 1)));
    Spectrum::new(ev)
}

/// Outcome of the Choi-positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpVerdict {
    pub cp: bool,
    pub min_eigenvalue: f64,
}

/// CP iff the smallest analytic eigenvalue is at least `-tol`.
pub fn is_cp(spec: &IntermediateSpec, tol: f64) -> Result<CpVerdict> {
    let min = intermediate_eigs(spec)?.min();
    Ok(CpVerdict {
        cp: min >= -tol,
        min_eigenvalue: min,
    })
}

/// [`is_cp`] with the crate-wide negativity tolerance.
pub fn is_cp_default(spec: &IntermediateSpec) -> Result<CpVerdict> {
    is_cp(spec, NEGATIVITY_TOL)
}

/// Intermediate map on an arbitrary matrix: coherences times `R`.
pub fn apply_intermediate_matrix(
    spec: &IntermediateSpec,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let r = spec.ratio()?;
    if x.dim()? != spec.params.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.params.dim(),
            found: x.rows(),
        });
    }
    Ok(crate::channel::scale_coherences(x, r))
}

/// Same map through its pseudo-Kraus form `(1/d) sum_j lambda_j U_{dj} X U_{dj}^dagger`.
pub fn apply_intermediate_kraus_form(
    spec: &IntermediateSpec,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let r = spec.ratio()?;
    apply_weighted_clock_sum(spec.params.dim(), r, x)
}

pub(crate) fn apply_weighted_clock_sum(d: usize, r: f64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let df = d as f64;
    let family = weyl_diagonal_family(d)?;
    let mut out = ComplexMatrix::zeros(d, d);
    for (j, u) in family.iter().enumerate() {
        let lambda = if j == 0 { 1.0 + (df - 1.0) * r } else { 1.0 - r };
        out = out.try_add(&x.conjugate_by(u)?.scale_real(lambda / df))?;
    }
    Ok(out)
}

/// Applies the intermediate map to a state. Fails if the output is not a
/// valid state, which can happen for non-CP maps on states outside the
/// image of `E(p_base)`.
pub fn apply_intermediate(spec: &IntermediateSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(apply_intermediate_matrix(spec, rho.matrix())?)
}

/// Finite-difference RHP witness
/// `(||chi(p, p + eps)||_1 / d - 1) / eps`, with the trace norm taken from
/// the analytic spectrum.
pub fn rhp_witness(params: &ChannelParams, p: f64, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "(0, inf)",
        });
    }
    check_unit("p", p)?;
    // G is a polynomial, so p + eps may step past 1 at the right edge
    let r = coherence_ratio(params, p, p + eps)?;
    let norm = eigs_from_ratio(params.dim(), r).abs_sum() / params.dim() as f64;
    Ok((norm - 1.0) / eps)
}

/// The `eps -> 0+` limit of [`rhp_witness`]: `2 (d-1) max(0, -gamma(p))`.
pub fn rhp_witness_limit(params: &ChannelParams, p: f64) -> Result<f64> {
    let gamma = crate::measures::decoherence_rate(params, p)?;
    Ok(2.0 * (params.dim() as f64 - 1.0) * (-gamma).max(0.0))
}

/// Settings for [`rhp_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhpQuadrature {
    /// Half-width of the window excised around `alpha_minus`.
    pub delta: f64,
    pub abs_tol: f64,
}

impl Default for RhpQuadrature {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            abs_tol: DEFAULT_ABS_TOL,
        }
    }
}

/// Result of integrating the RHP witness over `[0, 1]` with the window
/// `(alpha_minus - delta, alpha_minus + delta)` removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhpIntegral {
    /// Integral over the retained domain (a partial value when `divergent`).
    pub value: f64,
    pub delta: f64,
    pub window: (f64, f64),
    /// `value(delta / 2) - value(delta)`.
    pub delta_sensitivity: f64,
    /// Set when halving `delta` keeps changing the value: the witness is not
    /// integrable across `alpha_minus`.
    pub divergent: bool,
}

/// Excised-window quadrature of the RHP witness limit over `[0, 1]`.
pub fn rhp_integral(params: &ChannelParams, quad: RhpQuadrature) -> Result<RhpIntegral> {
    if params.alpha() == 0.0 {
        return Ok(RhpIntegral {
            value: 0.0,
            delta: quad.delta,
            window: (1.0, 1.0),
            delta_sensitivity: 0.0,
            divergent: false,
        });
    }
    let am = params.alpha_minus();
    let value = excised(params, am, quad.delta, quad.abs_tol)?;
    let halved = excised(params, am, 0.5 * quad.delta, quad.abs_tol)?;
    let sensitivity = halved - value;
    Ok(RhpIntegral {
        value,
        delta: quad.delta,
        window: ((am - quad.delta).max(0.0), (am + quad.delta).min(1.0)),
        delta_sensitivity: sensitivity,
        divergent: sensitivity.abs() > 1e-3 * value.abs().max(1e-3),
    })
}

fn excised(params: &ChannelParams, am: f64, delta: f64, tol: f64) -> Result<f64> {
    let g = |p: f64| rhp_witness_limit(params, p).unwrap_or(0.0);
    let lo = (am - delta).max(0.0);
    let hi = (am + delta).min(1.0);
    let left = adaptive_simpson(g, 0.0, lo, tol);
    let right = adaptive_simpson(g, hi, 1.0, tol);
    Ok(left.value + right.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_channel, evolve, kraus_full, kraus_special};
    use crate::sampling::{random_matrix, random_state, rng};
    use crate::weyl::WeylIndex;
    use rand::Rng;

    fn params(d: usize, a: f64) -> ChannelParams {
        ChannelParams::new(d, a).unwrap()
    }

    fn spec(d: usize, a: f64, b: f64, s: f64) -> IntermediateSpec {
        IntermediateSpec::new(params(d, a), b, s).unwrap()
    }

    #[test]
    fn identity_channel_choi() {
        let ks = kraus_special(&params(2, 0.3), 0.0).unwrap();
        let c = choi_from_kraus(&ks).unwrap();
        let s = c.spectrum().unwrap();
        assert!((s.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!(s.eigenvalues[1..].iter().all(|x| x.abs() < 1e-12));
        assert!(superop_from_kraus(&ks).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn choi_rejects_incomplete_sets() {
        let ks = kraus_full(2, 0.5, &[0.0, -1.0, -1.0, -1.0]).unwrap();
        assert!(matches!(choi_from_kraus(&ks), Err(Error::IncompleteKraus(_))));
    }

    #[test]
    fn special_channel_choi_spectrum() {
        for (d, a, p) in [(3, 0.5, 0.4), (3, 0.9, 0.95), (4, 0.2, 0.7)] {
            let pr = params(d, a);
            let c = choi_from_kraus(&kraus_special(&pr, p).unwrap()).unwrap();
            let g = pr.g(p);
            let df = d as f64;
            let mut expect = vec![1.0 + (df - 1.0) * g];
            expect.extend(std::iter::repeat_n(1.0 - g, d - 1));
            expect.extend(std::iter::repeat_n(0.0, d * d - d));
            let expect = Spectrum::new(expect);
            assert!(c.spectrum().unwrap().max_deviation(&expect) < 1e-12);
        }
    }

    #[test]
    fn choi_matches_definition_and_reshuffle() {
        let mut r = rng(21);
        for d in 2..=4 {
            let pr = params(d, r.gen_range(0.0..=1.0));
            let ks = kraus_special(&pr, r.gen_range(0.0..=1.0)).unwrap();
            let by_def = choi_from_action(d, |x| ks.apply(x)).unwrap();
            let c = choi_from_kraus(&ks).unwrap();
            assert!(c.matrix().max_abs_diff(&by_def) < 1e-12);
            let sup = superop_from_kraus(&ks);
            assert!(reshuffle(&sup).unwrap().max_abs_diff(c.matrix()) < 1e-12);
            // superoperator acts like the channel
            let x = random_matrix(&mut r, d);
            assert!(apply_superop(&sup, &x).unwrap().max_abs_diff(&ks.apply(&x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn special_superop_is_diagonal_blocks() {
        let pr = params(3, 0.6);
        let sup = superop_from_kraus(&kraus_special(&pr, 0.7).unwrap());
        assert!(sup.is_diagonal(1e-14));
        let g = pr.g(0.7);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { g };
                assert!((sup[(3 * i + j, 3 * i + j)] - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn general_superop_inverse() {
        let lam = vec![0.0; 9];
        let ks = kraus_full(3, 0.4, &lam).unwrap();
        let sup = superop_from_kraus(&ks);
        assert!(!sup.is_diagonal(1e-12));
        let inv = invert_superop(&sup).unwrap();
        assert!((&sup * &inv).max_abs_diff(&ComplexMatrix::identity(9)) < 1e-10);
    }

    #[test]
    fn qubit_intermediate_choi_layout() {
        let sp = spec(2, 0.7, 0.2, 0.6);
        let c = intermediate_choi(&sp).unwrap();
        let pr = params(2, 0.7);
        let ratio = (1.0 - pr.kappa(0.6).unwrap()) / (1.0 - pr.kappa(0.2).unwrap());
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(0, 0)] = C64::new(1.0, 0.0);
        expect[(3, 3)] = C64::new(1.0, 0.0);
        expect[(0, 3)] = C64::new(ratio, 0.0);
        expect[(3, 0)] = C64::new(ratio, 0.0);
        assert!(c.matrix().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn qutrit_intermediate_choi_layout() {
        let sp = spec(3, 0.5, 0.3, 0.9);
        let c = intermediate_choi(&sp).unwrap();
        let r = sp.ratio().unwrap();
        for row in 0..9 {
            for col in 0..9 {
                let on = [0, 4, 8].contains(&row) && [0, 4, 8].contains(&col);
                let expect = match (on, row == col) {
                    (false, _) => 0.0,
                    (true, true) => 1.0,
                    (true, false) => r,
                };
                assert!((c.matrix()[(row, col)].re - expect).abs() < 1e-14);
            }
        }
        // reshuffle of the superoperator reproduces the same layout
        let via = intermediate_choi_via_superop(&sp).unwrap();
        assert!(via.matrix().max_abs_diff(c.matrix()) < 1e-12);
    }

    #[test]
    fn ratio_and_spectrum_examples() {
        let sp = spec(3, 0.5, 0.85, 1.0);
        let r = sp.ratio().unwrap();
        assert!((r - (-1.0 / 6.0) / (-0.034166666666666)).abs() < 1e-9);
        assert!((r - 4.878).abs() < 1e-3);
        let s = intermediate_eigs(&sp).unwrap();
        assert!((s.eigenvalues[0] - 10.756).abs() < 1e-3);
        assert!((s.min() + 3.878).abs() < 1e-3);
        assert!((s.sum() - 3.0).abs() < 1e-12);

        let same = spec(3, 0.5, 0.4, 0.4);
        assert_eq!(same.ratio().unwrap(), 1.0);
        let s = intermediate_eigs(&same).unwrap();
        assert_eq!(s.eigenvalues[0], 3.0);
        assert!(s.eigenvalues[1..].iter().all(|&x| x == 0.0));
        let c = intermediate_choi(&same).unwrap();
        let id = choi_from_kraus(&kraus_special(&params(3, 0.5), 0.0).unwrap()).unwrap();
        assert!(c.matrix().max_abs_diff(id.matrix()) < 1e-15);
    }

    #[test]
    fn unperturbed_spectrum() {
        for d in 2..=5 {
            for ps in [0.0, 0.25, 0.5, 1.0] {
                let s = intermediate_eigs(&spec(d, 0.0, 0.0, ps)).unwrap();
                let df = d as f64;
                let mut expect = vec![df - (df - 1.0) * ps];
                expect.extend(std::iter::repeat_n(ps, d - 1));
                expect.extend(std::iter::repeat_n(0.0, d * d - d));
                assert!(s.max_deviation(&Spectrum::new(expect)) < 1e-14);
            }
        }
    }

    #[test]
    fn analytic_vs_numeric_spectrum() {
        let mut r = rng(22);
        let mut n = 0;
        while n < 60 {
            let d = r.gen_range(2..=5);
            let a = r.gen_range(0.05..=1.0);
            let x: f64 = r.gen_range(0.0..=1.0);
            let y: f64 = r.gen_range(0.0..=1.0);
            let sp = spec(d, a, x.min(y), x.max(y));
            if params(d, a).g(sp.p_base()).abs() <= 1e-3 {
                continue;
            }
            n += 1;
            let analytic = intermediate_eigs(&sp).unwrap();
            let numeric = intermediate_choi(&sp).unwrap().spectrum().unwrap();
            assert!(analytic.max_deviation(&numeric) < 1e-9);
            let via = intermediate_choi_via_superop(&sp).unwrap();
            assert!(via.spectrum().unwrap().max_deviation(&analytic) < 1e-9);
        }
    }

    #[test]
    fn singular_base_is_reported() {
        let pr = params(3, 0.5);
        let am = pr.alpha_minus();
        let sp = IntermediateSpec::new(pr, am, 1.0).unwrap();
        assert!(matches!(sp.ratio(), Err(Error::SingularBase(_))));
        assert!(intermediate_choi(&sp).is_err());
        assert!(intermediate_choi_via_superop(&sp).is_err());
        assert!(is_cp_default(&sp).is_err());
        let near = IntermediateSpec::new(pr, am - 1e-7, 1.0).unwrap();
        assert!(near.is_ill_conditioned());
        assert!(IntermediateSpec::new(pr, 0.6, 0.5).is_err());
    }

    #[test]
    fn cp_examples() {
        for ps in [0.3, 0.5, 0.81, 0.9, 1.0] {
            assert!(is_cp_default(&spec(3, 0.5, 0.3, ps)).unwrap().cp);
        }
        let v = is_cp_default(&spec(3, 0.5, 0.85, 0.95)).unwrap();
        assert!(!v.cp && v.min_eigenvalue < 0.0);
        assert!(is_cp_default(&spec(3, 0.5, 0.85, 0.85)).unwrap().cp);
    }

    #[test]
    fn trace_norm_witnesses_cp() {
        let mut r = rng(23);
        for _ in 0..100 {
            let d = r.gen_range(2..=4);
            let a = r.gen_range(0.0..=1.0);
            let x: f64 = r.gen_range(0.0..=1.0);
            let y: f64 = r.gen_range(0.0..=1.0);
            let sp = spec(d, a, x.min(y), x.max(y));
            if params(d, a).g(sp.p_base()).abs() <= 1e-3 {
                continue;
            }
            let norm = intermediate_choi(&sp).unwrap().normalized_trace_norm().unwrap();
            let cp = is_cp_default(&sp).unwrap().cp;
            assert_eq!(cp, (norm - 1.0).abs() < 1e-10, "norm {norm}");
        }
        // NCP example: (10.756 + 2 * 3.878) / 3
        let norm = intermediate_choi(&spec(3, 0.5, 0.85, 1.0))
            .unwrap()
            .normalized_trace_norm()
            .unwrap();
        let analytic = intermediate_eigs(&spec(3, 0.5, 0.85, 1.0)).unwrap().abs_sum() / 3.0;
        assert!((norm - analytic).abs() < 1e-10);
        assert!((norm - 6.17).abs() < 1e-2);
    }

    #[test]
    fn divisibility_of_superoperators() {
        let mut r = rng(24);
        for _ in 0..30 {
            let d = r.gen_range(2..=4);
            let pr = params(d, r.gen_range(0.0..=1.0));
            let x: f64 = r.gen_range(0.0..=1.0);
            let y: f64 = r.gen_range(0.0..=1.0);
            let sp = IntermediateSpec::new(pr, x.min(y), x.max(y)).unwrap();
            if pr.g(sp.p_base()).abs() <= 1e-6 {
                continue;
            }
            let inter = reshuffle(intermediate_choi(&sp).unwrap().matrix()).unwrap();
            let base = superop_from_kraus(&kraus_special(&pr, sp.p_base()).unwrap());
            let star = superop_from_kraus(&kraus_special(&pr, sp.p_star()).unwrap());
            assert!((&inter * &base).max_abs_diff(&star) < 1e-10);
        }
    }

    #[test]
    fn intermediate_map_actions() {
        let mut r = rng(25);
        let diag = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.2, 0.5, 0.3])).unwrap();
        let sp = spec(3, 0.5, 0.85, 1.0);
        assert_eq!(apply_intermediate(&sp, &diag).unwrap(), diag);

        let pr = params(3, 0.5);
        let am = pr.alpha_minus();
        let rho = random_state(&mut r, 3);
        let to_root = IntermediateSpec::new(pr, 0.2, am).unwrap();
        let out = apply_intermediate_matrix(&to_root, rho.matrix()).unwrap();
        assert!(out.max_off_diagonal() < 1e-14);

        for _ in 0..30 {
            let d = r.gen_range(2..=5);
            let pr = params(d, r.gen_range(0.0..=1.0));
            let x: f64 = r.gen_range(0.0..=1.0);
            let y: f64 = r.gen_range(0.0..=1.0);
            let sp = IntermediateSpec::new(pr, x.min(y), x.max(y)).unwrap();
            if pr.g(sp.p_base()).abs() <= 1e-6 {
                continue;
            }
            let rho = random_state(&mut r, d);
            let evolved = evolve(&pr, sp.p_base(), &rho).unwrap();
            let composed = apply_intermediate(&sp, &evolved).unwrap();
            let direct = evolve(&pr, sp.p_star(), &rho).unwrap();
            assert!(composed.matrix().max_abs_diff(direct.matrix()) < 1e-12);
            let m = random_matrix(&mut r, d);
            let a = apply_intermediate_matrix(&sp, &m).unwrap();
            let b = apply_intermediate_kraus_form(&sp, &m).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12 * sp.ratio().unwrap().abs().max(1.0));
        }
        let _ = apply_channel(&pr, 0.5, rho.matrix()).unwrap();
        let _ = WeylIndex::new(3, 0, 0).unwrap();
    }

    #[test]
    fn rhp_witness_behaviour() {
        let pr = params(3, 0.5);
        assert!(rhp_witness(&pr, 0.5, 1e-6).unwrap().abs() < 1e-8);
        let g = rhp_witness(&pr, 0.9, 1e-6).unwrap();
        assert!(g > 0.0);
        // one-sided difference quotient converges to the limit at first order
        let limit = rhp_witness_limit(&pr, 0.9).unwrap();
        let e1 = (rhp_witness(&pr, 0.9, 1e-3).unwrap() - limit).abs();
        let e2 = (rhp_witness(&pr, 0.9, 5e-4).unwrap() - limit).abs();
        assert!((e1 / e2 - 2.0).abs() < 0.1, "ratio {}", e1 / e2);
        // Richardson extrapolation removes the first-order term
        let rich = 2.0 * rhp_witness(&pr, 0.9, 5e-4).unwrap() - rhp_witness(&pr, 0.9, 1e-3).unwrap();
        assert!((rich - limit).abs() < 1e-5 * limit);
        assert!(rhp_witness(&pr, pr.alpha_minus(), 1e-6).is_err());
        assert!(rhp_witness(&pr, 0.5, 0.0).is_err());
    }

    #[test]
    fn rhp_integral_behaviour() {
        let zero = rhp_integral(&params(3, 0.0), RhpQuadrature::default()).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(!zero.divergent);
        let half = rhp_integral(&params(3, 0.5), RhpQuadrature::default()).unwrap();
        assert!(half.value > 0.0);
        // logarithmic divergence: halving delta adds about 2 (d-1)/d ln 2
        assert!(half.divergent);
        assert!((half.delta_sensitivity - 4.0 / 3.0 * 2f64.ln()).abs() < 1e-3);
        // closed form of the retained integral: 2 (d-1)/d ln|G(1) / G(am + delta)|
        let pr = params(3, 0.5);
        let am = pr.alpha_minus();
        let exact = 4.0 / 3.0 * (pr.g(1.0) / pr.g(am + 1e-4)).abs().ln();
        assert!((half.value - exact).abs() < 1e-7);
        let mut last = 0.0;
        for a in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let v = rhp_integral(&params(3, a), RhpQuadrature::default()).unwrap().value;
            assert!(v > last);
            last = v;
        }
    }
}
