//! Adaptive Simpson quadrature.

/// Absolute tolerance used by the measure integrals.
pub const DEFAULT_ABS_TOL: f64 = 1e-9;

/// Cap on the number of subintervals (2^20).
pub const MAX_INTERVALS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
    /// False when the interval cap was hit before the tolerance was met.
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
            converged: true,
        };
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let mut stack = vec![Segment {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
        tol,
        depth: 0,
    }];
    let mut value = 0.0;
    let mut err = 0.0;
    let mut intervals = 1usize;
    let mut converged = true;

    while let Some(s) = stack.pop() {
        let m = 0.5 * (s.a + s.b);
        let lm = 0.5 * (s.a + m);
        let rm = 0.5 * (m + s.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(s.a, m, s.fa, flm, s.fm);
        let right = simpson(m, s.b, s.fm, frm, s.fb);
        let delta = left + right - s.whole;
        let can_split = intervals < MAX_INTERVALS && s.depth < 60;
        if delta.abs() <= 15.0 * s.tol || !can_split {
            if delta.abs() > 15.0 * s.tol {
                converged = false;
            }
            value += left + right + delta / 15.0;
            err += delta.abs() / 15.0;
        } else {
            intervals += 1;
            let half = 0.5 * s.tol;
            stack.push(Segment {
                a: m,
                b: s.b,
                fa: s.fm,
                fm: frm,
                fb: s.fb,
                whole: right,
                tol: half,
                depth: s.depth + 1,
            });
            stack.push(Segment {
                a: s.a,
                b: m,
                fa: s.fa,
                fm: flm,
                fb: s.fm,
                whole: left,
                tol: half,
                depth: s.depth + 1,
            });
        }
    }
    Integral {
        value,
        error_estimate: err,
        intervals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = adaptive_simpson(|x| 3.0 * x * x * x - x + 2.0, -1.0, 2.0, 1e-12);
        // antiderivative 3x^4/4 - x^2/2 + 2x
        let exact = (12.0 - 2.0 + 4.0) - (0.75 - 0.5 - 2.0);
        assert!((r.value - exact).abs() < 1e-12 && r.converged);
    }

    #[test]
    fn smooth_transcendental() {
        let r = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-10);
        assert!((r.value - 2.0).abs() < 1e-10);
        let r = adaptive_simpson(|x| 1.0 / x, 1e-3, 1.0, 1e-10);
        assert!((r.value - 1000f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(adaptive_simpson(|x| x, 0.5, 0.5, 1e-9).value, 0.0);
    }
}
