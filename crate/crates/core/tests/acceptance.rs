//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always printed.

use std::process::Command;
use std::time::Instant;

use rand::Rng;

use weylchan::channel::ChannelParams;
use weylchan::dynamics::{integrate_master, singularity_report};
use weylchan::linalg::{ComplexMatrix, DensityMatrix, Spectrum, C64};
use weylchan::measures::{
    blp_measure, blp_trace_distance, blp_trace_distance_oracle, circulant_difference_spectrum,
    circulant_difference_spectrum_numeric, criterion_agreement, decoherence_rate, hcla_measure,
    lemma1_check,
};
use weylchan::mubs::{mub_family, pair_iterator};
use weylchan::reps::{intermediate_choi, intermediate_choi_via_superop, intermediate_eigs, IntermediateSpec};
use weylchan::sampling::{random_state, rng};
use weylchan::evolve;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(d: usize, a: f64) -> ChannelParams {
    ChannelParams::new(d, a).expect("valid parameters")
}

fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| (start + i as f64 * step).min(end)).collect()
}

fn c1_roots() -> Outcome {
    let mut detail = Vec::new();
    for (a, minus, plus) in [(0.5, 0.814, 3.686), (0.8, 0.701, 2.674)] {
        let r = params(3, a).g_roots().map_err(|e| e.to_string())?;
        ensure((r.minus - minus).abs() <= 0.005 && (r.plus - plus).abs() <= 0.005, || {
            format!("alpha={a}: got ({}, {})", r.minus, r.plus)
        })?;
        detail.push(format!("alpha={a}: ({:.4}, {:.4})", r.minus, r.plus));
    }
    Ok(detail.join("; "))
}

/// `<Phi|C|Phi> - <v|C|v>` on the numerically built Choi matrix, with
/// `Phi` the maximally entangled vector and `v = (|00> - |11>)/sqrt 2`:
/// the gap between `lambda_0` and `lambda_1` read off the Kraus-route Choi.
fn numeric_gap(pr: ChannelParams, pb: f64, ps: f64) -> f64 {
    let d = pr.dim();
    let spec = IntermediateSpec::new(pr, pb, ps).unwrap();
    let c = intermediate_choi_via_superop(&spec).unwrap();
    let mut phi = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        phi[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    v[0] = C64::new(0.5f64.sqrt(), 0.0);
    v[d + 1] = C64::new(-(0.5f64.sqrt()), 0.0);
    let form = |x: &[C64]| -> f64 {
        let col = ComplexMatrix::column(x);
        (&(&col.adjoint() * c.matrix()) * &col)[(0, 0)].re
    };
    form(&phi) - form(&v)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn c2_cp_spectrum() -> Outcome {
    let pr = params(3, 0.5);
    let am = pr.alpha_minus();
    let mut min_eig = f64::INFINITY;
    let mut pts = grid(0.3, 1.0, 1e-3);
    pts.push(am);
    for &ps in &pts {
        let spec = IntermediateSpec::new(pr, 0.3, ps).unwrap();
        let analytic = intermediate_eigs(&spec).unwrap();
        let numeric = intermediate_choi(&spec).unwrap().spectrum().unwrap();
        min_eig = min_eig.min(analytic.min()).min(numeric.min());
    }
    ensure(min_eig >= -1e-10, || format!("negative eigenvalue {min_eig:e}"))?;
    let at_root = intermediate_eigs(&IntermediateSpec::new(pr, 0.3, am).unwrap()).unwrap();
    let dev = at_root.eigenvalues[..3].iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    ensure(dev <= 1e-9, || format!("eigenvalues at alpha_minus deviate from 1 by {dev:e}"))?;
    let cross = bisect(0.31, 0.99, |ps| numeric_gap(pr, 0.3, ps));
    ensure((cross - am).abs() <= 1e-9, || format!("crossing at {cross}, root {am}"))?;
    let flat = params(3, 0.0);
    // signum(0.0) is +1, so map the zero gap at p* = 1 onto the negative side.
    let cross0 = bisect(0.5, 1.0, |ps| numeric_gap(flat, 0.0, ps).max(0.0) - 1e-300);
    ensure((cross0 - 1.0).abs() <= 1e-9, || format!("alpha=0 crossing at {cross0}"))?;
    Ok(format!(
        "min eigenvalue {min_eig:.3e}; crossing {cross:.12} vs alpha_minus {am:.12}; alpha=0 crossing {cross0:.12}"
    ))
}

fn c3_ncp_spectrum() -> Outcome {
    let pr = params(3, 0.5);
    let mut worst: f64 = f64::NEG_INFINITY;
    for ps in grid(0.851, 1.0, 1e-3) {
        let spec = IntermediateSpec::new(pr, 0.85, ps).unwrap();
        let numeric = intermediate_choi(&spec).unwrap().spectrum().unwrap();
        let e = &numeric.eigenvalues;
        let (l1, l2) = (e[e.len() - 1], e[e.len() - 2]);
        ensure((l1 - l2).abs() <= 1e-9, || format!("p*={ps}: lambda_1 {l1} != lambda_2 {l2}"))?;
        let analytic = 1.0 - spec.ratio().unwrap();
        ensure((analytic - l1).abs() <= 1e-9, || format!("p*={ps}: analytic {analytic} vs {l1}"))?;
        ensure(l1 < 0.0, || format!("p*={ps}: lambda_1 = {l1} not negative"))?;
        worst = worst.max(l1);
    }
    Ok(format!("lambda_1 = lambda_2 < 0 on (0.85, 1], largest {worst:.4e}"))
}

fn c4_spectrum_oracle() -> Outcome {
    let mut r = rng(4);
    let (mut worst, mut trace_dev, mut n) = (0.0f64, 0.0f64, 0);
    while n < 200 {
        let d = r.gen_range(2..=6);
        let pr = params(d, r.gen_range(0.05..=1.0));
        let x: f64 = r.gen_range(0.0..=1.0);
        let y: f64 = r.gen_range(0.0..=1.0);
        let (pb, ps) = (x.min(y), x.max(y));
        if pr.g(pb).abs() <= 1e-3 {
            continue;
        }
        n += 1;
        let spec = IntermediateSpec::new(pr, pb, ps).unwrap();
        let choi = intermediate_choi_via_superop(&spec).unwrap();
        let analytic = intermediate_eigs(&spec).unwrap();
        worst = worst.max(analytic.max_deviation(&choi.spectrum().unwrap()));
        trace_dev = trace_dev.max((choi.matrix().trace().re - d as f64).abs());
    }
    ensure(worst <= 1e-9 && trace_dev <= 1e-9, || {
        format!("max eigen deviation {worst:e}, trace deviation {trace_dev:e}")
    })?;
    Ok(format!("200 trials, max |analytic - numeric| {worst:.3e}, max trace deviation {trace_dev:.3e}"))
}

fn c5_criteria() -> Outcome {
    let g = grid(0.0, 1.0, 0.02);
    let mut cells = 0;
    for d in [2, 3, 4] {
        for a in [0.2, 0.5, 0.8] {
            let rep = criterion_agreement(&params(d, a), &g).map_err(|e| e.to_string())?;
            ensure(rep.disagreements.is_empty(), || {
                format!("d={d} alpha={a}: disagreements at {:?}", &rep.disagreements[..rep.disagreements.len().min(5)])
            })?;
            cells += rep.cells;
        }
    }
    Ok(format!("{cells} (p_base, p_star) cells, all consistent"))
}

fn c6_rates() -> Outcome {
    let pr = params(3, 0.8);
    let am = pr.alpha_minus();
    let pts = grid(0.0, 1.0, 1e-3);
    let signs: Vec<(f64, f64)> = pts
        .iter()
        .filter_map(|&p| decoherence_rate(&pr, p).ok().map(|g| (p, g)))
        .collect();
    let first_neg = signs.iter().find(|(_, g)| *g < 0.0).map(|x| x.0).ok_or("no negative rate")?;
    let last_pos = signs.iter().rev().find(|(_, g)| *g >= 0.0).map(|x| x.0).ok_or("no positive rate")?;
    ensure(last_pos < am && first_neg > am && first_neg - last_pos <= 1e-3 + 1e-12, || {
        format!("sign change between {last_pos} and {first_neg}, alpha_minus {am}")
    })?;
    ensure(signs.iter().filter(|(p, _)| *p > am).all(|(_, g)| *g < 0.0), || {
        "rate not negative through p = 1".into()
    })?;
    let flat = params(3, 0.0);
    let worst = pts
        .iter()
        .filter(|&&p| p < 1.0)
        .map(|&p| (decoherence_rate(&flat, p).unwrap() - 1.0 / (3.0 * (1.0 - p))).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("alpha=0 rate deviates by {worst:e}"))?;
    Ok(format!("sign flips in ({last_pos}, {first_neg}] around alpha_minus {am:.6}; alpha=0 max deviation {worst:.1e}"))
}

fn c7_hcla() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=5 {
        for k in 1..=10 {
            let h = hcla_measure(&params(d, k as f64 / 10.0));
            ensure(h.converged, || format!("d={d} alpha={}: quadrature did not converge", k as f64 / 10.0))?;
            worst = worst.max((h.closed_form - h.numeric).abs());
        }
    }
    ensure(worst <= 1e-6, || format!("closed form vs quadrature {worst:e}"))?;
    let vals: Vec<f64> = (1..=10).map(|k| hcla_measure(&params(3, k as f64 / 10.0)).closed_form).collect();
    ensure(vals.windows(2).all(|w| w[1] >= w[0]), || format!("not monotone: {vals:?}"))?;
    Ok(format!("max |closed - quadrature| {worst:.3e}; d=3 nondecreasing from {:.4} to {:.4}", vals[0], vals[9]))
}

fn c8_blp() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2, 3, 5, 7] {
        let fam = mub_family(d).unwrap();
        for k in 1..=10 {
            let a = k as f64 / 10.0;
            let r = blp_measure(&params(d, a), &fam).map_err(|e| e.to_string())?;
            worst = worst.max((r.numeric - a / d as f64).abs());
            if d == 3 {
                let hits = r
                    .per_pair
                    .iter()
                    .filter(|(id, v)| id.basis > 0 && (v - a / 3.0).abs() <= 1e-6)
                    .count();
                ensure(hits == 9, || format!("alpha={a}: {hits} of 9 pairs attain alpha/3"))?;
            }
        }
    }
    ensure(worst <= 1e-6, || format!("numeric vs alpha/d {worst:e}"))?;
    Ok(format!("max |numeric - alpha/d| {worst:.3e}; all 9 qutrit pairs attain it"))
}

fn c9_trace_distance() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    let pts: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
    for d in [2, 3, 5, 7] {
        let fam = mub_family(d).unwrap();
        for a in [0.0, 0.4, 1.0] {
            let pr = params(d, a);
            for pair in pair_iterator(&fam, false) {
                pairs += 1;
                for &p in &pts {
                    let closed = blp_trace_distance(&pr, p, &pair);
                    let oracle = blp_trace_distance_oracle(&pr, p, &pair).map_err(|e| e.to_string())?;
                    worst = worst.max((closed - oracle).abs());
                    if pair.computational {
                        ensure(closed == 1.0, || format!("computational pair gives {closed}"))?;
                    } else if a == 0.0 {
                        ensure(closed == 1.0 - p, || format!("alpha=0 gives {closed} at p={p}"))?;
                    }
                }
            }
        }
    }
    ensure(worst <= 1e-10, || format!("closed vs oracle {worst:e}"))?;
    Ok(format!("{pairs} pair/alpha combinations x 20 points, max deviation {worst:.3e}"))
}

fn c10_root_sums() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=12 {
        let l = lemma1_check(d);
        ensure(l.holds, || format!("d={d}: deviation {:e}", l.max_deviation))?;
        worst = worst.max(l.max_deviation);
        for kappa in [0.0, 0.4, 1.0] {
            let mut e = vec![(1.0 - kappa) * (1.0 - kappa); 2];
            e.extend(std::iter::repeat_n(0.0, d - 2));
            let expect = Spectrum::new(e);
            let numeric = circulant_difference_spectrum_numeric(d, kappa).map_err(|e| e.to_string())?;
            let dev = circulant_difference_spectrum(d, kappa)
                .max_deviation(&expect)
                .max(numeric.max_deviation(&expect));
            ensure(dev <= 1e-9, || format!("d={d} kappa={kappa}: deviation {dev:e}"))?;
            worst = worst.max(dev);
        }
    }
    Ok(format!("d = 2..12, worst deviation {worst:.3e}"))
}

fn c11_dynamics() -> Outcome {
    let mut r = rng(11);
    let mut endpoint: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for (d, a) in [(2, 0.5), (3, 0.5), (3, 0.8), (4, 1.0)] {
        let pr = params(d, a);
        let rho = random_state(&mut r, d);
        let t = integrate_master(&pr, &rho, 0.0, 1.0, 1e-4).map_err(|e| e.to_string())?;
        let c = t.conservation().map_err(|e| e.to_string())?;
        ensure(c.max_trace_error <= 1e-9 && c.max_hermiticity_error <= 1e-9 && c.min_eigenvalue >= -1e-8, || {
            format!("d={d} alpha={a}: {c:?}")
        })?;
        min_eig = min_eig.min(c.min_eigenvalue);
        let exact = evolve(&pr, 1.0, &rho).unwrap();
        endpoint = endpoint.max(t.endpoint().1.matrix().max_abs_diff(exact.matrix()));
    }
    ensure(endpoint <= 1e-8, || format!("endpoint error {endpoint:e}"))?;

    let pr = params(3, 0.5);
    let rho = random_state(&mut r, 3);
    let exact = evolve(&pr, 1.0, &rho).unwrap();
    let errs: Vec<f64> = [8e-4, 4e-4, 2e-4, 1e-4]
        .iter()
        .map(|&h| {
            let t = integrate_master(&pr, &rho, 0.0, 1.0, h).unwrap();
            t.endpoint().1.matrix().max_abs_diff(exact.matrix())
        })
        .collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(ratios.iter().all(|x| (12.0..=20.0).contains(x)), || format!("step ratios {ratios:?}"))?;

    let diag = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.6, 0.3, 0.1])).unwrap();
    let t = integrate_master(&pr, &diag, 0.0, 1.0, 1e-3).unwrap();
    let drift = t
        .samples
        .iter()
        .map(|(_, s)| s.matrix().max_abs_diff(diag.matrix()))
        .fold(0.0, f64::max);
    ensure(drift == 0.0, || format!("diagonal state drifts by {drift:e}"))?;
    let rep = singularity_report(&pr, &rho, 1e-4).map_err(|e| e.to_string())?;
    ensure(rep.is_diagonal && rep.fixed_point_residual <= 1e-10, || format!("{rep:?}"))?;
    Ok(format!(
        "endpoint error {endpoint:.2e}, min eigenvalue {min_eig:.3}, step-halving ratios {:?}, fixed-point residual {:.1e}",
        ratios.iter().map(|x| (x * 10.0).round() / 10.0).collect::<Vec<_>>(),
        rep.fixed_point_residual
    ))
}

fn c12_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_weylchan");
    let runs: [&[&str]; 4] = [
        &["spectrum", "--d", "3", "--alpha", "0.5", "--p-base", "0.3", "--grid", "0.3:1:0.01"],
        &["rates", "--d", "3", "--alpha", "0.8", "--grid", "0:1:0.01"],
        &["measures", "--d", "3", "--grid", "0:1:0.1"],
        &["distance", "--d", "3", "--alpha", "0.4", "--pair", "1:0:1", "--grid", "0:1:0.01"],
    ];
    let mut bytes = 0;
    for args in runs {
        let once = || -> Result<Vec<u8>, String> {
            let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
            ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
            Ok(out.stdout)
        };
        let (a, b) = (once()?, once()?);
        ensure(a == b, || format!("{} output differs between runs", args[0]))?;
        ensure(!a.contains(&b'\r'), || "CR in output".into())?;
        bytes += a.len();
    }
    Ok(format!("4 commands x 2 runs byte-identical ({bytes} bytes)"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("roots", c1_roots),
        ("CP intermediate spectrum", c2_cp_spectrum),
        ("NCP intermediate spectrum", c3_ncp_spectrum),
        ("analytic vs oracle spectrum", c4_spectrum_oracle),
        ("criterion equivalence", c5_criteria),
        ("decoherence rate sign", c6_rates),
        ("HCLA", c7_hcla),
        ("BLP", c8_blp),
        ("trace distance closed forms", c9_trace_distance),
        ("root-of-unity sums and circulant spectra", c10_root_sums),
        ("dynamics regularity", c11_dynamics),
        ("CLI determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.2}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
