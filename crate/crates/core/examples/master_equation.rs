// RK4 integration of the master equation straight through alpha_minus.

use weylchan::sampling::{random_state, rng};
use weylchan::{evolve, integrate_master, singularity_report, ChannelParams, Result};

fn run() -> Result<()> {
    let params = ChannelParams::new(3, 0.5)?;
    let rho0 = random_state(&mut rng(7), 3);

    for step in [0.1, 0.05, 0.025] {
        let t = integrate_master(&params, &rho0, 0.0, 0.7, step)?;
        let exact = evolve(&params, 0.7, &rho0)?;
        println!("step {step}: endpoint error {:.3e}", t.endpoint().1.matrix().max_abs_diff(exact.matrix()));
    }

    let t = integrate_master(&params, &rho0, 0.0, 1.0, 1e-4)?;
    let exact = evolve(&params, 1.0, &rho0)?;
    let c = t.conservation()?;
    println!(
        "through the pole: {} samples, endpoint error {:.2e}, min eigenvalue {:.2e}",
        t.samples.len(),
        t.endpoint().1.matrix().max_abs_diff(exact.matrix()),
        c.min_eigenvalue
    );

    let rep = singularity_report(&params, &rho0, 1e-3)?;
    println!(
        "at alpha_minus={:.6}: off-diagonal {:.1e}, fixed-point residual {:.1e}, revival factor {:.4}",
        rep.alpha_minus, rep.off_diagonal, rep.fixed_point_residual, rep.revival_factor
    );
    Ok(())
}

fn main() -> Result<()> {
    run()
}
