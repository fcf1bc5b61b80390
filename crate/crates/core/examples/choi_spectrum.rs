// Intermediate-map eigenvalues: a CP case, an NCP case, and the
// unperturbed channel.

use weylchan::reps::{intermediate_choi_via_superop, is_cp_default};
use weylchan::{intermediate_choi, intermediate_eigs, ChannelParams, IntermediateSpec, Result};

fn show(params: ChannelParams, p_base: f64, p_star: f64) -> Result<()> {
    let spec = IntermediateSpec::new(params, p_base, p_star)?;
    let eigs = intermediate_eigs(&spec)?;
    let numeric = intermediate_choi(&spec)?.spectrum()?;
    let via = intermediate_choi_via_superop(&spec)?.spectrum()?;
    let verdict = is_cp_default(&spec)?;
    println!(
        "alpha={} p_base={p_base} p_star={p_star}: R={:.4} lambda_0={:.4} lambda_1={:.4} cp={} \
         (oracle dev {:.1e}, superop route dev {:.1e})",
        params.alpha(),
        spec.ratio()?,
        eigs.eigenvalues[0],
        1.0 - spec.ratio()?,
        verdict.cp,
        eigs.max_deviation(&numeric),
        eigs.max_deviation(&via),
    );
    Ok(())
}

fn run() -> Result<()> {
    let params = ChannelParams::new(3, 0.5)?;
    let am = params.alpha_minus();
    println!("alpha_minus = {am:.6}");
    show(params, 0.3, am)?;
    show(params, 0.3, 1.0)?;
    show(params, 0.85, 1.0)?;
    show(ChannelParams::new(3, 0.0)?, 0.0, 0.5)?;
    Ok(())
}

fn main() -> Result<()> {
    run()
}
