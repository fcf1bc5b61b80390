// Decoherence rate, its normalized form, and the rate criterion.

use weylchan::measures::{criterion_agreement, rate_profile};
use weylchan::{is_markovian_rate, ChannelParams, Result};

fn run() -> Result<()> {
    let params = ChannelParams::new(3, 0.8)?;
    let roots = params.g_roots()?;
    println!("alpha_minus = {:.4}, alpha_plus = {:.4}", roots.minus, roots.plus);

    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for s in rate_profile(&params, &grid).samples {
        println!(
            "p={:.1} gamma={:>10} gamma'={:>8}",
            s.p,
            s.gamma.map_or("-".into(), |g| format!("{g:.4}")),
            s.gamma_normalized.map_or("-".into(), |g| format!("{g:.4}")),
        );
    }

    let fine: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    let verdict = is_markovian_rate(&params, &fine);
    println!("markovian: {}, first negative rate at {:?}", verdict.markovian, verdict.first_violation);

    let coarse: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let agreement = criterion_agreement(&params, &coarse)?;
    println!(
        "CP-divisibility vs rate sign: {} cells, {} disagreements",
        agreement.cells,
        agreement.disagreements.len()
    );
    Ok(())
}

fn main() -> Result<()> {
    run()
}
