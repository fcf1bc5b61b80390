// Mutually unbiased bases and the trace distance of evolved pairs.

use weylchan::measures::{
    blp_trace_distance_oracle, circulant_difference_spectrum, lemma1_check,
};
use weylchan::{blp_trace_distance, mub_family, pair_iterator, verify_mub, ChannelParams, Result};

fn run() -> Result<()> {
    for d in [2, 3, 4, 5] {
        let fam = mub_family(d)?;
        let check = verify_mub(&fam);
        println!(
            "d={d}: {} bases{}, valid={}, worst deviation {:.1e}",
            fam.count(),
            if fam.is_partial() { " (partial)" } else { "" },
            check.valid,
            check.worst_deviation
        );
    }

    let params = ChannelParams::new(3, 0.4)?;
    let fam = mub_family(3)?;
    let am = params.alpha_minus();
    for pair in pair_iterator(&fam, false).filter(|p| p.id.first == 0 && p.id.second == 1) {
        let closed: Vec<String> = [0.0, am, 1.0]
            .iter()
            .map(|&p| format!("{:.4}", blp_trace_distance(&params, p, &pair)))
            .collect();
        let oracle = blp_trace_distance_oracle(&params, 1.0, &pair)?;
        println!("pair {}: D(0, alpha_minus, 1) = {closed:?}, oracle D(1) = {oracle:.4}", pair.id);
    }

    println!("A^2 spectrum d=5 kappa=0.4: {:?}", circulant_difference_spectrum(5, 0.4).eigenvalues);
    println!("squared root-of-unity polynomial at d=6: {:?}", lemma1_check(6).values);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
