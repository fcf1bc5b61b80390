// HCLA, MUB-restricted BLP and RHP measures across alpha.

use weylchan::reps::RhpQuadrature;
use weylchan::{blp_measure, hcla_measure, mub_family, rhp_integral, ChannelParams, Result};

fn run() -> Result<()> {
    let d = 3;
    let fam = mub_family(d)?;
    println!("alpha  hcla_closed  hcla_numeric  blp(alpha/d)  blp_numeric  rhp(excised)");
    for k in 0..=5 {
        let alpha = k as f64 * 0.2;
        let params = ChannelParams::new(d, alpha)?;
        let h = hcla_measure(&params);
        let b = blp_measure(&params, &fam)?;
        let r = rhp_integral(&params, RhpQuadrature::default())?;
        println!(
            "{alpha:.1}  {:.9}  {:.9}  {:.9}  {:.9}  {:.4}{}",
            h.closed_form,
            h.numeric,
            b.closed_form,
            b.numeric,
            r.value,
            if r.divergent { " (divergent)" } else { "" }
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
