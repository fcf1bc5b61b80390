// Kraus operators of the special channel, its Choi matrix and
// superoperator, and the reshuffle linking them.

use weylchan::channel::kraus_diagonal_perturbed;
use weylchan::channel::special_perturbations;
use weylchan::{
    choi_from_kraus, kraus_special, reshuffle, superop_from_kraus, ChannelParams, DensityMatrix,
    Result, C64,
};

fn run() -> Result<()> {
    let params = ChannelParams::new(3, 0.5)?;
    let p = 0.6;
    let ks = kraus_special(&params, p)?;
    println!(
        "{} Kraus operators, completeness deviation {:.1e}",
        ks.operators().len(),
        ks.completeness_deviation()
    );

    let choi = choi_from_kraus(&ks)?;
    let superop = superop_from_kraus(&ks);
    println!(
        "reshuffle(superop) vs Choi: {:.1e}",
        reshuffle(&superop)?.max_abs_diff(choi.matrix())
    );
    println!("Choi spectrum: {:?}", choi.spectrum()?.eigenvalues);
    println!("G({p}) = {:.6}", params.g(p));

    // the same channel from the d-operator parameterization
    let lambdas = special_perturbations(&params, p);
    let alt = kraus_diagonal_perturbed(3, p, &lambdas)?;
    let s = 1.0 / 3f64.sqrt();
    let plus = DensityMatrix::pure(&[C64::new(s, 0.0); 3])?;
    let diff = ks.apply(plus.matrix())?.max_abs_diff(&alt.apply(plus.matrix())?);
    println!("perturbed-weight form agrees on |+>: {diff:.1e}");
    Ok(())
}

fn main() -> Result<()> {
    run()
}
