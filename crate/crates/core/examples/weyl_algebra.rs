// Weyl operators in dimension 3 and the relations they satisfy.

use weylchan::weyl::RootsOfUnity;
use weylchan::{weyl, weyl_basis, Result, WeylIndex};

fn run() -> Result<()> {
    let d = 3;
    let w = RootsOfUnity::new(d);
    for a in [3, 4, 5] {
        let idx = WeylIndex::from_flat(d, a)?;
        println!("U_{a} = U_({},{}):\n{:?}", idx.k(), idx.l(), weyl(idx));
    }

    let basis = weyl_basis(d)?;
    let mut worst: f64 = 0.0;
    for a in 0..d * d {
        for b in 0..d * d {
            let t = (&basis[a].adjoint() * &basis[b]).trace();
            let expect = if a == b { d as f64 } else { 0.0 };
            worst = worst.max((t.re - expect).abs().max(t.im.abs()));
        }
    }
    println!("max |tr(U_a^dagger U_b) - d delta_ab| = {worst:.2e}");

    // U_kl U_rs = w^(l r) U_{k+r, l+s}
    let (u11, u12) = (&basis[4], &basis[5]);
    let rhs = basis[2 * d].scale(w.pow(1));
    println!("U_(1,1) U_(1,2) = w U_(2,0): deviation {:.2e}", (u11 * u12).max_abs_diff(&rhs));

    // without the adjoint the trace relation breaks
    let t33 = (&basis[3] * &basis[3]).trace();
    let t36 = (&basis[3] * &basis[6]).trace();
    println!("tr(U_3 U_3) = {t33:.3}, tr(U_3 U_6) = {t36:.3}");
    Ok(())
}

fn main() -> Result<()> {
    run()
}
