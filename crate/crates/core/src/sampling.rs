//! Seeded random matrices, states and channels for randomized checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{hermitian_eigen, ComplexMatrix, DensityMatrix, C64};

pub type TrialRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in [-1, 1).
pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Full-rank mixed state `G G^dagger / tr(G G^dagger)`.
pub fn random_state(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let g = random_matrix(rng, n);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let m = m.scale_real(1.0 / tr);
    // exact Hermitian symmetrization against round-off
    let m = (&m + &m.adjoint()).scale_real(0.5);
    DensityMatrix::new(m).expect("G G^dagger is a valid state")
}

pub fn random_pure_state(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let psi: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    DensityMatrix::pure(&psi).expect("nonzero vector")
}

/// Random complete Kraus operators `M_a S^{-1/2}` with `S = sum M_a^dagger M_a`.
pub fn random_kraus(rng: &mut impl Rng, n: usize, count: usize) -> Vec<ComplexMatrix> {
    let ms: Vec<ComplexMatrix> = (0..count).map(|_| random_matrix(rng, n)).collect();
    let mut s = ComplexMatrix::zeros(n, n);
    for m in &ms {
        s = &s + &(&m.adjoint() * m);
    }
    let s = (&s + &s.adjoint()).scale_real(0.5);
    let inv_sqrt = hermitian_eigen(&s)
        .expect("Gram matrix is Hermitian")
        .reconstruct_with(|x| 1.0 / x.sqrt());
    ms.iter().map(|m| m * &inv_sqrt).collect()
}
