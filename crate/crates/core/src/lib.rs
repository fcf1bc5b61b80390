//! Non-Markovianity of a perturbed generalized Weyl channel family.
//!
//! The library builds the channel from Weyl operators, represents it as a
//! Choi matrix and superoperator, tests complete positivity of its
//! intermediate maps, and evaluates the rate-based (HCLA), trace-distance
//! (BLP) and Choi-norm (RHP) measures. Closed forms are paired with
//! numerical routes throughout so each can be checked against the other.

pub mod channel;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod figures;
pub mod linalg;
pub mod measures;
pub mod mubs;
pub mod quadrature;
pub mod reps;
pub mod sampling;
pub mod verify;
pub mod weyl;

pub use channel::{
    apply_channel, evolve, kraus_diagonal_perturbed, kraus_full, kraus_special,
    kraus_uniform_weyl, ChannelParams, GRoots, KrausSet,
};
pub use dynamics::{integrate_master, singularity_report, SingularityReport, Trajectory};
pub use error::{Error, Result};
pub use linalg::{
    hermitian_eigs, kron, reshuffle, trace_distance, trace_norm, unvectorize, vectorize,
    ComplexMatrix, DensityMatrix, Spectrum, C64,
};
pub use measures::{
    blp_measure, blp_trace_distance, circulant_difference_spectrum, decoherence_rate,
    gamma_normalized, hcla_measure, is_markovian_rate, lemma1_check, sigma_rate, BlpResult,
    HclaResult, RateProfile,
};
pub use mubs::{mub_family, pair_iterator, verify_mub, MubFamily, PairId};
pub use reps::{
    apply_intermediate, choi_from_kraus, intermediate_choi, intermediate_eigs, is_cp,
    rhp_integral, rhp_witness, superop_from_kraus, ChoiMatrix, IntermediateSpec,
};
pub use weyl::{weyl, weyl_basis, WeylIndex};

/// Version string echoed into CSV metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
