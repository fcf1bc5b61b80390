//! Unitary Weyl operators `U_kl = sum_m w^(k m) |m><m + l|` with `w = exp(2 pi i / d)`.
//!
//! Flat labels follow `a = d k + l`, so the diagonal (clock) operators are
//! `U_{d i} = U_{i 0}`.
//!
//! Note on orthogonality: the relation that holds for every pair is
//! `tr(U_a^dagger U_b) = d delta_ab`. Without the adjoint it fails at
//! `d = 3`: `tr(U_3 U_3) = 0` while `tr(U_3 U_6) = 3`. The adjointed form is
//! the one implemented and tested here.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Powers of `exp(2 pi i / d)`, tabulated once so large exponents are
/// reduced mod `d` instead of accumulating phase error.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    d: usize,
    table: Vec<C64>,
}

impl RootsOfUnity {
    pub fn new(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        let table = (0..d)
            .map(|k| C64::from_polar(1.0, TAU * k as f64 / d as f64))
            .collect();
        Self { d, table }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `w^n` for any signed `n`.
    pub fn pow(&self, n: i64) -> C64 {
        self.table[n.rem_euclid(self.d as i64) as usize]
    }
}

/// Double index `(k, l)` of a Weyl operator in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylIndex {
    d: usize,
    k: usize,
    l: usize,
}

impl WeylIndex {
    pub fn new(d: usize, k: usize, l: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange {
                name: "d",
                value: d as f64,
                range: "[2, inf)",
            });
        }
        if k >= d || l >= d {
            return Err(Error::OutOfRange {
                name: "weyl index",
                value: k.max(l) as f64,
                range: "[0, d)",
            });
        }
        Ok(Self { d, k, l })
    }

    pub fn from_flat(d: usize, a: usize) -> Result<Self> {
        if d < 2 || a >= d * d {
            return Err(Error::OutOfRange {
                name: "flat weyl index",
                value: a as f64,
                range: "[0, d^2)",
            });
        }
        Self::new(d, a / d, a % d)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn flat(&self) -> usize {
        self.d * self.k + self.l
    }
}

pub fn weyl(idx: WeylIndex) -> ComplexMatrix {
    weyl_with(&RootsOfUnity::new(idx.d), idx)
}

pub(crate) fn weyl_with(w: &RootsOfUnity, idx: WeylIndex) -> ComplexMatrix {
    let d = idx.d;
    let mut u = ComplexMatrix::zeros(d, d);
    for m in 0..d {
        u[(m, (m + idx.l) % d)] = w.pow((idx.k * m) as i64);
    }
    u
}

/// All `d^2` Weyl operators ordered by flat index.
pub fn weyl_basis(d: usize) -> Result<Vec<ComplexMatrix>> {
    let w = RootsOfUnity::new(d);
    (0..d * d)
        .map(|a| WeylIndex::from_flat(d, a).map(|idx| weyl_with(&w, idx)))
        .collect()
}

/// The diagonal operators `U_{d i} = diag(1, w^i, ..., w^(i (d-1)))`, `i = 0..d`.
pub fn weyl_diagonal_family(d: usize) -> Result<Vec<ComplexMatrix>> {
    let w = RootsOfUnity::new(d.max(1));
    (0..d)
        .map(|i| WeylIndex::new(d, i, 0).map(|idx| weyl_with(&w, idx)))
        .collect()
}
